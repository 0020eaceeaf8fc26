use gamcal::{parse_multivector, Multivector};
use proptest::prelude::*;

fn coeffs(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 1 << dim)
}

fn multivector(dim: usize) -> impl Strategy<Value = Multivector> {
    coeffs(dim).prop_map(move |c| Multivector::from_coeffs(dim, c).unwrap())
}

fn vector(dim: usize) -> impl Strategy<Value = Multivector> {
    prop::collection::vec(-2.0f64..2.0, dim).prop_map(|c| Multivector::vector(&c))
}

fn close(a: &Multivector, b: &Multivector, tol: f64) -> bool {
    a.max_abs_diff(b) <= tol * (1.0 + a.magnitude().max(b.magnitude()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn geometric_product_is_associative((a, b, c) in (3usize..=5).prop_flat_map(|n| (multivector(n), multivector(n), multivector(n)))) {
        let left = a.geometric_product(&b).unwrap().geometric_product(&c).unwrap();
        let right = a.geometric_product(&b.geometric_product(&c).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn reversion_is_an_anti_automorphism((a, b) in (2usize..=5).prop_flat_map(|n| (multivector(n), multivector(n)))) {
        let left = a.geometric_product(&b).unwrap().reverse();
        let right = b.reverse().geometric_product(&a.reverse()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
        prop_assert_eq!(a.reverse().reverse(), a);
    }

    #[test]
    fn vector_times_multivector_splits_into_inner_and_outer((a, m) in (2usize..=5).prop_flat_map(|n| (vector(n), multivector(n)))) {
        // a M = a . M + a ^ M holds grade by grade for r >= 1; the scalar part
        // of M only contributes to the outer product.
        let mut m_no_scalar = m.clone();
        m_no_scalar.set_coeff(0, 0.0);
        let product = a.geometric_product(&m_no_scalar).unwrap();
        let split = a.inner(&m_no_scalar).unwrap().try_add(&a.outer(&m_no_scalar).unwrap()).unwrap();
        prop_assert!(close(&product, &split, 1e-12));
    }

    #[test]
    fn magnitude_of_a_vector_product_factorizes((a, b) in (2usize..=6).prop_flat_map(|n| (vector(n), vector(n)))) {
        let ab = a.geometric_product(&b).unwrap();
        let expected = a.magnitude() * b.magnitude();
        prop_assert!((ab.magnitude() - expected).abs() <= 1e-12 * (1.0 + expected));
    }

    #[test]
    fn outer_product_of_vectors_is_antisymmetric((a, b) in (2usize..=6).prop_flat_map(|n| (vector(n), vector(n)))) {
        let ab = a.outer(&b).unwrap();
        let ba = b.outer(&a).unwrap();
        prop_assert!(close(&ab, &ba.scale(-1.0), 1e-14));
        prop_assert!(a.outer(&a).unwrap().magnitude() <= 1e-14);
    }

    #[test]
    fn blades_have_inverses(vs in (2usize..=5).prop_flat_map(|n| (1..=n).prop_flat_map(move |k| prop::collection::vec(vector(n), k)))) {
        let dim = vs[0].dim();
        let blade = Multivector::wedge_all(dim, &vs).unwrap();
        prop_assume!(blade.magnitude() > 1e-3);
        let inv = blade.blade_inverse().unwrap();
        let one = blade.geometric_product(&inv).unwrap();
        prop_assert!(close(&one, &Multivector::scalar(dim, 1.0), 1e-9));
    }

    #[test]
    fn display_round_trips(m in (2usize..=5).prop_flat_map(multivector)) {
        let back = parse_multivector(&m.to_string(), m.dim()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn grade_projections_sum_to_the_whole(m in (2usize..=6).prop_flat_map(multivector)) {
        let mut total = Multivector::zero(m.dim());
        for r in 0..=m.dim() {
            total = total.try_add(&m.grade_project(r).unwrap()).unwrap();
        }
        prop_assert_eq!(total, m);
    }
}

#[test]
fn pseudoscalar_squares_follow_the_dimension() {
    // I^2 = (-1)^(n(n-1)/2) in a Euclidean algebra.
    for n in 2..=8 {
        let basis: Vec<Multivector> = (0..n).map(|j| Multivector::basis_vector(n, j)).collect();
        let i = Multivector::wedge_all(n, &basis).unwrap();
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(i.geometric_product(&i).unwrap(), Multivector::scalar(n, sign), "n = {n}");
    }
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let a = Multivector::vector(&[1.0, 2.0]);
    let b = Multivector::vector(&[1.0, 2.0, 3.0]);
    assert!(a.geometric_product(&b).is_err());
    assert!(a.inner(&b).is_err());
    assert!(a.outer(&b).is_err());
    assert!(Multivector::from_coeffs(9, vec![0.0; 512]).is_err());
}
