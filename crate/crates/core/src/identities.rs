//! Randomized checks of the standard algebraic identities of the geometric
//! algebra. Callers supply the random stream, so the same cases can be
//! reproduced from a seed.

use crate::error::Result;
use crate::multivector::{grade_of, Multivector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    InnerSwap,
    OuterSwap,
    InnerOfInner,
    InnerByOuterRight,
    InnerRegroup,
    VectorInnerOfOuter,
    VectorOuterOfInner,
    Expansion,
    ReversionProduct,
    GramDeterminant,
}

impl Identity {
    pub const ALL: [Identity; 10] = [
        Identity::InnerSwap,
        Identity::OuterSwap,
        Identity::InnerOfInner,
        Identity::InnerByOuterRight,
        Identity::InnerRegroup,
        Identity::VectorInnerOfOuter,
        Identity::VectorOuterOfInner,
        Identity::Expansion,
        Identity::ReversionProduct,
        Identity::GramDeterminant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::InnerSwap => "inner_swap",
            Identity::OuterSwap => "outer_swap",
            Identity::InnerOfInner => "inner_of_inner",
            Identity::InnerByOuterRight => "inner_by_outer_right",
            Identity::InnerRegroup => "inner_regroup",
            Identity::VectorInnerOfOuter => "vector_inner_of_outer",
            Identity::VectorOuterOfInner => "vector_outer_of_inner",
            Identity::Expansion => "expansion",
            Identity::ReversionProduct => "reversion_product",
            Identity::GramDeterminant => "gram_determinant",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Identity::InnerSwap => "A_r . B_s = (-1)^(r(s-1)) B_s . A_r, r <= s",
            Identity::OuterSwap => "A_r ^ B_s = (-1)^(rs) B_s ^ A_r",
            Identity::InnerOfInner => "A_r . (B_s . C_t) = (A_r ^ B_s) . C_t, r + s <= t, r, s > 0",
            Identity::InnerByOuterRight => "(C_t . B_s) . A_r = C_t . (B_s ^ A_r), r + s <= t, r, s > 0",
            Identity::InnerRegroup => "A_r . (B_s . C_t) = (A_r . B_s) . C_t, r + t <= s",
            Identity::VectorInnerOfOuter => "a . (A_r ^ B_s) = (a . A_r) ^ B_s + (-1)^r A_r ^ (a . B_s)",
            Identity::VectorOuterOfInner => {
                "a ^ (A_r . B_s) = (a . A_r) . B_s + (-1)^r A_r . (a ^ B_s), s >= r > 1"
            }
            Identity::Expansion => "a . (a_1 ^ ... ^ a_r) = sum_j (-1)^(j-1) (a . a_j) a_1 ^ .. [a_j] .. ^ a_r",
            Identity::ReversionProduct => "reverse(A B) = reverse(B) reverse(A)",
            Identity::GramDeterminant => "reverse(a_1 ^ ... ^ a_r) . (b_1 ^ ... ^ b_r) = det(a_j . b_k)",
        }
    }

    pub fn from_name(name: &str) -> Option<Identity> {
        Self::ALL.into_iter().find(|i| i.name() == name)
    }
}

/// Source of uniform samples in `[0, 1)`.
pub trait Uniform {
    fn next_unit(&mut self) -> f64;
}

impl<F: FnMut() -> f64> Uniform for F {
    fn next_unit(&mut self) -> f64 {
        self()
    }
}

fn pick<U: Uniform + ?Sized>(rng: &mut U, lo: usize, hi: usize) -> usize {
    let span = (hi - lo + 1) as f64;
    lo + ((rng.next_unit() * span) as usize).min(hi - lo)
}

fn coefficient<U: Uniform + ?Sized>(rng: &mut U) -> f64 {
    2.0 * rng.next_unit() - 1.0
}

/// Random r-vector with coefficients uniform in `[-1, 1)`.
pub fn random_homogeneous<U: Uniform + ?Sized>(rng: &mut U, dim: usize, grade: usize) -> Multivector {
    let mut m = Multivector::zero(dim);
    for blade in (0..1usize << dim).filter(|b| grade_of(*b) == grade) {
        m.set_coeff(blade, coefficient(rng));
    }
    m
}

/// Random multivector with every coefficient populated.
pub fn random_multivector<U: Uniform + ?Sized>(rng: &mut U, dim: usize) -> Multivector {
    let mut m = Multivector::zero(dim);
    for blade in 0..1usize << dim {
        m.set_coeff(blade, coefficient(rng));
    }
    m
}

pub fn random_vector<U: Uniform + ?Sized>(rng: &mut U, dim: usize) -> Multivector {
    random_homogeneous(rng, dim, 1)
}

fn sign(exponent: usize) -> f64 {
    if exponent % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `|lhs - rhs| / max(|lhs|, |rhs|, scale)`, zero when all three vanish.
fn relative_error(lhs: &Multivector, rhs: &Multivector, scale: f64) -> Result<f64> {
    let diff = lhs.try_sub(rhs)?.magnitude();
    let denom = lhs.magnitude().max(rhs.magnitude()).max(scale);
    Ok(if denom == 0.0 { diff } else { diff / denom })
}

fn product_of_magnitudes(items: &[&Multivector]) -> f64 {
    items.iter().map(|m| m.magnitude()).product()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut rows: Vec<Vec<f64>>) -> f64 {
    let n = rows.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|a, b| rows[*a][col].abs().total_cmp(&rows[*b][col].abs()))
            .expect("non-empty range");
        if rows[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            rows.swap(pivot, col);
            det = -det;
        }
        det *= rows[col][col];
        for r in col + 1..n {
            let factor = rows[r][col] / rows[col][col];
            for c in col..n {
                rows[r][c] -= factor * rows[col][c];
            }
        }
    }
    det
}

/// Evaluates one random instance of `identity` in R^dim and returns its
/// relative error.
pub fn check_case<U: Uniform + ?Sized>(identity: Identity, dim: usize, rng: &mut U) -> Result<f64> {
    let n = dim;
    match identity {
        Identity::InnerSwap => {
            let r = pick(rng, 1, n);
            let s = pick(rng, r, n);
            let a = random_homogeneous(rng, n, r);
            let b = random_homogeneous(rng, n, s);
            let lhs = a.inner(&b)?;
            let rhs = b.inner(&a)?.scale(sign(r * (s - 1)));
            relative_error(&lhs, &rhs, product_of_magnitudes(&[&a, &b]))
        }
        Identity::OuterSwap => {
            let r = pick(rng, 0, n);
            let s = pick(rng, 0, n - r);
            let a = random_homogeneous(rng, n, r);
            let b = random_homogeneous(rng, n, s);
            let lhs = a.outer(&b)?;
            let rhs = b.outer(&a)?.scale(sign(r * s));
            relative_error(&lhs, &rhs, product_of_magnitudes(&[&a, &b]))
        }
        Identity::InnerOfInner | Identity::InnerByOuterRight => {
            let t = pick(rng, 2, n);
            let r = pick(rng, 1, t - 1);
            let s = pick(rng, 1, t - r);
            let a = random_homogeneous(rng, n, r);
            let b = random_homogeneous(rng, n, s);
            let c = random_homogeneous(rng, n, t);
            let (lhs, rhs) = if identity == Identity::InnerOfInner {
                (a.inner(&b.inner(&c)?)?, a.outer(&b)?.inner(&c)?)
            } else {
                (c.inner(&b)?.inner(&a)?, c.inner(&b.outer(&a)?)?)
            };
            relative_error(&lhs, &rhs, product_of_magnitudes(&[&a, &b, &c]))
        }
        Identity::InnerRegroup => {
            let s = pick(rng, 2, n);
            let r = pick(rng, 1, s - 1);
            let t = pick(rng, 1, s - r);
            let a = random_homogeneous(rng, n, r);
            let b = random_homogeneous(rng, n, s);
            let c = random_homogeneous(rng, n, t);
            let lhs = a.inner(&b.inner(&c)?)?;
            let rhs = a.inner(&b)?.inner(&c)?;
            relative_error(&lhs, &rhs, product_of_magnitudes(&[&a, &b, &c]))
        }
        Identity::VectorInnerOfOuter => {
            let r = pick(rng, 0, n);
            let s = pick(rng, 0, n - r);
            let v = random_vector(rng, n);
            let a = random_homogeneous(rng, n, r);
            let b = random_homogeneous(rng, n, s);
            let lhs = v.inner(&a.outer(&b)?)?;
            let rhs = v.inner(&a)?.outer(&b)?.try_add(&a.outer(&v.inner(&b)?)?.scale(sign(r)))?;
            relative_error(&lhs, &rhs, product_of_magnitudes(&[&v, &a, &b]))
        }
        Identity::VectorOuterOfInner => {
            let r = pick(rng, 2, n);
            let s = pick(rng, r, n);
            let v = random_vector(rng, n);
            let a = random_homogeneous(rng, n, r);
            let b = random_homogeneous(rng, n, s);
            let lhs = v.outer(&a.inner(&b)?)?;
            let rhs = v.inner(&a)?.inner(&b)?.try_add(&a.inner(&v.outer(&b)?)?.scale(sign(r)))?;
            relative_error(&lhs, &rhs, product_of_magnitudes(&[&v, &a, &b]))
        }
        Identity::Expansion => {
            let r = pick(rng, 1, n.min(4));
            let v = random_vector(rng, n);
            let factors: Vec<Multivector> = (0..r).map(|_| random_vector(rng, n)).collect();
            let lhs = v.inner(&Multivector::wedge_all(n, &factors)?)?;
            let mut rhs = Multivector::zero(n);
            for j in 0..r {
                let rest: Vec<Multivector> = factors
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, f)| f.clone())
                    .collect();
                let term = Multivector::wedge_all(n, &rest)?.scale(sign(j) * v.scalar_product(&factors[j])?);
                rhs = rhs.try_add(&term)?;
            }
            let mut all: Vec<&Multivector> = factors.iter().collect();
            all.push(&v);
            relative_error(&lhs, &rhs, product_of_magnitudes(&all))
        }
        Identity::ReversionProduct => {
            let a = random_multivector(rng, n);
            let b = random_multivector(rng, n);
            let lhs = a.geometric_product(&b)?.reverse();
            let rhs = b.reverse().geometric_product(&a.reverse())?;
            relative_error(&lhs, &rhs, product_of_magnitudes(&[&a, &b]))
        }
        Identity::GramDeterminant => {
            let r = pick(rng, 1, n);
            let a: Vec<Multivector> = (0..r).map(|_| random_vector(rng, n)).collect();
            let b: Vec<Multivector> = (0..r).map(|_| random_vector(rng, n)).collect();
            let blade_form = Multivector::gram_det(&a, &b)?;
            let matrix = a
                .iter()
                .map(|x| b.iter().map(|y| x.scalar_product(y)).collect::<Result<Vec<f64>>>())
                .collect::<Result<Vec<_>>>()?;
            let det = determinant(matrix);
            let scale: f64 = a.iter().chain(&b).map(|v| v.magnitude()).product();
            relative_error(&Multivector::scalar(n, blade_form), &Multivector::scalar(n, det), scale)
        }
    }
}

/// Worst relative error of `identity` over `cases` random instances.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub identity: Identity,
    pub dim: usize,
    pub cases: usize,
    pub max_error: f64,
}

impl IdentityReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_error <= tolerance
    }
}

pub fn run_identity<U: Uniform + ?Sized>(identity: Identity, dim: usize, cases: usize, rng: &mut U) -> Result<IdentityReport> {
    let mut max_error = 0.0f64;
    for _ in 0..cases {
        max_error = max_error.max(check_case(identity, dim, rng)?);
    }
    Ok(IdentityReport {
        identity,
        dim,
        cases,
        max_error,
    })
}
