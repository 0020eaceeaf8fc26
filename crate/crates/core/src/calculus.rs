//! Numeric geometric calculus: directional, vector and multivector derivatives
//! by central differences, plus the differential (push-forward) and adjoint
//! (pull-back) outermorphisms of a point map.
//!
//! Callables passed here must be safe to invoke repeatedly with nearby
//! arguments; nothing is cached between calls.

use crate::error::{Error, Result};
use crate::multivector::{grade_of, reversion_sign, Multivector};

pub const DEFAULT_STEP: f64 = 1e-5;

/// Positive finite-difference step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSize(f64);

impl StepSize {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h.is_finite() {
            Ok(StepSize(h))
        } else {
            Err(Error::InvalidArgument(format!("step size must be positive, got {h}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for StepSize {
    fn default() -> Self {
        StepSize(DEFAULT_STEP)
    }
}

fn finite(m: Multivector, what: &str) -> Result<Multivector> {
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

fn check_point(q: &Multivector) -> Result<()> {
    if !q.is_grade(1) {
        return Err(Error::NotPureGrade { expected: 1 });
    }
    Ok(())
}

/// `(F(q + h a) - F(q - h a)) / 2h`.
pub fn directional_derivative<F>(f: F, q: &Multivector, a: &Multivector, h: StepSize) -> Result<Multivector>
where
    F: Fn(&Multivector) -> Multivector,
{
    check_point(q)?;
    let step = a.scale(h.get());
    let forward = finite(f(&q.try_add(&step)?), "function value at forward probe")?;
    let backward = finite(f(&q.try_sub(&step)?), "function value at backward probe")?;
    forward.try_sub(&backward).map(|d| d.scale(0.5 / h.get()))
}

/// Partial derivatives `(e_j . d_q) F` for every axis j.
pub fn partials<F>(f: F, q: &Multivector, h: StepSize) -> Result<Vec<Multivector>>
where
    F: Fn(&Multivector) -> Multivector,
{
    (0..q.dim())
        .map(|j| directional_derivative(&f, q, &Multivector::basis_vector(q.dim(), j), h))
        .collect()
}

/// `d_q F = sum_j e_j (e_j . d_q) F`.
pub fn vector_derivative<F>(f: F, q: &Multivector, h: StepSize) -> Result<Multivector>
where
    F: Fn(&Multivector) -> Multivector,
{
    let parts = partials(&f, q, h)?;
    let mut out = Multivector::zero(q.dim());
    for (j, d) in parts.iter().enumerate() {
        if d.dim() != q.dim() {
            return Err(Error::DimensionMismatch {
                left: q.dim(),
                right: d.dim(),
            });
        }
        out += &(&Multivector::basis_vector(q.dim(), j) * d);
    }
    Ok(out)
}

/// Divergence `d_q . F` of a grade-r field: the grade r-1 part of the vector derivative.
pub fn divergence<F>(f: F, q: &Multivector, grade: usize, h: StepSize) -> Result<Multivector>
where
    F: Fn(&Multivector) -> Multivector,
{
    if grade == 0 {
        return Ok(Multivector::zero(q.dim()));
    }
    vector_derivative(f, q, h)?.grade_project(grade - 1)
}

/// Curl `d_q ^ F` of a grade-r field: the grade r+1 part of the vector derivative.
pub fn curl<F>(f: F, q: &Multivector, grade: usize, h: StepSize) -> Result<Multivector>
where
    F: Fn(&Multivector) -> Multivector,
{
    if grade >= q.dim() {
        return Ok(Multivector::zero(q.dim()));
    }
    vector_derivative(f, q, h)?.grade_project(grade + 1)
}

/// `d_P F(P) = sum_{|J| = D} reverse(e_J) (e_J . d_P) F` for a scalar function
/// of a grade-D argument, differentiated coefficient by coefficient.
pub fn multivector_derivative<F>(f: F, p: &Multivector, grade: usize, h: StepSize) -> Result<Multivector>
where
    F: Fn(&Multivector) -> f64,
{
    if grade > p.dim() {
        return Err(Error::GradeOutOfRange { grade, dim: p.dim() });
    }
    if !p.is_grade(grade) {
        return Err(Error::NotPureGrade { expected: grade });
    }
    let mut out = Multivector::zero(p.dim());
    let mut probe = p.clone();
    for blade in (0..p.coeffs().len()).filter(|b| grade_of(*b) == grade) {
        let base = p.coeff(blade);
        probe.set_coeff(blade, base + h.get());
        let forward = f(&probe);
        probe.set_coeff(blade, base - h.get());
        let backward = f(&probe);
        probe.set_coeff(blade, base);
        let d = (forward - backward) / (2.0 * h.get());
        if !d.is_finite() {
            return Err(Error::NonFinite("multivector derivative".into()));
        }
        out.set_coeff(blade, reversion_sign(grade) * d);
    }
    Ok(out)
}

/// Numeric Jacobian of a vector-valued point map: column j is `e_j . d_q f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Differential {
    columns: Vec<Multivector>,
}

impl Differential {
    pub fn at<F>(f: F, q: &Multivector, h: StepSize) -> Result<Self>
    where
        F: Fn(&Multivector) -> Multivector,
    {
        let columns = partials(&f, q, h)?;
        for c in &columns {
            if c.dim() != q.dim() || !c.is_grade(1) {
                return Err(Error::InvalidArgument(
                    "outermorphisms need a vector-valued map of the same dimension".into(),
                ));
            }
        }
        Ok(Differential { columns })
    }

    /// From an explicit matrix, `rows[i][j] = e_i . f(e_j)`.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("differential matrix must be square".into()));
        }
        let columns = (0..n)
            .map(|j| Multivector::vector(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
            .collect();
        Ok(Differential { columns })
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    fn apply_vector(&self, a: &Multivector) -> Multivector {
        let mut out = Multivector::zero(self.dim());
        for (j, c) in a.vector_part().into_iter().enumerate() {
            if c != 0.0 {
                out += &self.columns[j].scale(c);
            }
        }
        out
    }

    fn adjoint_vector(&self, b: &Multivector) -> Multivector {
        let bv = b.vector_part();
        let comps: Vec<f64> = self
            .columns
            .iter()
            .map(|col| col.vector_part().iter().zip(&bv).map(|(x, y)| x * y).sum())
            .collect();
        Multivector::vector(&comps)
    }

    /// Outermorphism extension of a linear map given by its action on basis
    /// vectors: `e_{j1} ^ ... ^ e_{jr} -> f(e_{j1}) ^ ... ^ f(e_{jr})`,
    /// scalars unchanged.
    fn extend(&self, a: &Multivector, images: &[Multivector]) -> Result<Multivector> {
        let dim = self.dim();
        if a.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: a.dim() });
        }
        let mut out = Multivector::zero(dim);
        for (blade, &c) in a.coeffs().iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let factors: Vec<Multivector> = (0..dim)
                .filter(|j| blade & (1 << j) != 0)
                .map(|j| images[j].clone())
                .collect();
            out += &Multivector::wedge_all(dim, &factors)?.scale(c);
        }
        Ok(out)
    }

    /// Push-forward `f(A)`.
    pub fn push(&self, a: &Multivector) -> Result<Multivector> {
        let images: Vec<Multivector> = (0..self.dim())
            .map(|j| self.apply_vector(&Multivector::basis_vector(self.dim(), j)))
            .collect();
        self.extend(a, &images)
    }

    /// Adjoint (pull-back) `f̄(B)`, with `b . f(a) = f̄(b) . a` on vectors.
    pub fn pull(&self, b: &Multivector) -> Result<Multivector> {
        let images: Vec<Multivector> = (0..self.dim())
            .map(|j| self.adjoint_vector(&Multivector::basis_vector(self.dim(), j)))
            .collect();
        self.extend(b, &images)
    }
}

/// Differential of `f` at `q` applied to `A` as an outermorphism.
pub fn pushforward<F>(f: F, q: &Multivector, a: &Multivector, h: StepSize) -> Result<Multivector>
where
    F: Fn(&Multivector) -> Multivector,
{
    Differential::at(f, q, h)?.push(a)
}

/// Adjoint of the differential of `f` at `q` applied to `B`.
pub fn adjoint<F>(f: F, q: &Multivector, b: &Multivector, h: StepSize) -> Result<Multivector>
where
    F: Fn(&Multivector) -> Multivector,
{
    Differential::at(f, q, h)?.pull(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h() -> StepSize {
        StepSize::default()
    }

    fn norm_sq(q: &Multivector) -> Multivector {
        Multivector::scalar(q.dim(), q.magnitude_squared())
    }

    #[test]
    fn step_size_must_be_positive() {
        assert!(StepSize::new(0.0).is_err());
        assert!(StepSize::new(-1e-3).is_err());
        assert!(StepSize::new(f64::NAN).is_err());
    }

    #[test]
    fn directional_derivative_examples() {
        let q = Multivector::vector(&[0.3, -0.2, 0.5]);
        let a = Multivector::vector(&[1.0, 2.0, -1.0]);
        let d = directional_derivative(|x| x.clone(), &q, &a, h()).unwrap();
        assert!(d.max_abs_diff(&a) < 1e-10);

        let e1 = Multivector::basis_vector(3, 0);
        let d = directional_derivative(norm_sq, &e1, &e1, h()).unwrap();
        assert!((d.scalar_part() - 2.0).abs() < 1e-9);

        let c = Multivector::scalar(3, 7.0);
        let d = directional_derivative(|_| c.clone(), &q, &a, h()).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn non_finite_probe_is_rejected() {
        let q = Multivector::vector(&[0.0, 0.0]);
        let a = Multivector::basis_vector(2, 0);
        let r = directional_derivative(|x| Multivector::scalar(2, 1.0 / x.coeff(1).max(0.0)), &q, &a, h());
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn gradient_of_norm_squared() {
        let q = Multivector::vector(&[0.7, -1.1, 0.4, 2.0]);
        let g = vector_derivative(norm_sq, &q, h()).unwrap();
        assert!(g.max_abs_diff(&q.scale(2.0)) < 1e-8);

        let e1 = Multivector::basis_vector(4, 0);
        let lin = vector_derivative(|x| x.inner(&e1).unwrap(), &q, h()).unwrap();
        assert!(lin.max_abs_diff(&e1) < 1e-10);
    }

    #[test]
    fn divergence_and_curl_split_vector_derivative() {
        // F(q) = (x y, y z, z x) in R^3
        let field = |q: &Multivector| {
            let v = q.vector_part();
            Multivector::vector(&[v[0] * v[1], v[1] * v[2], v[2] * v[0]])
        };
        let q = Multivector::vector(&[0.3, 0.8, -0.5]);
        let full = vector_derivative(field, &q, h()).unwrap();
        let div = divergence(field, &q, 1, h()).unwrap();
        let curl_part = curl(field, &q, 1, h()).unwrap();
        assert!((&div + &curl_part).max_abs_diff(&full) < 1e-12);
        // div = y + z + x
        assert!((div.scalar_part() - (0.8 - 0.5 + 0.3)).abs() < 1e-9);
        // curl bivector components: e12: dF2/dx - dF1/dy = 0 - x
        assert!((curl_part.coeff(0b011) + 0.3).abs() < 1e-9);
        // e23: dF3/dy - dF2/dz = 0 - y
        assert!((curl_part.coeff(0b110) + 0.8).abs() < 1e-9);
        // e13: dF3/dx - dF1/dz = z - 0
        assert!((curl_part.coeff(0b101) + 0.5).abs() < 1e-9);
    }

    #[test]
    fn multivector_derivative_of_square_and_linear_forms() {
        let p = Multivector::from_coeffs(
            3,
            vec![0.0, 0.0, 0.0, 0.4, 0.0, -1.2, 0.7, 0.0],
        )
        .unwrap();
        let d = multivector_derivative(|x| x.magnitude_squared(), &p, 2, h()).unwrap();
        assert!(d.max_abs_diff(&p.reverse().scale(2.0)) < 1e-8);

        let c = Multivector::from_coeffs(3, vec![0.0, 0.0, 0.0, 1.5, 0.0, 0.3, -2.0, 0.0]).unwrap();
        let d = multivector_derivative(|x| x.inner(&c).unwrap().scalar_part(), &p, 2, h()).unwrap();
        assert!(d.max_abs_diff(&c) < 1e-9);

        let d = multivector_derivative(|_| 3.0, &p, 2, h()).unwrap();
        assert!(d.is_zero());

        assert!(multivector_derivative(|_| 0.0, &p, 1, h()).is_err());
    }

    #[test]
    fn outermorphism_of_identity_and_scaling() {
        let q = Multivector::vector(&[0.1, 0.2, 0.3]);
        let a = Multivector::from_coeffs(3, vec![1.0, 2.0, -1.0, 0.5, 3.0, 0.0, 1.0, -2.0]).unwrap();
        let same = pushforward(|x| x.clone(), &q, &a, h()).unwrap();
        assert!(same.max_abs_diff(&a) < 1e-9);
        let back = adjoint(|x| x.clone(), &q, &a, h()).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-9);

        let e12 = Multivector::blade(3, 0b011, 1.0);
        let scaled = pushforward(|x| x.scale(2.0), &q, &e12, h()).unwrap();
        assert!(scaled.max_abs_diff(&e12.scale(4.0)) < 1e-9);
        let e123 = Multivector::blade(3, 0b111, 1.0);
        let scaled = pushforward(|x| x.scale(2.0), &q, &e123, h()).unwrap();
        assert!(scaled.max_abs_diff(&e123.scale(8.0)) < 1e-8);
    }

    #[test]
    fn adjoint_is_transpose_for_matrices() {
        let m = vec![
            vec![1.0, 2.0, 0.5],
            vec![-1.0, 0.3, 4.0],
            vec![0.0, 1.5, -2.0],
        ];
        let f = |x: &Multivector| {
            let v = x.vector_part();
            let out: Vec<f64> = m.iter().map(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
            Multivector::vector(&out)
        };
        let q = Multivector::vector(&[0.4, 0.1, -0.9]);
        let b = Multivector::vector(&[1.0, -2.0, 0.5]);
        let pulled = adjoint(f, &q, &b, h()).unwrap();
        let expected: Vec<f64> = (0..3).map(|j| (0..3).map(|i| m[i][j] * b.vector_part()[i]).sum()).collect();
        assert!(pulled.max_abs_diff(&Multivector::vector(&expected)) < 1e-8);
    }

    #[test]
    fn non_vector_map_rejected() {
        let q = Multivector::vector(&[0.0, 1.0]);
        let a = Multivector::basis_vector(2, 0);
        let r = pushforward(|x| Multivector::scalar(2, x.magnitude()), &q, &a, h());
        assert!(r.is_err());
    }
}
