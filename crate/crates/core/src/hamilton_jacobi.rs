//! Local Hamilton-Jacobi theory: a grade-(D-1) function `S(q)` induces the
//! momentum field `P(q) = d_q ^ S(q)`, and `H(q, P(q)) = 0` makes it a
//! solution. Derivatives of a solution family in its parameters are
//! conserved along motions.

use std::fmt;

use crate::calculus::{curl, directional_derivative, divergence, StepSize};
use crate::chain::SimplexChain;
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, Potential, SplitFrame};
use crate::multivector::Multivector;
use crate::solver::{uniform_steps, MotionCurve};

type Field = Box<dyn Fn(&Multivector) -> Multivector + Send + Sync>;
type ParamField = Box<dyn Fn(&Multivector, usize) -> Multivector + Send + Sync>;

/// Tolerance on `|s ^ I_x|` relative to `max(1, |s|)`.
const WEYL_PARALLEL_TOLERANCE: f64 = 1e-10;

/// A grade-(D-1) function `S(q)`, optionally one member of a family with
/// parameters `alpha` and known derivatives `d S / d alpha_k`.
pub struct HjFunction {
    grade: usize,
    value: Field,
    params: Vec<f64>,
    param_derivative: Option<ParamField>,
    /// Point and radius inside which the parameter derivative is not sampled.
    singular: Option<(Multivector, f64)>,
}

impl fmt::Debug for HjFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HjFunction")
            .field("grade", &self.grade)
            .field("params", &self.params)
            .field("has_param_derivative", &self.param_derivative.is_some())
            .finish()
    }
}

impl HjFunction {
    pub fn new<F>(grade: usize, value: F) -> Self
    where
        F: Fn(&Multivector) -> Multivector + Send + Sync + 'static,
    {
        HjFunction {
            grade,
            value: Box::new(value),
            params: Vec::new(),
            param_derivative: None,
            singular: None,
        }
    }

    /// Attaches parameter values and `(q, k) -> dS/d alpha_k (q)`.
    pub fn with_parameters<G>(mut self, params: Vec<f64>, derivative: G) -> Self
    where
        G: Fn(&Multivector, usize) -> Multivector + Send + Sync + 'static,
    {
        self.params = params;
        self.param_derivative = Some(Box::new(derivative));
        self
    }

    /// `S = Lambda |q - q0|`, the free relativistic particle, with the
    /// components of `q0` as parameters. Samples closer than `1e-4` to `q0`
    /// are skipped when the parameter derivative is evaluated.
    pub fn relativistic_particle(tension: f64, q0: Multivector) -> Result<Self> {
        if !(tension > 0.0 && tension.is_finite()) {
            return Err(Error::InvalidArgument(format!("tension must be positive, got {tension}")));
        }
        if !q0.is_grade(1) {
            return Err(Error::NotPureGrade { expected: 1 });
        }
        let center = q0.clone();
        let center_d = q0.clone();
        let dim = q0.dim();
        let mut s = HjFunction::new(0, move |q| Multivector::scalar(dim, tension * (q - &center).magnitude()))
            .with_parameters(q0.vector_part(), move |q, k| {
                let r = q - &center_d;
                Multivector::scalar(dim, -tension * r.coeff(1 << k) / r.magnitude())
            });
        s.singular = Some((q0, 1e-4));
        Ok(s)
    }

    /// Weyl family `s = (c phi - (c^2 / 2 + v0) x_1) e_1` for the constant
    /// potential `V = v0`, expressed as `S = s . reverse(I_x)`, with parameter `c`.
    pub fn weyl_linear(frame: &SplitFrame, c: f64, v0: f64) -> Result<Self> {
        frame.e_y()?;
        let dim = frame.dim();
        let field_bit = 1 << frame.field_axis().expect("checked by e_y");
        let rev_ix = frame.i_x()?.reverse();
        let e1 = Multivector::basis_vector(dim, 0);
        let to_s = move |coef: f64| e1.scale(coef).inner(&rev_ix).expect("same dimension");
        let to_ds = to_s.clone();
        Ok(
            HjFunction::new(frame.motion_dim() - 1, move |q| {
                to_s(c * q.coeff(field_bit) - (0.5 * c * c + v0) * q.coeff(1))
            })
            .with_parameters(vec![c], move |q, _| to_ds(q.coeff(field_bit) - c * q.coeff(1))),
        )
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn has_param_derivative(&self) -> bool {
        self.param_derivative.is_some()
    }

    /// `S(q)`; errors if the output is not of the declared grade.
    pub fn eval(&self, q: &Multivector) -> Result<Multivector> {
        let out = (self.value)(q);
        if !out.is_finite() {
            return Err(Error::NonFinite("HJ function value".into()));
        }
        if !out.is_zero() && !out.is_grade(self.grade) {
            return Err(Error::NotPureGrade { expected: self.grade });
        }
        Ok(out)
    }

    /// `dS / d alpha_k` at `q`, `None` inside the singular neighbourhood.
    pub fn param_derivative(&self, q: &Multivector, k: usize) -> Result<Option<Multivector>> {
        let d = self
            .param_derivative
            .as_ref()
            .ok_or_else(|| Error::Missing("HJ function has no parameter derivative".into()))?;
        if k >= self.params.len() {
            return Err(Error::InvalidArgument(format!("no parameter {k}")));
        }
        if let Some((center, radius)) = &self.singular {
            if q.try_sub(center)?.magnitude() < *radius {
                return Ok(None);
            }
        }
        let out = d(q, k);
        if !out.is_finite() {
            return Err(Error::NonFinite("HJ parameter derivative".into()));
        }
        Ok(Some(out))
    }

    /// Induced momentum `P = d_q ^ S` at `q`. Points within `10 h` of a
    /// known singular point are rejected.
    pub fn momentum(&self, q: &Multivector, h: StepSize) -> Result<Multivector> {
        if let Some((center, _)) = &self.singular {
            if q.try_sub(center)?.magnitude() < 10.0 * h.get() {
                return Err(Error::Singular("point too close to the singularity of S".into()));
            }
        }
        self.eval(q)?;
        curl(|x| (self.value)(x), q, self.grade, h)
    }
}

/// `|H(q, d_q ^ S)|` with the curl taken by central differences.
pub fn hj_residual<H: Hamiltonian + ?Sized>(h: &H, s: &HjFunction, q: &Multivector, step: StepSize) -> Result<f64> {
    if s.grade() + 1 != h.motion_dim() {
        return Err(Error::InvalidArgument(format!(
            "S must have grade D - 1 = {}, got {}",
            h.motion_dim() - 1,
            s.grade()
        )));
    }
    let p = s.momentum(q, step)?;
    Ok(h.eval(q, &p)?.abs())
}

/// `|d_q . s + 1/2 |d_phi s|^2 + V(phi)|` for a vector field `s` in the span
/// of `I_x`, where `d_phi = e_y . d_q`.
pub fn weyl_hj_residual<F>(
    potential: &Potential,
    frame: &SplitFrame,
    s: F,
    q: &Multivector,
    step: StepSize,
) -> Result<f64>
where
    F: Fn(&Multivector) -> Multivector,
{
    let i_x = frame.i_x()?;
    let e_y = frame.e_y()?;
    if q.dim() != frame.dim() {
        return Err(Error::DimensionMismatch {
            left: frame.dim(),
            right: q.dim(),
        });
    }
    let value = s(q);
    if !value.is_finite() {
        return Err(Error::NonFinite("Weyl function value".into()));
    }
    if !value.is_zero() && !value.is_grade(1) {
        return Err(Error::NotPureGrade { expected: 1 });
    }
    if value.outer(&i_x)?.magnitude() > WEYL_PARALLEL_TOLERANCE * value.magnitude().max(1.0) {
        return Err(Error::InvalidArgument("s is not parallel to I_x".into()));
    }
    let div = divergence(&s, q, 1, step)?.scalar_part();
    let along_field = directional_derivative(&s, q, &e_y, step)?;
    Ok((div + 0.5 * along_field.magnitude_squared() + potential.eval(frame.phi(q)?)).abs())
}

/// Samples of `dS / d alpha_k` along a motion.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservedQuantity {
    /// `None` where the sample was skipped as singular.
    pub values: Vec<Option<f64>>,
    /// `max - min` over the sampled values.
    pub spread: f64,
}

/// `dS / d alpha_k` at each sample of a D = 1 motion and its spread.
pub fn conserved_quantity(s: &HjFunction, motion: &MotionCurve, k: usize) -> Result<ConservedQuantity> {
    if s.grade() != 0 {
        return Err(Error::InvalidArgument("conserved quantities need D = 1 (scalar S)".into()));
    }
    let values = motion
        .points()
        .iter()
        .map(|q| Ok(s.param_derivative(q, k)?.map(|d| d.scalar_part())))
        .collect::<Result<Vec<_>>>()?;
    let sampled = values.iter().flatten();
    let max = sampled.clone().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = sampled.cloned().fold(f64::INFINITY, f64::min);
    let spread = if max >= min { max - min } else { 0.0 };
    Ok(ConservedQuantity { values, spread })
}

/// The straight motion selected by the level set `(q - q0) / |q - q0| = v`
/// of the free-particle family, sampled with the same spacing as
/// [`crate::solver::solve_geodesic`].
pub fn motion_from_hj(q0: &Multivector, v: &Multivector, s_end: f64, ds: f64) -> Result<MotionCurve> {
    if !q0.is_grade(1) || !v.is_grade(1) {
        return Err(Error::NotPureGrade { expected: 1 });
    }
    if q0.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: q0.dim(),
            right: v.dim(),
        });
    }
    if (v.magnitude() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("direction must be a unit vector, |v| = {}", v.magnitude())));
    }
    let (steps, step) = uniform_steps(s_end, ds)?;
    let taus: Vec<f64> = (0..=steps).map(|k| k as f64 * step).collect();
    let points = taus.iter().map(|s| q0 + &v.scale(*s)).collect();
    MotionCurve::new(taus, points, Vec::new())
}

/// `|sum over the boundary of dSigma . dS/d alpha_k|` for a D >= 2 patch.
pub fn hj_continuity_check(s: &HjFunction, k: usize, patch: &SimplexChain) -> Result<f64> {
    let d = patch.simplex_dim();
    if d < 2 {
        return Err(Error::InvalidArgument("continuity check needs a patch with D >= 2".into()));
    }
    if s.grade() + 1 != d {
        return Err(Error::InvalidArgument(format!("S must have grade {}, got {}", d - 1, s.grade())));
    }
    let boundary = patch.boundary()?;
    if boundary.is_empty() {
        return Err(Error::InvalidArgument("patch has no boundary".into()));
    }
    if !boundary.boundary()?.is_empty() {
        return Err(Error::InconsistentOrientation("patch boundary is not closed".into()));
    }
    let mut total = 0.0;
    for i in 0..boundary.len() {
        let q = boundary.centroid(i);
        let field = s
            .param_derivative(&q, k)?
            .ok_or_else(|| Error::Singular(format!("boundary face {i} meets a singular point")))?;
        total += boundary.volume_element(i)?.inner(&field)?.scalar_part();
    }
    Ok(total.abs())
}

/// Largest `|d_q ^ P|` over `points`, `P = d_q ^ S` computed with step `h`
/// and differentiated again with the same step.
pub fn momentum_curl(s: &HjFunction, points: &[Multivector], step: StepSize) -> Result<f64> {
    points.iter().try_fold(0.0f64, |acc, q| {
        let c = curl(
            |x| s.momentum(x, step).unwrap_or_else(|_| Multivector::scalar(x.dim(), f64::NAN)),
            q,
            s.grade() + 1,
            step,
        )?;
        Ok(acc.max(c.magnitude()))
    })
}

/// Residual of the momentum transport equation along a D = 1 motion when
/// the momentum is the one induced by `S`:
/// `max_i |P(q_{i+1}) - P(q_i) + lambda_i d_q H| / |dG_i|` with
/// `lambda_i = |dG_i| / |d_P H|` and both gradients at the segment midpoint.
pub fn transported_momentum_residual<H: Hamiltonian + ?Sized>(
    h: &H,
    s: &HjFunction,
    motion: &MotionCurve,
    step: StepSize,
) -> Result<f64> {
    if h.motion_dim() != 1 || s.grade() != 0 {
        return Err(Error::InvalidArgument("transport check needs D = 1".into()));
    }
    let pts = motion.points();
    let momenta = pts.iter().map(|q| s.momentum(q, step)).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for i in 0..pts.len().saturating_sub(1) {
        let segment = &pts[i + 1] - &pts[i];
        let length = segment.magnitude();
        let mid = (&pts[i] + &pts[i + 1]).scale(0.5);
        let p_mid = (&momenta[i] + &momenta[i + 1]).scale(0.5);
        let grad_p = h.grad_p(&mid, &p_mid)?;
        let lambda = length / grad_p.magnitude();
        let force = h.grad_q_explicit(&mid, &p_mid)?;
        let change = &(&momenta[i + 1] - &momenta[i]) + &force.scale(lambda);
        worst = worst.max(change.magnitude() / length);
    }
    Ok(worst)
}
