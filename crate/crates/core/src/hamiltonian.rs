//! Hamiltonian constraints `H(q, P)` with analytic gradients.
//!
//! `q` is a grade-1 point of configuration space R^n and `P` a grade-D
//! momentum. Three systems are built in:
//!
//! - non-relativistic mechanics, `H = P . e_t + H0(q, P)` with D = 1;
//! - De Donder-Weyl scalar field, `H = P . I_x + 1/2 sum_j (P . E_j)^2 + V(phi)`
//!   with `n = D + 1`, `E_j = I_x e_j e_y` and `phi = e_y . q`;
//! - minimal surfaces, `H = 1/2 (|P|^2 - Lambda^2)`.
//!
//! `grad_q_explicit` differentiates only the explicit `q` dependence, with `P`
//! held fixed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multivector::Multivector;

/// Polynomial `V(phi) = c_0 + c_1 phi + ... + c_k phi^k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Potential {
    coeffs: Vec<f64>,
}

impl Potential {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("potential coefficient".into()));
        }
        Ok(Potential { coeffs })
    }

    pub fn zero() -> Self {
        Potential { coeffs: Vec::new() }
    }

    /// `1/2 m phi^2`.
    pub fn harmonic(mass_sq: f64) -> Self {
        Potential {
            coeffs: vec![0.0, 0.0, 0.5 * mass_sq],
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    /// True when V does not depend on phi.
    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| *c == 0.0)
    }

    pub fn derivative(&self) -> Potential {
        Potential {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        }
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * phi + c)
    }

    pub fn eval_d(&self, phi: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * phi + k as f64 * c)
    }

    pub fn eval_dd(&self, phi: f64) -> f64 {
        self.derivative().eval_d(phi)
    }
}

/// Orthonormal splitting of configuration space.
///
/// Mechanics uses a time axis `e_t`; field theory uses the spacetime blade
/// `I_x = e_1 ... e_D` over the first D axes and the field axis `e_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitFrame {
    dim: usize,
    motion_dim: usize,
    time_axis: Option<usize>,
    field_axis: Option<usize>,
}

impl SplitFrame {
    /// D = 1 frame with `e_t` the basis vector of `time_axis`.
    pub fn mechanics(dim: usize, time_axis: usize) -> Result<Self> {
        if !(2..=crate::multivector::MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if time_axis >= dim {
            return Err(Error::InvalidArgument(format!(
                "time axis {time_axis} outside R^{dim}"
            )));
        }
        Ok(SplitFrame {
            dim,
            motion_dim: 1,
            time_axis: Some(time_axis),
            field_axis: None,
        })
    }

    /// Field frame in R^{D+1}: spacetime axes `0..D`, field axis `D`.
    pub fn field(motion_dim: usize) -> Result<Self> {
        let dim = motion_dim + 1;
        if motion_dim < 1 || dim > crate::multivector::MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(SplitFrame {
            dim,
            motion_dim,
            time_axis: None,
            field_axis: Some(motion_dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn motion_dim(&self) -> usize {
        self.motion_dim
    }

    pub fn time_axis(&self) -> Option<usize> {
        self.time_axis
    }

    pub fn field_axis(&self) -> Option<usize> {
        self.field_axis
    }

    pub fn e_t(&self) -> Result<Multivector> {
        let axis = self
            .time_axis
            .ok_or_else(|| Error::InvalidArgument("frame has no time axis".into()))?;
        Ok(Multivector::basis_vector(self.dim, axis))
    }

    pub fn e_y(&self) -> Result<Multivector> {
        let axis = self
            .field_axis
            .ok_or_else(|| Error::InvalidArgument("frame has no field axis".into()))?;
        Ok(Multivector::basis_vector(self.dim, axis))
    }

    /// `I_x = e_1 e_2 ... e_D`.
    pub fn i_x(&self) -> Result<Multivector> {
        self.e_y()?;
        Ok(Multivector::blade(self.dim, (1 << self.motion_dim) - 1, 1.0))
    }

    /// `E_j = I_x e_j e_y` for zero-based spacetime index `j`.
    pub fn e_field(&self, j: usize) -> Result<Multivector> {
        if j >= self.motion_dim {
            return Err(Error::InvalidArgument(format!("no spacetime axis {j}")));
        }
        let ej = Multivector::basis_vector(self.dim, j);
        Ok(&(&self.i_x()? * &ej) * &self.e_y()?)
    }

    /// Field value `phi = e_y . q`.
    pub fn phi(&self, q: &Multivector) -> Result<f64> {
        Ok(q.coeff(1 << self.field_axis.ok_or_else(|| {
            Error::InvalidArgument("frame has no field axis".into())
        })?))
    }
}

pub trait Hamiltonian {
    /// D, the grade of the momentum.
    fn motion_dim(&self) -> usize;

    /// n, the dimension of configuration space.
    fn config_dim(&self) -> usize;

    fn eval(&self, q: &Multivector, p: &Multivector) -> Result<f64>;

    /// Derivative in `q` with `P` held fixed.
    fn grad_q_explicit(&self, q: &Multivector, p: &Multivector) -> Result<Multivector>;

    /// Multivector derivative in `P`, a grade-D multivector.
    fn grad_p(&self, q: &Multivector, p: &Multivector) -> Result<Multivector>;

    fn check_args(&self, q: &Multivector, p: &Multivector) -> Result<()> {
        let n = self.config_dim();
        for m in [q, p] {
            if m.dim() != n {
                return Err(Error::DimensionMismatch { left: n, right: m.dim() });
            }
        }
        if !q.is_grade(1) {
            return Err(Error::NotPureGrade { expected: 1 });
        }
        if !p.is_grade(self.motion_dim()) {
            return Err(Error::NotPureGrade {
                expected: self.motion_dim(),
            });
        }
        Ok(())
    }
}

/// The reduced Hamiltonian `H0(q, p)` of a mechanical system.
///
/// `grad_p` must have no component along `e_t`; `grad_q` is the full
/// explicit derivative, its `e_t` part being the explicit time dependence.
pub trait ReducedHamiltonian {
    fn value(&self, frame: &SplitFrame, q: &Multivector, p: &Multivector) -> f64;
    fn grad_q(&self, frame: &SplitFrame, q: &Multivector, p: &Multivector) -> Multivector;
    fn grad_p(&self, frame: &SplitFrame, q: &Multivector, p: &Multivector) -> Multivector;
}

/// `H0 = |p_x|^2 / 2m + sum_k V(x_k)` over the spatial axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableH0 {
    pub mass: f64,
    pub potential: Potential,
}

impl SeparableH0 {
    pub fn new(mass: f64, potential: Potential) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
        }
        Ok(SeparableH0 { mass, potential })
    }

    fn spatial_axes(frame: &SplitFrame) -> impl Iterator<Item = usize> + '_ {
        (0..frame.dim()).filter(move |k| Some(*k) != frame.time_axis())
    }
}

impl ReducedHamiltonian for SeparableH0 {
    fn value(&self, frame: &SplitFrame, q: &Multivector, p: &Multivector) -> f64 {
        Self::spatial_axes(frame)
            .map(|k| {
                let pk = p.coeff(1 << k);
                pk * pk / (2.0 * self.mass) + self.potential.eval(q.coeff(1 << k))
            })
            .sum()
    }

    fn grad_q(&self, frame: &SplitFrame, q: &Multivector, _p: &Multivector) -> Multivector {
        let mut g = Multivector::zero(frame.dim());
        for k in Self::spatial_axes(frame) {
            g.set_coeff(1 << k, self.potential.eval_d(q.coeff(1 << k)));
        }
        g
    }

    fn grad_p(&self, frame: &SplitFrame, _q: &Multivector, p: &Multivector) -> Multivector {
        let mut g = Multivector::zero(frame.dim());
        for k in Self::spatial_axes(frame) {
            g.set_coeff(1 << k, p.coeff(1 << k) / self.mass);
        }
        g
    }
}

/// `H = P . e_t + H0(q, P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanicsHamiltonian<H0> {
    frame: SplitFrame,
    h0: H0,
}

/// Tolerance on `e_t . d_p H0`, relative to `1 + |d_p H0|`.
const TIME_ORTHOGONALITY_TOLERANCE: f64 = 1e-12;

pub fn mechanics_hamiltonian<H0: ReducedHamiltonian>(
    h0: H0,
    frame: SplitFrame,
) -> Result<MechanicsHamiltonian<H0>> {
    if frame.motion_dim() != 1 {
        return Err(Error::InvalidArgument("mechanics needs D = 1".into()));
    }
    frame.e_t()?;
    Ok(MechanicsHamiltonian { frame, h0 })
}

impl<H0: ReducedHamiltonian> MechanicsHamiltonian<H0> {
    pub fn frame(&self) -> &SplitFrame {
        &self.frame
    }

    pub fn reduced(&self) -> &H0 {
        &self.h0
    }

    /// `H0(q, p)`, the mechanical energy.
    pub fn energy(&self, q: &Multivector, p: &Multivector) -> f64 {
        self.h0.value(&self.frame, q, p)
    }

    fn reduced_grad_p(&self, q: &Multivector, p: &Multivector) -> Result<Multivector> {
        let g = self.h0.grad_p(&self.frame, q, p);
        let along_time = g.coeff(1 << self.frame.time_axis().expect("checked at construction"));
        if along_time.abs() > TIME_ORTHOGONALITY_TOLERANCE * (1.0 + g.magnitude()) {
            return Err(Error::InvalidArgument(format!(
                "H0 momentum gradient has e_t component {along_time:e}"
            )));
        }
        Ok(g)
    }
}

impl<H0: ReducedHamiltonian> Hamiltonian for MechanicsHamiltonian<H0> {
    fn motion_dim(&self) -> usize {
        1
    }

    fn config_dim(&self) -> usize {
        self.frame.dim()
    }

    fn eval(&self, q: &Multivector, p: &Multivector) -> Result<f64> {
        self.check_args(q, p)?;
        Ok(p.scalar_product(&self.frame.e_t()?)? + self.h0.value(&self.frame, q, p))
    }

    fn grad_q_explicit(&self, q: &Multivector, p: &Multivector) -> Result<Multivector> {
        self.check_args(q, p)?;
        Ok(self.h0.grad_q(&self.frame, q, p))
    }

    fn grad_p(&self, q: &Multivector, p: &Multivector) -> Result<Multivector> {
        self.check_args(q, p)?;
        Ok(&self.frame.e_t()? + &self.reduced_grad_p(q, p)?)
    }
}

/// `H = P . I_x + 1/2 sum_j (P . E_j)^2 + V(e_y . q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DwHamiltonian {
    frame: SplitFrame,
    potential: Potential,
    i_x: Multivector,
    e_fields: Vec<Multivector>,
}

pub fn dw_hamiltonian(potential: Potential, frame: SplitFrame) -> Result<DwHamiltonian> {
    if frame.motion_dim() < 2 {
        return Err(Error::InvalidArgument("De Donder-Weyl field needs D >= 2".into()));
    }
    let i_x = frame.i_x()?;
    let e_fields = (0..frame.motion_dim())
        .map(|j| frame.e_field(j))
        .collect::<Result<Vec<_>>>()?;
    Ok(DwHamiltonian {
        frame,
        potential,
        i_x,
        e_fields,
    })
}

impl DwHamiltonian {
    pub fn frame(&self) -> &SplitFrame {
        &self.frame
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn i_x(&self) -> &Multivector {
        &self.i_x
    }

    pub fn e_fields(&self) -> &[Multivector] {
        &self.e_fields
    }

    /// Momentum components `pi_j = P . E_j`.
    pub fn field_momenta(&self, p: &Multivector) -> Result<Vec<f64>> {
        self.e_fields.iter().map(|e| p.scalar_product(e)).collect()
    }

    /// `H_DW = 1/2 sum_j (P . E_j)^2 + V(phi)`.
    pub fn dw_part(&self, q: &Multivector, p: &Multivector) -> Result<f64> {
        let kinetic: f64 = self.field_momenta(p)?.iter().map(|pi| 0.5 * pi * pi).sum();
        Ok(kinetic + self.potential.eval(self.frame.phi(q)?))
    }

    /// `d_P H_DW = sum_j (P . E_j) E_j`.
    pub fn grad_p_dw(&self, p: &Multivector) -> Result<Multivector> {
        let mut g = Multivector::zero(self.frame.dim());
        for (pi, e) in self.field_momenta(p)?.into_iter().zip(&self.e_fields) {
            g += &e.scale(pi);
        }
        Ok(g)
    }

    /// The momentum on the constraint surface with given field momenta:
    /// `P = reverse(I_x) (I_x . P) + sum_k reverse(E_k) pi_k` with
    /// `I_x . P = -(1/2 sum pi^2 + V(phi))`.
    pub fn momentum_on_shell(&self, phi: f64, field_momenta: &[f64]) -> Result<Multivector> {
        if field_momenta.len() != self.e_fields.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} field momenta, got {}",
                self.e_fields.len(),
                field_momenta.len()
            )));
        }
        let kinetic: f64 = field_momenta.iter().map(|pi| 0.5 * pi * pi).sum();
        let along_ix = -(kinetic + self.potential.eval(phi));
        let mut p = self.i_x.reverse().scale(along_ix);
        for (pi, e) in field_momenta.iter().zip(&self.e_fields) {
            p += &e.reverse().scale(*pi);
        }
        Ok(p)
    }
}

impl Hamiltonian for DwHamiltonian {
    fn motion_dim(&self) -> usize {
        self.frame.motion_dim()
    }

    fn config_dim(&self) -> usize {
        self.frame.dim()
    }

    fn eval(&self, q: &Multivector, p: &Multivector) -> Result<f64> {
        self.check_args(q, p)?;
        Ok(p.scalar_product(&self.i_x)? + self.dw_part(q, p)?)
    }

    fn grad_q_explicit(&self, q: &Multivector, p: &Multivector) -> Result<Multivector> {
        self.check_args(q, p)?;
        Ok(self.frame.e_y()?.scale(self.potential.eval_d(self.frame.phi(q)?)))
    }

    fn grad_p(&self, q: &Multivector, p: &Multivector) -> Result<Multivector> {
        self.check_args(q, p)?;
        Ok(&self.i_x + &self.grad_p_dw(p)?)
    }
}

/// `H = 1/2 (|P|^2 - Lambda^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringHamiltonian {
    tension: f64,
    motion_dim: usize,
    dim: usize,
}

pub fn string_hamiltonian(tension: f64, motion_dim: usize, dim: usize) -> Result<StringHamiltonian> {
    if !(tension > 0.0 && tension.is_finite()) {
        return Err(Error::InvalidArgument(format!("tension must be positive, got {tension}")));
    }
    if !(2..=crate::multivector::MAX_DIM).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    if motion_dim < 1 || motion_dim >= dim {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= D < n, got D = {motion_dim}, n = {dim}"
        )));
    }
    Ok(StringHamiltonian {
        tension,
        motion_dim,
        dim,
    })
}

impl StringHamiltonian {
    pub fn tension(&self) -> f64 {
        self.tension
    }
}

impl Hamiltonian for StringHamiltonian {
    fn motion_dim(&self) -> usize {
        self.motion_dim
    }

    fn config_dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, q: &Multivector, p: &Multivector) -> Result<f64> {
        self.check_args(q, p)?;
        Ok(0.5 * (p.magnitude_squared() - self.tension * self.tension))
    }

    fn grad_q_explicit(&self, q: &Multivector, p: &Multivector) -> Result<Multivector> {
        self.check_args(q, p)?;
        Ok(Multivector::zero(self.dim))
    }

    fn grad_p(&self, q: &Multivector, p: &Multivector) -> Result<Multivector> {
        self.check_args(q, p)?;
        Ok(p.reverse())
    }
}

/// A built-in Hamiltonian chosen at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSpec {
    Mechanics(MechanicsHamiltonian<SeparableH0>),
    Dw(DwHamiltonian),
    String(StringHamiltonian),
}

macro_rules! delegate {
    ($self:ident, $h:ident => $e:expr) => {
        match $self {
            HamiltonianSpec::Mechanics($h) => $e,
            HamiltonianSpec::Dw($h) => $e,
            HamiltonianSpec::String($h) => $e,
        }
    };
}

impl Hamiltonian for HamiltonianSpec {
    fn motion_dim(&self) -> usize {
        delegate!(self, h => h.motion_dim())
    }

    fn config_dim(&self) -> usize {
        delegate!(self, h => h.config_dim())
    }

    fn eval(&self, q: &Multivector, p: &Multivector) -> Result<f64> {
        delegate!(self, h => h.eval(q, p))
    }

    fn grad_q_explicit(&self, q: &Multivector, p: &Multivector) -> Result<Multivector> {
        delegate!(self, h => h.grad_q_explicit(q, p))
    }

    fn grad_p(&self, q: &Multivector, p: &Multivector) -> Result<Multivector> {
        delegate!(self, h => h.grad_p(q, p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianKind {
    Mechanics,
    Dw,
    String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub n: usize,
    #[serde(rename = "D")]
    pub motion_dim: usize,
}

/// JSON block `{type, potential: [c0, ...], lambda, dims: {n, D}}`.
///
/// Mechanics uses `e_1` as the time axis and unit mass unless `mass` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    #[serde(rename = "type")]
    pub kind: HamiltonianKind,
    #[serde(default)]
    pub potential: Potential,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    pub dims: Dims,
}

impl HamiltonianConfig {
    pub fn build(&self) -> Result<HamiltonianSpec> {
        let Dims { n, motion_dim } = self.dims;
        let potential = Potential::new(self.potential.coeffs().to_vec())?;
        match self.kind {
            HamiltonianKind::Mechanics => {
                if motion_dim != 1 {
                    return Err(Error::InvalidArgument("mechanics needs D = 1".into()));
                }
                let h0 = SeparableH0::new(self.mass.unwrap_or(1.0), potential)?;
                Ok(HamiltonianSpec::Mechanics(mechanics_hamiltonian(
                    h0,
                    SplitFrame::mechanics(n, 0)?,
                )?))
            }
            HamiltonianKind::Dw => {
                if n != motion_dim + 1 {
                    return Err(Error::InvalidArgument(format!(
                        "De Donder-Weyl field needs n = D + 1, got n = {n}, D = {motion_dim}"
                    )));
                }
                Ok(HamiltonianSpec::Dw(dw_hamiltonian(potential, SplitFrame::field(motion_dim)?)?))
            }
            HamiltonianKind::String => {
                let lambda = self
                    .lambda
                    .ok_or_else(|| Error::InvalidArgument("string Hamiltonian needs lambda".into()))?;
                Ok(HamiltonianSpec::String(string_hamiltonian(lambda, motion_dim, n)?))
            }
        }
    }
}
