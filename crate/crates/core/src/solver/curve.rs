use crate::chain::SimplexChain;
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::multivector::Multivector;

/// A sampled D = 1 motion: parameters, points, momenta and per-sample
/// diagnostics (`|H|` and an energy-like conserved quantity).
#[derive(Debug, Clone, PartialEq)]
pub struct MotionCurve {
    taus: Vec<f64>,
    points: Vec<Multivector>,
    momenta: Vec<Multivector>,
    h_residual: Vec<f64>,
    energy: Vec<f64>,
}

impl MotionCurve {
    /// Momenta may be empty (a bare path); otherwise one per point.
    pub fn new(taus: Vec<f64>, points: Vec<Multivector>, momenta: Vec<Multivector>) -> Result<Self> {
        if taus.len() != points.len() || (!momenta.is_empty() && momenta.len() != points.len()) {
            return Err(Error::InvalidArgument("curve columns differ in length".into()));
        }
        if taus.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("curve parameter must increase strictly".into()));
        }
        if taus.iter().any(|t| !t.is_finite()) || points.iter().chain(&momenta).any(|m| !m.is_finite()) {
            return Err(Error::NonFinite("curve sample".into()));
        }
        if let Some(first) = points.first() {
            let n = first.dim();
            for m in points.iter().chain(&momenta) {
                if m.dim() != n {
                    return Err(Error::DimensionMismatch { left: n, right: m.dim() });
                }
            }
            if points.iter().any(|q| !q.is_grade(1)) {
                return Err(Error::NotPureGrade { expected: 1 });
            }
        }
        let len = points.len();
        Ok(MotionCurve {
            taus,
            points,
            momenta,
            h_residual: vec![0.0; len],
            energy: vec![0.0; len],
        })
    }

    pub(crate) fn with_diagnostics(mut self, h_residual: Vec<f64>, energy: Vec<f64>) -> Self {
        debug_assert_eq!(h_residual.len(), self.points.len());
        debug_assert_eq!(energy.len(), self.points.len());
        self.h_residual = h_residual;
        self.energy = energy;
        self
    }

    /// Replaces the diagnostic columns, e.g. when reading a stored curve.
    pub fn set_diagnostics(&mut self, h_residual: Vec<f64>, energy: Vec<f64>) -> Result<()> {
        if h_residual.len() != self.len() || energy.len() != self.len() {
            return Err(Error::InvalidArgument("diagnostic columns differ in length".into()));
        }
        self.h_residual = h_residual;
        self.energy = energy;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map(|q| q.dim()).unwrap_or(0)
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn points(&self) -> &[Multivector] {
        &self.points
    }

    pub fn momenta(&self) -> &[Multivector] {
        &self.momenta
    }

    pub fn h_residual(&self) -> &[f64] {
        &self.h_residual
    }

    pub fn energy(&self) -> &[f64] {
        &self.energy
    }

    /// `max - min` of the energy column.
    pub fn energy_drift(&self) -> f64 {
        let max = self.energy.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.energy.iter().cloned().fold(f64::INFINITY, f64::min);
        if self.energy.is_empty() {
            0.0
        } else {
            max - min
        }
    }

    pub fn chain(&self) -> Result<SimplexChain> {
        let pts: Vec<Vec<f64>> = self.points.iter().map(|q| q.vector_part()).collect();
        SimplexChain::polyline(&pts)
    }

    /// CSV header `tau,q_1..q_n,p_1..p_n,H_residual,energy`.
    pub fn csv_header(dim: usize) -> Vec<String> {
        let mut h = vec!["tau".to_string()];
        h.extend((1..=dim).map(|j| format!("q_{j}")));
        h.extend((1..=dim).map(|j| format!("p_{j}")));
        h.push("H_residual".into());
        h.push("energy".into());
        h
    }

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|i| {
                let mut row = vec![self.taus[i]];
                row.extend(self.points[i].vector_part());
                match self.momenta.get(i) {
                    Some(p) => row.extend(p.vector_part()),
                    None => row.extend(std::iter::repeat(0.0).take(self.dim())),
                }
                row.push(self.h_residual[i]);
                row.push(self.energy[i]);
                row
            })
            .collect()
    }

    /// Inverse of [`MotionCurve::csv_rows`].
    pub fn from_csv_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let width = 2 * dim + 3;
        let mut taus = Vec::with_capacity(rows.len());
        let mut points = Vec::with_capacity(rows.len());
        let mut momenta = Vec::with_capacity(rows.len());
        let mut residual = Vec::with_capacity(rows.len());
        let mut energy = Vec::with_capacity(rows.len());
        for (k, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Parse(format!(
                    "row {k} has {} columns, expected {width}",
                    row.len()
                )));
            }
            taus.push(row[0]);
            points.push(Multivector::vector(&row[1..=dim]));
            momenta.push(Multivector::vector(&row[dim + 1..=2 * dim]));
            residual.push(row[2 * dim + 1]);
            energy.push(row[2 * dim + 2]);
        }
        let mut curve = MotionCurve::new(taus, points, momenta)?;
        curve.set_diagnostics(residual, energy)?;
        Ok(curve)
    }
}

/// `max_i |H(q_i, P_i)|`.
pub fn constraint_residual<H: Hamiltonian + ?Sized>(h: &H, motion: &MotionCurve) -> Result<f64> {
    if motion.momenta.is_empty() {
        return Err(Error::Missing("curve has no momenta".into()));
    }
    motion
        .points
        .iter()
        .zip(&motion.momenta)
        .try_fold(0.0f64, |acc, (q, p)| Ok(acc.max(h.eval(q, p)?.abs())))
}

/// Directed integral of `P . dG` along the curve, with `P` on each segment
/// the mean of its endpoint momenta.
pub fn action_value(motion: &MotionCurve) -> Result<f64> {
    if motion.momenta.is_empty() {
        return Err(Error::Missing("curve has no momenta".into()));
    }
    let chain = motion.chain()?;
    let mut total = 0.0;
    for i in 0..chain.len() {
        let p = (&motion.momenta[i] + &motion.momenta[i + 1]).scale(0.5);
        total += p.inner(&chain.volume_element(i)?)?.scalar_part();
    }
    Ok(total)
}

/// Largest sine of the angle between each segment `dG` and the mean of
/// `grad_P H` at its endpoints (D = 1). Zero when the first canonical
/// equation holds exactly with `lambda > 0`; an antiparallel pair counts as 1.
pub fn first_equation_residual<H: Hamiltonian + ?Sized>(h: &H, motion: &MotionCurve) -> Result<f64> {
    if h.motion_dim() != 1 {
        return Err(Error::InvalidArgument("segment check needs D = 1".into()));
    }
    if motion.momenta.is_empty() {
        return Err(Error::Missing("curve has no momenta".into()));
    }
    let mut worst = 0.0f64;
    for i in 0..motion.len().saturating_sub(1) {
        let segment = &motion.points[i + 1] - &motion.points[i];
        let g0 = h.grad_p(&motion.points[i], &motion.momenta[i])?;
        let g1 = h.grad_p(&motion.points[i + 1], &motion.momenta[i + 1])?;
        let g = (&g0 + &g1).scale(0.5);
        let scale = segment.magnitude() * g.magnitude();
        if scale == 0.0 {
            return Err(Error::Singular(format!("zero segment or gradient at sample {i}")));
        }
        let sine = segment.outer(&g)?.magnitude() / scale;
        let deviation = if segment.scalar_product(&g)? < 0.0 { 1.0 } else { sine };
        worst = worst.max(deviation);
    }
    Ok(worst)
}
