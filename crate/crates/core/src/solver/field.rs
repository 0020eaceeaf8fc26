//! Euclidean scalar field on a uniform D-dimensional grid.
//!
//! In the graph parametrization `q = x + phi(x) e_y` the De Donder-Weyl
//! equations reduce to `pi_j = e_j . d_x phi` and `sum_j d_j pi_j = -V'(phi)`,
//! i.e. the elliptic problem `Laplacian(phi) = -V'(phi)`, solved here as a
//! Dirichlet problem by nonlinear Gauss-Seidel relaxation.

use crate::error::{Error, Result};
use crate::hamiltonian::{DwHamiltonian, Hamiltonian, Potential};
use crate::multivector::Multivector;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    shape: Vec<usize>,
    lower: Vec<f64>,
    spacing: Vec<f64>,
    phi: Vec<f64>,
    /// `pi_j = P . E_j` per node, empty until filled.
    momenta: Vec<Vec<f64>>,
    /// `P . I_x` per node, empty until filled.
    ix_momentum: Vec<f64>,
}

impl FieldGrid {
    /// Grid over the box `[lower, upper]` with `cells[a]` cells along axis `a`.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, cells: Vec<usize>) -> Result<Self> {
        let d = cells.len();
        if d == 0 || lower.len() != d || upper.len() != d {
            return Err(Error::InvalidArgument("grid bounds and cells must share one dimension".into()));
        }
        let mut spacing = Vec::with_capacity(d);
        for a in 0..d {
            if cells[a] == 0 {
                return Err(Error::InvalidArgument(format!("axis {a} needs at least one cell")));
            }
            let h = (upper[a] - lower[a]) / cells[a] as f64;
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidArgument(format!("axis {a} has non-positive spacing {h}")));
            }
            spacing.push(h);
        }
        let shape: Vec<usize> = cells.iter().map(|c| c + 1).collect();
        let total = shape.iter().product();
        Ok(FieldGrid {
            shape,
            lower,
            spacing,
            phi: vec![0.0; total],
            momenta: Vec::new(),
            ix_momentum: Vec::new(),
        })
    }

    pub fn motion_dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn momenta(&self) -> &[Vec<f64>] {
        &self.momenta
    }

    pub fn ix_momentum(&self) -> &[f64] {
        &self.ix_momentum
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.shape.len()];
        for a in (0..self.shape.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.shape[a + 1];
        }
        strides
    }

    /// Multi-index of a flat node index (last axis fastest).
    pub fn index(&self, node: usize) -> Vec<usize> {
        let mut rest = node;
        let mut idx = vec![0; self.shape.len()];
        for a in (0..self.shape.len()).rev() {
            idx[a] = rest % self.shape[a];
            rest /= self.shape[a];
        }
        idx
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        self.index(node)
            .iter()
            .enumerate()
            .map(|(a, i)| self.lower[a] + *i as f64 * self.spacing[a])
            .collect()
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.index(node)
            .iter()
            .zip(&self.shape)
            .any(|(i, n)| *i == 0 || *i + 1 == *n)
    }

    /// Nodes at least `margin` nodes away from every face.
    fn is_inner(&self, node: usize, margin: usize) -> bool {
        self.index(node)
            .iter()
            .zip(&self.shape)
            .all(|(i, n)| *i >= margin && *i + margin < *n)
    }

    /// Configuration point `x + phi e_y` of a node.
    pub fn point(&self, node: usize) -> Multivector {
        let mut c = self.coords(node);
        c.push(self.phi[node]);
        Multivector::vector(&c)
    }

    /// Sets every boundary node from `profile(x)`.
    pub fn set_boundary<F: Fn(&[f64]) -> f64>(&mut self, profile: F) {
        for node in 0..self.len() {
            if self.is_boundary(node) {
                self.phi[node] = profile(&self.coords(node));
            }
        }
    }

    /// Sets every node from `f(x)`.
    pub fn fill<F: Fn(&[f64]) -> f64>(&mut self, f: F) {
        for node in 0..self.len() {
            self.phi[node] = f(&self.coords(node));
        }
        self.momenta.clear();
        self.ix_momentum.clear();
    }

    /// Replaces the field values and stored momenta, e.g. when reading data.
    pub fn set_values(&mut self, phi: Vec<f64>, momenta: Vec<Vec<f64>>, ix_momentum: Vec<f64>) -> Result<()> {
        if phi.len() != self.len()
            || (!momenta.is_empty() && momenta.len() != self.len())
            || (!ix_momentum.is_empty() && ix_momentum.len() != self.len())
            || momenta.iter().any(|m| m.len() != self.motion_dim())
        {
            return Err(Error::InvalidArgument("field columns do not match the grid".into()));
        }
        if phi.iter().chain(momenta.iter().flatten()).chain(&ix_momentum).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field value".into()));
        }
        self.phi = phi;
        self.momenta = momenta;
        self.ix_momentum = ix_momentum;
        Ok(())
    }

    /// Second-order derivative of `values` along `axis` at `node`: central
    /// inside, one-sided three-point on the faces.
    fn derivative_of(&self, values: &[f64], node: usize, axis: usize) -> f64 {
        let stride = self.strides()[axis];
        let i = self.index(node)[axis];
        let n = self.shape[axis];
        let h = self.spacing[axis];
        if n < 3 {
            return (values[node + stride * (n - 1 - i)] - values[node - stride * i]) / h;
        }
        if i == 0 {
            (-3.0 * values[node] + 4.0 * values[node + stride] - values[node + 2 * stride]) / (2.0 * h)
        } else if i + 1 == n {
            (3.0 * values[node] - 4.0 * values[node - stride] + values[node - 2 * stride]) / (2.0 * h)
        } else {
            (values[node + stride] - values[node - stride]) / (2.0 * h)
        }
    }

    /// `d_x phi` at a node.
    pub fn gradient(&self, node: usize) -> Vec<f64> {
        (0..self.motion_dim()).map(|a| self.derivative_of(&self.phi, node, a)).collect()
    }

    /// Five-point (2D + 1 in general) Laplacian at an interior node.
    fn laplacian(&self, node: usize, strides: &[usize]) -> f64 {
        strides
            .iter()
            .zip(&self.spacing)
            .map(|(s, h)| (self.phi[node + s] + self.phi[node - s] - 2.0 * self.phi[node]) / (h * h))
            .sum()
    }

    /// `max |Laplacian(phi) + V'(phi)|` over interior nodes.
    pub fn field_equation_residual(&self, potential: &Potential) -> f64 {
        let strides = self.strides();
        (0..self.len())
            .filter(|n| !self.is_boundary(*n))
            .map(|n| (self.laplacian(n, &strides) + potential.eval_d(self.phi[n])).abs())
            .fold(0.0, f64::max)
    }

    /// Fills `pi_j = e_j . d_x phi` and `P . I_x = -(1/2 |pi|^2 + V(phi))`.
    pub fn fill_momenta(&mut self, potential: &Potential) {
        self.momenta = (0..self.len()).map(|n| self.gradient(n)).collect();
        self.ix_momentum = self
            .momenta
            .iter()
            .zip(&self.phi)
            .map(|(pi, phi)| -(0.5 * pi.iter().map(|v| v * v).sum::<f64>() + potential.eval(*phi)))
            .collect();
    }

    /// Momentum multivector stored at a node, if momenta are present.
    pub fn momentum(&self, h: &DwHamiltonian, node: usize) -> Result<Multivector> {
        let pi = self
            .momenta
            .get(node)
            .ok_or_else(|| Error::Missing("grid has no momenta".into()))?;
        let mut p = h.i_x().reverse().scale(
            *self
                .ix_momentum
                .get(node)
                .ok_or_else(|| Error::Missing("grid has no I_x momentum".into()))?,
        );
        for (v, e) in pi.iter().zip(h.e_fields()) {
            p += &e.reverse().scale(*v);
        }
        Ok(p)
    }

    /// CSV header `x_1..x_D,phi,pi_1..pi_D,p_ix`.
    pub fn csv_header(motion_dim: usize) -> Vec<String> {
        let mut h: Vec<String> = (1..=motion_dim).map(|j| format!("x_{j}")).collect();
        h.push("phi".into());
        h.extend((1..=motion_dim).map(|j| format!("pi_{j}")));
        h.push("p_ix".into());
        h
    }

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|n| {
                let mut row = self.coords(n);
                row.push(self.phi[n]);
                match self.momenta.get(n) {
                    Some(pi) => row.extend(pi),
                    None => row.extend(std::iter::repeat(0.0).take(self.motion_dim())),
                }
                row.push(self.ix_momentum.get(n).copied().unwrap_or(0.0));
                row
            })
            .collect()
    }

    /// Loads `csv_rows` output into a grid of matching geometry.
    pub fn load_csv_rows(&mut self, rows: &[Vec<f64>]) -> Result<()> {
        let d = self.motion_dim();
        if rows.len() != self.len() {
            return Err(Error::Parse(format!("expected {} rows, got {}", self.len(), rows.len())));
        }
        let mut phi = Vec::with_capacity(rows.len());
        let mut momenta = Vec::with_capacity(rows.len());
        let mut ix = Vec::with_capacity(rows.len());
        for (n, row) in rows.iter().enumerate() {
            if row.len() != 2 * d + 2 {
                return Err(Error::Parse(format!("row {n} has {} columns", row.len())));
            }
            let expected = self.coords(n);
            if expected.iter().zip(&row[..d]).any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + a.abs())) {
                return Err(Error::Parse(format!("row {n} coordinates do not match the grid")));
            }
            phi.push(row[d]);
            momenta.push(row[d + 1..=2 * d].to_vec());
            ix.push(row[2 * d + 1]);
        }
        self.set_values(phi, momenta, ix)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationOptions {
    /// Stop once the interior residual drops to this value.
    pub tol: f64,
    pub max_iter: usize,
    /// Relaxation factor applied to each Newton update; 1 is plain Gauss-Seidel.
    pub relaxation: f64,
}

impl Default for RelaxationOptions {
    fn default() -> Self {
        RelaxationOptions {
            tol: 1e-10,
            max_iter: 200_000,
            relaxation: 1.0,
        }
    }
}

/// Solves `Laplacian(phi) = -V'(phi)` with the grid's boundary values held
/// fixed, then fills the De Donder-Weyl momenta.
pub fn solve_scalar_field(h: &DwHamiltonian, grid: &FieldGrid, options: RelaxationOptions) -> Result<FieldGrid> {
    if grid.motion_dim() != h.motion_dim() {
        return Err(Error::DimensionMismatch {
            left: h.motion_dim(),
            right: grid.motion_dim(),
        });
    }
    if !(options.tol > 0.0) || !(options.relaxation > 0.0 && options.relaxation < 2.0) {
        return Err(Error::InvalidArgument("need tol > 0 and relaxation in (0, 2)".into()));
    }
    let potential = h.potential();
    let mut out = grid.clone();
    let strides = out.strides();
    let interior: Vec<usize> = (0..out.len()).filter(|n| !out.is_boundary(*n)).collect();
    let diagonal: f64 = out.spacing.iter().map(|s| -2.0 / (s * s)).sum();

    let mut residual = out.field_equation_residual(potential);
    let mut iterations = 0;
    while residual > options.tol {
        if iterations == options.max_iter {
            return Err(Error::NotConverged { iterations, residual });
        }
        for &node in &interior {
            let r = out.laplacian(node, &strides) + potential.eval_d(out.phi[node]);
            let jacobian = diagonal + potential.eval_dd(out.phi[node]);
            if jacobian == 0.0 {
                return Err(Error::Singular(format!("zero Newton derivative at node {node}")));
            }
            out.phi[node] -= options.relaxation * r / jacobian;
        }
        iterations += 1;
        residual = out.field_equation_residual(potential);
        if !residual.is_finite() {
            return Err(Error::NonFiniteState { step: iterations });
        }
    }
    out.fill_momenta(potential);
    Ok(out)
}

/// `max |H(q, P)|` over grid nodes, using the stored momenta.
pub fn field_constraint_residual(h: &DwHamiltonian, grid: &FieldGrid) -> Result<f64> {
    (0..grid.len()).try_fold(0.0f64, |acc, n| {
        Ok(acc.max(h.eval(&grid.point(n), &grid.momentum(h, n)?)?.abs()))
    })
}

/// Residuals of the two De Donder-Weyl equations on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwResiduals {
    /// `max |e_j . d_x phi - reverse(E_j) . d_P H_DW|` over all nodes.
    pub momentum_relation: f64,
    /// `max |sum_j d_j (E_j . P) + e_y . d_q H_DW|` over nodes two away from the faces.
    pub field_equation: f64,
}

pub fn dw_equation_residuals(h: &DwHamiltonian, grid: &FieldGrid) -> Result<DwResiduals> {
    if grid.momenta.is_empty() {
        return Err(Error::Missing("grid has no momenta".into()));
    }
    let d = grid.motion_dim();
    let ey = h.frame().e_y()?;
    let mut momentum_relation = 0.0f64;
    for node in 0..grid.len() {
        let p = grid.momentum(h, node)?;
        let grad = h.grad_p_dw(&p)?;
        for (j, slope) in grid.gradient(node).iter().enumerate() {
            let predicted = h.e_fields()[j].reverse().scalar_product(&grad)?;
            momentum_relation = momentum_relation.max((slope - predicted).abs());
        }
    }
    let mut field_equation = 0.0f64;
    let columns: Vec<Vec<f64>> = (0..d).map(|j| grid.momenta.iter().map(|m| m[j]).collect()).collect();
    for node in (0..grid.len()).filter(|n| grid.is_inner(*n, 2)) {
        let divergence: f64 = (0..d).map(|j| grid.derivative_of(&columns[j], node, j)).sum();
        let q = grid.point(node);
        let source = h
            .grad_q_explicit(&q, &grid.momentum(h, node)?)?
            .scalar_product(&ey)?;
        field_equation = field_equation.max((divergence + source).abs());
    }
    Ok(DwResiduals {
        momentum_relation,
        field_equation,
    })
}

/// Canonical energy-momentum tensor `T_jk` at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMomentumField {
    shape: Vec<usize>,
    lower: Vec<f64>,
    spacing: Vec<f64>,
    /// Row-major `D x D` tensor per node.
    values: Vec<Vec<f64>>,
}

impl EnergyMomentumField {
    pub fn motion_dim(&self) -> usize {
        self.shape.len()
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn component(&self, node: usize, j: usize, k: usize) -> f64 {
        self.values[node][j * self.motion_dim() + k]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    fn grid(&self) -> FieldGrid {
        FieldGrid {
            shape: self.shape.clone(),
            lower: self.lower.clone(),
            spacing: self.spacing.clone(),
            phi: vec![0.0; self.values.len()],
            momenta: Vec::new(),
            ix_momentum: Vec::new(),
        }
    }

    /// Largest `|T_jk - T_kj|`.
    pub fn asymmetry(&self) -> f64 {
        let d = self.motion_dim();
        let mut worst = 0.0f64;
        for t in &self.values {
            for j in 0..d {
                for k in 0..d {
                    worst = worst.max((t[j * d + k] - t[k * d + j]).abs());
                }
            }
        }
        worst
    }

    /// CSV header `x_1..x_D,T_11,T_12,...,T_DD`.
    pub fn csv_header(motion_dim: usize) -> Vec<String> {
        let mut h: Vec<String> = (1..=motion_dim).map(|j| format!("x_{j}")).collect();
        for j in 1..=motion_dim {
            for k in 1..=motion_dim {
                h.push(format!("T_{j}{k}"));
            }
        }
        h
    }

    /// Inverse of [`EnergyMomentumField::csv_rows`] on the geometry of `grid`.
    pub fn from_csv_rows(grid: &FieldGrid, rows: &[Vec<f64>]) -> Result<Self> {
        let d = grid.motion_dim();
        if rows.len() != grid.len() {
            return Err(Error::Parse(format!("expected {} rows, got {}", grid.len(), rows.len())));
        }
        let mut values = Vec::with_capacity(rows.len());
        for (n, row) in rows.iter().enumerate() {
            if row.len() != d + d * d {
                return Err(Error::Parse(format!("row {n} has {} columns", row.len())));
            }
            let expected = grid.coords(n);
            if expected.iter().zip(&row[..d]).any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + a.abs())) {
                return Err(Error::Parse(format!("row {n} coordinates do not match the grid")));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("tensor row {n}")));
            }
            values.push(row[d..].to_vec());
        }
        Ok(EnergyMomentumField {
            shape: grid.shape.clone(),
            lower: grid.lower.clone(),
            spacing: grid.spacing.clone(),
            values,
        })
    }

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        let grid = self.grid();
        self.values
            .iter()
            .enumerate()
            .map(|(n, t)| {
                let mut row = grid.coords(n);
                row.extend(t);
                row
            })
            .collect()
    }
}

/// `T_jk = -delta_jk L + (e_j . d phi)(e_k . d phi)` with
/// `L = 1/2 (d phi)^2 - V(phi)`.
pub fn energy_momentum_tensor(grid: &FieldGrid, potential: &Potential) -> EnergyMomentumField {
    let d = grid.motion_dim();
    let values = (0..grid.len())
        .map(|n| {
            let g = grid.gradient(n);
            let lagrangian = 0.5 * g.iter().map(|v| v * v).sum::<f64>() - potential.eval(grid.phi[n]);
            let mut t = vec![0.0; d * d];
            for j in 0..d {
                for k in 0..d {
                    t[j * d + k] = g[j] * g[k] - if j == k { lagrangian } else { 0.0 };
                }
            }
            t
        })
        .collect();
    EnergyMomentumField {
        shape: grid.shape.clone(),
        lower: grid.lower.clone(),
        spacing: grid.spacing.clone(),
        values,
    }
}

/// `max_j max_node |sum_k d_k T_jk|` by central differences.
///
/// `T` on the faces comes from one-sided gradients, so when every axis has
/// at least 5 nodes the maximum skips the nodes next to the faces as well;
/// otherwise it runs over all interior nodes.
pub fn continuity_residual(t: &EnergyMomentumField) -> Result<f64> {
    if t.shape.iter().any(|n| *n < 3) {
        return Err(Error::InvalidArgument("continuity check needs >= 3 nodes per axis".into()));
    }
    let d = t.motion_dim();
    let grid = t.grid();
    let margin = if t.shape.iter().all(|n| *n >= 5) { 2 } else { 1 };
    let columns: Vec<Vec<f64>> = (0..d * d).map(|c| t.values.iter().map(|v| v[c]).collect()).collect();
    let mut worst = 0.0f64;
    for node in (0..grid.len()).filter(|n| grid.is_inner(*n, margin)) {
        for j in 0..d {
            let div: f64 = (0..d).map(|k| grid.derivative_of(&columns[j * d + k], node, k)).sum();
            worst = worst.max(div.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{dw_hamiltonian, SplitFrame};

    fn dw(potential: Potential) -> DwHamiltonian {
        dw_hamiltonian(potential, SplitFrame::field(2).unwrap()).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = FieldGrid::new(vec![0.0, -1.0], vec![2.0, 1.0], vec![4, 2]).unwrap();
        assert_eq!(g.shape(), &[5, 3]);
        assert_eq!(g.len(), 15);
        assert_eq!(g.coords(7), vec![1.0, 0.0]);
        assert!(!g.is_boundary(7));
        assert!(g.is_boundary(0));
        assert!(FieldGrid::new(vec![0.0], vec![0.0], vec![3]).is_err());
        assert!(FieldGrid::new(vec![1.0], vec![0.0], vec![3]).is_err());
        assert!(FieldGrid::new(vec![0.0, 0.0], vec![1.0], vec![3, 3]).is_err());
    }

    #[test]
    fn harmonic_boundary_data_gives_linear_field() {
        let h = dw(Potential::zero());
        let mut grid = FieldGrid::new(vec![0.0, 0.0], vec![1.0, 2.0], vec![8, 8]).unwrap();
        grid.set_boundary(|x| 3.0 * x[0] - 1.0);
        let solved = solve_scalar_field(&h, &grid, RelaxationOptions::default()).unwrap();
        for n in 0..solved.len() {
            let x = solved.coords(n);
            assert!((solved.phi()[n] - (3.0 * x[0] - 1.0)).abs() < 1e-9);
            assert!((solved.momenta()[n][0] - 3.0).abs() < 1e-8);
            assert!(solved.momenta()[n][1].abs() < 1e-8);
        }
        assert!(field_constraint_residual(&h, &solved).unwrap() < 1e-12);
    }

    #[test]
    fn non_convergence_carries_last_residual() {
        let h = dw(Potential::harmonic(1.0));
        let mut grid = FieldGrid::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![16, 16]).unwrap();
        grid.set_boundary(|x| x[0]);
        let options = RelaxationOptions {
            max_iter: 3,
            ..RelaxationOptions::default()
        };
        match solve_scalar_field(&h, &grid, options) {
            Err(Error::NotConverged { iterations, residual }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn tensor_of_constant_and_linear_fields() {
        let v = Potential::new(vec![0.5, 0.0, 2.0]).unwrap();
        let mut grid = FieldGrid::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![4, 4]).unwrap();
        grid.fill(|_| 0.7);
        let t = energy_momentum_tensor(&grid, &v);
        let expected = v.eval(0.7);
        for n in 0..grid.len() {
            assert!((t.component(n, 0, 0) - expected).abs() < 1e-14);
            assert!((t.component(n, 1, 1) - expected).abs() < 1e-14);
            assert!(t.component(n, 0, 1).abs() < 1e-28);
        }
        assert!(continuity_residual(&t).unwrap() < 1e-12);

        grid.fill(|x| x[0]);
        let t = energy_momentum_tensor(&grid, &Potential::zero());
        for n in 0..grid.len() {
            assert!((t.component(n, 0, 0) - 0.5).abs() < 1e-12);
            assert!((t.component(n, 1, 1) + 0.5).abs() < 1e-12);
            assert!(t.component(n, 0, 1).abs() < 1e-12);
        }
        assert!(t.asymmetry() < 1e-15);
    }

    #[test]
    fn continuity_needs_three_nodes_per_axis() {
        let grid = FieldGrid::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![1, 4]).unwrap();
        let t = energy_momentum_tensor(&grid, &Potential::zero());
        assert!(continuity_residual(&t).is_err());
    }

    #[test]
    fn non_solution_has_visible_continuity_residual() {
        let mut grid = FieldGrid::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![32, 32]).unwrap();
        grid.fill(|x| (3.0 * x[0]).sin() * (2.0 * x[1]).cos() + 0.3 * x[0] * x[1]);
        let t = energy_momentum_tensor(&grid, &Potential::harmonic(1.0));
        assert!(continuity_residual(&t).unwrap() > 0.1);
    }

    #[test]
    fn grid_csv_round_trip() {
        let h = dw(Potential::harmonic(1.0));
        let mut grid = FieldGrid::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![3, 2]).unwrap();
        grid.fill(|x| x[0] * x[1]);
        grid.fill_momenta(h.potential());
        let mut copy = FieldGrid::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![3, 2]).unwrap();
        copy.load_csv_rows(&grid.csv_rows()).unwrap();
        assert_eq!(copy, grid);
        assert!(copy.load_csv_rows(&grid.csv_rows()[1..]).is_err());
    }
}
