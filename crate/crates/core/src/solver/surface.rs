use crate::chain::SimplexChain;
use crate::error::{Error, Result};
use crate::multivector::Multivector;

/// Relative size below which `|q_u ^ q_v|` counts as degenerate.
const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// Per-node spur magnitudes and the nodes that count towards the maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpurReport {
    values: Vec<f64>,
    interior: Vec<usize>,
}

impl SpurReport {
    pub(crate) fn new(values: Vec<f64>, interior: Vec<usize>) -> Self {
        SpurReport { values, interior }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Largest value over interior nodes.
    pub fn max(&self) -> f64 {
        self.interior.iter().map(|i| self.values[*i]).fold(0.0, f64::max)
    }

    /// Interior node attaining [`SpurReport::max`].
    pub fn argmax(&self) -> Option<usize> {
        self.interior
            .iter()
            .copied()
            .max_by(|a, b| self.values[*a].total_cmp(&self.values[*b]))
    }
}

/// Structured `(u, v)` mesh of points in R^n, node `(i, j)` stored at `i * nv + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    dim: usize,
    nu: usize,
    nv: usize,
    u_range: (f64, f64),
    v_range: (f64, f64),
    points: Vec<Vec<f64>>,
    momenta: Vec<Multivector>,
}

impl SurfaceMesh {
    /// `nu x nv` cells over `u_range x v_range`, nodes placed by `embed(u, v)`.
    pub fn from_fn<E>(nu: usize, nv: usize, u_range: (f64, f64), v_range: (f64, f64), embed: E) -> Result<Self>
    where
        E: Fn(f64, f64) -> Vec<f64>,
    {
        if nu < 2 || nv < 2 {
            return Err(Error::InvalidArgument("surface mesh needs at least 2 cells per direction".into()));
        }
        if !(u_range.1 > u_range.0 && v_range.1 > v_range.0) {
            return Err(Error::InvalidArgument("parameter ranges must be increasing".into()));
        }
        let mut points = Vec::with_capacity((nu + 1) * (nv + 1));
        for i in 0..=nu {
            for j in 0..=nv {
                let u = u_range.0 + (u_range.1 - u_range.0) * i as f64 / nu as f64;
                let v = v_range.0 + (v_range.1 - v_range.0) * j as f64 / nv as f64;
                points.push(embed(u, v));
            }
        }
        Self::from_points(nu, nv, u_range, v_range, points)
    }

    /// Mesh from precomputed nodes, `(nu + 1) * (nv + 1)` of them in the
    /// order of [`SurfaceMesh::from_fn`].
    pub fn from_points(
        nu: usize,
        nv: usize,
        u_range: (f64, f64),
        v_range: (f64, f64),
        points: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if nu < 2 || nv < 2 {
            return Err(Error::InvalidArgument("surface mesh needs at least 2 cells per direction".into()));
        }
        if !(u_range.1 > u_range.0 && v_range.1 > v_range.0) {
            return Err(Error::InvalidArgument("parameter ranges must be increasing".into()));
        }
        if points.len() != (nu + 1) * (nv + 1) {
            return Err(Error::InvalidArgument(format!(
                "expected {} mesh points, got {}",
                (nu + 1) * (nv + 1),
                points.len()
            )));
        }
        let dim = points[0].len();
        if !(2..=crate::multivector::MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidArgument("embedded points differ in dimension".into()));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("mesh point".into()));
        }
        Ok(SurfaceMesh {
            dim,
            nu: nu + 1,
            nv: nv + 1,
            u_range,
            v_range,
            points,
            momenta: Vec::new(),
        })
    }

    /// Attaches one grade-2 momentum per node.
    pub fn with_momenta(mut self, momenta: Vec<Multivector>) -> Result<Self> {
        if momenta.len() != self.points.len() {
            return Err(Error::InvalidArgument("need one momentum per mesh node".into()));
        }
        for p in &momenta {
            if p.dim() != self.dim {
                return Err(Error::DimensionMismatch { left: self.dim, right: p.dim() });
            }
            if !p.is_grade(2) {
                return Err(Error::NotPureGrade { expected: 2 });
            }
        }
        self.momenta = momenta;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Node counts along u and v.
    pub fn shape(&self) -> (usize, usize) {
        (self.nu, self.nv)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn momenta(&self) -> &[Multivector] {
        &self.momenta
    }

    pub fn point(&self, node: usize) -> Multivector {
        Multivector::vector(&self.points[node])
    }

    fn du(&self) -> f64 {
        (self.u_range.1 - self.u_range.0) / (self.nu - 1) as f64
    }

    fn dv(&self) -> f64 {
        (self.v_range.1 - self.v_range.0) / (self.nv - 1) as f64
    }

    pub fn is_interior(&self, node: usize) -> bool {
        let (i, j) = (node / self.nv, node % self.nv);
        i > 0 && i + 1 < self.nu && j > 0 && j + 1 < self.nv
    }

    /// Nodes whose spur uses only central differences: two away from every edge.
    fn is_spur_node(&self, node: usize) -> bool {
        let (i, j) = (node / self.nv, node % self.nv);
        i > 1 && i + 2 < self.nu && j > 1 && j + 2 < self.nv
    }

    /// Second-order derivative of node data along u (`axis` 0) or v (`axis` 1).
    fn derivative<T, F>(&self, values: &[T], node: usize, axis: usize, get: F) -> Multivector
    where
        F: Fn(&T) -> Multivector,
    {
        let (i, j) = (node / self.nv, node % self.nv);
        let (k, count, stride, step) = if axis == 0 {
            (i, self.nu, self.nv, self.du())
        } else {
            (j, self.nv, 1, self.dv())
        };
        let at = |offset: isize| get(&values[(node as isize + offset * stride as isize) as usize]);
        if k == 0 {
            (&(&at(0).scale(-3.0) + &at(1).scale(4.0)) - &at(2)).scale(0.5 / step)
        } else if k + 1 == count {
            (&(&at(0).scale(3.0) - &at(-1).scale(4.0)) + &at(-2)).scale(0.5 / step)
        } else {
            (&at(1) - &at(-1)).scale(0.5 / step)
        }
    }

    /// Tangent vectors `(q_u, q_v)` at a node.
    pub fn tangents(&self, node: usize) -> (Multivector, Multivector) {
        let get = |p: &Vec<f64>| Multivector::vector(p);
        (
            self.derivative(&self.points, node, 0, get),
            self.derivative(&self.points, node, 1, get),
        )
    }

    /// Unit tangent blade `I = q_u ^ q_v / |q_u ^ q_v|`.
    pub fn tangent_blade(&self, node: usize) -> Result<Multivector> {
        let (qu, qv) = self.tangents(node);
        let wedge = qu.outer(&qv)?;
        let size = wedge.magnitude();
        if !(size > DEGENERACY_TOLERANCE * qu.magnitude() * qv.magnitude()) || !size.is_finite() {
            return Err(Error::DegenerateTangent(node));
        }
        Ok(wedge.scale(1.0 / size))
    }

    /// Triangles as node triples, counter-clockwise in `(u, v)`.
    fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::with_capacity(2 * (self.nu - 1) * (self.nv - 1));
        for i in 0..self.nu - 1 {
            for j in 0..self.nv - 1 {
                let n00 = i * self.nv + j;
                let (n10, n01, n11) = (n00 + self.nv, n00 + 1, n00 + self.nv + 1);
                out.push([n00, n10, n11]);
                out.push([n00, n11, n01]);
            }
        }
        out
    }

    /// The mesh as a 2-chain with the triangulation of
    /// [`SimplexChain::triangulated_patch`].
    pub fn chain(&self) -> Result<SimplexChain> {
        let simplices = self
            .triangles()
            .iter()
            .map(|t| t.iter().map(|n| self.points[*n].clone()).collect())
            .collect();
        SimplexChain::new(self.dim, simplices)
    }
}

/// `|(I . d) I|` at each node, the spur of the unit tangent blade: twice the
/// mean curvature vector for a surface in R^3.
///
/// `d` is restricted to tangential directions: with `t1, t2` an orthonormal
/// frame of the tangent plane, `(I . d) I = t1 . ((t2 . d) I) - t2 . ((t1 . d) I)`,
/// each directional derivative assembled from the differences of `I` along u
/// and v. The maximum covers nodes at least two away from the edges, so no
/// one-sided difference enters it.
pub fn spur_residual(mesh: &SurfaceMesh) -> Result<SpurReport> {
    if mesh.nu < 5 || mesh.nv < 5 {
        return Err(Error::InvalidArgument("spur needs at least 4 cells per direction".into()));
    }
    let blades = (0..mesh.len())
        .map(|n| mesh.tangent_blade(n))
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(mesh.len());
    for node in 0..mesh.len() {
        let (qu, qv) = mesh.tangents(node);
        let iu = mesh.derivative(&blades, node, 0, Multivector::clone);
        let iv = mesh.derivative(&blades, node, 1, Multivector::clone);

        let t1 = qu.scale(1.0 / qu.magnitude());
        let t2_raw = &qv - &t1.scale(qv.scalar_product(&t1)?);
        let t2 = t2_raw.scale(1.0 / t2_raw.magnitude());

        // (t . d) I = a I_u + b I_v where t = a q_u + b q_v.
        let guu = qu.scalar_product(&qu)?;
        let guv = qu.scalar_product(&qv)?;
        let gvv = qv.scalar_product(&qv)?;
        let det = guu * gvv - guv * guv;
        let along = |t: &Multivector| -> Result<Multivector> {
            let (tu, tv) = (t.scalar_product(&qu)?, t.scalar_product(&qv)?);
            let a = (gvv * tu - guv * tv) / det;
            let b = (guu * tv - guv * tu) / det;
            Ok(&iu.scale(a) + &iv.scale(b))
        };
        let spur = t1.inner(&along(&t2)?)?.try_sub(&t2.inner(&along(&t1)?)?)?;
        if !spur.is_finite() {
            return Err(Error::DegenerateTangent(node));
        }
        values.push(spur.magnitude());
    }
    let interior = (0..mesh.len()).filter(|n| mesh.is_spur_node(*n)).collect();
    Ok(SpurReport::new(values, interior))
}

/// Directed integral of `P . dG` over the triangulated mesh, `P` on each
/// triangle the mean of its vertex momenta.
pub fn action_value_surface(mesh: &SurfaceMesh) -> Result<f64> {
    if mesh.momenta.is_empty() {
        return Err(Error::Missing("mesh has no momenta".into()));
    }
    let chain = mesh.chain()?;
    let mut total = 0.0;
    for (k, tri) in mesh.triangles().iter().enumerate() {
        let p = (&(&mesh.momenta[tri[0]] + &mesh.momenta[tri[1]]) + &mesh.momenta[tri[2]]).scale(1.0 / 3.0);
        total += p.scalar_product(&chain.volume_element(k)?)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sphere(r: f64, n: usize) -> SurfaceMesh {
        SurfaceMesh::from_fn(n, n, (0.6, 2.4), (0.0, 1.5), |th, ph| {
            vec![r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()]
        })
        .unwrap()
    }

    fn catenoid(n: usize) -> SurfaceMesh {
        SurfaceMesh::from_fn(n, n, (0.0, PI / 2.0), (-0.5, 0.5), |u, v| {
            vec![v.cosh() * u.cos(), v.cosh() * u.sin(), v]
        })
        .unwrap()
    }

    #[test]
    fn plane_has_zero_spur() {
        let mesh = SurfaceMesh::from_fn(6, 5, (0.0, 1.0), (0.0, 2.0), |u, v| {
            vec![u + 0.3 * v, 2.0 * v - u, 0.5 * u, v]
        })
        .unwrap();
        assert!(spur_residual(&mesh).unwrap().max() < 1e-12);
    }

    #[test]
    fn sphere_spur_is_twice_inverse_radius() {
        for r in [1.0, 2.0] {
            let report = spur_residual(&sphere(r, 64)).unwrap();
            for n in report.interior() {
                assert!((report.values()[*n] - 2.0 / r).abs() < 1e-2 / r, "{}", report.values()[*n]);
            }
        }
    }

    #[test]
    fn catenoid_spur_shrinks_quadratically() {
        let coarse = spur_residual(&catenoid(16)).unwrap().max();
        let fine = spur_residual(&catenoid(32)).unwrap().max();
        assert!(coarse < 1e-2);
        assert!((coarse / fine).log2() > 1.9, "{coarse} {fine}");
    }

    #[test]
    fn degenerate_mesh_reports_node() {
        let mesh = SurfaceMesh::from_fn(4, 4, (0.0, 1.0), (0.0, 1.0), |u, _| vec![u, 0.0, 0.0]).unwrap();
        assert!(matches!(spur_residual(&mesh), Err(Error::DegenerateTangent(0))));
    }

    #[test]
    fn flat_patch_action_is_tension_times_area() {
        let tension = 1.5;
        let mesh = SurfaceMesh::from_fn(3, 4, (0.0, 2.0), (0.0, 3.0), |u, v| vec![u, v, 0.0]).unwrap();
        let p = Multivector::blade(3, 0b011, 1.0).reverse().scale(tension);
        let mesh = mesh.with_momenta(vec![p; 20]).unwrap();
        assert!((action_value_surface(&mesh).unwrap() - tension * 6.0).abs() < 1e-12);
        assert!(mesh.chain().unwrap().boundary().unwrap().len() == 2 * (3 + 4));
    }

    #[test]
    fn action_needs_momenta() {
        let mesh = SurfaceMesh::from_fn(2, 2, (0.0, 1.0), (0.0, 1.0), |u, v| vec![u, v]).unwrap();
        assert!(matches!(action_value_surface(&mesh), Err(Error::Missing(_))));
    }
}
