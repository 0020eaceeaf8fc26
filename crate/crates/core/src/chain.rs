//! Oriented simplicial chains in R^n and directed integrals over them.
//!
//! A D-simplex `(v_0, ..., v_D)` carries the oriented volume element
//! `dG = s (a_1 ^ ... ^ a_D) / D!` with edge vectors `a_k = v_k - v_0` and
//! orientation `s = +-1`. Directed integrals use the one-point centroid rule.
//!
//! Boundary orientation: face `i` (vertex `v_i` dropped) enters with sign
//! `s (-1)^(i + D - 1)`. With that choice
//! `int_{boundary} L(dS; q) = int_chain L(dG . d; q)` holds with the inner
//! product taken as `dG . e_j`; for D = 1 it is the usual
//! `F(end) - F(start)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calculus::{directional_derivative, StepSize};
use crate::error::{Error, Result};
use crate::multivector::Multivector;

/// Simplices whose volume element is below this multiple of
/// `(longest edge)^D` are treated as degenerate.
const DEGENERACY_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChainRecord", into = "ChainRecord")]
pub struct SimplexChain {
    dim: usize,
    simplex_dim: usize,
    simplices: Vec<Vec<Vec<f64>>>,
    orientations: Vec<f64>,
}

/// JSON form: `{dim, simplices: [[vertex arrays]]}`, optionally with
/// `orientations` (default all +1) and `simplex_dim` (needed only when empty).
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ChainRecord {
    dim: usize,
    simplices: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientations: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    simplex_dim: Option<usize>,
}

impl TryFrom<ChainRecord> for SimplexChain {
    type Error = Error;

    fn try_from(rec: ChainRecord) -> Result<Self> {
        let simplex_dim = match (rec.simplices.first(), rec.simplex_dim) {
            (Some(s), _) => s.len().checked_sub(1).ok_or_else(|| {
                Error::InvalidArgument("simplex without vertices".into())
            })?,
            (None, Some(d)) => d,
            (None, None) => 0,
        };
        let n = rec.simplices.len();
        let orientations = rec.orientations.unwrap_or_else(|| vec![1.0; n]);
        SimplexChain::with_orientations(rec.dim, simplex_dim, rec.simplices, orientations)
    }
}

impl From<SimplexChain> for ChainRecord {
    fn from(chain: SimplexChain) -> Self {
        let all_positive = chain.orientations.iter().all(|s| *s == 1.0);
        ChainRecord {
            dim: chain.dim,
            orientations: (!all_positive).then_some(chain.orientations),
            simplex_dim: chain.simplices.is_empty().then_some(chain.simplex_dim),
            simplices: chain.simplices,
        }
    }
}

impl SimplexChain {
    /// Positively oriented chain; every simplex must have the same number of vertices.
    pub fn new(dim: usize, simplices: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let simplex_dim = simplices
            .first()
            .map(|s| s.len().saturating_sub(1))
            .unwrap_or(0);
        let n = simplices.len();
        Self::with_orientations(dim, simplex_dim, simplices, vec![1.0; n])
    }

    pub fn with_orientations(
        dim: usize,
        simplex_dim: usize,
        simplices: Vec<Vec<Vec<f64>>>,
        orientations: Vec<f64>,
    ) -> Result<Self> {
        if orientations.len() != simplices.len() {
            return Err(Error::InvalidArgument(
                "one orientation per simplex required".into(),
            ));
        }
        if orientations.iter().any(|s| *s != 1.0 && *s != -1.0) {
            return Err(Error::InvalidArgument("orientations must be +1 or -1".into()));
        }
        if simplex_dim > dim {
            return Err(Error::InvalidArgument(format!(
                "{simplex_dim}-simplices do not fit in R^{dim}"
            )));
        }
        for simplex in &simplices {
            if simplex.len() != simplex_dim + 1 {
                return Err(Error::InvalidArgument(
                    "all simplices need the same number of vertices".into(),
                ));
            }
            for v in simplex {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch { left: dim, right: v.len() });
                }
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(Error::NonFinite("simplex vertex".into()));
                }
            }
        }
        let chain = SimplexChain {
            dim,
            simplex_dim,
            simplices,
            orientations,
        };
        for i in 0..chain.len() {
            chain.volume_element(i)?;
        }
        Ok(chain)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// D, the dimension of each simplex.
    pub fn simplex_dim(&self) -> usize {
        self.simplex_dim
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Vec<Vec<f64>>] {
        &self.simplices
    }

    pub fn orientations(&self) -> &[f64] {
        &self.orientations
    }

    /// Oriented volume element of simplex `i`.
    pub fn volume_element(&self, i: usize) -> Result<Multivector> {
        let simplex = &self.simplices[i];
        let base = &simplex[0];
        let mut longest = 0.0f64;
        let edges: Vec<Multivector> = simplex[1..]
            .iter()
            .map(|v| {
                let e: Vec<f64> = v.iter().zip(base).map(|(a, b)| a - b).collect();
                longest = longest.max(e.iter().map(|c| c * c).sum::<f64>().sqrt());
                Multivector::vector(&e)
            })
            .collect();
        let factorial: f64 = (1..=self.simplex_dim).map(|k| k as f64).product();
        let element = Multivector::wedge_all(self.dim, &edges)?.scale(self.orientations[i] / factorial);
        if self.simplex_dim > 0
            && element.magnitude() <= DEGENERACY_TOLERANCE * longest.powi(self.simplex_dim as i32)
        {
            return Err(Error::DegenerateSimplex(i));
        }
        Ok(element)
    }

    pub fn centroid(&self, i: usize) -> Multivector {
        let simplex = &self.simplices[i];
        let k = simplex.len() as f64;
        let c: Vec<f64> = (0..self.dim)
            .map(|j| simplex.iter().map(|v| v[j]).sum::<f64>() / k)
            .collect();
        Multivector::vector(&c)
    }

    /// Sum of `L(dG_i; q_i)` over simplices, `q_i` the centroid.
    pub fn directed_integral<L>(&self, integrand: L) -> Result<Multivector>
    where
        L: Fn(&Multivector, &Multivector) -> Multivector,
    {
        let mut total = Multivector::zero(self.dim);
        for i in 0..self.len() {
            let term = integrand(&self.volume_element(i)?, &self.centroid(i));
            if !term.is_finite() {
                return Err(Error::NonFinite(format!("integrand on simplex {i}")));
            }
            total = total.try_add(&term)?;
        }
        Ok(total)
    }

    /// `int L(dG . d; q)`: the integrand differentiated in its point argument
    /// along `dG . e_j`, i.e. `sum_j (e_j . d_q) L(dG . e_j; q)`, by central
    /// differences at each centroid.
    pub fn derivative_integral<L>(&self, integrand: L, h: StepSize) -> Result<Multivector>
    where
        L: Fn(&Multivector, &Multivector) -> Multivector,
    {
        let mut total = Multivector::zero(self.dim);
        for i in 0..self.len() {
            let element = self.volume_element(i)?;
            let centroid = self.centroid(i);
            for j in 0..self.dim {
                let ej = Multivector::basis_vector(self.dim, j);
                let reduced = element.inner(&ej)?;
                if reduced.is_zero() {
                    continue;
                }
                let d = directional_derivative(|q| integrand(&reduced, q), &centroid, &ej, h)?;
                total = total.try_add(&d)?;
            }
        }
        Ok(total)
    }

    /// Oriented boundary with shared faces cancelled.
    ///
    /// Vertices are identified by exact coordinate equality. A face that
    /// survives with multiplicity other than +-1 means neighbouring simplices
    /// disagree on orientation.
    pub fn boundary(&self) -> Result<SimplexChain> {
        if self.simplex_dim == 0 {
            return SimplexChain::with_orientations(self.dim, 0, Vec::new(), Vec::new());
        }
        let mut ids: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        let mut points: Vec<Vec<f64>> = Vec::new();
        let mut faces: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        let dim_sign: i64 = if self.simplex_dim % 2 == 1 { 1 } else { -1 };
        for (simplex, orientation) in self.simplices.iter().zip(&self.orientations) {
            let vertex_ids: Vec<usize> = simplex
                .iter()
                .map(|v| {
                    let key: Vec<u64> = v.iter().map(|c| (c + 0.0).to_bits()).collect();
                    let next = points.len();
                    *ids.entry(key).or_insert_with(|| {
                        points.push(v.clone());
                        next
                    })
                })
                .collect();
            for drop in 0..vertex_ids.len() {
                let mut face: Vec<usize> = vertex_ids
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != drop)
                    .map(|(_, id)| *id)
                    .collect();
                let parity = sort_parity(&mut face);
                let sign = if drop % 2 == 0 { 1 } else { -1 } * dim_sign * (*orientation as i64) * parity;
                *faces.entry(face).or_insert(0) += sign;
            }
        }
        let mut simplices = Vec::new();
        let mut orientations = Vec::new();
        for (face, multiplicity) in faces {
            match multiplicity {
                0 => {}
                1 | -1 => {
                    simplices.push(face.iter().map(|id| points[*id].clone()).collect());
                    orientations.push(multiplicity as f64);
                }
                m => {
                    return Err(Error::InconsistentOrientation(format!(
                        "face shared with multiplicity {m}"
                    )))
                }
            }
        }
        SimplexChain::with_orientations(self.dim, self.simplex_dim - 1, simplices, orientations)
    }

    /// Polyline through `points`, one 1-simplex per consecutive pair.
    pub fn polyline(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).unwrap_or(0);
        let simplices = points.windows(2).map(|w| w.to_vec()).collect();
        Self::new(dim, simplices)
    }

    /// Rectangle `[u0,u1] x [v0,v1]` split into `nu x nv` cells of two
    /// triangles each, counter-clockwise in (u, v), mapped through `embed`.
    pub fn triangulated_patch<E>(
        nu: usize,
        nv: usize,
        u_range: (f64, f64),
        v_range: (f64, f64),
        embed: E,
    ) -> Result<Self>
    where
        E: Fn(f64, f64) -> Vec<f64>,
    {
        if nu == 0 || nv == 0 {
            return Err(Error::InvalidArgument("patch needs at least one cell".into()));
        }
        let u = |i: usize| u_range.0 + (u_range.1 - u_range.0) * i as f64 / nu as f64;
        let v = |j: usize| v_range.0 + (v_range.1 - v_range.0) * j as f64 / nv as f64;
        let nodes: Vec<Vec<Vec<f64>>> = (0..=nu)
            .map(|i| (0..=nv).map(|j| embed(u(i), v(j))).collect())
            .collect();
        let dim = nodes[0][0].len();
        let mut simplices = Vec::with_capacity(2 * nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                let (p00, p10) = (&nodes[i][j], &nodes[i + 1][j]);
                let (p01, p11) = (&nodes[i][j + 1], &nodes[i + 1][j + 1]);
                simplices.push(vec![p00.clone(), p10.clone(), p11.clone()]);
                simplices.push(vec![p00.clone(), p11.clone(), p01.clone()]);
            }
        }
        Self::new(dim, simplices)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("chain serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Sorts in place and returns the parity of the permutation applied.
fn sort_parity(items: &mut [usize]) -> i64 {
    let mut parity = 1;
    for i in 1..items.len() {
        let mut k = i;
        while k > 0 && items[k - 1] > items[k] {
            items.swap(k - 1, k);
            parity = -parity;
            k -= 1;
        }
    }
    parity
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(n: usize) -> SimplexChain {
        SimplexChain::triangulated_patch(n, n, (0.0, 1.0), (0.0, 1.0), |u, v| vec![u, v]).unwrap()
    }

    #[test]
    fn flat_square_has_unit_oriented_area() {
        for n in [1, 3, 8] {
            let area = unit_square(n).directed_integral(|dg, _| dg.clone()).unwrap();
            let e12 = Multivector::blade(2, 0b11, 1.0);
            assert!(area.max_abs_diff(&e12) < 1e-14);
        }
    }

    #[test]
    fn closed_boundary_integrates_to_zero() {
        let boundary = unit_square(4).boundary().unwrap();
        assert_eq!(boundary.len(), 16);
        let total = boundary.directed_integral(|ds, _| ds.clone()).unwrap();
        assert!(total.magnitude() < 1e-15);
    }

    #[test]
    fn single_triangle_boundary() {
        let tri = SimplexChain::new(
            2,
            vec![vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]],
        )
        .unwrap();
        let b = tri.boundary().unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.simplex_dim(), 1);
    }

    #[test]
    fn two_triangle_square_drops_diagonal() {
        let b = unit_square(1).boundary().unwrap();
        assert_eq!(b.len(), 4);
        for s in b.simplices() {
            let (p, q) = (&s[0], &s[1]);
            let diagonal = (p[0] - q[0]).abs() > 0.5 && (p[1] - q[1]).abs() > 0.5;
            assert!(!diagonal);
        }
    }

    #[test]
    fn boundary_of_boundary_is_empty() {
        let bb = unit_square(5).boundary().unwrap().boundary().unwrap();
        assert!(bb.is_empty());
        let line = SimplexChain::polyline(&[vec![0.0, 0.0], vec![1.0, 0.5], vec![2.0, 2.0]]).unwrap();
        let ends = line.boundary().unwrap();
        assert_eq!(ends.len(), 2);
        assert!(ends.boundary().unwrap().is_empty());
    }

    #[test]
    fn segment_boundary_is_end_minus_start() {
        let line = SimplexChain::polyline(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 1.0]]).unwrap();
        let ends = line.boundary().unwrap();
        let f = |q: &Multivector| q.magnitude_squared();
        let value = ends
            .directed_integral(|ds, q| ds.scale(f(q)))
            .unwrap()
            .scalar_part();
        assert!((value - 10.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_simplex_is_rejected() {
        let r = SimplexChain::new(
            2,
            vec![vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]],
        );
        assert_eq!(r, Err(Error::DegenerateSimplex(0)));
    }

    #[test]
    fn inconsistent_orientation_is_rejected() {
        let a = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        // same edge (0,0)-(1,1) traversed the same way by both triangles
        let b = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let b_flipped = vec![b[1].clone(), b[0].clone(), b[2].clone()];
        let ok = SimplexChain::new(2, vec![a.clone(), b]).unwrap();
        assert_eq!(ok.boundary().unwrap().len(), 4);
        let bad = SimplexChain::new(2, vec![a, b_flipped]).unwrap();
        assert!(matches!(bad.boundary(), Err(Error::InconsistentOrientation(_))));
    }

    #[test]
    fn json_round_trip() {
        let chain = unit_square(2).boundary().unwrap();
        let text = chain.to_json();
        assert_eq!(SimplexChain::from_json(&text).unwrap(), chain);
        let raw = r#"{"dim": 2, "simplices": [[[0,0],[1,0],[0,1]]]}"#;
        let parsed = SimplexChain::from_json(raw).unwrap();
        assert_eq!(parsed.simplex_dim(), 2);
        assert!(SimplexChain::from_json(r#"{"dim": 2, "simplices": [[[0,0],[1,0,0]]]}"#).is_err());
    }
}
