//! Dense multivectors of the Euclidean geometric algebra G(R^n), 2 <= n <= 8.
//!
//! Coefficient index `b` is a bitmask over the basis vectors: bit `j` set
//! means `e_{j+1}` is a factor, factors taken in ascending order. So index
//! `0b101` in n = 3 is the blade `e13 = e1 e3`, and the grade of index `b`
//! is `b.count_ones()`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

/// Relative tolerance used to decide whether `reverse(A) A` is a scalar.
pub const BLADE_TOLERANCE: f64 = 1e-10;

/// Grade of a basis blade index.
#[inline]
pub fn grade_of(blade: usize) -> usize {
    blade.count_ones() as usize
}

/// Sign of the product `e_a e_b` of two basis blades (Euclidean metric).
///
/// Counts the transpositions needed to bring the concatenated factor list
/// into ascending order: for every factor of `a`, the number of factors of
/// `b` with a strictly smaller index.
#[inline]
pub fn basis_product_sign(a: usize, b: usize) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign picked up by a grade-r blade under reversion, `(-1)^{r(r-1)/2}`.
#[inline]
pub fn reversion_sign(grade: usize) -> f64 {
    if (grade * grade.saturating_sub(1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A grade index checked against an algebra dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grade(usize);

impl Grade {
    pub fn new(r: usize, dim: usize) -> Result<Self> {
        if r > dim {
            return Err(Error::GradeOutOfRange { grade: r, dim });
        }
        Ok(Grade(r))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    dim: usize,
    coeffs: Vec<f64>,
}

impl Multivector {
    /// The zero multivector. Panics if `dim` is outside `2..=8`; use
    /// [`Multivector::from_coeffs`] for checked construction.
    pub fn zero(dim: usize) -> Self {
        check_dim(dim).expect("algebra dimension");
        Multivector {
            dim,
            coeffs: vec![0.0; 1 << dim],
        }
    }

    pub fn from_coeffs(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if coeffs.len() != 1 << dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients for dimension {dim}, got {}",
                1 << dim,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("multivector coefficient".into()));
        }
        Ok(Multivector { dim, coeffs })
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        let mut m = Self::zero(dim);
        m.coeffs[0] = value;
        m
    }

    /// Single basis blade `coef * e_mask`.
    pub fn blade(dim: usize, mask: usize, coef: f64) -> Self {
        let mut m = Self::zero(dim);
        assert!(mask < m.coeffs.len(), "blade index {mask} out of range");
        m.coeffs[mask] = coef;
        m
    }

    /// Unit basis vector `e_{axis+1}` (zero-based axis).
    pub fn basis_vector(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        Self::blade(dim, 1 << axis, 1.0)
    }

    /// Grade-1 multivector from Cartesian components; `dim = components.len()`.
    pub fn vector(components: &[f64]) -> Self {
        let mut m = Self::zero(components.len());
        for (j, c) in components.iter().enumerate() {
            m.coeffs[1 << j] = *c;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    pub fn set_coeff(&mut self, mask: usize, value: f64) {
        self.coeffs[mask] = value;
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// Grade-1 components `[a_1, ..., a_n]`.
    pub fn vector_part(&self) -> Vec<f64> {
        (0..self.dim).map(|j| self.coeffs[1 << j]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        } else {
            Ok(())
        }
    }

    fn bilinear(&self, other: &Self, keep: impl Fn(usize, usize) -> bool) -> Result<Self> {
        self.same_dim(other)?;
        let mut out = vec![0.0; self.coeffs.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0.0 || !keep(i, j) {
                    continue;
                }
                out[i ^ j] += basis_product_sign(i, j) * a * b;
            }
        }
        Ok(Multivector {
            dim: self.dim,
            coeffs: out,
        })
    }

    pub fn geometric_product(&self, other: &Self) -> Result<Self> {
        self.bilinear(other, |_, _| true)
    }

    /// Inner product, extended bilinearly over the grade decomposition.
    ///
    /// For each pair of basis blades of grades r and s, contributes the
    /// grade-|r-s| part of their product, and nothing when r or s is zero.
    pub fn inner(&self, other: &Self) -> Result<Self> {
        self.bilinear(other, |i, j| {
            let (r, s) = (grade_of(i), grade_of(j));
            r > 0 && s > 0 && grade_of(i ^ j) == r.abs_diff(s)
        })
    }

    pub fn outer(&self, other: &Self) -> Result<Self> {
        self.bilinear(other, |i, j| i & j == 0)
    }

    /// Scalar part of the geometric product, `<A B>_0`.
    pub fn scalar_product(&self, other: &Self) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(i, (a, b))| basis_product_sign(i, i) * a * b)
            .sum())
    }

    pub fn grade_project(&self, grade: usize) -> Result<Self> {
        let g = Grade::new(grade, self.dim)?;
        Ok(self.project(g))
    }

    pub fn project(&self, grade: Grade) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if grade_of(i) == grade.get() { *c } else { 0.0 })
            .collect();
        Multivector {
            dim: self.dim,
            coeffs,
        }
    }

    pub fn reverse(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| reversion_sign(grade_of(i)) * c)
            .collect();
        Multivector {
            dim: self.dim,
            coeffs,
        }
    }

    /// `|A|^2 = <reverse(A) A>_0`, which in an orthonormal blade basis is the
    /// sum of squared coefficients.
    pub fn magnitude_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude_squared().sqrt()
    }

    /// Grades carrying at least one nonzero coefficient, ascending.
    pub fn grades(&self) -> Vec<usize> {
        let mut present = [false; MAX_DIM + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != 0.0 {
                present[grade_of(i)] = true;
            }
        }
        (0..=self.dim).filter(|r| present[*r]).collect()
    }

    /// `Some(r)` when every nonzero coefficient has grade r. Zero has no grade.
    pub fn pure_grade(&self) -> Option<usize> {
        match self.grades().as_slice() {
            [r] => Some(*r),
            _ => None,
        }
    }

    pub fn is_grade(&self, r: usize) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| *c == 0.0 || grade_of(i) == r)
    }

    /// Inverse of a nonzero pure-grade blade, `reverse(A) / |A|^2`.
    pub fn blade_inverse(&self) -> Result<Self> {
        if self.pure_grade().is_none() {
            return Err(Error::NotInvertibleBlade);
        }
        let norm_sq = self.magnitude_squared();
        if norm_sq == 0.0 || !norm_sq.is_finite() {
            return Err(Error::NotInvertibleBlade);
        }
        let rev = self.reverse();
        let square = rev.geometric_product(self)?;
        let mut non_scalar = square;
        non_scalar.coeffs[0] = 0.0;
        if non_scalar.magnitude() > BLADE_TOLERANCE * norm_sq {
            return Err(Error::NotInvertibleBlade);
        }
        Ok(rev.scale(1.0 / norm_sq))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Multivector {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Multivector {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Outer product of a list of vectors; the empty list gives the scalar 1.
    pub fn wedge_all(dim: usize, vectors: &[Multivector]) -> Result<Self> {
        vectors
            .iter()
            .try_fold(Self::scalar(dim, 1.0), |acc, v| acc.outer(v))
    }

    /// `inner(reverse(a_1 ^ ... ^ a_r), b_1 ^ ... ^ b_r)`.
    ///
    /// For r = 0 the inner product rule would give zero; the scalar product
    /// is used instead so the empty Gram determinant is 1.
    pub fn gram_det(a: &[Multivector], b: &[Multivector]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::InvalidArgument(format!(
                "gram_det needs equal list lengths, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let Some(first) = a.first().or(b.first()) else {
            return Ok(1.0);
        };
        let dim = first.dim;
        for v in a.iter().chain(b) {
            first.same_dim(v)?;
            if !v.is_grade(1) {
                return Err(Error::NotPureGrade { expected: 1 });
            }
        }
        let lhs = Self::wedge_all(dim, a)?.reverse();
        let rhs = Self::wedge_all(dim, b)?;
        Ok(lhs.inner(&rhs)?.scalar_part())
    }
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        self.try_add(rhs).expect("multivector dimensions differ")
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(self, rhs: Multivector) -> Multivector {
        &self + &rhs
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        assert_eq!(self.dim, rhs.dim, "multivector dimensions differ");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        self.try_sub(rhs).expect("multivector dimensions differ")
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Multivector) -> Multivector {
        &self - &rhs
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

/// Geometric product. Panics on dimension mismatch; see
/// [`Multivector::geometric_product`] for the checked form.
impl Mul for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &Multivector) -> Multivector {
        self.geometric_product(rhs)
            .expect("multivector dimensions differ")
    }
}

fn blade_label(mask: usize) -> String {
    let digits: String = (0..MAX_DIM)
        .filter(|j| mask & (1 << j) != 0)
        .map(|j| char::from(b'1' + j as u8))
        .collect();
    format!("e{digits}")
}

/// Terms as `coef*e{indices}` joined by ` + ` / ` - `, scalar bare, zero as `0`.
/// Coefficients use the shortest representation that reparses exactly.
impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut order: Vec<usize> = (0..self.coeffs.len()).collect();
        order.sort_by_key(|i| (grade_of(*i), *i));
        for i in order {
            let c = self.coeffs[i];
            if c == 0.0 {
                continue;
            }
            let magnitude = if first {
                c
            } else {
                write!(f, "{}", if c < 0.0 { " - " } else { " + " })?;
                c.abs()
            };
            first = false;
            if i == 0 {
                write!(f, "{magnitude}")?;
            } else {
                write!(f, "{magnitude}*{}", blade_label(i))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn parse_term(term: &str, dim: usize) -> Result<(usize, f64)> {
    let bad = || Error::Parse(format!("malformed term `{term}`"));
    let (coef, label) = match term.split_once('*') {
        Some((c, l)) => (c, Some(l)),
        None => (term, None),
    };
    let value: f64 = coef.parse().map_err(|_| bad())?;
    let Some(label) = label else {
        return Ok((0, value));
    };
    let digits = label.strip_prefix('e').ok_or_else(bad)?;
    if digits.is_empty() {
        return Err(bad());
    }
    let mut mask = 0usize;
    let mut last = 0u32;
    for ch in digits.chars() {
        let idx = ch.to_digit(10).ok_or_else(bad)?;
        if idx == 0 || idx as usize > dim || idx <= last {
            return Err(Error::Parse(format!(
                "basis indices in `{term}` must be ascending within 1..={dim}"
            )));
        }
        last = idx;
        mask |= 1 << (idx - 1);
    }
    Ok((mask, value))
}

/// Parses the textual form produced by `Display`.
pub fn parse_multivector(text: &str, dim: usize) -> Result<Multivector> {
    check_dim(dim)?;
    let mut out = Multivector::zero(dim);
    let mut tokens = text.split_whitespace();
    let mut sign = 1.0;
    let mut expect_term = true;
    let mut seen = false;
    for token in tokens.by_ref() {
        if expect_term {
            let (mask, value) = parse_term(token, dim)?;
            out.coeffs[mask] += sign * value;
            seen = true;
            expect_term = false;
        } else {
            sign = match token {
                "+" => 1.0,
                "-" => -1.0,
                other => return Err(Error::Parse(format!("expected `+` or `-`, got `{other}`"))),
            };
            expect_term = true;
        }
    }
    if !seen || expect_term {
        return Err(Error::Parse(format!("incomplete multivector `{text}`")));
    }
    if !out.is_finite() {
        return Err(Error::NonFinite("parsed coefficient".into()));
    }
    Ok(out)
}
