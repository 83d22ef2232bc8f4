//! Dense complex linear algebra for the fixed dimensions 2, 4, and 8.
//!
//! Dimension 4 is the two-qubit space with index convention
//! `index = 2*(a bit) + (b bit)`, so the a qubit label is to the left.
//! Dimension 8 adds a coin qubit as the most significant index.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const SUPPORTED_DIMS: [usize; 3] = [2, 4, 8];

fn check_dim(dim: usize) -> Result<()> {
    if SUPPORTED_DIMS.contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDim(dim))
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Complex column vector of dimension 2, 4, or 8.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec {
    data: Vec<C64>,
}

impl CVec {
    pub fn new(data: Vec<C64>) -> Result<Self> {
        check_dim(data.len())?;
        Ok(Self { data })
    }

    pub fn zeros(dim: usize) -> Self {
        check_dim(dim).expect("supported dim");
        Self {
            data: vec![C64::new(0.0, 0.0); dim],
        }
    }

    /// Standard basis vector |j> of the given dimension.
    pub fn basis(dim: usize, j: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[j] = c(1.0, 0.0);
        v
    }

    pub fn from_reals(entries: &[f64]) -> Self {
        Self::new(entries.iter().map(|&x| c(x, 0.0)).collect()).expect("supported dim")
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize) -> C64 {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, value: C64) {
        self.data[i] = value;
    }

    /// Inner product <self|other> (conjugate-linear in self).
    pub fn dot(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-14 {
            return Err(Error::NotNormalized(n));
        }
        Ok(self.scale(c(1.0 / n, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Orthogonal complement of a unit 2-vector, `(-conj(v1), conj(v0))`.
    pub fn orthogonal_2(&self) -> Self {
        assert_eq!(self.dim(), 2);
        Self {
            data: vec![-self.data[1].conj(), self.data[0].conj()],
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &CVec {
    type Output = CVec;
    fn add(self, rhs: &CVec) -> CVec {
        assert_eq!(self.dim(), rhs.dim());
        CVec {
            data: self.data.iter().zip(&rhs.data).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &CVec {
    type Output = CVec;
    fn sub(self, rhs: &CVec) -> CVec {
        assert_eq!(self.dim(), rhs.dim());
        CVec {
            data: self.data.iter().zip(&rhs.data).map(|(x, y)| x - y).collect(),
        }
    }
}

/// Dense square complex operator of dimension 2, 4, or 8, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct COp {
    dim: usize,
    data: Vec<C64>,
}

impl COp {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimMismatch(format!(
                "expected {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        check_dim(dim).expect("supported dim");
        Self {
            dim,
            data: vec![c(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, c(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim);
            data.extend_from_slice(row);
        }
        Self::new(dim, data).expect("supported dim")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        assert_eq!(self.dim, v.dim());
        let mut out = CVec::zeros(self.dim);
        for i in 0..self.dim {
            let mut acc = c(0.0, 0.0);
            for j in 0..self.dim {
                acc += self.get(i, j) * v.get(j);
            }
            out.set(i, acc);
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = &self.adjoint() * self;
        prod.max_abs_diff(&Self::identity(self.dim)) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Validity check for a qubit density matrix: Hermitian, trace one,
    /// positive semidefinite. Exact closed form, dimension 2 only.
    pub fn is_density_2(&self, tol: f64) -> bool {
        if self.dim != 2 || !self.is_hermitian(tol) {
            return false;
        }
        if (self.trace() - c(1.0, 0.0)).norm() > tol {
            return false;
        }
        let det = self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0);
        det.re >= -tol && self.get(0, 0).re >= -tol && self.get(1, 1).re >= -tol
    }

    /// Outer product |v><w|.
    pub fn outer(v: &CVec, w: &CVec) -> Self {
        assert_eq!(v.dim(), w.dim());
        let dim = v.dim();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, v.get(i) * w.get(j).conj());
            }
        }
        m
    }
}

impl Add for &COp {
    type Output = COp;
    fn add(self, rhs: &COp) -> COp {
        assert_eq!(self.dim, rhs.dim);
        COp {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &COp {
    type Output = COp;
    fn sub(self, rhs: &COp) -> COp {
        assert_eq!(self.dim, rhs.dim);
        COp {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(x, y)| x - y).collect(),
        }
    }
}

impl Mul for &COp {
    type Output = COp;
    fn mul(self, rhs: &COp) -> COp {
        assert_eq!(self.dim, rhs.dim);
        let dim = self.dim;
        let mut out = COp::zeros(dim);
        for i in 0..dim {
            for k in 0..dim {
                let lik = self.get(i, k);
                if lik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    let v = out.get(i, j) + lik * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

/// Kronecker product of vectors; the left factor takes the most
/// significant index slot.
pub fn tensor_vec(a: &CVec, b: &CVec) -> Result<CVec> {
    let dim = a.dim() * b.dim();
    check_dim(dim)?;
    let mut out = CVec::zeros(dim);
    for i in 0..a.dim() {
        for j in 0..b.dim() {
            out.set(i * b.dim() + j, a.get(i) * b.get(j));
        }
    }
    Ok(out)
}

/// Kronecker product of operators, same ordering as [`tensor_vec`].
pub fn tensor_op(a: &COp, b: &COp) -> Result<COp> {
    let dim = a.dim() * b.dim();
    check_dim(dim)?;
    let (da, db) = (a.dim(), b.dim());
    let mut out = COp::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, aij * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Which tensor factor of the two-qubit space to keep under a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Keep {
    A,
    B,
}

/// Partial trace of an operator on a bipartite space with factor
/// dimensions `dim_left * dim_right`, keeping the indicated factor.
pub fn partial_trace_parts(m: &COp, dim_left: usize, dim_right: usize, keep_left: bool) -> COp {
    assert_eq!(m.dim(), dim_left * dim_right);
    if keep_left {
        let mut out = COp::zeros(dim_left);
        for i in 0..dim_left {
            for j in 0..dim_left {
                let mut acc = c(0.0, 0.0);
                for k in 0..dim_right {
                    acc += m.get(i * dim_right + k, j * dim_right + k);
                }
                out.set(i, j, acc);
            }
        }
        out
    } else {
        let mut out = COp::zeros(dim_right);
        for i in 0..dim_right {
            for j in 0..dim_right {
                let mut acc = c(0.0, 0.0);
                for k in 0..dim_left {
                    acc += m.get(k * dim_right + i, k * dim_right + j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// Partial trace of a two-qubit operator, Tr_B for `Keep::A` and Tr_A
/// for `Keep::B`.
pub fn partial_trace(m: &COp, keep: Keep) -> Result<COp> {
    if m.dim() != 4 {
        return Err(Error::DimMismatch(format!(
            "partial_trace expects dim 4, got {}",
            m.dim()
        )));
    }
    Ok(partial_trace_parts(m, 2, 2, keep == Keep::A))
}

/// Norm-preserving map from the one-qubit input space into the
/// two-qubit space, stored as the images of |0> and |1>.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    columns: [CVec; 2],
}

impl Isometry {
    pub const TOL: f64 = 1e-12;

    pub fn new(col0: CVec, col1: CVec) -> Result<Self> {
        if col0.dim() != 4 || col1.dim() != 4 {
            return Err(Error::DimMismatch("isometry columns must be dim 4".into()));
        }
        let v = Self {
            columns: [col0, col1],
        };
        let dev = v.isometry_deviation();
        if dev > Self::TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(v)
    }

    /// Max deviation of V†V from the 2x2 identity.
    pub fn isometry_deviation(&self) -> f64 {
        let g00 = self.columns[0].dot(&self.columns[0]);
        let g11 = self.columns[1].dot(&self.columns[1]);
        let g01 = self.columns[0].dot(&self.columns[1]);
        [(g00 - c(1.0, 0.0)).norm(), (g11 - c(1.0, 0.0)).norm(), g01.norm()]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn column(&self, j: usize) -> &CVec {
        &self.columns[j]
    }

    /// V|alpha> for a one-qubit input state.
    pub fn apply(&self, alpha: &CVec) -> CVec {
        assert_eq!(alpha.dim(), 2);
        &self.columns[0].scale(alpha.get(0)) + &self.columns[1].scale(alpha.get(1))
    }

    /// Projector onto the image subspace of the isometry.
    pub fn image_projector(&self) -> COp {
        &COp::outer(&self.columns[0], &self.columns[0])
            + &COp::outer(&self.columns[1], &self.columns[1])
    }

    /// V rho V† as a two-qubit operator.
    pub fn conjugate(&self, rho: &COp) -> COp {
        assert_eq!(rho.dim(), 2);
        let mut out = COp::zeros(4);
        for j in 0..2 {
            for k in 0..2 {
                let w = rho.get(j, k);
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                out = &out + &COp::outer(&self.columns[j], &self.columns[k]).scale(w);
            }
        }
        out
    }

    /// V† |g> for a two-qubit vector, a one-qubit vector of overlaps.
    pub fn adjoint_apply(&self, g: &CVec) -> CVec {
        assert_eq!(g.dim(), 4);
        CVec::new(vec![self.columns[0].dot(g), self.columns[1].dot(g)]).expect("dim 2")
    }

    /// Left-multiplies both columns by a two-qubit operator, returning
    /// the new isometry (the operator must be unitary for this to stay
    /// an isometry).
    pub fn left_mul(&self, u: &COp) -> Result<Self> {
        Self::new(u.apply(&self.columns[0]), u.apply(&self.columns[1]))
    }

    /// Right-composes with a one-qubit unitary: columns of V * S.
    pub fn right_mul(&self, s: &COp) -> Result<Self> {
        assert_eq!(s.dim(), 2);
        let col0 = &self.columns[0].scale(s.get(0, 0)) + &self.columns[1].scale(s.get(1, 0));
        let col1 = &self.columns[0].scale(s.get(0, 1)) + &self.columns[1].scale(s.get(1, 1));
        Self::new(col0, col1)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.columns[0]
            .max_abs_diff(&other.columns[0])
            .max(self.columns[1].max_abs_diff(&other.columns[1]))
    }
}

/// Builds the isometry V|alpha> = U(|alpha> ⊗ |b>) of a fixed unitary
/// and a fixed b-qubit state.
pub fn isometry_from_unitary(u: &COp, b: &CVec) -> Result<Isometry> {
    if u.dim() != 4 || b.dim() != 2 {
        return Err(Error::DimMismatch(
            "expected a 4x4 unitary and a 2-dim state".into(),
        ));
    }
    if !u.is_unitary(1e-12) {
        let dev = (&u.adjoint() * u).max_abs_diff(&COp::identity(4));
        return Err(Error::NotUnitary(dev));
    }
    if !b.is_unit(1e-12) {
        return Err(Error::NotNormalized(b.norm()));
    }
    let col0 = u.apply(&tensor_vec(&CVec::basis(2, 0), b)?);
    let col1 = u.apply(&tensor_vec(&CVec::basis(2, 1), b)?);
    Isometry::new(col0, col1)
}

/// Reduced output states (rho_a, rho_b) of the channel induced by an
/// isometry on a one-qubit density input.
pub fn apply_channel(v: &Isometry, rho_in: &COp) -> Result<(COp, COp)> {
    if !rho_in.is_density_2(1e-12) {
        return Err(Error::NotDensity(
            "input must be Hermitian, PSD, trace one".into(),
        ));
    }
    let joint = v.conjugate(rho_in);
    Ok((
        partial_trace(&joint, Keep::A)?,
        partial_trace(&joint, Keep::B)?,
    ))
}

fn phase_factor(x: C64, y: C64) -> C64 {
    // unit-modulus ratio of phases, x/y normalized
    let r = x / y;
    let n = r.norm();
    if n == 0.0 {
        c(1.0, 0.0)
    } else {
        r / n
    }
}

/// True iff x = c*y for some unit complex c, entrywise within tol. The
/// phase is pinned by the largest-magnitude entry of y.
pub fn equal_up_to_phase_op(x: &COp, y: &COp, tol: f64) -> bool {
    if x.dim() != y.dim() {
        return false;
    }
    let mut pivot = 0;
    let mut best = 0.0;
    for (i, e) in y.entries().iter().enumerate() {
        if e.norm() > best {
            best = e.norm();
            pivot = i;
        }
    }
    if best < tol {
        return x.max_abs() <= tol;
    }
    let ph = phase_factor(x.entries()[pivot], y.entries()[pivot]);
    x.max_abs_diff(&y.scale(ph)) <= tol
}

/// Same as [`equal_up_to_phase_op`] for isometries.
pub fn equal_up_to_phase_isometry(x: &Isometry, y: &Isometry, tol: f64) -> bool {
    let entries =
        |v: &Isometry| -> Vec<C64> { v.column(0).entries().iter().chain(v.column(1).entries()).copied().collect() };
    let (xs, ys) = (entries(x), entries(y));
    let mut pivot = 0;
    let mut best = 0.0;
    for (i, e) in ys.iter().enumerate() {
        if e.norm() > best {
            best = e.norm();
            pivot = i;
        }
    }
    if best < tol {
        return xs.iter().map(|e| e.norm()).fold(0.0, f64::max) <= tol;
    }
    let ph = phase_factor(xs[pivot], ys[pivot]);
    xs.iter()
        .zip(&ys)
        .map(|(a, b)| (a - b * ph).norm())
        .fold(0.0, f64::max)
        <= tol
}

/// Pauli matrices in the standard basis, index 0 is the identity.
pub fn pauli(j: usize) -> COp {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match j {
        0 => COp::identity(2),
        1 => COp::from_rows(&[&[z, one], &[one, z]]),
        2 => COp::from_rows(&[&[z, c(0.0, -1.0)], &[c(0.0, 1.0), z]]),
        3 => COp::from_rows(&[&[one, z], &[z, -one]]),
        _ => panic!("pauli index out of range"),
    }
}

/// Eigen-decomposition of a 2x2 Hermitian matrix, eigenvalues sorted
/// descending with orthonormal eigenvectors.
pub fn eig_hermitian_2(h: &COp) -> (f64, f64, CVec, CVec) {
    assert_eq!(h.dim(), 2);
    let a = h.get(0, 0).re;
    let d = h.get(1, 1).re;
    let off = h.get(0, 1);
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + off.norm_sqr()).sqrt();
    let (hi, lo) = (mid + rad, mid - rad);
    if rad < 1e-13 {
        // numerically proportional to the identity; any orthonormal pair works
        return (hi, lo, CVec::basis(2, 0), CVec::basis(2, 1));
    }
    if off.norm() < 1e-15 {
        if a >= d {
            return (a, d, CVec::basis(2, 0), CVec::basis(2, 1));
        }
        return (d, a, CVec::basis(2, 1), CVec::basis(2, 0));
    }
    let vec_for = |lambda: f64| -> CVec {
        let v1 = CVec::new(vec![off, c(lambda - a, 0.0)]).unwrap();
        let v2 = CVec::new(vec![c(lambda - d, 0.0), off.conj()]).unwrap();
        let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
        v.normalized().expect("nonzero eigenvector")
    };
    (hi, lo, vec_for(hi), vec_for(lo))
}

/// Haar-distributed random unitary from a complex Gaussian matrix and
/// Gram-Schmidt orthonormalization with positive-diagonal convention.
pub fn haar_random_unitary<R: Rng>(dim: usize, rng: &mut R) -> COp {
    check_dim(dim).expect("supported dim");
    let mut gauss = || {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut cols: Vec<CVec> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let raw = CVec::new((0..dim).map(|_| c(gauss(), gauss())).collect()).unwrap();
        cols.push(raw);
    }
    // modified Gram-Schmidt
    for j in 0..dim {
        for i in 0..j {
            let proj = cols[i].dot(&cols[j]);
            cols[j] = &cols[j] - &cols[i].scale(proj);
        }
        cols[j] = cols[j].normalized().expect("generic Gaussian column");
    }
    let mut u = COp::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..dim {
            u.set(i, j, col.get(i));
        }
    }
    u
}

/// Haar-random pure qubit state.
pub fn haar_random_state<R: Rng>(rng: &mut R) -> CVec {
    let u = haar_random_unitary(2, rng);
    u.apply(&CVec::basis(2, 0))
}

// --- JSON forms: complex entries as [re, im] pairs, matrices row-major ---

impl Serialize for CVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.data.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CVec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        CVec::new(pairs.into_iter().map(|[re, im]| c(re, im)).collect())
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl Serialize for COp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| {
                let z = self.get(i, j);
                [z.re, z.im]
            }).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for COp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(D::Error::custom("matrix rows must be square"));
            }
            data.extend(row.iter().map(|&[re, im]| c(re, im)));
        }
        COp::new(dim, data).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cnot_a() -> COp {
        // |a b> basis order 00, 01, 10, 11; a controls b
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        COp::from_rows(&[
            &[one, z, z, z],
            &[z, one, z, z],
            &[z, z, z, one],
            &[z, z, one, z],
        ])
    }

    #[test]
    fn tensor_identity_case() {
        let i2 = COp::identity(2);
        assert_eq!(tensor_op(&i2, &i2).unwrap(), COp::identity(4));
    }

    #[test]
    fn tensor_basis_ordering() {
        // |0> ⊗ |1> = |01> = (0,1,0,0)
        let v = tensor_vec(&CVec::basis(2, 0), &CVec::basis(2, 1)).unwrap();
        assert_eq!(v, CVec::basis(4, 1));
    }

    #[test]
    fn tensor_bit_flip_on_both() {
        let xx = tensor_op(&pauli(1), &pauli(1)).unwrap();
        let v = xx.apply(&CVec::basis(4, 0));
        assert!(v.max_abs_diff(&CVec::basis(4, 3)) < 1e-15);
    }

    #[test]
    fn tensor_rejects_unsupported_dims() {
        let i4 = COp::identity(4);
        assert!(tensor_op(&i4, &i4).is_err());
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = COp::outer(&CVec::basis(4, 0), &CVec::basis(4, 0));
        let a = partial_trace(&rho, Keep::A).unwrap();
        let expect = COp::outer(&CVec::basis(2, 0), &CVec::basis(2, 0));
        assert!(a.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn partial_trace_maximally_entangled() {
        let bell = (&CVec::basis(4, 0) + &CVec::basis(4, 3)).scale(c(1.0 / 2f64.sqrt(), 0.0));
        let rho = COp::outer(&bell, &bell);
        let a = partial_trace(&rho, Keep::A).unwrap();
        assert!(a.max_abs_diff(&COp::identity(2).scale(c(0.5, 0.0))) < 1e-15);
    }

    #[test]
    fn partial_trace_projector_dyad_oracle() {
        // G projects onto span{|00>, |11>}; G_A computed independently by
        // summing the partial traces of the two dyads by hand gives I2.
        let g = &COp::outer(&CVec::basis(4, 0), &CVec::basis(4, 0))
            + &COp::outer(&CVec::basis(4, 3), &CVec::basis(4, 3));
        // dyad |00><00| keeps |0><0| on A; dyad |11><11| keeps |1><1|
        let oracle = &COp::outer(&CVec::basis(2, 0), &CVec::basis(2, 0))
            + &COp::outer(&CVec::basis(2, 1), &CVec::basis(2, 1));
        let ga = partial_trace(&g, Keep::A).unwrap();
        assert!(ga.max_abs_diff(&oracle) < 1e-15);
        let (hi, lo, _, _) = eig_hermitian_2(&ga);
        assert!((hi - 1.0).abs() < 1e-12 && (lo - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isometry_from_identity() {
        let v = isometry_from_unitary(&COp::identity(4), &CVec::basis(2, 0)).unwrap();
        assert!(v.column(0).max_abs_diff(&CVec::basis(4, 0)) < 1e-15);
        assert!(v.column(1).max_abs_diff(&CVec::basis(4, 2)) < 1e-15);
    }

    #[test]
    fn isometry_from_cnot() {
        let v = isometry_from_unitary(&cnot_a(), &CVec::basis(2, 0)).unwrap();
        assert!(v.column(0).max_abs_diff(&CVec::basis(4, 0)) < 1e-15);
        assert!(v.column(1).max_abs_diff(&CVec::basis(4, 3)) < 1e-15);
    }

    #[test]
    fn isometry_from_random_unitary_stays_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u = haar_random_unitary(4, &mut rng);
            let b = haar_random_state(&mut rng);
            let v = isometry_from_unitary(&u, &b).unwrap();
            assert!(v.isometry_deviation() <= 1e-12);
        }
    }

    #[test]
    fn isometry_rejects_non_unitary() {
        let mut m = COp::identity(4);
        m.set(0, 0, c(2.0, 0.0));
        assert!(isometry_from_unitary(&m, &CVec::basis(2, 0)).is_err());
    }

    #[test]
    fn isometry_rejects_unnormalized_b() {
        let b = CVec::from_reals(&[0.5, 0.0]);
        assert!(isometry_from_unitary(&COp::identity(4), &b).is_err());
    }

    #[test]
    fn channel_identity_unitary() {
        let v = isometry_from_unitary(&COp::identity(4), &CVec::basis(2, 0)).unwrap();
        let rho1 = COp::outer(&CVec::basis(2, 1), &CVec::basis(2, 1));
        let (ra, rb) = apply_channel(&v, &rho1).unwrap();
        assert!(ra.max_abs_diff(&rho1) < 1e-14);
        let rho0 = COp::outer(&CVec::basis(2, 0), &CVec::basis(2, 0));
        assert!(rb.max_abs_diff(&rho0) < 1e-14);
    }

    #[test]
    fn channel_cnot_on_plus_state() {
        // CNOT sends |0_x>|0> to (|00>+|11>)/sqrt2; expanding that Bell
        // projector and tracing either side by hand gives I/2.
        let v = isometry_from_unitary(&cnot_a(), &CVec::basis(2, 0)).unwrap();
        let plus = CVec::from_reals(&[1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()]);
        let rho = COp::outer(&plus, &plus);
        let (ra, rb) = apply_channel(&v, &rho).unwrap();
        let half = COp::identity(2).scale(c(0.5, 0.0));
        assert!(ra.max_abs_diff(&half) < 1e-14);
        assert!(rb.max_abs_diff(&half) < 1e-14);
    }

    #[test]
    fn channel_preserves_trace_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let u = haar_random_unitary(4, &mut rng);
            let b = haar_random_state(&mut rng);
            let v = isometry_from_unitary(&u, &b).unwrap();
            let s = haar_random_state(&mut rng);
            let rho = COp::outer(&s, &s);
            let (ra, rb) = apply_channel(&v, &rho).unwrap();
            for r in [ra, rb] {
                assert!((r.trace() - c(1.0, 0.0)).norm() < 1e-12);
                assert!(r.is_hermitian(1e-12));
            }
        }
    }

    #[test]
    fn channel_rejects_invalid_density() {
        let v = isometry_from_unitary(&COp::identity(4), &CVec::basis(2, 0)).unwrap();
        let bad = COp::identity(2); // trace 2
        assert!(apply_channel(&v, &bad).is_err());
    }

    #[test]
    fn phase_equality_explicit_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_random_unitary(4, &mut rng);
        let b = haar_random_state(&mut rng);
        let v = isometry_from_unitary(&u, &b).unwrap();
        let ph = C64::from_polar(1.0, std::f64::consts::PI / 7.0);
        let w = Isometry::new(v.column(0).scale(ph), v.column(1).scale(ph)).unwrap();
        assert!(equal_up_to_phase_isometry(&v, &w, 1e-10));
    }

    #[test]
    fn phase_equality_rejects_relative_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = haar_random_unitary(4, &mut rng);
        let b = haar_random_state(&mut rng);
        let v = isometry_from_unitary(&u, &b).unwrap();
        let w = Isometry::new(v.column(0).clone(), v.column(1).scale(c(-1.0, 0.0))).unwrap();
        assert!(!equal_up_to_phase_isometry(&v, &w, 1e-10));
    }

    #[test]
    fn json_roundtrip_matrix() {
        let m = cnot_a();
        let s = serde_json::to_string(&m).unwrap();
        let back: COp = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| c(re, im))
    }

    fn arb_op2() -> impl Strategy<Value = COp> {
        proptest::collection::vec(arb_c64(), 4).prop_map(|v| COp::new(2, v).unwrap())
    }

    proptest! {
        #[test]
        fn tensor_associative(a in arb_op2(), b in arb_op2(), d in arb_op2()) {
            let left = tensor_op(&tensor_op(&a, &b).unwrap(), &d).unwrap();
            let right = tensor_op(&a, &tensor_op(&b, &d).unwrap()).unwrap();
            prop_assert!(left.max_abs_diff(&right) <= 1e-14);
        }

        #[test]
        fn partial_trace_of_tensor(a in arb_op2(), b in arb_op2()) {
            let t = tensor_op(&a, &b).unwrap();
            let kept = partial_trace(&t, Keep::A).unwrap();
            let expect = a.scale(b.trace());
            prop_assert!(kept.max_abs_diff(&expect) <= 1e-13);
        }

        #[test]
        fn pauli_tensor_associative_exact(i in 0usize..4, j in 0usize..4, k in 0usize..4) {
            // entries in {0, ±1, ±i} multiply exactly
            let left = tensor_op(&tensor_op(&pauli(i), &pauli(j)).unwrap(), &pauli(k)).unwrap();
            let right = tensor_op(&pauli(i), &tensor_op(&pauli(j), &pauli(k)).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
