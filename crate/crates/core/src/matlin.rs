//! Dense complex linear algebra for the small Hilbert spaces used here
//! (dimension up to ~16).
//!
//! Everything is row-major `Vec<Complex64>`; no BLAS, no SIMD. The
//! eigensolver is cyclic Jacobi, which is accurate to a few ulps of `‖M‖`
//! at these sizes and gives bit-reproducible output.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

/// Relative tolerance on `‖M − M†‖_F`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Absolute tolerance on `‖U†U − 𝟙‖_F`.
pub const UNITARY_TOL: f64 = 1e-11;

const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this (relative to the spectral scale) are treated
/// as one degenerate cluster when fixing the eigenvector basis.
const DEGENERACY_TOL: f64 = 1e-10;
/// Two magnitudes within this relative distance count as a tie for the
/// phase convention.
const PHASE_TIE_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails on empty input,
    /// non-square shape or non-finite entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        let m = CMatrix { dim, data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "expected dim*dim entries");
        CMatrix {
            dim,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (k, &v) in values.iter().enumerate() {
            m[(k, k)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn pauli_y() -> Self {
        let mut m = Self::zeros(2);
        m[(0, 1)] = -I;
        m[(1, 0)] = I;
        m
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, &[1.0, 0.0, 0.0, -1.0])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Hilbert–Schmidt inner product `tr(A† B)`.
    pub fn hs_inner(&self, other: &CMatrix) -> Complex64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `‖M − M†‖_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        math::sqrt(acc)
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let residual = self.hermiticity_residual();
        if residual > HERMITIAN_TOL * self.frob_norm().max(1.0) {
            return Err(Error::NotHermitian { residual });
        }
        Ok(())
    }

    /// `‖U†U − 𝟙‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim)).frob_norm()
    }

    pub fn check_unitary(&self) -> Result<()> {
        let residual = self.unitarity_residual();
        if residual.is_nan() || residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(())
    }

    /// `⟨x|M|y⟩` for column vectors stored as slices.
    pub fn sandwich(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let n = self.dim;
        let mut acc = ZERO;
        for (i, xi) in x.iter().take(n).enumerate() {
            let xi = xi.conj();
            if xi == ZERO {
                continue;
            }
            let row = &self.data[i * n..(i + 1) * n];
            let r: Complex64 = row.iter().zip(y).map(|(m, v)| m * v).sum();
            acc += xi * r;
        }
        acc
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    /// `V† M V`, i.e. `M` expressed in the orthonormal basis given by the
    /// columns of `V`.
    pub fn in_basis(&self, v: &CMatrix) -> CMatrix {
        &(&v.adjoint() * self) * v
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `values` ascend; column `k` of `vectors` is the eigenvector for
/// `values[k]`. Each vector's largest-magnitude component (lowest index on
/// ties) is real and nonnegative, and bases of degenerate eigenspaces are
/// fixed by pivoted Gram–Schmidt on the projector columns, so the output is a
/// function of the matrix alone.
#[derive(Debug, Clone, PartialEq)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `V·diag(f(h))·V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.dim();
        let v = &self.vectors;
        let fs: Vec<Complex64> = self.values.iter().map(|&h| f(h)).collect();
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += v[(i, k)] * fs[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Smallest gap between consecutive eigenvalues (infinite for dim 1).
    pub fn min_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn spectral_range(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }
}

pub fn herm_eig(m: &CMatrix) -> Result<HermEig> {
    m.check_hermitian()?;
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.dim();
    let mut a = (m + &m.adjoint()).scale_real(0.5);
    let mut v = CMatrix::identity(n);
    let scale = a.frob_norm();

    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum();
            if math::sqrt(off) <= 1e-16 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, &mut v, p, q, scale);
                }
            }
        }
    }

    let raw: Vec<f64> = (0..n).map(|k| a[(k, k)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| raw[x].total_cmp(&raw[y]));
    let values: Vec<f64> = order.iter().map(|&k| raw[k]).collect();
    let mut columns: Vec<Vec<Complex64>> = order.iter().map(|&k| v.column(k)).collect();

    let spread = values
        .iter()
        .fold(0.0_f64, |acc, h| acc.max(h.abs()))
        .max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= DEGENERACY_TOL * spread {
            end += 1;
        }
        if end - start > 1 {
            let cluster = canonical_subspace_basis(&columns[start..end], n);
            for (slot, vec) in columns[start..end].iter_mut().zip(cluster) {
                *slot = vec;
            }
        }
        start = end;
    }

    for col in &mut columns {
        fix_phase(col);
    }

    let mut vectors = CMatrix::zeros(n);
    for (j, col) in columns.iter().enumerate() {
        for i in 0..n {
            vectors[(i, j)] = col[i];
        }
    }
    Ok(HermEig { values, vectors })
}

fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, scale: f64) {
    let n = a.dim();
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= 1e-300 || r <= 1e-18 * scale {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + math::sqrt(theta * theta + 1.0))
    } else {
        -1.0 / (-theta + math::sqrt(theta * theta + 1.0))
    };
    let c = 1.0 / math::sqrt(t * t + 1.0);
    let s = t * c;
    let cph = phase.conj();

    // A <- A J, V <- V J with J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q).
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * cph * s;
        a[(k, q)] = akp * s + akq * cph * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * cph * s;
        v[(k, q)] = vkp * s + vkq * cph * c;
    }
    // A <- J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// Orthonormal basis of the span of `vecs`, chosen by pivoted Gram–Schmidt
/// over the projections of the canonical axes onto that span: the axis with
/// the largest remaining projection goes first (lowest index on ties).
fn canonical_subspace_basis(vecs: &[Vec<Complex64>], n: usize) -> Vec<Vec<Complex64>> {
    // Projector columns P e_j = Σ_k v_k conj(v_k[j]).
    let mut candidates: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut col = vec![ZERO; n];
            for vk in vecs {
                let w = vk[j].conj();
                for i in 0..n {
                    col[i] += vk[i] * w;
                }
            }
            col
        })
        .collect();

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(vecs.len());
    while basis.len() < vecs.len() {
        let norms: Vec<f64> = candidates.iter().map(|c| cnorm(c)).collect();
        let best = argmax_with_ties(&norms);
        let mut b = candidates[best].clone();
        // second pass for numerical orthogonality
        for prev in &basis {
            let ov = cdot(prev, &b);
            for i in 0..n {
                b[i] -= prev[i] * ov;
            }
        }
        let nb = cnorm(&b);
        for x in &mut b {
            *x /= nb;
        }
        for c in &mut candidates {
            let ov = cdot(&b, c);
            for i in 0..n {
                c[i] -= b[i] * ov;
            }
        }
        basis.push(b);
    }
    basis
}

/// Index of the maximum; values within `PHASE_TIE_TOL` relative of the
/// maximum tie and resolve to the lowest index.
fn argmax_with_ties(xs: &[f64]) -> usize {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    xs.iter()
        .position(|&x| x >= max * (1.0 - PHASE_TIE_TOL))
        .unwrap_or(0)
}

fn fix_phase(col: &mut [Complex64]) {
    let mags: Vec<f64> = col.iter().map(|z| z.norm()).collect();
    let k = argmax_with_ties(&mags);
    if mags[k] == 0.0 {
        return;
    }
    let ph = col[k].conj() / mags[k];
    for z in col.iter_mut() {
        *z *= ph;
    }
    col[k] = Complex64::new(mags[k], 0.0);
}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn cnorm(a: &[Complex64]) -> f64 {
    math::sqrt(a.iter().map(|z| z.norm_sqr()).sum())
}

/// `e^{sM}` for Hermitian `M` and real `s`.
pub fn expm_hermitian(m: &CMatrix, s: f64) -> Result<CMatrix> {
    let eig = herm_eig(m)?;
    Ok(eig.map_spectrum(|h| Complex64::new(math::exp(s * h), 0.0)))
}

/// `e^{−iτH}` for a constant Hermitian `H`.
pub fn unitary_exp(h: &CMatrix, tau: f64) -> Result<CMatrix> {
    let eig = herm_eig(h)?;
    Ok(eig.map_spectrum(|e| {
        let phi = -tau * e;
        Complex64::new(math::cos(phi), math::sin(phi))
    }))
}

/// Kronecker product; entry `(i·dB+k, j·dB+l) = A(i,j)·B(k,l)`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut out = CMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(&(a * b) - &(b * a))
}

/// `‖AB − BA‖_F`.
pub fn comm_norm(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    commutator(a, b).map(|c| c.frob_norm())
}

/// Dense real rectangular matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        RMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Orthonormal basis of `{x : ‖Mx‖ ≤ tol·σ_max(M)}`.
///
/// Singular values come from one-sided (Hestenes) Jacobi, which resolves
/// small singular values to absolute accuracy `~ε·‖M‖`. The returned basis is
/// canonicalized by pivoted Gram–Schmidt on the kernel projector columns:
/// vectors appear in order of descending alignment with the coordinate axes
/// (lowest axis index on ties) with the pivot component positive.
pub fn real_nullspace(m: &RMatrix, tol: f64) -> Vec<Vec<f64>> {
    let (rows, cols) = (m.nrows(), m.ncols());
    if cols == 0 {
        return Vec::new();
    }
    // w[j] is column j of M V.
    let mut w: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| m[(i, j)]).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    for _ in 0..60 {
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let alpha: f64 = w[i].iter().map(|x| x * x).sum();
                let beta: f64 = w[j].iter().map(|x| x * x).sum();
                let gamma: f64 = w[i].iter().zip(&w[j]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-15 * math::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + math::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + math::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_pair(&mut w, i, j, c, s);
                rotate_pair(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigmas: Vec<f64> = w
        .iter()
        .map(|col| math::sqrt(col.iter().map(|x| x * x).sum()))
        .collect();
    let sigma_max = sigmas.iter().copied().fold(0.0, f64::max);
    let kernel: Vec<&Vec<f64>> = v
        .iter()
        .zip(&sigmas)
        .filter(|(_, &s)| s <= tol * sigma_max)
        .map(|(col, _)| col)
        .collect();
    canonical_real_basis(&kernel, cols)
}

fn rotate_pair(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(j);
    let (a, b) = (&mut left[i], &mut right[0]);
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

fn canonical_real_basis(vecs: &[&Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut candidates: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut col = vec![0.0; n];
            for vk in vecs {
                let w = vk[j];
                for i in 0..n {
                    col[i] += vk[i] * w;
                }
            }
            col
        })
        .collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vecs.len());
    while basis.len() < vecs.len() {
        let norms: Vec<f64> = candidates
            .iter()
            .map(|c| math::sqrt(c.iter().map(|x| x * x).sum()))
            .collect();
        let best = argmax_with_ties(&norms);
        let mut b = candidates[best].clone();
        for prev in &basis {
            let ov: f64 = prev.iter().zip(&b).map(|(x, y)| x * y).sum();
            for i in 0..n {
                b[i] -= prev[i] * ov;
            }
        }
        let nb = math::sqrt(b.iter().map(|x| x * x).sum());
        let sign = if b[best] < 0.0 { -1.0 } else { 1.0 };
        for x in &mut b {
            *x *= sign / nb;
        }
        for c in &mut candidates {
            let ov: f64 = b.iter().zip(c.iter()).map(|(x, y)| x * y).sum();
            for i in 0..n {
                c[i] -= b[i] * ov;
            }
        }
        basis.push(b);
    }
    basis
}
