//! Dense complex kernels: independence selection, orthonormalization,
//! Hermitian eigendecomposition and exact unitary propagation.

mod blocked;

pub use blocked::BlockedBasis;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<C64>;
pub type StateVector = DVector<C64>;

/// Default independence tolerance, relative to the largest column norm.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;
/// Determinant-ratio threshold for Gramian admission, relative to `<b|b>`.
pub const GRAM_DET_TOL: f64 = 1e-12;
/// Default Hermiticity tolerance on `max |A - A†|`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A candidate is admitted ahead of earlier ones only when their residual
/// falls below this fraction of the current largest residual.
pub(crate) const PIVOT_THRESHOLD: f64 = 0.5;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `Σ conj(a_i) b_i`.
pub fn cdot(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    let (mut re0, mut im0, mut re1, mut im1) = (0.0, 0.0, 0.0, 0.0);
    let mut ca = a.chunks_exact(2);
    let mut cb = b.chunks_exact(2);
    for (x, y) in (&mut ca).zip(&mut cb) {
        re0 += x[0].re * y[0].re + x[0].im * y[0].im;
        im0 += x[0].re * y[0].im - x[0].im * y[0].re;
        re1 += x[1].re * y[1].re + x[1].im * y[1].im;
        im1 += x[1].re * y[1].im - x[1].im * y[1].re;
    }
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        re0 += x.re * y.re + x.im * y.im;
        im0 += x.re * y.im - x.im * y.re;
    }
    C64::new(re0 + re1, im0 + im1)
}

/// `y += alpha * x`.
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn scale_in_place(a: &mut [C64], s: f64) {
    for z in a {
        *z *= s;
    }
}

/// Growing orthonormal set used for incremental span-membership tests.
#[derive(Clone, Debug, Default)]
pub struct OrthoBasis {
    dim: usize,
    vecs: Vec<Vec<C64>>,
}

impl OrthoBasis {
    pub fn new(dim: usize) -> Self {
        OrthoBasis { dim, vecs: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vecs
    }

    fn cgs_pass(&self, v: &mut [C64]) {
        let coeffs: Vec<C64> = self.vecs.iter().map(|q| cdot(q, v)).collect();
        for (q, c) in self.vecs.iter().zip(coeffs) {
            axpy(-c, q, v);
        }
    }

    /// Removes the span component from `v` in place and returns the residual
    /// norm. A second pass runs only when the first one cancelled most of `v`
    /// but not clearly below `abs_tol`.
    pub fn project_out(&self, v: &mut [C64], abs_tol: f64) -> f64 {
        let before = norm(v);
        if self.vecs.is_empty() {
            return before;
        }
        self.cgs_pass(v);
        let after = norm(v);
        if after > 0.5 * before || after < 0.01 * abs_tol {
            return after;
        }
        self.cgs_pass(v);
        norm(v)
    }

    /// Appends `v` after a full reorthogonalization; returns false when the
    /// residual is zero.
    pub fn push(&mut self, mut v: Vec<C64>) -> bool {
        assert_eq!(v.len(), self.dim);
        self.cgs_pass(&mut v);
        self.cgs_pass(&mut v);
        let nv = norm(&v);
        if nv == 0.0 || !nv.is_finite() {
            return false;
        }
        scale_in_place(&mut v, 1.0 / nv);
        self.vecs.push(v);
        true
    }

    /// Admits candidates that leave the current span by more than `abs_tol`,
    /// largest-residual-first with a threshold: among candidates whose residual
    /// is within [`PIVOT_THRESHOLD`] of the maximum, the earliest index wins.
    /// Returns the admitted candidate indices in admission order.
    pub fn admit(&mut self, mut candidates: Vec<Vec<C64>>, abs_tol: f64) -> Vec<usize> {
        let mut norms: Vec<f64> = candidates.iter_mut().map(|c| self.project_out(c, abs_tol)).collect();
        let mut alive: Vec<bool> = norms.iter().map(|&r| r > abs_tol).collect();
        let mut admitted = Vec::new();
        loop {
            let max = norms.iter().zip(&alive).filter(|(_, &a)| a).map(|(&r, _)| r).fold(0.0f64, f64::max);
            if max <= abs_tol {
                break;
            }
            let pick = (0..candidates.len())
                .find(|&i| alive[i] && norms[i] >= PIVOT_THRESHOLD * max)
                .expect("maximum is attained");
            alive[pick] = false;
            let v = std::mem::take(&mut candidates[pick]);
            if !self.push(v) {
                continue;
            }
            admitted.push(pick);
            let q = self.vecs.last().expect("just pushed");
            for i in 0..candidates.len() {
                if !alive[i] {
                    continue;
                }
                let c = cdot(q, &candidates[i]);
                axpy(-c, q, &mut candidates[i]);
                norms[i] = norm(&candidates[i]);
                if norms[i] <= abs_tol {
                    alive[i] = false;
                }
            }
        }
        admitted
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = DMatrix::zeros(self.dim, self.vecs.len());
        for (j, v) in self.vecs.iter().enumerate() {
            m.column_mut(j).copy_from_slice(v);
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankSelection {
    pub rank: usize,
    /// Selected column indices in admission order.
    pub indices: Vec<usize>,
}

fn check_dims(cols: &[StateVector]) -> Result<usize> {
    let dim = cols.first().map_or(0, |c| c.len());
    if let Some(c) = cols.iter().find(|c| c.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: c.len() });
    }
    Ok(dim)
}

fn independent_columns(cols: &[StateVector], tol: f64) -> Result<(OrthoBasis, Vec<usize>)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let dim = check_dims(cols)?;
    let scale = cols.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut basis = OrthoBasis::new(dim);
    if scale == 0.0 {
        return Ok((basis, vec![]));
    }
    let cands = cols.iter().map(|c| c.as_slice().to_vec()).collect();
    let idx = basis.admit(cands, tol * scale);
    Ok((basis, idx))
}

/// Numerical rank of a set of vectors with `tol` relative to the largest
/// column norm.
pub fn numeric_rank(cols: &[StateVector], tol: f64) -> Result<RankSelection> {
    let (_, indices) = independent_columns(cols, tol)?;
    Ok(RankSelection { rank: indices.len(), indices })
}

/// Orthonormal basis (as matrix columns) of the span of `vectors`.
pub fn orthonormal_columns(vectors: &[StateVector]) -> Result<ComplexMatrix> {
    let (basis, _) = independent_columns(vectors, DEFAULT_RANK_TOL)?;
    Ok(basis.to_matrix())
}

/// Same as [`orthonormal_columns`] but also reports which inputs were used.
pub fn orthonormal_selection(vectors: &[StateVector], tol: f64) -> Result<(ComplexMatrix, Vec<usize>)> {
    let (basis, idx) = independent_columns(vectors, tol)?;
    Ok((basis.to_matrix(), idx))
}

pub fn hermiticity_deviation(a: &ComplexMatrix) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn check_hermitian(a: &ComplexMatrix, tol: f64) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let dev = hermiticity_deviation(a);
    if dev > tol * scale {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Eigendecomposition `A = U diag(values) U†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `exp(-i A t) v`.
    pub fn evolve(&self, t: f64, v: &StateVector) -> StateVector {
        let mut c = self.vectors.ad_mul(v);
        for (ci, &mu) in c.iter_mut().zip(&self.values) {
            *ci *= C64::from_polar(1.0, -mu * t);
        }
        &self.vectors * c
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &mu) in self.values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(mu);
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(a, HERMITIAN_TOL)?;
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(a.nrows(), a.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// `exp(-i A t) v` via the eigendecomposition of `A`.
pub fn evolve(a: &ComplexMatrix, t: f64, v: &StateVector) -> Result<StateVector> {
    if a.nrows() != v.len() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: v.len() });
    }
    Ok(hermitian_eig(a)?.evolve(t, v))
}

/// `G[k,l] = <v_k|v_l>`.
pub fn gram_matrix(vectors: &[StateVector]) -> Result<ComplexMatrix> {
    check_dims(vectors)?;
    let k = vectors.len();
    let mut g = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let v = vectors[a].dotc(&vectors[b]);
            g[(a, b)] = v;
            g[(b, a)] = v.conj();
        }
    }
    Ok(g)
}

/// `|det G| > 1e-12 · scale^{2k}` for a `k × k` Gramian.
pub fn gram_det_nonzero(g: &ComplexMatrix, scale: f64) -> bool {
    let k = g.nrows() as i32;
    g.clone().determinant().norm() > GRAM_DET_TOL * scale.powi(2 * k)
}

/// Incrementally maintained Cholesky factor `G = L L†` of a Gramian.
///
/// Admitting vector `b` multiplies `det G` by the Schur complement
/// `<b|b> - g† G⁻¹ g` (with `g` the overlaps against the admitted set), so the
/// nonzero-determinant test reduces to a threshold on that complement.
#[derive(Clone, Debug, Default)]
pub struct IncrementalGram {
    /// Row `i` holds `L[i, 0..=i]`.
    rows: Vec<Vec<C64>>,
}

impl IncrementalGram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Solves `L c = g` by forward substitution, skipping leading zeros of `g`.
    fn forward(&self, g: &[C64]) -> Vec<C64> {
        let k = self.rows.len();
        let mut c = vec![ZERO; k];
        let Some(start) = g.iter().position(|z| z.norm_sqr() > 0.0) else {
            return c;
        };
        for i in start..k {
            let row = &self.rows[i];
            let mut s = g[i];
            for j in start..i {
                s -= row[j] * c[j];
            }
            c[i] = s / row[i];
        }
        c
    }

    /// Squared residual of the candidate against the admitted set, i.e.
    /// `det(G ∪ b) / det(G)`.
    pub fn schur_complement(&self, overlaps: &[C64], self_overlap: f64) -> f64 {
        let c = self.forward(overlaps);
        self_overlap - c.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Admits the candidate if the determinant ratio exceeds `det_tol · <b|b>`.
    pub fn try_admit(&mut self, overlaps: &[C64], self_overlap: f64, det_tol: f64) -> bool {
        assert_eq!(overlaps.len(), self.rows.len());
        let c = self.forward(overlaps);
        let s = self_overlap - c.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !(s > det_tol * self_overlap) {
            return false;
        }
        let mut row: Vec<C64> = c.iter().map(|z| z.conj()).collect();
        row.push(C64::new(s.sqrt(), 0.0));
        self.rows.push(row);
        true
    }

    /// Lower-triangular factor as a dense matrix.
    pub fn factor(&self) -> ComplexMatrix {
        let k = self.rows.len();
        let mut l = DMatrix::zeros(k, k);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                l[(i, j)] = v;
            }
        }
        l
    }
}
