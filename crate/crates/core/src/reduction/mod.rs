//! The minimal reduced subspace `A(H)·ψ0`, the reduction map `Φ` and the
//! projected reduced-order model.

mod blocks;
mod gramian;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::burnside::BurnsideBasis;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, OrthoBasis, StateVector, DEFAULT_RANK_TOL};
use crate::model::{HamiltonianModel, Operator};

pub use blocks::{predicted_orbit_dim, synthetic_block_generators, BlockSpec};
pub use gramian::{gramian_indices, gramian_select, pauli_expectation, reduced_model_pauli, GramianSelection};

/// Largest accepted `‖(I − ΦΦ†) H_k Φ‖_F`.
pub const INVARIANCE_TOL: f64 = 1e-8;
/// Largest accepted `‖(I − ΦΦ†) ψ0‖`.
pub const CONTAINMENT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapSource {
    Burnside,
    Gramian,
    Snapshots,
}

/// `d × r` matrix with orthonormal columns spanning a reduced subspace.
#[derive(Clone, Debug)]
pub struct ReductionMap {
    pub phi: ComplexMatrix,
    pub source: MapSource,
    /// Indices of the generating vectors behind each column, in column order.
    pub selected: Vec<usize>,
}

impl ReductionMap {
    pub fn new(phi: ComplexMatrix, source: MapSource, selected: Vec<usize>) -> Self {
        ReductionMap { phi, source, selected }
    }

    pub fn r(&self) -> usize {
        self.phi.ncols()
    }

    pub fn d(&self) -> usize {
        self.phi.nrows()
    }

    /// `‖Φ†Φ − I‖_max`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.phi.ad_mul(&self.phi);
        (g - DMatrix::identity(self.r(), self.r())).camax()
    }

    /// `‖(I − ΦΦ†) v‖`.
    pub fn containment_residual(&self, v: &StateVector) -> f64 {
        (v - &self.phi * self.phi.ad_mul(v)).norm()
    }

    /// `‖(I − ΦΦ†) H Φ‖_F`.
    pub fn invariance_residual(&self, op: &Operator) -> Result<f64> {
        let hphi = apply_columns(op, &self.phi)?;
        Ok((&hphi - &self.phi * self.phi.ad_mul(&hphi)).norm())
    }

    pub fn invariance_residual_matrix(&self, h: &ComplexMatrix) -> f64 {
        let hphi = h * &self.phi;
        (&hphi - &self.phi * self.phi.ad_mul(&hphi)).norm()
    }

    /// Largest invariance residual over the model's coefficient operators.
    pub fn max_invariance_residual(&self, model: &HamiltonianModel) -> Result<f64> {
        model.coeff_set().into_iter().map(|op| self.invariance_residual(op)).try_fold(0.0f64, |m, r| Ok(m.max(r?)))
    }

    /// Drops the last `k` columns.
    pub fn truncated(&self, k: usize) -> Result<ReductionMap> {
        if k >= self.r() {
            return Err(Error::InvalidModel(format!("cannot drop {k} of {} columns", self.r())));
        }
        let keep = self.r() - k;
        Ok(ReductionMap {
            phi: self.phi.columns(0, keep).into_owned(),
            source: self.source,
            selected: self.selected[..keep.min(self.selected.len())].to_vec(),
        })
    }
}

fn apply_columns(op: &Operator, phi: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut out = DMatrix::zeros(phi.nrows(), phi.ncols());
    for (j, col) in phi.column_iter().enumerate() {
        out.set_column(j, &op.apply(&col.into_owned())?);
    }
    Ok(out)
}

/// Orthonormal basis of `span{B_j ψ0}`. `ψ0` itself is seeded first so it lies
/// in the range to working precision; the remaining vectors are admitted with
/// `tol` relative to the largest orbit-vector norm.
pub fn orbit_basis(basis: &BurnsideBasis, psi0: &StateVector, tol: f64) -> Result<ReductionMap> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let vecs = basis.apply_all(psi0)?;
    let scale = vecs.iter().map(|v| v.norm()).fold(psi0.norm(), f64::max);
    let mut ortho = OrthoBasis::new(psi0.len());
    if !ortho.push(psi0.as_slice().to_vec()) {
        return Err(Error::InvalidState("initial state is zero".into()));
    }
    let cands = vecs.iter().map(|v| v.as_slice().to_vec()).collect();
    let mut selected = vec![identity_index(basis)];
    selected.extend(ortho.admit(cands, tol * scale));
    Ok(ReductionMap { phi: ortho.to_matrix(), source: MapSource::Burnside, selected })
}

pub fn orbit_basis_default(basis: &BurnsideBasis, psi0: &StateVector) -> Result<ReductionMap> {
    orbit_basis(basis, psi0, DEFAULT_RANK_TOL)
}

fn identity_index(basis: &BurnsideBasis) -> usize {
    match basis.paulis() {
        Some(ps) => ps.iter().position(|p| p.is_identity()).unwrap_or(0),
        None => basis.words.iter().position(|w| w.is_empty()).unwrap_or(0),
    }
}

/// Projected model `Ĥ_k = Φ† H_k Φ` with `v0 = Φ† ψ0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedModel {
    pub r: usize,
    pub labels: Vec<String>,
    #[serde(with = "crate::io::opt_complex_matrix")]
    pub h0: Option<ComplexMatrix>,
    #[serde(with = "crate::io::complex_matrices")]
    pub terms: Vec<ComplexMatrix>,
    #[serde(with = "crate::io::complex_vector")]
    pub v0: StateVector,
}

impl ReducedModel {
    pub fn num_params(&self) -> usize {
        self.terms.len()
    }

    pub fn evaluate(&self, lambda: &[f64]) -> Result<ComplexMatrix> {
        if lambda.len() != self.terms.len() {
            return Err(Error::ParameterCount { expected: self.terms.len(), got: lambda.len() });
        }
        let mut h = self.h0.clone().unwrap_or_else(|| DMatrix::zeros(self.r, self.r));
        for (t, &l) in self.terms.iter().zip(lambda) {
            h += t * C64::new(l, 0.0);
        }
        Ok(h)
    }

    /// Largest `max |A − A†|` over the projected terms.
    pub fn hermiticity_error(&self) -> f64 {
        self.h0.iter().chain(&self.terms).map(linalg::hermiticity_deviation).fold(0.0, f64::max)
    }
}

pub fn reduced_model(model: &HamiltonianModel, map: &ReductionMap, psi0: &StateVector) -> Result<ReducedModel> {
    if map.d() != model.dim() || psi0.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: map.d() });
    }
    let project = |op: &Operator| -> Result<ComplexMatrix> { Ok(map.phi.ad_mul(&apply_columns(op, &map.phi)?)) };
    let h0 = model.h0().map(project).transpose()?;
    let terms = model.terms().iter().map(project).collect::<Result<Vec<_>>>()?;
    Ok(ReducedModel { r: map.r(), labels: model.labels().to_vec(), h0, terms, v0: map.phi.ad_mul(psi0) })
}
