//! Parameterized Hamiltonians `H(λ) = H0 + Σ λ_k H_k`, built-in spin models
//! and initial states.

mod builtins;
mod operator;
mod pauli_sum;
mod state;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, StateVector};
use crate::pauli::BinaryPauli;

pub use builtins::{
    collective_rotation, collective_with_z_field, net_magnetization, random_tfim_open, tfim_periodic, Builtin,
};
pub use operator::{Operator, TRACE_TOL};
pub use pauli_sum::{PauliSum, MAX_DENSE_SPINS};
pub use state::{
    ground_state, product_state, GroundState, GroundStateOptions, ModelWithState, ProductState, SiteState, StateSpec,
    DEGENERACY_GAP,
};

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianModel {
    dim: usize,
    n: Option<usize>,
    h0: Option<Operator>,
    terms: Vec<Operator>,
    labels: Vec<String>,
}

impl HamiltonianModel {
    /// Generic constructor; all operators must share the dimension. A zero
    /// `h0` is dropped.
    pub fn new(h0: Option<Operator>, terms: Vec<Operator>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != terms.len() {
            return Err(Error::ParameterCount { expected: terms.len(), got: labels.len() });
        }
        let dim = h0
            .as_ref()
            .or(terms.first())
            .map(Operator::dim)
            .ok_or_else(|| Error::InvalidModel("model has no operators".into()))?;
        for op in h0.iter().chain(&terms) {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: op.dim() });
            }
        }
        let all_pauli = h0.iter().chain(&terms).all(|o| o.as_pauli().is_some());
        let n = if all_pauli { Some(dim.trailing_zeros() as usize) } else { None };
        let h0 = h0.filter(|o| !o.is_zero());
        Ok(HamiltonianModel { dim, n, h0, terms, labels })
    }

    pub fn from_pauli(n: usize, h0: Option<PauliSum>, terms: Vec<(String, PauliSum)>) -> Result<Self> {
        for s in h0.iter().chain(terms.iter().map(|(_, s)| s)) {
            if s.n() != n {
                return Err(Error::SpinMismatch { left: n, right: s.n() });
            }
        }
        let (labels, sums): (Vec<_>, Vec<_>) = terms.into_iter().unzip();
        let h0 = match h0 {
            Some(s) => Some(Operator::pauli(s)),
            None if sums.is_empty() => Some(Operator::pauli(PauliSum::zero(n)?)),
            None => None,
        };
        let mut m = HamiltonianModel::new(h0, sums.into_iter().map(Operator::pauli).collect(), labels)?;
        m.n = Some(n);
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Spin count when every operator is a Pauli sum.
    pub fn n(&self) -> Option<usize> {
        self.n
    }

    pub fn num_params(&self) -> usize {
        self.terms.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn h0(&self) -> Option<&Operator> {
        self.h0.as_ref()
    }

    pub fn terms(&self) -> &[Operator] {
        &self.terms
    }

    fn check_lambda(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.terms.len() {
            return Err(Error::ParameterCount { expected: self.terms.len(), got: lambda.len() });
        }
        Ok(())
    }

    /// Dense `H0 + Σ λ_k H_k`.
    pub fn evaluate(&self, lambda: &[f64]) -> Result<ComplexMatrix> {
        self.check_lambda(lambda)?;
        let mut h = match &self.h0 {
            Some(op) => op.dense()?.clone(),
            None => DMatrix::zeros(self.dim, self.dim),
        };
        for (op, &l) in self.terms.iter().zip(lambda) {
            if l != 0.0 {
                h += op.dense()? * C64::new(l, 0.0);
            }
        }
        Ok(h)
    }

    /// `H(λ) v` without forming `H(λ)`.
    pub fn apply(&self, lambda: &[f64], v: &StateVector) -> Result<StateVector> {
        self.check_lambda(lambda)?;
        let mut out = match &self.h0 {
            Some(op) => op.apply(v)?,
            None => StateVector::zeros(self.dim),
        };
        for (op, &l) in self.terms.iter().zip(lambda) {
            if l != 0.0 {
                out += op.apply(v)? * C64::new(l, 0.0);
            }
        }
        Ok(out)
    }

    /// `{H0 (when nonzero), H1, ..., HM}`.
    pub fn coeff_set(&self) -> Vec<&Operator> {
        self.h0.iter().chain(&self.terms).filter(|o| !o.is_zero()).collect()
    }

    /// Distinct Paulis with nonzero coefficient across all terms, in order of
    /// first appearance (`H0` first).
    pub fn support_paulis(&self) -> Result<Vec<BinaryPauli>> {
        let mut out: Vec<BinaryPauli> = Vec::new();
        for op in self.h0.iter().chain(&self.terms) {
            let s = op.as_pauli().ok_or_else(|| Error::NotPurePauli("model has a dense term".into()))?;
            for p in s.paulis() {
                if !out.contains(p) {
                    out.push(*p);
                }
            }
        }
        Ok(out)
    }

    /// Every parameter multiplies exactly one Pauli and there is no `H0`.
    pub fn is_pure_pauli(&self) -> bool {
        self.h0.is_none() && self.terms.iter().all(|t| t.as_pauli().is_some_and(|s| s.len() == 1))
    }

    /// One independent parameter per support Pauli. Pure Pauli models are
    /// returned unchanged.
    pub fn over_parameterize(&self) -> Result<HamiltonianModel> {
        if self.is_pure_pauli() {
            return Ok(self.clone());
        }
        let n = self.n.ok_or_else(|| Error::NotPurePauli("model has a dense term".into()))?;
        let terms = self
            .support_paulis()?
            .into_iter()
            .map(|p| Ok((p.label(), PauliSum::new(n, vec![(1.0, p)])?)))
            .collect::<Result<Vec<_>>>()?;
        HamiltonianModel::from_pauli(n, None, terms)
    }
}
