use std::sync::OnceLock;

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, StateVector};

use super::PauliSum;

/// Relative tolerance for the trace of dense terms.
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
enum Repr {
    Pauli(PauliSum),
    Dense(ComplexMatrix),
}

/// A Hermitian, traceless operator stored either as a Pauli sum or densely.
/// The dense realization of a Pauli sum is built on first use and cached.
#[derive(Clone, Debug)]
pub struct Operator {
    repr: Repr,
    dense: OnceLock<ComplexMatrix>,
}

impl Operator {
    pub fn pauli(sum: PauliSum) -> Self {
        Operator { repr: Repr::Pauli(sum), dense: OnceLock::new() }
    }

    pub fn dense_matrix(m: ComplexMatrix) -> Result<Self> {
        linalg::check_hermitian(&m, linalg::HERMITIAN_TOL)?;
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let tr = m.trace();
        if tr.norm() > TRACE_TOL * scale * m.nrows() as f64 {
            return Err(Error::NotTraceless(format!("trace {tr}")));
        }
        Ok(Operator { repr: Repr::Dense(m), dense: OnceLock::new() })
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Pauli(s) => s.dim(),
            Repr::Dense(m) => m.nrows(),
        }
    }

    pub fn as_pauli(&self) -> Option<&PauliSum> {
        match &self.repr {
            Repr::Pauli(s) => Some(s),
            Repr::Dense(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Pauli(s) => s.is_empty(),
            Repr::Dense(m) => m.iter().all(|z| *z == C64::new(0.0, 0.0)),
        }
    }

    /// True when the computational-basis matrix has no imaginary entries.
    pub fn is_real(&self) -> bool {
        match &self.repr {
            Repr::Pauli(s) => s.is_real(),
            Repr::Dense(m) => m.iter().all(|z| z.im == 0.0),
        }
    }

    pub fn dense(&self) -> Result<&ComplexMatrix> {
        match &self.repr {
            Repr::Dense(m) => Ok(m),
            Repr::Pauli(s) => {
                if let Some(m) = self.dense.get() {
                    return Ok(m);
                }
                let m = s.dense()?;
                Ok(self.dense.get_or_init(|| m))
            }
        }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        match &self.repr {
            Repr::Pauli(s) => {
                let mut out = DVector::zeros(v.len());
                s.apply_into(v.as_slice(), out.as_mut_slice(), false);
                Ok(out)
            }
            Repr::Dense(m) => Ok(m * v),
        }
    }

    /// `W · self` for a `d × d` matrix `W` given column-major.
    pub(crate) fn right_multiply_into(&self, w: &[C64], out: &mut [C64]) -> Result<()> {
        let d = self.dim();
        match &self.repr {
            Repr::Pauli(s) => s.right_multiply_into(w, out),
            Repr::Dense(m) => {
                let wm = nalgebra::DMatrixView::from_slice(w, d, d);
                let mut om = nalgebra::DMatrixViewMut::from_slice(out, d, d);
                om.gemm(C64::new(1.0, 0.0), &wm, m, C64::new(0.0, 0.0));
            }
        }
        Ok(())
    }

    pub fn right_multiply(&self, w: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim();
        if w.nrows() != d || w.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: w.nrows() });
        }
        let mut out = ComplexMatrix::zeros(d, d);
        self.right_multiply_into(w.as_slice(), out.as_mut_slice())?;
        Ok(out)
    }
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        match (&self.repr, &other.repr) {
            (Repr::Pauli(a), Repr::Pauli(b)) => a == b,
            (Repr::Dense(a), Repr::Dense(b)) => a == b,
            _ => false,
        }
    }
}
