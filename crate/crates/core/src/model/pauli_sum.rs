use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::pauli::BinaryPauli;

/// Largest spin count for which dense realizations are built.
pub const MAX_DENSE_SPINS: usize = 14;

/// Real linear combination of distinct, non-identity Pauli operators.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(f64, BinaryPauli)>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Result<Self> {
        BinaryPauli::identity(n)?;
        Ok(PauliSum { n, terms: Vec::new() })
    }

    /// Normalizes the input: signs `±1` in the Pauli phase are folded into the
    /// coefficient, duplicates are merged in first-occurrence order and zero
    /// coefficients dropped. Identity terms and imaginary phases are rejected.
    pub fn new(n: usize, terms: Vec<(f64, BinaryPauli)>) -> Result<Self> {
        let mut out = PauliSum::zero(n)?;
        for (c, p) in terms {
            if p.n() != n {
                return Err(Error::SpinMismatch { left: n, right: p.n() });
            }
            if !c.is_finite() {
                return Err(Error::InvalidModel(format!("non-finite coefficient on {p}")));
            }
            let c = match p.phase_exp() {
                0 => c,
                2 => -c,
                _ => return Err(Error::NotHermitian(c.abs())),
            };
            let p = p.unsigned();
            if p.is_identity() {
                if c != 0.0 {
                    return Err(Error::NotTraceless(format!("identity term with coefficient {c}")));
                }
                continue;
            }
            match out.terms.iter_mut().find(|(_, q)| *q == p) {
                Some((acc, _)) => *acc += c,
                None => out.terms.push((c, p)),
            }
        }
        out.terms.retain(|(c, _)| *c != 0.0);
        Ok(out)
    }

    pub fn from_labels(terms: &[(f64, &str)]) -> Result<Self> {
        let parsed: Vec<(f64, BinaryPauli)> =
            terms.iter().map(|(c, l)| Ok((*c, l.parse::<BinaryPauli>()?))).collect::<Result<_>>()?;
        let n = parsed
            .first()
            .map(|(_, p)| p.n())
            .ok_or_else(|| Error::InvalidModel("empty Pauli sum has no spin count".into()))?;
        PauliSum::new(n, parsed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn terms(&self) -> &[(f64, BinaryPauli)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn paulis(&self) -> impl Iterator<Item = &BinaryPauli> {
        self.terms.iter().map(|(_, p)| p)
    }

    pub fn scaled(&self, s: f64) -> PauliSum {
        PauliSum::new(self.n, self.terms.iter().map(|&(c, p)| (c * s, p)).collect())
            .expect("scaling preserves validity")
    }

    fn check_dense(&self) -> Result<()> {
        if self.n > MAX_DENSE_SPINS {
            return Err(Error::SpinCount { n: self.n, max: MAX_DENSE_SPINS });
        }
        Ok(())
    }

    /// Per-term data for index-space kernels: `(z index mask, x index mask,
    /// coefficient times prefactor)`.
    pub(crate) fn kernels(&self) -> Vec<(usize, usize, C64)> {
        self.terms
            .iter()
            .map(|&(c, p)| {
                let (zi, xi) = p.index_masks();
                let pre = crate::pauli::i_pow(((p.z_mask() & p.x_mask()).count_ones() & 3) as u8);
                (zi, xi, pre * c)
            })
            .collect()
    }

    /// Real matrix exactly when every term has an even number of `Y` factors.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, p)| (p.z_mask() & p.x_mask()).count_ones() % 2 == 0)
    }

    pub fn dense(&self) -> Result<ComplexMatrix> {
        self.check_dense()?;
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (zi, xi, s) in self.kernels() {
            for col in 0..d {
                let v = if (zi & col).count_ones() & 1 == 1 { -s } else { s };
                m[(col ^ xi, col)] += v;
            }
        }
        Ok(m)
    }

    /// `out (+)= H · v`.
    pub fn apply_into(&self, v: &[C64], out: &mut [C64], accumulate: bool) {
        if !accumulate {
            out.fill(C64::new(0.0, 0.0));
        }
        for (zi, xi, s) in self.kernels() {
            for (k, o) in out.iter_mut().enumerate() {
                let src = k ^ xi;
                if (zi & src).count_ones() & 1 == 1 {
                    *o -= s * v[src];
                } else {
                    *o += s * v[src];
                }
            }
        }
    }

    /// `W · H` for column-major `w` with `d` rows, written into `out`.
    pub(crate) fn right_multiply_into(&self, w: &[C64], out: &mut [C64]) {
        let d = self.dim();
        out.fill(C64::new(0.0, 0.0));
        for (zi, xi, s) in self.kernels() {
            for j in 0..d {
                let f = if (zi & j).count_ones() & 1 == 1 { -s } else { s };
                let k = j ^ xi;
                let src = &w[k * d..(k + 1) * d];
                crate::linalg::axpy(f, src, &mut out[j * d..(j + 1) * d]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_folds_signs() {
        let s = PauliSum::from_labels(&[(1.0, "ZZ"), (1.0, "ZZ"), (2.0, "-XI"), (0.0, "IX")]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.terms()[0].0, 2.0);
        assert_eq!(s.terms()[1], (-2.0, BinaryPauli::encode("XI").unwrap()));
        let gone = PauliSum::from_labels(&[(1.0, "XX"), (-1.0, "XX")]).unwrap();
        assert!(gone.is_empty());
    }

    #[test]
    fn rejects_identity_and_imaginary_phase() {
        assert!(matches!(PauliSum::from_labels(&[(1.0, "II")]), Err(Error::NotTraceless(_))));
        assert!(matches!(PauliSum::from_labels(&[(1.0, "iZ")]), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn dense_matches_pauli_sum() {
        let s = PauliSum::from_labels(&[(0.5, "XYZ"), (-1.5, "ZIY"), (2.0, "IYI")]).unwrap();
        let mut oracle = DMatrix::zeros(8, 8);
        for &(c, p) in s.terms() {
            oracle += p.dense() * C64::new(c, 0.0);
        }
        assert!((s.dense().unwrap() - &oracle).norm() < 1e-14);
        assert!((&oracle - oracle.adjoint()).norm() < 1e-14);
    }

    #[test]
    fn kernels_agree_with_dense() {
        let s = PauliSum::from_labels(&[(0.3, "XY"), (1.1, "ZZ"), (-0.7, "YI")]).unwrap();
        let h = s.dense().unwrap();
        let w = DMatrix::from_fn(4, 4, |i, j| C64::new(i as f64 - 0.5 * j as f64, (i * j) as f64 * 0.1));
        let mut out = vec![C64::new(0.0, 0.0); 16];
        s.right_multiply_into(w.as_slice(), &mut out);
        assert!((DMatrix::from_column_slice(4, 4, &out) - &w * &h).norm() < 1e-13);
        let v: Vec<C64> = (0..4).map(|k| C64::new(k as f64, 1.0)).collect();
        let mut hv = vec![C64::new(0.0, 0.0); 4];
        s.apply_into(&v, &mut hv, false);
        let expect = &h * nalgebra::DVector::from_vec(v);
        assert!((nalgebra::DVector::from_vec(hv) - expect).norm() < 1e-13);
    }
}
