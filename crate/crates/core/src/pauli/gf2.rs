use crate::error::{Error, Result};

use super::BinaryPauli;

/// Dense binary matrix with rows packed into `u128` words (up to 128 columns).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GF2Matrix {
    cols: usize,
    rows: Vec<u128>,
}

impl GF2Matrix {
    pub fn new(cols: usize, rows: Vec<u128>) -> Result<Self> {
        if cols > 128 {
            return Err(Error::DimensionMismatch { expected: 128, got: cols });
        }
        let mask = if cols == 128 { u128::MAX } else { (1u128 << cols) - 1 };
        if rows.iter().any(|r| r & !mask != 0) {
            return Err(Error::DimensionMismatch { expected: cols, got: 128 });
        }
        Ok(GF2Matrix { cols, rows })
    }

    /// Rows are the symplectic images `(z | x)` of the given operators.
    pub fn from_paulis(paulis: &[BinaryPauli]) -> Result<Self> {
        let n = match paulis.first() {
            Some(p) => p.n(),
            None => return Ok(GF2Matrix { cols: 0, rows: vec![] }),
        };
        if let Some(p) = paulis.iter().find(|p| p.n() != n) {
            return Err(Error::SpinMismatch { left: n, right: p.n() });
        }
        GF2Matrix::new(2 * n, paulis.iter().map(BinaryPauli::packed).collect())
    }

    pub fn identity(size: usize) -> Result<Self> {
        GF2Matrix::new(size, (0..size).map(|i| 1u128 << i).collect())
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    /// Rank over Z2 by Gaussian elimination on packed rows.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let bit = 1u128 << col;
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let p = rows[rank];
            for r in rows.iter_mut().skip(rank + 1) {
                if *r & bit != 0 {
                    *r ^= p;
                }
            }
            rank += 1;
        }
        rank
    }
}

pub fn gf2_rank(m: &GF2Matrix) -> usize {
    m.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_zero() {
        assert_eq!(GF2Matrix::identity(6).unwrap().rank(), 6);
        assert_eq!(GF2Matrix::new(6, vec![0; 6]).unwrap().rank(), 0);
        assert_eq!(GF2Matrix::new(6, vec![]).unwrap().rank(), 0);
    }

    #[test]
    fn tfim_terms_n3() {
        let labels = ["XII", "IXI", "IIX", "ZZI", "IZZ"];
        let ps: Vec<_> = labels.iter().map(|l| BinaryPauli::encode(l).unwrap()).collect();
        assert_eq!(GF2Matrix::from_paulis(&ps).unwrap().rank(), 5);
        let mut ring = ps.clone();
        ring.push(BinaryPauli::encode("ZIZ").unwrap());
        assert_eq!(GF2Matrix::from_paulis(&ring).unwrap().rank(), 5);
    }

    #[test]
    fn rejects_out_of_range_bits() {
        assert!(GF2Matrix::new(3, vec![0b1000]).is_err());
        assert!(GF2Matrix::new(129, vec![]).is_err());
    }
}
