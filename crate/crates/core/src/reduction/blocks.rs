//! Orbit dimensions for algebras of the form `⊕_k Mat_{q_k} ⊗ 1_{j_k}`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, ComplexMatrix, StateVector};

/// Blocks `(q_k, j_k)`: an irreducible `q_k`-dimensional action repeated
/// `j_k` times, laid out consecutively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    blocks: Vec<(usize, usize)>,
}

impl BlockSpec {
    pub fn new(blocks: Vec<(usize, usize)>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(|&(q, j)| q == 0 || j == 0) {
            return Err(Error::InvalidBlocks(format!("{blocks:?}")));
        }
        Ok(BlockSpec { blocks })
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|&(q, j)| q * j).sum()
    }
}

/// `Σ_k q_k · rank(M_k)`, where the columns of the `q_k × j_k` matrix `M_k`
/// are the consecutive length-`q_k` chunks of `nu` inside block `k`.
pub fn predicted_orbit_dim(blocks: &BlockSpec, nu: &StateVector, tol: f64) -> Result<usize> {
    if nu.len() != blocks.dim() {
        return Err(Error::DimensionMismatch { expected: blocks.dim(), got: nu.len() });
    }
    let mut offset = 0;
    let mut total = 0;
    for &(q, j) in blocks.blocks() {
        let chunks: Vec<StateVector> = (0..j).map(|a| nu.rows(offset + a * q, q).into_owned()).collect();
        offset += q * j;
        if chunks.iter().all(|c| c.norm() == 0.0) {
            continue;
        }
        total += q * numeric_rank(&chunks, tol)?.rank;
    }
    Ok(total)
}

/// Two random Hermitian generators per block, each repeated `j_k` times along
/// the diagonal. Almost surely they generate `⊕_k Mat_{q_k} ⊗ 1_{j_k}`.
pub fn synthetic_block_generators(blocks: &BlockSpec, seed: u64) -> Vec<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = blocks.dim();
    let mut gens = vec![DMatrix::zeros(d, d), DMatrix::zeros(d, d)];
    let mut offset = 0;
    for &(q, j) in blocks.blocks() {
        for g in gens.iter_mut() {
            let a = DMatrix::from_fn(q, q, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let h = (&a + a.adjoint()).scale(0.5);
            for copy in 0..j {
                let s = offset + copy * q;
                g.view_mut((s, s), (q, q)).copy_from(&h);
            }
        }
        offset += q * j;
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burnside::{burnside_basis_dense, BurnsideOptions};
    use crate::reduction::orbit_basis_default;
    use nalgebra::DVector;

    #[test]
    fn trivial_cases() {
        let single = BlockSpec::new(vec![(4, 1)]).unwrap();
        let nu = DVector::from_element(4, C64::new(0.5, 0.0));
        assert_eq!(predicted_orbit_dim(&single, &nu, 1e-9).unwrap(), 4);
        let two = BlockSpec::new(vec![(2, 1), (3, 1)]).unwrap();
        let mut nu = DVector::zeros(5);
        nu[0] = C64::new(1.0, 0.0);
        assert_eq!(predicted_orbit_dim(&two, &nu, 1e-9).unwrap(), 2);
        assert!(BlockSpec::new(vec![(0, 1)]).is_err());
    }

    #[test]
    fn mat2_tensor_id2_plus_mat3() {
        let spec = BlockSpec::new(vec![(2, 2), (3, 1)]).unwrap();
        let gens = synthetic_block_generators(&spec, 1);
        let basis = burnside_basis_dense(&gens, &BurnsideOptions::default()).unwrap();
        assert_eq!(basis.size(), 4 + 9);
        // chunks of the first block are parallel: rank 1 there
        let raw = [1.0, 2.0, 2.0, 4.0, 0.3, -0.1, 0.7];
        let nu = DVector::from_iterator(7, raw.iter().map(|&x| C64::new(x, 0.0))).normalize();
        let predicted = predicted_orbit_dim(&spec, &nu, 1e-9).unwrap();
        assert_eq!(predicted, 2 + 3);
        assert_eq!(orbit_basis_default(&basis, &nu).unwrap().r(), predicted);
    }
}
