//! Orbit selection for Pauli models from product states, driven entirely by
//! Pauli expectations; `d`-dimensional vectors appear only when `Φ` is built.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::burnside::BurnsideBasis;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, IncrementalGram, GRAM_DET_TOL};
use crate::model::{HamiltonianModel, ProductState};
use crate::pauli::BinaryPauli;

use super::{MapSource, ReducedModel, ReductionMap};

/// `<ψ|P|ψ>` for a product state, including the phase of `P`.
pub fn pauli_expectation(p: &BinaryPauli, state: &ProductState) -> Result<C64> {
    state.expectation(p)
}

/// Result of the Gramian pass: admitted basis indices and the Cholesky factor
/// of their Gramian.
#[derive(Clone, Debug)]
pub struct GramianSelection {
    pub selected: Vec<usize>,
    pub factor: IncrementalGram,
}

impl GramianSelection {
    pub fn r(&self) -> usize {
        self.selected.len()
    }
}

fn pauli_basis(basis: &BurnsideBasis) -> Result<&[BinaryPauli]> {
    basis.paulis().ok_or_else(|| Error::NotPurePauli("Gramian selection needs a Pauli-mode basis".into()))
}

/// Scans the basis in order and admits `B_k ψ0` whenever the Gramian of the
/// admitted set stays nonsingular (determinant ratio above `det_tol`).
pub fn gramian_indices(basis: &BurnsideBasis, state: &ProductState, det_tol: f64) -> Result<GramianSelection> {
    if !(det_tol > 0.0) {
        return Err(Error::InvalidTolerance(det_tol));
    }
    let paulis = pauli_basis(basis)?;
    let mut chosen: Vec<BinaryPauli> = Vec::new();
    let mut selected = Vec::new();
    let mut factor = IncrementalGram::new();
    let mut overlaps = Vec::new();
    'scan: for (k, b) in paulis.iter().enumerate() {
        let self_overlap = pauli_expectation(&b.mul(b)?, state)?.re;
        if self_overlap <= 0.0 {
            continue;
        }
        overlaps.clear();
        for a in &chosen {
            let g = pauli_expectation(&a.adjoint().mul(b)?, state)?;
            // Orbit vectors of unit norm that are parallel are rejected at once.
            if g.norm() >= (1.0 - 1e-12) * self_overlap.sqrt() {
                continue 'scan;
            }
            overlaps.push(g);
        }
        if factor.try_admit(&overlaps, self_overlap, det_tol) {
            chosen.push(*b);
            selected.push(k);
        }
    }
    Ok(GramianSelection { selected, factor })
}

/// `Φ = V L^{-†}` with `V = [B_k ψ0]` over the admitted indices and `G = L L†`.
pub fn gramian_select(basis: &BurnsideBasis, state: &ProductState) -> Result<ReductionMap> {
    let sel = gramian_indices(basis, state, GRAM_DET_TOL)?;
    let paulis = pauli_basis(basis)?;
    let psi = state.to_vector();
    let cols: Vec<_> = sel.selected.iter().map(|&k| paulis[k].apply(&psi)).collect();
    let v = DMatrix::from_columns(&cols);
    let linv_adj = inverse_lower(&sel.factor.factor())?.adjoint();
    Ok(ReductionMap::new(v * linv_adj, MapSource::Gramian, sel.selected))
}

fn inverse_lower(l: &ComplexMatrix) -> Result<ComplexMatrix> {
    let r = l.nrows();
    l.solve_lower_triangular(&DMatrix::identity(r, r))
        .ok_or_else(|| Error::InvalidModel("singular Gramian factor".into()))
}

/// Reduced model in the Gramian basis, assembled from expectations
/// `<ψ0|B_k P B_l|ψ0>`: `Ĥ = L^{-1} (V† H V) L^{-†}`, `v0 = L^{-1} V† ψ0`.
pub fn reduced_model_pauli(
    model: &HamiltonianModel,
    basis: &BurnsideBasis,
    selected: &[usize],
    state: &ProductState,
) -> Result<ReducedModel> {
    let paulis = pauli_basis(basis)?;
    let bs: Vec<BinaryPauli> = selected
        .iter()
        .map(|&k| paulis.get(k).copied().ok_or(Error::DimensionMismatch { expected: paulis.len(), got: k }))
        .collect::<Result<_>>()?;
    let r = bs.len();
    let sandwich = |mid: Option<&BinaryPauli>| -> Result<ComplexMatrix> {
        let mut m = DMatrix::zeros(r, r);
        for (i, a) in bs.iter().enumerate() {
            let left = match mid {
                Some(p) => a.adjoint().mul(p)?,
                None => a.adjoint(),
            };
            for (j, b) in bs.iter().enumerate() {
                m[(i, j)] = pauli_expectation(&left.mul(b)?, state)?;
            }
        }
        Ok(m)
    };
    let gram = sandwich(None)?;
    let l = gram.cholesky().ok_or_else(|| Error::InvalidModel("selected orbit vectors are dependent".into()))?.l();
    let linv = inverse_lower(&l)?;
    let project = |op: &crate::model::Operator| -> Result<ComplexMatrix> {
        let sum = op.as_pauli().ok_or_else(|| Error::NotPurePauli("model has a dense term".into()))?;
        let mut acc = DMatrix::zeros(r, r);
        for (c, p) in sum.terms() {
            acc += sandwich(Some(p))? * C64::new(*c, 0.0);
        }
        Ok(&linv * acc * linv.adjoint())
    };
    let h0 = model.h0().map(project).transpose()?;
    let terms = model.terms().iter().map(project).collect::<Result<Vec<_>>>()?;
    let vpsi = nalgebra::DVector::from_iterator(
        r,
        bs.iter().map(|b| pauli_expectation(&b.adjoint(), state)).collect::<Result<Vec<_>>>()?,
    );
    Ok(ReducedModel { r, labels: model.labels().to_vec(), h0, terms, v0: &linv * vpsi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burnside::burnside_basis_pauli;
    use crate::model::{random_tfim_open, PauliSum};

    #[test]
    fn expectation_examples() {
        let s: ProductState = "000".parse().unwrap();
        let z1: BinaryPauli = "ZII".parse().unwrap();
        let x1: BinaryPauli = "XII".parse().unwrap();
        assert_eq!(pauli_expectation(&z1, &s).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(pauli_expectation(&x1, &s).unwrap(), C64::new(0.0, 0.0));
        let s: ProductState = "++0".parse().unwrap();
        let p: BinaryPauli = "XXZ".parse().unwrap();
        let v = s.to_vector();
        let oracle = v.dotc(&p.apply(&v));
        assert!((pauli_expectation(&p, &s).unwrap() - oracle).norm() < 1e-14);
    }

    #[test]
    fn random_tfim_half_space() {
        for n in 2..=5 {
            let b = burnside_basis_pauli(&random_tfim_open(n).unwrap()).unwrap();
            let s: ProductState = "+".repeat(n).parse().unwrap();
            let map = gramian_select(&b, &s).unwrap();
            assert_eq!(map.r(), 1 << (n - 1));
            assert!(map.orthonormality_error() < 1e-10);
        }
    }

    #[test]
    fn stabilized_state_gives_rank_one() {
        let m = HamiltonianModel::from_pauli(
            2,
            None,
            vec![
                ("a".into(), PauliSum::from_labels(&[(1.0, "ZI")]).unwrap()),
                ("b".into(), PauliSum::from_labels(&[(1.0, "IZ")]).unwrap()),
            ],
        )
        .unwrap();
        let b = burnside_basis_pauli(&m).unwrap();
        let map = gramian_select(&b, &"00".parse().unwrap()).unwrap();
        assert_eq!(map.r(), 1);
    }

    #[test]
    fn single_spin_hand_example() {
        let m =
            HamiltonianModel::from_pauli(1, None, vec![("l".into(), PauliSum::from_labels(&[(1.0, "Z")]).unwrap())])
                .unwrap();
        let b = burnside_basis_pauli(&m).unwrap();
        let s: ProductState = "+".parse().unwrap();
        let sel = gramian_indices(&b, &s, GRAM_DET_TOL).unwrap();
        let rm = reduced_model_pauli(&m, &b, &sel.selected, &s).unwrap();
        let expect =
            DMatrix::from_row_slice(2, 2, &[C64::new(0., 0.), C64::new(1., 0.), C64::new(1., 0.), C64::new(0., 0.)]);
        assert!((&rm.terms[0] - expect).norm() < 1e-14);
        assert!((rm.v0[0] - C64::new(1.0, 0.0)).norm() < 1e-14);
    }
}
