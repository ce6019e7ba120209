//! Independent oracles and generators shared by the property tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use qmor::linalg::{ComplexMatrix, StateVector};
use qmor::model::{HamiltonianModel, PauliSum};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn sigma(ch: char) -> ComplexMatrix {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match ch {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad Pauli character {ch}"),
    }
}

/// Site 1 is the leftmost Kronecker factor.
pub fn kron_label(label: &str) -> ComplexMatrix {
    label.chars().fold(DMatrix::identity(1, 1), |acc, ch| acc.kronecker(&sigma(ch)))
}

pub fn i_pow(k: u8) -> C64 {
    [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][(k % 4) as usize]
}

pub fn dense_sum(n: usize, terms: &[(f64, String)]) -> ComplexMatrix {
    let d = 1 << n;
    terms.iter().fold(DMatrix::zeros(d, d), |acc, (w, l)| acc + kron_label(l) * c(*w, 0.0))
}

pub fn label(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n).prop_map(|v| v.into_iter().collect())
}

pub fn non_identity_label(n: usize) -> impl Strategy<Value = String> {
    label(n).prop_filter("identity", |l| l.chars().any(|ch| ch != 'I'))
}

/// Terms with distinct labels and coefficients bounded away from zero.
pub fn pauli_terms(n: usize, max_terms: usize) -> impl Strategy<Value = Vec<(f64, String)>> {
    let coeff = prop_oneof![-2.0..-0.2f64, 0.2..2.0f64];
    proptest::collection::vec((coeff, non_identity_label(n)), 1..=max_terms).prop_map(|mut v| {
        v.sort_by(|a, b| a.1.cmp(&b.1));
        v.dedup_by(|a, b| a.1 == b.1);
        v
    })
}

/// One parameter per term.
pub fn pure_model(n: usize, terms: &[(f64, String)]) -> HamiltonianModel {
    let terms = terms
        .iter()
        .enumerate()
        .map(|(k, (w, l))| (format!("p{k}"), PauliSum::from_labels(&[(*w, l.as_str())]).unwrap()))
        .collect();
    HamiltonianModel::from_pauli(n, None, terms).unwrap()
}

pub fn product_label(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop::sample::select(vec!['0', '1', '+', '-']), n).prop_map(|v| v.into_iter().collect())
}

pub fn complex_vec(dim: usize) -> impl Strategy<Value = StateVector> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim)
        .prop_map(move |v| StateVector::from_iterator(dim, v.into_iter().map(|(a, b)| c(a, b))))
}

pub fn unit_vec(dim: usize) -> impl Strategy<Value = StateVector> {
    complex_vec(dim).prop_filter("zero", |v| v.norm() > 1e-3).prop_map(|v| {
        let n = v.norm();
        v / c(n, 0.0)
    })
}

pub fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |v| {
        let a = DMatrix::from_iterator(dim, dim, v.into_iter().map(|(x, y)| c(x, y)));
        (&a + a.adjoint()) * c(0.5, 0.0)
    })
}

/// Unitary from the QR factorization of a random complex matrix.
pub fn unitary(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_filter_map("singular", move |v| {
        let a = DMatrix::from_iterator(dim, dim, v.into_iter().map(|(x, y)| c(x, y)));
        (a.clone().determinant().norm() > 1e-3).then(|| a.qr().q())
    })
}

/// Orthonormal basis of the column space by Gram-Schmidt that always takes
/// the column with the largest remaining residual, projecting twice. Stops
/// once every residual is at most `rel_tol` times the largest input norm.
/// (nalgebra's complex SVD is not reliable on rank-deficient inputs.)
pub fn pivoted_range(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    let mut rest: Vec<StateVector> = m.column_iter().map(|c| c.into_owned()).collect();
    let scale = rest.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut basis: Vec<StateVector> = Vec::new();
    while !rest.is_empty() && scale > 0.0 {
        let (k, best) =
            rest.iter().enumerate().map(|(k, v)| (k, v.norm())).fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        if best <= rel_tol * scale {
            break;
        }
        let q = rest.swap_remove(k) / c(best, 0.0);
        for _ in 0..2 {
            for v in rest.iter_mut() {
                let overlap = q.dotc(v);
                *v -= &q * overlap;
            }
        }
        basis.push(q);
    }
    if basis.is_empty() {
        return ComplexMatrix::zeros(m.nrows(), 0);
    }
    ComplexMatrix::from_columns(&basis)
}

pub fn pivoted_rank(m: &ComplexMatrix, rel_tol: f64) -> usize {
    pivoted_range(m, rel_tol).ncols()
}

pub fn hcat(cols: &[StateVector]) -> ComplexMatrix {
    ComplexMatrix::from_columns(cols)
}

/// Smallest subspace containing `psi` and invariant under every generator,
/// by repeated application and pivoted orthogonalization.
pub fn invariant_closure(generators: &[ComplexMatrix], psi: &StateVector) -> ComplexMatrix {
    let mut basis = pivoted_range(&hcat(std::slice::from_ref(psi)), 1e-10);
    loop {
        let mut cols: Vec<StateVector> = basis.column_iter().map(|c| c.into_owned()).collect();
        for g in generators {
            for j in 0..basis.ncols() {
                cols.push(g * basis.column(j));
            }
        }
        let next = pivoted_range(&hcat(&cols), 1e-10);
        if next.ncols() == basis.ncols() {
            return basis;
        }
        basis = next;
    }
}

pub fn projector(phi: &ComplexMatrix) -> ComplexMatrix {
    phi * phi.adjoint()
}

/// Rank of `{H^k ψ : 0 ≤ k < d}` with each power normalized.
pub fn krylov_rank(h: &ComplexMatrix, psi: &StateVector, rel_tol: f64) -> usize {
    let d = psi.len();
    let mut cols = vec![psi.clone()];
    for _ in 1..d {
        let next = h * cols.last().unwrap();
        let n = next.norm();
        if n == 0.0 {
            break;
        }
        cols.push(next / c(n, 0.0));
    }
    pivoted_rank(&hcat(&cols), rel_tol)
}
