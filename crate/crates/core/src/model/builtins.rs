use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::BinaryPauli;

use super::{HamiltonianModel, PauliSum};

fn single_site_sum(n: usize, op: char, coeff: f64) -> Result<PauliSum> {
    let terms = (0..n).map(|j| Ok((coeff, BinaryPauli::single(n, j, op)?))).collect::<Result<Vec<_>>>()?;
    PauliSum::new(n, terms)
}

fn zz(n: usize, a: usize, b: usize) -> Result<BinaryPauli> {
    BinaryPauli::single(n, a, 'Z')?.mul(&BinaryPauli::single(n, b, 'Z')?)
}

/// `Σ_j P_j` for a single-site operator `P` in `X`, `Y`, `Z`.
pub fn net_magnetization(n: usize, axis: char) -> Result<PauliSum> {
    single_site_sum(n, axis, 1.0)
}

/// `λx Σ X_j + λy Σ Y_j + λz Σ Z_j` with `λ = (λx, λy, λz)`.
pub fn collective_rotation(n: usize) -> Result<HamiltonianModel> {
    let terms = [('X', "x"), ('Y', "y"), ('Z', "z")]
        .into_iter()
        .map(|(op, l)| Ok((l.to_string(), single_site_sum(n, op, 1.0)?)))
        .collect::<Result<Vec<_>>>()?;
    HamiltonianModel::from_pauli(n, None, terms)
}

/// `Σ Z_j + λx Σ X_j + λy Σ Y_j`: the collective model with a fixed field.
pub fn collective_with_z_field(n: usize) -> Result<HamiltonianModel> {
    let terms =
        vec![("x".to_string(), single_site_sum(n, 'X', 1.0)?), ("y".to_string(), single_site_sum(n, 'Y', 1.0)?)];
    HamiltonianModel::from_pauli(n, Some(single_site_sum(n, 'Z', 1.0)?), terms)
}

/// `-B Σ X_j - J Σ Z_j Z_{j+1}` on a ring, `λ = (B, J)`. For two spins the
/// bond and the ring closure coincide and merge into one weight-2 term.
pub fn tfim_periodic(n: usize) -> Result<HamiltonianModel> {
    if n < 2 {
        return Err(Error::InvalidModel("periodic Ising chain needs at least 2 spins".into()));
    }
    let bonds = (0..n).map(|j| Ok((-1.0, zz(n, j, (j + 1) % n)?))).collect::<Result<Vec<_>>>()?;
    let terms = vec![("B".to_string(), single_site_sum(n, 'X', -1.0)?), ("J".to_string(), PauliSum::new(n, bonds)?)];
    HamiltonianModel::from_pauli(n, None, terms)
}

/// `Σ B_j X_j + Σ J_j Z_j Z_{j+1}` with open ends; parameters
/// `(B_1..B_n, J_1..J_{n-1})`.
pub fn random_tfim_open(n: usize) -> Result<HamiltonianModel> {
    let mut terms = Vec::with_capacity(2 * n - 1);
    for j in 0..n {
        terms.push((format!("B{}", j + 1), PauliSum::new(n, vec![(1.0, BinaryPauli::single(n, j, 'X')?)])?));
    }
    for j in 0..n.saturating_sub(1) {
        terms.push((format!("J{}", j + 1), PauliSum::new(n, vec![(1.0, zz(n, j, j + 1)?)])?));
    }
    HamiltonianModel::from_pauli(n, None, terms)
}

/// Named built-in models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Collective,
    Tfim,
    RandomTfim,
}

impl Builtin {
    pub fn build(self, n: usize) -> Result<HamiltonianModel> {
        match self {
            Builtin::Collective => collective_rotation(n),
            Builtin::Tfim => tfim_periodic(n),
            Builtin::RandomTfim => random_tfim_open(n),
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collective" => Ok(Builtin::Collective),
            "tfim" => Ok(Builtin::Tfim),
            "random-tfim" => Ok(Builtin::RandomTfim),
            other => {
                Err(Error::InvalidModel(format!("unknown builtin {other:?}, expected collective, tfim or random-tfim")))
            }
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Builtin::Collective => "collective",
            Builtin::Tfim => "tfim",
            Builtin::RandomTfim => "random-tfim",
        })
    }
}
