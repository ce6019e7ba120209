//! Enumeration of the subgroup generated by a set of Paulis, modulo phases.
//!
//! Both routines return the same canonical output: phase-free elements sorted
//! by their packed `(z | x)` word, identity first.

use std::collections::HashSet;

use crate::error::{Error, Result};

use super::BinaryPauli;

/// Default cap on the number of generators for Gray-code enumeration.
pub const DEFAULT_GRAY_CAP: usize = 30;

fn common_n(generators: &[BinaryPauli]) -> Result<Option<usize>> {
    let Some(first) = generators.first() else {
        return Ok(None);
    };
    if let Some(p) = generators.iter().find(|p| p.n() != first.n()) {
        return Err(Error::SpinMismatch { left: first.n(), right: p.n() });
    }
    Ok(Some(first.n()))
}

fn canonical(n: usize, set: HashSet<u128>) -> Vec<BinaryPauli> {
    let mut words: Vec<u128> = set.into_iter().collect();
    words.sort_unstable();
    words.into_iter().map(|w| BinaryPauli::from_packed(n, w).expect("packed word within 2n bits")).collect()
}

/// Walks all `2^ℓ` XOR combinations of the generators in Gray-code order,
/// one XOR per step. `cap` bounds `ℓ`.
///
/// An empty generator set has no spin count to attach the identity to, so it
/// yields an empty vector; use [`generate_group_layered_n`] to get `{I}`.
pub fn generate_group_graycode(generators: &[BinaryPauli], cap: usize) -> Result<Vec<BinaryPauli>> {
    let Some(n) = common_n(generators)? else {
        return Ok(vec![]);
    };
    let ell = generators.len();
    if ell > cap || ell >= 64 {
        return Err(Error::GeneratorCapExceeded { count: ell, cap });
    }
    let words: Vec<u128> = generators.iter().map(BinaryPauli::packed).collect();
    let mut seen: HashSet<u128> = HashSet::with_capacity(1 << ell.min(24));
    let mut acc = 0u128;
    seen.insert(acc);
    let gray = |j: u64| j ^ (j >> 1);
    for j in 1..(1u64 << ell) {
        let flip = (gray(j - 1) ^ gray(j)).trailing_zeros() as usize;
        acc ^= words[flip];
        seen.insert(acc);
    }
    Ok(canonical(n, seen))
}

/// Breadth-first closure: each layer multiplies the previous one by every
/// generator and keeps only words not seen before.
pub fn generate_group_layered(generators: &[BinaryPauli]) -> Result<Vec<BinaryPauli>> {
    match common_n(generators)? {
        None => Ok(vec![]),
        Some(n) => generate_group_layered_n(n, generators),
    }
}

pub fn generate_group_layered_n(n: usize, generators: &[BinaryPauli]) -> Result<Vec<BinaryPauli>> {
    if let Some(p) = generators.iter().find(|p| p.n() != n) {
        return Err(Error::SpinMismatch { left: n, right: p.n() });
    }
    BinaryPauli::identity(n)?;
    let words: Vec<u128> = generators.iter().map(BinaryPauli::packed).collect();
    let mut seen: HashSet<u128> = HashSet::new();
    seen.insert(0);
    let mut frontier = vec![0u128];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &w in &frontier {
            for &g in &words {
                let c = w ^ g;
                if seen.insert(c) {
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    Ok(canonical(n, seen))
}

/// Gray-code enumeration when the generator count is within `cap`, layered
/// closure otherwise.
pub fn generate_group(generators: &[BinaryPauli], cap: usize) -> Result<Vec<BinaryPauli>> {
    if generators.len() <= cap {
        generate_group_graycode(generators, cap)
    } else {
        generate_group_layered(generators)
    }
}

/// Pauli-count sufficiency test: fewer than `2n` distinct terms guarantees a
/// proper invariant subspace. `false` is inconclusive.
pub fn pauli_sufficiency_count(terms: &[BinaryPauli], n: usize) -> bool {
    let distinct: HashSet<u128> = terms.iter().map(BinaryPauli::packed).collect();
    distinct.len() < 2 * n
}

/// GF(2) rank test; exact for pure Pauli models.
pub fn pauli_sufficiency_rank(terms: &[BinaryPauli], n: usize) -> Result<bool> {
    let m = super::GF2Matrix::from_paulis(terms)?;
    Ok(m.rank() < 2 * n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(labels: &[&str]) -> Vec<BinaryPauli> {
        labels.iter().map(|l| BinaryPauli::encode(l).unwrap()).collect()
    }

    #[test]
    fn two_spin_example_has_eight_elements() {
        let g = ps(&["XI", "IX", "ZZ"]);
        let a = generate_group_graycode(&g, DEFAULT_GRAY_CAP).unwrap();
        let b = generate_group_layered(&g).unwrap();
        assert_eq!(a.len(), 8);
        assert_eq!(a, b);
        assert!(a[0].is_identity());
    }

    #[test]
    fn single_qubit_groups() {
        let a = generate_group_graycode(&ps(&["X"]), 30).unwrap();
        assert_eq!(a.iter().map(|p| p.label()).collect::<Vec<_>>(), vec!["I", "X"]);
        let full = generate_group_graycode(&ps(&["X", "Z"]), 30).unwrap();
        assert_eq!(full.len(), 4);
        assert_eq!(full, generate_group_layered(&ps(&["X", "Z"])).unwrap());
    }

    #[test]
    fn empty_generators_give_identity_when_n_is_known() {
        let g = generate_group_layered_n(3, &[]).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g[0].is_identity());
    }

    #[test]
    fn single_generator_has_order_two() {
        let g = generate_group_layered(&ps(&["XYZ"])).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let g = ps(&["XI", "IX", "ZZ"]);
        assert!(matches!(generate_group_graycode(&g, 2), Err(Error::GeneratorCapExceeded { count: 3, cap: 2 })));
        // The dispatcher falls back to the layered closure.
        assert_eq!(generate_group(&g, 2).unwrap().len(), 8);
    }

    #[test]
    fn sufficiency_rules() {
        let n = 4;
        let mut rtfim: Vec<String> = (0..n).map(|j| (0..n).map(|k| if k == j { 'X' } else { 'I' }).collect()).collect();
        for j in 0..n - 1 {
            rtfim.push((0..n).map(|k| if k == j || k == j + 1 { 'Z' } else { 'I' }).collect());
        }
        let terms: Vec<_> = rtfim.iter().map(|l| BinaryPauli::encode(l).unwrap()).collect();
        assert_eq!(terms.len(), 7);
        assert!(pauli_sufficiency_count(&terms, n));
        assert!(pauli_sufficiency_rank(&terms, n).unwrap());

        let full = ps(&["XI", "IX", "ZI", "IZ"]);
        assert!(!pauli_sufficiency_count(&full, 2));
        assert!(!pauli_sufficiency_rank(&full, 2).unwrap());
        let seven = ps(&["XI", "IX", "ZI", "IZ", "YI", "IY", "XX"]);
        assert!(!pauli_sufficiency_count(&seven, 2));

        let xs = ps(&["XII", "IXI", "IIX"]);
        assert!(pauli_sufficiency_rank(&xs, 3).unwrap());
        let ring = ps(&["XII", "IXI", "IIX", "ZZI", "IZZ", "ZIZ"]);
        assert!(!pauli_sufficiency_count(&ring, 3));
        assert!(pauli_sufficiency_rank(&ring, 3).unwrap());
    }
}
