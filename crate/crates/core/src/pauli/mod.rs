//! Symbolic algebra of the n-spin Pauli group in the binary-vector form.

mod binary;
mod gf2;
mod group;

pub(crate) use binary::i_pow;
pub use binary::{BinaryPauli, MAX_SPINS};
pub use gf2::{gf2_rank, GF2Matrix};
pub use group::{
    generate_group, generate_group_graycode, generate_group_layered, generate_group_layered_n, pauli_sufficiency_count,
    pauli_sufficiency_rank, DEFAULT_GRAY_CAP,
};

/// Parses a label over `{I,X,Y,Z}` (phase prefixes `+`, `-`, `i`, `-i` accepted).
pub fn encode_pauli(label: &str) -> crate::Result<BinaryPauli> {
    label.parse()
}

pub fn pauli_product(a: &BinaryPauli, b: &BinaryPauli) -> crate::Result<BinaryPauli> {
    a.mul(b)
}
