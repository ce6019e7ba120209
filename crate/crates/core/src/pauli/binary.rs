//! Phase-tracked Pauli operators in the symplectic `(z | x)` bit layout.
//!
//! Site `j` (0-based, leftmost character of a label) occupies bit `j` of both
//! masks. The operator represented is `i^phase * σ(z_0,x_0) ⊗ ... ⊗ σ(z_{n-1},x_{n-1})`
//! with `σ(0,0)=I`, `σ(0,1)=X`, `σ(1,1)=Y`, `σ(1,0)=Z`.
//!
//! Dense matrices use the usual Kronecker ordering, so site `j` corresponds to
//! bit `n-1-j` of a computational-basis index.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const MAX_SPINS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryPauli {
    n: usize,
    z: u64,
    x: u64,
    phase: u8,
}

/// Powers of `i`.
pub(crate) fn i_pow(k: u8) -> C64 {
    match k & 3 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn site_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SPINS {
        return Err(Error::SpinCount { n, max: MAX_SPINS });
    }
    Ok(())
}

impl BinaryPauli {
    pub fn identity(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(BinaryPauli { n, z: 0, x: 0, phase: 0 })
    }

    /// Builds an operator from raw site masks. Bits above `n` are rejected.
    pub fn from_masks(n: usize, z: u64, x: u64, phase: u8) -> Result<Self> {
        check_n(n)?;
        let m = site_mask(n);
        if z & !m != 0 || x & !m != 0 {
            return Err(Error::SpinCount { n, max: MAX_SPINS });
        }
        Ok(BinaryPauli { n, z, x, phase: phase & 3 })
    }

    /// Encodes a label over `{I,X,Y,Z}`; the result carries no phase.
    pub fn encode(label: &str) -> Result<Self> {
        let n = label.chars().count();
        check_n(n)?;
        let (mut z, mut x) = (0u64, 0u64);
        for (j, ch) in label.chars().enumerate() {
            let (zb, xb) = match ch {
                'I' => (0, 0),
                'X' => (0, 1),
                'Y' => (1, 1),
                'Z' => (1, 0),
                _ => return Err(Error::InvalidPauliChar { position: j, ch }),
            };
            z |= zb << j;
            x |= xb << j;
        }
        Ok(BinaryPauli { n, z, x, phase: 0 })
    }

    /// Single-site operator `op ∈ {X,Y,Z}` acting on `site` of an `n`-spin register.
    pub fn single(n: usize, site: usize, op: char) -> Result<Self> {
        check_n(n)?;
        let mut label = vec!['I'; n];
        if site >= n {
            return Err(Error::DimensionMismatch { expected: n, got: site });
        }
        label[site] = op;
        Self::encode(&label.into_iter().collect::<String>())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn z_bit(&self, site: usize) -> bool {
        (self.z >> site) & 1 == 1
    }

    pub fn x_bit(&self, site: usize) -> bool {
        (self.x >> site) & 1 == 1
    }

    pub fn is_identity(&self) -> bool {
        self.z == 0 && self.x == 0
    }

    /// Number of sites with a non-identity factor.
    pub fn weight(&self) -> u32 {
        (self.z | self.x).count_ones()
    }

    /// Same bits, phase dropped.
    pub fn unsigned(&self) -> Self {
        BinaryPauli { phase: 0, ..*self }
    }

    pub fn with_phase(&self, phase: u8) -> Self {
        BinaryPauli { phase: phase & 3, ..*self }
    }

    /// `(z | x)` packed into one word: z in bits `0..n`, x in bits `n..2n`.
    pub fn packed(&self) -> u128 {
        (self.z as u128) | ((self.x as u128) << self.n)
    }

    pub fn from_packed(n: usize, bits: u128) -> Result<Self> {
        check_n(n)?;
        let m = site_mask(n) as u128;
        if n < 64 && bits >> (2 * n) != 0 {
            return Err(Error::SpinCount { n, max: MAX_SPINS });
        }
        Ok(BinaryPauli { n, z: (bits & m) as u64, x: ((bits >> n) & m) as u64, phase: 0 })
    }

    /// Uppercase label without the phase.
    pub fn label(&self) -> String {
        (0..self.n)
            .map(|j| match (self.z_bit(j), self.x_bit(j)) {
                (false, false) => 'I',
                (false, true) => 'X',
                (true, true) => 'Y',
                (true, false) => 'Z',
            })
            .collect()
    }

    /// `"z|x"` with site 1 as the leftmost character of each half.
    pub fn to_binary_string(&self) -> String {
        let bits = |m: u64| -> String { (0..self.n).map(|j| if (m >> j) & 1 == 1 { '1' } else { '0' }).collect() };
        format!("{}|{}", bits(self.z), bits(self.x))
    }

    pub fn from_binary_string(s: &str) -> Result<Self> {
        let bad = || Error::InvalidBinaryString(s.to_string());
        let (zs, xs) = s.split_once('|').ok_or_else(bad)?;
        if zs.len() != xs.len() {
            return Err(bad());
        }
        let parse = |part: &str| -> Result<u64> {
            let mut m = 0u64;
            for (j, ch) in part.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m |= 1 << j,
                    _ => return Err(bad()),
                }
            }
            Ok(m)
        };
        let n = zs.chars().count();
        check_n(n)?;
        Ok(BinaryPauli { n, z: parse(zs)?, x: parse(xs)?, phase: 0 })
    }

    /// Exact matrix product `self · other`, phases included.
    pub fn mul(&self, other: &BinaryPauli) -> Result<BinaryPauli> {
        if self.n != other.n {
            return Err(Error::SpinMismatch { left: self.n, right: other.n });
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &BinaryPauli) -> BinaryPauli {
        let z = self.z ^ other.z;
        let x = self.x ^ other.x;
        // Per site: σ(z,x) = i^{zx} X^x Z^z, and Z^{z1} X^{x2} = (-1)^{z1 x2} X^{x2} Z^{z1}.
        let e = (self.z & self.x).count_ones()
            + (other.z & other.x).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 3 * (z & x).count_ones();
        let phase = ((e + self.phase as u32 + other.phase as u32) & 3) as u8;
        BinaryPauli { n: self.n, z, x, phase }
    }

    /// Hermitian conjugate: flips the sign of odd phases.
    pub fn adjoint(&self) -> BinaryPauli {
        BinaryPauli { phase: (4 - self.phase) & 3, ..*self }
    }

    /// True when the operators commute (symplectic product zero).
    pub fn commutes_with(&self, other: &BinaryPauli) -> bool {
        ((self.z & other.x).count_ones() + (self.x & other.z).count_ones()).is_multiple_of(2)
    }

    /// Site masks translated to computational-basis index bits.
    pub(crate) fn index_masks(&self) -> (usize, usize) {
        let rev = |m: u64| -> usize {
            let mut out = 0usize;
            for j in 0..self.n {
                if (m >> j) & 1 == 1 {
                    out |= 1 << (self.n - 1 - j);
                }
            }
            out
        };
        (rev(self.z), rev(self.x))
    }

    /// Global factor `i^{phase + |z∧x|}` of the `X^x Z^z` form.
    fn xz_prefactor(&self) -> C64 {
        i_pow(((self.phase as u32 + (self.z & self.x).count_ones()) & 3) as u8)
    }

    pub fn dense(&self) -> DMatrix<C64> {
        assert!(self.n <= 16, "dense Pauli matrices limited to 16 spins");
        let d = 1usize << self.n;
        let (zi, xi) = self.index_masks();
        let pre = self.xz_prefactor();
        let mut m = DMatrix::zeros(d, d);
        for col in 0..d {
            let sign = if (zi & col).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[(col ^ xi, col)] = pre * sign;
        }
        m
    }

    /// `P · v` without forming the matrix.
    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(v.len());
        self.apply_into(v.as_slice(), out.as_mut_slice(), C64::new(1.0, 0.0), false);
        out
    }

    /// `out (+)= scale · P · v` on raw slices of length `2^n`.
    pub(crate) fn apply_into(&self, v: &[C64], out: &mut [C64], scale: C64, accumulate: bool) {
        let (zi, xi) = self.index_masks();
        let pre = self.xz_prefactor() * scale;
        for (k, o) in out.iter_mut().enumerate() {
            let src = k ^ xi;
            let val = if (zi & src).count_ones() % 2 == 1 { -pre * v[src] } else { pre * v[src] };
            if accumulate {
                *o += val;
            } else {
                *o = val;
            }
        }
    }
}

impl fmt::Display for BinaryPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{}{}", prefix, self.label())
    }
}

impl FromStr for BinaryPauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        let offset = s.len() - rest.len();
        Self::encode(rest).map(|p| p.with_phase(phase)).map_err(|e| match e {
            Error::InvalidPauliChar { position, ch } => Error::InvalidPauliChar { position: position + offset, ch },
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DMatrix<C64>, b: &DMatrix<C64>) -> bool {
        (a - b).iter().all(|z| z.norm() < 1e-14)
    }

    #[test]
    fn encodes_single_site_operators() {
        let x = BinaryPauli::encode("X").unwrap();
        assert_eq!((x.z_mask(), x.x_mask(), x.phase_exp()), (0, 1, 0));
        let i = BinaryPauli::encode("I").unwrap();
        assert_eq!((i.z_mask(), i.x_mask(), i.phase_exp()), (0, 0, 0));
        let y = BinaryPauli::encode("Y").unwrap();
        assert_eq!((y.z_mask(), y.x_mask()), (1, 1));
    }

    #[test]
    fn encodes_tensor_labels() {
        let p = BinaryPauli::encode("ZX").unwrap();
        assert_eq!(p.to_binary_string(), "10|01");
        assert!(p.z_bit(0) && !p.z_bit(1));
        assert!(!p.x_bit(0) && p.x_bit(1));
    }

    #[test]
    fn rejects_bad_characters_with_position() {
        match BinaryPauli::encode("XQZ") {
            Err(Error::InvalidPauliChar { position, ch }) => {
                assert_eq!(position, 1);
                assert_eq!(ch, 'Q');
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(BinaryPauli::encode("").is_err());
        assert!(matches!("-iXA".parse::<BinaryPauli>(), Err(Error::InvalidPauliChar { position: 3, .. })));
    }

    #[test]
    fn x_times_y_is_i_z() {
        let x = BinaryPauli::encode("X").unwrap();
        let y = BinaryPauli::encode("Y").unwrap();
        let p = x.mul(&y).unwrap();
        assert_eq!(p.label(), "Z");
        assert_eq!(p.phase_exp(), 1);
        assert!(close(&(x.dense() * y.dense()), &p.dense()));
        // (0,1) xor (1,1) = (1,0)
        assert_eq!(p.to_binary_string(), "1|0");
    }

    #[test]
    fn squares_are_identity_up_to_sign() {
        for label in ["X", "Y", "Z", "XYZ", "ZZI"] {
            let p = BinaryPauli::encode(label).unwrap();
            let sq = p.mul(&p).unwrap();
            assert!(sq.is_identity());
            assert!(sq.phase_exp() == 0 || sq.phase_exp() == 2);
            let phased = p.with_phase(1);
            assert_eq!(phased.mul(&phased).unwrap().phase_exp(), 2);
        }
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let a = BinaryPauli::encode("X").unwrap();
        let b = BinaryPauli::encode("XX").unwrap();
        assert!(matches!(a.mul(&b), Err(Error::SpinMismatch { .. })));
    }

    #[test]
    fn binary_string_round_trip() {
        let p = BinaryPauli::encode("XYZI").unwrap();
        let s = p.to_binary_string();
        assert_eq!(s, "0110|1100");
        assert_eq!(BinaryPauli::from_binary_string(&s).unwrap(), p);
        assert!(BinaryPauli::from_binary_string("01|1").is_err());
        assert!(BinaryPauli::from_binary_string("0101").is_err());
    }

    #[test]
    fn display_parse_with_phase() {
        let p: BinaryPauli = "-iXZ".parse().unwrap();
        assert_eq!(p.phase_exp(), 3);
        assert_eq!(p.to_string(), "-iXZ");
        assert_eq!(p.adjoint().phase_exp(), 1);
    }

    #[test]
    fn apply_matches_dense() {
        let p: BinaryPauli = "iYXZ".parse().unwrap();
        let v = DVector::from_iterator(8, (0..8).map(|k| C64::new(k as f64, 1.0 - k as f64)));
        let dense = p.dense() * &v;
        assert!((dense - p.apply(&v)).norm() < 1e-13);
    }

    #[test]
    fn kron_ordering_site_one_is_most_significant() {
        let z1 = BinaryPauli::encode("ZI").unwrap().dense();
        // diag(1,1,-1,-1)
        assert_eq!(z1[(2, 2)], C64::new(-1.0, 0.0));
        assert_eq!(z1[(1, 1)], C64::new(1.0, 0.0));
    }

    #[test]
    fn packed_round_trip() {
        let p = BinaryPauli::encode("XZY").unwrap();
        assert_eq!(BinaryPauli::from_packed(3, p.packed()).unwrap(), p);
    }
}
