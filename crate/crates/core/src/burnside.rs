//! Bases of the matrix algebra generated by a model's coefficient operators,
//! and the reducibility certificate `dim A < d²`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, BlockedBasis, ComplexMatrix, OrthoBasis, StateVector};
use crate::model::{HamiltonianModel, Operator};
use crate::pauli::{generate_group, gf2_rank, pauli_sufficiency_count, BinaryPauli, GF2Matrix, DEFAULT_GRAY_CAP};

/// Span-membership threshold for unit-norm monomials.
pub const DEFAULT_SPAN_TOL: f64 = 1e-9;
/// Cap on raw monomials enumerated by the word-length-bound strategy.
pub const DEFAULT_MONOMIAL_CAP: usize = 20_000;
/// Largest dimension the certificate will attack with dense arithmetic.
pub const DEFAULT_MAX_DENSE_DIM: usize = 256;

/// `⌈(d² + 2) / 3⌉`: word length after which no new monomials can appear.
pub fn paz_bound(d: usize) -> usize {
    (d * d + 2).div_ceil(3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Extend only admitted monomials, stop at the first layer adding nothing.
    SpanCheck,
    /// Enumerate every word up to the length bound, then filter.
    PazBound,
}

#[derive(Clone, Copy, Debug)]
pub struct BurnsideOptions {
    pub tol: f64,
    pub strategy: Strategy,
    pub monomial_cap: usize,
}

impl Default for BurnsideOptions {
    fn default() -> Self {
        BurnsideOptions { tol: DEFAULT_SPAN_TOL, strategy: Strategy::SpanCheck, monomial_cap: DEFAULT_MONOMIAL_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisMode {
    Dense,
    Pauli,
}

#[derive(Clone, Debug)]
pub enum BasisElements {
    /// Monomials scaled to unit Frobenius norm.
    Dense(Vec<ComplexMatrix>),
    /// Phase-free group elements in canonical order.
    Pauli(Vec<BinaryPauli>),
}

#[derive(Clone, Debug)]
pub struct BurnsideBasis {
    pub elements: BasisElements,
    /// Coefficient-index words of the dense monomials (empty in Pauli mode).
    pub words: Vec<Vec<usize>>,
    pub layers_used: usize,
    dim: usize,
}

impl BurnsideBasis {
    pub fn size(&self) -> usize {
        match &self.elements {
            BasisElements::Dense(m) => m.len(),
            BasisElements::Pauli(p) => p.len(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> BasisMode {
        match self.elements {
            BasisElements::Dense(_) => BasisMode::Dense,
            BasisElements::Pauli(_) => BasisMode::Pauli,
        }
    }

    pub fn paulis(&self) -> Option<&[BinaryPauli]> {
        match &self.elements {
            BasisElements::Pauli(p) => Some(p),
            BasisElements::Dense(_) => None,
        }
    }

    pub fn matrices(&self) -> Option<&[ComplexMatrix]> {
        match &self.elements {
            BasisElements::Dense(m) => Some(m),
            BasisElements::Pauli(_) => None,
        }
    }

    /// `B_j v` for every element, in basis order.
    pub fn apply_all(&self, v: &StateVector) -> Result<Vec<StateVector>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(match &self.elements {
            BasisElements::Dense(ms) => ms.iter().map(|m| m * v).collect(),
            BasisElements::Pauli(ps) => ps.iter().map(|p| p.apply(v)).collect(),
        })
    }
}

/// Right multiplication by a generator, with the fast Pauli-sum path.
trait Generator {
    fn dim(&self) -> usize;
    fn right_multiply_into(&self, w: &[C64], out: &mut [C64]) -> Result<()>;
    fn is_real(&self) -> bool;
}

impl Generator for Operator {
    fn dim(&self) -> usize {
        Operator::dim(self)
    }

    fn right_multiply_into(&self, w: &[C64], out: &mut [C64]) -> Result<()> {
        Operator::right_multiply_into(self, w, out)
    }

    fn is_real(&self) -> bool {
        Operator::is_real(self)
    }
}

impl Generator for ComplexMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn right_multiply_into(&self, w: &[C64], out: &mut [C64]) -> Result<()> {
        let d = self.nrows();
        let wm = nalgebra::DMatrixView::from_slice(w, d, d);
        let mut om = nalgebra::DMatrixViewMut::from_slice(out, d, d);
        om.gemm(C64::new(1.0, 0.0), &wm, self, C64::new(0.0, 0.0));
        Ok(())
    }

    fn is_real(&self) -> bool {
        self.iter().all(|z| z.im == 0.0)
    }
}

fn normalized_product<G: Generator>(w: &[C64], g: &G) -> Result<Vec<C64>> {
    let mut out = vec![C64::new(0.0, 0.0); w.len()];
    g.right_multiply_into(w, &mut out)?;
    let nrm = linalg::norm(&out);
    if nrm > 0.0 {
        let s = 1.0 / nrm;
        out.iter_mut().for_each(|z| *z *= s);
    }
    Ok(out)
}

fn identity_word(d: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    let s = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = C64::new(s, 0.0);
    }
    v
}

fn to_matrix(d: usize, v: Vec<C64>) -> ComplexMatrix {
    DMatrix::from_vec(d, d, v)
}

fn generate<G: Generator>(gens: &[&G], d: usize, opts: &BurnsideOptions) -> Result<BurnsideBasis> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidTolerance(opts.tol));
    }
    for g in gens {
        if g.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: g.dim() });
        }
    }
    match opts.strategy {
        Strategy::SpanCheck => span_check(gens, d, opts.tol),
        Strategy::PazBound => paz_layers(gens, d, opts),
    }
}

fn span_check<G: Generator>(gens: &[&G], d: usize, tol: f64) -> Result<BurnsideBasis> {
    let real = gens.iter().all(|g| g.is_real());
    let mut span = BlockedBasis::new(d * d, real);
    span.admit(&[identity_word(d)], tol);
    let mut elements = vec![identity_word(d)];
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier = vec![0usize];
    let mut layers = 0;
    while !frontier.is_empty() && !gens.is_empty() {
        let mut cands = Vec::with_capacity(frontier.len() * gens.len());
        let mut cand_words = Vec::with_capacity(cands.capacity());
        for &e in &frontier {
            for (k, g) in gens.iter().enumerate() {
                cands.push(normalized_product(&elements[e], *g)?);
                let mut w = words[e].clone();
                w.push(k);
                cand_words.push(w);
            }
        }
        let admitted = span.admit(&cands, tol);
        if admitted.is_empty() {
            break;
        }
        layers += 1;
        let smallest = admitted.iter().map(|a| a.1).fold(f64::INFINITY, f64::min);
        let mut cands: Vec<Option<Vec<C64>>> = cands.into_iter().map(Some).collect();
        frontier = Vec::with_capacity(admitted.len());
        for (i, _) in admitted {
            frontier.push(elements.len());
            elements.push(cands[i].take().expect("admitted once"));
            words.push(std::mem::take(&mut cand_words[i]));
        }
        log::debug!("layer {layers}: basis size {}, smallest admitted residual {smallest:.3e}", elements.len());
    }
    Ok(BurnsideBasis {
        elements: BasisElements::Dense(elements.into_iter().map(|v| to_matrix(d, v)).collect()),
        words,
        layers_used: layers,
        dim: d,
    })
}

fn paz_layers<G: Generator>(gens: &[&G], d: usize, opts: &BurnsideOptions) -> Result<BurnsideBasis> {
    let bound = paz_bound(d);
    let mut monomials = vec![identity_word(d)];
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    let mut layer = vec![0usize];
    let mut built = 0;
    for _ in 0..bound {
        if gens.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for &e in &layer {
            for (k, g) in gens.iter().enumerate() {
                if monomials.len() >= opts.monomial_cap {
                    return Err(Error::MonomialCapExceeded { cap: opts.monomial_cap });
                }
                let m = normalized_product(&monomials[e], *g)?;
                let mut w = words[e].clone();
                w.push(k);
                next.push(monomials.len());
                monomials.push(m);
                words.push(w);
            }
        }
        layer = next;
        built += 1;
    }
    let mut ortho = OrthoBasis::new(d * d);
    let admitted = ortho.admit(monomials.clone(), opts.tol);
    let mut sorted = admitted;
    sorted.sort_unstable();
    let elements = sorted.iter().map(|&i| to_matrix(d, monomials[i].clone())).collect();
    let words = sorted.iter().map(|&i| words[i].clone()).collect();
    Ok(BurnsideBasis { elements: BasisElements::Dense(elements), words, layers_used: built, dim: d })
}

/// Basis of the algebra generated by arbitrary square matrices.
pub fn burnside_basis_dense(coeffs: &[ComplexMatrix], opts: &BurnsideOptions) -> Result<BurnsideBasis> {
    let d = match coeffs.first() {
        Some(c) => c.nrows(),
        None => return Err(Error::InvalidModel("no generators".into())),
    };
    for c in coeffs {
        if c.nrows() != c.ncols() {
            return Err(Error::NotSquare { rows: c.nrows(), cols: c.ncols() });
        }
    }
    let gens: Vec<&ComplexMatrix> = coeffs.iter().collect();
    generate(&gens, d, opts)
}

/// Dense basis of `A(Coeff(H))`, using the Pauli-sum kernels when available.
pub fn burnside_basis_model(model: &HamiltonianModel, opts: &BurnsideOptions) -> Result<BurnsideBasis> {
    let gens = model.coeff_set();
    generate(&gens, model.dim(), opts)
}

/// Basis of a pure Pauli model: the group generated by its Paulis.
pub fn burnside_basis_pauli(model: &HamiltonianModel) -> Result<BurnsideBasis> {
    if !model.is_pure_pauli() {
        return Err(Error::NotPurePauli("each parameter must multiply exactly one Pauli".into()));
    }
    let n = model.n().expect("pure Pauli model has a spin count");
    let support = model.support_paulis()?;
    let group = if support.is_empty() {
        crate::pauli::generate_group_layered_n(n, &[])?
    } else {
        generate_group(&support, DEFAULT_GRAY_CAP)?
    };
    Ok(BurnsideBasis { elements: BasisElements::Pauli(group), words: vec![], layers_used: 0, dim: model.dim() })
}

/// Residual of `m` (normalized) outside the span of a dense basis.
pub fn span_residual(basis: &BurnsideBasis, m: &ComplexMatrix) -> Result<f64> {
    let ms = basis.matrices().ok_or_else(|| Error::InvalidModel("span residual needs a dense basis".into()))?;
    let mut ortho = OrthoBasis::new(basis.dim * basis.dim);
    for e in ms {
        ortho.push(e.as_slice().to_vec());
    }
    let nrm = m.norm();
    if nrm == 0.0 {
        return Ok(0.0);
    }
    let mut v: Vec<C64> = m.as_slice().iter().map(|z| z / nrm).collect();
    Ok(ortho.project_out(&mut v, 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reducibility {
    Reducible,
    Irreducible,
    Unknown,
}

impl Serialize for Reducibility {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Reducibility::Reducible => s.serialize_bool(true),
            Reducibility::Irreducible => s.serialize_bool(false),
            Reducibility::Unknown => s.serialize_str("unknown"),
        }
    }
}

impl<'de> Deserialize<'de> for Reducibility {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Bool(true) => Ok(Reducibility::Reducible),
            serde_json::Value::Bool(false) => Ok(Reducibility::Irreducible),
            serde_json::Value::String(s) if s == "unknown" => Ok(Reducibility::Unknown),
            other => Err(serde::de::Error::custom(format!("invalid reducibility {other}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    PauliCount,
    PauliRank,
    Burnside,
    None,
}

impl fmt::Display for CertificateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificateMethod::PauliCount => "pauli-count",
            CertificateMethod::PauliRank => "pauli-rank",
            CertificateMethod::Burnside => "burnside",
            CertificateMethod::None => "none",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub reducible: Reducibility,
    pub dim_algebra: Option<usize>,
    pub dim_full: usize,
    pub method: CertificateMethod,
    pub layers_used: Option<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct CertifyOptions {
    pub burnside: BurnsideOptions,
    pub max_dense_dim: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { burnside: BurnsideOptions::default(), max_dense_dim: DEFAULT_MAX_DENSE_DIM }
    }
}

/// Cheapest applicable route: Pauli count rule, then GF(2) rank, then a full
/// dense basis. For pure Pauli models the algebra dimension is `2^rank`.
pub fn certify(model: &HamiltonianModel, opts: &CertifyOptions) -> Result<CertificateReport> {
    let d = model.dim();
    let dim_full = d * d;
    if let Some(n) = model.n() {
        let support = model.support_paulis()?;
        let pure = model.is_pure_pauli();
        let rank = gf2_rank(&GF2Matrix::from_paulis(&support)?);
        let pure_dim = (pure && 2 * n < usize::BITS as usize).then(|| 1usize << rank);
        if pauli_sufficiency_count(&support, n) {
            return Ok(CertificateReport {
                reducible: Reducibility::Reducible,
                dim_algebra: pure_dim,
                dim_full,
                method: CertificateMethod::PauliCount,
                layers_used: None,
            });
        }
        if rank < 2 * n || pure {
            let reducible = if rank < 2 * n { Reducibility::Reducible } else { Reducibility::Irreducible };
            return Ok(CertificateReport {
                reducible,
                dim_algebra: pure_dim,
                dim_full,
                method: CertificateMethod::PauliRank,
                layers_used: None,
            });
        }
    }
    if d > opts.max_dense_dim {
        return Ok(CertificateReport {
            reducible: Reducibility::Unknown,
            dim_algebra: None,
            dim_full,
            method: CertificateMethod::None,
            layers_used: None,
        });
    }
    let basis = burnside_basis_model(model, &opts.burnside)?;
    let reducible = if basis.size() < dim_full { Reducibility::Reducible } else { Reducibility::Irreducible };
    Ok(CertificateReport {
        reducible,
        dim_algebra: Some(basis.size()),
        dim_full,
        method: CertificateMethod::Burnside,
        layers_used: Some(basis.layers_used),
    })
}
