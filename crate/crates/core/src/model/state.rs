use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, StateVector};
use crate::pauli::BinaryPauli;

use super::HamiltonianModel;

/// Spectral gap below which a ground state is reported as near-degenerate;
/// also the default width of the ground manifold.
pub const DEGENERACY_GAP: f64 = 1e-8;

const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteState {
    Zero,
    One,
    Plus,
    Minus,
}

impl SiteState {
    fn amplitudes(self) -> [C64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            SiteState::Zero => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            SiteState::One => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            SiteState::Plus => [C64::new(h, 0.0), C64::new(h, 0.0)],
            SiteState::Minus => [C64::new(h, 0.0), C64::new(-h, 0.0)],
        }
    }

    /// `<s| σ(z,x) |s>` for a single site.
    fn expectation(self, z: bool, x: bool) -> f64 {
        match (z, x, self) {
            (false, false, _) => 1.0,
            (true, false, SiteState::Zero) => 1.0,
            (true, false, SiteState::One) => -1.0,
            (false, true, SiteState::Plus) => 1.0,
            (false, true, SiteState::Minus) => -1.0,
            _ => 0.0,
        }
    }

    fn symbol(self) -> char {
        match self {
            SiteState::Zero => '0',
            SiteState::One => '1',
            SiteState::Plus => '+',
            SiteState::Minus => '-',
        }
    }
}

/// Tensor product of single-site states from `{0, 1, +, -}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductState {
    sites: Vec<SiteState>,
}

impl ProductState {
    pub fn new(sites: Vec<SiteState>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidState("empty product state".into()));
        }
        Ok(ProductState { sites })
    }

    pub fn n(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[SiteState] {
        &self.sites
    }

    pub fn to_vector(&self) -> StateVector {
        let mut amps = vec![C64::new(1.0, 0.0)];
        for s in &self.sites {
            let [a0, a1] = s.amplitudes();
            amps = amps.iter().flat_map(|&c| [c * a0, c * a1]).collect();
        }
        DVector::from_vec(amps)
    }

    /// `<ψ|P|ψ>`, exact.
    pub fn expectation(&self, p: &BinaryPauli) -> Result<C64> {
        if p.n() != self.n() {
            return Err(Error::SpinMismatch { left: self.n(), right: p.n() });
        }
        let mut v = 1.0;
        for (j, s) in self.sites.iter().enumerate() {
            v *= s.expectation(p.z_bit(j), p.x_bit(j));
            if v == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
        }
        Ok(crate::pauli::i_pow(p.phase_exp()) * v)
    }
}

impl FromStr for ProductState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sites = s
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(SiteState::Zero),
                '1' => Ok(SiteState::One),
                '+' => Ok(SiteState::Plus),
                '-' | '−' => Ok(SiteState::Minus),
                other => Err(Error::InvalidState(format!("bad site label {other:?} at position {i}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        ProductState::new(sites)
    }
}

impl fmt::Display for ProductState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.sites.iter().try_for_each(|s| write!(f, "{}", s.symbol()))
    }
}

pub fn product_state(spec: &str) -> Result<StateVector> {
    Ok(spec.parse::<ProductState>()?.to_vector())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundStateOptions {
    /// Eigenvalues within this distance of the minimum form the ground manifold.
    pub window: f64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        GroundStateOptions { window: DEGENERACY_GAP }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub state: StateVector,
    pub energy: f64,
    /// `E_1 - E_0`, infinite for a one-dimensional space.
    pub gap: f64,
    pub manifold_dim: usize,
    pub near_degenerate: bool,
}

/// Lowest-energy state of `H(λ)`.
///
/// Within the ground manifold the state maximizing the modulus of the first
/// amplitude that is nonzero somewhere on the manifold is returned, i.e. the
/// normalized projection of that basis vector, so the amplitude comes out
/// real and positive.
pub fn ground_state(model: &HamiltonianModel, lambda: &[f64], opts: GroundStateOptions) -> Result<GroundState> {
    if !(opts.window >= 0.0) {
        return Err(Error::InvalidTolerance(opts.window));
    }
    let h = model.evaluate(lambda)?;
    let eig = hermitian_eig(&h)?;
    let e0 = eig.values[0];
    let gap = eig.values.get(1).map_or(f64::INFINITY, |e1| e1 - e0);
    let m = eig.values.iter().take_while(|&&e| e - e0 <= opts.window).count();
    let u = eig.vectors.columns(0, m);
    let k = (0..h.nrows()).find(|&k| u.row(k).norm() > 1e-8).expect("unitary eigenvector matrix has no zero row");
    let weights = u.row(k).adjoint();
    let mut state = u * weights;
    let nrm = state.norm();
    state /= C64::new(nrm, 0.0);
    let near_degenerate = gap < DEGENERACY_GAP;
    if near_degenerate {
        log::warn!("ground state is near-degenerate (gap {gap:e}); manifold dimension {m}");
    }
    Ok(GroundState { state, energy: e0, gap, manifold_dim: m, near_degenerate })
}

/// Initial-state description as read from JSON or the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSpec {
    Product(String),
    GroundState {
        lambda: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<f64>,
    },
    Amplitudes(Vec<[f64; 2]>),
}

impl StateSpec {
    pub fn resolve(&self, model: &HamiltonianModel) -> Result<StateVector> {
        let v = match self {
            StateSpec::Product(s) => product_state(s)?,
            StateSpec::GroundState { lambda, window } => {
                let opts = GroundStateOptions { window: window.unwrap_or(DEGENERACY_GAP) };
                ground_state(model, lambda, opts)?.state
            }
            StateSpec::Amplitudes(a) => {
                let v = DVector::from_iterator(a.len(), a.iter().map(|[re, im]| C64::new(*re, *im)));
                let nrm = v.norm();
                if !(nrm > 0.0) || !nrm.is_finite() {
                    return Err(Error::InvalidState("amplitudes have zero norm".into()));
                }
                v / C64::new(nrm, 0.0)
            }
        };
        if v.len() != model.dim() {
            return Err(Error::DimensionMismatch { expected: model.dim(), got: v.len() });
        }
        Ok(v)
    }

    pub fn as_product(&self) -> Option<ProductState> {
        match self {
            StateSpec::Product(s) => s.parse().ok(),
            _ => None,
        }
    }
}

/// A model together with its normalized initial state.
#[derive(Clone, Debug)]
pub struct ModelWithState {
    pub model: HamiltonianModel,
    pub psi0: StateVector,
}

impl ModelWithState {
    pub fn new(model: HamiltonianModel, psi0: StateVector) -> Result<Self> {
        if psi0.len() != model.dim() {
            return Err(Error::DimensionMismatch { expected: model.dim(), got: psi0.len() });
        }
        if (psi0.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {} is not 1", psi0.norm())));
        }
        Ok(ModelWithState { model, psi0 })
    }
}
