//! Reduced subspaces from time snapshots of the evolving state, plus the
//! diagnostics that say when a sampling schedule can span the cyclic space.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, numeric_rank, ComplexMatrix, HermitianEigen, OrthoBasis, StateVector};
use crate::model::HamiltonianModel;
use crate::reduction::{MapSource, ReductionMap, INVARIANCE_TOL};

/// Eigenvalues closer than this times the spectral radius count as equal.
pub const EIG_CLUSTER_REL: f64 = 1e-9;
/// An eigenspace is relevant when `ψ0` has projection norm above this.
pub const OVERLAP_TOL: f64 = 1e-9;
/// Phase distance to a multiple of `2π` that counts as an alias.
pub const PHASE_TOL: f64 = 1e-9;
/// Independence tolerance for snapshot spans.
pub const SNAPSHOT_RANK_TOL: f64 = 1e-9;
pub const DEFAULT_INTERVAL: [f64; 2] = [0.0, 10.0];

/// Distinct eigenvalues of `h` whose eigenspace `psi0` overlaps by more than
/// `tol`. Clusters are chained at `EIG_CLUSTER_REL · spectral radius` and
/// reported by their mean.
pub fn relevant_eigenvalues(h: &ComplexMatrix, psi0: &StateVector, tol: f64) -> Result<Vec<f64>> {
    if h.nrows() != psi0.len() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), got: psi0.len() });
    }
    let eig = hermitian_eig(h)?;
    Ok(relevant_from_eig(&eig, psi0, tol))
}

fn relevant_from_eig(eig: &HermitianEigen, psi0: &StateVector, tol: f64) -> Vec<f64> {
    let eigtol = EIG_CLUSTER_REL * eig.spectral_radius();
    let amps = eig.vectors.ad_mul(psi0);
    let mut out = Vec::new();
    let mut start = 0;
    while start < eig.values.len() {
        let mut end = start + 1;
        while end < eig.values.len() && eig.values[end] - eig.values[end - 1] <= eigtol {
            end += 1;
        }
        let weight: f64 = (start..end).map(|i| amps[i].norm_sqr()).sum::<f64>().sqrt();
        if weight > tol {
            out.push(eig.values[start..end].iter().sum::<f64>() / (end - start) as f64);
        }
        start = end;
    }
    out
}

/// Dimension of the cyclic subspace `span{H^k ψ0}`: the number of distinct
/// eigenvalues whose eigenspace `ψ0` touches.
pub fn cyclic_dimension(h: &ComplexMatrix, psi0: &StateVector, tol: f64) -> Result<usize> {
    Ok(relevant_eigenvalues(h, psi0, tol)?.len())
}

/// False when `Δt` is (within [`PHASE_TOL`]) a multiple of some intrinsic
/// period `2π / (μ_k − μ_j)`, which makes uniformly spaced snapshots alias.
pub fn uniform_step_valid(eigenvalues: &[f64], dt: f64) -> bool {
    for (j, a) in eigenvalues.iter().enumerate() {
        for b in &eigenvalues[j + 1..] {
            if a == b {
                continue;
            }
            let phase = (dt * (b - a)).rem_euclid(TAU);
            if phase.min(TAU - phase) <= PHASE_TOL {
                return false;
            }
        }
    }
    true
}

/// States sampled along trajectories, possibly at several parameter values.
#[derive(Clone, Debug, Default)]
pub struct SnapshotSet {
    pub lambdas: Vec<Vec<f64>>,
    /// Times per entry of `lambdas`.
    pub times: Vec<Vec<f64>>,
    /// All states, entry by entry, in time order within each entry.
    pub states: Vec<StateVector>,
}

impl SnapshotSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn extend(&mut self, other: SnapshotSet) {
        self.lambdas.extend(other.lambdas);
        self.times.extend(other.times);
        self.states.extend(other.states);
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.iter().find(|t| !t.is_finite()) {
        Some(t) => Err(Error::InvalidSchedule(format!("time {t} is not finite"))),
        None => Ok(()),
    }
}

/// `exp(-i H(λ) t) ψ0` for each `t`, from a single eigendecomposition.
pub fn snapshots(model: &HamiltonianModel, lambda: &[f64], psi0: &StateVector, times: &[f64]) -> Result<SnapshotSet> {
    check_times(times)?;
    if psi0.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: psi0.len() });
    }
    let eig = hermitian_eig(&model.evaluate(lambda)?)?;
    Ok(SnapshotSet {
        lambdas: vec![lambda.to_vec()],
        times: vec![times.to_vec()],
        states: times.iter().map(|&t| eig.evolve(t, psi0)).collect(),
    })
}

pub fn snapshot_span_dim(set: &SnapshotSet, tol: f64) -> Result<usize> {
    if set.is_empty() {
        return Ok(0);
    }
    Ok(numeric_rank(&set.states, tol)?.rank)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomTimes {
    pub count: usize,
    #[serde(default = "default_interval")]
    pub interval: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_interval() -> [f64; 2] {
    DEFAULT_INTERVAL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformTimes {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeSpec {
    List(Vec<f64>),
    Random { random: RandomTimes },
    Uniform { uniform: UniformTimes },
}

impl TimeSpec {
    /// Concrete times; random draws without their own seed use `default_seed`.
    /// Returns the times and the seed actually used, if any.
    pub fn resolve(&self, default_seed: u64) -> Result<(Vec<f64>, Option<u64>)> {
        let (times, seed) = match self {
            TimeSpec::List(ts) => (ts.clone(), None),
            TimeSpec::Uniform { uniform: u } => ((0..u.count).map(|k| u.start + k as f64 * u.step).collect(), None),
            TimeSpec::Random { random: r } => {
                let [a, b] = r.interval;
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::InvalidSchedule(format!("bad interval [{a}, {b}]")));
                }
                let seed = r.seed.unwrap_or(default_seed);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                ((0..r.count).map(|_| rng.gen_range(a..b)).collect(), Some(seed))
            }
        };
        check_times(&times)?;
        Ok((times, seed))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub lambda: Vec<f64>,
    pub times: TimeSpec,
}

/// A schedule entry with its times drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedEntry {
    pub lambda: Vec<f64>,
    pub times: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Draws every entry's times. Entry `i` without an explicit seed uses
/// `default_seed + i`, so entries get independent streams.
pub fn resolve_schedule(entries: &[ScheduleEntry], default_seed: u64) -> Result<Vec<ResolvedEntry>> {
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (times, seed) = e.times.resolve(default_seed.wrapping_add(i as u64))?;
            Ok(ResolvedEntry { lambda: e.lambda.clone(), times, seed })
        })
        .collect()
}

pub fn read_schedule(path: &Path) -> Result<Vec<ScheduleEntry>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Clone, Debug)]
pub struct SnapshotReduction {
    pub map: ReductionMap,
    pub snapshots: SnapshotSet,
    /// Rank of the union after each schedule entry.
    pub ranks: Vec<usize>,
    pub invariance_residual: f64,
    pub containment_residual: f64,
    /// Whether the span is invariant under every coefficient operator, i.e.
    /// the schedule reached the full orbit space.
    pub complete: bool,
}

/// `Φ` spanning the union of all snapshots of the schedule. `selected`
/// indexes the flattened snapshot list.
pub fn snapshot_reduction(
    model: &HamiltonianModel,
    psi0: &StateVector,
    schedule: &[ResolvedEntry],
    tol: f64,
) -> Result<SnapshotReduction> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let scale = psi0.norm();
    if scale == 0.0 {
        return Err(Error::InvalidState("initial state is zero".into()));
    }
    let mut set = SnapshotSet::default();
    let mut ortho = OrthoBasis::new(model.dim());
    let mut selected = Vec::new();
    let mut ranks = Vec::with_capacity(schedule.len());
    for entry in schedule {
        let part = snapshots(model, &entry.lambda, psi0, &entry.times)?;
        let offset = set.len();
        let cands = part.states.iter().map(|v| v.as_slice().to_vec()).collect();
        selected.extend(ortho.admit(cands, tol * scale).into_iter().map(|i| i + offset));
        ranks.push(ortho.len());
        set.extend(part);
    }
    let map = ReductionMap::new(ortho.to_matrix(), MapSource::Snapshots, selected);
    let invariance_residual = map.max_invariance_residual(model)?;
    let containment_residual = map.containment_residual(psi0);
    Ok(SnapshotReduction {
        complete: invariance_residual <= INVARIANCE_TOL && !map.phi.is_empty(),
        map,
        snapshots: set,
        ranks,
        invariance_residual,
        containment_residual,
    })
}
