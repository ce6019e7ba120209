//! Full- and reduced-order propagation on explicit time grids, observable
//! projection and pointwise comparison of the two.

use std::fmt;
use std::io::Write;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{csv_err, fmt_f64};
use crate::linalg::{hermitian_eig, ComplexMatrix, StateVector};
use crate::model::{HamiltonianModel, Operator};
use crate::reduction::{reduced_model, ReducedModel, ReductionMap};

/// Largest imaginary part tolerated in an expectation value.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Full,
    Reduced,
    /// Reduced model on a map with only this many columns kept.
    Truncated(usize),
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Full => f.write_str("full"),
            ModelKind::Reduced => f.write_str("reduced"),
            ModelKind::Truncated(r) => write!(f, "truncated({r})"),
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ModelKind::Full),
            "reduced" => Ok(ModelKind::Reduced),
            _ => s
                .strip_prefix("truncated(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|r| r.parse().ok())
                .map(ModelKind::Truncated)
                .ok_or_else(|| Error::InvalidModel(format!("unknown model kind {s:?}"))),
        }
    }
}

impl Serialize for ModelKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModelKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryResult {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub model_kind: ModelKind,
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.iter().find(|t| !t.is_finite()) {
        Some(t) => Err(Error::InvalidSchedule(format!("time {t} is not finite"))),
        None => Ok(()),
    }
}

/// `exp(-i H(λ) t) ψ0` at each time.
pub fn propagate_full(
    model: &HamiltonianModel,
    lambda: &[f64],
    psi0: &StateVector,
    times: &[f64],
) -> Result<Vec<StateVector>> {
    check_times(times)?;
    if psi0.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: psi0.len() });
    }
    let eig = hermitian_eig(&model.evaluate(lambda)?)?;
    Ok(times.iter().map(|&t| eig.evolve(t, psi0)).collect())
}

/// `exp(-i Ĥ(λ) t) v0` at each time.
pub fn propagate_reduced(rm: &ReducedModel, lambda: &[f64], times: &[f64]) -> Result<Vec<StateVector>> {
    check_times(times)?;
    let eig = hermitian_eig(&rm.evaluate(lambda)?)?;
    Ok(times.iter().map(|&t| eig.evolve(t, &rm.v0)).collect())
}

/// `Φ† O Φ`.
pub fn project_observable(o: &ComplexMatrix, map: &ReductionMap) -> Result<ComplexMatrix> {
    if o.nrows() != map.d() || o.ncols() != map.d() {
        return Err(Error::DimensionMismatch { expected: map.d(), got: o.nrows() });
    }
    Ok(map.phi.ad_mul(&(o * &map.phi)))
}

/// `Φ† O Φ` without forming `O` densely.
pub fn project_operator(o: &Operator, map: &ReductionMap) -> Result<ComplexMatrix> {
    if o.dim() != map.d() {
        return Err(Error::DimensionMismatch { expected: map.d(), got: o.dim() });
    }
    let mut out = ComplexMatrix::zeros(map.r(), map.r());
    for (j, col) in map.phi.column_iter().enumerate() {
        let oc = o.apply(&col.into_owned())?;
        out.set_column(j, &map.phi.ad_mul(&oc));
    }
    Ok(out)
}

fn real_part(z: C64) -> Result<f64> {
    if z.im.abs() > EXPECTATION_IMAG_TOL {
        return Err(Error::NotHermitian(z.im.abs()));
    }
    Ok(z.re)
}

/// `<v|O|v>` for a Hermitian `O`; fails when the imaginary part is not
/// negligible.
pub fn expectation(o: &ComplexMatrix, v: &StateVector) -> Result<f64> {
    real_part(v.dotc(&(o * v)))
}

pub fn operator_expectation(o: &Operator, v: &StateVector) -> Result<f64> {
    real_part(v.dotc(&o.apply(v)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub full: TrajectoryResult,
    pub reduced: TrajectoryResult,
    pub max_abs_error: f64,
}

/// Observable trajectories of the full model and of the model reduced by
/// `map` (optionally with its last `truncate` columns removed).
pub fn compare(
    model: &HamiltonianModel,
    map: &ReductionMap,
    lambda: &[f64],
    observable: &Operator,
    psi0: &StateVector,
    times: &[f64],
    truncate: usize,
) -> Result<Comparison> {
    let full_states = propagate_full(model, lambda, psi0, times)?;
    let full_values = full_states.iter().map(|v| operator_expectation(observable, v)).collect::<Result<Vec<_>>>()?;
    let (used, kind) = if truncate == 0 {
        (map.clone(), ModelKind::Reduced)
    } else {
        let m = map.truncated(truncate)?;
        let r = m.r();
        (m, ModelKind::Truncated(r))
    };
    let rm = reduced_model(model, &used, psi0)?;
    let o_hat = project_operator(observable, &used)?;
    let red_values =
        propagate_reduced(&rm, lambda, times)?.iter().map(|v| expectation(&o_hat, v)).collect::<Result<Vec<_>>>()?;
    let max_abs_error = full_values.iter().zip(&red_values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Comparison {
        full: TrajectoryResult { times: times.to_vec(), values: full_values, model_kind: ModelKind::Full },
        reduced: TrajectoryResult { times: times.to_vec(), values: red_values, model_kind: kind },
        max_abs_error,
    })
}

/// Rows `time,value,model_kind` for each trajectory in turn.
pub fn write_trajectories_csv<W: Write>(out: W, trajectories: &[&TrajectoryResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "value", "model_kind"]).map_err(csv_err)?;
    for tr in trajectories {
        let kind = tr.model_kind.to_string();
        for (t, v) in tr.times.iter().zip(&tr.values) {
            w.write_record([fmt_f64(*t), fmt_f64(*v), kind.clone()]).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Trajectories with the metadata needed to reproduce them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryBundle {
    pub lambda: Vec<f64>,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_error: Option<f64>,
    pub trajectories: Vec<TrajectoryResult>,
}
