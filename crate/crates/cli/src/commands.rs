use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use qmor::burnside::{
    burnside_basis_model, burnside_basis_pauli, certify, BurnsideBasis, BurnsideOptions, CertificateReport,
    CertifyOptions, Reducibility,
};
use qmor::dynamics::{
    compare, expectation, operator_expectation, project_operator, propagate_full, propagate_reduced,
    write_trajectories_csv, ModelKind, TrajectoryBundle, TrajectoryResult,
};
use qmor::io::{write_phi_csv, ModelJson, ReductionMapJson};
use qmor::linalg::StateVector;
use qmor::model::{HamiltonianModel, Operator};
use qmor::reduction::{gramian_select, orbit_basis, reduced_model, ReducedModel, ReductionMap};
use qmor::sampling::{
    read_schedule, relevant_eigenvalues, resolve_schedule, snapshot_reduction, ResolvedEntry, TimeSpec, OVERLAP_TOL,
};

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Burnside,
    Pauli,
    Gramian,
    Snapshots,
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Exit code: 0 reducible, 1 irreducible, 2 unknown.
pub fn certify_cmd(cfg: &RunConfig, max_dense_dim: usize) -> Result<i32> {
    let opts = CertifyOptions { burnside: BurnsideOptions { tol: cfg.tol, ..Default::default() }, max_dense_dim };
    let report: CertificateReport = certify(&cfg.model, &opts)?;
    emit(&to_json(&report)?, cfg.out.as_deref())?;
    Ok(match report.reducible {
        Reducibility::Reducible => 0,
        Reducibility::Irreducible => 1,
        Reducibility::Unknown => 2,
    })
}

/// The model the Pauli-group methods run on: the model itself when every
/// parameter multiplies one Pauli, otherwise one parameter per support Pauli.
fn pauli_view(model: &HamiltonianModel) -> Result<HamiltonianModel> {
    if model.n().is_none() {
        bail!("the pauli and gramian methods need a Pauli-sum model");
    }
    if model.is_pure_pauli() {
        Ok(model.clone())
    } else {
        log::info!("model is not pure Pauli; using one parameter per Pauli term for the basis");
        Ok(model.over_parameterize()?)
    }
}

pub struct BuiltMap {
    pub map: ReductionMap,
    pub basis_size: Option<usize>,
    pub layers_used: Option<usize>,
}

fn from_basis(b: &BurnsideBasis, map: ReductionMap, dense: bool) -> BuiltMap {
    BuiltMap { map, basis_size: Some(b.size()), layers_used: dense.then_some(b.layers_used) }
}

pub fn build_map(cfg: &RunConfig, psi0: &StateVector, method: Method) -> Result<BuiltMap> {
    let model = &cfg.model;
    match method {
        Method::Burnside => {
            let b = burnside_basis_model(model, &BurnsideOptions { tol: cfg.tol, ..Default::default() })?;
            let map = orbit_basis(&b, psi0, cfg.tol)?;
            Ok(from_basis(&b, map, true))
        }
        Method::Pauli => {
            let b = burnside_basis_pauli(&pauli_view(model)?)?;
            let map = orbit_basis(&b, psi0, cfg.tol)?;
            Ok(from_basis(&b, map, false))
        }
        Method::Gramian => {
            let state = cfg
                .state()?
                .as_product()
                .ok_or_else(|| anyhow!("the gramian method needs a product state such as +0-1"))?;
            let b = burnside_basis_pauli(&pauli_view(model)?)?;
            let map = gramian_select(&b, &state)?;
            Ok(from_basis(&b, map, false))
        }
        Method::Snapshots => {
            let schedule = schedule_entries(cfg)?;
            let red = snapshot_reduction(model, psi0, &schedule, cfg.tol)?;
            if !red.complete {
                log::warn!("snapshot span is not invariant (residual {:e})", red.invariance_residual);
            }
            Ok(BuiltMap { map: red.map, basis_size: None, layers_used: None })
        }
    }
}

#[derive(Serialize)]
struct ReduceReport {
    d: usize,
    r: usize,
    basis_size: Option<usize>,
    layers_used: Option<usize>,
    method: Method,
    invariance_residual: f64,
    containment_residual: f64,
    selected: Vec<usize>,
}

fn write_map_files(dir: &Path, map: &ReductionMap, rm: &ReducedModel) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("map.json"), to_json(&ReductionMapJson::from_map(map))?)?;
    write_phi_csv(fs::File::create(dir.join("phi.csv"))?, map)?;
    fs::write(dir.join("reduced_model.json"), to_json(rm)?)?;
    Ok(())
}

/// Prints the report; with `--out DIR` also writes `map.json`, `phi.csv`,
/// `reduced_model.json` and `report.json` there.
pub fn reduce_cmd(cfg: &RunConfig, method: Method) -> Result<i32> {
    let psi0 = cfg.state()?.resolve(&cfg.model)?;
    let built = build_map(cfg, &psi0, method)?;
    let rm = reduced_model(&cfg.model, &built.map, &psi0)?;
    let report = ReduceReport {
        d: built.map.d(),
        r: built.map.r(),
        basis_size: built.basis_size,
        layers_used: built.layers_used,
        method,
        invariance_residual: built.map.max_invariance_residual(&cfg.model)?,
        containment_residual: built.map.containment_residual(&psi0),
        selected: built.map.selected.clone(),
    };
    let text = to_json(&report)?;
    if let Some(dir) = &cfg.out {
        write_map_files(dir, &built.map, &rm)?;
        fs::write(dir.join("report.json"), &text)?;
    }
    print!("{text}");
    Ok(0)
}

pub struct SimulateOptions<'a> {
    pub observable: &'a Operator,
    pub compare: bool,
    pub reduced_only: bool,
    pub truncate: usize,
    pub method: Method,
}

/// CSV of `time,value,model_kind` to stdout, or to `--out` (a `.json` path
/// gets the bundle with metadata instead).
pub fn simulate_cmd(cfg: &RunConfig, opts: &SimulateOptions) -> Result<i32> {
    let psi0 = cfg.state()?.resolve(&cfg.model)?;
    let lambda = cfg.lambda()?;
    let times = cfg.times()?;
    let mut trajectories = Vec::new();
    let mut r = None;
    let mut max_abs_error = None;
    if opts.compare {
        let built = build_map(cfg, &psi0, opts.method)?;
        let c = compare(&cfg.model, &built.map, lambda, opts.observable, &psi0, times, opts.truncate)?;
        r = Some(built.map.r() - opts.truncate);
        log::info!("max |full - reduced| = {:e}", c.max_abs_error);
        eprintln!("max_abs_error {:.16e}", c.max_abs_error);
        max_abs_error = Some(c.max_abs_error);
        trajectories.push(c.full);
        trajectories.push(c.reduced);
    } else if opts.reduced_only {
        let built = build_map(cfg, &psi0, opts.method)?;
        let map = if opts.truncate > 0 { built.map.truncated(opts.truncate)? } else { built.map };
        let rm = reduced_model(&cfg.model, &map, &psi0)?;
        let o_hat = project_operator(opts.observable, &map)?;
        let values = propagate_reduced(&rm, lambda, times)?
            .iter()
            .map(|v| expectation(&o_hat, v))
            .collect::<qmor::Result<Vec<_>>>()?;
        let kind = if opts.truncate > 0 { ModelKind::Truncated(map.r()) } else { ModelKind::Reduced };
        r = Some(map.r());
        trajectories.push(TrajectoryResult { times: times.to_vec(), values, model_kind: kind });
    } else {
        if opts.truncate > 0 {
            bail!("--truncate needs --compare or --reduced");
        }
        let values = propagate_full(&cfg.model, lambda, &psi0, times)?
            .iter()
            .map(|v| operator_expectation(opts.observable, v))
            .collect::<qmor::Result<Vec<_>>>()?;
        trajectories.push(TrajectoryResult { times: times.to_vec(), values, model_kind: ModelKind::Full });
    }
    let is_json = cfg.out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    if is_json {
        let bundle = TrajectoryBundle {
            lambda: lambda.to_vec(),
            d: cfg.model.dim(),
            r,
            seed: Some(cfg.seed),
            max_abs_error,
            trajectories,
        };
        emit(&to_json(&bundle)?, cfg.out.as_deref())?;
    } else {
        let refs: Vec<&TrajectoryResult> = trajectories.iter().collect();
        let mut buf = Vec::new();
        write_trajectories_csv(&mut buf, &refs)?;
        emit(&String::from_utf8(buf)?, cfg.out.as_deref())?;
    }
    Ok(0)
}

fn schedule_entries(cfg: &RunConfig) -> Result<Vec<ResolvedEntry>> {
    let entries = match (&cfg.schedule, &cfg.lambda, &cfg.times) {
        (Some(path), _, _) => read_schedule(path).with_context(|| format!("reading schedule {}", path.display()))?,
        (None, Some(lambda), Some(times)) => {
            vec![qmor::sampling::ScheduleEntry { lambda: lambda.clone(), times: TimeSpec::List(times.clone()) }]
        }
        _ => bail!("sampling needs --schedule FILE or both --lambda and --times"),
    };
    if entries.is_empty() {
        bail!("the schedule is empty");
    }
    Ok(resolve_schedule(&entries, cfg.seed)?)
}

#[derive(Serialize)]
struct EntryReport {
    #[serde(flatten)]
    entry: ResolvedEntry,
    cyclic_dim: usize,
    /// Only for uniformly spaced entries.
    uniform_step_valid: Option<bool>,
    rank_after: usize,
}

#[derive(Serialize)]
struct SampleReport {
    d: usize,
    r: usize,
    seed: u64,
    entries: Vec<EntryReport>,
    invariance_residual: f64,
    containment_residual: f64,
    complete: bool,
}

pub fn sample_cmd(cfg: &RunConfig) -> Result<i32> {
    let psi0 = cfg.state()?.resolve(&cfg.model)?;
    let schedule = schedule_entries(cfg)?;
    let raw = cfg.schedule.as_ref().map(|p| read_schedule(p)).transpose()?;
    let red = snapshot_reduction(&cfg.model, &psi0, &schedule, cfg.tol)?;
    let mut entries = Vec::with_capacity(schedule.len());
    for (i, e) in schedule.iter().enumerate() {
        let eigs = relevant_eigenvalues(&cfg.model.evaluate(&e.lambda)?, &psi0, OVERLAP_TOL)?;
        let step = raw.as_ref().and_then(|r| match &r[i].times {
            TimeSpec::Uniform { uniform } => Some(uniform.step),
            _ => None,
        });
        entries.push(EntryReport {
            entry: e.clone(),
            cyclic_dim: eigs.len(),
            uniform_step_valid: step.map(|dt| qmor::sampling::uniform_step_valid(&eigs, dt)),
            rank_after: red.ranks[i],
        });
    }
    let report = SampleReport {
        d: red.map.d(),
        r: red.map.r(),
        seed: cfg.seed,
        entries,
        invariance_residual: red.invariance_residual,
        containment_residual: red.containment_residual,
        complete: red.complete,
    };
    let text = to_json(&report)?;
    if let Some(dir) = &cfg.out {
        let rm = reduced_model(&cfg.model, &red.map, &psi0)?;
        write_map_files(dir, &red.map, &rm)?;
        fs::write(dir.join("report.json"), &text)?;
    }
    print!("{text}");
    Ok(0)
}

pub fn export_cmd(cfg: &RunConfig) -> Result<i32> {
    emit(&to_json(&ModelJson::from_model(&cfg.model)?)?, cfg.out.as_deref())?;
    Ok(0)
}
