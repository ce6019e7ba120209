//! Turning command-line text into models, states, parameter vectors and time
//! grids.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use qmor::model::{net_magnetization, Builtin, HamiltonianModel, Operator, PauliSum, ProductState, StateSpec};

/// Everything a subcommand needs after argument validation.
pub struct RunConfig {
    pub model: HamiltonianModel,
    pub state: Option<StateSpec>,
    pub lambda: Option<Vec<f64>>,
    pub times: Option<Vec<f64>>,
    pub schedule: Option<PathBuf>,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn state(&self) -> Result<&StateSpec> {
        self.state.as_ref().ok_or_else(|| anyhow!("this command needs --state"))
    }

    pub fn lambda(&self) -> Result<&[f64]> {
        self.lambda.as_deref().ok_or_else(|| anyhow!("this command needs --lambda"))
    }

    pub fn times(&self) -> Result<&[f64]> {
        self.times.as_deref().ok_or_else(|| anyhow!("this command needs --times"))
    }
}

pub fn load_model(file: Option<&Path>, builtin: Option<&str>, n: Option<usize>) -> Result<HamiltonianModel> {
    match (file, builtin) {
        (Some(_), Some(_)) => bail!("give either --model or --builtin, not both"),
        (Some(path), None) => qmor::io::read_model(path).with_context(|| format!("reading model {}", path.display())),
        (None, Some(name)) => {
            let b: Builtin = name.parse()?;
            let n = n.ok_or_else(|| anyhow!("--builtin needs --n"))?;
            Ok(b.build(n)?)
        }
        (None, None) => bail!("no model: use --model FILE or --builtin NAME --n INT"),
    }
}

/// `gs:λ1,λ2,...` for a ground state, a path to a JSON state description, or
/// per-site labels such as `+0-1`.
pub fn parse_state(text: &str, window: Option<f64>) -> Result<StateSpec> {
    if let Some(rest) = text.strip_prefix("gs:") {
        let lambda = parse_list(rest).context("ground-state parameters")?;
        return Ok(StateSpec::GroundState { lambda, window });
    }
    let path = Path::new(text);
    if path.is_file() {
        let body = std::fs::read_to_string(path)?;
        return serde_json::from_str(&body).with_context(|| format!("parsing state file {text}"));
    }
    let p: ProductState = text.parse()?;
    Ok(StateSpec::Product(p.to_string()))
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number {s:?}"))).collect()
}

/// `k=v,...` by parameter label (missing labels are zero) or a plain
/// positional list.
pub fn parse_lambda(text: &str, labels: &[String]) -> Result<Vec<f64>> {
    if !text.contains('=') {
        let v = parse_list(text)?;
        if v.len() != labels.len() {
            bail!("model has {} parameters, got {}", labels.len(), v.len());
        }
        return Ok(v);
    }
    let mut out = vec![0.0; labels.len()];
    for item in text.split(',') {
        let (k, v) = item.split_once('=').ok_or_else(|| anyhow!("expected key=value, got {item:?}"))?;
        let idx = labels
            .iter()
            .position(|l| l == k.trim())
            .ok_or_else(|| anyhow!("unknown parameter {k:?}; model has {labels:?}"))?;
        out[idx] = v.trim().parse().with_context(|| format!("bad value for {k}"))?;
    }
    Ok(out)
}

/// `start:stop:count` (inclusive, evenly spaced) or a comma-separated list.
pub fn parse_times(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let times = match parts.as_slice() {
        [single] => parse_list(single)?,
        [a, b, c] => {
            let (a, b): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
            let count: usize = c.trim().parse()?;
            match count {
                0 => vec![],
                1 => vec![a],
                _ => (0..count).map(|k| a + (b - a) * k as f64 / (count - 1) as f64).collect(),
            }
        }
        _ => bail!("times must be a list or start:stop:count"),
    };
    if times.iter().any(|t| !t.is_finite()) {
        bail!("times must be finite");
    }
    Ok(times)
}

/// `sum-x`, `sum-y`, `sum-z`, or Pauli terms `c*LABEL` joined by commas.
pub fn parse_observable(text: &str, n: usize) -> Result<Operator> {
    let sum = match text {
        "sum-x" => net_magnetization(n, 'X')?,
        "sum-y" => net_magnetization(n, 'Y')?,
        "sum-z" => net_magnetization(n, 'Z')?,
        _ => {
            let mut terms = Vec::new();
            for item in text.split(',') {
                let (c, label) = match item.split_once('*') {
                    Some((c, l)) => (c.trim().parse::<f64>().with_context(|| format!("bad coefficient {c:?}"))?, l),
                    None => (1.0, item),
                };
                terms.push((c, label.trim()));
            }
            let sum = PauliSum::from_labels(&terms)?;
            if sum.n() != n {
                bail!("observable acts on {} spins, model on {n}", sum.n());
            }
            sum
        }
    };
    Ok(Operator::pauli(sum))
}
