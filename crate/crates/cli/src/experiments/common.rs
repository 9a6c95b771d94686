use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use sgldiff::analysis::{
    build_target_density_1d, mean_estimate, sample_variance, wasserstein1_vs_density, TargetDensity1D,
};
use sgldiff::potentials::{appendix_c_family, quadratic, trig};
use sgldiff::processes::{simulate_langevin_with, simulate_sgldiff_with, Record, SimOptions};
use sgldiff::{Density1D, Family, Path, StreamKey};

use crate::config::{ExperimentConfig, FamilySpec};
use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_N_BINS: usize = 80;
/// Batches used for the standard error of a `W₁` estimate from one long run.
pub const W1_BATCHES: usize = 20;

/// Resolves configuration values against per-experiment defaults and keeps
/// the resolved values for the manifest.
pub struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub seed: u64,
    echo: Map<String, Value>,
}

impl<'a> Ctx<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Self {
        let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
        let mut echo = Map::new();
        echo.insert("seed".into(), Value::from(seed));
        Self { cfg, seed, echo }
    }

    pub fn record<T: Serialize>(&mut self, key: &str, value: &T) {
        self.echo
            .insert(key.into(), serde_json::to_value(value).expect("config values serialise"));
    }

    pub fn value<T: Serialize + Clone>(&mut self, key: &str, given: &Option<T>, default: T) -> T {
        let v = given.clone().unwrap_or(default);
        self.record(key, &v);
        v
    }

    pub fn positive(&mut self, key: &str, given: Option<f64>, default: f64) -> CliResult<f64> {
        let v = self.value(key, &given, default);
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Config(format!("{key} must be positive, got {v}")));
        }
        Ok(v)
    }

    pub fn count(&mut self, key: &str, given: Option<usize>, default: usize) -> CliResult<usize> {
        let v = self.value(key, &given, default);
        if v == 0 {
            return Err(CliError::Config(format!("{key} must be positive")));
        }
        Ok(v)
    }

    pub fn etas(&mut self, default: &[f64]) -> CliResult<Vec<f64>> {
        let v = self.value("eta", &self.cfg.eta.clone(), default.to_vec());
        if v.is_empty() {
            return Err(CliError::Config("eta list is empty".into()));
        }
        if v.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(CliError::Config("every eta must be positive".into()));
        }
        Ok(v)
    }

    pub fn family(&mut self, default: FamilySpec) -> CliResult<(FamilySpec, Family)> {
        let spec = self.value("family", &self.cfg.family.clone(), default);
        let fam = build_family(&spec)?;
        Ok((spec, fam))
    }

    pub fn point(&mut self, key: &str, given: &Option<Vec<f64>>, default: Vec<f64>, dim: usize) -> CliResult<Vec<f64>> {
        let v = self.value(key, given, default);
        if v.len() != dim {
            return Err(CliError::Config(format!("{key} has dimension {}, family has {dim}", v.len())));
        }
        Ok(v)
    }

    /// `burn_in` defaults to `min(10, horizon/10)`; an explicit value must be below the horizon.
    pub fn burn_in(&mut self, horizon: f64) -> CliResult<f64> {
        let v = self.value("burn_in", &self.cfg.burn_in, (0.1 * horizon).min(10.0));
        if !(v >= 0.0 && v < horizon) {
            return Err(CliError::Config(format!("burn_in must lie in [0, horizon), got {v}")));
        }
        Ok(v)
    }

    /// Canonical JSON of the values resolved so far.
    pub fn echo_string(&self) -> String {
        serde_json::to_string(&self.echo).expect("config values serialise")
    }

    pub fn into_echo(self) -> Value {
        Value::Object(self.echo)
    }
}

pub fn build_family(spec: &FamilySpec) -> CliResult<Family> {
    let missing = |what: &str| CliError::Config(format!("family `{}` needs `{what}`", spec.kind));
    let dim = spec.dim.unwrap_or(1);
    let fam = match spec.kind.as_str() {
        "quadratic" => {
            let a = spec.a.as_ref().ok_or_else(|| missing("a"))?;
            let b = spec.b.as_ref().ok_or_else(|| missing("b"))?;
            quadratic(a, b, dim)?
        }
        "trig" => trig(spec.shifts.as_ref().ok_or_else(|| missing("shifts"))?, dim)?,
        "appendix_c" => {
            if dim != 1 {
                return Err(CliError::Config("appendix_c family is one-dimensional".into()));
            }
            appendix_c_family(spec.k.unwrap_or(0.5), spec.r.unwrap_or(1.0))?
        }
        other => return Err(CliError::Config(format!("unknown family kind `{other}`"))),
    };
    Ok(fam.with_constants(
        spec.l.unwrap_or(fam.declared_l()),
        spec.k.unwrap_or(fam.declared_k()),
        spec.r.unwrap_or(fam.declared_r()),
    )?)
}

/// Order-independent sub-seed for one value of a swept parameter.
pub fn derive_seed(seed: u64, tag: &str, x: f64) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(tag.as_bytes());
    h.update(x.to_bits().to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

/// File-name label for a step size, e.g. `1e-3`.
pub fn eta_label(eta: f64) -> String {
    format!("{eta:e}")
}

/// One long run: the trajectory sampled every `thin` grid steps, and the
/// first coordinate after burn-in. `eta = None` runs the Langevin diffusion.
#[allow(clippy::too_many_arguments)]
pub fn long_run(
    family: &Family,
    eta: Option<f64>,
    x0: &[f64],
    horizon: f64,
    dt: f64,
    burn_in: f64,
    thin: usize,
    key: StreamKey,
) -> CliResult<(Path, Vec<f64>)> {
    let opts = SimOptions::new(horizon, dt).record(Record::Stride(thin));
    let path = match eta {
        Some(eta) => simulate_sgldiff_with(family, eta, x0, &opts, key)?,
        None => simulate_langevin_with(family, x0, &opts, key)?,
    };
    let samples = path
        .times
        .iter()
        .zip(path.iter_points())
        .filter(|(&t, _)| t >= burn_in)
        .map(|(_, p)| p[0])
        .collect();
    Ok((path, samples))
}

/// Every `k`-th row of a trajectory so that at most `max_rows` remain (the last row is kept).
pub fn subsample(path: &Path, max_rows: usize) -> Path {
    let k = path.len().div_ceil(max_rows.max(1)).max(1);
    let mut out = path.clone();
    let keep: Vec<usize> = (0..path.len()).filter(|&i| i % k == 0 || i + 1 == path.len()).collect();
    out.times = keep.iter().map(|&i| path.times[i]).collect();
    out.points = keep.iter().flat_map(|&i| path.point(i).to_vec()).collect();
    out.index = path.index.as_ref().map(|ix| keep.iter().map(|&i| ix[i]).collect());
    out
}

/// Normalised target of a one-dimensional family on the smallest symmetric
/// power-of-two interval that captures its tails.
pub fn target_density(family: &Family) -> CliResult<Density1D> {
    let mut last = None;
    for k in 2..13 {
        let w = f64::powi(2.0, k);
        match build_target_density_1d(family, (-w, w)) {
            Ok(d) => return Ok(d),
            Err(e @ sgldiff::Error::DomainTooSmall(_)) => last = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(last.expect("at least one attempt").into())
}

/// Stationary law of a single component, tabulated like the target.
pub fn component_density(family: &Family, i: usize) -> CliResult<Density1D> {
    let mut last = None;
    for k in 2..13 {
        let w = f64::powi(2.0, k);
        let mut g = [0.0];
        let mut grad = |x: f64| {
            family.grad_into(i, &[x], &mut g);
            g[0]
        };
        match TargetDensity1D::from_gradient(&mut grad, -w, w) {
            Ok(d) => return Ok(d),
            Err(e @ sgldiff::Error::DomainTooSmall(_)) => last = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(last.expect("at least one attempt").into())
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleSummary {
    pub n_samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub w1_target: f64,
    pub w1_stderr: f64,
}

/// Moments and `W₁` to the target, with a batch-based standard error for the
/// correlated samples of one long run.
pub fn summarise(samples: &[f64], target: &Density1D) -> CliResult<SampleSummary> {
    if samples.is_empty() {
        return Err(CliError::Config("no samples after burn-in".into()));
    }
    let w1 = wasserstein1_vs_density(samples, target)?.value;
    let len = samples.len() / W1_BATCHES;
    let w1_stderr = if len >= 2 {
        let vals = samples
            .chunks_exact(len)
            .take(W1_BATCHES)
            .map(|c| Ok(wasserstein1_vs_density(c, target)?.value))
            .collect::<CliResult<Vec<f64>>>()?;
        mean_estimate(&vals).stderr
    } else {
        f64::NAN
    };
    Ok(SampleSummary {
        n_samples: samples.len(),
        mean: mean_estimate(samples).mean,
        variance: sample_variance(samples),
        w1_target: w1,
        w1_stderr,
    })
}

/// `(left, right, count, density)` for `n_bins` equal bins over `[lo, hi]`.
pub fn histogram(samples: &[f64], lo: f64, hi: f64, n_bins: usize) -> Vec<(f64, f64, usize, f64)> {
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &x in samples {
        let k = (((x - lo) / width) as usize).min(n_bins - 1);
        counts[k] += 1;
    }
    let n = samples.len().max(1) as f64;
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let l = lo + k as f64 * width;
            (l, l + width, c, c as f64 / (n * width))
        })
        .collect()
}

pub fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Evenly spaced grid of `n` points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
        .collect()
}
