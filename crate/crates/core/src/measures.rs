//! Bipartite correlation measures: Hilbert-Schmidt MIN, geometric discord,
//! affinity-based MIN, and the shared measurement-manifold optimizer.

use crate::error::{Error, Result};
use crate::hilbert::{partial_trace, sqrt_psd, CMat, DensityOperator};
use crate::measurement::{eigen_family, InvariantMeasurementFamily, ProjectiveMeasurement};

/// Multistart optimizer settings. Deterministic under a fixed seed.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub refine_iters: usize,
    pub step_tolerance: f64,
    pub value_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            refine_iters: 400,
            step_tolerance: 1e-9,
            value_tolerance: 1e-10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.refine_iters == 0 {
            return Err(Error::BadConfig("counts must be positive"));
        }
        if self.step_tolerance <= 0.0 || self.value_tolerance <= 0.0 {
            return Err(Error::BadConfig("tolerances must be positive"));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Max,
    Min,
}

/// One optimizer start: objective before and after local refinement.
#[derive(Debug, Clone)]
pub struct StartDiagnostic {
    pub label: String,
    pub initial: f64,
    pub converged: f64,
}

/// Best objective found, the measurement achieving it, and per-start
/// diagnostics (objective space, not measure space).
#[derive(Debug, Clone)]
pub struct Optimum {
    pub objective: f64,
    pub measurement: ProjectiveMeasurement,
    pub starts: Vec<StartDiagnostic>,
}

/// Outcome of a measure computation. `value` is in measure space;
/// `starts` hold raw objective values per optimizer start.
#[derive(Debug, Clone)]
pub struct MeasureResult {
    pub value: f64,
    pub optimal_measurement: ProjectiveMeasurement,
    pub starts: Vec<StartDiagnostic>,
    pub mode: Mode,
}

fn mix_seed(seed: u64, index: u64) -> u64 {
    // splitmix-style stream separation for restart seeds
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Compass search over the family's block parameters, minimizing `g`.
fn refine<G: FnMut(&[f64]) -> f64>(
    family: &InvariantMeasurementFamily,
    mut g: G,
    config: &OptimizerConfig,
) -> (Vec<f64>, f64) {
    let n = family.parameter_count();
    let mut params = vec![0.0; n];
    let mut best = g(&params);
    let mut step = 0.5;
    for _ in 0..config.refine_iters {
        let mut improved = false;
        for i in 0..n {
            for delta in [step, -step] {
                let saved = params[i];
                params[i] = saved + delta;
                let v = g(&params);
                if v < best - config.value_tolerance {
                    best = v;
                    improved = true;
                } else {
                    params[i] = saved;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < config.step_tolerance {
                break;
            }
        }
    }
    (params, best)
}

/// Multistart optimization of an objective over an invariant measurement
/// family. Starts from the eigenbasis, any compatible structured seed
/// bases, then `config.restarts` Haar-random bases, each refined by compass
/// search on the block parameters. Deterministic for a fixed seed. The
/// reported optimum is a certified bound from the best evaluation actually
/// performed, not a global-optimality certificate.
pub fn optimize<F>(
    objective: F,
    family: &InvariantMeasurementFamily,
    mode: Mode,
    seeds: &[(String, CMat)],
    config: &OptimizerConfig,
) -> Result<Optimum>
where
    F: Fn(&ProjectiveMeasurement) -> f64,
{
    config.validate()?;
    let sign = match mode {
        Mode::Min => 1.0,
        Mode::Max => -1.0,
    };
    let mut starts: Vec<(String, InvariantMeasurementFamily)> =
        vec![("eigen".to_string(), family.clone())];
    for (label, basis) in seeds {
        if let Ok(fam) = family.rebased(basis) {
            starts.push((label.clone(), fam));
        }
    }
    if !family.is_trivial() {
        for r in 0..config.restarts {
            let fam = family.rebased_haar(mix_seed(config.seed, r as u64 + 1));
            starts.push((format!("haar-{r}"), fam));
        }
    }

    let mut diagnostics = Vec::with_capacity(starts.len());
    let mut best: Option<(f64, ProjectiveMeasurement)> = None;
    for (label, fam) in starts {
        let eval = |params: &[f64]| {
            let meas = fam.measurement_at(params).expect("parameter count fixed");
            sign * objective(&meas)
        };
        let zero = vec![0.0; fam.parameter_count()];
        let initial_g = eval(&zero);
        let (params, converged_g) = if fam.is_trivial() {
            (zero, initial_g)
        } else {
            let mut e = eval;
            refine(&fam, &mut e, config)
        };
        let meas = fam.measurement_at(&params)?;
        diagnostics.push(StartDiagnostic {
            label,
            initial: sign * initial_g,
            converged: sign * converged_g,
        });
        if best.as_ref().map_or(true, |(g, _)| converged_g < *g) {
            best = Some((converged_g, meas));
        }
    }
    let (g, measurement) = best.expect("at least one start");
    Ok(Optimum {
        objective: sign * g,
        measurement,
        starts: diagnostics,
    })
}

/// Squared Hilbert-Schmidt disturbance of `rho` by a measurement on its
/// first factor.
pub fn hs_disturbance(rho: &DensityOperator, meas: &ProjectiveMeasurement) -> Result<f64> {
    let post = meas.apply(rho.matrix(), rho.dims())?;
    Ok((rho.matrix() - post).norm_squared())
}

/// `1 - Tr(sqrt(rho) Pi(sqrt(rho)))` for a measurement on the first factor.
pub fn affinity_disturbance(rho: &DensityOperator, meas: &ProjectiveMeasurement) -> Result<f64> {
    let root = sqrt_psd(rho)?;
    let post = meas.apply(&root, rho.dims())?;
    Ok(1.0 - (&root * post).trace().re)
}

fn marginal_family(rho: &DensityOperator) -> Result<InvariantMeasurementFamily> {
    rho.require_bipartite()?;
    let marginal = partial_trace(rho, &[0])?;
    Ok(eigen_family(&marginal, vec![0]))
}

/// Hilbert-Schmidt MIN: maximal squared HS-norm disturbance over invariant
/// measurements on the first subsystem.
pub fn hs_min(rho: &DensityOperator, config: &OptimizerConfig) -> Result<MeasureResult> {
    let family = marginal_family(rho)?;
    let opt = optimize(
        |meas| hs_disturbance(rho, meas).expect("dims fixed"),
        &family,
        Mode::Max,
        &[],
        config,
    )?;
    Ok(MeasureResult {
        value: opt.objective,
        optimal_measurement: opt.measurement,
        starts: opt.starts,
        mode: Mode::Max,
    })
}

/// Geometric discord: the minimal counterpart of `hs_min` over the same
/// measurement family.
pub fn geometric_discord(rho: &DensityOperator, config: &OptimizerConfig) -> Result<MeasureResult> {
    let family = marginal_family(rho)?;
    let opt = optimize(
        |meas| hs_disturbance(rho, meas).expect("dims fixed"),
        &family,
        Mode::Min,
        &[],
        config,
    )?;
    Ok(MeasureResult {
        value: opt.objective,
        optimal_measurement: opt.measurement,
        starts: opt.starts,
        mode: Mode::Min,
    })
}

/// Affinity-based MIN: `1 - min Tr(sqrt(rho) Pi^a(sqrt(rho)))` over
/// invariant measurements on the first subsystem.
pub fn affinity_min(rho: &DensityOperator, config: &OptimizerConfig) -> Result<MeasureResult> {
    let family = marginal_family(rho)?;
    let root = sqrt_psd(rho)?;
    let dims = rho.dims().to_vec();
    let opt = optimize(
        |meas| {
            let post = meas.apply(&root, &dims).expect("dims fixed");
            (&root * post).trace().re
        },
        &family,
        Mode::Min,
        &[],
        config,
    )?;
    Ok(MeasureResult {
        value: 1.0 - opt.objective,
        optimal_measurement: opt.measurement,
        starts: opt.starts,
        mode: Mode::Min,
    })
}
