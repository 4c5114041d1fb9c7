//! The affinity-based nonbilocal correlation measure for tensorized
//! bipartite inputs, its pure-state closed formula, the MIN inequality, and
//! the eigenvalue upper bounds with the qubit closed form.

use crate::basis::{build_basis, joint_lambda, lambda_of, LambdaKind};
use crate::error::{Error, Result};
use crate::hilbert::{
    partial_trace, schmidt, sqrt_psd, swap_bipartite, tensor, CMat, DensityOperator, Ket,
    DIMENSION_CAP,
};
use crate::measurement::{
    eigen_family, eigen_measurement, structured_bases, ProjectiveMeasurement,
};
use crate::measures::{affinity_min, optimize, MeasureResult, Mode, OptimizerConfig};

/// Pair of bipartite input states; the joint system is ordered
/// `(a, b, c, d)` with the measured pair `(b, c)` in the middle.
#[derive(Debug, Clone)]
pub struct BilocalInput {
    rho_ab: DensityOperator,
    rho_cd: DensityOperator,
}

impl BilocalInput {
    pub fn new(rho_ab: DensityOperator, rho_cd: DensityOperator) -> Result<Self> {
        rho_ab.require_bipartite()?;
        rho_cd.require_bipartite()?;
        if rho_ab.dim() * rho_cd.dim() > DIMENSION_CAP {
            return Err(Error::DimensionCap {
                dim: rho_ab.dim() * rho_cd.dim(),
                cap: DIMENSION_CAP,
            });
        }
        Ok(Self { rho_ab, rho_cd })
    }

    pub fn rho_ab(&self) -> &DensityOperator {
        &self.rho_ab
    }

    pub fn rho_cd(&self) -> &DensityOperator {
        &self.rho_cd
    }

    /// Joint state `rho_ab (x) rho_cd` with dims `(m, n, u, v)`.
    pub fn joint(&self) -> Result<DensityOperator> {
        tensor(&self.rho_ab, &self.rho_cd)
    }

    /// Marginal of the measured pair: `rho^bc = Tr_ad(rho_ab (x) rho_cd)`.
    pub fn bc_marginal(&self) -> Result<DensityOperator> {
        partial_trace(&self.joint()?, &[1, 2])
    }
}

/// Affinity disturbance of the joint state by a measurement on `(b, c)`.
pub fn nonbilocal_value_at(input: &BilocalInput, meas: &ProjectiveMeasurement) -> Result<f64> {
    let tau = input.joint()?;
    let root = sqrt_psd(&tau)?;
    let post = meas.apply(&root, tau.dims())?;
    Ok(1.0 - (&root * post).trace().re)
}

/// Nonbilocal measure: `1 - min Tr(sqrt(tau) Pi^bc(sqrt(tau)))` over
/// measurements on `(b, c)` that leave `rho^bc` invariant.
pub fn nonbilocal(input: &BilocalInput, config: &OptimizerConfig) -> Result<MeasureResult> {
    let tau = input.joint()?;
    let root = sqrt_psd(&tau)?;
    let dims = tau.dims().to_vec();
    let bc = input.bc_marginal()?;
    let family = eigen_family(&bc, vec![1, 2]);
    let seeds = structured_bases(bc.dims());
    let opt = optimize(
        |meas| {
            let post = meas.apply(&root, &dims).expect("dims fixed");
            (&root * post).trace().re
        },
        &family,
        Mode::Min,
        &seeds,
        config,
    )?;
    Ok(MeasureResult {
        value: 1.0 - opt.objective,
        optimal_measurement: opt.measurement,
        starts: opt.starts,
        mode: Mode::Min,
    })
}

/// Closed formula for pure inputs: `1 - (sum_i s_i^4)(sum_j r_j^4)` with
/// the Schmidt coefficients in the amplitude convention.
pub fn nonbilocal_pure(psi_ab: &Ket, psi_cd: &Ket) -> Result<f64> {
    let s = schmidt(psi_ab)?;
    let r = schmidt(psi_cd)?;
    let s4: f64 = s.coefficients.iter().map(|c| c.powi(4)).sum();
    let r4: f64 = r.coefficients.iter().map(|c| c.powi(4)).sum();
    Ok(1.0 - s4 * r4)
}

/// Outcome of the self-pair inequality check
/// `N_A(rho_ba (x) rho_ab) >= N_A^MIN(rho)`.
#[derive(Debug, Clone)]
pub struct Thm1Report {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn verify_thm1(rho: &DensityOperator, config: &OptimizerConfig) -> Result<Thm1Report> {
    let swapped = swap_bipartite(rho)?;
    let input = BilocalInput::new(swapped, rho.clone())?;
    let lhs = nonbilocal(&input, config)?.value;
    let rhs = affinity_min(rho, config)?.value;
    Ok(Thm1Report {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-6,
    })
}

fn marginal_lambdas(input: &BilocalInput) -> Result<(crate::basis::LambdaMatrix, crate::basis::LambdaMatrix)> {
    let (m, n) = (input.rho_ab.dims()[0], input.rho_ab.dims()[1]);
    let (u, v) = (input.rho_cd.dims()[0], input.rho_cd.dims()[1]);
    let lab = lambda_of(
        &input.rho_ab,
        &build_basis(m)?,
        &build_basis(n)?,
        LambdaKind::Ab,
    )?;
    let lcd = lambda_of(
        &input.rho_cd,
        &build_basis(u)?,
        &build_basis(v)?,
        LambdaKind::Cd,
    )?;
    Ok((lab, lcd))
}

/// Upper bound of the nonbilocal measure: one minus the sum of the
/// `n * u` smallest eigenvalues of the joint lambda Gram matrix.
pub fn bound_thm3(input: &BilocalInput) -> Result<f64> {
    let (lab, lcd) = marginal_lambdas(input)?;
    let joint = joint_lambda(&lab, &lcd)?;
    let nu = input.rho_ab.dims()[1] * input.rho_cd.dims()[0];
    let eigs = joint.gram_eigenvalues_asc();
    Ok(1.0 - eigs.iter().take(nu).sum::<f64>())
}

/// Affinity between `rho_ab` and its post-measurement state under the
/// eigen-measurement of a nondegenerate `rho^b`.
fn affinity_after_b_eigen(input: &BilocalInput) -> Result<f64> {
    let rho_b = partial_trace(&input.rho_ab, &[1])?;
    let pi_b = eigen_measurement(&rho_b, vec![1])?;
    let root = sqrt_psd(&input.rho_ab)?;
    let post = pi_b.apply(&root, input.rho_ab.dims())?;
    Ok((&root * post).trace().re)
}

/// Upper bound for nondegenerate `rho^b`: one minus the `b`-eigenbasis
/// affinity times the sum of the `u` smallest eigenvalues of
/// `Lambda_cd Lambda_cd^t`. Errors when `rho^b` is degenerate.
pub fn bound_thm4(input: &BilocalInput) -> Result<f64> {
    let aff_b = affinity_after_b_eigen(input)?;
    let (_, lcd) = marginal_lambdas(input)?;
    let u = input.rho_cd.dims()[0];
    let eigs = lcd.gram_eigenvalues_asc();
    Ok(1.0 - aff_b * eigs.iter().take(u).sum::<f64>())
}

/// The qubit-`c` closed form, reported two ways.
///
/// `closed_value` follows the printed expression
/// `1 - A * (||lambda_cd|| + lambda_min)` with `lambda_cd` the first row of
/// `Lambda_cd` and `lambda_min` the least eigenvalue of the Gram matrix of
/// the remaining rows. `direct_min_value` minimizes
/// `Tr(sqrt(rho_cd) Pi^c(sqrt(rho_cd)))` over rank-1 qubit measurements
/// numerically and is the authoritative number; `discrepancy` flags any gap
/// between the two.
#[derive(Debug, Clone)]
pub struct Thm5Report {
    pub closed_value: f64,
    pub direct_min_value: f64,
    pub discrepancy: f64,
}

pub fn thm5_closed(input: &BilocalInput) -> Result<Thm5Report> {
    let u = input.rho_cd.dims()[0];
    if u != 2 {
        return Err(Error::DimensionMismatch(u, 2));
    }
    let rho_b = partial_trace(&input.rho_ab, &[1])?;
    if !rho_b.is_nondegenerate() {
        return Err(Error::DegenerateMarginal);
    }
    let rho_c = partial_trace(&input.rho_cd, &[0])?;
    if !rho_c.is_nondegenerate() {
        return Err(Error::DegenerateMarginal);
    }
    let aff_b = affinity_after_b_eigen(input)?;
    let (_, lcd) = marginal_lambdas(input)?;

    // printed expression
    let entries = lcd.entries();
    let v2 = entries.ncols();
    let row0_norm: f64 = (0..v2).map(|l| entries[(0, l)].powi(2)).sum::<f64>().sqrt();
    let lower = entries.rows(1, 3).into_owned();
    let gram = &lower * lower.transpose();
    let mut eigs: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let closed_value = 1.0 - aff_b * (row0_norm + eigs[0]);

    // direct minimization over rank-1 qubit measurements on c
    let min_c = min_qubit_affinity(&input.rho_cd)?;
    let direct_min_value = 1.0 - aff_b * min_c;

    Ok(Thm5Report {
        closed_value,
        direct_min_value,
        discrepancy: (closed_value - direct_min_value).abs(),
    })
}

/// Minimum of `Tr(sqrt(rho_cd) Pi^c(sqrt(rho_cd)))` over all rank-1 qubit
/// measurements on the first factor, by multistart compass search over the
/// Bloch sphere.
pub fn min_qubit_affinity(rho_cd: &DensityOperator) -> Result<f64> {
    rho_cd.require_bipartite()?;
    if rho_cd.dims()[0] != 2 {
        return Err(Error::DimensionMismatch(rho_cd.dims()[0], 2));
    }
    let root = sqrt_psd(rho_cd)?;
    let dims = rho_cd.dims().to_vec();
    let eval = |theta: f64, phi: f64| -> f64 {
        let meas = bloch_measurement(theta, phi);
        let post = meas.apply(&root, &dims).expect("qubit dims");
        (&root * post).trace().re
    };
    let starts = [
        (0.0, 0.0),
        (std::f64::consts::FRAC_PI_2, 0.0),
        (std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
        (std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4),
        (2.0, 4.0),
        (1.0, 2.5),
    ];
    let mut best = f64::INFINITY;
    for &(t0, p0) in &starts {
        let (mut t, mut p) = (t0, p0);
        let mut val = eval(t, p);
        let mut step = 0.5;
        while step > 1e-10 {
            let mut improved = false;
            for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let v = eval(t + dt, p + dp);
                if v < val - 1e-14 {
                    t += dt;
                    p += dp;
                    val = v;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.min(val);
    }
    Ok(best)
}

/// Rank-1 qubit measurement along the Bloch direction `(theta, phi)`,
/// acting on subsystem 0.
fn bloch_measurement(theta: f64, phi: f64) -> ProjectiveMeasurement {
    use crate::hilbert::C64;
    let n = [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ];
    let mut m = CMat::zeros(2, 2);
    m[(0, 0)] = C64::from(n[2]);
    m[(1, 1)] = C64::from(-n[2]);
    m[(0, 1)] = C64::new(n[0], -n[1]);
    m[(1, 0)] = C64::new(n[0], n[1]);
    let id = CMat::identity(2, 2);
    let p_plus = (&id + &m) * C64::from(0.5);
    let p_minus = (&id - &m) * C64::from(0.5);
    ProjectiveMeasurement::new(vec![0], vec![p_plus, p_minus]).expect("bloch projectors")
}

/// Numeric value plus every applicable bound, with the ordering check.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub value_numeric: f64,
    pub thm3_upper: f64,
    pub thm4_upper: Option<f64>,
    pub thm5_closed: Option<f64>,
    pub thm5_direct: Option<f64>,
    pub ordering_ok: bool,
}

pub fn bound_report(input: &BilocalInput, config: &OptimizerConfig) -> Result<BoundReport> {
    let value_numeric = nonbilocal(input, config)?.value;
    let thm3_upper = bound_thm3(input)?;
    let thm4_upper = bound_thm4(input).ok();
    let (thm5_closed_v, thm5_direct) = match thm5_closed(input) {
        Ok(r) => (Some(r.closed_value), Some(r.direct_min_value)),
        Err(_) => (None, None),
    };
    let mut ordering_ok = value_numeric <= thm3_upper + 1e-7;
    if let Some(b4) = thm4_upper {
        ordering_ok &= value_numeric <= b4 + 1e-7;
    }
    Ok(BoundReport {
        value_numeric,
        thm3_upper,
        thm4_upper,
        thm5_closed: thm5_closed_v,
        thm5_direct,
        ordering_ok,
    })
}
