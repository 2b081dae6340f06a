//! Synchronization and correspondence metrics.

use num_complex::Complex64;
use serde::Serialize;

use crate::complex::{self, norm_2};
use crate::error::{Error, Result};
use crate::sim::{ComplexTrajectory, RealTrajectory};

/// `(1/N) sum_k e^{i theta_k}`.
pub fn order_parameter(phases: &[f64]) -> Complex64 {
    if phases.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let sum: Complex64 = phases.iter().map(|&t| Complex64::from_polar(1.0, t)).sum();
    sum / phases.len() as f64
}

/// `(1/N) ||phi - theta||_1`.
pub fn mean_abs_error(phi_x: &[f64], theta: &[f64]) -> Result<f64> {
    if phi_x.len() != theta.len() {
        return Err(Error::LengthMismatch {
            expected: phi_x.len(),
            actual: theta.len(),
        });
    }
    if phi_x.is_empty() {
        return Ok(0.0);
    }
    Ok(phi_x.iter().zip(theta).map(|(a, b)| (a - b).abs()).sum::<f64>() / phi_x.len() as f64)
}

/// Reaching-time bound of the feedforward + sliding-mode law:
/// `sqrt(2)/alpha ||(|x0| - 1)||_2`.
pub fn reaching_bound_ff_smc(x0: &[Complex64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Precondition(format!("alpha must be positive, got {alpha}")));
    }
    let dev = x0.iter().map(|z| (z.norm() - 1.0).powi(2)).sum::<f64>().sqrt();
    Ok(2f64.sqrt() / alpha * dev)
}

/// Reaching-time bound of the prescribed-frequency sliding mode:
/// `sqrt(2)/eps2 ||x0 - 1||_2`.
pub fn reaching_bound_complex_smc(x0: &[Complex64], epsilon2: f64) -> Result<f64> {
    if !(epsilon2 > 0.0) {
        return Err(Error::NonpositiveMargin { margin: epsilon2 });
    }
    let s: Vec<Complex64> = x0.iter().map(|z| z - 1.0).collect();
    Ok(2f64.sqrt() / epsilon2 * norm_2(&s))
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MetricSeries {
    pub times: Vec<f64>,
    pub r_mod: Vec<f64>,
    pub r_arg: Vec<f64>,
    pub e_abs: Option<Vec<f64>>,
    /// Network-mean instantaneous frequency, rad/s (backward differences).
    pub freq_est: Option<Vec<f64>>,
}

impl MetricSeries {
    fn from_phases<'a>(times: &[f64], phases: impl Iterator<Item = &'a [f64]>) -> Self {
        let (r_mod, r_arg) = phases
            .map(|p| {
                let r = order_parameter(p);
                (r.norm(), complex::principal_arg(r))
            })
            .unzip();
        Self {
            times: times.to_vec(),
            r_mod,
            r_arg,
            e_abs: None,
            freq_est: None,
        }
    }

    /// Metrics of the complex model's arguments. When `reference` is given,
    /// the mean absolute error against it is included; both runs must start
    /// from matched phases and share the sample grid.
    pub fn from_complex(traj: &ComplexTrajectory, reference: Option<&RealTrajectory>) -> Result<Self> {
        let mut series = Self::from_phases(&traj.times, traj.states.iter().map(|s| s.unwrapped_args.as_slice()));
        series.freq_est = Some(mean_frequency_series(
            &traj.times,
            &traj.states.iter().map(|s| s.unwrapped_args.as_slice()).collect::<Vec<_>>(),
        ));
        if let Some(real) = reference {
            series.e_abs = Some(phase_error_series(traj, real)?);
        }
        Ok(series)
    }

    pub fn from_real(traj: &RealTrajectory) -> Self {
        let mut series = Self::from_phases(&traj.times, traj.states.iter().map(Vec::as_slice));
        series.freq_est = Some(mean_frequency_series(
            &traj.times,
            &traj.states.iter().map(Vec::as_slice).collect::<Vec<_>>(),
        ));
        series
    }

    pub fn duration(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

/// `e(t)` sample by sample. Refuses runs that do not share initial phases or
/// sample times.
pub fn phase_error_series(traj: &ComplexTrajectory, real: &RealTrajectory) -> Result<Vec<f64>> {
    if traj.times.len() != real.times.len()
        || traj.times.iter().zip(&real.times).any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::Precondition("complex and real runs use different sample times".into()));
    }
    let (Some(c0), Some(r0)) = (traj.states.first(), real.states.first()) else {
        return Ok(Vec::new());
    };
    if c0.unwrapped_args.len() != r0.len()
        || c0.unwrapped_args.iter().zip(r0).any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::Precondition(
            "phase error requires matched initial phases (theta0 = arg x0)".into(),
        ));
    }
    traj.states
        .iter()
        .zip(&real.states)
        .map(|(c, r)| mean_abs_error(&c.unwrapped_args, r))
        .collect()
}

fn mean_frequency_series(times: &[f64], phases: &[&[f64]]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    for i in 1..times.len() {
        let dt = times[i] - times[i - 1];
        let n = phases[i].len().max(1) as f64;
        let mean = phases[i].iter().zip(phases[i - 1]).map(|(a, b)| (a - b) / dt).sum::<f64>() / n;
        out.push(mean);
    }
    if let Some(&first) = out.first() {
        out.insert(0, first);
    } else if !times.is_empty() {
        out.push(0.0);
    }
    out
}

/// Per-oscillator mean frequency over `[from, end]`, from unwrapped arguments.
pub fn mean_frequencies(traj: &ComplexTrajectory, from: f64) -> Option<Vec<f64>> {
    let start = traj.times.iter().position(|&t| t >= from - 1e-12)?;
    let end = traj.times.len() - 1;
    if end <= start {
        return None;
    }
    let span = traj.times[end] - traj.times[start];
    Some(
        traj.states[end]
            .unwrapped_args
            .iter()
            .zip(&traj.states[start].unwrapped_args)
            .map(|(b, a)| (b - a) / span)
            .collect(),
    )
}

/// Trapezoidal time average of `values` over samples with `t >= from`.
pub fn time_average(times: &[f64], values: &[f64], from: f64) -> Option<f64> {
    let start = times.iter().position(|&t| t >= from - 1e-12)?;
    let (ts, vs) = (&times[start..], &values[start..]);
    match ts.len() {
        0 => None,
        1 => Some(vs[0]),
        _ => {
            let area: f64 = ts.windows(2).zip(vs.windows(2)).map(|(t, v)| (t[1] - t[0]) * (v[0] + v[1]) / 2.0).sum();
            Some(area / (ts[ts.len() - 1] - ts[0]))
        }
    }
}

pub const DEFAULT_SYNC_THRESHOLD: f64 = 0.99;
pub const DEFAULT_FAIL_THRESHOLD: f64 = 0.8;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyncVerdict {
    pub synced: bool,
    pub tail_mean_r: f64,
}

/// Time-averaged `|r|` over the final `tail` seconds against `threshold`.
pub fn sync_verdict(series: &MetricSeries, tail: f64, threshold: f64) -> Result<SyncVerdict> {
    let duration = series.duration();
    if !(tail > 0.0) || !(tail < duration) {
        return Err(Error::Precondition(format!("tail {tail} must lie in (0, {duration})")));
    }
    let end = *series.times.last().expect("nonempty series");
    let tail_mean_r = time_average(&series.times, &series.r_mod, end - tail).expect("tail window has samples");
    Ok(SyncVerdict {
        synced: tail_mean_r >= threshold,
        tail_mean_r,
    })
}
