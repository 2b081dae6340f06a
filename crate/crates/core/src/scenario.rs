//! Scenario files, seeded runs, parameter sweeps and the shipped presets.
//!
//! A scenario is a JSON document. Units: frequencies and `omega_bar` in
//! rad/s, `sigma`, `alpha`, `gain` and `mu` in 1/s, `window`, `dt`,
//! `t_end` and `tail` in seconds, phases in rad.
//!
//! ```json
//! {
//!   "name": "fig2",
//!   "network": {"type": "er", "n": 100, "p": 0.2, "seed": 11},
//!   "omega": {"dist": {"type": "constant", "value": 6.283185307179586}, "seed": 1},
//!   "sigma": 0.25,
//!   "controller": {"type": "ff_smc", "alpha": 10.0},
//!   "init": {"type": "annulus", "phase_seed": 12, "modulus_low": 0.0,
//!            "modulus_high": 2.0, "modulus_seed": 13},
//!   "sim": {"dt": 0.001, "t_end": 10.0, "record_stride": 10},
//!   "reference": true,
//!   "outputs": ["csv", "plots", "summary"]
//! }
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::control::{self, ControllerSpec};
use crate::dynamics::ComplexState;
use crate::error::{Error, Result};
use crate::metrics::{self, MetricSeries, DEFAULT_FAIL_THRESHOLD, DEFAULT_SYNC_THRESHOLD, DEFAULT_TAIL_FRACTION};
use crate::network::{self, FrequencyDist, Network, OscParams};
use crate::output;
use crate::rng::{self, SplitMix64};
use crate::sim::{self, ComplexTrajectory, EventKind, RealTrajectory, SimConfig, Surface};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkSource {
    Er { n: usize, p: f64, seed: u64 },
    /// Edge-list file; relative paths resolve against the scenario file.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    pub dist: FrequencyDist,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Gains {
    Uniform(f64),
    PerNode(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuRule {
    /// `mu = sigma * degrees`
    Degree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MuSpec {
    Rule(MuRule),
    PerNode(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ControllerConfig {
    None,
    SwitchedFf,
    FfSmc { alpha: f64 },
    ComplexSmc { gain: Gains, omega_bar: f64 },
    Roberts { mu: MuSpec },
    HybridReset { window: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    /// `x0 = e^{i theta0}`, `theta0 ~ U(-pi, pi)`.
    UnitCircle { phase_seed: u64 },
    /// Moduli `~ U(modulus_low, modulus_high)` on top of the same phases.
    Annulus {
        phase_seed: u64,
        modulus_low: f64,
        modulus_high: f64,
        modulus_seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Csv,
    Plots,
    Summary,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Summary]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub network: NetworkSource,
    pub omega: OmegaSpec,
    pub sigma: f64,
    pub controller: ControllerConfig,
    pub init: InitSpec,
    pub sim: SimConfig,
    /// Also run the real phase model from `theta0 = arg x0`.
    #[serde(default)]
    pub reference: bool,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    /// Averaging window for verdicts, seconds; defaults to the last quarter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<f64>,
}

/// Command-line values shadowing scenario fields.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    /// Replaces every seed with one derived from this master.
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub delta: Option<f64>,
}

/// Everything a run needs, materialized from a scenario.
#[derive(Debug, Clone)]
pub struct Instance {
    pub network: Network,
    pub params: OscParams,
    pub controller: ControllerSpec,
    pub x0: Vec<Complex64>,
}

impl Instance {
    /// Phases the reference run starts from: exactly the lifted `arg x0`.
    pub fn theta0(&self) -> Vec<f64> {
        ComplexState::new(self.x0.clone()).unwrapped_args
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut scenario = Self::from_json(&text)?;
        if let NetworkSource::File { path: p } = &mut scenario.network {
            if p.is_relative() {
                *p = path.parent().unwrap_or(Path::new(".")).join(&*p);
            }
        }
        if scenario.name.is_empty() {
            scenario.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        }
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(master) = o.seed {
            self.reseed(master, 0);
        }
        if let Some(dt) = o.dt {
            self.sim.dt = dt;
        }
        if let Some(delta) = o.delta {
            self.sim.boundary_layer_delta = delta;
        }
    }

    /// Sets all seeds from `(master, replicate)`.
    pub fn reseed(&mut self, master: u64, replicate: u64) {
        let seed = |slot: u64| rng::derive_seed(master, 4 * replicate + slot);
        if let NetworkSource::Er { seed: s, .. } = &mut self.network {
            *s = seed(0);
        }
        self.omega.seed = seed(1);
        match &mut self.init {
            InitSpec::UnitCircle { phase_seed } => *phase_seed = seed(2),
            InitSpec::Annulus {
                phase_seed, modulus_seed, ..
            } => {
                *phase_seed = seed(2);
                *modulus_seed = seed(3);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if let NetworkSource::Er { n, p, .. } = self.network {
            if n == 0 {
                return Err(Error::Config("network must have at least one node".into()));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("edge probability {p} outside [0, 1]")));
            }
        }
        if let InitSpec::Annulus {
            modulus_low,
            modulus_high,
            ..
        } = self.init
        {
            if !(modulus_low >= 0.0) || !(modulus_low < modulus_high) || !modulus_high.is_finite() {
                return Err(Error::Config(format!(
                    "annulus needs 0 <= modulus_low < modulus_high, got [{modulus_low}, {modulus_high}]"
                )));
            }
        }
        if let Some(tail) = self.tail {
            if !(tail > 0.0 && tail < self.sim.t_end) {
                return Err(Error::Config(format!("tail {tail} must lie in (0, t_end)")));
            }
        }
        match &self.controller {
            ControllerConfig::FfSmc { alpha } if !(*alpha > 0.0) => {
                return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
            }
            ControllerConfig::HybridReset { window } if !(*window > 0.0) => {
                return Err(Error::Config(format!("window must be positive, got {window}")));
            }
            _ => {}
        }
        self.sim.validate()
    }

    pub fn build_network(&self) -> Result<Network> {
        match &self.network {
            NetworkSource::Er { n, p, seed } => network::erdos_renyi(*n, *p, *seed),
            NetworkSource::File { path } => network::load_adjacency(path),
        }
    }

    pub fn instantiate(&self) -> Result<Instance> {
        self.validate()?;
        let net = self.build_network()?;
        let n = net.n();
        let omega = network::sample_frequencies(n, self.omega.dist, self.omega.seed)?;
        let params = OscParams::new(omega, self.sigma)?;
        let controller = match &self.controller {
            ControllerConfig::None => ControllerSpec::None,
            ControllerConfig::SwitchedFf => ControllerSpec::SwitchedFf,
            ControllerConfig::FfSmc { alpha } => ControllerSpec::FfSmc { alpha: *alpha },
            ControllerConfig::ComplexSmc { gain, omega_bar } => ControllerSpec::ComplexSmc {
                gains: match gain {
                    Gains::Uniform(k) => vec![*k; n],
                    Gains::PerNode(k) => k.clone(),
                },
                omega_bar: *omega_bar,
            },
            ControllerConfig::Roberts { mu } => ControllerSpec::Roberts {
                mu: match mu {
                    MuSpec::Rule(MuRule::Degree) => control::roberts_mu_degree(&net, &params)?,
                    MuSpec::PerNode(m) => m.clone(),
                },
            },
            ControllerConfig::HybridReset { window } => ControllerSpec::HybridReset { window: *window },
        };
        controller.validate(n)?;
        let x0 = initial_state(n, &self.init);
        Ok(Instance {
            network: net,
            params,
            controller,
            x0,
        })
    }

    /// SHA-256 over the canonical scenario JSON and the realized edge list.
    pub fn hash(&self, net: &Network) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(self).expect("scenario serializes"));
        h.update(net.to_edge_list().as_bytes());
        hex::encode(h.finalize())
    }

    pub fn tail_seconds(&self) -> f64 {
        self.tail.unwrap_or(DEFAULT_TAIL_FRACTION * self.sim.t_end)
    }
}

/// `x0 = m_k e^{i theta_k}` with `theta ~ U(-pi, pi)` and `m` per `init`.
pub fn initial_state(n: usize, init: &InitSpec) -> Vec<Complex64> {
    let (phase_seed, moduli) = match *init {
        InitSpec::UnitCircle { phase_seed } => (phase_seed, vec![1.0; n]),
        InitSpec::Annulus {
            phase_seed,
            modulus_low,
            modulus_high,
            modulus_seed,
        } => {
            let mut g = SplitMix64::new(modulus_seed);
            (phase_seed, (0..n).map(|_| g.uniform(modulus_low, modulus_high)).collect())
        }
    };
    let mut g = SplitMix64::new(phase_seed);
    moduli.into_iter().map(|m| Complex64::from_polar(m, g.uniform(-PI, PI))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Synced,
    Partial,
    NotSynced,
}

impl Verdict {
    pub fn classify(tail_mean_r: f64) -> Self {
        if tail_mean_r >= DEFAULT_SYNC_THRESHOLD {
            Verdict::Synced
        } else if tail_mean_r <= DEFAULT_FAIL_THRESHOLD {
            Verdict::NotSynced
        } else {
            Verdict::Partial
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub hash: String,
    pub rng: String,
    pub controller: String,
    pub n: usize,
    pub edges: usize,
    pub dt: f64,
    pub t_end: f64,
    pub boundary_layer_delta: f64,
    pub reaching_time: Option<f64>,
    pub reaching_tol: Option<f64>,
    pub reaching_bound: Option<f64>,
    pub epsilon2: Option<f64>,
    pub tail_seconds: f64,
    pub tail_mean_r: f64,
    pub tail_mean_r_real: Option<f64>,
    pub verdict: Verdict,
    pub verdict_real: Option<Verdict>,
    pub final_e: Option<f64>,
    pub max_e: Option<f64>,
    /// Time average of `e` over the tail window.
    pub steady_e: Option<f64>,
    /// Least-squares slope of `e` over the tail window (after reaching), rad/s.
    pub e_drift: Option<f64>,
    pub max_modulus_dev: f64,
    pub post_reach_modulus_dev: Option<f64>,
    /// Network-mean frequency over the tail window, rad/s.
    pub tail_frequency: Option<f64>,
    /// Worst per-oscillator relative deviation from `omega_bar` after reaching.
    pub frequency_lock_error: Option<f64>,
    pub resets: usize,
    pub max_reset_phase_jump: Option<f64>,
    pub guard_trips: usize,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub trajectory: ComplexTrajectory,
    pub reference: Option<RealTrajectory>,
    pub series: MetricSeries,
    pub reference_series: Option<MetricSeries>,
}

/// Executes a scenario. Fails with an acceptance error when a measured
/// reaching time exceeds its theoretical bound.
pub fn run_scenario(scenario: &Scenario) -> Result<RunOutcome> {
    let start = Instant::now();
    let inst = scenario.instantiate()?;
    let hash = scenario.hash(&inst.network);
    let cfg = scenario.sim;
    let traj = sim::run_complex(&inst.x0, &inst.network, &inst.params, &inst.controller, &cfg)?;
    let reference = if scenario.reference {
        Some(sim::run_real(&inst.theta0(), &inst.network, &inst.params, &cfg)?)
    } else {
        None
    };
    let series = MetricSeries::from_complex(&traj, reference.as_ref())?;
    let reference_series = reference.as_ref().map(MetricSeries::from_real);

    let tail = scenario.tail_seconds();
    let tail_from = cfg.t_end - tail;
    let tail_mean_r = metrics::sync_verdict(&series, tail, DEFAULT_SYNC_THRESHOLD)?.tail_mean_r;
    let tail_mean_r_real = reference_series
        .as_ref()
        .map(|s| metrics::sync_verdict(s, tail, DEFAULT_FAIL_THRESHOLD).map(|v| v.tail_mean_r))
        .transpose()?;

    let (surface, gain, reaching_bound, epsilon2) = match &inst.controller {
        ControllerSpec::FfSmc { alpha } => (
            Some(Surface::UnitModulus),
            *alpha,
            Some(metrics::reaching_bound_ff_smc(&inst.x0, *alpha)?),
            None,
        ),
        ControllerSpec::ComplexSmc { gains, omega_bar } => {
            let d = control::gain_margin(gains, &inst.params, inst.network.n(), *omega_bar, Some(&inst.x0));
            let k_min = gains.iter().copied().fold(f64::INFINITY, f64::min);
            (
                Some(Surface::PrescribedLock { omega_bar: *omega_bar }),
                k_min,
                d.reaching_bound,
                Some(d.epsilon2),
            )
        }
        _ => (None, 0.0, None, None),
    };
    let reaching_tol = surface.map(|_| sim::default_reaching_tol(gain, cfg.dt));
    let reaching_time = surface.and_then(|s| sim::detect_reaching(&traj, s, reaching_tol.expect("set with surface")));
    if let Some(bound) = reaching_bound {
        let violated = match reaching_time {
            Some(t) => t > bound,
            None => bound < cfg.t_end,
        };
        if violated {
            return Err(Error::Acceptance(format!(
                "measured reaching time {reaching_time:?} exceeds the bound {bound}"
            )));
        }
    }

    let modulus_dev = |s: &ComplexState| s.x.iter().fold(0.0f64, |m, z| m.max((z.norm() - 1.0).abs()));
    let max_modulus_dev = traj.states.iter().map(modulus_dev).fold(0.0, f64::max);
    let reach_index = reaching_time.and_then(|t| traj.times.iter().position(|&s| s >= t));
    let post_reach_modulus_dev = reach_index.map(|i| traj.states[i..].iter().map(modulus_dev).fold(0.0, f64::max));

    let (final_e, max_e, steady_e, e_drift) = match &series.e_abs {
        Some(e) => {
            let drift_from = reaching_time.map_or(tail_from, |t| t.max(tail_from));
            (
                e.last().copied(),
                Some(e.iter().copied().fold(0.0, f64::max)),
                metrics::time_average(&series.times, e, tail_from),
                ls_slope(&series.times, e, drift_from).map(f64::abs),
            )
        }
        None => (None, None, None, None),
    };

    let tail_frequency = metrics::mean_frequencies(&traj, tail_from).map(|f| f.iter().sum::<f64>() / f.len() as f64);
    let frequency_lock_error = match (&inst.controller, reaching_time) {
        (ControllerSpec::ComplexSmc { omega_bar, .. }, Some(t)) if *omega_bar != 0.0 => metrics::mean_frequencies(&traj, t)
            .map(|f| f.iter().map(|w| (w / omega_bar - 1.0).abs()).fold(0.0, f64::max)),
        _ => None,
    };

    let resets: Vec<_> = traj.events_of(EventKind::Reset).collect();
    let summary = RunSummary {
        name: scenario.name.clone(),
        hash,
        rng: rng::ALGORITHM.into(),
        controller: inst.controller.name().into(),
        n: inst.network.n(),
        edges: inst.network.edge_count(),
        dt: cfg.dt,
        t_end: cfg.t_end,
        boundary_layer_delta: cfg.boundary_layer_delta,
        reaching_time,
        reaching_tol,
        reaching_bound,
        epsilon2,
        tail_seconds: tail,
        tail_mean_r,
        tail_mean_r_real,
        verdict: Verdict::classify(tail_mean_r),
        verdict_real: tail_mean_r_real.map(Verdict::classify),
        final_e,
        max_e,
        steady_e,
        e_drift,
        max_modulus_dev,
        post_reach_modulus_dev,
        tail_frequency,
        frequency_lock_error,
        resets: resets.len(),
        max_reset_phase_jump: resets.iter().filter_map(|e| e.phase_jump).reduce(f64::max),
        guard_trips: traj.events_of(EventKind::GuardTrip).count(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutcome {
        summary,
        trajectory: traj,
        reference,
        series,
        reference_series,
    })
}

/// Least-squares slope of `v` against `t` over samples with `t >= from`.
fn ls_slope(t: &[f64], v: &[f64], from: f64) -> Option<f64> {
    let start = t.iter().position(|&s| s >= from - 1e-12)?;
    let (t, v) = (&t[start..], &v[start..]);
    if t.len() < 2 {
        return None;
    }
    let m = t.len() as f64;
    let (tm, vm) = (t.iter().sum::<f64>() / m, v.iter().sum::<f64>() / m);
    let (mut num, mut den) = (0.0, 0.0);
    for (a, b) in t.iter().zip(v) {
        num += (a - tm) * (b - vm);
        den += (a - tm) * (a - tm);
    }
    Some(num / den)
}

/// Writes the declared outputs of a finished run into `outdir`.
pub fn write_outputs(outcome: &RunOutcome, outputs: &[OutputKind], outdir: &Path) -> Result<Vec<PathBuf>> {
    output::ensure_dir(outdir)?;
    let mut written = Vec::new();
    if outputs.contains(&OutputKind::Csv) {
        let path = outdir.join("trajectory.csv");
        output::write_trajectory_csv(&path, &outcome.trajectory, &outcome.series)?;
        written.push(path);
    }
    if outputs.contains(&OutputKind::Plots) {
        let reference_r = outcome.reference_series.as_ref().map(|s| s.r_mod.as_slice());
        written.extend(output::emit_plots(
            &outcome.trajectory,
            &outcome.series,
            reference_r,
            &outdir.join("plots"),
        )?);
    }
    if outputs.contains(&OutputKind::Summary) {
        let path = outdir.join("summary.json");
        let text = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Alpha,
    Window,
    Gain,
    OmegaBar,
    Sigma,
    Dt,
    Delta,
    TEnd,
    P,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Alpha => "alpha",
            SweepParam::Window => "window",
            SweepParam::Gain => "gain",
            SweepParam::OmegaBar => "omega_bar",
            SweepParam::Sigma => "sigma",
            SweepParam::Dt => "dt",
            SweepParam::Delta => "delta",
            SweepParam::TEnd => "t_end",
            SweepParam::P => "p",
        }
    }

    fn apply(self, s: &mut Scenario, v: f64) -> Result<()> {
        let mismatch = || Error::Config(format!("sweep axis '{}' does not apply to this scenario", self.name()));
        match (self, &mut s.controller, &mut s.network) {
            (SweepParam::Alpha, ControllerConfig::FfSmc { alpha }, _) => *alpha = v,
            (SweepParam::Window, ControllerConfig::HybridReset { window }, _) => *window = v,
            (SweepParam::Gain, ControllerConfig::ComplexSmc { gain, .. }, _) => *gain = Gains::Uniform(v),
            (SweepParam::OmegaBar, ControllerConfig::ComplexSmc { omega_bar, .. }, _) => *omega_bar = v,
            (SweepParam::P, _, NetworkSource::Er { p, .. }) => *p = v,
            (SweepParam::Sigma, _, _) => s.sigma = v,
            (SweepParam::Dt, _, _) => s.sim.dt = v,
            (SweepParam::Delta, _, _) => s.sim.boundary_layer_delta = v,
            (SweepParam::TEnd, _, _) => s.sim.t_end = v,
            _ => return Err(mismatch()),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Cartesian product of `axes` applied to `base`, repeated `replicates`
/// times. Seeds come from `(master_seed, replicate)`, so all parameter
/// combinations of one replicate share their random draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: Scenario,
    pub axes: Vec<SweepAxis>,
    pub master_seed: u64,
    #[serde(default = "one")]
    pub replicates: u64,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub index: usize,
    pub replicate: u64,
    pub values: Vec<f64>,
    pub result: std::result::Result<RunSummary, (i32, String)>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        if let NetworkSource::File { path: p } = &mut cfg.base.network {
            if p.is_relative() {
                *p = path.parent().unwrap_or(Path::new(".")).join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Expands the sweep into `(replicate, axis values, scenario)` triples in
    /// deterministic order (replicate-major, last axis fastest).
    pub fn expand(&self) -> Result<Vec<(u64, Vec<f64>, Scenario)>> {
        if self.axes.is_empty() {
            return Err(Error::Config("sweep needs at least one axis".into()));
        }
        if let Some(axis) = self.axes.iter().find(|a| a.values.is_empty()) {
            return Err(Error::Config(format!("sweep axis '{}' has no values", axis.param.name())));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        let combos = self.axes.iter().fold(vec![Vec::new()], |acc, axis| {
            acc.into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |v| {
                        let mut p: Vec<f64> = prefix.clone();
                        p.push(*v);
                        p
                    })
                })
                .collect()
        });
        let mut runs = Vec::new();
        for rep in 0..self.replicates {
            for values in &combos {
                let mut s = self.base.clone();
                s.reseed(self.master_seed, rep);
                for (axis, v) in self.axes.iter().zip(values) {
                    axis.param.apply(&mut s, *v)?;
                }
                let label: Vec<String> = self.axes.iter().zip(values).map(|(a, v)| format!("{}={v}", a.param.name())).collect();
                s.name = format!("{}[r{rep},{}]", self.base.name, label.join(","));
                runs.push((rep, values.clone(), s));
            }
        }
        Ok(runs)
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["run".to_string(), "replicate".to_string()];
        h.extend(self.axes.iter().map(|a| a.param.name().to_string()));
        h.extend(
            [
                "status",
                "exit_code",
                "error",
                "hash",
                "reaching_time",
                "reaching_bound",
                "tail_mean_r",
                "tail_mean_r_real",
                "final_e",
                "max_e",
                "steady_e",
                "e_drift",
                "max_modulus_dev",
                "resets",
                "wall_clock_seconds",
            ]
            .map(String::from),
        );
        h
    }
}

/// Runs every combination (in parallel) and returns rows in expansion order.
/// When `outdir` is given, each run's declared outputs go to `run_<index>/`.
pub fn sweep(cfg: &SweepConfig, outdir: Option<&Path>) -> Result<Vec<SweepRow>> {
    let runs = cfg.expand()?;
    let rows = runs
        .into_par_iter()
        .enumerate()
        .map(|(index, (replicate, values, scenario))| {
            let result = run_scenario(&scenario).and_then(|outcome| {
                if let Some(dir) = outdir {
                    let outputs: Vec<_> = scenario.outputs.clone();
                    write_outputs(&outcome, &outputs, &dir.join(format!("run_{index:04}")))?;
                }
                Ok(outcome.summary)
            });
            SweepRow {
                index,
                replicate,
                values,
                result: result.map_err(|e| (e.exit_code(), e.to_string())),
            }
        })
        .collect();
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(output::fmt_f64).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn sweep_csv(cfg: &SweepConfig, rows: &[SweepRow]) -> String {
    let mut out = cfg.header().join(",");
    out.push('\n');
    for row in rows {
        let mut cells = vec![row.index.to_string(), row.replicate.to_string()];
        cells.extend(row.values.iter().map(|v| output::fmt_f64(*v)));
        match &row.result {
            Ok(s) => {
                cells.extend(["ok".to_string(), "0".to_string(), String::new(), s.hash.clone()]);
                cells.extend(
                    [
                        s.reaching_time,
                        s.reaching_bound,
                        Some(s.tail_mean_r),
                        s.tail_mean_r_real,
                        s.final_e,
                        s.max_e,
                        s.steady_e,
                        s.e_drift,
                        Some(s.max_modulus_dev),
                    ]
                    .map(opt),
                );
                cells.push(s.resets.to_string());
                cells.push(output::fmt_f64(s.wall_clock_seconds));
            }
            Err((code, msg)) => {
                cells.extend(["error".to_string(), code.to_string(), csv_field(msg)]);
                cells.extend(std::iter::repeat_n(String::new(), 12));
            }
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub const PRESET_NAMES: [&str; 4] = ["fig1", "fig2", "fig3", "fig3d"];

/// Shipped scenario with pinned seeds.
pub fn preset(name: &str) -> Result<Scenario> {
    let text = match name {
        "fig1" => include_str!("../presets/fig1.json"),
        "fig2" => include_str!("../presets/fig2.json"),
        "fig3" => include_str!("../presets/fig3.json"),
        "fig3d" => include_str!("../presets/fig3d.json"),
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}' (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Scenario::from_json(text)
}

/// Report of the `validate` command: parsing plus gain conditions, no run.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub name: String,
    pub hash: String,
    pub n: usize,
    pub edges: usize,
    pub connected: bool,
    pub controller: String,
    pub gain_threshold_max: Option<f64>,
    pub epsilon2: Option<f64>,
    pub reaching_bound: Option<f64>,
    pub roberts_spectrum_valid: Option<bool>,
    pub ok: bool,
}

pub fn validate_scenario(scenario: &Scenario) -> Result<ValidationReport> {
    let inst = scenario.instantiate()?;
    let n = inst.network.n();
    let mut report = ValidationReport {
        name: scenario.name.clone(),
        hash: scenario.hash(&inst.network),
        n,
        edges: inst.network.edge_count(),
        connected: inst.network.is_connected(),
        controller: inst.controller.name().into(),
        gain_threshold_max: None,
        epsilon2: None,
        reaching_bound: None,
        roberts_spectrum_valid: None,
        ok: true,
    };
    match &inst.controller {
        ControllerSpec::ComplexSmc { gains, omega_bar } => {
            let d = control::gain_margin(gains, &inst.params, n, *omega_bar, Some(&inst.x0));
            report.gain_threshold_max = d.u_eq_bound.iter().copied().reduce(f64::max);
            report.epsilon2 = Some(d.epsilon2);
            report.reaching_bound = d.reaching_bound;
            report.ok = !d.violated;
        }
        ControllerSpec::FfSmc { alpha } => {
            report.reaching_bound = Some(metrics::reaching_bound_ff_smc(&inst.x0, *alpha)?);
        }
        ControllerSpec::Roberts { mu } if n <= crate::complex::EIGEN_MAX_DIM => {
            let spec = control::verify_roberts_spectrum(&inst.network, &inst.params, mu, 1e-6)?;
            report.roberts_spectrum_valid = Some(spec.valid);
            report.ok = spec.valid;
        }
        ControllerSpec::HybridReset { window } => {
            let k = (window / scenario.sim.dt).round();
            if k < 1.0 || (k * scenario.sim.dt - window).abs() > 1e-9 * window.max(1.0) {
                return Err(Error::Config(format!("hybrid window {window} is not a multiple of dt")));
            }
        }
        _ => {}
    }
    Ok(report)
}
