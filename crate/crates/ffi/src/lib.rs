//! C ABI over `ckuramoto`.
//!
//! Conventions:
//! * every fallible function returns a [`CkStatus`]; on failure a message is
//!   available from [`ck_last_error_message`] on the same thread;
//! * objects are opaque handles created by `ck_network_*` constructors and
//!   `ck_run_*`, and released with the matching `ck_*_free`;
//! * strings returned to the caller are freed with [`ck_string_free`];
//! * panics never cross the boundary and are reported as `CK_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use ckuramoto::complex::Complex64;
use ckuramoto::control::{self, ControllerSpec};
use ckuramoto::network::{self, Network, OscParams};
use ckuramoto::scenario::{self, Scenario};
use ckuramoto::sim::{self, ComplexTrajectory, RealTrajectory, SimConfig};
use ckuramoto::{metrics, Error};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Simulation = 4,
    Acceptance = 5,
    Io = 6,
    Panic = 7,
}

impl From<&Error> for CkStatus {
    fn from(e: &Error) -> Self {
        match e.exit_code() {
            2 => match e {
                Error::Config(_) | Error::Parse { .. } => CkStatus::Config,
                _ => CkStatus::InvalidArgument,
            },
            3 => CkStatus::Simulation,
            4 => CkStatus::Acceptance,
            _ => CkStatus::Io,
        }
    }
}

/// Opaque undirected graph.
pub struct CkNetwork(Network);

/// Opaque recorded run of the complex model.
pub struct CkTrajectory(ComplexTrajectory);

/// Opaque recorded run of the real phase model.
pub struct CkPhaseTrajectory(RealTrajectory);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkControllerKind {
    None = 0,
    SwitchedFf = 1,
    FfSmc = 2,
    ComplexSmc = 3,
    Roberts = 4,
    HybridReset = 5,
}

/// Controller description. Only the fields used by `kind` are read:
/// `alpha` (FF_SMC), `gains` + `omega_bar` (COMPLEX_SMC), `mu` (ROBERTS;
/// NULL selects `mu = sigma * degree`), `window` (HYBRID_RESET). Arrays
/// hold `n` entries.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CkController {
    pub kind: CkControllerKind,
    pub alpha: f64,
    pub omega_bar: f64,
    pub window: f64,
    pub gains: *const f64,
    pub mu: *const f64,
}

/// Integration settings; `record_stride` of 0 is treated as 1.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CkSimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    pub boundary_layer_delta: f64,
}

impl From<CkSimConfig> for SimConfig {
    fn from(c: CkSimConfig) -> Self {
        SimConfig {
            dt: c.dt,
            t_end: c.t_end,
            record_stride: c.record_stride.max(1),
            boundary_layer_delta: c.boundary_layer_delta,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

enum Failure {
    Status(CkStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(CkStatus::NullPointer, format!("{what} is NULL"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Status(CkStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CkStatus::Ok,
        Ok(Err(Failure::Status(status, msg))) => {
            set_error(msg);
            status
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            CkStatus::from(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            CkStatus::Panic
        }
    }
}

unsafe fn array<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn array_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs removed").into_raw()
}

/// Message describing the last failure on this thread, or NULL. Valid until
/// the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn ck_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ck_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ck_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Seeded Erdos-Renyi graph `G(n, p)`.
///
/// # Safety
/// `out_net` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_network_erdos_renyi(n: usize, p: f64, seed: u64, out_net: *mut *mut CkNetwork) -> CkStatus {
    guard(|| {
        let slot = out(out_net, "out_net")?;
        let net = network::erdos_renyi(n, p, seed)?;
        *slot = Box::into_raw(Box::new(CkNetwork(net)));
        Ok(())
    })
}

/// Graph from `edge_count` pairs stored flat in `edges` (`k0, j0, k1, j1, ...`).
///
/// # Safety
/// `edges` must hold `2 * edge_count` entries; `out_net` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ck_network_from_edges(
    n: usize,
    edges: *const usize,
    edge_count: usize,
    out_net: *mut *mut CkNetwork,
) -> CkStatus {
    guard(|| {
        let slot = out(out_net, "out_net")?;
        let flat = array(edges, 2 * edge_count, "edges")?;
        let net = Network::from_edges(n, flat.chunks_exact(2).map(|e| (e[0], e[1])))?;
        *slot = Box::into_raw(Box::new(CkNetwork(net)));
        Ok(())
    })
}

/// Graph from an edge-list file (`n <count>` header, one `k j` pair per line).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out_net` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ck_network_load(path: *const c_char, out_net: *mut *mut CkNetwork) -> CkStatus {
    guard(|| {
        let slot = out(out_net, "out_net")?;
        let net = network::load_adjacency(string(path, "path")?)?;
        *slot = Box::into_raw(Box::new(CkNetwork(net)));
        Ok(())
    })
}

/// # Safety
/// `net` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ck_network_free(net: *mut CkNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Node count, or 0 for NULL.
///
/// # Safety
/// `net` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ck_network_size(net: *const CkNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.n())
}

/// Edge count, or 0 for NULL.
///
/// # Safety
/// `net` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ck_network_edge_count(net: *const CkNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.edge_count())
}

/// # Safety
/// `net` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ck_network_is_connected(net: *const CkNetwork) -> bool {
    net.as_ref().is_some_and(|n| n.0.is_connected())
}

/// Copies the `n` node degrees into `out_degrees`.
///
/// # Safety
/// `out_degrees` must hold `ck_network_size(net)` entries.
#[no_mangle]
pub unsafe extern "C" fn ck_network_degrees(net: *const CkNetwork, out_degrees: *mut usize) -> CkStatus {
    guard(|| {
        let net = &handle(net, "net")?.0;
        array_mut(out_degrees, net.n(), "out_degrees")?.copy_from_slice(net.degrees());
        Ok(())
    })
}

unsafe fn controller(c: &CkController, net: &Network, params: &OscParams) -> Result<ControllerSpec, Failure> {
    let n = net.n();
    Ok(match c.kind {
        CkControllerKind::None => ControllerSpec::None,
        CkControllerKind::SwitchedFf => ControllerSpec::SwitchedFf,
        CkControllerKind::FfSmc => ControllerSpec::FfSmc { alpha: c.alpha },
        CkControllerKind::ComplexSmc => ControllerSpec::ComplexSmc {
            gains: array(c.gains, n, "controller.gains")?.to_vec(),
            omega_bar: c.omega_bar,
        },
        CkControllerKind::Roberts => ControllerSpec::Roberts {
            mu: if c.mu.is_null() {
                control::roberts_mu_degree(net, params)?
            } else {
                array(c.mu, n, "controller.mu")?.to_vec()
            },
        },
        CkControllerKind::HybridReset => ControllerSpec::HybridReset { window: c.window },
    })
}

/// Integrates the controlled complex system from `x0 = x0_re + i x0_im`.
///
/// # Safety
/// `omega`, `x0_re`, `x0_im` must hold `ck_network_size(net)` entries;
/// `ctrl` and `out_traj` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ck_run_complex(
    net: *const CkNetwork,
    omega: *const f64,
    sigma: f64,
    ctrl: *const CkController,
    x0_re: *const f64,
    x0_im: *const f64,
    cfg: CkSimConfig,
    out_traj: *mut *mut CkTrajectory,
) -> CkStatus {
    guard(|| {
        let slot = out(out_traj, "out_traj")?;
        let net = &handle(net, "net")?.0;
        let n = net.n();
        let params = OscParams::new(array(omega, n, "omega")?.to_vec(), sigma)?;
        let spec = controller(handle(ctrl, "ctrl")?, net, &params)?;
        let re = array(x0_re, n, "x0_re")?;
        let im = array(x0_im, n, "x0_im")?;
        let x0: Vec<Complex64> = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let traj = sim::run_complex(&x0, net, &params, &spec, &cfg.into())?;
        *slot = Box::into_raw(Box::new(CkTrajectory(traj)));
        Ok(())
    })
}

/// Integrates the real phase model from `theta0`.
///
/// # Safety
/// `omega` and `theta0` must hold `ck_network_size(net)` entries.
#[no_mangle]
pub unsafe extern "C" fn ck_run_real(
    net: *const CkNetwork,
    omega: *const f64,
    sigma: f64,
    theta0: *const f64,
    cfg: CkSimConfig,
    out_traj: *mut *mut CkPhaseTrajectory,
) -> CkStatus {
    guard(|| {
        let slot = out(out_traj, "out_traj")?;
        let net = &handle(net, "net")?.0;
        let n = net.n();
        let params = OscParams::new(array(omega, n, "omega")?.to_vec(), sigma)?;
        let traj = sim::run_real(array(theta0, n, "theta0")?, net, &params, &cfg.into())?;
        *slot = Box::into_raw(Box::new(CkPhaseTrajectory(traj)));
        Ok(())
    })
}

/// # Safety
/// `traj` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ck_trajectory_free(traj: *mut CkTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of recorded samples, or 0 for NULL.
///
/// # Safety
/// `traj` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ck_trajectory_len(traj: *const CkTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Copies the sample times into `out_times` (`ck_trajectory_len` entries).
///
/// # Safety
/// `out_times` must hold `ck_trajectory_len(traj)` entries.
#[no_mangle]
pub unsafe extern "C" fn ck_trajectory_times(traj: *const CkTrajectory, out_times: *mut f64) -> CkStatus {
    guard(|| {
        let t = &handle(traj, "traj")?.0;
        array_mut(out_times, t.len(), "out_times")?.copy_from_slice(&t.times);
        Ok(())
    })
}

/// Copies sample `index`: real and imaginary parts and unwrapped arguments.
/// Any output pointer may be NULL to skip it.
///
/// # Safety
/// Non-NULL outputs must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn ck_trajectory_sample(
    traj: *const CkTrajectory,
    index: usize,
    out_re: *mut f64,
    out_im: *mut f64,
    out_args: *mut f64,
) -> CkStatus {
    guard(|| {
        let t = &handle(traj, "traj")?.0;
        let s = t
            .states
            .get(index)
            .ok_or_else(|| invalid(format!("sample {index} out of range ({} samples)", t.len())))?;
        let n = s.n();
        if !out_re.is_null() {
            for (o, z) in array_mut(out_re, n, "out_re")?.iter_mut().zip(&s.x) {
                *o = z.re;
            }
        }
        if !out_im.is_null() {
            for (o, z) in array_mut(out_im, n, "out_im")?.iter_mut().zip(&s.x) {
                *o = z.im;
            }
        }
        if !out_args.is_null() {
            array_mut(out_args, n, "out_args")?.copy_from_slice(&s.unwrapped_args);
        }
        Ok(())
    })
}

/// Number of reset events (hybrid runs), or 0.
///
/// # Safety
/// `traj` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ck_trajectory_reset_count(traj: *const CkTrajectory) -> usize {
    traj.as_ref()
        .map_or(0, |t| t.0.events_of(sim::EventKind::Reset).count())
}

/// # Safety
/// `traj` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ck_phase_trajectory_free(traj: *mut CkPhaseTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// # Safety
/// `traj` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ck_phase_trajectory_len(traj: *const CkPhaseTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Copies the phases of sample `index` into `out_theta` (`n` entries).
///
/// # Safety
/// `out_theta` must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn ck_phase_trajectory_sample(
    traj: *const CkPhaseTrajectory,
    index: usize,
    out_theta: *mut f64,
) -> CkStatus {
    guard(|| {
        let t = &handle(traj, "traj")?.0;
        let s = t
            .states
            .get(index)
            .ok_or_else(|| invalid(format!("sample {index} out of range ({} samples)", t.len())))?;
        array_mut(out_theta, s.len(), "out_theta")?.copy_from_slice(s);
        Ok(())
    })
}

/// Order parameter `(1/n) sum e^{i theta_k}`.
///
/// # Safety
/// `phases` must hold `n` entries; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn ck_order_parameter(
    phases: *const f64,
    n: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> CkStatus {
    guard(|| {
        let r = metrics::order_parameter(array(phases, n, "phases")?);
        *out(out_re, "out_re")? = r.re;
        *out(out_im, "out_im")? = r.im;
        Ok(())
    })
}

/// `(1/n) sum |a_k - b_k|`.
///
/// # Safety
/// `a` and `b` must hold `n` entries; `out_e` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ck_mean_abs_error(a: *const f64, b: *const f64, n: usize, out_e: *mut f64) -> CkStatus {
    guard(|| {
        *out(out_e, "out_e")? = metrics::mean_abs_error(array(a, n, "a")?, array(b, n, "b")?)?;
        Ok(())
    })
}

/// Per-oscillator sufficient gains `omega_k + omega_bar + sigma (n - 1)`.
///
/// # Safety
/// `omega` and `out_threshold` must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn ck_gain_threshold(
    omega: *const f64,
    n: usize,
    sigma: f64,
    omega_bar: f64,
    out_threshold: *mut f64,
) -> CkStatus {
    guard(|| {
        let params = OscParams::new(array(omega, n, "omega")?.to_vec(), sigma)?;
        array_mut(out_threshold, n, "out_threshold")?.copy_from_slice(&control::gain_threshold(&params, n, omega_bar));
        Ok(())
    })
}

/// Gain margin `min K - (max|omega| + omega_bar + sigma (n - 1))`. Returns
/// `CK_STATUS_OK` even when the margin is not positive; check the sign.
///
/// # Safety
/// `gains` and `omega` must hold `n` entries; `out_margin` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ck_gain_margin(
    gains: *const f64,
    omega: *const f64,
    n: usize,
    sigma: f64,
    omega_bar: f64,
    out_margin: *mut f64,
) -> CkStatus {
    guard(|| {
        let params = OscParams::new(array(omega, n, "omega")?.to_vec(), sigma)?;
        let d = control::gain_margin(array(gains, n, "gains")?, &params, n, omega_bar, None);
        *out(out_margin, "out_margin")? = d.epsilon2;
        Ok(())
    })
}

fn finish_scenario(s: &Scenario, outdir: Option<&str>, out_json: &mut *mut c_char) -> Result<(), Failure> {
    let outcome = scenario::run_scenario(s)?;
    if let Some(dir) = outdir {
        scenario::write_outputs(&outcome, &s.outputs, Path::new(dir))?;
    }
    let json = serde_json::to_string(&outcome.summary).expect("summary serializes");
    *out_json = to_c_string(json);
    Ok(())
}

/// Runs a scenario file; the run summary is returned as JSON in `out_json`
/// (free with `ck_string_free`). Outputs are written when `outdir` is not NULL.
///
/// # Safety
/// `path` and non-NULL `outdir` must be NUL-terminated; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ck_run_scenario_file(
    path: *const c_char,
    outdir: *const c_char,
    out_json: *mut *mut c_char,
) -> CkStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let s = Scenario::load(string(path, "path")?)?;
        let dir = if outdir.is_null() { None } else { Some(string(outdir, "outdir")?) };
        finish_scenario(&s, dir, slot)
    })
}

/// Runs a shipped preset (`fig1`, `fig2`, `fig3`, `fig3d`); see
/// [`ck_run_scenario_file`] for the outputs.
///
/// # Safety
/// As for `ck_run_scenario_file`.
#[no_mangle]
pub unsafe extern "C" fn ck_run_preset(
    name: *const c_char,
    outdir: *const c_char,
    out_json: *mut *mut c_char,
) -> CkStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let s = scenario::preset(string(name, "name")?)?;
        let dir = if outdir.is_null() { None } else { Some(string(outdir, "outdir")?) };
        finish_scenario(&s, dir, slot)
    })
}
