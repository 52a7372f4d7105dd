//! Time-domain simulation of pulse capture, storage and retrieval with a
//! time-varying drive Ω_m(t).
//!
//! Per element j the cavity and mechanical amplitudes evolve as
//!
//! ```text
//! da_j/dt = -(κ/2) a_j + iΩ(t) b_j + i√(κ_ex/2) (u_R,in + u_L,in)
//! db_j/dt = -(γ_m/2) b_j + iΩ(t) a_j
//! ```
//!
//! with flux-normalized waveguide amplitudes propagated instantaneously
//! between cells (phase e^{i·k₀d} per cell, transit time neglected) and
//! boundary jumps u_out = u_in + i√(κ_ex/2)·a_j in each direction. The
//! integrator is fixed-step RK4 with the energy integrals carried as
//! additional state, so the excitation ledger closes to integrator accuracy.

use num_complex::Complex64 as C64;

use crate::params::{derived_rates, validate_params, SystemParams};
use crate::{fmt_g17, Error, Result};

/// Ramp interpolation shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampShape {
    /// Smooth raised-cosine ramp (zero slope at both ends).
    #[default]
    RaisedCosine,
    /// Straight-line ramp.
    Linear,
}

#[derive(Debug, Clone, Copy)]
enum Segment {
    Hold {
        level: f64,
        duration: f64,
    },
    Ramp {
        from: f64,
        to: f64,
        duration: f64,
        shape: RampShape,
    },
}

impl Segment {
    fn duration(&self) -> f64 {
        match *self {
            Segment::Hold { duration, .. } | Segment::Ramp { duration, .. } => duration,
        }
    }

    fn end_level(&self) -> f64 {
        match *self {
            Segment::Hold { level, .. } => level,
            Segment::Ramp { to, .. } => to,
        }
    }

    fn value(&self, s: f64) -> f64 {
        match *self {
            Segment::Hold { level, .. } => level,
            Segment::Ramp {
                from,
                to,
                duration,
                shape,
            } => {
                let x = (s / duration).clamp(0.0, 1.0);
                match shape {
                    RampShape::Linear => from + (to - from) * x,
                    RampShape::RaisedCosine => {
                        from + (to - from) * 0.5 * (1.0 - (std::f64::consts::PI * x).cos())
                    }
                }
            }
        }
    }

    fn slope(&self, s: f64) -> f64 {
        match *self {
            Segment::Hold { .. } => 0.0,
            Segment::Ramp {
                from,
                to,
                duration,
                shape,
            } => {
                let x = (s / duration).clamp(0.0, 1.0);
                match shape {
                    RampShape::Linear => (to - from) / duration,
                    RampShape::RaisedCosine => {
                        (to - from) * 0.5 * std::f64::consts::PI * (std::f64::consts::PI * x).sin()
                            / duration
                    }
                }
            }
        }
    }
}

/// Piecewise drive amplitude Ω(t): holds and ramps, continuous and
/// non-negative by construction. Before t = 0 the initial level applies;
/// past the last segment the final level holds.
#[derive(Debug, Clone)]
pub struct DriveSchedule {
    initial: f64,
    segments: Vec<Segment>,
}

impl DriveSchedule {
    /// Constant drive.
    pub fn constant(level: f64) -> Self {
        Self::starting_at(level)
    }

    /// Begin a schedule at the given level.
    pub fn starting_at(level: f64) -> Self {
        assert!(level >= 0.0, "drive amplitude must be non-negative");
        DriveSchedule {
            initial: level,
            segments: Vec::new(),
        }
    }

    fn current_level(&self) -> f64 {
        self.segments
            .last()
            .map(|s| s.end_level())
            .unwrap_or(self.initial)
    }

    /// Hold the current level for `duration`.
    pub fn hold(mut self, duration: f64) -> Self {
        assert!(duration >= 0.0);
        let level = self.current_level();
        self.segments.push(Segment::Hold { level, duration });
        self
    }

    /// Raised-cosine ramp from the current level to `to` over `duration`.
    pub fn ramp_to(self, to: f64, duration: f64) -> Self {
        self.ramp_to_shaped(to, duration, RampShape::RaisedCosine)
    }

    pub fn ramp_to_shaped(mut self, to: f64, duration: f64, shape: RampShape) -> Self {
        assert!(duration > 0.0, "ramp duration must be positive");
        assert!(to >= 0.0, "drive amplitude must be non-negative");
        let from = self.current_level();
        self.segments.push(Segment::Ramp {
            from,
            to,
            duration,
            shape,
        });
        self
    }

    /// Total scheduled duration.
    pub fn end_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration()).sum()
    }

    /// Ω(t).
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.initial;
        }
        let mut start = 0.0;
        for seg in &self.segments {
            let end = start + seg.duration();
            if t < end {
                return seg.value(t - start);
            }
            start = end;
        }
        self.current_level()
    }

    /// dΩ/dt at t (one-sided at segment boundaries, taken from the segment
    /// to the right).
    pub fn derivative(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let mut start = 0.0;
        for seg in &self.segments {
            let end = start + seg.duration();
            if t < end {
                return seg.slope(t - start);
            }
            start = end;
        }
        0.0
    }

    /// Start times of all segments (useful for exact sampling of slope
    /// discontinuities).
    pub fn segment_starts(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.segments.len());
        let mut start = 0.0;
        for seg in &self.segments {
            out.push(start);
            start += seg.duration();
        }
        out
    }
}

/// Input pulse: Gaussian envelope with 1/e amplitude half-width `width`,
/// carrier detuning `delta0` from the cavity resonance, launched (peak) at
/// `launch`.
#[derive(Debug, Clone, Copy)]
pub struct PulseSpec {
    pub delta0: f64,
    pub width: f64,
    pub amplitude: f64,
    pub launch: f64,
}

impl PulseSpec {
    /// Flux-normalized source amplitude at time t.
    pub fn source(&self, t: f64) -> C64 {
        let x = (t - self.launch) / self.width;
        let env = self.amplitude * (-x * x).exp();
        env * C64::from_polar(1.0, -self.delta0 * (t - self.launch))
    }

    /// 1/e half-width of the amplitude spectrum, 2/width (rad/s).
    pub fn spectral_half_width(&self) -> f64 {
        2.0 / self.width
    }

    /// Pulse sized to the array: duration 0.26·τ_delay (so the pulse spans
    /// roughly half the array when slowed) launched at 2.5 widths.
    pub fn fitted(p: &SystemParams) -> Self {
        let delay = derived_rates(p).total_delay;
        let width = 0.26 * delay;
        PulseSpec {
            delta0: 0.0,
            width,
            amplitude: 1.0,
            launch: 2.5 * width,
        }
    }
}

/// Capture/hold/release drive template: hold the static drive while the
/// pulse enters and reaches mid-array, ramp to zero, hold, ramp back up.
#[derive(Debug, Clone)]
pub struct StorageProtocol {
    pub schedule: DriveSchedule,
    /// Start of the release ramp; output from here on counts as retrieved.
    pub release_time: f64,
    /// Recommended simulation end: release + ramp + delay + pulse tail.
    pub suggested_t_end: f64,
}

impl StorageProtocol {
    pub fn standard(p: &SystemParams, pulse: &PulseSpec, ramp: f64, hold: f64) -> Self {
        let delay = derived_rates(p).total_delay;
        let capture_start = pulse.launch + 0.45 * delay;
        let release_time = capture_start + ramp + hold;
        let schedule = DriveSchedule::starting_at(p.omega_drive)
            .hold(capture_start)
            .ramp_to(0.0, ramp)
            .hold(hold)
            .ramp_to(p.omega_drive, ramp);
        StorageProtocol {
            schedule,
            release_time,
            suggested_t_end: release_time + ramp + delay + 6.0 * pulse.width + 200.0 / p.kappa(),
        }
    }
}

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Output after this time counts as retrieved in the metrics.
    pub release_time: Option<f64>,
}

impl SimConfig {
    /// Default step 0.01/κ up to `t_end`.
    pub fn new(p: &SystemParams, t_end: f64) -> Self {
        SimConfig {
            dt: 0.01 / p.kappa(),
            t_end,
            release_time: None,
        }
    }

    pub fn with_release(mut self, t: f64) -> Self {
        self.release_time = Some(t);
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }
}

/// Cumulative energy ledger (photon-number units) recorded at every sample.
#[derive(Debug, Clone, Default)]
pub struct LedgerSeries {
    /// Injected: ∫|s|².
    pub e_in: Vec<f64>,
    /// Transmitted out the right end.
    pub e_trans: Vec<f64>,
    /// Reflected out the left end.
    pub e_refl: Vec<f64>,
    /// Dissipated through intrinsic cavity loss.
    pub e_kappa_in: Vec<f64>,
    /// Dissipated through mechanical loss.
    pub e_gamma_m: Vec<f64>,
    /// e_in - (all sinks + current storage); absolute.
    pub residual: Vec<f64>,
}

/// Full record of a time-domain run.
#[derive(Debug, Clone)]
pub struct StorageRun {
    pub times: Vec<f64>,
    pub input: Vec<C64>,
    pub transmitted: Vec<C64>,
    pub reflected: Vec<C64>,
    /// Σ_j |a_j|² per sample.
    pub cavity_energy: Vec<f64>,
    /// Σ_j |b_j|² per sample.
    pub mech_energy: Vec<f64>,
    pub ledger: LedgerSeries,
    pub dt: f64,
    pub release_time: Option<f64>,
    pub warnings: Vec<String>,
}

impl StorageRun {
    /// Largest |residual|/e_in over samples carrying at least 1e-6 of the
    /// final injected energy.
    pub fn max_relative_residual(&self) -> f64 {
        let total = *self.ledger.e_in.last().unwrap_or(&0.0);
        if total <= 0.0 {
            return 0.0;
        }
        self.ledger
            .residual
            .iter()
            .zip(&self.ledger.e_in)
            .filter(|(_, &ein)| ein > 1e-6 * total)
            .map(|(r, ein)| r.abs() / ein)
            .fold(0.0, f64::max)
    }

    /// Time-major CSV, one row per `stride` samples. Columns:
    /// `t,in_re,in_im,trans_re,trans_im,refl_re,refl_im,cavity_energy,
    /// mech_energy,e_in,e_trans,e_refl,e_diss_kappa_in,e_diss_gamma_m,
    /// ledger_residual`.
    pub fn to_csv(&self, stride: usize) -> String {
        let stride = stride.max(1);
        let mut out = String::from(
            "t,in_re,in_im,trans_re,trans_im,refl_re,refl_im,cavity_energy,mech_energy,\
             e_in,e_trans,e_refl,e_diss_kappa_in,e_diss_gamma_m,ledger_residual\n",
        );
        for i in (0..self.times.len()).step_by(stride) {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                fmt_g17(self.times[i]),
                fmt_g17(self.input[i].re),
                fmt_g17(self.input[i].im),
                fmt_g17(self.transmitted[i].re),
                fmt_g17(self.transmitted[i].im),
                fmt_g17(self.reflected[i].re),
                fmt_g17(self.reflected[i].im),
                fmt_g17(self.cavity_energy[i]),
                fmt_g17(self.mech_energy[i]),
                fmt_g17(self.ledger.e_in[i]),
                fmt_g17(self.ledger.e_trans[i]),
                fmt_g17(self.ledger.e_refl[i]),
                fmt_g17(self.ledger.e_kappa_in[i]),
                fmt_g17(self.ledger.e_gamma_m[i]),
                fmt_g17(self.ledger.residual[i]),
            ));
        }
        out
    }
}

const ENERGY_STATES: usize = 5;

/// Derivative of the coupled cavity/mechanical state plus energy integrands.
/// Writes da into `da`, db into `db` and the five energy integrands into
/// `de`; returns the instantaneous boundary fields (transmitted, reflected).
#[allow(clippy::too_many_arguments)]
fn derivative(
    t: f64,
    a: &[C64],
    b: &[C64],
    p: &SystemParams,
    schedule: &DriveSchedule,
    pulse: &PulseSpec,
    da: &mut [C64],
    db: &mut [C64],
    de: &mut [f64; ENERGY_STATES],
) -> (C64, C64) {
    let n = a.len();
    let kappa = p.kappa();
    let jump = C64::new(0.0, (p.kappa_ex / 2.0).sqrt());
    let phase = C64::from_polar(1.0, p.phase_per_cell);
    let omega = schedule.value(t);
    let s = pulse.source(t);

    // rightward sweep: da[j] accumulates the right-moving input field
    let mut u = s;
    for j in 0..n {
        da[j] = u;
        u = (u + jump * a[j]) * phase;
    }
    let u_right = u;
    // leftward sweep: add the left-moving input field
    let mut u = C64::new(0.0, 0.0);
    for j in (0..n).rev() {
        let u_in = u;
        u = (u + jump * a[j]) * phase;
        da[j] = -(kappa / 2.0) * a[j] + C64::new(0.0, omega) * b[j] + jump * (da[j] + u_in);
        db[j] = -(p.gamma_m / 2.0) * b[j] + C64::new(0.0, omega) * a[j];
    }
    let u_left = u;

    let sum_a: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let sum_b: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    de[0] = s.norm_sqr();
    de[1] = u_right.norm_sqr();
    de[2] = u_left.norm_sqr();
    de[3] = p.kappa_in * sum_a;
    de[4] = p.gamma_m * sum_b;
    (u_right, u_left)
}

/// Integrate the classical array dynamics driven by `pulse` under the drive
/// `schedule`.
///
/// Fails when the parameters do not validate or the step exceeds the
/// stability budget dt ≤ 0.02/κ. A pulse whose spectrum exceeds twice the
/// instantaneous slow-band width is flagged in the run warnings.
pub fn simulate(
    p: &SystemParams,
    schedule: &DriveSchedule,
    pulse: &PulseSpec,
    cfg: &SimConfig,
) -> Result<StorageRun> {
    let report = validate_params(p);
    if !report.is_pass() {
        return Err(Error::Validation(report.errors.join("; ")));
    }
    let kappa = p.kappa();
    if cfg.dt > 0.02 / kappa {
        return Err(Error::Validation(format!(
            "dt = {:e} exceeds the stability budget 0.02/kappa = {:e}",
            cfg.dt,
            0.02 / kappa
        )));
    }
    if !pulse.width.is_finite() || pulse.width <= 0.0 {
        return Err(Error::Validation("pulse width must be positive".into()));
    }
    let mut warnings = Vec::new();
    let omega0 = schedule.value(0.0).max(schedule.value(pulse.launch));
    if omega0 > 0.0 {
        let band = 4.0 * omega0 * omega0 / kappa;
        if 2.0 * pulse.spectral_half_width() > 2.0 * band {
            warnings.push(format!(
                "pulse spectral width {:e} rad/s exceeds twice the slow-band width {:e} rad/s",
                2.0 * pulse.spectral_half_width(),
                band
            ));
        } else if pulse.spectral_half_width() > band / 2.0 {
            warnings.push(format!(
                "pulse spectral half-width {:e} rad/s does not fit inside the slow-band \
                 half-width {:e} rad/s",
                pulse.spectral_half_width(),
                band / 2.0
            ));
        }
    }

    let n = p.n_elements;
    let steps = (cfg.t_end / cfg.dt).ceil() as usize;
    let mut a = vec![C64::new(0.0, 0.0); n];
    let mut b = vec![C64::new(0.0, 0.0); n];
    let mut e = [0.0f64; ENERGY_STATES];

    let mut k = [
        (
            vec![C64::new(0.0, 0.0); n],
            vec![C64::new(0.0, 0.0); n],
            [0.0; ENERGY_STATES],
        ),
        (
            vec![C64::new(0.0, 0.0); n],
            vec![C64::new(0.0, 0.0); n],
            [0.0; ENERGY_STATES],
        ),
        (
            vec![C64::new(0.0, 0.0); n],
            vec![C64::new(0.0, 0.0); n],
            [0.0; ENERGY_STATES],
        ),
        (
            vec![C64::new(0.0, 0.0); n],
            vec![C64::new(0.0, 0.0); n],
            [0.0; ENERGY_STATES],
        ),
    ];
    let mut at = vec![C64::new(0.0, 0.0); n];
    let mut bt = vec![C64::new(0.0, 0.0); n];

    let mut run = StorageRun {
        times: Vec::with_capacity(steps + 1),
        input: Vec::with_capacity(steps + 1),
        transmitted: Vec::with_capacity(steps + 1),
        reflected: Vec::with_capacity(steps + 1),
        cavity_energy: Vec::with_capacity(steps + 1),
        mech_energy: Vec::with_capacity(steps + 1),
        ledger: LedgerSeries::default(),
        dt: cfg.dt,
        release_time: cfg.release_time,
        warnings,
    };

    let dt = cfg.dt;
    for i in 0..=steps {
        let t = i as f64 * dt;
        // record the instantaneous state before stepping
        let (k1a, k1b, k1e) = {
            let (ka, kb, ke) = &mut k[0];
            let (u_r, u_l) = derivative(t, &a, &b, p, schedule, pulse, ka, kb, ke);
            run.times.push(t);
            run.input.push(pulse.source(t));
            run.transmitted.push(u_r);
            run.reflected.push(u_l);
            let sum_a: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            let sum_b: f64 = b.iter().map(|z| z.norm_sqr()).sum();
            run.cavity_energy.push(sum_a);
            run.mech_energy.push(sum_b);
            run.ledger.e_in.push(e[0]);
            run.ledger.e_trans.push(e[1]);
            run.ledger.e_refl.push(e[2]);
            run.ledger.e_kappa_in.push(e[3]);
            run.ledger.e_gamma_m.push(e[4]);
            run.ledger
                .residual
                .push(e[0] - (e[1] + e[2] + e[3] + e[4] + sum_a + sum_b));
            (ka.clone(), kb.clone(), *ke)
        };
        if i == steps {
            break;
        }

        // k2
        for j in 0..n {
            at[j] = a[j] + 0.5 * dt * k1a[j];
            bt[j] = b[j] + 0.5 * dt * k1b[j];
        }
        {
            let (ka, kb, ke) = &mut k[1];
            derivative(t + 0.5 * dt, &at, &bt, p, schedule, pulse, ka, kb, ke);
        }
        // k3
        for j in 0..n {
            at[j] = a[j] + 0.5 * dt * k[1].0[j];
            bt[j] = b[j] + 0.5 * dt * k[1].1[j];
        }
        {
            let (ka, kb, ke) = &mut k[2];
            derivative(t + 0.5 * dt, &at, &bt, p, schedule, pulse, ka, kb, ke);
        }
        // k4
        for j in 0..n {
            at[j] = a[j] + dt * k[2].0[j];
            bt[j] = b[j] + dt * k[2].1[j];
        }
        {
            let (ka, kb, ke) = &mut k[3];
            derivative(t + dt, &at, &bt, p, schedule, pulse, ka, kb, ke);
        }

        for j in 0..n {
            a[j] += dt / 6.0 * (k1a[j] + 2.0 * k[1].0[j] + 2.0 * k[2].0[j] + k[3].0[j]);
            b[j] += dt / 6.0 * (k1b[j] + 2.0 * k[1].1[j] + 2.0 * k[2].1[j] + k[3].1[j]);
        }
        for m in 0..ENERGY_STATES {
            e[m] += dt / 6.0 * (k1e[m] + 2.0 * k[1].2[m] + 2.0 * k[2].2[m] + k[3].2[m]);
        }
    }
    Ok(run)
}

/// Adiabaticity diagnostic |d/dt(Ω²/κ)| / κ² sampled over a schedule.
#[derive(Debug, Clone)]
pub struct AdiabaticitySeries {
    pub times: Vec<f64>,
    pub ratio: Vec<f64>,
    pub max_ratio: f64,
}

/// Sample the adiabaticity ratio on a uniform grid plus every segment start,
/// so slope discontinuities are captured exactly.
pub fn adiabaticity_margin(
    p: &SystemParams,
    schedule: &DriveSchedule,
    samples: usize,
) -> AdiabaticitySeries {
    let end = schedule.end_time().max(f64::MIN_POSITIVE);
    let k = p.kappa();
    let mut times: Vec<f64> = (0..samples.max(2))
        .map(|i| end * i as f64 / (samples.max(2) - 1) as f64)
        .collect();
    times.extend(schedule.segment_starts());
    times.sort_by(f64::total_cmp);
    times.dedup();
    let ratio: Vec<f64> = times
        .iter()
        .map(|&t| 2.0 * schedule.value(t) * schedule.derivative(t) / (k * k * k))
        .map(f64::abs)
        .collect();
    let max_ratio = ratio.iter().copied().fold(0.0, f64::max);
    AdiabaticitySeries {
        times,
        ratio,
        max_ratio,
    }
}

/// Summary metrics of a completed run.
#[derive(Debug, Clone, Copy)]
pub struct StorageMetrics {
    /// Retrieved (post-release) transmitted energy over injected energy.
    pub efficiency: f64,
    /// Shape overlap |⟨out, delayed in⟩|² / (‖out‖²‖in‖²); `None` when no
    /// output energy was retrieved.
    pub fidelity: Option<f64>,
    /// Energy-centroid shift between retrieved output and input.
    pub achieved_delay: f64,
    pub input_energy: f64,
    pub retrieved_energy: f64,
    /// Pulse/band mismatch warning carried over from the run.
    pub bandwidth_flag: bool,
}

fn centroid(times: &[f64], w: impl Fn(usize) -> f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &t) in times.iter().enumerate() {
        let v = w(i);
        num += t * v;
        den += v;
    }
    num / den
}

/// Linear interpolation of a complex record at time t (zero outside).
fn interp(times: &[f64], values: &[C64], t: f64) -> C64 {
    if times.is_empty() || t < times[0] || t > *times.last().unwrap() {
        return C64::new(0.0, 0.0);
    }
    let dt = times[1] - times[0];
    let x = (t - times[0]) / dt;
    let i = (x.floor() as usize).min(times.len() - 2);
    let frac = x - i as f64;
    values[i] * (1.0 - frac) + values[i + 1] * frac
}

/// Efficiency, fidelity and achieved delay of a run. The retrieved window
/// starts at the run's release time (whole record when none is set); the
/// fidelity references the input waveform delayed by `reference_delay`.
pub fn storage_metrics(run: &StorageRun, reference_delay: f64) -> StorageMetrics {
    let release = run.release_time.unwrap_or(0.0);
    let input_energy = *run.ledger.e_in.last().unwrap_or(&0.0);
    let release_idx = run.times.iter().position(|&t| t >= release).unwrap_or(0);
    let retrieved_energy =
        run.ledger.e_trans.last().unwrap_or(&0.0) - run.ledger.e_trans[release_idx];
    let efficiency = if input_energy > 0.0 {
        retrieved_energy / input_energy
    } else {
        0.0
    };

    let fidelity = if retrieved_energy > 1e-12 * input_energy.max(1e-300) {
        let dt = run.dt;
        let mut overlap = C64::new(0.0, 0.0);
        let mut norm_out = 0.0;
        let mut norm_in = 0.0;
        for i in 0..run.times.len() {
            let t = run.times[i];
            norm_in += run.input[i].norm_sqr() * dt;
            if i >= release_idx {
                let shifted = interp(&run.times, &run.input, t - reference_delay);
                overlap += run.transmitted[i].conj() * shifted * dt;
                norm_out += run.transmitted[i].norm_sqr() * dt;
            }
        }
        if norm_out > 0.0 && norm_in > 0.0 {
            Some(overlap.norm_sqr() / (norm_out * norm_in))
        } else {
            None
        }
    } else {
        None
    };

    let out_centroid = centroid(&run.times, |i| {
        if i >= release_idx {
            run.transmitted[i].norm_sqr()
        } else {
            0.0
        }
    });
    let in_centroid = centroid(&run.times, |i| run.input[i].norm_sqr());

    StorageMetrics {
        efficiency,
        fidelity,
        achieved_delay: out_centroid - in_centroid,
        input_energy,
        retrieved_energy,
        bandwidth_flag: !run.warnings.is_empty(),
    }
}

/// RMS spectral width (rad/s) of a uniformly sampled complex waveform,
/// computed from field derivatives (no transform needed):
/// σ² = ⟨|u̇|²⟩/⟨|u|²⟩ - (Im⟨u*u̇⟩/⟨|u|²⟩)².
pub fn spectral_width(times: &[f64], field: &[C64]) -> f64 {
    assert!(times.len() >= 3);
    let dt = times[1] - times[0];
    let mut norm = 0.0;
    let mut d2 = 0.0;
    let mut cross = 0.0;
    for i in 1..times.len() - 1 {
        let du = (field[i + 1] - field[i - 1]) / (2.0 * dt);
        norm += field[i].norm_sqr();
        d2 += du.norm_sqr();
        cross += (field[i].conj() * du).im;
    }
    let mean = cross / norm;
    (d2 / norm - mean * mean).max(0.0).sqrt()
}
