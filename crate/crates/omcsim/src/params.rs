//! Physical parameters of one array element plus array geometry and the
//! thermal model, with validation and derived rates.
//!
//! Everything is stored as an angular quantity (rad/s). Interfaces that
//! accept ordinary frequencies (Hz) must multiply by 2π before constructing a
//! [`SystemParams`]. The inter-element spacing `d` and the waveguide speed
//! never appear separately: only the phase per cell `k0*d` and the transit
//! time `d/c` enter any formula.

use std::f64::consts::{PI, TAU};

/// All physical rates and frequencies of one array element, the array
/// geometry, and the bath-heating model. Immutable value type; cheap to copy
/// and safe to share between threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Active optical cavity resonance ω₁ (rad/s).
    pub omega1: f64,
    /// Mechanical resonance ω_m (rad/s).
    pub omega_m: f64,
    /// Waveguide-induced cavity decay κ_ex (rad/s).
    pub kappa_ex: f64,
    /// Intrinsic cavity decay κ_in (rad/s).
    pub kappa_in: f64,
    /// Mechanical decay γ_m (rad/s). Zero models a lossless resonator.
    pub gamma_m: f64,
    /// Optomechanical driving amplitude Ω_m (rad/s); static default, a
    /// time-dependent drive lives in [`crate::dynamics::DriveSchedule`].
    pub omega_drive: f64,
    /// Per-photon cross-coupling rate h (rad/s), with Ω_m = h·α₂.
    pub h_coupling: f64,
    /// Number of array elements N. Zero means a bare passthrough waveguide.
    pub n_elements: usize,
    /// Free-propagation phase per cell k₀d (radians); (2n+1)π/2 by default.
    pub phase_per_cell: f64,
    /// Free-propagation transit time per cell d/c (s).
    pub cell_transit: f64,
    /// Base bath temperature T₀ (K).
    pub t_base: f64,
    /// Pump-absorption heating coefficient χ (K per pump photon).
    pub chi: f64,
}

impl SystemParams {
    /// Total cavity decay κ = κ_ex + κ_in. Always derived, never stored.
    pub fn kappa(&self) -> f64 {
        self.kappa_ex + self.kappa_in
    }

    /// Mechanical quality factor ω_m/γ_m, if the resonator is lossy.
    pub fn q_m(&self) -> Option<f64> {
        (self.gamma_m > 0.0).then(|| self.omega_m / self.gamma_m)
    }

    /// Sideband-resolution ratio κ/ω_m (≪ 1 means well resolved).
    pub fn sideband_ratio(&self) -> f64 {
        self.kappa() / self.omega_m
    }

    /// Weak-driving ratio Ω_m/κ (≲ 1 required by the noise model).
    pub fn drive_ratio(&self) -> f64 {
        self.omega_drive / self.kappa()
    }

    pub fn with_omega_drive(mut self, omega_drive: f64) -> Self {
        self.omega_drive = omega_drive;
        self
    }

    pub fn with_kappa_ex(mut self, kappa_ex: f64) -> Self {
        self.kappa_ex = kappa_ex;
        self
    }

    pub fn with_kappa_in(mut self, kappa_in: f64) -> Self {
        self.kappa_in = kappa_in;
        self
    }

    pub fn with_gamma_m(mut self, gamma_m: f64) -> Self {
        self.gamma_m = gamma_m;
        self
    }

    /// Set γ_m through a mechanical quality factor, γ_m = ω_m/Q_m.
    pub fn with_q_m(mut self, q_m: f64) -> Self {
        self.gamma_m = self.omega_m / q_m;
        self
    }

    pub fn with_n_elements(mut self, n: usize) -> Self {
        self.n_elements = n;
        self
    }

    pub fn with_phase_per_cell(mut self, phase: f64) -> Self {
        self.phase_per_cell = phase;
        self
    }

    pub fn with_t_base(mut self, t_base: f64) -> Self {
        self.t_base = t_base;
        self
    }

    pub fn with_chi(mut self, chi: f64) -> Self {
        self.chi = chi;
        self
    }

    /// Single strongly driven element with κ_in = 0.1 κ_ex, Ω_m = κ_ex/10 and
    /// a lossless mechanical resonator. Reproduces the single-element
    /// transparency window.
    pub fn fig1() -> Self {
        let kappa_ex = TAU * 2.4e9;
        SystemParams {
            omega1: TAU * 200e12,
            omega_m: TAU * 10e9,
            kappa_ex,
            kappa_in: 0.1 * kappa_ex,
            gamma_m: 0.0,
            omega_drive: kappa_ex / 10.0,
            h_coupling: TAU * 0.35e6,
            n_elements: 1,
            phase_per_cell: PI / 2.0,
            cell_transit: 2.0e-14,
            t_base: 0.1,
            chi: 2e-6,
        }
    }

    /// Baseline optomechanical-crystal device: ω₁/2π = 200 THz,
    /// ω_m/2π = 10 GHz, h/2π = 0.35 MHz, Q₁ = 3×10⁶ (low-temperature
    /// Q_m = 10⁵; use [`Self::with_q_m`] for the room-temperature variant).
    pub fn paper_device() -> Self {
        let omega1 = TAU * 200e12;
        let omega_m = TAU * 10e9;
        SystemParams {
            omega1,
            omega_m,
            kappa_ex: TAU * 2.4e9,
            kappa_in: omega1 / 3e6,
            gamma_m: omega_m / 1e5,
            omega_drive: TAU * 240e6,
            h_coupling: TAU * 0.35e6,
            n_elements: 100,
            phase_per_cell: PI / 2.0,
            cell_transit: 2.0e-14,
            t_base: 0.1,
            chi: 2e-6,
        }
    }

    /// Operating point of the constrained bandwidth-delay optimum:
    /// N = 275, κ_ex/2π = 1.1 GHz, Ω_m/2π = 130 MHz, T₀ = 100 mK,
    /// χ = 2 μK, Q_m = 10⁵.
    pub fn optimum() -> Self {
        let omega1 = TAU * 200e12;
        let omega_m = TAU * 10e9;
        SystemParams {
            omega1,
            omega_m,
            kappa_ex: TAU * 1.1e9,
            kappa_in: omega1 / 3e6,
            gamma_m: omega_m / 1e5,
            omega_drive: TAU * 130e6,
            h_coupling: TAU * 0.346e6,
            n_elements: 275,
            phase_per_cell: PI / 2.0,
            cell_transit: 2.0e-14,
            t_base: 0.1,
            chi: 2e-6,
        }
    }

    /// Look up a read-only preset by (case-insensitive) name.
    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "fig1" => Some(Self::fig1()),
            "device" | "paper_device" => Some(Self::paper_device()),
            "optimum" => Some(Self::optimum()),
            _ => None,
        }
    }

    /// Names accepted by [`Self::preset`].
    pub const PRESET_NAMES: [&'static str; 3] = ["fig1", "device", "optimum"];
}

/// Outcome of [`validate_params`]: hard errors plus advisory warnings, and the
/// two regime ratios the warnings are based on.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    /// κ/ω_m.
    pub sideband_ratio: f64,
    /// Ω_m/κ.
    pub drive_ratio: f64,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Distance from `phase` to the nearest odd multiple of π/2.
fn quarter_wave_offset(phase: f64) -> f64 {
    let n = ((phase / (PI / 2.0) - 1.0) / 2.0).round();
    (phase - (2.0 * n + 1.0) * PI / 2.0).abs()
}

/// Check a parameter set. Non-positive required rates and a non-positive
/// cell phase are errors; regime violations (strong driving, poor sideband
/// resolution, off-quarter-wave spacing) only warn.
pub fn validate_params(p: &SystemParams) -> ValidationReport {
    let mut r = ValidationReport {
        sideband_ratio: if p.omega_m > 0.0 {
            p.sideband_ratio()
        } else {
            f64::NAN
        },
        drive_ratio: if p.kappa() > 0.0 {
            p.drive_ratio()
        } else {
            f64::NAN
        },
        ..Default::default()
    };
    let mut require_pos = |name: &str, v: f64| {
        if !v.is_finite() || v <= 0.0 {
            r.errors.push(format!(
                "{name} must be finite and strictly positive, got {v:e}"
            ));
        }
    };
    require_pos("omega1", p.omega1);
    require_pos("omega_m", p.omega_m);
    require_pos("kappa_ex", p.kappa_ex);
    require_pos("h_coupling", p.h_coupling);
    require_pos("phase_per_cell", p.phase_per_cell);
    require_pos("cell_transit", p.cell_transit);
    let mut require_nonneg = |name: &str, v: f64| {
        if !v.is_finite() || v < 0.0 {
            r.errors
                .push(format!("{name} must be finite and non-negative, got {v:e}"));
        }
    };
    require_nonneg("kappa_in", p.kappa_in);
    require_nonneg("gamma_m", p.gamma_m);
    require_nonneg("omega_drive", p.omega_drive);
    require_nonneg("t_base", p.t_base);
    require_nonneg("chi", p.chi);

    if r.errors.is_empty() {
        if p.omega_drive > p.kappa() {
            r.warnings.push(format!(
                "weak-driving regime violated: omega_drive/kappa = {:.3} > 1; \
                 the noise rate model is unreliable here",
                r.drive_ratio
            ));
        }
        if p.kappa() > p.omega_m {
            r.warnings.push(format!(
                "poor sideband resolution: kappa/omega_m = {:.3} > 1",
                r.sideband_ratio
            ));
        }
        if quarter_wave_offset(p.phase_per_cell) > 1e-9 {
            r.warnings.push(format!(
                "phase_per_cell = {:.6} rad is not an odd multiple of pi/2; \
                 inter-element reflections will not cancel",
                p.phase_per_cell
            ));
        }
    }
    r
}

/// Rates derived from a validated parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// Total cavity decay κ.
    pub kappa: f64,
    /// Optically induced mechanical damping Γ_opt = 4Ω_m²/κ.
    pub gamma_opt: f64,
    /// Group delay per cell κ_ex/(2Ω_m²) (s); infinite when Ω_m = 0.
    pub delay_per_cell: f64,
    /// Total group delay N·κ_ex/(2Ω_m²) (s); infinite when Ω_m = 0.
    pub total_delay: f64,
    /// Slow-band width 4Ω_m²/κ_ex (rad/s).
    pub slow_band_width: f64,
    /// Pump photons per tuning cavity n₂ = (Ω_m/h)².
    pub pump_photons: f64,
}

/// Evaluate the closed-form derived rates. A pure function: identical inputs
/// give bit-identical outputs.
pub fn derived_rates(p: &SystemParams) -> DerivedRates {
    let kappa = p.kappa();
    let om2 = p.omega_drive * p.omega_drive;
    let delay_per_cell = if p.omega_drive > 0.0 {
        p.kappa_ex / (2.0 * om2)
    } else {
        f64::INFINITY
    };
    DerivedRates {
        kappa,
        gamma_opt: 4.0 * om2 / kappa,
        delay_per_cell,
        total_delay: p.n_elements as f64 * delay_per_cell,
        slow_band_width: 4.0 * om2 / p.kappa_ex,
        pump_photons: (p.omega_drive / p.h_coupling).powi(2),
    }
}
