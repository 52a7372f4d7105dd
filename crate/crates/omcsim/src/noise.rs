//! Thermal and Stokes noise budget: optical cooling/heating rates, the
//! mechanical energy rate equation and its steady state, output noise power,
//! the single-photon power comparison, bath heating from pump absorption,
//! and pump power/attenuation requirements.

use num_complex::Complex64 as C64;

use crate::bands::{bloch_wavevector, block_eigen};
use crate::params::SystemParams;
use crate::scattering::beta;
use crate::{fmt_g17, map_ordered, Error, Result, HBAR, KB};

/// Bose occupation at the mechanical frequency,
/// n̄_th = (e^{ℏω_m/k_B T} - 1)⁻¹. Zero at T = 0.
pub fn thermal_occupation(omega_m: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega_m / (KB * temperature)).exp_m1()
}

/// Bath temperature including pump-absorption heating,
/// T_b = T₀ + χ(Ω_m/h)².
pub fn bath_temperature(p: &SystemParams) -> f64 {
    p.t_base + p.chi * (p.omega_drive / p.h_coupling).powi(2)
}

/// Optically induced cooling and heating rates (Γ₋, Γ₊) for a pump detuned
/// by δ_L from the active cavity:
/// Γ∓ = κΩ_m² / ((δ_L ± ω_m)² + (κ/2)²).
///
/// At δ_L = -ω_m the cooling rate is resonantly enhanced to
/// Γ_opt = 4Ω_m²/κ while Γ₊ = Γ_opt·κ²/(κ² + 16ω_m²).
pub fn cooling_rates(delta_l: f64, p: &SystemParams) -> (f64, f64) {
    let k = p.kappa();
    let om2 = p.omega_drive * p.omega_drive;
    let gamma = |s: f64| k * om2 / ((delta_l + s * p.omega_m).powi(2) + (k / 2.0).powi(2));
    (gamma(1.0), gamma(-1.0))
}

/// Coefficients of the linear mechanical-energy rate equation
/// dE/dt = -A·E + B at the optimal pump detuning δ_L = -ω_m:
///
/// ```text
/// dE/dt = -γ_m (E - ℏω_m n̄_th) - Γ_opt E + Γ₊ (E + ℏω_m)
/// ```
fn energy_ode(p: &SystemParams, t_bath: f64) -> Result<(f64, f64)> {
    let (gamma_minus, gamma_plus) = cooling_rates(-p.omega_m, p);
    let a = p.gamma_m + gamma_minus - gamma_plus;
    if a <= 0.0 {
        return Err(Error::Unstable(format!(
            "heating rate {gamma_plus:e} exceeds total damping; no steady state"
        )));
    }
    let n_th = thermal_occupation(p.omega_m, t_bath);
    let b = p.gamma_m * HBAR * p.omega_m * n_th + gamma_plus * HBAR * p.omega_m;
    Ok((a, b))
}

/// Closed-form steady-state mechanical energy E_ss (J) at bath temperature
/// `t_bath`.
pub fn mech_energy_steady(p: &SystemParams, t_bath: f64) -> Result<f64> {
    let (a, b) = energy_ode(p, t_bath)?;
    Ok(b / a)
}

/// Exact transient of the mechanical energy from E(0) = `e0`:
/// E(t) = E_ss + (E₀ - E_ss)·e^{-At}.
pub fn mech_energy_transient(p: &SystemParams, t_bath: f64, e0: f64, t: f64) -> Result<f64> {
    let (a, b) = energy_ode(p, t_bath)?;
    let ess = b / a;
    Ok(ess + (e0 - ess) * (-a * t).exp())
}

/// Whether the Stokes sideband (displaced 2ω_m from the signal) is assumed
/// filtered from the output. Unfiltered doubles the Stokes term of the
/// approximate noise power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StokesFilter {
    #[default]
    Filtered,
    Unfiltered,
}

/// Output noise power at one waveguide end for N elements.
#[derive(Debug, Clone, Copy)]
pub struct NoisePower {
    /// Weak-driving approximation
    /// (Nℏω₁/2)(κ_ex/κ)(γ_m n̄_th + Γ_opt (κ/4ω_m)²).
    pub approx: f64,
    /// Upper bound (1/2)·Γ_opt·E_ss·N·(ω₁/ω_m)(κ_ex/κ) from the steady-state
    /// energy.
    pub bound: f64,
}

/// Both forms of the output noise power. They agree within ~10% when
/// Γ_opt ≫ γ_m and κ ≪ ω_m.
pub fn noise_power(
    p: &SystemParams,
    n: usize,
    t_bath: f64,
    filter: StokesFilter,
) -> Result<NoisePower> {
    let nf = n as f64;
    let k = p.kappa();
    let n_th = thermal_occupation(p.omega_m, t_bath);
    let gamma_opt = 4.0 * p.omega_drive * p.omega_drive / k;
    let stokes_factor = match filter {
        StokesFilter::Filtered => 1.0,
        StokesFilter::Unfiltered => 2.0,
    };
    let approx = nf * HBAR * p.omega1 / 2.0
        * (p.kappa_ex / k)
        * (p.gamma_m * n_th + stokes_factor * gamma_opt * (k / (4.0 * p.omega_m)).powi(2));
    let ess = mech_energy_steady(p, t_bath)?;
    let bound = 0.5 * gamma_opt * ess * nf * (p.omega1 / p.omega_m) * (p.kappa_ex / k);
    Ok(NoisePower { approx, bound })
}

/// Power carried by a single-photon pulse of bandwidth Δω, P_ph = ℏω₁Δω,
/// and its ratio to the array noise power at the self-consistent bath
/// temperature.
#[derive(Debug, Clone, Copy)]
pub struct PhotonPulsePower {
    pub p_ph: f64,
    pub p_noise: f64,
    pub ratio: f64,
}

pub fn photon_pulse_power(p: &SystemParams, delta_omega: f64) -> Result<PhotonPulsePower> {
    let p_ph = HBAR * p.omega1 * delta_omega;
    let t_b = bath_temperature(p);
    let p_noise = noise_power(p, p.n_elements, t_b, StokesFilter::Filtered)?.approx;
    Ok(PhotonPulsePower {
        p_ph,
        p_noise,
        ratio: p_ph / p_noise,
    })
}

/// Assembled noise budget for a parameter set.
#[derive(Debug, Clone, Copy)]
pub struct NoiseReport {
    pub n_th: f64,
    pub t_bath: f64,
    pub gamma_opt: f64,
    pub gamma_plus: f64,
    pub e_ss: f64,
    /// Approximate output noise power for N elements (W).
    pub p_noise: f64,
    /// Steady-state upper bound (W).
    pub p_noise_bound: f64,
    /// Single-photon pulse power at the supplied bandwidth (W).
    pub p_ph: f64,
    pub ratio: f64,
    /// Bandwidth used for the single-photon comparison (rad/s).
    pub delta_omega: f64,
}

/// Full noise budget; `delta_omega` defaults to the binding bandwidth limit
/// of the N-element array.
pub fn noise_report(p: &SystemParams, delta_omega: Option<f64>) -> Result<NoiseReport> {
    let n = p.n_elements.max(1);
    let dw = delta_omega.unwrap_or_else(|| crate::cascade::bandwidth_limits(p, n).binding);
    let t_b = bath_temperature(p);
    let (gamma_minus, gamma_plus) = cooling_rates(-p.omega_m, p);
    let power = noise_power(p, n, t_b, StokesFilter::Filtered)?;
    let p_ph = HBAR * p.omega1 * dw;
    Ok(NoiseReport {
        n_th: thermal_occupation(p.omega_m, t_b),
        t_bath: t_b,
        gamma_opt: gamma_minus,
        gamma_plus,
        e_ss: mech_energy_steady(p, t_b)?,
        p_noise: power.approx,
        p_noise_bound: power.bound,
        p_ph,
        ratio: p_ph / power.approx,
        delta_omega: dw,
    })
}

impl NoiseReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n_th,t_bath,gamma_opt,gamma_plus,e_ss,p_noise,p_noise_bound,p_ph,ratio,delta_omega\n",
        );
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            fmt_g17(self.n_th),
            fmt_g17(self.t_bath),
            fmt_g17(self.gamma_opt),
            fmt_g17(self.gamma_plus),
            fmt_g17(self.e_ss),
            fmt_g17(self.p_noise),
            fmt_g17(self.p_noise_bound),
            fmt_g17(self.p_ph),
            fmt_g17(self.ratio),
            fmt_g17(self.delta_omega),
        ));
        out
    }
}

impl std::fmt::Display for NoiseReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "bath temperature      T_b      = {:.6} K", self.t_bath)?;
        writeln!(f, "thermal occupation    n_th     = {:.6}", self.n_th)?;
        writeln!(
            f,
            "cooling rate          G_opt/2pi = {:.6e} Hz",
            self.gamma_opt / std::f64::consts::TAU
        )?;
        writeln!(
            f,
            "heating rate          G_+/2pi   = {:.6e} Hz",
            self.gamma_plus / std::f64::consts::TAU
        )?;
        writeln!(f, "steady-state energy   E_ss     = {:.6e} J", self.e_ss)?;
        writeln!(f, "output noise power    P_noise  = {:.6e} W", self.p_noise)?;
        writeln!(
            f,
            "noise power bound     P_bound  = {:.6e} W",
            self.p_noise_bound
        )?;
        writeln!(
            f,
            "pulse bandwidth       dw/2pi   = {:.6e} Hz",
            self.delta_omega / std::f64::consts::TAU
        )?;
        writeln!(f, "single-photon power   P_ph     = {:.6e} W", self.p_ph)?;
        write!(f, "power ratio           P_ph/P_noise = {:.4}", self.ratio)
    }
}

/// Pump drive requirements at one detuning from the pump-cavity resonance.
#[derive(Debug, Clone, Copy)]
pub struct PumpReport {
    /// Pump detuning δ_p (rad/s).
    pub delta_p: f64,
    /// Required right-moving photon flux Φ_R (photons/s).
    pub flux: f64,
    /// Input power ℏω₁·Φ_R (W).
    pub p_in: f64,
    /// Exact attenuation exponent per cell, Im{K}d from the bare-cavity
    /// dispersion.
    pub alpha: f64,
    /// Approximation κ_ex·κ_in/(4δ_p²).
    pub alpha_hat: f64,
}

/// Pump flux, input power and per-cell attenuation needed to hold
/// `n_pump_photons` in each tuning cavity when driving at detuning `delta_p`
/// from the pump-cavity resonance.
///
/// The pump cavities see the array as bare side-coupled resonators (no
/// optomechanical drive at the pump frequency), so the same transfer-matrix
/// dispersion applies with Ω_m = 0. Detunings inside the bare-cavity gap
/// (|δ_p| < κ_ex/2) cannot excite the pump cavities from the waveguide and
/// are an error naming the gap edges.
pub fn pump_requirements(
    delta_p: f64,
    n_pump_photons: f64,
    p: &SystemParams,
) -> Result<PumpReport> {
    let gap = p.kappa_ex / 2.0;
    if delta_p.abs() <= gap {
        return Err(Error::PumpInBandGap {
            detuning: delta_p,
            gap_lo: -gap,
            gap_hi: gap,
        });
    }
    let bare = p.with_omega_drive(0.0);
    let kd = bloch_wavevector(delta_p, &bare)?;
    let eig = block_eigen(delta_p, &bare)?;
    let (s11, s21) = eig.v1;
    let b1 = beta(delta_p, &bare)?;
    let mix = (s11 + s21).norm_sqr();
    if mix == 0.0 || b1.norm_sqr() == 0.0 {
        return Err(Error::Numerical(format!(
            "pump mode structure degenerate at delta_p = {delta_p:e}"
        )));
    }
    let flux = p.kappa_ex / (2.0 * b1.norm_sqr()) * (s11.norm_sqr() - s21.norm_sqr()) / mix
        * n_pump_photons;
    Ok(PumpReport {
        delta_p,
        flux,
        p_in: HBAR * p.omega1 * flux,
        alpha: kd.im,
        alpha_hat: p.kappa_ex * p.kappa_in / (4.0 * delta_p * delta_p),
    })
}

/// Default pump scan grid: log-spaced detunings from just outside the gap
/// edge out to 20 κ_ex.
pub fn default_pump_grid(p: &SystemParams, points: usize) -> Vec<f64> {
    let lo = 0.55 * p.kappa_ex;
    let hi = 20.0 * p.kappa_ex;
    (0..points)
        .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1).max(1) as f64))
        .collect()
}

/// Evaluate [`pump_requirements`] over a detuning grid (parallel, ordered).
pub fn pump_scan(p: &SystemParams, n_pump_photons: f64, grid: &[f64]) -> Result<Vec<PumpReport>> {
    map_ordered(grid, |&d| pump_requirements(d, n_pump_photons, p))
        .into_iter()
        .collect()
}

/// CSV columns: `delta_p,p_in,alpha,alpha_hat,flux`.
pub fn pump_csv(rows: &[PumpReport]) -> String {
    let mut out = String::from("delta_p,p_in,alpha,alpha_hat,flux\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g17(r.delta_p),
            fmt_g17(r.p_in),
            fmt_g17(r.alpha),
            fmt_g17(r.alpha_hat),
            fmt_g17(r.flux),
        ));
    }
    out
}

/// Attenuation of the pump after `n` cells, exp(-α·n).
pub fn pump_attenuation_after(report: &PumpReport, n: usize) -> f64 {
    (-report.alpha * n as f64).exp()
}

#[allow(unused)]
fn _complex_type_anchor() -> C64 {
    C64::new(0.0, 0.0)
}
