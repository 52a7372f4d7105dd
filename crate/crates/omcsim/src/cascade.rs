//! Finite-N array response: transfer-matrix powers, transmission/reflection
//! spectra, the perturbative wavevector series, and the closed-form
//! bandwidth/delay limits.
//!
//! Propagation over N unit cells is M_N = M_block^N. Coefficients are
//! extracted with the convention r_N = M_N(1,2)/M_N(2,2), t_N = 1/M_N(2,2).
//! Deep inside a band gap the entries of M_N overflow; the eigenvalue route
//! therefore evaluates r_N and t_N in a scaled form that only ever handles
//! the decaying eigenvalue.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::bands::{band_edges, block_eigen};
use crate::params::{derived_rates, SystemParams};
use crate::scattering::{block_matrix, reflection, transmission, TwoPortMatrix};
use crate::{fmt_g17, map_ordered, tol, Error, Result};

/// How a matrix power was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMethod {
    /// Eigendecomposition M_N = S·diag(λ^N)·S⁻¹.
    Eigen,
    /// Repeated squaring; used at band edges / nπ phasing where the block
    /// matrix is not diagonalizable.
    Squaring,
}

/// Result of [`cascade_matrix`] with the method actually used.
#[derive(Debug, Clone, Copy)]
pub struct CascadeMatrix {
    pub matrix: TwoPortMatrix,
    pub method: PowerMethod,
}

fn matrix_power_squaring(m: TwoPortMatrix, mut n: usize) -> TwoPortMatrix {
    let mut base = m;
    let mut acc = TwoPortMatrix::identity();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        n >>= 1;
    }
    acc
}

/// M_N = M_block(δ)^N for N ≥ 1.
///
/// Uses the eigendecomposition when the Bloch eigenvalues are separated and
/// falls back to repeated squaring otherwise; the fallback is flagged in the
/// result.
pub fn cascade_matrix(delta: f64, p: &SystemParams, n: usize) -> Result<CascadeMatrix> {
    assert!(n >= 1, "cascade_matrix requires n >= 1");
    match block_eigen(delta, p) {
        Ok(eig) => {
            let l1n = (C64::new(0.0, 1.0) * (n as f64) * eig.kd).exp();
            let l2n = 1.0 / l1n;
            let (s11, s21) = eig.v1;
            let (s12, s22) = eig.v2;
            let det_s = eig.det_s();
            let matrix = TwoPortMatrix {
                m11: (l1n * s11 * s22 - l2n * s12 * s21) / det_s,
                m12: s11 * s12 * (l2n - l1n) / det_s,
                m21: s21 * s22 * (l1n - l2n) / det_s,
                m22: (l2n * s22 * s11 - l1n * s21 * s12) / det_s,
            };
            if !matrix.max_entry_norm().is_finite() {
                return Err(Error::Numerical(format!(
                    "cascade matrix overflow at delta = {delta:e}, n = {n}"
                )));
            }
            Ok(CascadeMatrix {
                matrix,
                method: PowerMethod::Eigen,
            })
        }
        Err(Error::DegenerateEigenvalues(_)) => {
            let matrix = matrix_power_squaring(block_matrix(delta, p)?, n);
            if !matrix.max_entry_norm().is_finite() {
                return Err(Error::Numerical(format!(
                    "cascade matrix overflow at delta = {delta:e}, n = {n}"
                )));
            }
            Ok(CascadeMatrix {
                matrix,
                method: PowerMethod::Squaring,
            })
        }
        Err(e) => Err(e),
    }
}

/// Frequency-resolved array response on a detuning grid.
///
/// Rows carry the complex coefficients, their squared magnitudes, the
/// unwrapped transmission phase (continuous from the grid point nearest
/// δ = 0), and the group delay d(arg t)/dδ by central differences.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub delta: Vec<f64>,
    pub r: Vec<C64>,
    pub t: Vec<C64>,
    pub r_mag2: Vec<f64>,
    pub t_mag2: Vec<f64>,
    pub phase: Vec<f64>,
    pub group_delay: Vec<f64>,
    /// True when any grid point needed the repeated-squaring fallback.
    pub any_fallback: bool,
}

impl SpectrumTable {
    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    /// CSV with the fixed column order
    /// `delta,re_r,im_r,re_t,im_t,r_mag2,t_mag2,phase_unwrapped,group_delay`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("delta,re_r,im_r,re_t,im_t,r_mag2,t_mag2,phase_unwrapped,group_delay\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                fmt_g17(self.delta[i]),
                fmt_g17(self.r[i].re),
                fmt_g17(self.r[i].im),
                fmt_g17(self.t[i].re),
                fmt_g17(self.t[i].im),
                fmt_g17(self.r_mag2[i]),
                fmt_g17(self.t_mag2[i]),
                fmt_g17(self.phase[i]),
                fmt_g17(self.group_delay[i]),
            ));
        }
        out
    }
}

fn spectrum_point(delta: f64, p: &SystemParams, n: usize) -> Result<(C64, C64, bool)> {
    let r1 = reflection(delta, p);
    let t1 = transmission(delta, p);
    let kd = p.phase_per_cell + delta * p.cell_transit;
    if n == 1 {
        // single element: the free span only adds a phase to t
        return Ok((r1 * C64::from_polar(1.0, -2.0 * kd), t1, false));
    }
    if t1.norm() < 1e-14 {
        // a lossless element is perfectly reflecting exactly at δ = ±Ω_m;
        // the transfer matrix has a pole there but the array response is the
        // plain first-element reflection
        return Ok((
            r1 * C64::from_polar(1.0, -2.0 * kd),
            C64::new(0.0, 0.0),
            false,
        ));
    }
    match block_eigen(delta, p) {
        Ok(eig) => {
            let l1n = (C64::new(0.0, 1.0) * (n as f64) * eig.kd).exp();
            let rho = l1n * l1n; // (λ1/λ2)^n, |rho| <= 1
            let (s11, s21) = eig.v1;
            let (s12, s22) = eig.v2;
            let den = s11 * s22 - s12 * s21 * rho;
            if den.norm() < tol::SPECTRUM_GUARD {
                return Err(Error::Numerical(format!(
                    "spectrum extraction ill-conditioned at delta = {delta:e}"
                )));
            }
            let r_n = s11 * s12 * (C64::new(1.0, 0.0) - rho) / den;
            let t_n = eig.det_s() * l1n / den;
            Ok((r_n, t_n, false))
        }
        Err(Error::DegenerateEigenvalues(_)) => {
            let m = matrix_power_squaring(block_matrix(delta, p)?, n);
            if m.m22.norm() < tol::SPECTRUM_GUARD || !m.max_entry_norm().is_finite() {
                return Err(Error::Numerical(format!(
                    "cascade overflow deep in gap at delta = {delta:e}, n = {n}"
                )));
            }
            Ok((m.m12 / m.m22, C64::new(1.0, 0.0) / m.m22, true))
        }
        Err(e) => Err(e),
    }
}

/// Unwrap a phase sequence so it is continuous, walking outward from
/// `center`.
pub(crate) fn unwrap_from(phases: &mut [f64], center: usize) {
    let n = phases.len();
    for i in center + 1..n {
        let d = phases[i] - phases[i - 1];
        phases[i] -= 2.0 * PI * (d / (2.0 * PI)).round();
    }
    for i in (0..center).rev() {
        let d = phases[i] - phases[i + 1];
        phases[i] -= 2.0 * PI * (d / (2.0 * PI)).round();
    }
}

/// Evaluate r_N, t_N over a strictly increasing detuning grid.
pub fn array_spectrum(p: &SystemParams, n: usize, grid: &[f64]) -> Result<SpectrumTable> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation(
            "spectrum grid must be strictly increasing".into(),
        ));
    }
    let rows: Vec<Result<(C64, C64, bool)>> =
        map_ordered(grid, |&delta| spectrum_point(delta, p, n));
    let mut r = Vec::with_capacity(grid.len());
    let mut t = Vec::with_capacity(grid.len());
    let mut any_fallback = false;
    for row in rows {
        let (ri, ti, fb) = row?;
        r.push(ri);
        t.push(ti);
        any_fallback |= fb;
    }
    let mut phase: Vec<f64> = t.iter().map(|z| z.arg()).collect();
    let center = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    unwrap_from(&mut phase, center);
    let m = grid.len();
    let mut group_delay = vec![0.0; m];
    #[allow(clippy::needless_range_loop)]
    for i in 0..m {
        let (lo, hi) = if i == 0 {
            (0, 1.min(m - 1))
        } else if i == m - 1 {
            (m - 2, m - 1)
        } else {
            (i - 1, i + 1)
        };
        group_delay[i] = if hi > lo {
            (phase[hi] - phase[lo]) / (grid[hi] - grid[lo])
        } else {
            0.0
        };
    }
    Ok(SpectrumTable {
        delta: grid.to_vec(),
        r_mag2: r.iter().map(|z| z.norm_sqr()).collect(),
        t_mag2: t.iter().map(|z| z.norm_sqr()).collect(),
        r,
        t,
        phase,
        group_delay,
        any_fallback,
    })
}

/// Default spectrum grid: 2001 points across ±κ_ex with geometric refinement
/// clusters around each band edge, so both the narrow transparency window and
/// the broad gap are resolved.
pub fn default_grid(p: &SystemParams) -> Vec<f64> {
    let kex = p.kappa_ex;
    let mut grid: Vec<f64> = (0..2001)
        .map(|i| -kex + 2.0 * kex * i as f64 / 2000.0)
        .collect();
    if let Ok(edges) = band_edges(p) {
        let reach = 0.05 * kex;
        let ratio: f64 = (1e-6f64).powf(1.0 / 31.0);
        for edge in [edges.inner, edges.outer] {
            for sign_edge in [-1.0, 1.0] {
                for side in [-1.0, 1.0] {
                    let mut step = reach;
                    for _ in 0..32 {
                        grid.push(sign_edge * edge + side * step);
                        step *= ratio;
                    }
                }
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid.retain(|d| d.abs() <= 1.5 * kex);
    grid
}

/// Coefficients of δ⁰..δ³ in the per-cell effective wavevector k_eff·d.
#[derive(Debug, Clone, Copy)]
pub struct KeffSeries {
    pub c0: C64,
    pub c1: C64,
    pub c2: C64,
    pub c3: C64,
}

impl KeffSeries {
    pub fn eval(&self, delta: f64) -> C64 {
        self.c0 + delta * (self.c1 + delta * (self.c2 + delta * self.c3))
    }
}

/// Closed-form per-cell wavevector series:
///
/// ```text
/// k_eff d = k0 d + κ_ex δ/(2Ω²) + i κ_ex κ_in δ²/(4Ω⁴)
///           + (2κ_ex³ - 3κ_ex κ_in² + 12κ_ex Ω²) δ³/(24Ω⁶)
/// ```
///
/// Undefined for Ω_m = 0.
pub fn keff_series(p: &SystemParams) -> Result<KeffSeries> {
    let om = p.omega_drive;
    if om <= 0.0 {
        return Err(Error::Undefined(
            "wavevector series requires a nonzero driving amplitude".into(),
        ));
    }
    let (kex, kin) = (p.kappa_ex, p.kappa_in);
    let om2 = om * om;
    Ok(KeffSeries {
        c0: C64::new(p.phase_per_cell, 0.0),
        c1: C64::new(kex / (2.0 * om2), 0.0),
        c2: C64::new(0.0, kex * kin / (4.0 * om2 * om2)),
        c3: C64::new(
            (2.0 * kex.powi(3) - 3.0 * kex * kin * kin + 12.0 * kex * om2)
                / (24.0 * om2 * om2 * om2),
            0.0,
        ),
    })
}

/// Numeric per-cell effective wavevector from the two-block transmission,
/// k_eff·d = -(i/2)·ln t₂ with t₂ = 1/M₂(2,2), folded onto the branch of
/// `phase_per_cell`.
///
/// This is the quantity whose small-δ expansion the series reproduces;
/// residuals against [`keff_series`] scale as O(δ⁴).
pub fn keff_numeric_two_block(delta: f64, p: &SystemParams) -> Result<C64> {
    let b = block_matrix(delta, p)?;
    let m2 = b * b;
    if m2.m22.norm() < tol::SPECTRUM_GUARD {
        return Err(Error::Numerical(format!(
            "two-block transmission vanishes at delta = {delta:e}"
        )));
    }
    let t2 = C64::new(1.0, 0.0) / m2.m22;
    let k = C64::new(0.0, -0.5) * t2.ln();
    let fold = ((p.phase_per_cell - k.re) / PI).round();
    Ok(k + C64::new(PI * fold, 0.0))
}

/// Usable-bandwidth limits of an N-element array.
#[derive(Debug, Clone, Copy)]
pub struct BandwidthLimits {
    /// Absorption limit 2√2 Ω²/√(N κ_ex κ_in); infinite for κ_in = 0.
    pub absorption: f64,
    /// Group-velocity-dispersion limit 2(6π)^{1/3} Ω²/(κ_ex N^{1/3}).
    pub dispersion: f64,
    /// The binding (smaller) of the two.
    pub binding: f64,
    /// Full polariton-band width 4Ω²/κ.
    pub full_band: f64,
}

pub fn bandwidth_limits(p: &SystemParams, n: usize) -> BandwidthLimits {
    assert!(n >= 1);
    let om2 = p.omega_drive * p.omega_drive;
    let nf = n as f64;
    let absorption = if p.kappa_in > 0.0 {
        2.0 * 2.0f64.sqrt() * om2 / (nf * p.kappa_ex * p.kappa_in).sqrt()
    } else {
        f64::INFINITY
    };
    let dispersion = 2.0 * (6.0 * PI).cbrt() * om2 / (p.kappa_ex * nf.cbrt());
    BandwidthLimits {
        absorption,
        dispersion,
        binding: absorption.min(dispersion),
        full_band: 4.0 * om2 / p.kappa(),
    }
}

/// The static bandwidth-delay product and its two closed-form arms.
#[derive(Debug, Clone, Copy)]
pub struct BandwidthDelayProduct {
    /// √(2N κ_ex/κ_in); infinite for κ_in = 0.
    pub absorption_arm: f64,
    /// (6πN²)^{1/3}.
    pub dispersion_arm: f64,
    /// min of the two arms.
    pub value: f64,
    /// Distortion-tolerant product over half the full polariton band,
    /// τ_delay · (4Ω²/κ)/2 = N κ_ex/κ, which approaches N for κ_in ≪ κ_ex.
    pub distortion_tolerant: f64,
}

pub fn bandwidth_delay_product(p: &SystemParams, n: usize) -> BandwidthDelayProduct {
    assert!(n >= 1);
    let nf = n as f64;
    let absorption_arm = if p.kappa_in > 0.0 {
        (2.0 * nf * p.kappa_ex / p.kappa_in).sqrt()
    } else {
        f64::INFINITY
    };
    let dispersion_arm = (6.0 * PI * nf * nf).cbrt();
    BandwidthDelayProduct {
        absorption_arm,
        dispersion_arm,
        value: absorption_arm.min(dispersion_arm),
        distortion_tolerant: nf * p.kappa_ex / p.kappa(),
    }
}

/// Smallest N at which the absorption arm becomes the binding limit of the
/// bandwidth-delay product. `None` for κ_in = 0 (absorption never binds).
pub fn crossover_n(p: &SystemParams) -> Option<u64> {
    if p.kappa_in <= 0.0 {
        return None;
    }
    let binds = |n: u64| {
        let b = bandwidth_delay_product(p, n as usize);
        b.absorption_arm <= b.dispersion_arm
    };
    if binds(1) {
        return Some(1);
    }
    let mut hi = 1u64;
    while !binds(hi) {
        hi = hi.checked_mul(2)?;
        if hi > 1 << 50 {
            return None;
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if binds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Numerically measured bandwidth, group delay and their product for a
/// finite array.
#[derive(Debug, Clone, Copy)]
pub struct MeasuredBandwidthDelay {
    /// Width of the contiguous detuning region around resonance over which
    /// |t|² stays above half its resonant value and the nonlinear part of
    /// the transmission phase stays below π.
    pub bandwidth: f64,
    /// Group delay at resonance from the spectrum phase.
    pub delay: f64,
    pub product: f64,
}

/// Measure the bandwidth-delay product from the computed spectrum, with the
/// usable band defined by half-power transmission and a π nonlinear-phase
/// distortion budget.
pub fn measured_bandwidth_delay(p: &SystemParams, n: usize) -> Result<MeasuredBandwidthDelay> {
    let om2 = p.omega_drive * p.omega_drive;
    if om2 <= 0.0 {
        return Err(Error::Undefined(
            "bandwidth measurement requires a nonzero driving amplitude".into(),
        ));
    }
    let span = 1.2 * 2.0 * om2 / p.kappa_ex;
    let m = 4001usize;
    let grid: Vec<f64> = (0..m)
        .map(|i| -span + 2.0 * span * i as f64 / (m - 1) as f64)
        .collect();
    let table = array_spectrum(p, n, &grid)?;
    let i0 = m / 2;
    let delay = table.group_delay[i0];
    let lin: Vec<f64> = (0..m)
        .map(|i| table.phase[i0] + delay * (grid[i] - grid[i0]))
        .collect();
    let t0 = table.t_mag2[i0];
    let ok = |i: usize| table.t_mag2[i] >= 0.5 * t0 && (table.phase[i] - lin[i]).abs() <= PI;
    let mut lo = i0;
    while lo > 0 && ok(lo - 1) {
        lo -= 1;
    }
    let mut hi = i0;
    while hi + 1 < m && ok(hi + 1) {
        hi += 1;
    }
    let bandwidth = grid[hi] - grid[lo];
    Ok(MeasuredBandwidthDelay {
        bandwidth,
        delay,
        product: bandwidth * delay,
    })
}

/// Group delay at δ = 0 predicted by the derived rates, N κ_ex/(2Ω²).
pub fn analytic_delay(p: &SystemParams, n: usize) -> f64 {
    derived_rates(&p.with_n_elements(n)).total_delay
}
