//! Infinite-array Bloch analysis: complex dispersion K(δ), band-gap edges,
//! fractional occupations of the hybrid polariton, and numeric group
//! velocity.
//!
//! The dispersion follows from the trace of the unit-cell transfer matrix,
//! cos(Kd) = cos(kd) - iβ(δ) sin(kd). The branch is fixed by Im(Kd) ≥ 0
//! (right-decaying evanescent waves) with Re(Kd) in the window of
//! `phase_per_cell`, so that Kd(0) = phase_per_cell exactly.

use num_complex::Complex64 as C64;

use crate::params::SystemParams;
use crate::scattering::{beta, block_matrix, TwoPortMatrix};
use crate::{fmt_g17, map_ordered, tol, Error, Result};

/// One row of a dispersion table: detuning, complex Bloch wavevector times
/// the cell length, and the waveguide/cavity/mechanical fractional
/// occupations of the selected Bloch mode.
#[derive(Debug, Clone, Copy)]
pub struct DispersionPoint {
    pub delta: f64,
    pub bloch_kd: C64,
    pub f_waveguide: f64,
    pub f_optical: f64,
    pub f_mechanical: f64,
}

/// Complex Bloch wavevector per cell, Kd(δ).
///
/// Solves cos(Kd) = cos(kd) - iβ sin(kd) by complex arccos; among the branch
/// candidates ±acos + 2πn the one with Im ≥ 0 and Re closest to
/// `phase_per_cell` is returned.
pub fn bloch_wavevector(delta: f64, p: &SystemParams) -> Result<C64> {
    let kd = p.phase_per_cell + delta * p.cell_transit;
    let b = beta(delta, p)?;
    let w = C64::new(kd.cos(), 0.0) - C64::new(0.0, 1.0) * b * kd.sin();
    Ok(branch_arccos(w, p.phase_per_cell))
}

/// Branch-resolved arccos: Im ≥ 0, Re folded as close as possible to
/// `target`.
fn branch_arccos(w: C64, target: f64) -> C64 {
    let c = w.acos();
    let mut best: Option<C64> = None;
    for cand in [c, -c] {
        if cand.im < -1e-12 {
            continue;
        }
        let folded = cand
            + C64::new(2.0 * std::f64::consts::PI, 0.0)
                * ((target - cand.re) / (2.0 * std::f64::consts::PI)).round();
        let keep = match best {
            None => true,
            Some(b) => (folded.re - target).abs() < (b.re - target).abs(),
        };
        if keep {
            best = Some(folded);
        }
    }
    let mut k = best.unwrap_or(c);
    if k.im < 0.0 {
        k.im = 0.0; // clamp -0.0 / rounding dust onto the physical branch
    }
    k
}

/// Eigendecomposition of the unit-cell matrix M_block at one detuning.
///
/// `lambda1 = e^{iKd}` on the resolved branch (|λ₁| ≤ 1); `lambda2 = 1/λ₁`.
/// The eigenvector columns `v1`, `v2` have unit Euclidean norm, matching the
/// identification |C|² = |c|² + |d|² used by the occupation formulas.
#[derive(Debug, Clone, Copy)]
pub struct BlockEigen {
    pub kd: C64,
    pub lambda1: C64,
    pub lambda2: C64,
    pub v1: (C64, C64),
    pub v2: (C64, C64),
}

impl BlockEigen {
    /// det [v1 v2].
    pub fn det_s(&self) -> C64 {
        self.v1.0 * self.v2.1 - self.v1.1 * self.v2.0
    }
}

fn eigenvector_for(m: &TwoPortMatrix, lambda: C64) -> (C64, C64) {
    // (M - λI)v = 0: rows give v ∝ (m12, λ - m11) or (λ - m22, m21);
    // pick the better-conditioned one.
    let a = (m.m12, lambda - m.m11);
    let b = (lambda - m.m22, m.m21);
    let na = a.0.norm_sqr() + a.1.norm_sqr();
    let nb = b.0.norm_sqr() + b.1.norm_sqr();
    let v = if na >= nb { a } else { b };
    let n = (v.0.norm_sqr() + v.1.norm_sqr()).sqrt();
    (v.0 / n, v.1 / n)
}

/// Diagonalize M_block(δ) = S·diag(e^{iKd}, e^{-iKd})·S⁻¹.
///
/// Errors with [`Error::DegenerateEigenvalues`] at band edges and for nπ
/// phasing, where the two Bloch eigenvalues coincide and the matrix is not
/// diagonalizable.
pub fn block_eigen(delta: f64, p: &SystemParams) -> Result<BlockEigen> {
    let m = block_matrix(delta, p)?;
    let kd = bloch_wavevector(delta, p)?;
    let lambda1 = (C64::new(0.0, 1.0) * kd).exp();
    let lambda2 = 1.0 / lambda1;
    if (lambda1 - lambda2).norm() < tol::DEGENERATE_EIG * (lambda1.norm() + lambda2.norm()) {
        return Err(Error::DegenerateEigenvalues(format!(
            "Bloch eigenvalues coincide at delta = {delta:e} (band edge)"
        )));
    }
    Ok(BlockEigen {
        kd,
        lambda1,
        lambda2,
        v1: eigenvector_for(&m, lambda1),
        v2: eigenvector_for(&m, lambda2),
    })
}

/// Slow-band and gap edges of the lossless simplified dispersion
/// cos(Kd) = -κ_ex δ / (2(Ω_m² - δ²)).
#[derive(Debug, Clone, Copy)]
pub struct BandEdges {
    /// Exact inner (slow-band) edge: smallest δ > 0 with |cos(Kd)| = 1.
    pub inner: f64,
    /// Exact outer gap edge.
    pub outer: f64,
    /// Closed-form approximation 2Ω_m²/κ.
    pub inner_approx: f64,
    /// Closed-form approximation κ_ex/2.
    pub outer_approx: f64,
    /// Set when Ω_m > κ_ex, where the structure is a normal-mode splitting
    /// of width ~2Ω_m rather than a narrow transparency band.
    pub normal_mode_regime: bool,
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locate |cos(Kd)| = 1 crossings of the lossless simplified dispersion.
/// Requires Ω_m > 0.
pub fn band_edges(p: &SystemParams) -> Result<BandEdges> {
    let om = p.omega_drive;
    if om <= 0.0 {
        return Err(Error::Undefined(
            "band edges require a nonzero driving amplitude".into(),
        ));
    }
    let kex = p.kappa_ex;
    let g = |d: f64| -kex * d / (2.0 * (om * om - d * d));
    // g runs 0 → -∞ on (0, Ω) and +∞ → 0 on (Ω, ∞): one |g| = 1 crossing on
    // each side of the mechanical frequency.
    let inner = bisect(|d| g(d) + 1.0, om * 1e-12, om * (1.0 - 1e-12));
    let outer = bisect(|d| g(d) - 1.0, om * (1.0 + 1e-12), kex + 4.0 * om);
    Ok(BandEdges {
        inner,
        outer,
        inner_approx: 2.0 * om * om / p.kappa(),
        outer_approx: kex / 2.0,
        normal_mode_regime: om > kex,
    })
}

/// Fractional occupations (waveguide, optical cavity, mechanical) of the
/// Bloch mode on the resolved branch at detuning δ.
///
/// Per unit cell and per unit Bloch amplitude: n_WG = d/c, n_o =
/// (2|β|²/κ_ex)|s11+s21|², n_m = Ω_m²/(δ² + γ_m²/4)·n_o, subsequently
/// normalized so the three fractions sum to one.
pub fn occupations(delta: f64, p: &SystemParams) -> Result<(f64, f64, f64)> {
    let eig = block_eigen(delta, p)?;
    let (s11, s21) = eig.v1;
    let mix = (s11 + s21).norm_sqr();
    let n_wg = p.cell_transit; // |C|^2 = 1 for unit-norm columns
    let b = beta(delta, p)?;
    let n_o = 2.0 * b.norm_sqr() / p.kappa_ex * mix;
    let mech_den = delta * delta + p.gamma_m * p.gamma_m / 4.0;
    let n_m = if mech_den > 0.0 {
        p.omega_drive * p.omega_drive / mech_den * n_o
    } else if p.omega_drive > 0.0 {
        // delta = 0, gamma_m = 0: beta ∝ delta, so Ω²|β/δ|² has the finite
        // limit κ_ex²/(4Ω²); n_o itself vanishes.
        p.kappa_ex / (2.0 * p.omega_drive * p.omega_drive) * mix
    } else {
        0.0
    };
    let total = n_wg + n_o + n_m;
    Ok((n_wg / total, n_o / total, n_m / total))
}

/// Group velocity in cells per second from a central difference of Re Kd.
#[derive(Debug, Clone, Copy)]
pub struct GroupVelocity {
    /// (d Re(Kd)/dδ)⁻¹, cells per second.
    pub v_g_cells: f64,
    /// Reciprocal: group delay per cell (s).
    pub delay_per_cell: f64,
    /// Set when the finite-difference stencil approaches a band edge, where
    /// a larger step would be unreliable.
    pub near_edge: bool,
}

/// Numeric group velocity at δ inside the slow band.
pub fn group_velocity_numeric(delta: f64, p: &SystemParams) -> Result<GroupVelocity> {
    let edges = band_edges(p)?;
    let h = edges.inner / 100.0;
    let kp = bloch_wavevector(delta + h, p)?;
    let km = bloch_wavevector(delta - h, p)?;
    let slope = (kp.re - km.re) / (2.0 * h);
    if slope == 0.0 || !slope.is_finite() {
        return Err(Error::Numerical(format!(
            "vanishing dispersion slope at delta = {delta:e}"
        )));
    }
    Ok(GroupVelocity {
        v_g_cells: 1.0 / slope,
        delay_per_cell: slope,
        near_edge: delta.abs() + h > 0.9 * edges.inner,
    })
}

/// Evaluate the dispersion and occupations on a detuning grid (parallel over
/// grid points; output order follows the grid).
pub fn dispersion_table(p: &SystemParams, grid: &[f64]) -> Result<Vec<DispersionPoint>> {
    let rows = map_ordered(grid, |&delta| -> Result<DispersionPoint> {
        let kd = bloch_wavevector(delta, p)?;
        let (f_waveguide, f_optical, f_mechanical) = match occupations(delta, p) {
            Ok(f) => f,
            // band edges: dispersion still defined, occupations are not
            Err(Error::DegenerateEigenvalues(_)) => (f64::NAN, f64::NAN, f64::NAN),
            Err(e) => return Err(e),
        };
        Ok(DispersionPoint {
            delta,
            bloch_kd: kd,
            f_waveguide,
            f_optical,
            f_mechanical,
        })
    });
    rows.into_iter().collect()
}

/// CSV serialization of a dispersion table. Columns:
/// `delta,re_kd,im_kd,f_waveguide,f_optical,f_mechanical`.
pub fn dispersion_csv(rows: &[DispersionPoint]) -> String {
    let mut out = String::from("delta,re_kd,im_kd,f_waveguide,f_optical,f_mechanical\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_g17(r.delta),
            fmt_g17(r.bloch_kd.re),
            fmt_g17(r.bloch_kd.im),
            fmt_g17(r.f_waveguide),
            fmt_g17(r.f_optical),
            fmt_g17(r.f_mechanical),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_params(kappa_ex: f64, kappa_in: f64, omega_drive: f64) -> SystemParams {
        let mut p = SystemParams::fig1();
        p.kappa_ex = kappa_ex;
        p.kappa_in = kappa_in;
        p.omega_drive = omega_drive;
        p.gamma_m = 0.0;
        p.cell_transit = 1e-30;
        p
    }

    #[test]
    fn resonance_pins_quarter_wave_phase() {
        let p = unit_params(1.0, 0.1, 0.1);
        let kd = bloch_wavevector(0.0, &p).unwrap();
        assert!((kd - C64::new(PI / 2.0, 0.0)).norm() < 1e-14);
        // and for the next odd multiple
        let p3 = p.with_phase_per_cell(3.0 * PI / 2.0);
        let kd3 = bloch_wavevector(0.0, &p3).unwrap();
        assert!((kd3 - C64::new(3.0 * PI / 2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn lossless_band_is_real_and_gap_is_evanescent() {
        let p = unit_params(1.0, 0.0, 0.1);
        let edges = band_edges(&p).unwrap();
        for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let kd = bloch_wavevector(frac * edges.inner, &p).unwrap();
            assert!(kd.im.abs() < 1e-10, "in-band Im(Kd) = {}", kd.im);
        }
        for frac in [1.1, 1.5, 2.0] {
            let kd = bloch_wavevector(frac * edges.inner, &p).unwrap();
            assert!(kd.im > 1e-6, "in-gap Im(Kd) = {}", kd.im);
        }
    }

    #[test]
    fn band_edges_match_quadratic_roots() {
        // |cos(Kd)| = 1 gives 2δ² ∓ κ_ex δ - 2Ω² = 0; the bisection must
        // reproduce the positive roots.
        let p = unit_params(1.0, 0.0, 0.1);
        let e = band_edges(&p).unwrap();
        let disc = (1.0f64 + 16.0 * 0.01).sqrt();
        let inner = (-1.0 + disc) / 4.0;
        let outer = (1.0 + disc) / 4.0;
        assert!((e.inner - inner).abs() < 1e-10);
        assert!((e.outer - outer).abs() < 1e-10);
        // closed-form approximations hold to 10% in the weak-driving regime
        assert!((e.inner - e.inner_approx).abs() / e.inner_approx < 0.1);
        assert!((e.outer - e.outer_approx).abs() / e.outer_approx < 0.1);
    }

    #[test]
    fn inner_edge_scales_as_drive_squared() {
        let p1 = unit_params(1.0, 0.0, 0.1);
        let p2 = unit_params(1.0, 0.0, 0.2);
        let w1 = band_edges(&p1).unwrap().inner;
        let w2 = band_edges(&p2).unwrap().inner;
        assert!((w2 / w1 - 4.0).abs() / 4.0 < 0.15, "ratio {}", w2 / w1);
    }

    #[test]
    fn strong_driving_flagged() {
        let p = unit_params(1.0, 0.0, 2.0);
        let e = band_edges(&p).unwrap();
        assert!(e.normal_mode_regime);
        assert!(e.inner > 0.0 && e.outer > e.inner);
    }

    #[test]
    fn slow_band_is_mostly_mechanical() {
        let p = SystemParams::fig1(); // Omega = kappa_ex/10, physical transit
        let (f_wg, f_o, f_m) = occupations(0.0, &p).unwrap();
        assert!(f_m > 0.9, "f_mechanical = {f_m}");
        assert!((f_wg + f_o + f_m - 1.0).abs() < 1e-9);
    }

    #[test]
    fn far_detuned_mode_is_waveguide_like() {
        let p = SystemParams::fig1();
        let (f_wg, _, _) = occupations(500.0 * p.kappa_ex, &p).unwrap();
        assert!(f_wg > 0.95, "f_waveguide = {f_wg}");
    }

    #[test]
    fn fractions_sum_to_one() {
        let p = SystemParams::fig1();
        let edges = band_edges(&p).unwrap();
        for frac in [-0.8, -0.4, 0.0, 0.3, 0.6] {
            let (a, b, c) = occupations(frac * edges.inner, &p).unwrap();
            assert!((a + b + c - 1.0).abs() < 1e-9);
            for f in [a, b, c] {
                assert!((0.0..=1.0).contains(&f));
            }
        }
    }

    #[test]
    fn mechanical_fraction_grows_as_drive_shrinks() {
        let p = SystemParams::fig1();
        let mut last = 0.0;
        for scale in [1.0, 0.5, 0.25, 0.1] {
            let (_, _, f_m) = occupations(0.0, &p.with_omega_drive(p.omega_drive * scale)).unwrap();
            assert!(f_m > last, "f_m {f_m} not increasing");
            last = f_m;
        }
        assert!(last > 0.999);
    }

    #[test]
    fn band_edge_is_degenerate() {
        let p = unit_params(1.0, 0.0, 0.1);
        let e = band_edges(&p).unwrap();
        match occupations(e.inner, &p) {
            Err(Error::DegenerateEigenvalues(_)) => {}
            other => panic!("expected degenerate-eigenvalue error, got {other:?}"),
        }
    }

    #[test]
    fn group_velocity_on_resonance() {
        let p = unit_params(1.0, 1e-6, 0.1);
        let g = group_velocity_numeric(0.0, &p).unwrap();
        let expected = 2.0 * 0.01 / 1.0; // 2 Omega^2 / kappa_ex, cells/time
        assert!(
            (g.v_g_cells - expected).abs() / expected < 1e-4,
            "v_g = {}",
            g.v_g_cells
        );
        assert!(!g.near_edge);
    }

    #[test]
    fn group_velocity_scales_with_drive_squared() {
        let p1 = unit_params(1.0, 0.0, 0.05);
        let p2 = unit_params(1.0, 0.0, 0.1);
        let v1 = group_velocity_numeric(0.0, &p1).unwrap().v_g_cells;
        let v2 = group_velocity_numeric(0.0, &p2).unwrap().v_g_cells;
        assert!((v2 / v1 - 4.0).abs() < 1e-3);
    }

    #[test]
    fn group_velocity_drops_toward_band_edge() {
        let p = unit_params(1.0, 0.0, 0.1);
        let e = band_edges(&p).unwrap();
        let v0 = group_velocity_numeric(0.0, &p).unwrap().v_g_cells;
        let mut last = v0;
        for frac in [0.25, 0.5, 0.7] {
            let v = group_velocity_numeric(frac * e.inner, &p)
                .unwrap()
                .v_g_cells;
            assert!(v < last && v > 0.0, "v_g not decreasing at frac {frac}");
            last = v;
        }
        let near = group_velocity_numeric(0.95 * e.inner, &p).unwrap();
        assert!(near.near_edge);
    }

    #[test]
    fn dispersion_symmetry_lossless() {
        // Re Kd - pi/2 is odd in delta for the lossless simplified dispersion.
        let p = unit_params(1.0, 0.0, 0.1);
        for frac in [0.1, 0.4, 0.8] {
            let d = frac * band_edges(&p).unwrap().inner;
            let kp = bloch_wavevector(d, &p).unwrap();
            let km = bloch_wavevector(-d, &p).unwrap();
            assert!(((kp.re - PI / 2.0) + (km.re - PI / 2.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn dispersion_table_handles_edges() {
        // lossless and negligible transit, so the band edge is an exact
        // eigenvalue degeneracy of the block matrix
        let p = unit_params(1.0, 0.0, 0.1);
        let e = band_edges(&p).unwrap();
        let grid = vec![-0.5 * e.inner, 0.0, e.inner, 2.0 * e.inner];
        let rows = dispersion_table(&p, &grid).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[2].f_mechanical.is_nan()); // edge flagged, not fatal
        let csv = dispersion_csv(&rows);
        assert!(csv.starts_with("delta,re_kd,"));
        assert_eq!(csv.lines().count(), 5);
    }
}
