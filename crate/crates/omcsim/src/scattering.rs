//! Single-element frequency-domain scattering: reflection/transmission
//! coefficients, the β parameter, and the per-element / per-cell transfer
//! matrices.
//!
//! The element response follows from the steady state of the cavity and
//! mechanical mode equations. With the cavity denominator
//!
//! ```text
//! D(δ) = -iδ + κ/2 + Ω_m²/(-iδ + γ_m/2)
//! ```
//!
//! the reflection coefficient of a side-coupled element is
//! r(δ) = -(κ_ex/2)/D(δ) and t = 1 + r. At γ_m = 0 this reduces exactly to
//! the lossless-mechanics closed form
//! r = -δκ_ex / (δ(-2iδ+κ) + 2iΩ_m²).

use num_complex::Complex64 as C64;
use std::ops::Mul;

use crate::params::SystemParams;
use crate::{tol, Error, Result};

/// Cavity response denominator D(δ) = -iδ + κ/2 + Ω²/(-iδ + γ/2).
///
/// Returns `None` when the mechanical term is a true on-resonance pole
/// (δ = 0, γ_m = 0 with Ω_m > 0), in which case the element response is taken
/// in the analytic limit |D| → ∞.
fn cavity_denominator(delta: f64, p: &SystemParams) -> Option<C64> {
    let base = C64::new(p.kappa() / 2.0, -delta);
    if p.omega_drive == 0.0 {
        return Some(base);
    }
    let mech = C64::new(p.gamma_m / 2.0, -delta);
    if mech.norm_sqr() == 0.0 {
        return None;
    }
    Some(base + p.omega_drive * p.omega_drive / mech)
}

/// The β(δ) parameter of the element transfer matrix,
/// β = -iκ_ex δ / (-iκ_in δ + 2(Ω_m² - δ²)) at γ_m = 0, generalized to
/// γ_m > 0 through the mechanical susceptibility.
///
/// Corner cases at δ = 0, γ_m = 0: with Ω_m > 0 the coupling pole gives
/// β = 0 exactly; for a bare lossy cavity (Ω_m = 0, κ_in > 0) the limit is
/// κ_ex/κ_in; the bare lossless corner (Ω_m = κ_in = 0) is a genuine 0/0 and
/// is an error.
pub fn beta(delta: f64, p: &SystemParams) -> Result<C64> {
    match cavity_denominator(delta, p) {
        None => Ok(C64::new(0.0, 0.0)),
        Some(d) => {
            let den = d - p.kappa_ex / 2.0;
            if den.norm_sqr() == 0.0 {
                return Err(Error::Undefined(
                    "beta is 0/0 at delta = 0 for a bare lossless cavity \
                     (omega_drive = kappa_in = 0)"
                        .into(),
                ));
            }
            Ok(p.kappa_ex / 2.0 / den)
        }
    }
}

/// Reflection coefficient r(δ) = -(κ_ex/2)/D(δ) for right or left incidence
/// (the element is direction-symmetric).
pub fn reflection(delta: f64, p: &SystemParams) -> C64 {
    match cavity_denominator(delta, p) {
        // On-resonance transparency: the driven mechanical mode interferes
        // destructively with cavity excitation.
        None => C64::new(0.0, 0.0),
        Some(d) => -(p.kappa_ex / 2.0) / d,
    }
}

/// Transmission coefficient t(δ) = 1 + r(δ).
pub fn transmission(delta: f64, p: &SystemParams) -> C64 {
    C64::new(1.0, 0.0) + reflection(delta, p)
}

/// 2x2 complex transfer matrix relating right/left-moving field amplitudes
/// across an element or free span: (a_R, a_L) just right of the boundary =
/// M · (a_R, a_L) just left of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortMatrix {
    pub m11: C64,
    pub m12: C64,
    pub m21: C64,
    pub m22: C64,
}

impl TwoPortMatrix {
    pub fn identity() -> Self {
        TwoPortMatrix {
            m11: C64::new(1.0, 0.0),
            m12: C64::new(0.0, 0.0),
            m21: C64::new(0.0, 0.0),
            m22: C64::new(1.0, 0.0),
        }
    }

    pub fn det(&self) -> C64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> C64 {
        self.m11 + self.m22
    }

    /// Apply to an (a_R, a_L) amplitude pair.
    pub fn apply(&self, v: (C64, C64)) -> (C64, C64) {
        (
            self.m11 * v.0 + self.m12 * v.1,
            self.m21 * v.0 + self.m22 * v.1,
        )
    }

    pub fn max_entry_norm(&self) -> f64 {
        self.m11
            .norm()
            .max(self.m12.norm())
            .max(self.m21.norm())
            .max(self.m22.norm())
    }
}

impl Mul for TwoPortMatrix {
    type Output = TwoPortMatrix;
    fn mul(self, rhs: TwoPortMatrix) -> TwoPortMatrix {
        TwoPortMatrix {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }
}

/// Element transfer matrix M_om = (1/t)·[[t²-r², r], [-r, 1]], built from the
/// reflection and transmission coefficients. det(M_om) = 1 identically.
pub fn element_matrix(delta: f64, p: &SystemParams) -> Result<TwoPortMatrix> {
    let r = reflection(delta, p);
    let t = C64::new(1.0, 0.0) + r;
    if t.norm() < tol::SINGULAR_T {
        return Err(Error::SingularMatrix(format!(
            "element transmission vanishes at delta = {delta:e}"
        )));
    }
    Ok(TwoPortMatrix {
        m11: (t * t - r * r) / t,
        m12: r / t,
        m21: -r / t,
        m22: C64::new(1.0, 0.0) / t,
    })
}

/// Equivalent construction of the element matrix from β:
/// M_om = [[1-β, -β], [β, 1+β]]. Kept as an independent route for
/// cross-checking [`element_matrix`]; the two agree entrywise.
pub fn element_matrix_from_beta(delta: f64, p: &SystemParams) -> Result<TwoPortMatrix> {
    let b = beta(delta, p)?;
    let one = C64::new(1.0, 0.0);
    Ok(TwoPortMatrix {
        m11: one - b,
        m12: -b,
        m21: b,
        m22: one + b,
    })
}

/// Free-propagation matrix M_f = diag(e^{ikd}, e^{-ikd}) with
/// kd = phase_per_cell + δ·cell_transit. The detuning correction is retained
/// but negligible for realistic spacings.
pub fn free_matrix(delta: f64, p: &SystemParams) -> TwoPortMatrix {
    let kd = p.phase_per_cell + delta * p.cell_transit;
    let e = C64::from_polar(1.0, kd);
    TwoPortMatrix {
        m11: e,
        m12: C64::new(0.0, 0.0),
        m21: C64::new(0.0, 0.0),
        m22: e.conj(),
    }
}

/// One unit cell: element interaction followed by free propagation to the
/// next element, M_block = M_f · M_om.
pub fn block_matrix(delta: f64, p: &SystemParams) -> Result<TwoPortMatrix> {
    Ok(free_matrix(delta, p) * element_matrix(delta, p)?)
}
