//! TOML run configuration.
//!
//! All frequencies and rates in the file are ordinary frequencies in Hz
//! (i.e. the stored value is ω/2π); they are converted to angular quantities
//! when the [`omcsim::params::SystemParams`] is built. Exactly one parameter
//! source must be present: either `preset = "name"` or a `[params]` table.

use serde::Deserialize;
use std::f64::consts::TAU;

use omcsim::params::SystemParams;

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Named preset; mutually exclusive with `[params]`.
    pub preset: Option<String>,
    pub params: Option<ParamsTable>,
    pub grid: Option<GridConfig>,
    pub pulse: Option<PulseConfig>,
    pub store: Option<StoreConfig>,
    pub pump: Option<PumpConfig>,
    pub optimize: Option<OptimizeConfig>,
}

/// Flat table of scalar fields; `gamma_m_hz` and `q_m` are alternatives.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsTable {
    pub omega1_hz: f64,
    pub omega_m_hz: f64,
    pub kappa_ex_hz: f64,
    pub kappa_in_hz: f64,
    pub gamma_m_hz: Option<f64>,
    pub q_m: Option<f64>,
    pub omega_drive_hz: f64,
    pub h_hz: f64,
    pub n_elements: usize,
    pub phase_per_cell_rad: f64,
    pub cell_transit_s: f64,
    pub t_base_k: f64,
    pub chi_k: f64,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: Option<usize>,
    /// Half-span of the detuning sweep (Hz).
    pub span_hz: Option<f64>,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub detuning_hz: Option<f64>,
    pub width_s: Option<f64>,
    pub amplitude: Option<f64>,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct StoreConfig {
    pub ramp_s: Option<f64>,
    pub hold_s: Option<f64>,
    pub dt_s: Option<f64>,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    pub points: Option<usize>,
    pub max_detuning_hz: Option<f64>,
    pub photons: Option<f64>,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub n_min: Option<f64>,
    pub n_max: Option<f64>,
    pub kappa_ex_min_hz: Option<f64>,
    pub kappa_ex_max_hz: Option<f64>,
    pub omega_drive_min_hz: Option<f64>,
    pub omega_drive_max_hz: Option<f64>,
    pub points_per_decade: Option<f64>,
    pub refine: Option<bool>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }

    /// Resolve the parameter source (preset XOR explicit table).
    pub fn resolve_params(&self) -> Result<SystemParams, String> {
        match (&self.preset, &self.params) {
            (Some(_), Some(_)) => {
                Err("config must contain either `preset` or `[params]`, not both".into())
            }
            (None, None) => {
                Err("config has no parameter source: set `preset` or `[params]`".into())
            }
            (Some(name), None) => SystemParams::preset(name).ok_or_else(|| {
                format!(
                    "unknown preset `{name}` (expected one of {:?})",
                    SystemParams::PRESET_NAMES
                )
            }),
            (None, Some(t)) => t.build(),
        }
    }
}

impl ParamsTable {
    pub fn build(&self) -> Result<SystemParams, String> {
        let gamma_m = match (self.gamma_m_hz, self.q_m) {
            (Some(_), Some(_)) => {
                return Err("set either `gamma_m_hz` or `q_m`, not both".into());
            }
            (Some(g), None) => TAU * g,
            (None, Some(q)) => {
                if q <= 0.0 {
                    return Err("q_m must be positive".into());
                }
                TAU * self.omega_m_hz / q
            }
            (None, None) => return Err("set one of `gamma_m_hz` or `q_m`".into()),
        };
        Ok(SystemParams {
            omega1: TAU * self.omega1_hz,
            omega_m: TAU * self.omega_m_hz,
            kappa_ex: TAU * self.kappa_ex_hz,
            kappa_in: TAU * self.kappa_in_hz,
            gamma_m,
            omega_drive: TAU * self.omega_drive_hz,
            h_coupling: TAU * self.h_hz,
            n_elements: self.n_elements,
            phase_per_cell: self.phase_per_cell_rad,
            cell_transit: self.cell_transit_s,
            t_base: self.t_base_k,
            chi: self.chi_k,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_config_resolves() {
        let c = RunConfig::parse("preset = \"fig1\"").unwrap();
        let p = c.resolve_params().unwrap();
        assert_eq!(p.n_elements, 1);
    }

    #[test]
    fn explicit_params_resolve() {
        let text = r#"
            [params]
            omega1_hz = 2.0e14
            omega_m_hz = 1.0e10
            kappa_ex_hz = 2.4e9
            kappa_in_hz = 2.4e8
            q_m = 1.0e5
            omega_drive_hz = 2.4e8
            h_hz = 3.5e5
            n_elements = 4
            phase_per_cell_rad = 1.5707963267948966
            cell_transit_s = 2.0e-14
            t_base_k = 0.1
            chi_k = 2.0e-6
        "#;
        let c = RunConfig::parse(text).unwrap();
        let p = c.resolve_params().unwrap();
        assert!((p.kappa_ex - TAU * 2.4e9).abs() < 1.0);
        assert!((p.q_m().unwrap() - 1e5).abs() / 1e5 < 1e-12);
    }

    #[test]
    fn both_sources_rejected() {
        let text = "preset = \"fig1\"\n[params]\nomega1_hz = 1.0\nomega_m_hz = 1.0\nkappa_ex_hz = 1.0\nkappa_in_hz = 0.0\nq_m = 1.0\nomega_drive_hz = 0.0\nh_hz = 1.0\nn_elements = 1\nphase_per_cell_rad = 1.0\ncell_transit_s = 1.0\nt_base_k = 0.0\nchi_k = 0.0\n";
        let c = RunConfig::parse(text).unwrap();
        assert!(c.resolve_params().is_err());
    }

    #[test]
    fn gamma_and_q_are_exclusive() {
        let text = r#"
            [params]
            omega1_hz = 2.0e14
            omega_m_hz = 1.0e10
            kappa_ex_hz = 2.4e9
            kappa_in_hz = 2.4e8
            gamma_m_hz = 1.0e5
            q_m = 1.0e5
            omega_drive_hz = 2.4e8
            h_hz = 3.5e5
            n_elements = 4
            phase_per_cell_rad = 1.5707963267948966
            cell_transit_s = 2.0e-14
            t_base_k = 0.1
            chi_k = 2.0e-6
        "#;
        let c = RunConfig::parse(text).unwrap();
        assert!(c.resolve_params().unwrap_err().contains("not both"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("presett = \"fig1\"").is_err());
    }
}
