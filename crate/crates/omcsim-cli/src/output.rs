//! Output-directory handling: data files plus a provenance sidecar.
//! Data files carry no timestamps, so a rerun of the same config is
//! byte-identical; the sidecar records tool version, subcommand and the
//! resolved parameters.

use std::f64::consts::TAU;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use omcsim::params::SystemParams;

pub struct OutputDir {
    dir: PathBuf,
    meta: Vec<(String, String)>,
}

impl OutputDir {
    pub fn create(dir: &Path, subcommand: &str, source: &str) -> Result<Self, String> {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            meta: vec![
                (
                    "tool".into(),
                    format!("omcsim {}", env!("CARGO_PKG_VERSION")),
                ),
                ("subcommand".into(), subcommand.into()),
                ("source".into(), source.into()),
            ],
        })
    }

    pub fn record(&mut self, key: &str, value: String) {
        self.meta.push((key.to_string(), value));
    }

    pub fn record_params(&mut self, p: &SystemParams) {
        let fields = [
            ("omega1_hz", p.omega1 / TAU),
            ("omega_m_hz", p.omega_m / TAU),
            ("kappa_ex_hz", p.kappa_ex / TAU),
            ("kappa_in_hz", p.kappa_in / TAU),
            ("gamma_m_hz", p.gamma_m / TAU),
            ("omega_drive_hz", p.omega_drive / TAU),
            ("h_hz", p.h_coupling / TAU),
            ("phase_per_cell_rad", p.phase_per_cell),
            ("cell_transit_s", p.cell_transit),
            ("t_base_k", p.t_base),
            ("chi_k", p.chi),
        ];
        for (k, v) in fields {
            self.record(k, format!("{v:e}"));
        }
        self.record("n_elements", p.n_elements.to_string());
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, String> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        Ok(path)
    }

    /// Write the `<name>.meta.toml` provenance sidecar.
    pub fn finish(&self, name: &str) -> Result<(), String> {
        let path = self.dir.join(format!("{name}.meta.toml"));
        let mut f =
            fs::File::create(&path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        for (k, v) in &self.meta {
            writeln!(f, "{k} = {:?}", v).map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}
