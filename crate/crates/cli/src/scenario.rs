use std::path::{Path, PathBuf};

use crd_core::certificates::FunctionalConfig;
use crd_core::grid::{InitialCondition, SolverConfig};
use crd_core::network::{preset_2species, preset_3species, TwoSpeciesExponents};
use crd_core::Network;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum System {
    /// `A + nB <-> B + C` with rates `k1`, `k2`.
    ThreeSpecies { n: u32, k1: f64, k2: f64 },
    /// `m1 A + n1 B <-> m2 A + n2 B` with unit rates.
    TwoSpecies { m1: u32, n1: u32, m2: u32, n2: u32 },
}

impl System {
    pub fn network(&self) -> crd_core::Result<Network> {
        match *self {
            System::ThreeSpecies { n, k1, k2 } => preset_3species(n, k1, k2),
            System::TwoSpecies { m1, n1, m2, n2 } => {
                preset_2species(TwoSpeciesExponents::new(m1, n1, m2, n2)?, 1.0, 1.0)
            }
        }
    }

    pub fn n_species(&self) -> usize {
        match self {
            System::ThreeSpecies { .. } => 3,
            System::TwoSpecies { .. } => 2,
        }
    }

    /// Conservation vectors reported for this family.
    pub fn conserved_vectors(&self) -> Vec<Vec<f64>> {
        match *self {
            System::ThreeSpecies { .. } => vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]],
            System::TwoSpecies { m1, n1, m2, n2 } => vec![vec![(n2 - n1) as f64, (m1 - m2) as f64]],
        }
    }

    pub fn conserved_labels(&self) -> Vec<String> {
        match self {
            System::ThreeSpecies { .. } => vec!["M1".into(), "M2".into()],
            System::TwoSpecies { .. } => vec!["M".into()],
        }
    }
}

fn default_scan_size() -> usize {
    2000
}

fn default_lp() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    #[serde(default)]
    pub c_lsi: Option<f64>,
    #[serde(default)]
    pub c_p: Option<f64>,
    #[serde(default)]
    pub estimate_lsi: bool,
    /// Fixed decomposition radius; scanned over a log grid when absent.
    #[serde(default)]
    pub l: Option<f64>,
    #[serde(default = "default_scan_size")]
    pub scan_size: usize,
    /// Exponents for the two-species functional families.
    #[serde(default = "default_lp")]
    pub lp_exponents: Vec<f64>,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            c_lsi: None,
            c_p: None,
            estimate_lsi: false,
            l: None,
            scan_size: default_scan_size(),
            lp_exponents: default_lp(),
        }
    }
}

impl CertificateConfig {
    pub fn functional(&self) -> FunctionalConfig {
        FunctionalConfig { c_lsi: self.c_lsi, c_p: self.c_p, estimate_lsi: self.estimate_lsi }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub system: System,
    pub n_cells: usize,
    pub init: InitialCondition,
    pub solver: SolverConfig,
    #[serde(default)]
    pub certificate: CertificateConfig,
    /// Output directory, overridden by `--out`.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| CliError::Config(format!("{e}")))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, e: crd_core::Error| CliError::Config(format!("field `{field}`: {e}"));
        self.system.network().map_err(|e| bad("system", e))?;
        if self.n_cells < 2 {
            return Err(CliError::Config(format!("field `n_cells`: need at least 2 cells, got {}", self.n_cells)));
        }
        self.solver.validate(self.system.n_species()).map_err(|e| bad("solver", e))?;
        if self.certificate.scan_size == 0 {
            return Err(CliError::Config("field `certificate.scan_size`: must be positive".into()));
        }
        if self.certificate.lp_exponents.iter().any(|p| !(*p >= 1.0)) {
            return Err(CliError::Config("field `certificate.lp_exponents`: each p must be at least 1".into()));
        }
        Ok(())
    }
}
