//! Machine-readable report schemas. All reports carry `schema_version`.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub hermitian: bool,
    pub cp: bool,
    pub cb_norm: f64,
    /// Off-diagonal completion feasibility.
    pub decomposable: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub schema_version: u32,
    pub mode: String,
    pub reconstruction_residual: f64,
    pub reconstructs: bool,
    pub j_norm: f64,
    pub j_contractive: bool,
    pub module_residual: f64,
    pub j_module_map: bool,
    pub selfadjoint_residual: f64,
    pub j_selfadjoint: bool,
    pub j_psd: bool,
    pub cp_if_psd_consistent: bool,
    pub hermitian_iff_selfadjoint: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourCpReport {
    pub schema_version: u32,
    pub mode: String,
    pub reconstruction_residual: f64,
    pub all_parts_cp: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub worst_residual: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub all_passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainLevelReport {
    pub labels: Vec<String>,
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainReport {
    pub schema_version: u32,
    pub levels: Vec<ChainLevelReport>,
    pub radius_monotone: bool,
    pub local_solution: bool,
    pub passed: bool,
}
