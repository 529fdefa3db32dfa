//! TOML run configuration: grids, tolerances, constants, and the catalog.
//!
//! Every section is optional; omitted fields fall back to the shipped
//! defaults, and an empty `[[catalog]]` list selects the default catalog.

use lsikit::catalog::default_catalog;
use lsikit::{FamilySpec, SuiteConfig};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub catalog: Vec<FamilySpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default = "d_gamma_nodes")]
    pub gamma_nodes: usize,
    #[serde(default = "d_m_nodes")]
    pub m_nodes: usize,
    #[serde(default = "d_cdf_nodes")]
    pub cdf_nodes: usize,
    #[serde(default = "d_leb_nodes")]
    pub lebesgue_nodes: usize,
    #[serde(default = "d_leb_span")]
    pub lebesgue_span: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Hard cap applied to every numerical error bound.
    #[serde(default)]
    pub error_bound_cap: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(default = "d_c_ce")]
    pub c_ce: f64,
    #[serde(default = "d_growth_epsilon")]
    pub growth_epsilon: f64,
    #[serde(default = "d_growth_cap")]
    pub growth_cap: f64,
    #[serde(default = "d_interpolation_p")]
    pub interpolation_p: f64,
    #[serde(default = "d_entropy_bound_t")]
    pub entropy_bound_t: Vec<f64>,
    #[serde(default = "d_atom_cap")]
    pub atom_cap: usize,
    #[serde(default = "d_seed")]
    pub seed: u64,
    #[serde(default = "d_product_combos")]
    pub product_combos: usize,
}

fn d_gamma_nodes() -> usize {
    SuiteConfig::default().gamma_nodes
}
fn d_m_nodes() -> usize {
    SuiteConfig::default().m_nodes
}
fn d_cdf_nodes() -> usize {
    SuiteConfig::default().cdf_nodes
}
fn d_leb_nodes() -> usize {
    SuiteConfig::default().leb_nodes
}
fn d_leb_span() -> f64 {
    SuiteConfig::default().leb_span
}
fn d_c_ce() -> f64 {
    SuiteConfig::default().c_ce
}
fn d_growth_epsilon() -> f64 {
    SuiteConfig::default().growth_epsilon
}
fn d_growth_cap() -> f64 {
    SuiteConfig::default().growth_cap
}
fn d_interpolation_p() -> f64 {
    SuiteConfig::default().interpolation_p
}
fn d_entropy_bound_t() -> Vec<f64> {
    SuiteConfig::default().entropy_bound_t
}
fn d_atom_cap() -> usize {
    SuiteConfig::default().atom_cap
}
fn d_seed() -> u64 {
    SuiteConfig::default().seed
}
fn d_product_combos() -> usize {
    SuiteConfig::default().product_combos
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            gamma_nodes: d_gamma_nodes(),
            m_nodes: d_m_nodes(),
            cdf_nodes: d_cdf_nodes(),
            lebesgue_nodes: d_leb_nodes(),
            lebesgue_span: d_leb_span(),
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c_ce: d_c_ce(),
            growth_epsilon: d_growth_epsilon(),
            growth_cap: d_growth_cap(),
            interpolation_p: d_interpolation_p(),
            entropy_bound_t: d_entropy_bound_t(),
            atom_cap: d_atom_cap(),
            seed: d_seed(),
            product_combos: d_product_combos(),
        }
    }
}

impl FileConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: FileConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(
            self.grids.gamma_nodes >= 8 && self.grids.m_nodes >= 8,
            "grid node counts must be at least 8"
        );
        anyhow::ensure!(
            self.grids.lebesgue_span > 0.0,
            "lebesgue_span must be positive"
        );
        anyhow::ensure!(
            self.constants.entropy_bound_t.iter().all(|&t| t > 1.0),
            "entropy_bound_t values must exceed 1"
        );
        if let Some(cap) = self.tolerances.error_bound_cap {
            anyhow::ensure!(cap > 0.0, "error_bound_cap must be positive");
        }
        anyhow::ensure!(
            self.constants.interpolation_p > 1.0,
            "interpolation_p must exceed 1"
        );
        Ok(())
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            gamma_nodes: self.grids.gamma_nodes,
            m_nodes: self.grids.m_nodes,
            cdf_nodes: self.grids.cdf_nodes,
            leb_nodes: self.grids.lebesgue_nodes,
            leb_span: self.grids.lebesgue_span,
            atom_cap: self.constants.atom_cap,
            c_ce: self.constants.c_ce,
            growth_epsilon: self.constants.growth_epsilon,
            growth_cap: self.constants.growth_cap,
            interpolation_p: self.constants.interpolation_p,
            entropy_bound_t: self.constants.entropy_bound_t.clone(),
            error_bound_cap: self.tolerances.error_bound_cap,
            seed: self.constants.seed,
            product_combos: self.constants.product_combos,
        }
    }

    pub fn catalog(&self) -> Vec<FamilySpec> {
        if self.catalog.is_empty() {
            default_catalog()
        } else {
            self.catalog.clone()
        }
    }
}
