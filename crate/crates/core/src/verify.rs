//! The inequality registry: every checkable comparison in the toolkit as a
//! named record with left side, right side, margin, and a status decided
//! against a numerical error bound.
//!
//! Error bounds come from grid refinement: the whole registry is evaluated at
//! the configured resolution and again with every grid doubled, and the bound
//! is four times the margin shift (a fixed tolerance replaces this for the
//! equality-style records). Bounds with symbolic constants are never asserted;
//! they run as `reported_only` with their empirical constants collected in the
//! summary.

use crate::catalog;
use crate::cramer;
use crate::densities::{self, make_family, FamilySpec, RelativeDensity};
use crate::error::{Error, Result};
use crate::fourier;
use crate::functionals::{self, rescale_to_dm};
use crate::grid::{build_grid, GaussianGrid, Reference};
use crate::metrics::{self, DiscreteMeasure};
use crate::transport::{self, CdfGrid};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Outcome of one inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    HoldsWithinError,
    Violated,
    ReportedOnly,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::HoldsWithinError => "holds_within_error",
            Status::Violated => "violated",
            Status::ReportedOnly => "reported_only",
        }
    }
}

/// One verified inequality.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityRecord {
    pub name: String,
    /// Display form of the inequality the record checks.
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub numerical_error_bound: f64,
    pub status: Status,
}

/// Suite-wide configuration.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub gamma_nodes: usize,
    pub m_nodes: usize,
    pub cdf_nodes: usize,
    pub leb_nodes: usize,
    pub leb_span: f64,
    pub atom_cap: usize,
    /// Universal constant of the Talagrand stability bound (reported only).
    pub c_ce: f64,
    /// ε of the growth class ∫|f|²e^{-(2π-ε)x²}dx ≤ M.
    pub growth_epsilon: f64,
    /// Cap M for the growth class report.
    pub growth_cap: f64,
    /// p of the higher-integrability interpolation record.
    pub interpolation_p: f64,
    /// t values of the entropy/second-moment bound.
    pub entropy_bound_t: Vec<f64>,
    /// Hard cap on every numerical error bound (tightening knob).
    pub error_bound_cap: Option<f64>,
    pub seed: u64,
    /// Number of random product combinations for the additivity records.
    pub product_combos: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            gamma_nodes: 160,
            m_nodes: 160,
            cdf_nodes: 1 << 16,
            leb_nodes: 4097,
            leb_span: 12.0,
            atom_cap: 64,
            c_ce: 1.0,
            growth_epsilon: 0.5,
            growth_cap: 10.0,
            interpolation_p: 2.0,
            entropy_bound_t: vec![1.1, 2.0, 10.0],
            error_bound_cap: None,
            seed: 0x5eed,
            product_combos: 10,
        }
    }
}

/// Grids for one resolution level.
struct Resolution {
    gamma: GaussianGrid,
    m: Arc<GaussianGrid>,
    cdf_cfg: CdfGrid,
    leb_nodes: usize,
    leb_span: f64,
}

impl Resolution {
    /// CDF grid whose span also covers the given densities' tails.
    fn cdf_cfg_for(&self, fs: &[&RelativeDensity], grid: &GaussianGrid) -> CdfGrid {
        let wide = CdfGrid::for_densities(fs, grid);
        CdfGrid {
            span: wide.span.max(self.cdf_cfg.span),
            nodes: self.cdf_cfg.nodes,
        }
    }

    fn build(cfg: &SuiteConfig, scale: usize) -> Result<Self> {
        let gamma = build_grid(Reference::Gamma, cfg.gamma_nodes * scale, 0.0)?;
        let m = Arc::new(build_grid(Reference::M, cfg.m_nodes * scale, 0.0)?);
        Ok(Self {
            gamma,
            m,
            cdf_cfg: CdfGrid {
                span: 20.0,
                nodes: cfg.cdf_nodes * scale,
            },
            leb_nodes: (cfg.leb_nodes - 1) * scale + 1,
            leb_span: cfg.leb_span,
        })
    }
}

#[derive(Clone, Copy, Debug)]
enum DraftKind {
    /// margin = rhs - lhs with a refinement-based error bound.
    Assert,
    /// Like Assert, with a floor on the error bound.
    AssertTol(f64),
    /// |lhs - rhs| must stay below the fixed tolerance.
    Equality(f64),
    /// Symbolic-constant bound: recorded, never asserted.
    Reported,
}

struct Draft {
    name: String,
    anchor: String,
    lhs: f64,
    rhs: f64,
    kind: DraftKind,
}

impl Draft {
    fn margin(&self) -> f64 {
        match self.kind {
            DraftKind::Equality(_) => -(self.lhs - self.rhs).abs(),
            _ => self.rhs - self.lhs,
        }
    }
}

/// Inclusion plan computed once so both resolutions emit identical registries.
struct DensityPlan {
    lp_interpolation: bool,
    lp_upper: bool,
    floor_alpha: Option<f64>,
}

fn density_plan(spec: &FamilySpec, cfg: &SuiteConfig, base: &Resolution) -> DensityPlan {
    let p = cfg.interpolation_p;
    let lp_interpolation = spec.lp_power_finite(2.0 * p - 1.0) == Some(true);
    let lp_upper = spec.lp_power_finite(p) == Some(true);
    // only families with an x-independent positive floor enter the affine-fit
    // records; the floor must not depend on the node range
    let floor_alpha = match spec {
        FamilySpec::Floor { alpha, .. } => Some(*alpha),
        FamilySpec::Tilt { b } if *b == 0.0 => Some(0.999),
        FamilySpec::Scale { sigma } if *sigma >= 1.0 => Some(0.999 / sigma),
        FamilySpec::Bump { eps, .. } => {
            // the bump profile is bounded by 1, so the normalized density
            // is bounded below by (1 - max(0, -eps))/(1 + |eps|)
            let min_raw = 1.0 + eps.min(0.0);
            Some(0.999 * min_raw / (1.0 + eps.abs()))
        }
        FamilySpec::Mixture { sigma1, sigma2, .. } if sigma1.min(*sigma2) >= 1.0 => {
            make_family(spec, &base.gamma)
                .map(|f| 0.999 * f.evaluate(0.0))
                .ok()
        }
        _ => None,
    };
    DensityPlan {
        lp_interpolation,
        lp_upper,
        floor_alpha,
    }
}

/// Everything the per-density records read.
struct DensityStats {
    label: String,
    centered: bool,
    entropy: f64,
    fisher: f64,
    delta: f64,
    m2: f64,
    l1: f64,
    hell: f64,
    w1: f64,
    w2: f64,
    talagrand: f64,
    residual: f64,
    defect: f64,
    delta_c: f64,
    wiener_e: f64,
    wiener_norm_gap: f64,
    wiener_tail: f64,
    gm: fourier::GradientMomentSides,
    growth: f64,
    lp_p: Option<f64>,
    lp_norm_p: Option<f64>,
    n_int: Option<f64>,
    affine: Option<transport::AffineFit>,
    affine_alpha: Option<f64>,
}

fn density_stats(
    f: &RelativeDensity,
    plan: &DensityPlan,
    cfg: &SuiteConfig,
    res: &Resolution,
) -> Result<DensityStats> {
    let g = &res.gamma;
    let entropy = functionals::entropy(f, g)?;
    let fisher = functionals::fisher_information(f, g)?;
    let delta = fisher / 2.0 - entropy;
    let m2 = densities::moment(f, g, 2)?;
    let l1 = functionals::lp_distance_to_one(f, g, 1.0)?;
    let one = make_family(&FamilySpec::Tilt { b: 0.0 }, g)?;
    let hell = metrics::hellinger(f, &one, g)?;
    let cdf_cfg = res.cdf_cfg_for(&[f], g);
    let mu = transport::cdf_of(f, &cdf_cfg)?;
    let nu = transport::cdf_of(&one, &cdf_cfg)?;
    let w1 = transport::wasserstein(&mu, &nu, 1.0)?;
    let w2 = transport::wasserstein(&mu, &nu, 2.0)?;
    let talagrand = 2.0 * entropy - w2 * w2;
    let residual = transport::transport_residual(f, g, &cdf_cfg)?;
    let defect = transport::eigen_defect(f, g, &cdf_cfg)?;
    let u = rescale_to_dm(f, &res.m)?;
    let delta_c = functionals::carlen_deficit(&u)?;
    let wf = fourier::wiener_transform(&u)?;
    let wiener_norm_gap = (wf.norm_m_squared() - 1.0).abs();
    let wiener_tail = wf.tail_bound();
    let wiener_e = fourier::wiener_entropy(&u)?;
    let gm = fourier::gradient_moment_sides(&u)?;
    let growth = fourier::growth_functional(&u, cfg.growth_epsilon)?;
    let p = cfg.interpolation_p;
    let (lp_p, lp_norm_p) = if plan.lp_interpolation || plan.lp_upper {
        let norm = functionals::lp_distance_to_one(f, g, p)?;
        (Some(norm.powf(p)), Some(norm))
    } else {
        (None, None)
    };
    let n_int = if plan.lp_interpolation {
        Some(functionals::lp_power_integral(f, g, 2.0 * p - 1.0)?)
    } else {
        None
    };
    let affine = match plan.floor_alpha {
        Some(alpha) => Some(transport::affine_fit(f, alpha, g, &cdf_cfg)?),
        None => None,
    };
    Ok(DensityStats {
        label: f.label().to_string(),
        centered: f.is_centered(),
        entropy,
        fisher,
        delta,
        m2,
        l1,
        hell,
        w1,
        w2,
        talagrand,
        residual,
        defect,
        delta_c,
        wiener_e,
        wiener_norm_gap,
        wiener_tail,
        gm,
        growth,
        lp_p,
        lp_norm_p,
        n_int,
        affine,
        affine_alpha: plan.floor_alpha,
    })
}

fn density_drafts(s: &DensityStats, cfg: &SuiteConfig) -> Vec<Draft> {
    let mut out = Vec::new();
    let mut push = |name: String, anchor: &str, lhs: f64, rhs: f64, kind: DraftKind| {
        out.push(Draft {
            name,
            anchor: anchor.to_string(),
            lhs,
            rhs,
            kind,
        });
    };
    let at = |n: &str| format!("{n} @ {}", s.label);
    push(
        at("eq_lsi"),
        "0 <= delta = I/2 - H",
        0.0,
        s.delta,
        DraftKind::Assert,
    );
    push(
        at("talagrand"),
        "W2^2 <= 2H",
        s.w2 * s.w2,
        2.0 * s.entropy,
        DraftKind::Assert,
    );
    push(
        at("hwi"),
        "H <= W2*sqrt(I) - W2^2/2",
        s.entropy,
        s.w2 * s.fisher.max(0.0).sqrt() - s.w2 * s.w2 / 2.0,
        DraftKind::Assert,
    );
    push(
        at("pinsker"),
        "||f-1||_1^2 <= 2H",
        s.l1 * s.l1,
        2.0 * s.entropy,
        DraftKind::Assert,
    );
    push(
        at("pinsker_printed_variant"),
        "2||f-1||_1^2 <= H (printed constant, reported)",
        2.0 * s.l1 * s.l1,
        s.entropy,
        DraftKind::Reported,
    );
    push(
        at("l1_l2_lower"),
        "||sqrt(f)-1||_2^2 <= ||f-1||_1",
        s.hell * s.hell,
        s.l1,
        DraftKind::Assert,
    );
    push(
        at("l1_l2_upper"),
        "||f-1||_1 <= 2||sqrt(f)-1||_2",
        s.l1,
        2.0 * s.hell,
        DraftKind::Assert,
    );
    push(
        at("l1_transport_chain"),
        "||f-1||_1 - sqrt(2 delta) <= W1",
        s.l1 - (2.0 * s.delta.max(0.0)).sqrt(),
        s.w1,
        DraftKind::Assert,
    );
    push(
        at("transport_residual"),
        "int |T - x + (log f)'|^2 f dgamma <= 2 delta",
        s.residual,
        2.0 * s.delta,
        DraftKind::Assert,
    );
    push(
        at("eigen_defect"),
        "int (lambda - log(1+lambda)) f dgamma <= delta",
        s.defect,
        s.delta,
        DraftKind::Assert,
    );
    if s.entropy > 1e-8 {
        push(
            at("talagrand_squared"),
            "delta >= delta_Tal^2 / (16 H)",
            s.talagrand * s.talagrand / (16.0 * s.entropy),
            s.delta,
            DraftKind::Assert,
        );
    }
    for &t in &cfg.entropy_bound_t {
        push(
            format!("entropy_moment_bound(t={t}) @ {}", s.label),
            "(1 - 1/t) H <= (t-1)(n+M) + delta",
            (1.0 - 1.0 / t) * s.entropy,
            (t - 1.0) * (1.0 + s.m2) + s.delta,
            DraftKind::Assert,
        );
    }
    push(
        at("w2_moment_bound"),
        "W2^2 <= 2(n+M)",
        s.w2 * s.w2,
        2.0 * (1.0 + s.m2),
        DraftKind::Assert,
    );
    if let (Some(lp_p), Some(n_int)) = (s.lp_p, s.n_int) {
        let p = cfg.interpolation_p;
        push(
            at("lp_interpolation"),
            "int|f-1|^p <= (2^(2p-2)(N+1))^(1/2) ||f-1||_1^(1/2)",
            lp_p,
            (2f64.powf(2.0 * p - 2.0) * (n_int + 1.0)).sqrt() * s.l1.sqrt(),
            DraftKind::Assert,
        );
    }
    if let Some(lp_norm) = s.lp_norm_p {
        let p = cfg.interpolation_p;
        push(
            at("entropy_lp_upper"),
            "H <= 2/(p-1) ||f-1||_p^p + 2||f-1||_p (reported)",
            s.entropy,
            2.0 / (p - 1.0) * lp_norm.powf(p) + 2.0 * lp_norm,
            DraftKind::Reported,
        );
    }
    push(
        at("rescale_identity"),
        "delta_c(u_f) = delta(f)",
        s.delta_c,
        s.delta,
        DraftKind::Equality(1e-4),
    );
    push(
        at("carlen"),
        "int |Wf|^2 log|Wf|^2 dm <= delta_c",
        s.wiener_e,
        s.delta_c,
        DraftKind::Assert,
    );
    push(
        at("wiener_entropy_positivity"),
        "0 <= int |Wf|^2 log|Wf|^2 dm",
        0.0,
        s.wiener_e,
        DraftKind::Assert,
    );
    push(
        at("wiener_unitarity"),
        "|| Wf ||_{L2(dm)} = 1",
        1.0 + s.wiener_norm_gap,
        1.0,
        DraftKind::Equality(1e-6 + s.wiener_tail),
    );
    push(
        at("gradient_moment_bound"),
        "2pi m2(dm) - 2pi int x^2 f^2 dm + (1/2pi) int |f'|^2 dm <= 2 sqrt(pi) delta_c^(1/2) + delta_c",
        s.gm.lhs,
        s.gm.rhs,
        DraftKind::Assert,
    );
    if s.centered {
        push(
            at("scaling_argument"),
            "(2H + (m2(gamma) - m2(nu)))^2 <= 2 delta (verbatim, reported)",
            (2.0 * s.entropy + (1.0 - s.m2)).powi(2),
            2.0 * s.delta,
            DraftKind::Reported,
        );
    }
    if s.centered {
        push(
            at("l1_stability_full"),
            "||f-1||_1 <= C_M delta^(1/4), C_M symbolic (centered)",
            s.l1,
            s.delta.max(0.0).powf(0.25),
            DraftKind::Reported,
        );
        push(
            at("w1_stability_full"),
            "C min{W1, W1^4} <= delta, C symbolic (centered)",
            s.w1.min(s.w1.powi(4)),
            s.delta,
            DraftKind::Reported,
        );
        push(
            at("talagrand_stability"),
            "C_CE min{W1^2, W1} <= delta_Tal (centered)",
            cfg.c_ce * (s.w1 * s.w1).min(s.w1),
            s.talagrand,
            DraftKind::Reported,
        );
    }
    if let (Some(fit), Some(alpha)) = (&s.affine.as_ref().filter(|_| s.centered), s.affine_alpha) {
        push(
            at("affine_fit_residual"),
            "||log f - L||_1 <= C(alpha, n) delta^(1/2), C symbolic",
            fit.residual,
            s.delta.max(0.0).sqrt(),
            DraftKind::Reported,
        );
        // b_f = int log f dgamma lies in (log alpha, 0]
        let range_excess = (fit.b_f - 1e-8).max(alpha.ln() - fit.b_f).max(0.0);
        push(
            at("affine_fit_intercept_range"),
            "log alpha < b_f <= 0",
            range_excess,
            0.0,
            DraftKind::Equality(1e-6),
        );
    }
    push(
        at("growth_class"),
        "int |f|^2 e^{-(2pi-eps)x^2} dx <= M (membership report)",
        s.growth,
        cfg.growth_cap,
        DraftKind::Reported,
    );
    out
}

/// Metric values for one pair at one resolution.
struct PairStats {
    name: String,
    tv: f64,
    hell: f64,
    dk: f64,
    dl: f64,
    w1: f64,
    m2max: f64,
    dp_disc: f64,
    dp_err: f64,
    // the same chain evaluated exactly on the discretized pair
    x_tv: f64,
    x_dk: f64,
    x_dl: f64,
    x_dp: f64,
    x_w1: f64,
    versus_gaussian: bool,
}

fn pair_stats(
    f: &RelativeDensity,
    g: &RelativeDensity,
    versus_gaussian: bool,
    cfg: &SuiteConfig,
    res: &Resolution,
) -> Result<PairStats> {
    let grid = &res.gamma;
    let cdf_cfg = res.cdf_cfg_for(&[f, g], grid);
    let mu = transport::cdf_of(f, &cdf_cfg)?;
    let nu = transport::cdf_of(g, &cdf_cfg)?;
    let (dmu, e1) = DiscreteMeasure::from_quantiles(&mu, cfg.atom_cap, cfg.atom_cap)?;
    let (dnu, e2) = DiscreteMeasure::from_quantiles(&nu, cfg.atom_cap, cfg.atom_cap)?;
    let dmu_cdf = dmu.cdf("mu-disc")?;
    let dnu_cdf = dnu.cdf("nu-disc")?;
    Ok(PairStats {
        name: format!("{} | {}", f.label(), g.label()),
        tv: metrics::total_variation(f, g, grid)?,
        hell: metrics::hellinger(f, g, grid)?,
        dk: metrics::kolmogorov(&mu, &nu),
        dl: metrics::levy(&mu, &nu),
        w1: transport::wasserstein(&mu, &nu, 1.0)?,
        m2max: densities::moment(f, grid, 2)?.max(densities::moment(g, grid, 2)?),
        dp_disc: metrics::prokhorov(&dmu, &dnu),
        dp_err: e1 + e2,
        x_tv: metrics::tv_discrete(&dmu, &dnu),
        x_dk: metrics::kolmogorov(&dmu_cdf, &dnu_cdf),
        x_dl: metrics::levy(&dmu_cdf, &dnu_cdf),
        x_dp: metrics::prokhorov(&dmu, &dnu),
        x_w1: transport::wasserstein(&dmu_cdf, &dnu_cdf, 1.0)?,
        versus_gaussian,
    })
}

fn pair_drafts(s: &PairStats) -> Vec<Draft> {
    let mut out = Vec::new();
    let mut push = |name: String, anchor: &str, lhs: f64, rhs: f64, kind: DraftKind| {
        out.push(Draft {
            name,
            anchor: anchor.to_string(),
            lhs,
            rhs,
            kind,
        });
    };
    let at = |n: &str| format!("{n} @ {}", s.name);
    push(
        at("pm_levy_le_kolmogorov"),
        "d_L <= d_K",
        s.dl,
        s.dk,
        DraftKind::AssertTol(2e-6),
    );
    push(
        at("pm_levy_le_prokhorov"),
        "d_L <= d_P (binned with error budget)",
        s.dl,
        s.dp_disc + s.dp_err,
        DraftKind::AssertTol(2e-6),
    );
    push(
        at("pm_max_le_tv"),
        "max{d_K, d_P} <= d_TV",
        s.dk.max(s.dp_disc - s.dp_err),
        s.tv,
        DraftKind::AssertTol(2e-6),
    );
    push(
        at("pm_max_le_sqrt_w1"),
        "max{d_K, d_P} <= sqrt(W1)",
        s.dk.max(s.dp_disc - s.dp_err),
        s.w1.sqrt(),
        DraftKind::AssertTol(2e-6),
    );
    push(
        at("pm_w1_vs_kolmogorov"),
        "W1 <= 4 sqrt(M) d_K^(1/2)",
        s.w1,
        4.0 * s.m2max.sqrt() * s.dk.sqrt(),
        DraftKind::Assert,
    );
    if s.versus_gaussian {
        push(
            at("pm_kolmogorov_le_2prokhorov"),
            "d_K(mu, gamma) <= 2 d_P(mu, gamma)",
            s.dk,
            2.0 * (s.dp_disc + s.dp_err),
            DraftKind::Assert,
        );
    }
    // the same propositions are exact statements about the binned pair
    push(
        at("pmx_levy_le_kolmogorov"),
        "d_L <= d_K on the binned pair",
        s.x_dl,
        s.x_dk,
        DraftKind::AssertTol(5e-6),
    );
    push(
        at("pmx_levy_le_prokhorov"),
        "d_L <= d_P on the binned pair",
        s.x_dl,
        s.x_dp,
        DraftKind::AssertTol(5e-6),
    );
    push(
        at("pmx_max_le_tv"),
        "max{d_K, d_P} <= d_TV on the binned pair",
        s.x_dk.max(s.x_dp),
        s.x_tv,
        DraftKind::AssertTol(5e-6),
    );
    push(
        at("pmx_max_le_sqrt_w1"),
        "max{d_K, d_P} <= sqrt(W1) on the binned pair",
        s.x_dk.max(s.x_dp),
        s.x_w1.sqrt(),
        DraftKind::AssertTol(5e-6),
    );
    push(
        at("hellinger_tv_lower"),
        "d_H^2 <= 2 d_TV",
        s.hell * s.hell,
        2.0 * s.tv,
        DraftKind::Assert,
    );
    push(
        at("hellinger_tv_upper"),
        "d_TV <= sqrt(2) d_H",
        s.tv,
        std::f64::consts::SQRT_2 * s.hell,
        DraftKind::Assert,
    );
    push(
        at("hellinger_tv_appendix_lower"),
        "d_H^2 <= d_TV (convention-dependent, reported)",
        s.hell * s.hell,
        s.tv,
        DraftKind::Reported,
    );
    push(
        at("hellinger_tv_appendix_upper"),
        "d_TV <= 2 d_H (convention-dependent, reported)",
        s.tv,
        2.0 * s.hell,
        DraftKind::Reported,
    );
    out
}

fn product_drafts(
    specs: &[FamilySpec],
    cfg: &SuiteConfig,
    res: &Resolution,
) -> Result<Vec<Draft>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    let pool: Vec<&FamilySpec> = specs.iter().collect();
    for combo in 0..cfg.product_combos {
        let n_factors = 2 + combo % 3;
        let chosen: Vec<&&FamilySpec> = pool
            .choose_multiple(&mut rng, n_factors.min(pool.len()))
            .collect();
        let factors: Result<Vec<RelativeDensity>> = chosen
            .iter()
            .map(|s| make_family(s, &res.gamma))
            .collect();
        let product = densities::tensor(factors?)?;
        let (total, parts) = functionals::product_deficit(&product, &res.gamma)?;
        let sum: f64 = parts.iter().sum();
        out.push(Draft {
            name: format!("product_additivity @ combo {combo} ({n_factors} factors)"),
            anchor: "delta(prod f_i) = sum delta(f_i)".to_string(),
            lhs: total,
            rhs: sum,
            kind: DraftKind::Equality(1e-12),
        });
    }
    Ok(out)
}

fn cramer_drafts(res: &Resolution) -> Result<Vec<Draft>> {
    let mut out = Vec::new();
    let mut push = |name: String, anchor: &str, lhs: f64, rhs: f64, kind: DraftKind| {
        out.push(Draft {
            name,
            anchor: anchor.to_string(),
            lhs,
            rhs,
            kind,
        });
    };
    let (span, nodes) = (res.leb_span, res.leb_nodes);
    let g = &res.gamma;

    // gaussian convolution closure
    let std_gauss = cramer::gaussian_density(span, nodes, 0.0, 1.0)?;
    let conv = cramer::convolve(&std_gauss, &std_gauss)?;
    let sup = conv.sup_diff(|x| {
        (-(x * x) / 4.0).exp() / (std::f64::consts::SQRT_2 * (2.0 * std::f64::consts::PI).sqrt())
    });
    push(
        "convolution_closure @ gamma*gamma".into(),
        "gamma_{0,1} * gamma_{0,1} = gamma_{0,sqrt 2}",
        sup,
        0.0,
        DraftKind::Equality(1e-6),
    );

    // windowed-density identities on doubly normalized members and the constant
    let one = make_family(&FamilySpec::Tilt { b: 0.0 }, g)?;
    let members: Vec<(String, RelativeDensity, f64)> = vec![
        ("one".into(), one, 1.0),
        (
            "tau=0.3".into(),
            cramer::doubly_normalized_family(0.3, g)?,
            1.0,
        ),
        (
            "tau=0.1".into(),
            cramer::doubly_normalized_family(0.1, g)?,
            1.0,
        ),
    ];
    for (tag, f, k) in &members {
        let rec = cramer::h_normalization_check(f, *k, g, span, nodes)?;
        for (i, ident) in ["mass_sq", "mass", "second_moment"].iter().enumerate() {
            push(
                format!("h_normalization_{ident} @ {tag}"),
                "int h^2 = 1, int h = 2^(1/4), int x^2 h = 2^(-3/4) k/pi",
                rec.values[i],
                rec.expected[i],
                DraftKind::Equality(1e-6),
            );
        }
    }
    // the second-moment identity alone needs only mu-normalization
    let scale2 = make_family(&FamilySpec::Scale { sigma: 2.0 }, g)?;
    let rec = cramer::h_normalization_check(&scale2, 4.0, g, span, nodes)?;
    push(
        "h_normalization_second_moment @ scale(2)".into(),
        "int x^2 h dx = 2^(-3/4) k/pi with k = m2",
        rec.values[2],
        rec.expected[2],
        DraftKind::Equality(1e-6),
    );

    // interpolation lemma on the gaussian and on u = h*h - g*g
    let l = cramer::l1l2_bound(&std_gauss)?;
    push(
        "l1_l2_lemma @ gamma_{0,1}".into(),
        "||u||_1 <= e^{(k+1)/2} ||u||_2",
        l.l1,
        l.bound,
        DraftKind::Assert,
    );
    let f03 = &members[1].1;
    let h = cramer::h_density(f03, span, nodes)?;
    let gw = cramer::g_window(span, nodes)?;
    let hh = cramer::convolve(&h, &h)?;
    let gg = cramer::convolve(&gw, &gw)?;
    let u = cramer::LebesgueDensity::new(
        hh.grid().clone(),
        hh.values()
            .iter()
            .zip(gg.values())
            .map(|(a, b)| a - b)
            .collect(),
    )?;
    let lu = cramer::l1l2_bound(&u)?;
    push(
        "l1_l2_lemma @ h*h - g*g".into(),
        "||u||_1 <= e^{(k+1)/2} ||u||_2",
        lu.l1,
        lu.bound,
        DraftKind::Assert,
    );

    // log-convexity of p -> log ||u||_p^p at {1, 3/2, 2}
    for (tag, dens) in [("gamma_{0,1}", &std_gauss), ("h*h - g*g", &u)] {
        let margin = cramer::log_norm_convexity_margin(dens);
        push(
            format!("log_norm_convexity @ {tag}"),
            "J(3/2) <= (J(1) + J(2))/2",
            0.0,
            margin,
            DraftKind::Assert,
        );
    }

    // entropy lower bound for the summand density
    let p03 = cramer::p_density(f03, span, nodes)?;
    let eb = cramer::entropy_lower_bound(&p03)?;
    push(
        "entropy_lower_bound @ p(tau=0.3)".into(),
        "int p log p >= -(k+1)",
        eb.lower,
        eb.entropy,
        DraftKind::Assert,
    );

    // convolution-deficit bound (symbolic constant)
    let feo = cramer::feo_quantities(f03, g, span, nodes)?;
    push(
        "convolution_deficit_bound @ tau=0.3".into(),
        "int |h*h-g*g|^2 <= C delta_c^(1/4) (...)^(3/2), C symbolic",
        feo.lhs,
        feo.rhs_factor * feo.deficit_quarter,
        DraftKind::Reported,
    );

    // Kolmogorov stability pipeline along the targeted deficit sweep
    for target in [1e-2, 1e-4, 1e-6] {
        let f = cramer::doubly_normalized_at_deficit(target, g)?;
        let rec = cramer::kolmogorov_stability_sides(
            &f,
            (target * 1.5).min(0.99),
            1.0,
            g,
            span,
            nodes,
            &res.cdf_cfg,
        )?;
        push(
            format!("dk_convolution_stage @ delta~{target:.0e}"),
            "d_K(F*F, Phi_1) <= C_k delta^(1/8), C_k symbolic",
            rec.dk_conv,
            rec.delta_v.powf(0.125),
            DraftKind::Reported,
        );
        push(
            format!("dk_stability_final @ delta~{target:.0e}"),
            "d_K(mu, gamma_eps) <= C_k / sqrt(log(1/eps)), C_k symbolic",
            rec.dk_mu_gamma_eps,
            rec.bound,
            DraftKind::Reported,
        );
        push(
            format!("truncated_variance_centering @ delta~{target:.0e}"),
            "sigma(eta)^2 with and without the mean subtraction agree",
            rec.sigma_eta_sq,
            rec.sigma_eta_sq_centered,
            DraftKind::Equality(1e-10),
        );
        let psi = cramer::psi_bound(&f, g, &res.cdf_cfg)?;
        push(
            format!("psi_lower_bound @ delta~{target:.0e}"),
            "c1 Psi(c2 d_K(mu, gamma)) <= delta(v), constants symbolic",
            psi.psi_value,
            psi.delta_v,
            DraftKind::Reported,
        );
        // Psi underflows f64 whenever d_K < 0.038, so the finite diagnostic
        // is the inverse form: Psi is the inverse of t -> 1/sqrt(log(1/t))
        if psi.delta_v > 0.0 && psi.delta_v < 1.0 {
            push(
                format!("psi_inverse_form @ delta~{target:.0e}"),
                "d_K(mu, gamma) sqrt(log(1/delta(v))) bounded, constant symbolic",
                psi.dk_mu_gamma * (1.0 / psi.delta_v).ln().sqrt(),
                1.0,
                DraftKind::Reported,
            );
        }
    }

    // pointwise comparison of Psi with the power envelope on (0, 0.3]
    let mut worst: f64 = f64::MIN;
    for i in 1..=64 {
        let t = 0.05 + (0.3 - 0.05) * i as f64 / 64.0;
        worst = worst.max(cramer::psi(t) - (t * t).min(t.powi(8)));
    }
    push(
        "psi_power_envelope".into(),
        "Psi(t) <= min{t^2, t^8} for small t",
        worst,
        0.0,
        DraftKind::Assert,
    );
    Ok(out)
}

fn drafts_for_resolution(
    specs: &[FamilySpec],
    plans: &[DensityPlan],
    cfg: &SuiteConfig,
    scale: usize,
) -> Result<Vec<Draft>> {
    let res = Resolution::build(cfg, scale)?;
    let mut out = Vec::new();
    for (spec, plan) in specs.iter().zip(plans) {
        let f = make_family(spec, &res.gamma)?;
        // per-density failures become records, not suite aborts
        match density_stats(&f, plan, cfg, &res) {
            Ok(stats) => out.extend(density_drafts(&stats, cfg)),
            Err(e) => out.push(Draft {
                name: format!("error @ {}", f.label()),
                anchor: format!("record computation failed: {e}"),
                lhs: f64::NAN,
                rhs: f64::NAN,
                kind: DraftKind::Reported,
            }),
        }
        if validate_density(&f, &res.gamma).is_err() {
            out.push(Draft {
                name: format!("invariant_violation @ {}", f.label()),
                anchor: "density-level invariant failed".to_string(),
                lhs: f64::NAN,
                rhs: f64::NAN,
                kind: DraftKind::Reported,
            });
        }
    }
    // metric pairs: the first dozen members against the gaussian, plus crosses
    let gauss = make_family(&FamilySpec::Tilt { b: 0.0 }, &res.gamma)?;
    let n = specs.len();
    let mut pair_indices: Vec<(usize, Option<usize>)> = Vec::new();
    for i in 0..12.min(n) {
        pair_indices.push((i, None));
    }
    for &(i, j) in &[(1, 2), (3, 4), (5, 6), (7, 8), (9, 10), (2, 5), (4, 9), (6, 11), (10, 13)] {
        if i < n && j < n {
            pair_indices.push((i, Some(j)));
        }
    }
    for (i, j) in pair_indices {
        let f = make_family(&specs[i], &res.gamma)?;
        let (g, versus_gaussian) = match j {
            Some(j) => (make_family(&specs[j], &res.gamma)?, false),
            None => (gauss.clone(), true),
        };
        let stats = pair_stats(&f, &g, versus_gaussian, cfg, &res)?;
        out.extend(pair_drafts(&stats));
    }
    out.extend(product_drafts(specs, cfg, &res)?);
    out.extend(cramer_drafts(&res)?);
    Ok(out)
}

fn validate_density(f: &RelativeDensity, grid: &GaussianGrid) -> Result<()> {
    let mass = grid.integrate_fn(|x| f.evaluate(x));
    if (mass - 1.0).abs() > 1e-8 {
        return Err(Error::Normalization(format!("catalog mass {mass}")));
    }
    Ok(())
}

/// Suite summary with the empirical constants of the symbolic bounds.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub total: usize,
    pub holds: usize,
    pub holds_within_error: usize,
    pub violated: usize,
    pub reported_only: usize,
    /// Reported-only records whose verbatim form came out negative.
    pub flagged_reported: Vec<String>,
    pub empirical_constants: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutput {
    pub records: Vec<InequalityRecord>,
    pub summary: Summary,
}

fn classify(margin: f64, err: f64, reported: bool) -> Status {
    if reported {
        Status::ReportedOnly
    } else if margin > err {
        Status::Holds
    } else if margin >= -err {
        Status::HoldsWithinError
    } else {
        Status::Violated
    }
}

/// Run the registry over a catalog.
pub fn run_suite(specs: &[FamilySpec], cfg: &SuiteConfig) -> Result<SuiteOutput> {
    let base = Resolution::build(cfg, 1)?;
    let plans: Vec<DensityPlan> = specs
        .iter()
        .map(|s| density_plan(s, cfg, &base))
        .collect();
    let lo = drafts_for_resolution(specs, &plans, cfg, 1)?;
    let hi = drafts_for_resolution(specs, &plans, cfg, 2)?;
    let hi_by_name: BTreeMap<&str, &Draft> =
        hi.iter().map(|d| (d.name.as_str(), d)).collect();
    let mut records = Vec::with_capacity(lo.len());
    for draft_lo in &lo {
        let (value, refine_delta) = match hi_by_name.get(draft_lo.name.as_str()) {
            Some(draft_hi) => (
                *draft_hi,
                (draft_hi.margin() - draft_lo.margin()).abs(),
            ),
            None => (draft_lo, draft_lo.margin().abs().max(1e-6)),
        };
        let reported = matches!(value.kind, DraftKind::Reported);
        let mut err = match value.kind {
            DraftKind::Assert | DraftKind::Reported => (4.0 * refine_delta).max(1e-11),
            DraftKind::AssertTol(t) => (4.0 * refine_delta).max(t),
            DraftKind::Equality(t) => t,
        };
        if let Some(cap) = cfg.error_bound_cap {
            err = err.min(cap);
        }
        let margin = value.margin();
        records.push(InequalityRecord {
            name: value.name.clone(),
            anchor: value.anchor.clone(),
            lhs: value.lhs,
            rhs: value.rhs,
            margin,
            numerical_error_bound: err,
            status: classify(margin, err, reported),
        });
    }
    let summary = summarize(&records, specs, cfg)?;
    Ok(SuiteOutput { records, summary })
}

fn summarize(
    records: &[InequalityRecord],
    specs: &[FamilySpec],
    cfg: &SuiteConfig,
) -> Result<Summary> {
    let mut holds = 0;
    let mut within = 0;
    let mut violated = 0;
    let mut reported = 0;
    let mut flagged = Vec::new();
    for r in records {
        match r.status {
            Status::Holds => holds += 1,
            Status::HoldsWithinError => within += 1,
            Status::Violated => violated += 1,
            Status::ReportedOnly => {
                reported += 1;
                if r.margin < -r.numerical_error_bound {
                    flagged.push(r.name.clone());
                }
            }
        }
    }
    let mut constants = BTreeMap::new();
    let ratio_over = |prefix: &str, f: &dyn Fn(&InequalityRecord) -> Option<f64>, max: bool| {
        let vals: Vec<f64> = records
            .iter()
            .filter(|r| r.name.starts_with(prefix))
            .filter_map(f)
            .filter(|v| v.is_finite())
            .collect();
        if vals.is_empty() {
            None
        } else if max {
            vals.iter().cloned().reduce(f64::max)
        } else {
            vals.iter().cloned().reduce(f64::min)
        }
    };
    // lhs <= C rhs: empirical C = max lhs/rhs; C lhs <= rhs: empirical C = min rhs/lhs
    let upper = |r: &InequalityRecord| {
        if r.rhs.abs() > 1e-9 {
            Some(r.lhs / r.rhs)
        } else {
            None
        }
    };
    let lower = |r: &InequalityRecord| {
        if r.lhs.abs() > 1e-9 {
            Some(r.rhs / r.lhs)
        } else {
            None
        }
    };
    if let Some(c) = ratio_over("l1_stability_full", &upper, true) {
        constants.insert("C_M_l1_stability".into(), c);
    }
    if let Some(c) = ratio_over("w1_stability_full", &lower, false) {
        constants.insert("C_w1_stability".into(), c);
    }
    if let Some(c) = ratio_over("talagrand_stability", &lower, false) {
        constants.insert("C_CE_talagrand_stability".into(), c);
    }
    if let Some(c) = ratio_over("affine_fit_residual", &upper, true) {
        constants.insert("C_affine_fit".into(), c);
    }
    if let Some(c) = ratio_over("convolution_deficit_bound", &upper, true) {
        constants.insert("C_convolution_deficit".into(), c);
    }
    if let Some(c) = ratio_over("dk_convolution_stage", &upper, true) {
        constants.insert("C_k_convolution_stage".into(), c);
    }
    if let Some(c) = ratio_over("dk_stability_final", &upper, true) {
        constants.insert("C_k_final_bound".into(), c);
    }
    if let Some(c) = ratio_over("psi_lower_bound", &lower, false) {
        constants.insert("c_psi_ratio_floor".into(), c);
    }
    if let Some(c) = ratio_over("psi_inverse_form", &upper, true) {
        constants.insert("c_psi_inverse_form".into(), c);
    }
    // empirical best constant of H >= c ||f-1||_1^2 (asserted form has c = 1/2)
    if let Some(c) = ratio_over("pinsker @", &lower, false) {
        constants.insert("C_pinsker_ratio_floor".into(), c / 2.0);
    }
    let _ = (specs, cfg);
    Ok(Summary {
        total: records.len(),
        holds,
        holds_within_error: within,
        violated,
        reported_only: reported,
        flagged_reported: flagged,
        empirical_constants: constants,
    })
}

/// One point of a parameter sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub parameter: f64,
    pub delta: f64,
    pub delta_c: f64,
    pub entropy: f64,
    pub fisher: f64,
    pub w1: f64,
    pub w2: f64,
    pub tv: f64,
    pub kolmogorov: f64,
    pub l1: f64,
    pub l2_dm: f64,
}

/// Families exposed to parameter sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFamily {
    /// Scale σ → 1.
    Scale,
    /// Bump amplitude → 0.
    Bump,
    /// Tilt b (stays in the equality class).
    Tilt,
    /// Mixture weight → 0.
    Mixture,
}

impl SweepFamily {
    pub fn spec(self, theta: f64) -> FamilySpec {
        match self {
            SweepFamily::Scale => FamilySpec::Scale { sigma: theta },
            SweepFamily::Bump => FamilySpec::Bump {
                eps: theta,
                center: 0.8,
                width: 1.2,
            },
            SweepFamily::Tilt => FamilySpec::Tilt { b: theta },
            SweepFamily::Mixture => FamilySpec::Mixture {
                w: theta,
                sigma1: 0.8,
                sigma2: 1.3,
            },
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "scale" => Some(SweepFamily::Scale),
            "bump" => Some(SweepFamily::Bump),
            "tilt" => Some(SweepFamily::Tilt),
            "mixture" => Some(SweepFamily::Mixture),
            _ => None,
        }
    }
}

/// Convergence diagnostics along a deficit-shrinking schedule.
#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub family: String,
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of log ||f-1||_1 against log delta.
    pub exponent_l1_vs_delta: Option<f64>,
    pub delta_decreasing: bool,
    pub l1_decreasing: bool,
    pub converged: bool,
    /// sup over the sweep of ||f-1||_1 / delta^{1/4}.
    pub l1_delta_quarter_ratio: f64,
}

pub fn sequence_diagnostics(
    family: SweepFamily,
    schedule: &[f64],
    cfg: &SuiteConfig,
) -> Result<SweepReport> {
    if schedule.is_empty() {
        return Err(Error::Empty("sweep schedule"));
    }
    let res = Resolution::build(cfg, 1)?;
    let gauss = make_family(&FamilySpec::Tilt { b: 0.0 }, &res.gamma)?;
    let nu = transport::cdf_of(&gauss, &res.cdf_cfg)?;
    let mut points = Vec::with_capacity(schedule.len());
    for &theta in schedule {
        let spec = family.spec(theta);
        let f = make_family(&spec, &res.gamma)?;
        let h = functionals::entropy(&f, &res.gamma)?;
        let i = functionals::fisher_information(&f, &res.gamma)?;
        let cdf_cfg = res.cdf_cfg_for(&[&f], &res.gamma);
        let mu = transport::cdf_of(&f, &cdf_cfg)?;
        let u = rescale_to_dm(&f, &res.m)?;
        points.push(SweepPoint {
            parameter: theta,
            delta: i / 2.0 - h,
            delta_c: functionals::carlen_deficit(&u)?,
            entropy: h,
            fisher: i,
            w1: transport::wasserstein(&mu, &nu, 1.0)?,
            w2: transport::wasserstein(&mu, &nu, 2.0)?,
            tv: metrics::total_variation(&f, &gauss, &res.gamma)?,
            kolmogorov: metrics::kolmogorov(&mu, &nu),
            l1: functionals::lp_distance_to_one(&f, &res.gamma, 1.0)?,
            l2_dm: fourier::l2_dm_distance_to_one(&u),
        });
    }
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.delta > 1e-13 && p.l1 > 1e-13)
        .map(|p| (p.delta.ln(), p.l1.ln()))
        .collect();
    let exponent = if usable.len() >= 2 {
        let n = usable.len() as f64;
        let sx: f64 = usable.iter().map(|p| p.0).sum();
        let sy: f64 = usable.iter().map(|p| p.1).sum();
        let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() > 1e-12 {
            Some((n * sxy - sx * sy) / denom)
        } else {
            None
        }
    } else {
        None
    };
    let noise = 1e-10;
    let delta_decreasing = points
        .windows(2)
        .all(|w| w[1].delta <= w[0].delta * 1.05 + noise);
    let l1_decreasing = points
        .windows(2)
        .all(|w| w[1].l1 <= w[0].l1 * 1.10 + noise);
    let first = &points[0];
    let last = &points[points.len() - 1];
    let converged = points.len() >= 2
        && last.delta <= (0.5 * first.delta).max(1e-10)
        && last.l1 <= (0.9 * first.l1).max(1e-8);
    let ratio = points
        .iter()
        .filter(|p| p.delta > 1e-13)
        .map(|p| p.l1 / p.delta.powf(0.25))
        .fold(0.0f64, f64::max);
    Ok(SweepReport {
        family: format!("{family:?}").to_lowercase(),
        points,
        exponent_l1_vs_delta: exponent,
        delta_decreasing,
        l1_decreasing,
        converged,
        l1_delta_quarter_ratio: ratio,
    })
}

/// Default catalog convenience wrapper.
pub fn run_default_suite(cfg: &SuiteConfig) -> Result<SuiteOutput> {
    run_suite(&catalog::default_catalog(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> SuiteConfig {
        SuiteConfig {
            gamma_nodes: 96,
            m_nodes: 128,
            cdf_nodes: 1 << 14,
            leb_nodes: 2049,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn single_density_suites() {
        let cfg = quick_cfg();
        // constant density: no violations, margins at zero or positive
        let out = run_suite(&[FamilySpec::Tilt { b: 0.0 }], &cfg).unwrap();
        assert_eq!(out.summary.violated, 0, "violations: {:?}", names_of_violated(&out));
        // equality family: the deficit record sits inside the error band
        let out = run_suite(&[FamilySpec::Tilt { b: 1.0 }], &cfg).unwrap();
        assert_eq!(out.summary.violated, 0, "violations: {:?}", names_of_violated(&out));
        let lsi = out
            .records
            .iter()
            .find(|r| r.name.starts_with("eq_lsi"))
            .unwrap();
        assert!(lsi.margin.abs() <= 1e-6);
        assert_eq!(lsi.status, Status::HoldsWithinError);
        // a genuinely non-optimal member has a clearly positive deficit
        let out = run_suite(&[FamilySpec::Scale { sigma: 2.0 }], &cfg).unwrap();
        assert_eq!(out.summary.violated, 0, "violations: {:?}", names_of_violated(&out));
        let lsi = out
            .records
            .iter()
            .find(|r| r.name.starts_with("eq_lsi"))
            .unwrap();
        assert!((lsi.margin - 0.3181471805599453).abs() < 1e-6);
        assert_eq!(lsi.status, Status::Holds);
        let tal = out
            .records
            .iter()
            .find(|r| r.name.starts_with("talagrand @"))
            .unwrap();
        assert!((tal.margin - 0.6137056388801094).abs() < 1e-5);
    }

    fn names_of_violated(out: &SuiteOutput) -> Vec<&str> {
        out.records
            .iter()
            .filter(|r| r.status == Status::Violated)
            .map(|r| r.name.as_str())
            .collect()
    }

    #[test]
    fn absurd_error_cap_forces_violations() {
        let cfg = SuiteConfig {
            error_bound_cap: Some(1e-30),
            ..quick_cfg()
        };
        let out = run_suite(&[FamilySpec::Tilt { b: 1.0 }], &cfg).unwrap();
        assert!(out.summary.violated > 0);
    }

    #[test]
    fn scale_sweep_diagnostics() {
        let cfg = quick_cfg();
        let schedule: Vec<f64> = (0..12)
            .map(|i| 1.5 * (1.01f64 / 1.5).powf(i as f64 / 11.0))
            .collect();
        let rep = sequence_diagnostics(SweepFamily::Scale, &schedule, &cfg).unwrap();
        assert!(rep.delta_decreasing);
        assert!(rep.converged);
        let e = rep.exponent_l1_vs_delta.unwrap();
        // the closed-form scale family has l1 ~ c sqrt(delta)
        assert!((e - 0.5).abs() < 0.05, "exponent {e}");
        assert!(rep.l1_delta_quarter_ratio.is_finite());
        // weak L2(dm) stability: the rescaled members converge to 1
        let first = rep.points.first().unwrap().l2_dm;
        let last = rep.points.last().unwrap().l2_dm;
        assert!(last < 0.2 * first, "l2_dm did not shrink: {first} -> {last}");
    }

    #[test]
    fn constant_schedule_does_not_converge() {
        let cfg = quick_cfg();
        let rep =
            sequence_diagnostics(SweepFamily::Scale, &[1.5, 1.5, 1.5], &cfg).unwrap();
        assert!(!rep.converged);
    }

    #[test]
    fn raising_resolution_never_flips_holds_to_violated() {
        let coarse = SuiteConfig {
            gamma_nodes: 96,
            m_nodes: 96,
            cdf_nodes: 1 << 13,
            leb_nodes: 1025,
            ..SuiteConfig::default()
        };
        let fine = SuiteConfig {
            gamma_nodes: 144,
            m_nodes: 144,
            cdf_nodes: 1 << 14,
            leb_nodes: 2049,
            ..SuiteConfig::default()
        };
        let specs = [
            FamilySpec::Scale { sigma: 2.0 },
            FamilySpec::Tilt { b: 1.0 },
            FamilySpec::Mixture {
                w: 0.4,
                sigma1: 0.8,
                sigma2: 1.3,
            },
        ];
        let lo = run_suite(&specs, &coarse).unwrap();
        let hi = run_suite(&specs, &fine).unwrap();
        let hi_by_name: std::collections::BTreeMap<&str, Status> = hi
            .records
            .iter()
            .map(|r| (r.name.as_str(), r.status))
            .collect();
        for r in &lo.records {
            if r.status == Status::Holds {
                if let Some(&status) = hi_by_name.get(r.name.as_str()) {
                    assert_ne!(
                        status,
                        Status::Violated,
                        "{} flipped holds -> violated on refinement",
                        r.name
                    );
                }
            }
        }
    }

    #[test]
    fn mixture_sweep_rate_floor() {
        let cfg = quick_cfg();
        let schedule: Vec<f64> = (0..10)
            .map(|i| 0.5 * (0.02f64 / 0.5).powf(i as f64 / 9.0))
            .collect();
        let rep = sequence_diagnostics(SweepFamily::Mixture, &schedule, &cfg).unwrap();
        let e = rep.exponent_l1_vs_delta.unwrap();
        assert!(e >= 0.23, "mixture exponent {e}");
    }

    #[test]
    fn tilt_sweep_stays_in_equality_class() {
        let cfg = quick_cfg();
        let schedule: Vec<f64> = (0..5).map(|i| 2.0 - i as f64 * 0.4).collect();
        let rep = sequence_diagnostics(SweepFamily::Tilt, &schedule, &cfg).unwrap();
        for p in &rep.points {
            assert!(p.delta.abs() <= 1e-6, "delta {} at b={}", p.delta, p.parameter);
        }
    }
}
