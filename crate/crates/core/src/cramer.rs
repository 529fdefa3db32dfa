//! Convolution machinery on Lebesgue grids and the Kolmogorov-distance
//! stability pipeline.
//!
//! The central objects: the Gaussian window g(x) = 2^{1/4} e^{-πx²}, the
//! windowed density h(x) = f(√(2π)x)·g(x) of a symmetric density f over dγ,
//! and the probability density p(x) = (2^{-1/4}/√π)·h(x/√π) = f(√2 x)e^{-x²}/√π
//! of X = Y/√2 with Y ~ f dγ. If μ = f dγ has second moment k then
//! Var[X] = k/2, and the distribution of X₁ + X₂ (i.i.d.) is compared against
//! the standard normal through h∗h - g∗g.
//!
//! The doubly-normalized family (∫f dγ = ∫v dγ = 1 with v(x) = f(x/√2)², plus
//! m₂ = 1) is produced by a damped Newton solve over a three-bump perturbation
//! of the constant density; it is the test family for every statement that
//! assumes v dγ is a probability measure.

use crate::closed_forms::normal_cdf_sigma;
use crate::densities::{from_parts, DensityFn, RelativeDensity};
use crate::error::{Error, Result};
use crate::functionals::{lsi_deficit, xlogx};
use crate::grid::{build_grid, GaussianGrid, Reference};
use crate::transport::{cdf_of, CdfGrid, CdfRep};
use nalgebra::{Matrix3, Vector3};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Function sampled on a uniform Lebesgue grid. Signed values are allowed;
/// probability densities additionally have unit mass.
#[derive(Clone, Debug)]
pub struct LebesgueDensity {
    grid: GaussianGrid,
    values: Vec<f64>,
}

impl LebesgueDensity {
    pub fn new(grid: GaussianGrid, values: Vec<f64>) -> Result<Self> {
        if grid.reference() != Reference::Lebesgue {
            return Err(Error::ReferenceMismatch(
                "lebesgue",
                grid.reference().as_str(),
            ));
        }
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: 0, x: 0.0 });
        }
        Ok(Self { grid, values })
    }

    /// Sample a function on a fresh symmetric grid.
    pub fn sample(span: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = build_grid(Reference::Lebesgue, nodes, span)?;
        let values = grid.sample(f);
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GaussianGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        self.grid.nodes()[1] - self.grid.nodes()[0]
    }

    /// ∫ v dx.
    pub fn mass(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(&w, &v)| w * v)
            .sum()
    }

    /// ‖v‖_p = (∫ |v|^p dx)^{1/p}.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(&w, &v)| w * v.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// ∫ x² |v| dx.
    pub fn second_moment_abs(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(self.grid.nodes())
            .zip(&self.values)
            .map(|((&w, &x), &v)| w * x * x * v.abs())
            .sum()
    }

    /// ∫ x² v dx restricted to |x| ≤ cut.
    pub fn truncated_second_moment(&self, cut: f64) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(self.grid.nodes())
            .zip(&self.values)
            .filter(|((_, &x), _)| x.abs() <= cut)
            .map(|((&w, &x), &v)| w * x * x * v)
            .sum()
    }

    /// ∫ x v dx restricted to |x| ≤ cut.
    pub fn truncated_first_moment(&self, cut: f64) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(self.grid.nodes())
            .zip(&self.values)
            .filter(|((_, &x), _)| x.abs() <= cut)
            .map(|((&w, &x), &v)| w * x * v)
            .sum()
    }

    /// Running-trapezoid CDF of a probability density.
    pub fn cdf(&self, tag: impl Into<String>) -> Result<CdfRep> {
        let n = self.grid.len();
        let h = self.step();
        let mut fs = Vec::with_capacity(n);
        fs.push(0.0);
        let mut acc = 0.0;
        for i in 1..n {
            acc += h * (self.values[i - 1].max(0.0) + self.values[i].max(0.0)) / 2.0;
            fs.push(acc);
        }
        let mass = fs[n - 1];
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::MassDeficit((mass - 1.0).abs()));
        }
        for v in &mut fs {
            *v /= mass;
        }
        CdfRep::new(
            self.grid.nodes().to_vec(),
            fs,
            crate::transport::CdfKind::Continuous,
            tag,
        )
    }

    pub fn sup_diff(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| (v - f(x)).abs())
            .fold(0.0, f64::max)
    }
}

/// γ_{b,σ} sampled on a symmetric grid.
pub fn gaussian_density(span: f64, nodes: usize, b: f64, sigma: f64) -> Result<LebesgueDensity> {
    LebesgueDensity::sample(span, nodes, |x| {
        (-((x - b) * (x - b)) / (2.0 * sigma * sigma)).exp()
            / (sigma * (2.0 * PI).sqrt())
    })
}

/// The window g(x) = 2^{1/4} e^{-πx²} with ∫ g² dx = 1.
pub fn g_window(span: f64, nodes: usize) -> Result<LebesgueDensity> {
    LebesgueDensity::sample(span, nodes, |x| 2f64.powf(0.25) * (-PI * x * x).exp())
}

/// Discrete convolution scaled by the grid step. Both inputs must share the
/// same step; the output support is the Minkowski sum of the inputs.
pub fn convolve(p: &LebesgueDensity, q: &LebesgueDensity) -> Result<LebesgueDensity> {
    let hp = p.step();
    let hq = q.step();
    if ((hp - hq) / hp).abs() > 1e-9 {
        return Err(Error::GridMismatch(format!(
            "steps differ: {hp} vs {hq}"
        )));
    }
    let n = p.values.len();
    let m = q.values.len();
    let out_len = n + m - 1;
    let mut vals = vec![0.0; out_len];
    for (i, &pv) in p.values.iter().enumerate() {
        if pv == 0.0 {
            continue;
        }
        for (j, &qv) in q.values.iter().enumerate() {
            vals[i + j] += pv * qv;
        }
    }
    for v in &mut vals {
        *v *= hp;
    }
    let span = p.grid.span() + q.grid.span();
    let grid = build_grid(Reference::Lebesgue, out_len, span)?;
    LebesgueDensity::new(grid, vals)
}

fn require_symmetric(f: &RelativeDensity, grid: &GaussianGrid) -> Result<()> {
    let mut worst = 0.0f64;
    for &x in grid.nodes().iter().filter(|x| **x > 0.0) {
        worst = worst.max((f.evaluate(x) - f.evaluate(-x)).abs());
    }
    if worst > 1e-8 {
        return Err(Error::Asymmetric(worst));
    }
    Ok(())
}

/// h(x) = f(√(2π) x)·g(x) sampled on a Lebesgue grid.
pub fn h_density(f: &RelativeDensity, span: f64, nodes: usize) -> Result<LebesgueDensity> {
    let c = (2.0 * PI).sqrt();
    let fc = f.clone();
    LebesgueDensity::sample(span, nodes, move |x| {
        fc.evaluate(c * x) * 2f64.powf(0.25) * (-PI * x * x).exp()
    })
}

/// p(x) = (2^{-1/4}/√π) h(x/√π) = f(√2 x) e^{-x²}/√π, the density of Y/√2
/// for Y ~ f dγ.
pub fn p_density(f: &RelativeDensity, span: f64, nodes: usize) -> Result<LebesgueDensity> {
    let fc = f.clone();
    LebesgueDensity::sample(span, nodes, move |x| {
        fc.evaluate(std::f64::consts::SQRT_2 * x) * (-x * x).exp() / PI.sqrt()
    })
}

/// v(x) = f(x/√2)², the squared-dilate whose LSI deficit the pipeline tracks.
pub fn v_density(f: &RelativeDensity, grid: &GaussianGrid) -> Result<RelativeDensity> {
    let fc = f.clone();
    let raw: DensityFn = Arc::new(move |x| {
        let t = fc.evaluate(x / std::f64::consts::SQRT_2);
        t * t
    });
    let deriv: Option<DensityFn> = if f.has_analytic_derivative() {
        let fc = f.clone();
        Some(Arc::new(move |x| {
            let y = x / std::f64::consts::SQRT_2;
            std::f64::consts::SQRT_2 * fc.evaluate(y) * fc.derivative(y).unwrap()
        }))
    } else {
        None
    };
    let mass = grid.integrate_fn(|x| raw(x));
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::Normalization(format!(
            "v dγ has mass {mass}; f is not v-normalized"
        )));
    }
    from_parts(format!("v({})", f.label()), raw, deriv, true, grid)
}

/// The three integral identities of the windowed density:
/// ∫h² dx = 1 (needs v dγ probability), ∫h dx = 2^{1/4} (needs f dγ
/// probability), ∫x²h dx = 2^{-3/4}k/π with k = m₂(f dγ).
#[derive(Clone, Debug, Serialize)]
pub struct HNormalization {
    pub values: [f64; 3],
    pub expected: [f64; 3],
    pub deviations: [f64; 3],
}

pub fn h_normalization_check(
    f: &RelativeDensity,
    k: f64,
    gamma_grid: &GaussianGrid,
    span: f64,
    nodes: usize,
) -> Result<HNormalization> {
    require_symmetric(f, gamma_grid)?;
    let h = h_density(f, span, nodes)?;
    let sq = LebesgueDensity::new(h.grid.clone(), h.values.iter().map(|v| v * v).collect())?;
    let values = [
        sq.mass(),
        h.mass(),
        h.grid
            .weights()
            .iter()
            .zip(h.grid.nodes())
            .zip(&h.values)
            .map(|((&w, &x), &v)| w * x * x * v)
            .sum(),
    ];
    let expected = [1.0, 2f64.powf(0.25), 2f64.powf(-0.75) * k / PI];
    let deviations = [
        (values[0] - expected[0]).abs(),
        (values[1] - expected[1]).abs(),
        (values[2] - expected[2]).abs(),
    ];
    Ok(HNormalization {
        values,
        expected,
        deviations,
    })
}

/// ‖u‖₁ ≤ e^{(k+1)/2}‖u‖₂ with k = ∫x²|u| / ‖u‖₁.
#[derive(Clone, Debug, Serialize)]
pub struct L1L2Bound {
    pub l1: f64,
    pub l2: f64,
    pub k: f64,
    pub bound: f64,
    pub margin: f64,
}

pub fn l1l2_bound(u: &LebesgueDensity) -> Result<L1L2Bound> {
    let l1 = u.lp_norm(1.0);
    if l1.is_nan() || l1 <= 0.0 {
        return Err(Error::Empty("l1l2 bound of the zero function"));
    }
    let l2 = u.lp_norm(2.0);
    let k = u.second_moment_abs() / l1;
    let bound = ((k + 1.0) / 2.0).exp() * l2;
    Ok(L1L2Bound {
        l1,
        l2,
        k,
        bound,
        margin: bound - l1,
    })
}

/// Both sides of the convolution-deficit bound
/// ∫|h∗h - g∗g|² dx ≤ C·δ_c^{1/4}·(‖h-g‖_{6/5}² + ‖h-g‖₂)^{3/2}.
#[derive(Clone, Debug, Serialize)]
pub struct FeoQuantities {
    pub lhs: f64,
    pub rhs_factor: f64,
    pub deficit_quarter: f64,
    /// lhs / (rhs_factor · deficit_quarter); the symbolic constant estimate.
    pub implied_constant: f64,
}

pub fn feo_quantities(
    f: &RelativeDensity,
    gamma_grid: &GaussianGrid,
    span: f64,
    nodes: usize,
) -> Result<FeoQuantities> {
    require_symmetric(f, gamma_grid)?;
    let v = v_density(f, gamma_grid)?;
    let delta = lsi_deficit(&v, gamma_grid)?.max(0.0);
    let h = h_density(f, span, nodes)?;
    let g = g_window(span, nodes)?;
    let hh = convolve(&h, &h)?;
    let gg = convolve(&g, &g)?;
    let u = LebesgueDensity::new(
        hh.grid.clone(),
        hh.values
            .iter()
            .zip(&gg.values)
            .map(|(a, b)| a - b)
            .collect(),
    )?;
    let lhs = u.lp_norm(2.0).powi(2);
    let diff = LebesgueDensity::new(
        h.grid.clone(),
        h.values.iter().zip(&g.values).map(|(a, b)| a - b).collect(),
    )?;
    let n65 = diff.lp_norm(6.0 / 5.0);
    let n2 = diff.lp_norm(2.0);
    let rhs_factor = (n65 * n65 + n2).powf(1.5);
    let deficit_quarter = delta.powf(0.25);
    let implied_constant = if rhs_factor * deficit_quarter > 0.0 {
        lhs / (rhs_factor * deficit_quarter)
    } else {
        0.0
    };
    Ok(FeoQuantities {
        lhs,
        rhs_factor,
        deficit_quarter,
        implied_constant,
    })
}

/// sup_x |F(x) - target(x)| over the table's grid with local refinement.
pub fn sup_cdf_diff(cdf: &CdfRep, target: impl Fn(f64) -> f64) -> f64 {
    let xs = cdf.xs();
    let mut best = 0.0f64;
    let mut best_x = xs[0];
    for &x in xs {
        let d = (cdf.eval(x) - target(x)).abs();
        if d > best {
            best = d;
            best_x = x;
        }
    }
    let h = xs[1] - xs[0];
    for k in -32i32..=32 {
        let x = best_x + h * k as f64 / 32.0;
        best = best.max((cdf.eval(x) - target(x)).abs());
    }
    best
}

/// Everything the Kolmogorov-stability pipeline produces for one member.
#[derive(Clone, Debug, Serialize)]
pub struct KolmogorovStabilityRecord {
    pub delta_v: f64,
    pub eps: f64,
    /// d_K(F∗F, Φ₁) by direct convolution.
    pub dk_conv: f64,
    /// d_K(F∗F, Φ₁) / δ(v)^{1/8}: empirical constant of the first stage.
    pub dk_conv_ratio: f64,
    pub eta: f64,
    pub n_eta: f64,
    /// Truncated second moment ∫_{-N}^{N} x² p dx.
    pub sigma_eta_sq: f64,
    /// Same with the first-moment subtraction; coincides for symmetric p.
    pub sigma_eta_sq_centered: f64,
    pub dk_mu_gamma_eps: f64,
    /// C_k/√(log(1/ε)) with the configured C_k.
    pub bound: f64,
    /// d_K(μ, γ_ε)·√(log(1/ε)): empirical constant of the final bound.
    pub implied_ck: f64,
}

pub fn kolmogorov_stability_sides(
    f: &RelativeDensity,
    eps: f64,
    c_k: f64,
    gamma_grid: &GaussianGrid,
    span: f64,
    nodes: usize,
    cdf_cfg: &CdfGrid,
) -> Result<KolmogorovStabilityRecord> {
    require_symmetric(f, gamma_grid)?;
    if eps.is_nan() || eps <= 0.0 || eps >= 1.0 {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "need 0 < eps < 1",
        });
    }
    let v = v_density(f, gamma_grid)?;
    let delta_v = lsi_deficit(&v, gamma_grid)?.max(0.0);
    if delta_v > eps * (1.0 + 1e-6) {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "need delta(v) <= eps",
        });
    }
    let p = p_density(f, span, nodes)?;
    let pp = convolve(&p, &p)?;
    let ff = pp.cdf("F*F")?;
    let dk_conv = sup_cdf_diff(&ff, |x| normal_cdf_sigma(x, 1.0));
    let dk_conv_ratio = if delta_v > 0.0 {
        dk_conv / delta_v.powf(0.125)
    } else {
        0.0
    };
    let eta = (c_k * eps.powf(0.125)).min(1.0 - 1e-9);
    let n_eta = 1.0 + (2.0 * (1.0 / eta).ln()).sqrt();
    let sigma_eta_sq = p.truncated_second_moment(n_eta);
    let a = p.truncated_first_moment(n_eta);
    let sigma_eta_sq_centered = sigma_eta_sq - a * a;
    let mu = cdf_of(f, cdf_cfg)?;
    let gamma_eps_sigma = (2.0 * sigma_eta_sq).sqrt();
    let dk_mu_gamma_eps = sup_cdf_diff(&mu, |x| normal_cdf_sigma(x, gamma_eps_sigma));
    let log_inv_eps = (1.0 / eps).ln();
    let bound = c_k / log_inv_eps.sqrt();
    Ok(KolmogorovStabilityRecord {
        delta_v,
        eps,
        dk_conv,
        dk_conv_ratio,
        eta,
        n_eta,
        sigma_eta_sq,
        sigma_eta_sq_centered,
        dk_mu_gamma_eps,
        bound,
        implied_ck: dk_mu_gamma_eps * log_inv_eps.sqrt(),
    })
}

/// Ψ(t) = e^{-1/t²} with the Ψ(0) = 0 convention.
pub fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / (t * t)).exp()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiRecord {
    pub delta_v: f64,
    pub dk_mu_gamma: f64,
    pub psi_value: f64,
    /// δ(v)/Ψ(d_K); must stay bounded below along a δ → 0 sweep.
    pub ratio: f64,
}

/// δ(v) against Ψ(d_K(μ, γ)) for a symmetric member with m₂(μ) = 1.
pub fn psi_bound(
    f: &RelativeDensity,
    gamma_grid: &GaussianGrid,
    cdf_cfg: &CdfGrid,
) -> Result<PsiRecord> {
    require_symmetric(f, gamma_grid)?;
    let m2 = crate::densities::moment(f, gamma_grid, 2)?;
    if (m2 - 1.0).abs() > 1e-6 {
        return Err(Error::Normalization(format!(
            "m2(mu) = {m2}, the bound requires 1 within 1e-6"
        )));
    }
    let v = v_density(f, gamma_grid)?;
    let delta_v = lsi_deficit(&v, gamma_grid)?.max(0.0);
    let mu = cdf_of(f, cdf_cfg)?;
    let dk = sup_cdf_diff(&mu, |x| normal_cdf_sigma(x, 1.0));
    let psi_value = psi(dk);
    let ratio = if psi_value > 0.0 {
        delta_v / psi_value
    } else {
        f64::INFINITY
    };
    Ok(PsiRecord {
        delta_v,
        dk_mu_gamma: dk,
        psi_value,
        ratio,
    })
}

/// Pointwise sanity of the comparison map: Ψ(t) ≤ min{t², t⁸} on (0, 0.3].
pub fn psi_below_power_envelope(samples: usize) -> bool {
    (1..=samples).all(|i| {
        let t = 0.05 + (0.3 - 0.05) * i as f64 / samples as f64;
        psi(t) <= (t * t).min(t.powi(8))
    })
}

/// ∫ p log p dx ≥ -(k+1) for a probability density with ∫x²p = k.
#[derive(Clone, Debug, Serialize)]
pub struct EntropyBound {
    pub entropy: f64,
    pub k: f64,
    pub lower: f64,
    pub margin: f64,
}

pub fn entropy_lower_bound(p: &LebesgueDensity) -> Result<EntropyBound> {
    let mass = p.mass();
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::Normalization(format!("mass {mass}")));
    }
    let entropy: f64 = p
        .grid()
        .weights()
        .iter()
        .zip(p.values())
        .map(|(&w, &v)| w * xlogx(v.max(0.0)))
        .sum();
    let k = p
        .grid()
        .weights()
        .iter()
        .zip(p.grid().nodes())
        .zip(p.values())
        .map(|((&w, &x), &v)| w * x * x * v)
        .sum::<f64>();
    let lower = -(k + 1.0);
    Ok(EntropyBound {
        entropy,
        k,
        lower,
        margin: entropy - lower,
    })
}

/// Midpoint convexity of p ↦ log ‖u‖_p^p at p ∈ {1, 3/2, 2}.
pub fn log_norm_convexity_margin(u: &LebesgueDensity) -> f64 {
    let j = |p: f64| u.lp_norm(p).powf(p).ln();
    (j(1.0) + j(2.0)) / 2.0 - j(1.5)
}

// --- the doubly-normalized perturbation family ---
//
// Gaussian bump pairs keep every constraint integral entire, so the Gauss
// rules converge spectrally; compactly supported profiles would cap the
// constraint accuracy near 1e-4.

const BUMPS: [(f64, f64); 3] = [(1.0, 0.7), (0.0, 1.0), (2.0, 0.8)];

fn bump_pair(x: f64, center: f64, width: f64) -> f64 {
    let lobe = |t: f64| (-t * t / 2.0).exp();
    if center == 0.0 {
        lobe(x / width)
    } else {
        lobe((x - center) / width) + lobe((x + center) / width)
    }
}

fn bump_pair_deriv(x: f64, center: f64, width: f64) -> f64 {
    let lobe_d = |t: f64| -t * (-t * t / 2.0).exp();
    if center == 0.0 {
        lobe_d(x / width) / width
    } else {
        (lobe_d((x - center) / width) + lobe_d((x + center) / width)) / width
    }
}

fn triple_bump(x: f64, coeffs: &[f64; 3]) -> f64 {
    1.0 + coeffs
        .iter()
        .zip(BUMPS.iter())
        .map(|(&e, &(c, w))| e * bump_pair(x, c, w))
        .sum::<f64>()
}

fn triple_bump_deriv(x: f64, coeffs: &[f64; 3]) -> f64 {
    coeffs
        .iter()
        .zip(BUMPS.iter())
        .map(|(&e, &(c, w))| e * bump_pair_deriv(x, c, w))
        .sum()
}

fn family_residual(grid: &GaussianGrid, scale: f64, coeffs: &[f64; 3]) -> Vector3<f64> {
    let mut mass = 0.0;
    let mut m2 = 0.0;
    let mut vmass = 0.0;
    for (&x, &w) in grid.nodes().iter().zip(grid.weights()) {
        let fx = scale * triple_bump(x, coeffs);
        mass += w * fx;
        m2 += w * x * x * fx;
        let fv = scale * triple_bump(x / std::f64::consts::SQRT_2, coeffs);
        vmass += w * fv * fv;
    }
    Vector3::new(mass - 1.0, vmass - 1.0, m2 - 1.0)
}

/// Symmetric density with ∫f dγ = ∫v dγ = m₂(f dγ) = 1, built from a
/// three-bump perturbation of amplitude `tau` (damped Newton on the scale and
/// the two free bump coefficients).
pub fn doubly_normalized_family(tau: f64, grid: &GaussianGrid) -> Result<RelativeDensity> {
    if !(0.0..=0.6).contains(&tau) {
        return Err(Error::InvalidParameter {
            name: "tau",
            value: tau,
            reason: "family is constructed for tau in [0, 0.6]",
        });
    }
    // unknowns: overall scale c and the second and third bump coefficients
    let mut z = Vector3::new(1.0, 0.0, 0.0);
    let residual = |z: &Vector3<f64>| {
        family_residual(grid, z[0], &[tau, z[1], z[2]])
    };
    let mut r = residual(&z);
    for _ in 0..80 {
        let n0 = r.amax();
        if n0 < 1e-13 {
            break;
        }
        let mut jac = Matrix3::zeros();
        for j in 0..3 {
            let mut zp = z;
            let step = 1e-7;
            zp[j] += step;
            let rp = residual(&zp);
            for i in 0..3 {
                jac[(i, j)] = (rp[i] - r[i]) / step;
            }
        }
        let delta = jac.lu().solve(&r).ok_or_else(|| {
            Error::SolverFailed("singular Jacobian in the family solve".into())
        })?;
        let mut lambda = 1.0;
        loop {
            let zn = z - lambda * delta;
            let rn = residual(&zn);
            if rn.amax() < n0 {
                z = zn;
                r = rn;
                break;
            }
            lambda /= 2.0;
            if lambda < 1e-8 {
                return Err(Error::SolverFailed(format!(
                    "line search stalled at residual {n0:.3e}"
                )));
            }
        }
    }
    if r.amax() > 1e-10 {
        return Err(Error::SolverFailed(format!(
            "family constraints not met: residual {:.3e}",
            r.amax()
        )));
    }
    let scale = z[0];
    let coeffs = [tau, z[1], z[2]];
    // the solved f must be a genuine density
    for &x in grid.nodes() {
        if scale * triple_bump(x, &coeffs) <= 0.0 {
            return Err(Error::SolverFailed(format!(
                "family member negative at x = {x}"
            )));
        }
    }
    let raw: DensityFn = Arc::new(move |x| scale * triple_bump(x, &coeffs));
    let deriv: DensityFn = Arc::new(move |x| scale * triple_bump_deriv(x, &coeffs));
    from_parts(
        format!("doubly-normalized(tau={tau})"),
        raw,
        Some(deriv),
        true,
        grid,
    )
}

/// Member of the doubly-normalized family with δ(v) ≈ `target` (relative
/// accuracy ~5%), found by bisection on the amplitude.
pub fn doubly_normalized_at_deficit(
    target: f64,
    grid: &GaussianGrid,
) -> Result<RelativeDensity> {
    if !(target > 0.0 && target < 2e-2) {
        return Err(Error::InvalidParameter {
            name: "target",
            value: target,
            reason: "reachable deficits are in (0, 2e-2)",
        });
    }
    let delta_of = |tau: f64| -> Result<f64> {
        let f = doubly_normalized_family(tau, grid)?;
        let v = v_density(&f, grid)?;
        Ok(lsi_deficit(&v, grid)?.max(0.0))
    };
    let mut lo = 1e-4;
    let mut hi = 0.5;
    if delta_of(hi)? < target {
        return Err(Error::SolverFailed("target deficit unreachable".into()));
    }
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if delta_of(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.02 {
            break;
        }
    }
    doubly_normalized_family((lo * hi).sqrt(), grid)
}
