//! One-dimensional optimal transport against the Gaussian reference.
//!
//! All couplings are monotone: the map T = G⁻¹∘F pushing F forward onto G is
//! the 1-D Brenier map and is optimal for every W_p. CDFs are tabulated on a
//! dense uniform grid by running trapezoid sums (monotone by construction);
//! W₁ integrates |F - G| in x, while W_p for p > 1 integrates the quantile
//! coupling as a Stieltjes sum against dF, which avoids the endpoint
//! singularities of a uniform u-grid. The u-grid midpoint rule is kept as an
//! independent cross-check route.

use crate::densities::RelativeDensity;
use crate::error::{Error, Result};
use crate::functionals::entropy;
use crate::grid::{differentiate, GaussianGrid};
use serde::Serialize;

/// Interpolation semantics of a tabulated CDF.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CdfKind {
    /// Piecewise-linear (absolutely continuous measure).
    Continuous,
    /// Right-continuous step function (finite-support measure).
    Step,
}

/// Monotone CDF table of a probability measure on the line.
#[derive(Clone, Debug)]
pub struct CdfRep {
    xs: Vec<f64>,
    fs: Vec<f64>,
    kind: CdfKind,
    tag: String,
}

impl CdfRep {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>, kind: CdfKind, tag: impl Into<String>) -> Result<Self> {
        if xs.len() != fs.len() {
            return Err(Error::LengthMismatch {
                expected: xs.len(),
                got: fs.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::Empty("cdf table"));
        }
        if !xs.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::BadDiscreteMeasure("cdf grid not increasing".into()));
        }
        if !fs.windows(2).all(|p| p[0] <= p[1]) {
            return Err(Error::BadDiscreteMeasure("cdf values decrease".into()));
        }
        if fs[0] > 1e-10 && kind == CdfKind::Continuous {
            return Err(Error::BadDiscreteMeasure(format!(
                "cdf starts at {} instead of 0",
                fs[0]
            )));
        }
        if (fs[fs.len() - 1] - 1.0).abs() > 1e-10 {
            return Err(Error::BadDiscreteMeasure(format!(
                "cdf ends at {} instead of 1",
                fs[fs.len() - 1]
            )));
        }
        Ok(Self {
            xs,
            fs,
            kind,
            tag: tag.into(),
        })
    }

    /// Step CDF of a finite-support measure from (atom, cumulative mass) pairs.
    pub fn step(atoms: Vec<f64>, cumulative: Vec<f64>, tag: impl Into<String>) -> Result<Self> {
        Self::new(atoms, cumulative, CdfKind::Step, tag)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.fs
    }

    pub fn kind(&self) -> CdfKind {
        self.kind
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// F(x), right-continuous.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.xs[0] {
            return if self.kind == CdfKind::Step { 0.0 } else { self.fs[0] };
        }
        let n = self.xs.len();
        if x >= self.xs[n - 1] {
            return self.fs[n - 1];
        }
        let i = self.xs.partition_point(|&t| t <= x) - 1;
        match self.kind {
            CdfKind::Step => self.fs[i],
            CdfKind::Continuous => {
                let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
                self.fs[i] + t * (self.fs[i + 1] - self.fs[i])
            }
        }
    }

    /// Left limit F(x⁻); differs from `eval` only at step points.
    pub fn eval_left(&self, x: f64) -> f64 {
        match self.kind {
            CdfKind::Continuous => self.eval(x),
            CdfKind::Step => {
                if x <= self.xs[0] {
                    return 0.0;
                }
                let n = self.xs.len();
                if x > self.xs[n - 1] {
                    return self.fs[n - 1];
                }
                let i = self.xs.partition_point(|&t| t < x);
                if i == 0 {
                    0.0
                } else {
                    self.fs[i - 1]
                }
            }
        }
    }

    /// Generalized inverse F⁻¹(u) = inf { x : F(x) ≥ u }.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if u.is_nan() || u <= 0.0 || u >= 1.0 {
            return Err(Error::QuantileOutOfRange(u));
        }
        let i = self.fs.partition_point(|&f| f < u);
        if i == 0 {
            return Ok(self.xs[0]);
        }
        if i >= self.xs.len() {
            return Ok(self.xs[self.xs.len() - 1]);
        }
        match self.kind {
            CdfKind::Step => Ok(self.xs[i]),
            CdfKind::Continuous => {
                let (f0, f1) = (self.fs[i - 1], self.fs[i]);
                if f1 <= f0 {
                    Ok(self.xs[i])
                } else {
                    let t = (u - f0) / (f1 - f0);
                    Ok(self.xs[i - 1] + t * (self.xs[i] - self.xs[i - 1]))
                }
            }
        }
    }
}

/// Grid parameters for CDF tabulation.
#[derive(Clone, Copy, Debug)]
pub struct CdfGrid {
    pub span: f64,
    pub nodes: usize,
}

impl Default for CdfGrid {
    fn default() -> Self {
        Self {
            span: 12.0,
            nodes: 1 << 16,
        }
    }
}

impl CdfGrid {
    /// Span wide enough for every density in `fs`: ten standard deviations of
    /// the heaviest tail, floored at the default span.
    pub fn for_densities(fs: &[&RelativeDensity], grid: &GaussianGrid) -> Self {
        let mut span = Self::default().span;
        for f in fs {
            if let Ok(m2) = crate::densities::moment(f, grid, 2) {
                span = span.max(10.0 * m2.sqrt());
            }
        }
        Self {
            span: span.min(40.0),
            nodes: Self::default().nodes,
        }
    }
}

/// Tabulate the CDF of the measure f·dref by running trapezoid sums.
pub fn cdf_of(f: &RelativeDensity, cfg: &CdfGrid) -> Result<CdfRep> {
    let n = cfg.nodes.max(16);
    let h = 2.0 * cfg.span / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| -cfg.span + h * i as f64).collect();
    let pdf: Vec<f64> = xs.iter().map(|&x| f.lebesgue_density(x)).collect();
    let mut fs = Vec::with_capacity(n);
    fs.push(0.0);
    let mut acc = 0.0;
    for i in 1..n {
        acc += h * (pdf[i - 1] + pdf[i]) / 2.0;
        fs.push(acc);
    }
    let mass = fs[n - 1];
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::MassDeficit((mass - 1.0).abs()));
    }
    for v in &mut fs {
        *v /= mass;
    }
    CdfRep::new(xs, fs, CdfKind::Continuous, f.label())
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 || !p.is_finite() {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "need p >= 1",
        });
    }
    Ok(())
}

fn union_grid(a: &CdfRep, b: &CdfRep) -> Vec<f64> {
    let mut xs: Vec<f64> = a.xs.iter().chain(b.xs.iter()).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// W₁ as the area between the CDFs, ∫ |F - G| dx.
fn w1_cdf_area(mu: &CdfRep, nu: &CdfRep) -> f64 {
    let xs = union_grid(mu, nu);
    let stepwise = mu.kind == CdfKind::Step || nu.kind == CdfKind::Step;
    let mut acc = 0.0;
    for w in xs.windows(2) {
        let dx = w[1] - w[0];
        if stepwise {
            // |F-G| is constant on (x_i, x_{i+1}) for step inputs
            acc += (mu.eval(w[0]) - nu.eval(w[0])).abs() * dx;
        } else {
            let d0 = (mu.eval(w[0]) - nu.eval(w[0])).abs();
            let d1 = (mu.eval(w[1]) - nu.eval(w[1])).abs();
            acc += dx * (d0 + d1) / 2.0;
        }
    }
    acc
}

/// ∫ g dμ as a midpoint Stieltjes sum against the tabulated CDF of μ.
fn stieltjes(mu: &CdfRep, mut g: impl FnMut(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    match mu.kind {
        CdfKind::Continuous => {
            for i in 0..mu.xs.len() - 1 {
                let df = mu.fs[i + 1] - mu.fs[i];
                if df > 0.0 {
                    acc += g((mu.xs[i] + mu.xs[i + 1]) / 2.0) * df;
                }
            }
        }
        CdfKind::Step => {
            let mut prev = 0.0;
            for i in 0..mu.xs.len() {
                let mass = mu.fs[i] - prev;
                prev = mu.fs[i];
                if mass > 0.0 {
                    acc += g(mu.xs[i]) * mass;
                }
            }
        }
    }
    acc
}

/// Wasserstein distance of order p between two tabulated measures.
///
/// p = 1 uses the CDF-area form; p > 1 integrates |G⁻¹(F(x)) - x|^p dμ(x),
/// the quantile coupling after the substitution u = F(x).
pub fn wasserstein(mu: &CdfRep, nu: &CdfRep, p: f64) -> Result<f64> {
    check_p(p)?;
    if p == 1.0 {
        return Ok(w1_cdf_area(mu, nu));
    }
    let mut acc = 0.0;
    match mu.kind {
        CdfKind::Continuous => {
            for i in 0..mu.xs.len() - 1 {
                let df = mu.fs[i + 1] - mu.fs[i];
                if df <= 0.0 {
                    continue;
                }
                let u = ((mu.fs[i] + mu.fs[i + 1]) / 2.0).clamp(1e-15, 1.0 - 1e-15);
                let xm = (mu.xs[i] + mu.xs[i + 1]) / 2.0;
                let t = nu.quantile(u)?;
                acc += (t - xm).abs().powf(p) * df;
            }
        }
        CdfKind::Step => {
            // subdivide each atom's quantile interval; exact when ν is also a step
            let mut prev = 0.0;
            for i in 0..mu.xs.len() {
                let lo = prev;
                let hi = mu.fs[i];
                prev = hi;
                if hi <= lo {
                    continue;
                }
                let sub = 64;
                for k in 0..sub {
                    let u = (lo + (hi - lo) * (k as f64 + 0.5) / sub as f64)
                        .clamp(1e-15, 1.0 - 1e-15);
                    let t = nu.quantile(u)?;
                    acc += (t - mu.xs[i]).abs().powf(p) * (hi - lo) / sub as f64;
                }
            }
        }
    }
    if !acc.is_finite() {
        return Err(Error::Divergent("wasserstein integrand".into()));
    }
    Ok(acc.powf(1.0 / p))
}

/// Cross-check route: midpoint rule on a uniform u-grid for
/// (∫₀¹ |F⁻¹(u) - G⁻¹(u)|^p du)^{1/p}.
pub fn wasserstein_by_quantiles(
    mu: &CdfRep,
    nu: &CdfRep,
    p: f64,
    resolution: usize,
) -> Result<f64> {
    check_p(p)?;
    let n = resolution.max(16);
    let mut acc = 0.0;
    for k in 0..n {
        let u = (k as f64 + 0.5) / n as f64;
        let d = (mu.quantile(u)? - nu.quantile(u)?).abs();
        acc += d.powf(p) / n as f64;
    }
    Ok(acc.powf(1.0 / p))
}

/// Monotone transport map sampled on a grid, with derivative samples.
#[derive(Clone, Debug)]
pub struct TransportMap {
    xs: Vec<f64>,
    t: Vec<f64>,
    t_prime: Vec<f64>,
}

impl TransportMap {
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.t
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.t_prime
    }

    /// T(x) by monotone linear interpolation.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.t[0];
        }
        if x >= self.xs[n - 1] {
            return self.t[n - 1];
        }
        let i = self.xs.partition_point(|&t| t <= x) - 1;
        let s = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.t[i] + s * (self.t[i + 1] - self.t[i])
    }
}

type TestMoment = (&'static str, fn(f64) -> f64);

/// ∫ φ(T) dμ = ∫ φ dν for the dense quantile coupling T = G⁻¹∘F; failure
/// signals that the CDF tabulation cannot support transport at tolerance.
fn pushforward_check(mu: &CdfRep, nu: &CdfRep) -> Result<()> {
    let tests: [TestMoment; 3] = [
        ("x", |x| x),
        ("x^2", |x| x * x),
        ("cos x", f64::cos),
    ];
    for (name, phi) in tests {
        let mut via_map = 0.0;
        match mu.kind() {
            CdfKind::Continuous => {
                for i in 0..mu.xs.len() - 1 {
                    let df = mu.fs[i + 1] - mu.fs[i];
                    if df > 0.0 {
                        let u = ((mu.fs[i] + mu.fs[i + 1]) / 2.0).clamp(1e-15, 1.0 - 1e-15);
                        via_map += phi(nu.quantile(u)?) * df;
                    }
                }
            }
            CdfKind::Step => {
                let mut prev = 0.0;
                for i in 0..mu.xs.len() {
                    let mass = mu.fs[i] - prev;
                    prev = mu.fs[i];
                    if mass > 0.0 {
                        let u = mu.fs[i].min(1.0 - 1e-15).max(1e-15);
                        via_map += phi(nu.quantile(u)?) * mass;
                    }
                }
            }
        }
        let direct = stieltjes(nu, phi);
        let err = (via_map - direct).abs();
        if err > 1e-5 {
            return Err(Error::PushforwardCheck {
                moment: name.to_string(),
                discrepancy: err,
            });
        }
    }
    Ok(())
}

/// Brenier map T = G⁻¹∘F between two tabulated measures, sampled on μ's grid.
///
/// The derivative comes from finite differences of the samples; when both
/// measures have known densities prefer [`brenier_between_densities`], which
/// uses the Monge–Ampère relation instead.
pub fn brenier_map(mu: &CdfRep, nu: &CdfRep) -> Result<TransportMap> {
    let xs = mu.xs.clone();
    let mut t = Vec::with_capacity(xs.len());
    for &x in &xs {
        let u = mu.eval(x).clamp(1e-15, 1.0 - 1e-15);
        t.push(nu.quantile(u)?);
    }
    // finite differences on the sampled map
    let n = xs.len();
    let t_prime: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = if i == 0 {
                (i, i + 1)
            } else if i == n - 1 {
                (i - 1, i)
            } else {
                (i - 1, i + 1)
            };
            (t[b] - t[a]) / (xs[b] - xs[a])
        })
        .collect();
    pushforward_check(mu, nu)?;
    Ok(TransportMap { xs, t, t_prime })
}

/// Brenier map between μ = f·dγ and ν = g·dγ with Monge–Ampère derivative
/// T'(x) = (f·γ)(x) / (g·γ)(T(x)), sampled on `sample_xs`.
pub fn brenier_between_densities(
    f: &RelativeDensity,
    g: &RelativeDensity,
    cfg: &CdfGrid,
    sample_xs: &[f64],
) -> Result<TransportMap> {
    let mu = cdf_of(f, cfg)?;
    let nu = cdf_of(g, cfg)?;
    let mut t = Vec::with_capacity(sample_xs.len());
    let mut t_prime = Vec::with_capacity(sample_xs.len());
    for &x in sample_xs {
        let u = mu.eval(x).clamp(1e-15, 1.0 - 1e-15);
        let tx = nu.quantile(u)?;
        let num = f.lebesgue_density(x);
        let den = g.lebesgue_density(tx);
        // num underflows only where mu carries no representable mass; the
        // map is flat there and the derivative is genuinely +0
        let d = if den > 0.0 { num / den } else { f64::INFINITY };
        if d < 0.0 || !d.is_finite() {
            return Err(Error::NonMonotoneMap(x));
        }
        t.push(tx);
        t_prime.push(d);
    }
    pushforward_check(&mu, &nu)?;
    Ok(TransportMap {
        xs: sample_xs.to_vec(),
        t,
        t_prime,
    })
}

/// Map from f·dγ to dγ sampled on the quadrature nodes of `grid`.
pub fn brenier_to_gaussian(
    f: &RelativeDensity,
    grid: &GaussianGrid,
    cfg: &CdfGrid,
) -> Result<TransportMap> {
    let one = crate::densities::from_fn("gamma", |_| 1.0, grid)?;
    brenier_between_densities(f, &one, cfg, grid.nodes())
}

/// Talagrand deficit δ_Tal(f) = 2H(f) - W₂²(f·dγ, dγ) ≥ 0.
pub fn talagrand_deficit(
    f: &RelativeDensity,
    grid: &GaussianGrid,
    cfg: &CdfGrid,
) -> Result<f64> {
    let h = entropy(f, grid)?;
    let one = crate::densities::from_fn("gamma", |_| 1.0, grid)?;
    let mu = cdf_of(f, cfg)?;
    let nu = cdf_of(&one, cfg)?;
    let w2 = wasserstein(&mu, &nu, 2.0)?;
    Ok(2.0 * h - w2 * w2)
}

/// (log f)' samples on the grid, analytic when available.
fn log_derivative_samples(f: &RelativeDensity, grid: &GaussianGrid) -> Result<Vec<f64>> {
    if f.has_analytic_derivative() {
        Ok(grid.sample(|x| f.log_derivative(x).unwrap()))
    } else {
        let logs: Vec<f64> = grid.sample(|x| f.evaluate(x).max(1e-300).ln());
        differentiate(grid, &logs)
    }
}

/// ∫ |T(x) - x + (log f)'(x)|² f dγ, the transport-proof residual, which the
/// optimal-transport proof of the LSI bounds by 2δ(f).
pub fn transport_residual(
    f: &RelativeDensity,
    grid: &GaussianGrid,
    cfg: &CdfGrid,
) -> Result<f64> {
    let map = brenier_to_gaussian(f, grid, cfg)?;
    let lf = log_derivative_samples(f, grid)?;
    let mut acc = 0.0;
    for (i, (&x, &w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
        let fv = f.evaluate(x);
        // nodes holding less than 1e-15 of mass contribute below 1e-12 even
        // with the quadratically growing integrand; the tabulated map is
        // endpoint-pinned there anyway
        if w * fv < 1e-15 {
            if fv < 0.0 {
                return Err(Error::FloorViolated {
                    min: fv,
                    alpha: f64::MIN_POSITIVE,
                });
            }
            continue;
        }
        let r = map.values()[i] - x + lf[i];
        acc += w * fv * r * r;
    }
    Ok(acc)
}

/// ∫ Σ (λ - log(1+λ)) f dγ with λ = T' - 1, bounded by δ(f) in the
/// optimal-transport proof.
pub fn eigen_defect(f: &RelativeDensity, grid: &GaussianGrid, cfg: &CdfGrid) -> Result<f64> {
    let map = brenier_to_gaussian(f, grid, cfg)?;
    let mut acc = 0.0;
    for (i, (&x, &w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
        // beyond the resolvable CDF range the tabulated map pins at its
        // endpoints and T' underflows; nodes below 1e-15 of mass add less
        // than 1e-12 to the defect even with |log T'| near 700
        if w * f.evaluate(x) < 1e-15 {
            continue;
        }
        let lambda = map.derivatives()[i] - 1.0;
        if lambda <= -1.0 {
            return Err(Error::NonMonotoneMap(x));
        }
        // ln_1p keeps λ - log(1+λ) accurate for |λ| near zero
        acc += w * f.evaluate(x) * (lambda - lambda.ln_1p());
    }
    Ok(acc)
}

/// Affine fit of log f per the floor-class stability bound:
/// L(x) = a_f·x + b_f with b_f = ∫ log f dγ and a_f = ±∫T dγ, the sign chosen
/// to minimize the L¹(dγ) residual (the construction leaves it implicit).
#[derive(Clone, Debug, Serialize)]
pub struct AffineFit {
    pub a_f: f64,
    pub b_f: f64,
    pub residual: f64,
    /// True when +∫T dγ beat the construction's -∫T dγ.
    pub sign_flipped: bool,
}

pub fn affine_fit(
    f: &RelativeDensity,
    alpha: f64,
    grid: &GaussianGrid,
    cfg: &CdfGrid,
) -> Result<AffineFit> {
    let min_f = grid
        .nodes()
        .iter()
        .map(|&x| f.evaluate(x))
        .fold(f64::MAX, f64::min);
    if min_f < alpha - 1e-12 {
        return Err(Error::FloorViolated { min: min_f, alpha });
    }
    let map = brenier_to_gaussian(f, grid, cfg)?;
    let a: f64 = grid
        .weights()
        .iter()
        .zip(map.values())
        .map(|(&w, &t)| w * t)
        .sum();
    let b_f: f64 = grid.integrate_fn(|x| f.evaluate(x).ln());
    let residual_for = |af: f64| grid.integrate_fn(|x| (f.evaluate(x).ln() - af * x - b_f).abs());
    let (r_minus, r_plus) = (residual_for(-a), residual_for(a));
    let (a_f, residual, sign_flipped) = if r_minus <= r_plus {
        (-a, r_minus, false)
    } else {
        (a, r_plus, true)
    };
    Ok(AffineFit {
        a_f,
        b_f,
        residual,
        sign_flipped,
    })
}
