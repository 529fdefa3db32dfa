//! Probability metrics on the line and their comparison chain.
//!
//! Total variation and Hellinger act on densities against a common reference;
//! Kolmogorov and Lévy act on CDF tables; Prokhorov is computed on finite
//! supports by bisecting over ε and deciding the Strassen coupling condition
//! P(|X - Y| > ε) ≤ ε with an integer max-flow feasibility test. Continuous
//! measures enter the Prokhorov computation through conditional quantile
//! binning, with the discretization error reported alongside.

use crate::densities::RelativeDensity;
use crate::error::{Error, Result};
use crate::grid::GaussianGrid;
use crate::transport::{wasserstein, CdfRep};
use rand::Rng;
use serde::Serialize;

/// Finite-support probability measure with distinct, sorted atoms.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    masses: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Empty("discrete measure"));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::BadDiscreteMeasure("duplicate atom".into()));
            }
        }
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadDiscreteMeasure(format!(
                "masses sum to {total}, need 1 within 1e-12"
            )));
        }
        if pairs.iter().any(|p| p.1 <= 0.0) {
            return Err(Error::BadDiscreteMeasure("non-positive mass".into()));
        }
        let (atoms, masses) = pairs.into_iter().unzip();
        Ok(Self { atoms, masses })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Step CDF of the measure.
    pub fn cdf(&self, tag: impl Into<String>) -> Result<CdfRep> {
        let mut cumulative = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        for &m in &self.masses {
            acc += m;
            cumulative.push(acc);
        }
        let n = cumulative.len();
        cumulative[n - 1] = 1.0;
        if n == 1 {
            // pad a zero-mass point so the table has two entries
            return CdfRep::step(
                vec![self.atoms[0] - 1.0, self.atoms[0]],
                vec![0.0, 1.0],
                tag,
            );
        }
        CdfRep::step(self.atoms.clone(), cumulative, tag)
    }

    /// Equal-mass conditional quantile binning of a continuous measure:
    /// `n` atoms at the conditional medians F⁻¹((i+1/2)/n).
    ///
    /// Returns the measure and a Prokhorov discretization error estimate
    /// max(interior bin width, 2/n); the tail bins carry mass 1/n each, so
    /// mass moving farther than the interior widths is at most 2/n.
    pub fn from_quantiles(cdf: &CdfRep, n: usize, cap: usize) -> Result<(Self, f64)> {
        if n > cap {
            return Err(Error::SupportTooLarge { got: n, cap });
        }
        let n = n.max(2);
        let mut pairs = Vec::with_capacity(n);
        for i in 0..n {
            let u = (i as f64 + 0.5) / n as f64;
            pairs.push((cdf.quantile(u)?, 1.0 / n as f64));
        }
        // merge numerically coincident atoms
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(n);
        for (x, m) in pairs {
            match merged.last_mut() {
                Some(last) if (last.0 - x).abs() < 1e-12 => last.1 += m,
                _ => merged.push((x, m)),
            }
        }
        let total: f64 = merged.iter().map(|p| p.1).sum();
        for p in &mut merged {
            p.1 /= total;
        }
        let mut width: f64 = 0.0;
        for i in 1..n - 1 {
            let lo = cdf.quantile(i as f64 / n as f64)?;
            let hi = cdf.quantile((i + 1) as f64 / n as f64)?;
            width = width.max(hi - lo);
        }
        let err = width.max(2.0 / n as f64);
        Ok((Self::new(merged)?, err))
    }
}

fn check_same_reference(f: &RelativeDensity, g: &RelativeDensity) -> Result<()> {
    if f.reference() != g.reference() {
        return Err(Error::ReferenceMismatch(
            f.reference().as_str(),
            g.reference().as_str(),
        ));
    }
    Ok(())
}

/// ∫ |f - g| dref by trapezoid on a dense uniform grid. The integrand has
/// kinks at the density crossings, which a Gauss rule resolves poorly; the
/// uniform rule keeps the error at the h² scale of isolated kinks.
pub(crate) fn l1_reference_distance(
    f: &RelativeDensity,
    g: &RelativeDensity,
    grid: &GaussianGrid,
) -> Result<f64> {
    let m2 = crate::densities::moment(f, grid, 2)?
        .max(crate::densities::moment(g, grid, 2)?);
    let span = (10.0 * m2.sqrt()).clamp(12.0, 40.0);
    let n = 1 << 16;
    let h = 2.0 * span / (n - 1) as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let x = -span + h * i as f64;
        let v = (f.lebesgue_density(x) - g.lebesgue_density(x)).abs();
        let w = if i == 0 || i == n - 1 { h / 2.0 } else { h };
        acc += w * v;
    }
    Ok(acc)
}

/// d_TV(f·dref, g·dref) = ½ ∫ |f - g| dref ∈ [0, 1].
pub fn total_variation(
    f: &RelativeDensity,
    g: &RelativeDensity,
    grid: &GaussianGrid,
) -> Result<f64> {
    check_same_reference(f, g)?;
    Ok(0.5 * l1_reference_distance(f, g, grid)?)
}

/// Hellinger distance (∫ |√f - √g|² dref)^{1/2} ∈ [0, √2].
pub fn hellinger(f: &RelativeDensity, g: &RelativeDensity, grid: &GaussianGrid) -> Result<f64> {
    check_same_reference(f, g)?;
    let v = grid.integrate_fn(|x| {
        let d = f.evaluate(x).max(0.0).sqrt() - g.evaluate(x).max(0.0).sqrt();
        d * d
    });
    Ok(v.sqrt())
}

/// Kolmogorov distance sup |F - G|, scanned on the union grid and refined by
/// a parabolic step through the top node.
pub fn kolmogorov(mu: &CdfRep, nu: &CdfRep) -> f64 {
    let mut xs: Vec<f64> = mu.xs().iter().chain(nu.xs().iter()).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut best = 0.0f64;
    let mut best_idx = 0usize;
    for (i, &x) in xs.iter().enumerate() {
        // at step points both the left limit and the value matter
        let d = (mu.eval(x) - nu.eval(x))
            .abs()
            .max((mu.eval_left(x) - nu.eval_left(x)).abs());
        if d > best {
            best = d;
            best_idx = i;
        }
    }
    // local refinement between the neighbors of the maximizer
    let lo = if best_idx > 0 { xs[best_idx - 1] } else { xs[0] };
    let hi = if best_idx + 1 < xs.len() {
        xs[best_idx + 1]
    } else {
        xs[xs.len() - 1]
    };
    let steps = 32;
    for k in 0..=steps {
        let x = lo + (hi - lo) * k as f64 / steps as f64;
        best = best.max((mu.eval(x) - nu.eval(x)).abs());
    }
    best
}

/// Lévy envelope condition G(x-ε)-ε ≤ F(x) ≤ G(x+ε)+ε for all x, verified on
/// the union grid plus both ε-shifted copies.
fn levy_feasible(mu: &CdfRep, nu: &CdfRep, eps: f64) -> bool {
    let mut xs: Vec<f64> = Vec::with_capacity(3 * (mu.xs().len() + nu.xs().len()));
    for &x in mu.xs().iter().chain(nu.xs().iter()) {
        xs.push(x);
        xs.push(x - eps);
        xs.push(x + eps);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let slack = 1e-12;
    for &x in &xs {
        // the envelope must hold pointwise and in the left-limit sense at
        // every breakpoint (right values pair with right values)
        if nu.eval(x - eps) - eps > mu.eval(x) + slack {
            return false;
        }
        if mu.eval(x) > nu.eval(x + eps) + eps + slack {
            return false;
        }
        if nu.eval_left(x - eps) - eps > mu.eval_left(x) + slack {
            return false;
        }
        if mu.eval_left(x) > nu.eval_left(x + eps) + eps + slack {
            return false;
        }
    }
    true
}

/// Shared-uniform-grid fast path: piecewise-linear CDFs shift by index
/// arithmetic, so each envelope check is O(n) instead of O(n log n).
fn levy_feasible_uniform(xs: &[f64], f: &[f64], g: &[f64], eps: f64) -> bool {
    let h = xs[1] - xs[0];
    let n = xs.len();
    let eval_shifted = |vals: &[f64], i: usize, shift: f64| -> f64 {
        let pos = i as f64 + shift;
        if pos <= 0.0 {
            return vals[0];
        }
        if pos >= (n - 1) as f64 {
            return vals[n - 1];
        }
        let j = pos.floor() as usize;
        let t = pos - j as f64;
        vals[j] + t * (vals[j + 1] - vals[j])
    };
    let s = eps / h;
    let slack = 1e-12;
    for i in 0..n {
        // breakpoints of both sides: the grid and its ±ε shifts
        if eval_shifted(g, i, -s) - eps > f[i] + slack {
            return false;
        }
        if f[i] > eval_shifted(g, i, s) + eps + slack {
            return false;
        }
        if eval_shifted(g, i, 0.0) - eps > eval_shifted(f, i, s) + slack {
            return false;
        }
        if eval_shifted(f, i, -s) > g[i] + eps + slack {
            return false;
        }
    }
    true
}

fn shared_uniform_grid(mu: &CdfRep, nu: &CdfRep) -> bool {
    if mu.kind() != crate::transport::CdfKind::Continuous
        || nu.kind() != crate::transport::CdfKind::Continuous
        || mu.xs().len() != nu.xs().len()
    {
        return false;
    }
    let xs = mu.xs();
    let ys = nu.xs();
    xs[0] == ys[0] && xs[xs.len() - 1] == ys[ys.len() - 1]
}

/// Lévy metric by bisection to 1e-6.
pub fn levy(mu: &CdfRep, nu: &CdfRep) -> f64 {
    let uniform = shared_uniform_grid(mu, nu);
    let feasible = |eps: f64| {
        if uniform {
            levy_feasible_uniform(mu.xs(), mu.values(), nu.values(), eps)
        } else {
            levy_feasible(mu, nu, eps)
        }
    };
    let mut lo = 0.0;
    let mut hi = 1.0 + kolmogorov(mu, nu);
    if feasible(lo + 1e-12) {
        return 0.0;
    }
    while hi - lo > 1e-6 {
        let mid = (lo + hi) / 2.0;
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / 2.0
}

/// Total variation of two finite-support measures: half the mass difference
/// over the union of atoms.
pub fn tv_discrete(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let mut acc = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < mu.len() || j < nu.len() {
        let a = mu.atoms().get(i).copied().unwrap_or(f64::INFINITY);
        let b = nu.atoms().get(j).copied().unwrap_or(f64::INFINITY);
        if (a - b).abs() < 1e-12 {
            acc += (mu.masses()[i] - nu.masses()[j]).abs();
            i += 1;
            j += 1;
        } else if a < b {
            acc += mu.masses()[i];
            i += 1;
        } else {
            acc += nu.masses()[j];
            j += 1;
        }
    }
    acc / 2.0
}

/// Dinic max-flow on a small graph with integer capacities.
struct Dinic {
    to: Vec<usize>,
    cap: Vec<u64>,
    next: Vec<i64>,
    head: Vec<i64>,
    level: Vec<i32>,
    iter: Vec<i64>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Self {
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
            head: vec![-1; n],
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    fn add_edge(&mut self, a: usize, b: usize, c: u64) {
        self.to.push(b);
        self.cap.push(c);
        self.next.push(self.head[a]);
        self.head[a] = (self.to.len() - 1) as i64;
        self.to.push(a);
        self.cap.push(0);
        self.next.push(self.head[b]);
        self.head[b] = (self.to.len() - 1) as i64;
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        let mut queue = std::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            let mut e = self.head[v];
            while e >= 0 {
                let eu = e as usize;
                if self.cap[eu] > 0 && self.level[self.to[eu]] < 0 {
                    self.level[self.to[eu]] = self.level[v] + 1;
                    queue.push_back(self.to[eu]);
                }
                e = self.next[eu];
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, f: u64) -> u64 {
        if v == t {
            return f;
        }
        while self.iter[v] >= 0 {
            let e = self.iter[v] as usize;
            let u = self.to[e];
            if self.cap[e] > 0 && self.level[u] == self.level[v] + 1 {
                let d = self.dfs(u, t, f.min(self.cap[e]));
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            self.iter[v] = self.next[e];
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.iter.copy_from_slice(&self.head);
            loop {
                let f = self.dfs(s, t, u64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }
}

const MASS_SCALE: f64 = 1e12;

/// Strassen feasibility at level ε: a coupling moving all but ε of the mass
/// by at most ε exists iff the max flow through edges {|aᵢ - bⱼ| ≤ ε} reaches
/// 1 - ε. Masses are quantized to 1e-12 for exact flow arithmetic.
fn strassen_feasible(mu: &DiscreteMeasure, nu: &DiscreteMeasure, eps: f64) -> bool {
    let n = mu.len();
    let m = nu.len();
    let source = n + m;
    let sink = n + m + 1;
    let mut dinic = Dinic::new(n + m + 2);
    let quant = |x: f64| (x * MASS_SCALE).round() as u64;
    for (i, &mass) in mu.masses().iter().enumerate() {
        dinic.add_edge(source, i, quant(mass));
    }
    for (j, &mass) in nu.masses().iter().enumerate() {
        dinic.add_edge(n + j, sink, quant(mass));
    }
    for (i, &a) in mu.atoms().iter().enumerate() {
        for (j, &b) in nu.atoms().iter().enumerate() {
            if (a - b).abs() <= eps + 1e-12 {
                dinic.add_edge(i, n + j, u64::MAX / 4);
            }
        }
    }
    let flow = dinic.max_flow(source, sink);
    let needed = ((1.0 - eps) * MASS_SCALE) as u64;
    // a few quanta of slack for the rounding of the atom masses
    flow + (n + m) as u64 >= needed
}

fn max_atom_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let lo = mu.atoms()[0].min(nu.atoms()[0]);
    let hi = mu.atoms()[mu.len() - 1].max(nu.atoms()[nu.len() - 1]);
    hi - lo
}

/// Prokhorov metric on finite supports by bisection over ε with the
/// max-flow feasibility test; accuracy 1e-6.
pub fn prokhorov(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let mut lo = 0.0;
    let mut hi = max_atom_distance(mu, nu).max(1.0) + 1.0;
    if strassen_feasible(mu, nu, 1e-12) {
        return 0.0;
    }
    while hi - lo > 2e-7 {
        let mid = (lo + hi) / 2.0;
        if strassen_feasible(mu, nu, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / 2.0
}

/// Exhaustive oracle: checks μ(B) ≤ ν(B^ε) + ε over every subset B of the
/// support of μ (and symmetrically), by bisection. Exponential in the support
/// size; intended for supports of ≤ 10 atoms.
pub fn prokhorov_subset_oracle(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    fn feasible(mu: &DiscreteMeasure, nu: &DiscreteMeasure, eps: f64) -> bool {
        let n = mu.len();
        for mask in 1u64..(1 << n) {
            let mut mass_mu = 0.0;
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    mass_mu += mu.masses()[i];
                }
            }
            let mut mass_nu_eps = 0.0;
            for (j, &b) in nu.atoms().iter().enumerate() {
                let mut in_ball = false;
                for i in 0..n {
                    if mask & (1 << i) != 0 && (mu.atoms()[i] - b).abs() <= eps + 1e-12 {
                        in_ball = true;
                        break;
                    }
                }
                if in_ball {
                    mass_nu_eps += nu.masses()[j];
                }
            }
            if mass_mu > mass_nu_eps + eps + 1e-12 {
                return false;
            }
        }
        true
    }
    let both = |eps: f64| feasible(mu, nu, eps) && feasible(nu, mu, eps);
    let mut lo = 0.0;
    let mut hi = max_atom_distance(mu, nu).max(1.0) + 1.0;
    if both(1e-12) {
        return 0.0;
    }
    while hi - lo > 2e-7 {
        let mid = (lo + hi) / 2.0;
        if both(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / 2.0
}

/// Random discrete pair with at most `max_atoms` atoms each, for oracle runs.
pub fn random_discrete_pair(
    rng: &mut impl Rng,
    max_atoms: usize,
) -> (DiscreteMeasure, DiscreteMeasure) {
    let draw = |rng: &mut dyn rand::RngCore| {
        let n = rng.gen_range(1..=max_atoms);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                (
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(0.05f64..1.0),
                )
            })
            .collect();
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        for p in &mut pairs {
            p.1 /= total;
        }
        DiscreteMeasure::new(pairs)
    };
    loop {
        if let (Ok(a), Ok(b)) = (draw(rng), draw(rng)) {
            return (a, b);
        }
    }
}

/// All metric values for one pair, plus the comparison-chain margins.
#[derive(Clone, Debug, Serialize)]
pub struct MetricComparison {
    pub tv: f64,
    pub hellinger: f64,
    pub kolmogorov: f64,
    pub levy: f64,
    pub prokhorov: f64,
    pub prokhorov_error: f64,
    pub w1: f64,
    pub w2: f64,
    pub m2_max: f64,
}

/// Evaluate every metric between f·dγ and g·dγ.
///
/// Prokhorov goes through quantile discretization with at most `atom_cap`
/// atoms; its reported error covers the binning.
pub fn metric_comparison_report(
    f: &RelativeDensity,
    g: &RelativeDensity,
    grid: &GaussianGrid,
    cfg: &crate::transport::CdfGrid,
    atom_cap: usize,
) -> Result<MetricComparison> {
    let mu = crate::transport::cdf_of(f, cfg)?;
    let nu = crate::transport::cdf_of(g, cfg)?;
    let (dmu, e1) = DiscreteMeasure::from_quantiles(&mu, atom_cap, atom_cap)?;
    let (dnu, e2) = DiscreteMeasure::from_quantiles(&nu, atom_cap, atom_cap)?;
    let m2f = crate::densities::moment(f, grid, 2)?;
    let m2g = crate::densities::moment(g, grid, 2)?;
    Ok(MetricComparison {
        tv: total_variation(f, g, grid)?,
        hellinger: hellinger(f, g, grid)?,
        kolmogorov: kolmogorov(&mu, &nu),
        levy: levy(&mu, &nu),
        prokhorov: prokhorov(&dmu, &dnu),
        prokhorov_error: e1 + e2,
        w1: wasserstein(&mu, &nu, 1.0)?,
        w2: wasserstein(&mu, &nu, 2.0)?,
        m2_max: m2f.max(m2g),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{make_family, FamilySpec};
    use crate::grid::{build_grid, Reference};
    use crate::transport::{cdf_of, CdfGrid};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gamma_grid() -> GaussianGrid {
        build_grid(Reference::Gamma, 128, 0.0).unwrap()
    }

    fn cfg() -> CdfGrid {
        CdfGrid {
            span: 20.0,
            nodes: 1 << 16,
        }
    }

    #[test]
    fn tv_closed_forms() {
        let g = gamma_grid();
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        let wide = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        let tilt = make_family(&FamilySpec::Tilt { b: 1.0 }, &g).unwrap();
        assert!(total_variation(&one, &one, &g).unwrap() < 1e-12);
        // crossing-point formula: 2(Φ(x₀) - Φ(x₀/2)) with x₀ = √(8 ln 2/3)
        assert_abs_diff_eq!(
            total_variation(&wide, &one, &g).unwrap(),
            0.3226745688347685,
            epsilon = 1e-6
        );
        // mean shift: 2Φ(b/2) - 1
        assert_abs_diff_eq!(
            total_variation(&tilt, &one, &g).unwrap(),
            0.38292492254802624,
            epsilon = 1e-6
        );
    }

    #[test]
    fn hellinger_closed_form_and_l1_l2_comparison() {
        let g = gamma_grid();
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        let wide = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        assert!(hellinger(&one, &one, &g).unwrap() < 1e-12);
        // √(2 - 2√(2σ/(1+σ²))) at σ = 2
        assert_abs_diff_eq!(
            hellinger(&wide, &one, &g).unwrap(),
            0.4595058410947224,
            epsilon = 1e-6
        );
        // h² ≤ ||f-g||₁ ≤ 2h on catalog pairs
        for spec in [
            FamilySpec::Scale { sigma: 1.5 },
            FamilySpec::Tilt { b: 0.8 },
            FamilySpec::Mixture {
                w: 0.4,
                sigma1: 0.8,
                sigma2: 1.3,
            },
        ] {
            let f = make_family(&spec, &g).unwrap();
            let h = hellinger(&f, &one, &g).unwrap();
            let l1 = 2.0 * total_variation(&f, &one, &g).unwrap();
            assert!(h * h <= l1 + 1e-9, "{}", spec.label());
            assert!(l1 <= 2.0 * h + 1e-9, "{}", spec.label());
        }
    }

    #[test]
    fn kolmogorov_closed_form() {
        let g = gamma_grid();
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        let wide = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        let mu = cdf_of(&wide, &cfg()).unwrap();
        let nu = cdf_of(&one, &cfg()).unwrap();
        assert_abs_diff_eq!(kolmogorov(&mu, &nu), 0.16133728441738426, epsilon = 1e-6);
        assert!(kolmogorov(&nu, &nu) < 1e-12);
    }

    #[test]
    fn kolmogorov_of_disjoint_diracs_is_one() {
        let a = DiscreteMeasure::new(vec![(0.0, 1.0)]).unwrap().cdf("d0").unwrap();
        let b = DiscreteMeasure::new(vec![(0.3, 1.0)]).unwrap().cdf("d3").unwrap();
        assert_abs_diff_eq!(kolmogorov(&a, &b), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn levy_of_shifted_diracs() {
        let a = DiscreteMeasure::new(vec![(0.0, 1.0)]).unwrap().cdf("d0").unwrap();
        let b = DiscreteMeasure::new(vec![(0.3, 1.0)]).unwrap().cdf("d3").unwrap();
        assert_abs_diff_eq!(levy(&a, &b), 0.3, epsilon = 1e-5);
        assert_eq!(levy(&a, &a), 0.0);
    }

    #[test]
    fn levy_below_kolmogorov_on_catalog_pairs() {
        let g = gamma_grid();
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        for spec in [
            FamilySpec::Scale { sigma: 2.0 },
            FamilySpec::Tilt { b: 1.0 },
            FamilySpec::Mixture {
                w: 0.3,
                sigma1: 0.7,
                sigma2: 1.5,
            },
        ] {
            let f = make_family(&spec, &g).unwrap();
            let mu = cdf_of(&f, &cfg()).unwrap();
            let nu = cdf_of(&one, &cfg()).unwrap();
            assert!(levy(&mu, &nu) <= kolmogorov(&mu, &nu) + 1e-6, "{}", spec.label());
        }
    }

    #[test]
    fn prokhorov_of_shifted_diracs() {
        let a = DiscreteMeasure::new(vec![(0.0, 1.0)]).unwrap();
        let b = DiscreteMeasure::new(vec![(0.3, 1.0)]).unwrap();
        assert_abs_diff_eq!(prokhorov(&a, &b), 0.3, epsilon = 1e-5);
        assert_eq!(prokhorov(&a, &a), 0.0);
        assert_abs_diff_eq!(prokhorov_subset_oracle(&a, &b), 0.3, epsilon = 1e-5);
    }

    #[test]
    fn prokhorov_matches_subset_oracle_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..40 {
            let (a, b) = random_discrete_pair(&mut rng, 8);
            let fast = prokhorov(&a, &b);
            let slow = prokhorov_subset_oracle(&a, &b);
            assert!(
                (fast - slow).abs() <= 2e-6,
                "trial {trial}: flow {fast} vs subsets {slow}"
            );
        }
    }

    #[test]
    fn prokhorov_metric_axioms_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..15 {
            let (a, b) = random_discrete_pair(&mut rng, 6);
            let (c, _) = random_discrete_pair(&mut rng, 6);
            let dab = prokhorov(&a, &b);
            let dba = prokhorov(&b, &a);
            assert_abs_diff_eq!(dab, dba, epsilon = 2e-6);
            let dac = prokhorov(&a, &c);
            let dcb = prokhorov(&c, &b);
            assert!(dab <= dac + dcb + 5e-6);
        }
    }

    #[test]
    fn levy_and_kolmogorov_metric_axioms_sampled() {
        let g = gamma_grid();
        let specs = [
            FamilySpec::Tilt { b: 0.0 },
            FamilySpec::Scale { sigma: 1.6 },
            FamilySpec::Tilt { b: 0.7 },
        ];
        let cdfs: Vec<_> = specs
            .iter()
            .map(|s| cdf_of(&make_family(s, &g).unwrap(), &cfg()).unwrap())
            .collect();
        for a in &cdfs {
            assert!(levy(a, a) < 1e-6);
            assert!(kolmogorov(a, a) < 1e-10);
        }
        for (i, a) in cdfs.iter().enumerate() {
            for b in cdfs.iter().skip(i + 1) {
                assert_abs_diff_eq!(levy(a, b), levy(b, a), epsilon = 3e-6);
                assert_abs_diff_eq!(kolmogorov(a, b), kolmogorov(b, a), epsilon = 1e-10);
            }
        }
        // triangle inequality on the sampled triple
        let (ab, bc, ac) = (
            levy(&cdfs[0], &cdfs[1]),
            levy(&cdfs[1], &cdfs[2]),
            levy(&cdfs[0], &cdfs[2]),
        );
        assert!(ac <= ab + bc + 5e-6);
        let (kab, kbc, kac) = (
            kolmogorov(&cdfs[0], &cdfs[1]),
            kolmogorov(&cdfs[1], &cdfs[2]),
            kolmogorov(&cdfs[0], &cdfs[2]),
        );
        assert!(kac <= kab + kbc + 1e-9);
    }

    #[test]
    fn quantile_binning_gives_valid_measures() {
        let g = gamma_grid();
        let f = make_family(&FamilySpec::Scale { sigma: 1.5 }, &g).unwrap();
        let cdf = cdf_of(&f, &cfg()).unwrap();
        let (d, err) = DiscreteMeasure::from_quantiles(&cdf, 64, 64).unwrap();
        assert!(d.len() <= 64);
        assert!((d.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(err > 0.0 && err < 1.0);
        assert!(DiscreteMeasure::from_quantiles(&cdf, 128, 64).is_err());
    }

    #[test]
    fn comparison_chain_on_scale_two() {
        let g = gamma_grid();
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        let wide = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        let r = metric_comparison_report(&wide, &one, &g, &cfg(), 64).unwrap();
        // d_L ≤ d_K ≤ d_TV numbers from the closed forms
        assert!(r.levy <= r.kolmogorov + 1e-6);
        assert!(r.kolmogorov <= r.tv + 1e-9);
        assert!(r.kolmogorov <= r.w1.sqrt() + 1e-9);
        // W₁ ≤ 4√M d_K^{1/2} with M = 4
        assert!(r.w1 <= 4.0 * r.m2_max.sqrt() * r.kolmogorov.sqrt() + 1e-9);
        // proxy d_P stays within its discretization budget of the true chain
        assert!(r.levy <= r.prokhorov + r.prokhorov_error + 1e-6);
        assert!(r.prokhorov <= r.tv + r.prokhorov_error + 1e-6);
    }

    #[test]
    fn identical_measures_give_all_zeros() {
        let g = gamma_grid();
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        let r = metric_comparison_report(&one, &one, &g, &cfg(), 64).unwrap();
        assert!(r.tv < 1e-10);
        assert!(r.hellinger < 1e-10);
        assert!(r.kolmogorov < 1e-10);
        assert!(r.levy < 1e-6);
        assert!(r.prokhorov < 1e-6);
        assert!(r.w1 < 1e-8);
    }

    #[test]
    fn reference_mismatch_rejected() {
        let g = gamma_grid();
        let m = build_grid(Reference::M, 64, 0.0).unwrap();
        let a = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        let b = crate::densities::from_fn("m-side", |_| 1.0, &m).unwrap();
        assert!(total_variation(&a, &b, &g).is_err());
        assert!(hellinger(&a, &b, &g).is_err());
    }
}
