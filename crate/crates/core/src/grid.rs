//! Quadrature grids for the three reference measures.
//!
//! * `gamma`: the standard Gaussian measure dγ = (2π)^(-1/2) e^(-x²/2) dx,
//! * `m`: the measure dm = √2 e^(-2πx²) dx (total mass 1, variance 1/(4π)),
//! * `lebesgue`: plain dx on a truncated interval [-span, span].
//!
//! Gauss–Hermite rules back the two probability references: nodes and weights
//! come from the Golub–Welsch eigendecomposition of the Jacobi matrix, then are
//! rescaled to the target weight function. A rule with n nodes integrates
//! polynomials up to degree 2n-1 exactly against its reference. Lebesgue grids
//! are uniform with trapezoid weights; every integrand fed to them in this
//! crate decays like a Gaussian, for which the trapezoid rule is spectrally
//! accurate.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Reference measure a grid integrates against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reference {
    /// Standard Gaussian measure dγ.
    Gamma,
    /// dm = 2^(n/2) e^(-2π|x|²) dx.
    M,
    /// Lebesgue measure on [-span, span].
    Lebesgue,
}

impl Reference {
    pub fn as_str(self) -> &'static str {
        match self {
            Reference::Gamma => "gamma",
            Reference::M => "m",
            Reference::Lebesgue => "lebesgue",
        }
    }
}

/// Minimum node count accepted by [`build_grid`].
pub const MIN_NODES: usize = 8;
/// Above this the extreme Gauss–Hermite weights underflow f64.
pub const MAX_GAUSS_NODES: usize = 350;

/// Immutable quadrature grid: strictly increasing nodes, positive weights.
#[derive(Clone, Debug)]
pub struct GaussianGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    reference: Reference,
    span: f64,
}

impl GaussianGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn reference(&self) -> Reference {
        self.reference
    }

    /// Half-width of the node range.
    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Lebesgue density of the reference measure at `x`.
    pub fn reference_density(&self, x: f64) -> f64 {
        match self.reference {
            Reference::Gamma => (-(x * x) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            Reference::M => std::f64::consts::SQRT_2 * (-2.0 * std::f64::consts::PI * x * x).exp(),
            Reference::Lebesgue => 1.0,
        }
    }

    /// Weights divided by the reference density, i.e. a rule for plain ∫ dx
    /// using this grid's nodes. Only meaningful where the density is far from
    /// underflow, which holds for every node of a Gauss rule by construction.
    pub fn lebesgue_weights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w / self.reference_density(x))
            .collect()
    }

    /// Evaluate `f` on the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    /// ∫ f dref by the quadrature rule.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Orthonormal Hermite values p_0(t), …, p_n(t) for the weight e^(-t²),
/// by the three-term recurrence b_{k+1} p_{k+1} = t p_k - b_k p_{k-1} with
/// b_k = √(k/2) and p_0 = π^{-1/4}.
fn orthonormal_hermite(t: f64, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(std::f64::consts::PI.powf(-0.25));
    if n == 0 {
        return p;
    }
    p.push(t * p[0] / (0.5f64).sqrt());
    for k in 1..n {
        let bk = (k as f64 / 2.0).sqrt();
        let bk1 = ((k + 1) as f64 / 2.0).sqrt();
        let next = (t * p[k] - bk * p[k - 1]) / bk1;
        p.push(next);
    }
    p
}

/// Nodes and weights for the Hermite weight e^(-t²).
///
/// Node estimates come from the Golub–Welsch eigenproblem and are polished
/// with two Newton steps on p_n. Weights use w_i = 1/Σ_{k<n} p_k(t_i)², which
/// keeps full relative accuracy even where the weights underflow toward the
/// f64 floor — the eigenvector-based weights lose all their digits there.
fn hermite_rule(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n - 1 {
        let off = ((i + 1) as f64 / 2.0).sqrt();
        jacobi[(i, i + 1)] = off;
        jacobi[(i + 1, i)] = off;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let mut weights = Vec::with_capacity(n);
    for t in &mut nodes {
        for _ in 0..2 {
            let p = orthonormal_hermite(*t, n);
            // p_n'(t) = √(2n)·p_{n-1}(t)
            let slope = (2.0 * n as f64).sqrt() * p[n - 1];
            if slope != 0.0 {
                *t -= p[n] / slope;
            }
        }
        let p = orthonormal_hermite(*t, n - 1);
        let sum: f64 = p.iter().map(|v| v * v).sum();
        if !sum.is_finite() || sum <= 0.0 {
            return Err(Error::NodeCountTooLarge(n));
        }
        weights.push(1.0 / sum);
    }
    for i in 0..n {
        if weights[i].is_nan() || weights[i] <= 0.0 || !nodes[i].is_finite() {
            return Err(Error::NodeCountTooLarge(n));
        }
        if i > 0 && nodes[i] <= nodes[i - 1] {
            return Err(Error::Normalization(format!(
                "Hermite nodes not strictly increasing at index {i}"
            )));
        }
    }
    Ok((nodes, weights))
}

/// Build a quadrature grid for `reference` with `node_count` nodes.
///
/// `span` is only used for the Lebesgue reference (half-width of the
/// truncation interval); Gauss rules choose their own node range.
pub fn build_grid(reference: Reference, node_count: usize, span: f64) -> Result<GaussianGrid> {
    if node_count < MIN_NODES {
        return Err(Error::NodeCountTooSmall {
            got: node_count,
            min: MIN_NODES,
        });
    }
    match reference {
        Reference::Gamma | Reference::M => {
            if node_count > MAX_GAUSS_NODES {
                return Err(Error::NodeCountTooLarge(node_count));
            }
            let (t, wt) = hermite_rule(node_count)?;
            // dγ: x = √2 t;  dm: x = t/√(2π).  Either way the Hermite
            // weights are divided by √π so the rule has total mass 1.
            let scale = match reference {
                Reference::Gamma => std::f64::consts::SQRT_2,
                Reference::M => 1.0 / (2.0 * std::f64::consts::PI).sqrt(),
                Reference::Lebesgue => unreachable!(),
            };
            let nodes: Vec<f64> = t.iter().map(|&ti| scale * ti).collect();
            let wsum_inv = 1.0 / std::f64::consts::PI.sqrt();
            let weights: Vec<f64> = wt.iter().map(|&wi| wi * wsum_inv).collect();
            let span = nodes.last().copied().unwrap_or(0.0);
            Ok(GaussianGrid {
                nodes,
                weights,
                reference,
                span,
            })
        }
        Reference::Lebesgue => {
            if span.is_nan() || span <= 0.0 || !span.is_finite() {
                return Err(Error::BadSpan(span));
            }
            let n = node_count;
            let h = 2.0 * span / (n - 1) as f64;
            let nodes: Vec<f64> = (0..n).map(|i| -span + h * i as f64).collect();
            let mut weights = vec![h; n];
            weights[0] = h / 2.0;
            weights[n - 1] = h / 2.0;
            Ok(GaussianGrid {
                nodes,
                weights,
                reference,
                span,
            })
        }
    }
}

/// Weighted dot product of `values` against the grid weights.
pub fn integrate(grid: &GaussianGrid, values: &[f64]) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    let mut acc = 0.0;
    for (i, (&w, &v)) in grid.weights.iter().zip(values).enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                index: i,
                x: grid.nodes[i],
            });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// Finite-difference weights for the first derivative at `x0` given `xs`
/// (Fornberg's recurrence). Exact for polynomials of degree < xs.len().
fn fd_weights_first(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let m = 1usize; // first derivative
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = m.min(i);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[1]).collect()
}

/// Derivative estimates at every node from sampled values.
///
/// Uses a five-point sliding stencil (Fornberg weights), which handles the
/// non-uniform spacing of Gauss nodes and is fourth-order on uniform grids;
/// stencils are one-sided at the ends.
pub fn differentiate(grid: &GaussianGrid, values: &[f64]) -> Result<Vec<f64>> {
    let n = grid.len();
    if values.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: values.len(),
        });
    }
    if n < 3 {
        return Err(Error::NodeCountTooSmall { got: n, min: 3 });
    }
    let width = 5.min(n);
    let xs = grid.nodes();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(width / 2).min(n - width);
        let w = fd_weights_first(xs[i], &xs[lo..lo + width]);
        let d: f64 = w
            .iter()
            .zip(&values[lo..lo + width])
            .map(|(&wk, &vk)| wk * vk)
            .sum();
        out.push(d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gamma_grid_total_mass_and_moments() {
        let g = build_grid(Reference::Gamma, 64, 0.0).unwrap();
        assert_abs_diff_eq!(g.integrate_fn(|_| 1.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.integrate_fn(|x| x * x), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.integrate_fn(|x| x.powi(4)), 3.0, epsilon = 1e-11);
    }

    #[test]
    fn m_grid_mass_and_second_moment() {
        let g = build_grid(Reference::M, 64, 0.0).unwrap();
        assert_abs_diff_eq!(g.integrate_fn(|_| 1.0), 1.0, epsilon = 1e-12);
        // ∫ x² dm = 1/(4π)
        let expect = 1.0 / (4.0 * std::f64::consts::PI);
        assert_abs_diff_eq!(g.integrate_fn(|x| x * x), expect, epsilon = 1e-12);
    }

    #[test]
    fn weights_positive_nodes_increasing() {
        for reference in [Reference::Gamma, Reference::M] {
            let g = build_grid(reference, 128, 0.0).unwrap();
            assert!(g.weights().iter().all(|&w| w > 0.0));
            assert!(g.nodes().windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn integrate_validates_input() {
        let g = build_grid(Reference::Gamma, 16, 0.0).unwrap();
        assert!(matches!(
            integrate(&g, &[0.0; 3]),
            Err(Error::LengthMismatch { .. })
        ));
        let mut vals = vec![0.0; 16];
        vals[4] = f64::NAN;
        assert!(matches!(integrate(&g, &vals), Err(Error::NonFinite { .. })));
        let zeros = vec![0.0; 16];
        assert_eq!(integrate(&g, &zeros).unwrap(), 0.0);
    }

    #[test]
    fn build_grid_rejects_bad_arguments() {
        assert!(matches!(
            build_grid(Reference::Gamma, 4, 0.0),
            Err(Error::NodeCountTooSmall { .. })
        ));
        assert!(matches!(
            build_grid(Reference::Gamma, 400, 0.0),
            Err(Error::NodeCountTooLarge(_))
        ));
        assert!(matches!(
            build_grid(Reference::Lebesgue, 32, -1.0),
            Err(Error::BadSpan(_))
        ));
    }

    #[test]
    fn lebesgue_grid_integrates_decaying_function() {
        let g = build_grid(Reference::Lebesgue, 2001, 10.0).unwrap();
        // ∫ e^{-x²} dx = √π; trapezoid on decaying integrands is spectral.
        let val = g.integrate_fn(|x| (-x * x).exp());
        assert_abs_diff_eq!(val, std::f64::consts::PI.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn doubling_nodes_reduces_error_until_floor() {
        // e^x against dγ has exact value e^{1/2}.
        let exact = 0.5f64.exp();
        let mut prev = f64::MAX;
        for n in [8, 16, 32, 64] {
            let g = build_grid(Reference::Gamma, n, 0.0).unwrap();
            let err = (g.integrate_fn(f64::exp) - exact).abs();
            assert!(
                err <= prev || err < 1e-13,
                "error did not shrink: n={n} err={err} prev={prev}"
            );
            prev = err;
        }
        assert!(prev < 1e-13);
    }

    #[test]
    fn differentiate_polynomials_and_exponentials() {
        let g = build_grid(Reference::Gamma, 96, 0.0).unwrap();
        let sq = g.sample(|x| x * x);
        let d = differentiate(&g, &sq).unwrap();
        // derivative of x² is 2x at every node (stencil is exact for quadratics)
        for (i, &x) in g.nodes().iter().enumerate() {
            assert_abs_diff_eq!(d[i], 2.0 * x, epsilon = 1e-8 * (1.0 + x.abs()));
        }
        // node nearest 0.5 has derivative 1.0 of f(x) = x²/... i.e. 2x ≈ 1
        let nearest = g
            .nodes()
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - 0.5).abs().total_cmp(&(b.1 - 0.5).abs()))
            .unwrap()
            .0;
        assert_abs_diff_eq!(d[nearest], 2.0 * g.nodes()[nearest], epsilon = 1e-9);

        let constant = vec![3.5; g.len()];
        let dc = differentiate(&g, &constant).unwrap();
        assert!(dc.iter().all(|&v| v.abs() < 1e-10));

        // e^x on a dense uniform grid matches its own derivative
        let u = build_grid(Reference::Lebesgue, 4001, 3.0).unwrap();
        let ex = u.sample(f64::exp);
        let de = differentiate(&u, &ex).unwrap();
        for i in 10..u.len() - 10 {
            assert_abs_diff_eq!(de[i], ex[i], epsilon = 1e-8);
        }
    }

    #[test]
    fn differentiate_needs_three_nodes() {
        let g = build_grid(Reference::Lebesgue, 8, 1.0).unwrap();
        // a grid of 8 works; the guard is on the value length mismatch path
        assert!(differentiate(&g, &[1.0; 8]).is_ok());
        assert!(differentiate(&g, &[1.0; 7]).is_err());
    }

    #[test]
    fn fundamental_theorem_on_a_bump() {
        // d/dx of a compactly supported bump integrates back to ~0 difference
        let g = build_grid(Reference::Lebesgue, 4001, 3.0).unwrap();
        let bump = |x: f64| {
            if x.abs() < 1.0 {
                (-1.0 / (1.0 - x * x)).exp()
            } else {
                0.0
            }
        };
        let vals = g.sample(bump);
        let d = differentiate(&g, &vals).unwrap();
        let total = integrate(&g, &d).unwrap();
        // boundary values are both zero, so ∫ f' dx = 0
        assert_abs_diff_eq!(total, 0.0, epsilon = 1e-9);
    }
}
