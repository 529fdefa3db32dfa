//! Closed-form Gaussian reference values used as independent oracles.
//!
//! Everything here is derived analytically from the N(0,σ²) family and never
//! touches the quadrature code it is used to check.

use statrs::function::erf::erfc;

/// Standard normal CDF Φ(x).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Centered normal density with standard deviation `sigma`.
pub fn normal_pdf(x: f64, sigma: f64) -> f64 {
    (-(x * x) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// CDF of N(0, σ²).
pub fn normal_cdf_sigma(x: f64, sigma: f64) -> f64 {
    normal_cdf(x / sigma)
}

/// Closed forms for the scale family N(0,σ²) against N(0,1).
pub mod scale {
    use super::*;

    /// H = (σ² - 1 - 2 log σ)/2.
    pub fn entropy(sigma: f64) -> f64 {
        (sigma * sigma - 1.0 - 2.0 * sigma.ln()) / 2.0
    }

    /// I = σ²(1 - 1/σ²)² = (σ² - 1)²/σ².
    pub fn fisher(sigma: f64) -> f64 {
        let s2 = sigma * sigma;
        (s2 - 1.0) * (s2 - 1.0) / s2
    }

    pub fn deficit(sigma: f64) -> f64 {
        fisher(sigma) / 2.0 - entropy(sigma)
    }

    /// W₂ = |σ - 1| (quantiles are proportional).
    pub fn w2(sigma: f64) -> f64 {
        (sigma - 1.0).abs()
    }

    /// W₁ = |σ - 1|·E|Z| = |σ - 1|√(2/π).
    pub fn w1(sigma: f64) -> f64 {
        (sigma - 1.0).abs() * (2.0 / std::f64::consts::PI).sqrt()
    }

    /// Density crossing point x₀ of N(0,σ²) and N(0,1): the positive root of
    /// equal densities, x₀² = 2 ln(σ²)·σ²/(σ² - 1) for σ ≠ 1... written via
    /// the direct solve of (1/σ)e^{x²(1-1/σ²)/2} = 1.
    pub fn crossing(sigma: f64) -> f64 {
        (2.0 * sigma.ln() / (1.0 - 1.0 / (sigma * sigma))).sqrt()
    }

    /// d_TV = 2|Φ(x₀) - Φ(x₀/σ)| at the crossing point.
    pub fn tv(sigma: f64) -> f64 {
        if sigma == 1.0 {
            return 0.0;
        }
        let x0 = crossing(sigma);
        2.0 * (normal_cdf(x0) - normal_cdf(x0 / sigma)).abs()
    }

    /// d_K = |Φ(x₀) - Φ(x₀/σ)|; the sup of |F - G| sits at the density crossing.
    pub fn kolmogorov(sigma: f64) -> f64 {
        if sigma == 1.0 {
            return 0.0;
        }
        let x0 = crossing(sigma);
        (normal_cdf(x0) - normal_cdf(x0 / sigma)).abs()
    }

    /// Hellinger distance √(2 - 2√(2σ/(1+σ²))).
    pub fn hellinger(sigma: f64) -> f64 {
        (2.0 - 2.0 * (2.0 * sigma / (1.0 + sigma * sigma)).sqrt()).sqrt()
    }
}

/// d_TV(N(b,1), N(0,1)) = 2Φ(|b|/2) - 1.
pub fn tv_mean_shift(b: f64) -> f64 {
    2.0 * normal_cdf(b.abs() / 2.0) - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn frozen_reference_values() {
        assert_abs_diff_eq!(normal_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(normal_cdf(1.0), 0.8413447460685429, epsilon = 1e-9);
        assert_abs_diff_eq!(scale::entropy(2.0), 0.8068528194400547, epsilon = 1e-15);
        assert_abs_diff_eq!(scale::fisher(2.0), 2.25, epsilon = 1e-15);
        assert_abs_diff_eq!(scale::deficit(2.0), 0.3181471805599453, epsilon = 1e-15);
        assert_abs_diff_eq!(scale::crossing(2.0), 1.3595559868917453, epsilon = 1e-12);
        assert_abs_diff_eq!(scale::tv(2.0), 0.3226745688347685, epsilon = 1e-9);
        assert_abs_diff_eq!(scale::kolmogorov(2.0), 0.16133728441738426, epsilon = 1e-9);
        assert_abs_diff_eq!(scale::hellinger(2.0), 0.4595058410947224, epsilon = 1e-12);
        assert_abs_diff_eq!(scale::w1(2.0), 0.7978845608028654, epsilon = 1e-15);
        assert_abs_diff_eq!(tv_mean_shift(1.0), 0.38292492254802624, epsilon = 1e-9);
    }
}
