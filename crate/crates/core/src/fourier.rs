//! The Fourier–Wiener transform 𝒲 = U ∘ ℱ ∘ U* on L²(dm).
//!
//! U maps L²(dx) onto L²(dm) by Uh(x) = 2^{-1/4} e^{πx²} h(x); its inverse
//! U* multiplies by 2^{1/4} e^{-πx²}. The Fourier transform uses the
//! e^{-2πiξx} convention, under which e^{-πx²} is a fixed point. 𝒲 is
//! unitary on L²(dm) and fixes the constant function.
//!
//! The transform is computed by direct O(N²) quadrature on the m-grid. The
//! final multiplication by e^{πξ²} amplifies quadrature noise in the tails,
//! so the output is truncated where the amplified error estimate exceeds a
//! relative 1e-8; the dm-mass beyond the cutoff is recorded on the output as
//! `tail_bound`. The measure dm has standard deviation 1/√(4π) ≈ 0.28, so
//! the discarded region carries on the order of 1e-15 of the mass.

use crate::error::{Error, Result};
use crate::functionals::{carlen_deficit, xlogx};
use crate::grid::{differentiate, GaussianGrid, Reference};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// A (possibly complex) function sampled on an m-reference grid.
#[derive(Clone)]
pub struct DmFunction {
    grid: Arc<GaussianGrid>,
    values: Vec<Complex64>,
    deriv: Option<Vec<Complex64>>,
    /// dm-mass outside the trusted region of a transform output (0 for inputs).
    tail_bound: f64,
    label: String,
}

impl std::fmt::Debug for DmFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DmFunction")
            .field("label", &self.label)
            .field("len", &self.values.len())
            .field("tail_bound", &self.tail_bound)
            .finish()
    }
}

impl DmFunction {
    pub fn new(
        grid: Arc<GaussianGrid>,
        values: Vec<Complex64>,
        deriv: Option<Vec<Complex64>>,
        label: String,
    ) -> Result<Self> {
        if grid.reference() != Reference::M {
            return Err(Error::ReferenceMismatch("m", grid.reference().as_str()));
        }
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(d) = &deriv {
            if d.len() != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    got: d.len(),
                });
            }
        }
        Ok(Self {
            grid,
            values,
            deriv,
            tail_bound: 0.0,
            label,
        })
    }

    /// Sample a real function on the grid.
    pub fn from_real_fn(
        grid: Arc<GaussianGrid>,
        f: impl Fn(f64) -> f64,
        df: Option<impl Fn(f64) -> f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let values = grid
            .nodes()
            .iter()
            .map(|&x| Complex64::new(f(x), 0.0))
            .collect();
        let deriv = df.map(|d| {
            grid.nodes()
                .iter()
                .map(|&x| Complex64::new(d(x), 0.0))
                .collect()
        });
        Self::new(grid, values, deriv, label.into())
    }

    pub fn grid(&self) -> &Arc<GaussianGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// ∫ |f|² dm by quadrature.
    pub fn norm_m_squared(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(&w, v)| w * v.norm_sqr())
            .sum()
    }

    /// True when the imaginary part is negligible everywhere.
    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    /// Derivative samples: analytic when attached, finite differences of the
    /// real and imaginary parts otherwise.
    pub fn derivative_values(&self) -> Result<Vec<Complex64>> {
        if let Some(d) = &self.deriv {
            return Ok(d.clone());
        }
        let re: Vec<f64> = self.values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = self.values.iter().map(|v| v.im).collect();
        let dre = differentiate(&self.grid, &re)?;
        let dim = differentiate(&self.grid, &im)?;
        Ok(dre
            .into_iter()
            .zip(dim)
            .map(|(a, b)| Complex64::new(a, b))
            .collect())
    }

    /// Rescale values so that ∫|f|² dm = 1.
    pub fn normalized(mut self) -> Result<Self> {
        let n2 = self.norm_m_squared();
        if n2.is_nan() || n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::Normalization(format!("L2(dm) mass {n2}")));
        }
        let s = 1.0 / n2.sqrt();
        for v in &mut self.values {
            *v *= s;
        }
        if let Some(d) = &mut self.deriv {
            for v in d {
                *v *= s;
            }
        }
        Ok(self)
    }
}

/// U* f: multiply by 2^{1/4} e^{-πx²}, landing in L²(dx).
///
/// Returns samples at the grid nodes. The map is unitary:
/// ‖U*f‖_{L²(dx)} = ‖f‖_{L²(dm)}.
pub fn u_star(f: &DmFunction) -> Vec<Complex64> {
    f.grid()
        .nodes()
        .iter()
        .zip(f.values())
        .map(|(&x, v)| v * 2f64.powf(0.25) * (-PI * x * x).exp())
        .collect()
}

/// ‖h‖_{L²(dx)} for samples on the grid nodes.
pub fn l2_dx_norm(grid: &GaussianGrid, h: &[Complex64]) -> f64 {
    grid.lebesgue_weights()
        .iter()
        .zip(h)
        .map(|(&w, v)| w * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Continuous Fourier transform ĥ(ξ) = ∫ e^{-2πiξx} h(x) dx by direct
/// quadrature, for h sampled on `grid` and decaying like a Gaussian.
pub fn fourier_quadrature(grid: &GaussianGrid, h: &[Complex64], xis: &[f64]) -> Result<Vec<Complex64>> {
    if h.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: h.len(),
        });
    }
    let wleb = grid.lebesgue_weights();
    let weighted: Vec<Complex64> = wleb.iter().zip(h).map(|(&w, v)| w * v).collect();
    let mut out = Vec::with_capacity(xis.len());
    for &xi in xis {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, wv) in grid.nodes().iter().zip(&weighted) {
            let phase = -2.0 * PI * xi * x;
            acc += wv * Complex64::new(phase.cos(), phase.sin());
        }
        out.push(acc);
    }
    Ok(out)
}

/// |‖ĥ‖₂ - ‖h‖₂| for transforms evaluated on the same grid.
pub fn plancherel_drift(grid: &GaussianGrid, h: &[Complex64], hhat: &[Complex64]) -> f64 {
    (l2_dx_norm(grid, h) - l2_dx_norm(grid, hhat)).abs()
}

/// The Fourier–Wiener transform 𝒲f = U ℱ U* f.
///
/// Fails with [`Error::NormDrift`] if unitarity is lost beyond `1e-6` after
/// accounting for the reported tail mass.
pub fn wiener_transform(f: &DmFunction) -> Result<DmFunction> {
    let norm_in = f.norm_m_squared();
    if (norm_in - 1.0).abs() > 1e-6 {
        return Err(Error::Normalization(format!(
            "input not normalized in L2(dm): {norm_in}"
        )));
    }
    let grid = f.grid();
    let h = u_star(f);
    // absolute error scale of the direct quadrature
    let l1: f64 = grid
        .lebesgue_weights()
        .iter()
        .zip(&h)
        .map(|(&w, v)| (w * v).norm())
        .sum();
    let eps_ft = 1e-15 * l1.max(f64::MIN_POSITIVE);
    let thresh = 1e8 * eps_ft;
    let hhat = fourier_quadrature(grid, &h, grid.nodes())?;
    // trust ξ out to the last node where |ĥ| clears the noise by 1e8, i.e.
    // where the e^{πξ²}-amplified value still carries ~8 digits; interior
    // dips of ĥ below the threshold are harmless because the dm weight
    // cancels the amplification in every weighted quantity
    let cutoff = grid
        .nodes()
        .iter()
        .zip(&hhat)
        .filter(|(_, v)| v.norm() >= thresh)
        .map(|(&xi, _)| xi.abs())
        .fold(0.0f64, f64::max);
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (j, &xi) in grid.nodes().iter().enumerate() {
        if xi.abs() <= cutoff {
            values[j] = hhat[j] * 2f64.powf(-0.25) * (PI * xi * xi).exp();
        }
    }
    // beyond the cutoff |ĥ| ≤ thresh, so |𝒲f|²·(dm density) ≤ thresh²/√2
    // pointwise; integrate that envelope over the discarded range
    let x_end = grid.span();
    let tail_bound = thresh * thresh * (2.0 * (x_end - cutoff).max(0.0) + 1.0)
        + grid
            .weights()
            .iter()
            .enumerate()
            .filter(|(j, _)| grid.nodes()[*j].abs() > cutoff)
            .map(|(_, &w)| w)
            .sum::<f64>()
            * thresh
            * thresh;
    let out = DmFunction {
        grid: grid.clone(),
        values,
        deriv: None,
        tail_bound,
        label: format!("wiener({})", f.label()),
    };
    let norm_out = out.norm_m_squared();
    if (norm_out - 1.0).abs() > 1e-6 + tail_bound {
        return Err(Error::NormDrift((norm_out - 1.0).abs()));
    }
    Ok(out)
}

/// E = ∫ |𝒲f|² log |𝒲f|² dm, the relative entropy of |𝒲f|² dm against dm.
pub fn wiener_entropy(f: &DmFunction) -> Result<f64> {
    let wf = wiener_transform(f)?;
    let grid = wf.grid();
    let mut acc = 0.0;
    for (&w, v) in grid.weights().iter().zip(wf.values()) {
        acc += w * xlogx(v.norm_sqr());
    }
    Ok(acc)
}

/// Both sides of the second-moment/gradient bound
/// 2π∫|x|²dm - 2π∫|x|²|f|²dm + (1/2π)∫|f'|²dm ≤ 2√(πn)·δ_c(f)^{1/2} + δ_c(f).
#[derive(Clone, Debug, Serialize)]
pub struct GradientMomentSides {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub deficit_c: f64,
}

pub fn gradient_moment_sides(f: &DmFunction) -> Result<GradientMomentSides> {
    if !f.is_real(1e-9) {
        return Err(Error::InvalidParameter {
            name: "f",
            value: 0.0,
            reason: "the bound requires a real-valued function",
        });
    }
    let grid = f.grid();
    let m2_dm = grid.integrate_fn(|x| x * x);
    let m2_f: f64 = grid
        .weights()
        .iter()
        .zip(grid.nodes())
        .zip(f.values())
        .map(|((&w, &x), v)| w * x * x * v.norm_sqr())
        .sum();
    let derivs = f.derivative_values()?;
    let grad: f64 = grid
        .weights()
        .iter()
        .zip(&derivs)
        .map(|(&w, d)| w * d.norm_sqr())
        .sum();
    let dc = carlen_deficit(f)?;
    let lhs = 2.0 * PI * (m2_dm - m2_f) + grad / (2.0 * PI);
    let rhs = 2.0 * PI.sqrt() * dc.max(0.0).sqrt() + dc;
    Ok(GradientMomentSides {
        lhs,
        rhs,
        margin: rhs - lhs,
        deficit_c: dc,
    })
}

/// ∫ |f|² e^{-(2π-ε)x²} dx, the growth functional controlling weak
/// L²(dm)-stability; compare against a configured cap M.
pub fn growth_functional(f: &DmFunction, epsilon: f64) -> Result<f64> {
    if epsilon.is_nan() || epsilon <= 0.0 || epsilon >= 2.0 * PI {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            reason: "need 0 < epsilon < 2π",
        });
    }
    let grid = f.grid();
    let val: f64 = grid
        .lebesgue_weights()
        .iter()
        .zip(grid.nodes())
        .zip(f.values())
        .map(|((&w, &x), v)| w * v.norm_sqr() * (-(2.0 * PI - epsilon) * x * x).exp())
        .sum();
    if !val.is_finite() {
        return Err(Error::Divergent("growth functional".into()));
    }
    Ok(val)
}

/// ‖f - 1‖_{L²(dm)}, the distance tracked by the weak-stability diagnostics.
pub fn l2_dm_distance_to_one(f: &DmFunction) -> f64 {
    f.grid()
        .weights()
        .iter()
        .zip(f.values())
        .map(|(&w, v)| w * (v - Complex64::new(1.0, 0.0)).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
