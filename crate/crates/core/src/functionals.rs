//! Information functionals of a density relative to dγ.
//!
//! Entropy H(f) = ∫ f log f dγ, Fisher information I(f) = ∫ |f'|²/f dγ, and
//! the LSI deficit δ(f) = I(f)/2 - H(f) ≥ 0, which vanishes exactly on the
//! exponential tilts e^{bx - b²/2}. The Carlen deficit δ_c lives on L²(dm)
//! and is tied back to δ through the rescaling u_f(x) = f(2√π x)^{1/2},
//! which satisfies δ_c(u_f) = δ(f).

use crate::densities::{ProductDensity, RelativeDensity};
use crate::error::{Error, Result};
use crate::fourier::DmFunction;
use crate::grid::{differentiate, GaussianGrid, Reference};
use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

/// x log x with the 0·log 0 = 0 convention.
pub(crate) fn xlogx(v: f64) -> f64 {
    if v > 0.0 {
        v * v.ln()
    } else {
        0.0
    }
}

/// Relative entropy H(f) = ∫ f log f dγ.
pub fn entropy(f: &RelativeDensity, grid: &GaussianGrid) -> Result<f64> {
    let mut acc = 0.0;
    for (&x, &w) in grid.nodes().iter().zip(grid.weights()) {
        let v = f.evaluate(x);
        let term = xlogx(v);
        if !term.is_finite() {
            return Err(Error::NonFinite { index: 0, x });
        }
        acc += w * term;
    }
    Ok(acc)
}

/// Derivative samples for f on the grid: analytic when available, otherwise
/// finite differences on the node values.
fn derivative_samples(f: &RelativeDensity, grid: &GaussianGrid) -> Result<Vec<f64>> {
    if f.has_analytic_derivative() {
        Ok(grid.sample(|x| f.derivative(x).unwrap()))
    } else {
        let vals = grid.sample(|x| f.evaluate(x));
        differentiate(grid, &vals)
    }
}

/// Fisher information I(f) = ∫ |f'|²/f dγ = 4 ∫ |(√f)'|² dγ.
///
/// Nodes where f is below a relative floor contribute through the √f form,
/// which stays finite when f and f' vanish together.
pub fn fisher_information(f: &RelativeDensity, grid: &GaussianGrid) -> Result<f64> {
    let vals = grid.sample(|x| f.evaluate(x));
    let derivs = derivative_samples(f, grid)?;
    // absolute floor: densities this small only matter through the √f form
    let floor = 1e-250;
    let mut sqrt_derivs: Option<Vec<f64>> = None;
    let mut acc = 0.0;
    for i in 0..grid.len() {
        let contrib = if vals[i] > floor {
            // (f'/f)²·f keeps the one huge factor unsquared
            let r = derivs[i] / vals[i];
            r * r * vals[i]
        } else {
            let sd = match &sqrt_derivs {
                Some(v) => v[i],
                None => {
                    let s: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
                    let d = differentiate(grid, &s)?;
                    let out = d[i];
                    sqrt_derivs = Some(d);
                    out
                }
            };
            4.0 * sd * sd
        };
        if !contrib.is_finite() {
            return Err(Error::NonFinite {
                index: i,
                x: grid.nodes()[i],
            });
        }
        acc += grid.weights()[i] * contrib;
    }
    Ok(acc)
}

/// LSI deficit δ(f) = I(f)/2 - H(f).
pub fn lsi_deficit(f: &RelativeDensity, grid: &GaussianGrid) -> Result<f64> {
    Ok(fisher_information(f, grid)? / 2.0 - entropy(f, grid)?)
}

/// L^p distance to the constant density: (∫ |f-1|^p dγ)^{1/p}.
///
/// Integrated with trapezoid on a dense uniform grid: the integrand has
/// kinks wherever f crosses 1, which defeats the Gauss rule.
pub fn lp_distance_to_one(f: &RelativeDensity, grid: &GaussianGrid, p: f64) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "need p >= 1",
        });
    }
    let m2 = crate::densities::moment(f, grid, 2)?;
    let span = (10.0 * m2.sqrt()).clamp(12.0, 40.0);
    let n = 1 << 16;
    let h = 2.0 * span / (n - 1) as f64;
    let mut val = 0.0;
    for i in 0..n {
        let x = -span + h * i as f64;
        let gamma = (-(x * x) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let w = if i == 0 || i == n - 1 { h / 2.0 } else { h };
        val += w * (f.evaluate(x) - 1.0).abs().powf(p) * gamma;
    }
    if !val.is_finite() || val > 1e12 {
        return Err(Error::Divergent(format!("||f-1||_p^p = {val}")));
    }
    Ok(val.powf(1.0 / p))
}

/// ∫ |f|^q dγ, with a divergence guard for heavy scale tails.
pub fn lp_power_integral(f: &RelativeDensity, grid: &GaussianGrid, q: f64) -> Result<f64> {
    if let Some(family) = f.family() {
        if family.lp_power_finite(q) == Some(false) {
            return Err(Error::Divergent(format!(
                "∫ f^{q} dγ diverges for {}",
                f.label()
            )));
        }
    }
    let val = grid.integrate_fn(|x| f.evaluate(x).powf(q));
    if !val.is_finite() || val > 1e12 {
        return Err(Error::Divergent(format!("∫ f^{q} dγ = {val}")));
    }
    Ok(val)
}

/// Key scalar functionals of one density, as reported by the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionalReport {
    pub entropy: f64,
    pub fisher: f64,
    pub deficit: f64,
    pub m2: f64,
    pub l1_to_one: f64,
}

/// Evaluate the full report for a density.
pub fn report(f: &RelativeDensity, grid: &GaussianGrid) -> Result<FunctionalReport> {
    let h = entropy(f, grid)?;
    let i = fisher_information(f, grid)?;
    Ok(FunctionalReport {
        entropy: h,
        fisher: i,
        deficit: i / 2.0 - h,
        m2: crate::densities::moment(f, grid, 2)?,
        l1_to_one: lp_distance_to_one(f, grid, 1.0)?,
    })
}

/// Carlen deficit δ_c(f) = (1/2π) ∫ |f'|² dm - ∫ |f|² log |f|² dm for f
/// normalized in L²(dm).
pub fn carlen_deficit(f: &DmFunction) -> Result<f64> {
    let norm = f.norm_m_squared();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Normalization(format!(
            "||f||_{{L2(dm)}}^2 = {norm}, need 1 within 1e-8"
        )));
    }
    let grid = f.grid();
    let derivs = f.derivative_values()?;
    let mut grad = 0.0;
    let mut ent = 0.0;
    for (i, &w) in grid.weights().iter().enumerate() {
        grad += w * derivs[i].norm_sqr();
        ent += w * xlogx(f.values()[i].norm_sqr());
    }
    Ok(grad / (2.0 * std::f64::consts::PI) - ent)
}

/// Rescale a density over dγ into L²(dm): u_f(x) = f(2√π x)^{1/2}.
///
/// The output is normalized in L²(dm) and satisfies δ_c(u_f) = δ(f).
pub fn rescale_to_dm(f: &RelativeDensity, m_grid: &Arc<GaussianGrid>) -> Result<DmFunction> {
    if m_grid.reference() != Reference::M {
        return Err(Error::ReferenceMismatch("m", m_grid.reference().as_str()));
    }
    let c = 2.0 * std::f64::consts::PI.sqrt();
    let values: Vec<Complex64> = m_grid
        .nodes()
        .iter()
        .map(|&x| Complex64::new(f.evaluate(c * x).max(0.0).sqrt(), 0.0))
        .collect();
    let deriv = if f.has_analytic_derivative() {
        // u'(x) = √π f'(cx) / √(f(cx))
        let d: Vec<Complex64> = m_grid
            .nodes()
            .iter()
            .map(|&x| {
                let y = c * x;
                let fv = f.evaluate(y);
                let fd = f.derivative(y).unwrap();
                let v = if fv > 0.0 {
                    std::f64::consts::PI.sqrt() * fd / fv.sqrt()
                } else {
                    0.0
                };
                Complex64::new(v, 0.0)
            })
            .collect();
        Some(d)
    } else {
        None
    };
    let out = DmFunction::new(
        m_grid.clone(),
        values,
        deriv,
        format!("rescaled({})", f.label()),
    )?;
    let norm = out.norm_m_squared();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Normalization(format!(
            "rescaled function has L2(dm) mass {norm}"
        )));
    }
    Ok(out)
}

/// Deficit of a product density: per-factor deficits and their sum.
///
/// The total is the sum of the parts by construction, mirroring the exact
/// additivity δ(Πfᵢ) = Σ δ(fᵢ).
pub fn product_deficit(
    p: &ProductDensity,
    grid: &GaussianGrid,
) -> Result<(f64, Vec<f64>)> {
    let mut parts = Vec::with_capacity(p.dimension());
    for f in p.factors() {
        parts.push(lsi_deficit(f, grid)?);
    }
    let total = parts.iter().sum();
    Ok((total, parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{make_family, FamilySpec};
    use crate::grid::build_grid;
    use approx::assert_abs_diff_eq;

    fn gamma_grid() -> GaussianGrid {
        build_grid(Reference::Gamma, 128, 0.0).unwrap()
    }

    fn m_grid() -> Arc<GaussianGrid> {
        Arc::new(build_grid(Reference::M, 128, 0.0).unwrap())
    }

    const H_SCALE2: f64 = 0.8068528194400547; // (σ²-1-2lnσ)/2 at σ=2
    const I_SCALE2: f64 = 2.25; // σ²(1-1/σ²)² at σ=2
    const D_SCALE2: f64 = 0.3181471805599453;

    #[test]
    fn entropy_closed_forms() {
        let g = gamma_grid();
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        assert_abs_diff_eq!(entropy(&one, &g).unwrap(), 0.0, epsilon = 1e-12);
        let s = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        assert_abs_diff_eq!(entropy(&s, &g).unwrap(), H_SCALE2, epsilon = 1e-9);
        let t = make_family(&FamilySpec::Tilt { b: 1.0 }, &g).unwrap();
        assert_abs_diff_eq!(entropy(&t, &g).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn fisher_closed_forms() {
        let g = gamma_grid();
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        assert_abs_diff_eq!(fisher_information(&one, &g).unwrap(), 0.0, epsilon = 1e-12);
        let s = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        assert_abs_diff_eq!(fisher_information(&s, &g).unwrap(), I_SCALE2, epsilon = 1e-9);
        let t = make_family(&FamilySpec::Tilt { b: 1.0 }, &g).unwrap();
        assert_abs_diff_eq!(fisher_information(&t, &g).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn closed_form_agreement_across_sigma_sweep() {
        let g = gamma_grid();
        for sigma in [0.5, 0.8, 1.25, 2.0] {
            let spec = FamilySpec::Scale { sigma };
            let f = make_family(&spec, &g).unwrap();
            assert_abs_diff_eq!(
                entropy(&f, &g).unwrap(),
                spec.entropy().unwrap(),
                epsilon = 1e-6
            );
            assert_abs_diff_eq!(
                fisher_information(&f, &g).unwrap(),
                spec.fisher().unwrap(),
                epsilon = 1e-6
            );
        }
    }

    #[test]
    fn deficit_vanishes_on_tilts() {
        let g = gamma_grid();
        for i in 0..21 {
            let b = -2.0 + 0.2 * i as f64;
            let f = make_family(&FamilySpec::Tilt { b }, &g).unwrap();
            assert!(lsi_deficit(&f, &g).unwrap().abs() <= 1e-6, "b = {b}");
        }
    }

    #[test]
    fn deficit_scale_two() {
        let g = gamma_grid();
        let s = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        assert_abs_diff_eq!(lsi_deficit(&s, &g).unwrap(), D_SCALE2, epsilon = 1e-9);
    }

    #[test]
    fn l1_distance_closed_forms() {
        let g = gamma_grid();
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        assert!(lp_distance_to_one(&one, &g, 1.0).unwrap() < 1e-10);
        assert!(lp_distance_to_one(&one, &g, 2.0).unwrap() < 1e-10);
        // 2 d_TV(N(0,4), N(0,1)) = 2·2(Φ(x₀) - Φ(x₀/2)), x₀ = √(8 ln 2 / 3)
        let s = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        assert_abs_diff_eq!(
            lp_distance_to_one(&s, &g, 1.0).unwrap(),
            0.645349137669537,
            epsilon = 1e-6
        );
        // 2 d_TV(N(1,1), N(0,1)) = 2(2Φ(1/2) - 1)
        let t = make_family(&FamilySpec::Tilt { b: 1.0 }, &g).unwrap();
        assert_abs_diff_eq!(
            lp_distance_to_one(&t, &g, 1.0).unwrap(),
            0.7658498450960525,
            epsilon = 1e-6
        );
    }

    #[test]
    fn divergent_power_integral_is_guarded() {
        let g = gamma_grid();
        let s = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        // f³ has tails e^{9x²/8} vs e^{-x²/2}: divergent
        assert!(lp_power_integral(&s, &g, 3.0).is_err());
        let narrow = make_family(&FamilySpec::Scale { sigma: 1.1 }, &g).unwrap();
        assert!(lp_power_integral(&narrow, &g, 3.0).is_ok());
    }

    #[test]
    fn rescaling_preserves_the_deficit() {
        let g = gamma_grid();
        let m = m_grid();
        for spec in [
            FamilySpec::Scale { sigma: 2.0 },
            FamilySpec::Tilt { b: 0.7 },
            FamilySpec::Mixture {
                w: 0.4,
                sigma1: 0.8,
                sigma2: 1.3,
            },
        ] {
            let f = make_family(&spec, &g).unwrap();
            let u = rescale_to_dm(&f, &m).unwrap();
            let dc = carlen_deficit(&u).unwrap();
            let d = lsi_deficit(&f, &g).unwrap();
            assert_abs_diff_eq!(dc, d, epsilon = 1e-4);
        }
    }

    #[test]
    fn rescaled_tilt_is_in_the_carlen_equality_class() {
        let g = gamma_grid();
        let m = m_grid();
        let f = make_family(&FamilySpec::Tilt { b: 0.7 }, &g).unwrap();
        let u = rescale_to_dm(&f, &m).unwrap();
        assert!(carlen_deficit(&u).unwrap().abs() <= 1e-4);
    }

    #[test]
    fn carlen_deficit_nonnegative_on_rescaled_mixture() {
        let g = gamma_grid();
        let m = m_grid();
        let f = make_family(
            &FamilySpec::Mixture {
                w: 0.5,
                sigma1: 0.7,
                sigma2: 1.3,
            },
            &g,
        )
        .unwrap();
        let u = rescale_to_dm(&f, &m).unwrap();
        assert!(carlen_deficit(&u).unwrap() >= -1e-9);
    }

    #[test]
    fn constant_function_has_zero_carlen_deficit() {
        let m = m_grid();
        let ones = vec![Complex64::new(1.0, 0.0); m.len()];
        let zeros = vec![Complex64::new(0.0, 0.0); m.len()];
        let f = DmFunction::new(m, ones, Some(zeros), "one".into()).unwrap();
        assert_abs_diff_eq!(carlen_deficit(&f).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn product_deficit_additivity() {
        let g = gamma_grid();
        let a = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        let b = make_family(&FamilySpec::Tilt { b: 1.0 }, &g).unwrap();
        let p = crate::densities::tensor(vec![a.clone(), b]).unwrap();
        let (total, parts) = product_deficit(&p, &g).unwrap();
        let direct: f64 = parts.iter().sum();
        assert_eq!(total, direct);
        assert_abs_diff_eq!(total, D_SCALE2, epsilon = 1e-6);

        let p2 = crate::densities::tensor(vec![a.clone(), a]).unwrap();
        let (t2, _) = product_deficit(&p2, &g).unwrap();
        assert_abs_diff_eq!(t2, 2.0 * D_SCALE2, epsilon = 1e-6);
    }
}
