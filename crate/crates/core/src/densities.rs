//! Density families relative to the standard Gaussian measure.
//!
//! A [`RelativeDensity`] is a nonnegative function f with ∫ f dγ = 1, so that
//! f dγ is a probability measure. Families carry analytic derivatives (used by
//! the Fisher-information integrand) and closed-form functionals when known.
//! Normalization is always re-applied numerically against the supplied grid so
//! that downstream quadratures see a self-consistent total mass.

use crate::error::{Error, Result};
use crate::grid::{GaussianGrid, Reference};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Shared evaluator type for density closures.
pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type DynFn = DensityFn;

/// Parameterized density family descriptor. Serializable so that CLI config
/// files can express catalogs as tagged records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    /// f(x) = e^{bx - b²/2} (density of N(b,1) relative to dγ; LSI optimizer).
    Tilt { b: f64 },
    /// Density of N(0, σ²) relative to dγ.
    Scale { sigma: f64 },
    /// Centered two-component scale mixture w·N(0,σ₁²) + (1-w)·N(0,σ₂²).
    Mixture { w: f64, sigma1: f64, sigma2: f64 },
    /// Multiplicative smooth bump 1 + eps·ψ((x-center)/width), renormalized.
    Bump { eps: f64, center: f64, width: f64 },
    /// α + (1-α)·shape, which keeps f ≥ α pointwise.
    Floor { alpha: f64, shape: Box<FamilySpec> },
}

impl FamilySpec {
    /// Short human-readable label used in reports.
    pub fn label(&self) -> String {
        match self {
            FamilySpec::Tilt { b } => format!("tilt(b={b})"),
            FamilySpec::Scale { sigma } => format!("scale(sigma={sigma})"),
            FamilySpec::Mixture { w, sigma1, sigma2 } => {
                format!("mixture(w={w},s1={sigma1},s2={sigma2})")
            }
            FamilySpec::Bump { eps, center, width } => {
                format!("bump(eps={eps},c={center},w={width})")
            }
            FamilySpec::Floor { alpha, shape } => format!("floor(a={alpha},{})", shape.label()),
        }
    }

    /// Closed-form relative entropy, when the family has one.
    pub fn entropy(&self) -> Option<f64> {
        match self {
            FamilySpec::Tilt { b } => Some(b * b / 2.0),
            FamilySpec::Scale { sigma } => Some((sigma * sigma - 1.0 - 2.0 * sigma.ln()) / 2.0),
            _ => None,
        }
    }

    /// Closed-form Fisher information, when the family has one.
    pub fn fisher(&self) -> Option<f64> {
        match self {
            FamilySpec::Tilt { b } => Some(b * b),
            FamilySpec::Scale { sigma } => {
                let s2 = sigma * sigma;
                Some((s2 - 1.0) * (s2 - 1.0) / s2)
            }
            _ => None,
        }
    }

    /// Closed-form LSI deficit, when the family has one.
    pub fn deficit(&self) -> Option<f64> {
        match (self.fisher(), self.entropy()) {
            (Some(i), Some(h)) => Some(i / 2.0 - h),
            _ => None,
        }
    }

    /// Whether ∫ f^q dγ is finite for this family (None when unknown).
    /// Scale-type tails e^{x²(1-1/σ²)/2} integrate against dγ iff
    /// q(1 - 1/σ²) < 1.
    pub fn lp_power_finite(&self, q: f64) -> Option<bool> {
        fn scale_ok(sigma: f64, q: f64) -> bool {
            q * (1.0 - 1.0 / (sigma * sigma)) < 1.0 - 1e-9
        }
        match self {
            FamilySpec::Tilt { .. } => Some(true),
            FamilySpec::Scale { sigma } => Some(scale_ok(*sigma, q)),
            FamilySpec::Mixture { sigma1, sigma2, .. } => {
                Some(scale_ok(sigma1.max(*sigma2), q))
            }
            FamilySpec::Bump { .. } => Some(true),
            FamilySpec::Floor { shape, .. } => shape.lp_power_finite(q),
        }
    }

    /// True for families that are even functions of x.
    pub fn is_symmetric(&self) -> bool {
        match self {
            FamilySpec::Tilt { b } => *b == 0.0,
            FamilySpec::Scale { .. } | FamilySpec::Mixture { .. } => true,
            FamilySpec::Bump { center, .. } => *center == 0.0,
            FamilySpec::Floor { shape, .. } => shape.is_symmetric(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, value: f64, reason: &'static str| {
            Err(Error::InvalidParameter {
                name,
                value,
                reason,
            })
        };
        match self {
            FamilySpec::Tilt { b } => {
                if !b.is_finite() || b.abs() > 4.0 {
                    return bad("b", *b, "tilt parameter must be finite with |b| <= 4");
                }
            }
            FamilySpec::Scale { sigma } => {
                if sigma.is_nan() || *sigma <= 0.0 || !sigma.is_finite() {
                    return bad("sigma", *sigma, "must be positive");
                }
            }
            FamilySpec::Mixture { w, sigma1, sigma2 } => {
                if !(0.0..=1.0).contains(w) {
                    return bad("w", *w, "mixture weight must lie in [0, 1]");
                }
                let smin = sigma1.min(*sigma2);
                if smin.is_nan() || smin <= 0.0 {
                    return bad("sigma1", sigma1.min(*sigma2), "must be positive");
                }
            }
            FamilySpec::Bump { eps, width, .. } => {
                // psi peaks at 1, so 1 + eps*psi stays positive for |eps| < 1
                if width.is_nan() || *width <= 0.0 {
                    return bad("width", *width, "must be positive");
                }
                if !eps.is_finite() || eps.abs() > 0.95 {
                    return bad("eps", *eps, "must satisfy |eps| <= 0.95 to keep f > 0");
                }
            }
            FamilySpec::Floor { alpha, shape } => {
                if !(0.0..=1.0).contains(alpha) || *alpha == 0.0 {
                    return bad("alpha", *alpha, "must lie in (0, 1]");
                }
                shape.validate()?;
            }
        }
        Ok(())
    }
}

/// A probability density relative to a Gaussian-type reference measure.
#[derive(Clone)]
pub struct RelativeDensity {
    raw: DynFn,
    raw_deriv: Option<DynFn>,
    norm: f64,
    reference: Reference,
    family: Option<FamilySpec>,
    label: String,
    centered: bool,
}

impl std::fmt::Debug for RelativeDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RelativeDensity")
            .field("label", &self.label)
            .field("norm", &self.norm)
            .field("centered", &self.centered)
            .finish()
    }
}

impl RelativeDensity {
    /// f(x), normalized.
    pub fn evaluate(&self, x: f64) -> f64 {
        (self.raw)(x) / self.norm
    }

    /// f'(x) from the analytic derivative, when the family carries one.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.raw_deriv.as_ref().map(|d| d(x) / self.norm)
    }

    /// (log f)'(x) = f'/f, independent of the normalization constant.
    pub fn log_derivative(&self, x: f64) -> Option<f64> {
        self.raw_deriv.as_ref().map(|d| d(x) / (self.raw)(x))
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.raw_deriv.is_some()
    }

    pub fn reference(&self) -> Reference {
        self.reference
    }

    pub fn family(&self) -> Option<&FamilySpec> {
        self.family.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Whether the construction guarantees zero mean.
    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// Density of the measure f·dref with respect to Lebesgue measure.
    pub fn lebesgue_density(&self, x: f64) -> f64 {
        let ref_density = match self.reference {
            Reference::Gamma => {
                (-(x * x) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
            }
            Reference::M => {
                std::f64::consts::SQRT_2 * (-2.0 * std::f64::consts::PI * x * x).exp()
            }
            Reference::Lebesgue => 1.0,
        };
        self.evaluate(x) * ref_density
    }
}

/// Localized analytic profile, sup ψ = 1 at t = 0. A Gaussian lobe rather
/// than a compactly supported mollifier: the mollifier's essential
/// singularity caps Gauss–Hermite accuracy near 1e-4, which is too coarse
/// for the 1e-8 normalization contracts, while the lobe keeps every catalog
/// integrand entire (and the Fisher integrand finite all the same).
pub(crate) fn bump_profile(t: f64) -> f64 {
    (-t * t / 2.0).exp()
}

pub(crate) fn bump_profile_deriv(t: f64) -> f64 {
    -t * (-t * t / 2.0).exp()
}

fn gaussian_pdf(x: f64, sigma: f64) -> f64 {
    (-(x * x) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Build the unnormalized evaluator and derivative for a family.
fn raw_parts(spec: &FamilySpec) -> (DynFn, DynFn) {
    match spec.clone() {
        FamilySpec::Tilt { b } => {
            let f: DynFn = Arc::new(move |x| (b * x - b * b / 2.0).exp());
            let fc = f.clone();
            let d: DynFn = Arc::new(move |x| b * fc(x));
            (f, d)
        }
        FamilySpec::Scale { sigma } => {
            let a = 1.0 - 1.0 / (sigma * sigma);
            let f: DynFn = Arc::new(move |x| (x * x * a / 2.0).exp() / sigma);
            let fc = f.clone();
            let d: DynFn = Arc::new(move |x| a * x * fc(x));
            (f, d)
        }
        FamilySpec::Mixture { w, sigma1, sigma2 } => {
            let f: DynFn = Arc::new(move |x| {
                let phi = gaussian_pdf(x, 1.0);
                (w * gaussian_pdf(x, sigma1) + (1.0 - w) * gaussian_pdf(x, sigma2)) / phi
            });
            let d: DynFn = Arc::new(move |x| {
                let phi = gaussian_pdf(x, 1.0);
                let p1 = gaussian_pdf(x, sigma1);
                let p2 = gaussian_pdf(x, sigma2);
                let num = w * p1 + (1.0 - w) * p2;
                let num_d = -x * (w * p1 / (sigma1 * sigma1) + (1.0 - w) * p2 / (sigma2 * sigma2));
                // d/dx [num/phi] = num'/phi + x·num/phi
                num_d / phi + x * num / phi
            });
            (f, d)
        }
        FamilySpec::Bump { eps, center, width } => {
            let f: DynFn =
                Arc::new(move |x| 1.0 + eps * bump_profile((x - center) / width));
            let d: DynFn =
                Arc::new(move |x| eps / width * bump_profile_deriv((x - center) / width));
            (f, d)
        }
        FamilySpec::Floor { alpha, shape } => {
            let (sf, sd) = raw_parts(&shape);
            // normalize the shape analytically-by-quadrature later; here we
            // fold the shape's own normalization into make_family by building
            // floor directly from a normalized shape density.
            let f: DynFn = Arc::new(move |x| alpha + (1.0 - alpha) * sf(x));
            let d: DynFn = Arc::new(move |x| (1.0 - alpha) * sd(x));
            (f, d)
        }
    }
}

/// Construct a normalized density for `spec` against `grid` (reference gamma).
pub fn make_family(spec: &FamilySpec, grid: &GaussianGrid) -> Result<RelativeDensity> {
    spec.validate()?;
    if grid.reference() != Reference::Gamma {
        return Err(Error::ReferenceMismatch("gamma", grid.reference().as_str()));
    }
    let (raw, deriv) = match spec {
        FamilySpec::Floor { alpha, shape } => {
            // build the shape as a normalized density first so that the
            // alpha-floor mixes two unit masses and needs no renormalization
            let inner = make_family(shape, grid)?;
            let a = *alpha;
            let inner_d = inner.clone();
            let f: DynFn = Arc::new(move |x| a + (1.0 - a) * inner_d.evaluate(x));
            let inner_d2 = inner;
            let d: DynFn = Arc::new(move |x| {
                (1.0 - a) * inner_d2.derivative(x).unwrap_or(f64::NAN)
            });
            (f, d)
        }
        _ => raw_parts(spec),
    };
    let mass = grid.integrate_fn(|x| raw(x));
    if !mass.is_finite() || mass <= 0.0 {
        return Err(Error::Normalization(format!(
            "family {} has non-finite or non-positive mass {mass}",
            spec.label()
        )));
    }
    for &x in grid.nodes() {
        if raw(x) < 0.0 {
            return Err(Error::Normalization(format!(
                "family {} is negative at x = {x}",
                spec.label()
            )));
        }
    }
    let centered = spec.is_symmetric();
    Ok(RelativeDensity {
        raw,
        raw_deriv: Some(deriv),
        norm: mass,
        reference: Reference::Gamma,
        family: Some(spec.clone()),
        label: spec.label(),
        centered,
    })
}

/// Wrap an arbitrary evaluator as a normalized density (no analytic
/// derivative; the numeric fallback applies downstream).
pub fn from_fn(
    label: impl Into<String>,
    f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    grid: &GaussianGrid,
) -> Result<RelativeDensity> {
    from_parts(label, Arc::new(f), None, false, grid)
}

/// Wrap an evaluator plus its analytic derivative as a normalized density.
pub fn from_parts(
    label: impl Into<String>,
    raw: DynFn,
    raw_deriv: Option<DynFn>,
    centered: bool,
    grid: &GaussianGrid,
) -> Result<RelativeDensity> {
    let mass = grid.integrate_fn(|x| raw(x));
    if !mass.is_finite() || mass <= 0.0 {
        return Err(Error::Normalization(format!("mass {mass} not usable")));
    }
    Ok(RelativeDensity {
        raw,
        raw_deriv,
        norm: mass,
        reference: grid.reference(),
        family: None,
        label: label.into(),
        centered,
    })
}

/// p-th absolute moment ∫ |x|^p f dref.
pub fn moment(f: &RelativeDensity, grid: &GaussianGrid, p: u32) -> Result<f64> {
    let val = grid.integrate_fn(|x| x.abs().powi(p as i32) * f.evaluate(x));
    if !val.is_finite() || val > 1e12 {
        return Err(Error::Divergent(format!(
            "moment p={p} of {} evaluates to {val}",
            f.label()
        )));
    }
    Ok(val)
}

/// Mean of the measure f dref.
pub fn mean(f: &RelativeDensity, grid: &GaussianGrid) -> f64 {
    grid.integrate_fn(|x| x * f.evaluate(x))
}

/// Translate the measure f dγ so its mean vanishes, then renormalize.
///
/// The translated density is x ↦ f(x + m)·e^{-mx - m²/2}, the Radon–Nikodym
/// derivative of the shifted measure against dγ.
pub fn center(f: &RelativeDensity, grid: &GaussianGrid) -> Result<RelativeDensity> {
    let m = mean(f, grid);
    if !m.is_finite() {
        return Err(Error::Divergent("first moment not finite".into()));
    }
    let inner = f.clone();
    let raw: DynFn = Arc::new(move |x| {
        inner.evaluate(x + m) * (-m * x - m * m / 2.0).exp()
    });
    let deriv: Option<DynFn> = if f.has_analytic_derivative() {
        let inner = f.clone();
        Some(Arc::new(move |x| {
            let shift = (-m * x - m * m / 2.0).exp();
            let fv = inner.evaluate(x + m);
            let fd = inner.derivative(x + m).unwrap();
            (fd - m * fv) * shift
        }))
    } else {
        None
    };
    let mass = grid.integrate_fn(|x| raw(x));
    if !mass.is_finite() || mass <= 0.0 {
        return Err(Error::Normalization(
            "translation destroyed integrability".into(),
        ));
    }
    let out = RelativeDensity {
        raw,
        raw_deriv: deriv,
        norm: mass,
        reference: f.reference,
        family: None,
        label: format!("centered({})", f.label()),
        centered: true,
    };
    let residual_mean = mean(&out, grid);
    if residual_mean.abs() > 1e-10 {
        return Err(Error::Normalization(format!(
            "centering left mean {residual_mean:.3e}"
        )));
    }
    Ok(out)
}

/// Product (tensor) density over ℝⁿ with independent 1-D factors.
#[derive(Clone, Debug)]
pub struct ProductDensity {
    factors: Vec<RelativeDensity>,
}

impl ProductDensity {
    pub fn factors(&self) -> &[RelativeDensity] {
        &self.factors
    }

    pub fn dimension(&self) -> usize {
        self.factors.len()
    }

    /// f(x₁,…,xₙ) = Π fᵢ(xᵢ).
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.factors.len() {
            return Err(Error::LengthMismatch {
                expected: self.factors.len(),
                got: point.len(),
            });
        }
        Ok(self
            .factors
            .iter()
            .zip(point)
            .map(|(f, &x)| f.evaluate(x))
            .product())
    }

    /// Second moment of the product measure: sum of factor second moments.
    pub fn m2(&self, grid: &GaussianGrid) -> Result<f64> {
        let mut acc = 0.0;
        for f in &self.factors {
            acc += moment(f, grid, 2)?;
        }
        Ok(acc)
    }
}

/// Compose 1-D densities into a product density.
pub fn tensor(factors: Vec<RelativeDensity>) -> Result<ProductDensity> {
    if factors.is_empty() {
        return Err(Error::Empty("tensor factor list"));
    }
    for f in &factors {
        if f.reference() != Reference::Gamma {
            return Err(Error::ReferenceMismatch("gamma", f.reference().as_str()));
        }
    }
    Ok(ProductDensity { factors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn gamma_grid() -> GaussianGrid {
        build_grid(Reference::Gamma, 128, 0.0).unwrap()
    }

    #[test]
    fn tilt_zero_is_constant_one() {
        let g = gamma_grid();
        let f = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        for &x in g.nodes() {
            assert_abs_diff_eq!(f.evaluate(x), 1.0, epsilon = 1e-12);
        }
        let s = make_family(&FamilySpec::Scale { sigma: 1.0 }, &g).unwrap();
        for &x in g.nodes() {
            assert_abs_diff_eq!(s.evaluate(x), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn tilt_and_scale_pointwise_values() {
        let g = gamma_grid();
        let t = make_family(&FamilySpec::Tilt { b: 1.0 }, &g).unwrap();
        assert_abs_diff_eq!(t.evaluate(0.0), (-0.5f64).exp(), epsilon = 1e-9);
        let s = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        assert_abs_diff_eq!(s.evaluate(0.0), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn moments_match_closed_forms() {
        let g = gamma_grid();
        let s = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        assert_abs_diff_eq!(moment(&s, &g, 2).unwrap(), 4.0, epsilon = 1e-9);
        let t = make_family(&FamilySpec::Tilt { b: 1.0 }, &g).unwrap();
        assert_abs_diff_eq!(moment(&t, &g, 2).unwrap(), 2.0, epsilon = 1e-9);
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        assert_abs_diff_eq!(moment(&one, &g, 2).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn centering_a_tilt_recovers_the_gaussian() {
        let g = gamma_grid();
        let t = make_family(&FamilySpec::Tilt { b: 1.0 }, &g).unwrap();
        let c = center(&t, &g).unwrap();
        for &x in g.nodes().iter().filter(|x| x.abs() < 6.0) {
            assert_abs_diff_eq!(c.evaluate(x), 1.0, epsilon = 1e-9);
        }
        assert!(mean(&c, &g).abs() <= 1e-10);
    }

    #[test]
    fn centering_fixed_point_for_symmetric_families() {
        let g = gamma_grid();
        let s = make_family(&FamilySpec::Scale { sigma: 1.5 }, &g).unwrap();
        let c = center(&s, &g).unwrap();
        // compare where the density is O(1); the far tail blows the absolute
        // difference up by e^{x^2(1-1/sigma^2)/2} even for matching functions
        let sup = g
            .nodes()
            .iter()
            .filter(|x| x.abs() <= 6.0)
            .map(|&x| (c.evaluate(x) - s.evaluate(x)).abs() / (1.0 + s.evaluate(x)))
            .fold(0.0f64, f64::max);
        assert!(sup <= 1e-12, "sup difference {sup}");
    }

    #[test]
    fn centering_bump_mixture() {
        let g = gamma_grid();
        let f = make_family(
            &FamilySpec::Bump {
                eps: 0.8,
                center: 1.0,
                width: 1.0,
            },
            &g,
        )
        .unwrap();
        let c = center(&f, &g).unwrap();
        assert!(mean(&c, &g).abs() <= 1e-10);
    }

    #[test]
    fn floor_family_respects_its_floor() {
        let g = gamma_grid();
        let spec = FamilySpec::Floor {
            alpha: 0.5,
            shape: Box::new(FamilySpec::Bump {
                eps: 0.5,
                center: 0.5,
                width: 1.0,
            }),
        };
        let f = make_family(&spec, &g).unwrap();
        let min = g
            .nodes()
            .iter()
            .map(|&x| f.evaluate(x))
            .fold(f64::MAX, f64::min);
        assert!(min >= 0.5 - 1e-12, "min {min}");
        assert_abs_diff_eq!(g.integrate_fn(|x| f.evaluate(x)), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let g = gamma_grid();
        assert!(make_family(&FamilySpec::Scale { sigma: -1.0 }, &g).is_err());
        assert!(make_family(
            &FamilySpec::Mixture {
                w: 1.5,
                sigma1: 1.0,
                sigma2: 1.0
            },
            &g
        )
        .is_err());
        assert!(make_family(
            &FamilySpec::Floor {
                alpha: 0.0,
                shape: Box::new(FamilySpec::Tilt { b: 0.0 })
            },
            &g
        )
        .is_err());
    }

    #[test]
    fn tensor_products() {
        let g = gamma_grid();
        let a = make_family(&FamilySpec::Scale { sigma: 2.0 }, &g).unwrap();
        let b = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        let p = tensor(vec![a, b]).unwrap();
        assert_abs_diff_eq!(p.evaluate(&[0.0, 0.0]).unwrap(), 0.5, epsilon = 1e-12);
        let one = make_family(&FamilySpec::Tilt { b: 0.0 }, &g).unwrap();
        let p3 = tensor(vec![one.clone(), one.clone(), one]).unwrap();
        assert_abs_diff_eq!(p3.m2(&g).unwrap(), 3.0, epsilon = 1e-9);
        assert!(tensor(vec![]).is_err());
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let g = gamma_grid();
        let specs = [
            FamilySpec::Tilt { b: 0.7 },
            FamilySpec::Scale { sigma: 1.4 },
            FamilySpec::Mixture {
                w: 0.3,
                sigma1: 0.8,
                sigma2: 1.3,
            },
            FamilySpec::Bump {
                eps: 0.5,
                center: 0.5,
                width: 1.2,
            },
        ];
        for spec in specs {
            let f = make_family(&spec, &g).unwrap();
            for &x in &[-1.5, -0.3, 0.0, 0.4, 1.1] {
                let h = 1e-6;
                let fd = (f.evaluate(x + h) - f.evaluate(x - h)) / (2.0 * h);
                let an = f.derivative(x).unwrap();
                assert_abs_diff_eq!(an, fd, epsilon = 1e-6 * (1.0 + an.abs()));
            }
        }
    }

    proptest! {
        #[test]
        fn random_families_normalize_and_stay_nonnegative(
            b in -2.0f64..2.0,
            sigma in 0.5f64..2.0,
            w in 0.0f64..1.0,
            eps in -0.9f64..0.9,
        ) {
            let g = gamma_grid();
            let specs = [
                FamilySpec::Tilt { b },
                FamilySpec::Scale { sigma },
                FamilySpec::Mixture { w, sigma1: sigma, sigma2: 2.0 - sigma / 2.0 },
                FamilySpec::Bump { eps, center: b / 2.0, width: 1.0 },
            ];
            for spec in specs {
                let f = make_family(&spec, &g).unwrap();
                let mass = g.integrate_fn(|x| f.evaluate(x));
                prop_assert!((mass - 1.0).abs() < 1e-8, "mass {} for {}", mass, spec.label());
                for &x in g.nodes() {
                    prop_assert!(f.evaluate(x) >= 0.0);
                }
            }
        }
    }
}
