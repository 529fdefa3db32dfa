//! The shipped density catalog: a spread of tilts, scales, mixtures, bumps,
//! and floor families wide enough to exercise every inequality in the
//! registry, including the equality classes.

use crate::densities::{make_family, FamilySpec, RelativeDensity};
use crate::error::Result;
use crate::grid::GaussianGrid;

/// Default catalog specs (31 members).
pub fn default_catalog() -> Vec<FamilySpec> {
    let mut specs = Vec::new();
    for b in [0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 1.5, 2.0] {
        specs.push(FamilySpec::Tilt { b });
    }
    for sigma in [0.5, 0.6, 0.8, 0.9, 1.1, 1.25, 1.5, 2.0] {
        specs.push(FamilySpec::Scale { sigma });
    }
    for (w, sigma1, sigma2) in [
        (0.3, 0.8, 1.2),
        (0.5, 0.7, 1.3),
        (0.2, 1.5, 0.9),
        (0.5, 0.5, 1.1),
        (0.7, 1.2, 0.6),
        (0.1, 1.4, 1.0),
    ] {
        specs.push(FamilySpec::Mixture { w, sigma1, sigma2 });
    }
    for (eps, center, width) in [
        (0.5, 1.0, 1.0),
        (-0.3, 0.5, 1.5),
        (0.8, -1.0, 0.8),
        (0.2, 0.0, 2.0),
    ] {
        specs.push(FamilySpec::Bump { eps, center, width });
    }
    specs.push(FamilySpec::Floor {
        alpha: 0.3,
        shape: Box::new(FamilySpec::Scale { sigma: 1.25 }),
    });
    specs.push(FamilySpec::Floor {
        alpha: 0.5,
        shape: Box::new(FamilySpec::Bump {
            eps: 0.5,
            center: 1.0,
            width: 1.0,
        }),
    });
    specs.push(FamilySpec::Floor {
        alpha: 0.7,
        shape: Box::new(FamilySpec::Mixture {
            w: 0.4,
            sigma1: 0.8,
            sigma2: 1.2,
        }),
    });
    specs.push(FamilySpec::Floor {
        alpha: 0.5,
        shape: Box::new(FamilySpec::Tilt { b: 0.5 }),
    });
    specs
}

/// Build every member against the given grid.
pub fn build_catalog(specs: &[FamilySpec], grid: &GaussianGrid) -> Result<Vec<RelativeDensity>> {
    specs.iter().map(|s| make_family(s, grid)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, Reference};

    #[test]
    fn catalog_has_at_least_thirty_members_and_all_normalize() {
        let specs = default_catalog();
        assert!(specs.len() >= 30, "only {} members", specs.len());
        let grid = build_grid(Reference::Gamma, 128, 0.0).unwrap();
        let densities = build_catalog(&specs, &grid).unwrap();
        for f in &densities {
            let mass = grid.integrate_fn(|x| f.evaluate(x));
            assert!((mass - 1.0).abs() < 1e-8, "{}: mass {mass}", f.label());
        }
    }
}
