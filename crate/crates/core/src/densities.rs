//! Standard densities and the location-scale densities generated from them.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::group::GroupElement;
use crate::{Error, Result};

const LN_PI: f64 = 1.144_729_885_849_400_2;
/// `ln(2 pi) / 2`
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;
/// `ln(2 / pi) / 2`
const HALF_LN_TWO_OVER_PI: f64 = -0.225_791_352_644_727_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Cauchy,
    Normal,
    HalfNormal,
    Exponential,
    /// Not one of the classical examples; carried as an extra even density.
    Laplace,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Cauchy,
        Family::Normal,
        Family::HalfNormal,
        Family::Exponential,
        Family::Laplace,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Cauchy => "cauchy",
            Family::Normal => "normal",
            Family::HalfNormal => "halfnormal",
            Family::Exponential => "exponential",
            Family::Laplace => "laplace",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A standard (reduced) density: the member of its family at `(l, s) = (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StandardDensity {
    family: Family,
}

/// Look up a standard density by name.
pub fn catalog(name: &str) -> Result<StandardDensity> {
    Ok(StandardDensity::new(name.parse()?))
}

impl StandardDensity {
    pub const fn new(family: Family) -> Self {
        Self { family }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn name(&self) -> &'static str {
        self.family.name()
    }

    /// Lower end of the support; the upper end is always `+inf`.
    pub fn support_lower(&self) -> f64 {
        match self.family {
            Family::HalfNormal | Family::Exponential => 0.0,
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn is_half_line(&self) -> bool {
        self.support_lower().is_finite()
    }

    pub fn is_even(&self) -> bool {
        matches!(
            self.family,
            Family::Cauchy | Family::Normal | Family::Laplace
        )
    }

    /// Closed-form differential entropy of the standard density, when one is carried.
    pub fn standard_entropy(&self) -> Option<f64> {
        match self.family {
            Family::Cauchy => Some((4.0 * PI).ln()),
            _ => None,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self.family {
            Family::Cauchy => 1.0 / (PI * (1.0 + x * x)),
            Family::Normal => (-0.5 * x * x - HALF_LN_TWO_PI).exp(),
            Family::HalfNormal if x >= 0.0 => (HALF_LN_TWO_OVER_PI - 0.5 * x * x).exp(),
            Family::Exponential if x >= 0.0 => (-x).exp(),
            Family::Laplace => 0.5 * (-x.abs()).exp(),
            Family::HalfNormal | Family::Exponential => 0.0,
        }
    }

    /// Natural log of the density; `-inf` outside the support only.
    pub fn log_pdf(&self, x: f64) -> f64 {
        match self.family {
            Family::Cauchy => -LN_PI - (x * x).ln_1p(),
            Family::Normal => -0.5 * x * x - HALF_LN_TWO_PI,
            Family::HalfNormal if x >= 0.0 => HALF_LN_TWO_OVER_PI - 0.5 * x * x,
            Family::Exponential if x >= 0.0 => -x,
            Family::Laplace => -LN_2 - x.abs(),
            Family::HalfNormal | Family::Exponential => f64::NEG_INFINITY,
        }
    }

    /// Points where the density is not smooth (inside or at the edge of the support).
    pub fn kinks(&self) -> &'static [f64] {
        match self.family {
            Family::Laplace | Family::HalfNormal | Family::Exponential => &[0.0],
            Family::Cauchy | Family::Normal => &[],
        }
    }

    pub fn at(&self, elem: GroupElement) -> LocationScaleDensity {
        LocationScaleDensity::new(*self, elem)
    }

    pub fn standard(&self) -> LocationScaleDensity {
        self.at(GroupElement::identity())
    }
}

impl From<Family> for StandardDensity {
    fn from(family: Family) -> Self {
        Self::new(family)
    }
}

/// `p_{l,s}(x) = p((x - l) / s) / s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocationScaleDensity {
    std: StandardDensity,
    elem: GroupElement,
}

impl LocationScaleDensity {
    pub fn new(std: StandardDensity, elem: GroupElement) -> Self {
        Self { std, elem }
    }

    pub fn from_params(family: Family, l: f64, s: f64) -> Result<Self> {
        Ok(Self::new(family.into(), GroupElement::new(l, s)?))
    }

    pub fn standard(&self) -> StandardDensity {
        self.std
    }

    pub fn family(&self) -> Family {
        self.std.family
    }

    pub fn elem(&self) -> GroupElement {
        self.elem
    }

    pub fn location(&self) -> f64 {
        self.elem.location()
    }

    pub fn scale(&self) -> f64 {
        self.elem.scale_param()
    }

    /// Same standard density moved by another group element.
    pub fn with_elem(&self, elem: GroupElement) -> Self {
        Self::new(self.std, elem)
    }

    /// Lower end of the shifted support `l + s * lower`.
    pub fn support_lower(&self) -> f64 {
        let lo = self.std.support_lower();
        if lo.is_finite() {
            self.elem.act(lo)
        } else {
            lo
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.std.pdf(self.elem.pull_back(x)) / self.scale()
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        self.std.log_pdf(self.elem.pull_back(x)) - self.scale().ln()
    }

    /// `h(p_{l,s}) = h(p) + log s` when the standard entropy is known.
    pub fn entropy_closed(&self) -> Option<f64> {
        self.std.standard_entropy().map(|h| h + self.scale().ln())
    }

    /// Non-smooth points of the density in sample-space coordinates.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.std.kinks().iter().map(|&k| self.elem.act(k))
    }
}

impl fmt::Display for LocationScaleDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{},{}",
            self.std.name(),
            self.location(),
            self.scale()
        )
    }
}

/// Parses `<family>:<loc>,<scale>`, e.g. `cauchy:0,1`.
impl FromStr for LocationScaleDensity {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let bad = || Error::BadSpec(spec.to_string());
        let (family, params) = spec.split_once(':').ok_or_else(bad)?;
        let family: Family = family.trim().parse()?;
        let (loc, scale) = params.split_once(',').ok_or_else(bad)?;
        let l: f64 = loc.trim().parse().map_err(|_| bad())?;
        let s: f64 = scale.trim().parse().map_err(|_| bad())?;
        Self::from_params(family, l, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_with_breakpoints, QuadratureConfig};

    fn d(family: Family, l: f64, s: f64) -> LocationScaleDensity {
        LocationScaleDensity::from_params(family, l, s).unwrap()
    }

    fn mass(p: &LocationScaleDensity) -> f64 {
        let pts: Vec<f64> = std::iter::once(p.location())
            .chain(p.breakpoints())
            .collect();
        integrate_with_breakpoints(
            |x| p.pdf(x),
            p.support_lower(),
            f64::INFINITY,
            &pts,
            &QuadratureConfig::default(),
        )
        .unwrap()
        .value
    }

    #[test]
    fn catalog_point_values() {
        let cauchy = catalog("cauchy").unwrap();
        assert!((cauchy.pdf(0.0) - 1.0 / PI).abs() < 1e-16);
        assert_eq!(catalog("halfnormal").unwrap().pdf(-1.0), 0.0);
        assert_eq!(catalog("exponential").unwrap().pdf(0.0), 1.0);
        assert!((catalog("normal").unwrap().pdf(0.0) - (2.0 * PI).sqrt().recip()).abs() < 1e-16);
        assert!((catalog("laplace").unwrap().pdf(0.0) - 0.5).abs() < 1e-16);
        assert!(matches!(catalog("gumbel"), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn log_pdf_matches_pdf() {
        for f in Family::ALL {
            let p = StandardDensity::new(f);
            for x in [-3.0, -0.5, 0.0, 0.25, 1.0, 4.0] {
                let (a, b) = (p.pdf(x), p.log_pdf(x).exp());
                assert!(
                    (a - b).abs() <= 1e-15 * a.max(1e-300),
                    "{f} at {x}: {a} vs {b}"
                );
            }
        }
        assert_eq!(
            catalog("exponential").unwrap().log_pdf(-1e-9),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn location_scale_pdf_examples() {
        assert!((d(Family::Cauchy, 0.0, 2.0).pdf(0.0) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!((d(Family::Cauchy, 0.0, 2.0).pdf(0.0) - 0.159_154_9).abs() < 1e-7);
        assert!((d(Family::Cauchy, 1.0, 1.0).pdf(1.0) - 1.0 / PI).abs() < 1e-16);
        let hn = d(Family::HalfNormal, 2.0, 0.5);
        assert_eq!(hn.support_lower(), 2.0);
        assert_eq!(hn.pdf(1.999), 0.0);
        assert!(hn.pdf(2.0) > 0.0);
    }

    #[test]
    fn halfnormal_scaled_integrates_to_one() {
        assert!((mass(&d(Family::HalfNormal, 0.0, 2.0)) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn normalization_over_grid() {
        for f in Family::ALL {
            for &(l, s) in &[
                (0.0, 1.0),
                (-2.5, 0.1),
                (1.3, 10.0),
                (7.0, 0.37),
                (-0.4, 3.3),
            ] {
                let m = mass(&d(f, l, s));
                assert!((m - 1.0).abs() < 1e-8, "{f}:{l},{s} mass {m}");
            }
        }
    }

    #[test]
    fn even_flags_hold() {
        for f in Family::ALL {
            let p = StandardDensity::new(f);
            if p.is_even() {
                assert!(!p.is_half_line());
                for x in [0.1, 1.0, 3.0, 10.0] {
                    assert!((p.pdf(x) - p.pdf(-x)).abs() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn entropy_closed_form() {
        let h = |l, s| d(Family::Cauchy, l, s).entropy_closed().unwrap();
        assert!((h(0.0, 1.0) - 2.531_024_2).abs() < 1e-7);
        assert_eq!(h(5.0, 1.0), h(0.0, 1.0));
        assert!((h(0.0, 2.0) - 3.224_171_4).abs() < 1e-7);
        assert_eq!(d(Family::Normal, 0.0, 1.0).entropy_closed(), None);
    }

    #[test]
    fn action_consistency() {
        // p_{e1.e2}(x) = p_{e2}(e1^{-1} x) / s1
        let e1 = GroupElement::new(0.7, 1.9).unwrap();
        let e2 = GroupElement::new(-1.2, 0.4).unwrap();
        for f in Family::ALL {
            let std = StandardDensity::new(f);
            for x in [-2.0, 0.1, 0.5, 3.0] {
                let a = std.at(e1.compose(&e2)).pdf(x);
                let b = std.at(e2).pdf(e1.pull_back(x)) / e1.scale_param();
                assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "{f} at {x}");
            }
        }
    }

    #[test]
    fn parse_specs() {
        let p: LocationScaleDensity = "cauchy:0,1".parse().unwrap();
        assert_eq!(p, d(Family::Cauchy, 0.0, 1.0));
        let p: LocationScaleDensity = "laplace:-1.5, 2e-1".parse().unwrap();
        assert_eq!(p, d(Family::Laplace, -1.5, 0.2));
        assert!(matches!(
            "cauchy:0,0".parse::<LocationScaleDensity>(),
            Err(Error::InvalidElement { .. })
        ));
        assert!(matches!(
            "cauchy:0".parse::<LocationScaleDensity>(),
            Err(Error::BadSpec(_))
        ));
        assert!(matches!(
            "cauchy".parse::<LocationScaleDensity>(),
            Err(Error::BadSpec(_))
        ));
        assert!(matches!(
            "foo:0,1".parse::<LocationScaleDensity>(),
            Err(Error::UnknownFamily(_))
        ));
        assert!(matches!(
            "normal:x,1".parse::<LocationScaleDensity>(),
            Err(Error::BadSpec(_))
        ));
        assert!("normal:nan,1".parse::<LocationScaleDensity>().is_err());
    }
}
