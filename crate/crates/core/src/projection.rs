//! f-divergence minimization (information projection) between location-scale
//! families.
//!
//! Projecting `p_{l1,s1}` onto the family of `q` reduces to the query-free
//! problem `min_{(l,s)} I_f(p : q_{l,s})`; the optimum is then carried back to
//! the query's frame. The minimum value therefore never depends on the query
//! parameters.

use crate::densities::{LocationScaleDensity, StandardDensity};
use crate::divergence::{self, FDivGenerator, NOISE_CLAMP};
use crate::group::GroupElement;
use crate::nelder_mead::{self, Settings};
use crate::quadrature::QuadratureConfig;
use crate::{Error, Result};

/// Objective value substituted for `+inf` inside the simplex search.
pub const INFEASIBLE_PENALTY: f64 = 1e9;

const START_LOCATIONS: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
const START_LOG_SCALES: [f64; 3] = [-1.0, 0.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Minimize over the second argument: `min_{q in Q} I_f(query : q)`.
    Right,
    /// Minimize over the first argument: `min_{p in P} I_f(p : query)`.
    Left,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" => Ok(Side::Right),
            "left" => Ok(Side::Left),
            other => Err(Error::Precondition(format!(
                "side must be `left` or `right`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionResult {
    /// Optimum `(l*, s*)` of the reduced problem `min I_f(p : q_{l,s})`.
    pub reduced_optimum: GroupElement,
    /// Optimal parameters of the free density in the query's frame.
    pub target_optimum: GroupElement,
    pub min_value: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub starts_used: usize,
}

impl ProjectionResult {
    pub fn is_feasible(&self) -> bool {
        self.min_value.is_finite()
    }
}

#[derive(Debug, Clone, Copy)]
struct Reduced {
    optimum: GroupElement,
    value: f64,
    evaluations: usize,
    converged: bool,
    starts: usize,
}

/// Locations are pinned to 0 when either family lives on a half-line.
fn location_pinned(p: &StandardDensity, q: &StandardDensity) -> bool {
    p.is_half_line() || q.is_half_line()
}

fn solve_reduced(
    p: &StandardDensity,
    q: &StandardDensity,
    gen: &FDivGenerator,
    cfg: &QuadratureConfig,
) -> Result<Reduced> {
    let pinned = location_pinned(p, q);
    let p_std = p.standard();
    let unpack = |x: &[f64]| -> Result<GroupElement> {
        if pinned {
            GroupElement::new(0.0, x[0].exp())
        } else {
            GroupElement::new(x[0], x[1].exp())
        }
    };
    let objective = |x: &[f64]| -> Result<f64> {
        let elem = match unpack(x) {
            Ok(e) => e,
            // exp under/overflow of the log-scale coordinate
            Err(_) => return Ok(INFEASIBLE_PENALTY),
        };
        let v = divergence::fdiv(gen, &p_std, &q.at(elem), cfg)?.value;
        Ok(if v.is_finite() {
            v.min(INFEASIBLE_PENALTY)
        } else {
            INFEASIBLE_PENALTY
        })
    };

    let starts: Vec<Vec<f64>> = if pinned {
        START_LOG_SCALES.iter().map(|&ls| vec![ls]).collect()
    } else {
        START_LOCATIONS
            .iter()
            .flat_map(|&l| START_LOG_SCALES.iter().map(move |&ls| vec![l, ls]))
            .collect()
    };

    let settings = Settings::default();
    let mut evaluations = 0;
    let mut best: Option<(GroupElement, f64, bool)> = None;
    for x0 in &starts {
        let m = nelder_mead::minimize(objective, x0, &settings)?;
        evaluations += m.evaluations;
        let elem = unpack(&m.x)?;
        let candidate = (elem, m.value, m.converged);
        best = Some(match best {
            None => candidate,
            Some(current) if better(&candidate, &current) => candidate,
            Some(current) => current,
        });
    }
    let (optimum, value, converged) = best.expect("at least one start");
    let feasible = value < INFEASIBLE_PENALTY;
    Ok(Reduced {
        optimum,
        value: if feasible {
            clamp_noise(value)
        } else {
            f64::INFINITY
        },
        evaluations,
        converged: converged && feasible,
        starts: starts.len(),
    })
}

/// Converged starts beat unconverged ones; then smaller value; ties by smaller `l*`, then `s*`.
fn better(a: &(GroupElement, f64, bool), b: &(GroupElement, f64, bool)) -> bool {
    if a.2 != b.2 {
        return a.2;
    }
    a.1.total_cmp(&b.1)
        .then(a.0.location().total_cmp(&b.0.location()))
        .then(a.0.scale_param().total_cmp(&b.0.scale_param()))
        .is_lt()
}

fn clamp_noise(v: f64) -> f64 {
    if (-NOISE_CLAMP..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// `min_{(l2,s2)} I_f(query : q_{l2,s2})` for `q` the standard density of `target`.
/// The minimizer is `l2* = s1 l* + l1`, `s2* = s1 s*`.
pub fn project_right(
    query: &LocationScaleDensity,
    target: &StandardDensity,
    gen: &FDivGenerator,
    cfg: &QuadratureConfig,
) -> Result<ProjectionResult> {
    let r = solve_reduced(&query.standard(), target, gen, cfg)?;
    let (l1, s1) = (query.location(), query.scale());
    let target_optimum =
        GroupElement::new(s1 * r.optimum.location() + l1, r.optimum.scale_param() * s1)?;
    Ok(finish(r, target_optimum))
}

/// `min_{(l1,s1)} I_f(p_{l1,s1} : query)` for `p` the standard density of `source`.
/// The minimizer is `s1* = s2 / s*`, `l1* = l2 - l* s1*`.
pub fn project_left(
    query: &LocationScaleDensity,
    source: &StandardDensity,
    gen: &FDivGenerator,
    cfg: &QuadratureConfig,
) -> Result<ProjectionResult> {
    let r = solve_reduced(source, &query.standard(), gen, cfg)?;
    let (l2, s2) = (query.location(), query.scale());
    let s1 = s2 / r.optimum.scale_param();
    let target_optimum = GroupElement::new(l2 - r.optimum.location() * s1, s1)?;
    Ok(finish(r, target_optimum))
}

pub fn project(
    query: &LocationScaleDensity,
    other: &StandardDensity,
    gen: &FDivGenerator,
    side: Side,
    cfg: &QuadratureConfig,
) -> Result<ProjectionResult> {
    match side {
        Side::Right => project_right(query, other, gen, cfg),
        Side::Left => project_left(query, other, gen, cfg),
    }
}

fn finish(r: Reduced, target_optimum: GroupElement) -> ProjectionResult {
    ProjectionResult {
        reduced_optimum: r.optimum,
        target_optimum,
        min_value: r.value,
        evaluations: r.evaluations,
        converged: r.converged,
        starts_used: r.starts,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyMin {
    /// `I_f(P:Q)` when finite; otherwise the reversed-direction minimum `I_f(Q:P)`.
    pub value: f64,
    /// `I_f(P:Q)`, the smaller of the two single-sided minima.
    pub forward: f64,
    /// `I_f(Q:P)`, only computed when the forward direction is infinite.
    pub reverse: Option<f64>,
    /// `min_{q in Q} I_f(p : q)` from the standard `p`.
    pub right: ProjectionResult,
    /// `min_{p in P} I_f(p : q)` from the standard `q`.
    pub left: ProjectionResult,
}

impl FamilyMin {
    pub fn forward_infinite(&self) -> bool {
        self.forward.is_infinite()
    }
}

/// `I_f(P:Q) = min over both families`, through the two single-sided minima.
pub fn family_min(
    p: &StandardDensity,
    q: &StandardDensity,
    gen: &FDivGenerator,
    cfg: &QuadratureConfig,
) -> Result<FamilyMin> {
    let right = project_right(&p.standard(), q, gen, cfg)?;
    let left = project_left(&q.standard(), p, gen, cfg)?;
    let forward = right.min_value.min(left.min_value);
    let (value, reverse) = if forward.is_finite() {
        (forward, None)
    } else {
        let back = project_right(&q.standard(), p, gen, cfg)?.min_value;
        (back, Some(back))
    };
    Ok(FamilyMin {
        value,
        forward,
        reverse,
        right,
        left,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::Family;
    use std::f64::consts::{FRAC_2_PI, PI};

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn d(f: Family, l: f64, s: f64) -> LocationScaleDensity {
        LocationScaleDensity::from_params(f, l, s).unwrap()
    }

    fn std(f: Family) -> StandardDensity {
        StandardDensity::new(f)
    }

    const MIN_HN_EXP: f64 = 0.048_417_3;

    #[test]
    fn halfnormal_onto_exponential() {
        let kl = FDivGenerator::kl();
        let r = project_right(
            &d(Family::HalfNormal, 0.0, 1.0),
            &std(Family::Exponential),
            &kl,
            &cfg(),
        )
        .unwrap();
        assert!(r.converged);
        assert_eq!(r.starts_used, 3);
        assert_eq!(r.target_optimum.location(), 0.0);
        let ratio = 1.0 / r.target_optimum.scale_param();
        assert!((ratio - (PI / 2.0).sqrt()).abs() < 1e-4);
        assert!((r.target_optimum.scale_param() - 0.797_884_6).abs() < 1e-4);
        assert!((r.min_value - (0.5 + FRAC_2_PI.ln())).abs() < 1e-9);
        assert!((r.min_value - MIN_HN_EXP).abs() < 1e-7);

        let r3 = project_right(
            &d(Family::HalfNormal, 0.0, 3.0),
            &std(Family::Exponential),
            &kl,
            &cfg(),
        )
        .unwrap();
        assert!((r3.min_value - r.min_value).abs() < 1e-6);
        assert!((r3.target_optimum.scale_param() - 2.393_653_9).abs() < 3e-4);
    }

    #[test]
    fn own_family_projection_is_exact() {
        let kl = FDivGenerator::kl();
        let r = project_right(
            &d(Family::Cauchy, 2.0, 5.0),
            &std(Family::Cauchy),
            &kl,
            &cfg(),
        )
        .unwrap();
        assert!(r.min_value.abs() < 1e-9);
        assert!((r.target_optimum.location() - 2.0).abs() < 1e-4);
        assert!((r.target_optimum.scale_param() - 5.0).abs() < 1e-4);

        let r = project_left(
            &d(Family::Cauchy, 1.0, 2.0),
            &std(Family::Cauchy),
            &kl,
            &cfg(),
        )
        .unwrap();
        assert!(r.min_value.abs() < 1e-9);
        assert!((r.target_optimum.location() - 1.0).abs() < 1e-4);
        assert!((r.target_optimum.scale_param() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn left_projection_is_query_independent() {
        let kl = FDivGenerator::kl();
        let hn = std(Family::HalfNormal);
        let a = project_left(&d(Family::Exponential, 0.0, 2.0), &hn, &kl, &cfg()).unwrap();
        let b = project_left(&d(Family::Exponential, 0.0, 5.0), &hn, &kl, &cfg()).unwrap();
        assert!((a.min_value - b.min_value).abs() < 1e-6);
        assert!((a.min_value - MIN_HN_EXP).abs() < 1e-6);
        // s1* = s2 / s*
        assert!(
            (b.target_optimum.scale_param() / a.target_optimum.scale_param() - 2.5).abs() < 1e-6
        );
    }

    #[test]
    fn family_minimum() {
        let kl = FDivGenerator::kl();
        let m = family_min(
            &std(Family::HalfNormal),
            &std(Family::Exponential),
            &kl,
            &cfg(),
        )
        .unwrap();
        assert!((m.value - MIN_HN_EXP).abs() < 1e-6);
        assert!((m.right.min_value - m.left.min_value).abs() < 1e-6);
        assert!(!m.forward_infinite());

        let m = family_min(&std(Family::Laplace), &std(Family::Laplace), &kl, &cfg()).unwrap();
        assert!(m.value.abs() < 1e-8);
    }

    #[test]
    fn infeasible_direction_is_flagged() {
        let kl = FDivGenerator::kl();
        let r = project_right(
            &d(Family::Cauchy, 0.0, 1.0),
            &std(Family::Normal),
            &kl,
            &cfg(),
        )
        .unwrap();
        assert_eq!(r.min_value, f64::INFINITY);
        assert!(!r.converged);

        let m = family_min(&std(Family::Cauchy), &std(Family::Normal), &kl, &cfg()).unwrap();
        assert!(m.forward_infinite());
        let back = m.reverse.unwrap();
        assert!(back.is_finite() && back > 0.0);
        assert_eq!(m.value, back);
    }

    #[test]
    fn side_parsing() {
        assert_eq!("left".parse::<Side>().unwrap(), Side::Left);
        assert_eq!("right".parse::<Side>().unwrap(), Side::Right);
        assert!("up".parse::<Side>().is_err());
    }
}
