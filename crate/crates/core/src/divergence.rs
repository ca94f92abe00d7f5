//! f-divergence generators, parameter reductions, closed forms and symmetry
//! checks for location-scale densities.
//!
//! The central fact used here: for any f-divergence,
//!
//! ```text
//! I_f(p_{e1} : q_{e2}) = I_f(p : q_{e1^-1 . e2}) = I_f(p_{e2^-1 . e1} : q)
//! ```
//!
//! so only one density ever needs to carry parameters. [`fdiv`] uses the
//! right-hand reduction for its quadrature path.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt;
use std::str::FromStr;

use crate::densities::{Family, LocationScaleDensity, StandardDensity};
use crate::group::GroupElement;
use crate::quadrature::{self, IntegralResult, QuadratureConfig};
use crate::{Error, Result};

/// Finite results in `[-NOISE_CLAMP, 0)` are reported as exactly 0.
pub const NOISE_CLAMP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// `f(u) = -log u`
    Kl,
    /// `f(u) = u log u`
    ReverseKl,
    /// `f(u) = (sqrt(u) - 1)^2`
    SquaredHellinger,
    /// `f(u) = |u - 1| / 2`
    TotalVariation,
    /// `f(u) = (u - 1)^2`
    ChiSquared,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Kl,
        GeneratorKind::ReverseKl,
        GeneratorKind::SquaredHellinger,
        GeneratorKind::TotalVariation,
        GeneratorKind::ChiSquared,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Kl => "kl",
            GeneratorKind::ReverseKl => "reverse-kl",
            GeneratorKind::SquaredHellinger => "hellinger2",
            GeneratorKind::TotalVariation => "tv",
            GeneratorKind::ChiSquared => "chi2",
        }
    }

    fn eval(&self, u: f64) -> f64 {
        match self {
            GeneratorKind::Kl => -u.ln(),
            GeneratorKind::ReverseKl if u == 0.0 => 0.0,
            GeneratorKind::ReverseKl => u * u.ln(),
            GeneratorKind::SquaredHellinger => (u.sqrt() - 1.0).powi(2),
            GeneratorKind::TotalVariation => 0.5 * (u - 1.0).abs(),
            GeneratorKind::ChiSquared => (u - 1.0).powi(2),
        }
    }

    fn limit_at_zero(&self) -> f64 {
        match self {
            GeneratorKind::Kl => f64::INFINITY,
            GeneratorKind::ReverseKl => 0.0,
            GeneratorKind::SquaredHellinger | GeneratorKind::ChiSquared => 1.0,
            GeneratorKind::TotalVariation => 0.5,
        }
    }

    fn slope_at_infinity(&self) -> f64 {
        match self {
            GeneratorKind::Kl => 0.0,
            GeneratorKind::ReverseKl | GeneratorKind::ChiSquared => f64::INFINITY,
            GeneratorKind::SquaredHellinger => 1.0,
            GeneratorKind::TotalVariation => 0.5,
        }
    }

    /// `p f(q/p)` from `log p` and `log q`.
    fn weighted(&self, lp: f64, lq: f64) -> f64 {
        const NEG_INF: f64 = f64::NEG_INFINITY;
        match (lp == NEG_INF, lq == NEG_INF) {
            (true, true) => return 0.0,
            (true, false) => return scaled_limit(lq, self.slope_at_infinity()),
            (false, true) => return scaled_limit(lp, self.limit_at_zero()),
            (false, false) => {}
        }
        match self {
            GeneratorKind::Kl => lp.exp() * (lp - lq),
            GeneratorKind::ReverseKl => lq.exp() * (lq - lp),
            GeneratorKind::SquaredHellinger => {
                let d = (0.5 * lq).exp() - (0.5 * lp).exp();
                d * d
            }
            GeneratorKind::TotalVariation => 0.5 * (lq.exp() - lp.exp()).abs(),
            GeneratorKind::ChiSquared => (lp + 2.0 * ln_abs_expm1(lq - lp)).exp(),
        }
    }
}

/// `density * limit`, with `0 * limit = 0` only when the limit itself is zero.
fn scaled_limit(log_density: f64, limit: f64) -> f64 {
    if limit == 0.0 {
        0.0
    } else {
        log_density.exp() * limit
    }
}

/// `ln |e^y - 1|` without overflow for large `y`.
fn ln_abs_expm1(y: f64) -> f64 {
    if y > 30.0 {
        y + (-(-y).exp()).ln_1p()
    } else {
        y.exp_m1().abs().ln()
    }
}

/// A convex generator `f` with `f(1) = 0`, possibly in adjoint form `u f(1/u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FDivGenerator {
    kind: GeneratorKind,
    adjoint: bool,
}

impl FDivGenerator {
    pub const fn new(kind: GeneratorKind) -> Self {
        Self {
            kind,
            adjoint: false,
        }
    }

    pub const fn kl() -> Self {
        Self::new(GeneratorKind::Kl)
    }

    pub const fn reverse_kl() -> Self {
        Self::new(GeneratorKind::ReverseKl)
    }

    pub const fn squared_hellinger() -> Self {
        Self::new(GeneratorKind::SquaredHellinger)
    }

    pub const fn total_variation() -> Self {
        Self::new(GeneratorKind::TotalVariation)
    }

    pub const fn chi_squared() -> Self {
        Self::new(GeneratorKind::ChiSquared)
    }

    pub fn builtins() -> impl Iterator<Item = FDivGenerator> {
        GeneratorKind::ALL.into_iter().map(Self::new)
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn is_adjoint(&self) -> bool {
        self.adjoint
    }

    pub fn name(&self) -> String {
        if self.adjoint {
            format!("{}*", self.kind.name())
        } else {
            self.kind.name().to_string()
        }
    }

    /// `f*(u) = u f(1/u)`; `I_{f*}(p:q) = I_f(q:p)`. Applying it twice gives back `self`.
    pub fn adjoint(&self) -> Self {
        Self {
            kind: self.kind,
            adjoint: !self.adjoint,
        }
    }

    /// `f(u)` for `u > 0`; `u = 0` returns the limit `f(0+)`.
    pub fn eval(&self, u: f64) -> f64 {
        if u == 0.0 {
            return self.limit_at_zero();
        }
        if self.adjoint {
            u * self.kind.eval(1.0 / u)
        } else {
            self.kind.eval(u)
        }
    }

    /// `f(0+)`.
    pub fn limit_at_zero(&self) -> f64 {
        if self.adjoint {
            self.kind.slope_at_infinity()
        } else {
            self.kind.limit_at_zero()
        }
    }

    /// `lim_{u -> inf} f(u) / u`.
    pub fn slope_at_infinity(&self) -> f64 {
        if self.adjoint {
            self.kind.limit_at_zero()
        } else {
            self.kind.slope_at_infinity()
        }
    }

    /// Integrand `p f(q/p)` evaluated from log-densities, so that densities that
    /// underflow are still treated as positive. `-inf` means "outside the support".
    pub fn weighted(&self, log_p: f64, log_q: f64) -> f64 {
        if self.adjoint {
            // p f*(q/p) = q f(p/q)
            self.kind.weighted(log_q, log_p)
        } else {
            self.kind.weighted(log_p, log_q)
        }
    }
}

impl FromStr for FDivGenerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .map(Self::new)
            .ok_or_else(|| Error::UnknownGenerator(s.to_string()))
    }
}

impl fmt::Display for FDivGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
        }
    }
}

/// A value of an entropy-type quantity (entropy, cross-entropy), possibly `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub method: Method,
    pub err_estimate: f64,
    pub converged: bool,
}

impl Estimate {
    fn closed(value: f64) -> Self {
        Self {
            value,
            method: Method::ClosedForm,
            err_estimate: 0.0,
            converged: true,
        }
    }

    fn quadrature(r: IntegralResult, offset: f64) -> Self {
        Self {
            value: r.value + offset,
            method: Method::Quadrature,
            err_estimate: r.err_estimate,
            converged: r.converged,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceResult {
    /// Nonnegative, possibly `+inf`.
    pub value: f64,
    pub method: Method,
    pub err_estimate: f64,
    pub converged: bool,
    /// Value before noise clamping.
    pub raw_value: f64,
}

impl DivergenceResult {
    pub fn closed(value: f64) -> Self {
        Self::clamped(value, Method::ClosedForm, 0.0, true)
    }

    pub fn from_integral(r: &IntegralResult) -> Self {
        Self::clamped(r.value, Method::Quadrature, r.err_estimate, r.converged)
    }

    fn clamped(raw: f64, method: Method, err_estimate: f64, converged: bool) -> Self {
        let value = if (-NOISE_CLAMP..0.0).contains(&raw) {
            0.0
        } else {
            raw
        };
        Self {
            value,
            method,
            err_estimate,
            converged,
            raw_value: raw,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn was_clamped(&self) -> bool {
        self.value != self.raw_value
    }
}

/// `((l2 - l1)/s1, s2/s1) = e1^-1 . e2`: parameters of `q` once `p` is standard.
pub fn reduce_right(e1: &GroupElement, e2: &GroupElement) -> GroupElement {
    let (l1, s1) = (e1.location(), e1.scale_param());
    GroupElement::new((e2.location() - l1) / s1, e2.scale_param() / s1)
        .expect("quotient of valid elements is valid")
}

/// `((l1 - l2)/s2, s1/s2) = e2^-1 . e1`: parameters of `p` once `q` is standard.
pub fn reduce_left(e1: &GroupElement, e2: &GroupElement) -> GroupElement {
    reduce_right(e2, e1)
}

/// KL between Cauchy densities: `log(((s1 + s2)^2 + (l1 - l2)^2) / (4 s1 s2))`.
/// Symmetric in its arguments bit for bit.
pub fn cauchy_kl(e1: &GroupElement, e2: &GroupElement) -> f64 {
    let (s1, s2) = (e1.scale_param(), e2.scale_param());
    let dl = e1.location() - e2.location();
    let sum = s1 + s2;
    ((sum * sum + dl * dl) / (4.0 * (s1 * s2))).ln()
}

/// Cross-entropy between Cauchy scale densities: `log(pi (s1 + s2)^2 / s2)`.
pub fn cauchy_scale_cross_entropy(s1: f64, s2: f64) -> f64 {
    let sum = s1 + s2;
    (PI * sum * sum / s2).ln()
}

/// KL between Cauchy scale densities, `2 log(A/G)` with `A`, `G` the arithmetic
/// and geometric means of the scales.
pub fn cauchy_scale_kl(s1: f64, s2: f64) -> f64 {
    let arithmetic = 0.5 * (s1 + s2);
    let geometric = (s1 * s2).sqrt();
    2.0 * (arithmetic / geometric).ln()
}

/// KL from the half-normal scale density `s1` to the exponential scale density `s2`.
/// Only depends on `r = s1/s2`: `sqrt(2/pi) r - log r + log sqrt(2/pi) - 1/2`.
pub fn halfnormal_exp_kl(s1: f64, s2: f64) -> f64 {
    0.5 * (2.0 * (s2 / s1).ln() + FRAC_2_PI.ln() - 1.0) + FRAC_2_PI.sqrt() * (s1 / s2)
}

/// `int_R log(a^2 + x^2) / (b^2 + x^2) dx = (2 pi / b) log(a + b)` for `a, b > 0`.
pub fn log_integral_a(a: f64, b: f64) -> f64 {
    2.0 * PI / b * (a + b).ln()
}

/// Closed forms available for a `(p, q, generator)` triple.
fn closed_form_fdiv(
    gen: &FDivGenerator,
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
) -> Option<f64> {
    if *gen != FDivGenerator::kl() {
        return None;
    }
    match (p.family(), q.family()) {
        (Family::Cauchy, Family::Cauchy) => Some(cauchy_kl(&p.elem(), &q.elem())),
        (Family::HalfNormal, Family::Exponential) if p.location() == q.location() => {
            Some(halfnormal_exp_kl(p.scale(), q.scale()))
        }
        _ => None,
    }
}

/// `I_f(p : q)`: closed form when one is registered, otherwise quadrature of the
/// reduced problem `I_f(p_std : q_{reduce_right})`.
pub fn fdiv(
    gen: &FDivGenerator,
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    cfg: &QuadratureConfig,
) -> Result<DivergenceResult> {
    if let Some(v) = closed_form_fdiv(gen, p, q) {
        return Ok(DivergenceResult::closed(v));
    }
    fdiv_quadrature(gen, p, q, cfg)
}

/// Quadrature route of [`fdiv`], skipping the closed-form registry.
pub fn fdiv_quadrature(
    gen: &FDivGenerator,
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    cfg: &QuadratureConfig,
) -> Result<DivergenceResult> {
    let reduced = q.with_elem(reduce_right(&p.elem(), &q.elem()));
    let r = quadrature::fdiv_num(gen, &p.standard().standard(), &reduced, cfg)?;
    Ok(DivergenceResult::from_integral(&r))
}

pub fn kl(
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    cfg: &QuadratureConfig,
) -> Result<DivergenceResult> {
    fdiv(&FDivGenerator::kl(), p, q, cfg)
}

/// Result plus, when a closed form was used, the quadrature cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verified {
    pub result: DivergenceResult,
    pub quadrature: Option<DivergenceResult>,
}

impl Verified {
    /// `|closed form - quadrature|`, when both exist and are finite.
    pub fn discrepancy(&self) -> Option<f64> {
        let q = self.quadrature?;
        if self.result.value == q.value {
            return Some(0.0);
        }
        Some((self.result.value - q.value).abs()).filter(|d| d.is_finite())
    }
}

pub fn fdiv_verified(
    gen: &FDivGenerator,
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    cfg: &QuadratureConfig,
) -> Result<Verified> {
    let result = fdiv(gen, p, q, cfg)?;
    let quadrature = match result.method {
        Method::ClosedForm => Some(fdiv_quadrature(gen, p, q, cfg)?),
        Method::Quadrature => None,
    };
    Ok(Verified { result, quadrature })
}

/// `h(p_{l,s}) = h(p) + log s`, closed form when the standard entropy is known.
pub fn entropy(p: &LocationScaleDensity, cfg: &QuadratureConfig) -> Result<Estimate> {
    if let Some(h) = p.entropy_closed() {
        return Ok(Estimate::closed(h));
    }
    let r = quadrature::entropy_num(&p.standard().standard(), cfg)?;
    Ok(Estimate::quadrature(r, p.scale().ln()))
}

/// `h^x(p_{e1} : q_{e2}) = h^x(p : q_{e1^-1 . e2}) + log s1`.
pub fn cross_entropy(
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    if p.family() == Family::Cauchy && q.family() == Family::Cauchy && p.location() == q.location()
    {
        return Ok(Estimate::closed(cauchy_scale_cross_entropy(
            p.scale(),
            q.scale(),
        )));
    }
    let reduced = q.with_elem(reduce_right(&p.elem(), &q.elem()));
    let r = quadrature::cross_entropy_num(&p.standard().standard(), &reduced, cfg)?;
    Ok(Estimate::quadrature(r, p.scale().ln()))
}

/// `int p(x) log(p(x + l) / p(x - l)) dx`; zero for all `l` exactly when KL within
/// the location family is symmetric.
pub fn location_symmetry_defect(
    std: &StandardDensity,
    l: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if std.is_half_line() {
        return Err(Error::Precondition(format!(
            "location symmetry defect needs support R, `{}` lives on a half-line",
            std.name()
        )));
    }
    if !l.is_finite() {
        return Err(Error::Precondition(format!(
            "location shift must be finite, got {l}"
        )));
    }
    if l == 0.0 {
        return Ok(0.0);
    }
    let integrand = |x: f64| {
        let lp = std.log_pdf(x);
        lp.exp() * (std.log_pdf(x + l) - std.log_pdf(x - l))
    };
    let r = quadrature::integrate_with_breakpoints(
        integrand,
        f64::NEG_INFINITY,
        f64::INFINITY,
        &[0.0, l, -l],
        cfg,
    )?;
    Ok(r.value)
}

/// `int p(x) log(p(x/s) / p(s x)) dx - 2 log s`; zero for all `s` exactly when KL
/// within the scale family is symmetric.
pub fn scale_symmetry_defect(std: &StandardDensity, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Precondition(format!(
            "scale must be finite and positive, got {s}"
        )));
    }
    if s == 1.0 {
        return Ok(0.0);
    }
    let integrand = |x: f64| {
        let lp = std.log_pdf(x);
        if lp == f64::NEG_INFINITY {
            return 0.0;
        }
        lp.exp() * (std.log_pdf(x / s) - std.log_pdf(s * x))
    };
    let r = quadrature::integrate_with_breakpoints(
        integrand,
        std.support_lower(),
        f64::INFINITY,
        &[0.0],
        cfg,
    )?;
    Ok(r.value - 2.0 * s.ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryDefect {
    /// `I_f(p:q) - I_f(q:p)` computed as a single integral.
    Finite(f64),
    /// At least one direction is infinite; no numeric comparison is made.
    NonComparable { forward: f64, backward: f64 },
}

impl SymmetryDefect {
    pub fn finite(&self) -> Option<f64> {
        match self {
            SymmetryDefect::Finite(d) => Some(*d),
            SymmetryDefect::NonComparable { .. } => None,
        }
    }
}

/// `int (p f(q/p) - q f(p/q)) dx`.
pub fn fdiv_symmetry_defect(
    gen: &FDivGenerator,
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    cfg: &QuadratureConfig,
) -> Result<SymmetryDefect> {
    let forward = quadrature::fdiv_num(gen, p, q, cfg)?.value;
    let backward = quadrature::fdiv_num(gen, q, p, cfg)?.value;
    if !(forward.is_finite() && backward.is_finite()) {
        return Ok(SymmetryDefect::NonComparable { forward, backward });
    }
    let integrand = |x: f64| {
        let (lp, lq) = (p.log_pdf(x), q.log_pdf(x));
        gen.weighted(lp, lq) - gen.weighted(lq, lp)
    };
    let mut pts = vec![
        p.location(),
        q.location(),
        p.support_lower(),
        q.support_lower(),
    ];
    pts.extend(p.breakpoints());
    pts.extend(q.breakpoints());
    let lower = p.support_lower().min(q.support_lower());
    let r = quadrature::integrate_with_breakpoints(integrand, lower, f64::INFINITY, &pts, cfg)?;
    Ok(SymmetryDefect::Finite(r.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::fdiv_num;
    use proptest::prelude::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn e(l: f64, s: f64) -> GroupElement {
        GroupElement::new(l, s).unwrap()
    }

    fn d(f: Family, l: f64, s: f64) -> LocationScaleDensity {
        LocationScaleDensity::from_params(f, l, s).unwrap()
    }

    #[test]
    fn generators_vanish_at_one() {
        for g in FDivGenerator::builtins() {
            assert_eq!(g.eval(1.0), 0.0, "{g}");
            assert_eq!(g.adjoint().eval(1.0), 0.0, "{g}*");
        }
    }

    #[test]
    fn generator_names_round_trip() {
        for g in FDivGenerator::builtins() {
            assert_eq!(g.name().parse::<FDivGenerator>().unwrap(), g);
        }
        assert!(matches!(
            "js".parse::<FDivGenerator>(),
            Err(Error::UnknownGenerator(_))
        ));
    }

    #[test]
    fn adjoint_examples() {
        let kl = FDivGenerator::kl();
        let a = kl.adjoint();
        for u in [0.3, 2.0, 7.5] {
            assert!((a.eval(u) - u * u.ln()).abs() < 1e-15);
        }
        assert_eq!(a.eval(1.0), 0.0);
        assert_eq!(a.adjoint(), kl);
        for u in [0.5, 2.0] {
            assert_eq!(a.adjoint().eval(u), kl.eval(u));
        }
        assert_eq!(a.limit_at_zero(), 0.0);
        assert_eq!(a.slope_at_infinity(), f64::INFINITY);
        // I_{kl*}(normal : cauchy) = KL(cauchy : normal) = inf
        let n = d(Family::Normal, 0.0, 1.0);
        let c = d(Family::Cauchy, 0.0, 1.0);
        assert_eq!(fdiv_num(&a, &n, &c, &cfg()).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn weighted_conventions() {
        let ninf = f64::NEG_INFINITY;
        for g in FDivGenerator::builtins() {
            assert_eq!(g.weighted(ninf, ninf), 0.0);
        }
        assert_eq!(FDivGenerator::kl().weighted(0.0, ninf), f64::INFINITY);
        assert_eq!(FDivGenerator::kl().weighted(ninf, 0.0), 0.0);
        assert_eq!(
            FDivGenerator::reverse_kl().weighted(ninf, 0.0),
            f64::INFINITY
        );
        assert_eq!(FDivGenerator::total_variation().weighted(ninf, 0.0), 0.5);
        assert_eq!(FDivGenerator::squared_hellinger().weighted(0.0, ninf), 1.0);
        // p underflowing but positive must not be treated as zero
        assert!(FDivGenerator::reverse_kl()
            .weighted(-800.0, -1.0)
            .is_finite());
        // chi2 with huge ratio does not overflow before it must
        let v = FDivGenerator::chi_squared().weighted(-50.0, -1.0);
        assert!((v - (-50.0f64 + 2.0 * 49.0).exp()).abs() / v < 1e-12);
    }

    #[test]
    fn weighted_matches_eval() {
        for g in FDivGenerator::builtins().flat_map(|g| [g, g.adjoint()]) {
            for (p, q) in [(0.3, 0.9), (1.2, 0.05), (0.5, 0.5), (2.0, 3.0)] {
                let want = p * g.eval(q / p);
                let got = g.weighted(f64::ln(p), f64::ln(q));
                assert!(
                    (want - got).abs() < 1e-14 * want.abs().max(1.0),
                    "{g} {p} {q}"
                );
            }
        }
    }

    #[test]
    fn reductions() {
        assert_eq!(reduce_right(&e(1.0, 2.0), &e(3.0, 4.0)), e(1.0, 2.0));
        assert_eq!(reduce_left(&e(1.0, 2.0), &e(3.0, 4.0)), e(-0.5, 0.5));
        assert_eq!(
            reduce_right(&e(1.5, 3.0), &e(1.5, 3.0)),
            GroupElement::identity()
        );
        assert_eq!(
            reduce_left(&e(1.5, 3.0), &e(1.5, 3.0)),
            GroupElement::identity()
        );
    }

    fn elem() -> impl Strategy<Value = GroupElement> {
        (-5.0..5.0f64, -2.0..2.0f64).prop_map(|(l, ls)| e(l, ls.exp()))
    }

    proptest! {
        #[test]
        fn reduce_right_is_inverse_compose(a in elem(), b in elem()) {
            let r = reduce_right(&a, &b);
            let c = a.inverse().compose(&b);
            prop_assert!((r.location() - c.location()).abs() <= 1e-12 * c.location().abs().max(1.0));
            prop_assert!((r.scale_param() - c.scale_param()).abs() <= 1e-14 * c.scale_param());
        }

        #[test]
        fn reduce_left_is_swapped_inverse(a in elem(), b in elem()) {
            prop_assert_eq!(reduce_left(&a, &b), reduce_right(&b, &a));
            let swapped = reduce_right(&b, &a);
            let inv = reduce_right(&a, &b).inverse();
            prop_assert!((swapped.location() - inv.location()).abs() <= 1e-12 * inv.location().abs().max(1.0));
            prop_assert!((swapped.scale_param() - inv.scale_param()).abs() <= 1e-14 * inv.scale_param());
        }

        #[test]
        fn generators_are_convex(a in 1e-3..100.0f64, b in 1e-3..100.0f64, t in 0.0..1.0f64) {
            for g in FDivGenerator::builtins().flat_map(|g| [g, g.adjoint()]) {
                let m = t * a + (1.0 - t) * b;
                let chord = t * g.eval(a) + (1.0 - t) * g.eval(b);
                prop_assert!(g.eval(m) <= chord + 1e-12 * chord.abs().max(1.0), "{}", g);
            }
        }

        #[test]
        fn cauchy_kl_am_gm(s1 in 0.01..100.0f64, s2 in 0.01..100.0f64) {
            let v = cauchy_scale_kl(s1, s2);
            prop_assert!(v >= 0.0);
            prop_assert_eq!(v, cauchy_scale_kl(s2, s1));
            let generic = cauchy_kl(&e(0.0, s1), &e(0.0, s2));
            prop_assert!((v - generic).abs() < 1e-12);
        }
    }

    #[test]
    fn cauchy_closed_forms() {
        assert_eq!(cauchy_kl(&e(0.0, 1.0), &e(0.0, 1.0)), 0.0);
        assert!((cauchy_kl(&e(0.0, 1.0), &e(1.0, 1.0)) - 1.25f64.ln()).abs() < 1e-16);
        assert!((cauchy_kl(&e(0.0, 1.0), &e(1.0, 1.0)) - 0.223_143_6).abs() < 1e-7);
        let v = 2.0 * (3.0 / (2.0 * 2.0f64.sqrt())).ln();
        assert!((cauchy_kl(&e(0.0, 1.0), &e(0.0, 2.0)) - v).abs() < 1e-15);
        assert!((v - 0.117_783_0).abs() < 1e-7);

        assert!((cauchy_scale_cross_entropy(1.0, 1.0) - (4.0 * PI).ln()).abs() < 1e-15);
        assert!((cauchy_scale_cross_entropy(1.0, 2.0) - 2.648_807_3).abs() < 1e-7);

        assert_eq!(cauchy_scale_kl(1.0, 1.0), 0.0);
        assert!((cauchy_scale_kl(1.0, 2.0) - 0.117_783_0).abs() < 1e-7);
        for lambda in [0.1, 10.0] {
            assert!(
                (cauchy_scale_kl(lambda, 2.0 * lambda) - cauchy_scale_kl(1.0, 2.0)).abs() < 1e-15
            );
        }
    }

    #[test]
    fn halfnormal_exponential_closed_form() {
        assert!((halfnormal_exp_kl(1.0, 1.0) - 0.072_093_2).abs() < 1e-7);
        let r = (PI / 2.0).sqrt();
        let min = halfnormal_exp_kl(r, 1.0);
        assert!((min - (0.5 + FRAC_2_PI.ln())).abs() < 1e-15);
        assert!((min - 0.048_417_3).abs() < 1e-7);
        assert!((halfnormal_exp_kl(2.0, 4.0) - halfnormal_exp_kl(1.0, 2.0)).abs() < 1e-15);
        // r* is a minimum
        for r2 in [0.9 * r, 1.1 * r] {
            assert!(halfnormal_exp_kl(r2, 1.0) > min);
        }
    }

    #[test]
    fn log_integral_values_and_quadrature() {
        assert!((log_integral_a(1.0, 1.0) - 4.355_172_1).abs() < 1e-7);
        assert!((log_integral_a(1.0, 2.0) - 3.451_392_3).abs() < 1e-7);
        assert!((log_integral_a(3.0, 1.0) - 8.710_344_4).abs() < 1e-7);
        for (a, b) in [(1.0, 1.0), (1.0, 2.0), (3.0, 1.0), (0.2, 5.0)] {
            let f = |x: f64| (a * a + x * x).ln() / (b * b + x * x);
            let r = quadrature::integrate(f, f64::NEG_INFINITY, f64::INFINITY, &cfg()).unwrap();
            assert!((r.value - log_integral_a(a, b)).abs() < 1e-8, "({a},{b})");
        }
    }

    #[test]
    fn fdiv_dispatch() {
        let r = kl(
            &d(Family::Cauchy, 0.0, 1.0),
            &d(Family::Cauchy, 1.0, 1.0),
            &cfg(),
        )
        .unwrap();
        assert_eq!(r.method, Method::ClosedForm);
        assert!((r.value - 0.223_143_6).abs() < 1e-7);

        let r = kl(
            &d(Family::Cauchy, 0.0, 1.0),
            &d(Family::Normal, 0.0, 1.0),
            &cfg(),
        )
        .unwrap();
        assert_eq!(r.method, Method::Quadrature);
        assert_eq!(r.value, f64::INFINITY);

        let r = kl(
            &d(Family::HalfNormal, 0.0, 1.0),
            &d(Family::Exponential, 0.0, 1.0),
            &cfg(),
        )
        .unwrap();
        assert_eq!(r.method, Method::ClosedForm);
        assert!((r.value - 0.072_093_2).abs() < 1e-7);

        // shifted exponential leaves half-normal mass uncovered
        let r = kl(
            &d(Family::HalfNormal, 0.0, 1.0),
            &d(Family::Exponential, 0.5, 1.0),
            &cfg(),
        )
        .unwrap();
        assert_eq!(r.value, f64::INFINITY);

        for g in FDivGenerator::builtins() {
            for f in Family::ALL {
                let p = d(f, -0.4, 2.2);
                let r = fdiv(&g, &p, &p, &cfg()).unwrap();
                assert_eq!(r.value, 0.0, "{g} {f}");
            }
        }
    }

    #[test]
    fn gaussian_kl_by_quadrature() {
        let r = kl(
            &d(Family::Normal, 0.0, 1.0),
            &d(Family::Normal, 1.0, 1.0),
            &cfg(),
        )
        .unwrap();
        assert_eq!(r.method, Method::Quadrature);
        assert!((r.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn verified_reports_agreement() {
        let v = fdiv_verified(
            &FDivGenerator::kl(),
            &d(Family::Cauchy, 0.0, 1.0),
            &d(Family::Cauchy, 2.0, 3.0),
            &cfg(),
        )
        .unwrap();
        assert!(v.discrepancy().unwrap() < 1e-8);
        let v = fdiv_verified(
            &FDivGenerator::total_variation(),
            &d(Family::Cauchy, 0.0, 1.0),
            &d(Family::Cauchy, 2.0, 3.0),
            &cfg(),
        )
        .unwrap();
        assert!(v.quadrature.is_none());
    }

    #[test]
    fn clamping() {
        let r = DivergenceResult::closed(-5e-10);
        assert_eq!(r.value, 0.0);
        assert!(r.was_clamped());
        assert_eq!(r.raw_value, -5e-10);
        let r = DivergenceResult::closed(-2e-9);
        assert_eq!(r.value, -2e-9);
    }

    #[test]
    fn entropy_and_cross_entropy_dispatch() {
        let h = entropy(&d(Family::Cauchy, 3.0, 2.0), &cfg()).unwrap();
        assert_eq!(h.method, Method::ClosedForm);
        assert!((h.value - (8.0 * PI).ln()).abs() < 1e-15);
        let h = entropy(&d(Family::Normal, 3.0, 2.0), &cfg()).unwrap();
        assert_eq!(h.method, Method::Quadrature);
        let want = 0.5 * (2.0 * PI * std::f64::consts::E).ln() + 2.0f64.ln();
        assert!((h.value - want).abs() < 1e-9);
        let x = cross_entropy(
            &d(Family::Cauchy, 1.0, 1.0),
            &d(Family::Cauchy, 1.0, 2.0),
            &cfg(),
        )
        .unwrap();
        assert_eq!(x.method, Method::ClosedForm);
        assert!((x.value - 2.648_807_3).abs() < 1e-7);
        let x = cross_entropy(
            &d(Family::Cauchy, 1.0, 1.0),
            &d(Family::Cauchy, -1.0, 2.0),
            &cfg(),
        )
        .unwrap();
        assert_eq!(x.method, Method::Quadrature);
        let direct = quadrature::cross_entropy_num(
            &d(Family::Cauchy, 1.0, 1.0),
            &d(Family::Cauchy, -1.0, 2.0),
            &cfg(),
        )
        .unwrap();
        assert!((x.value - direct.value).abs() < 1e-8);
    }

    #[test]
    fn location_defects() {
        let normal = StandardDensity::new(Family::Normal);
        let cauchy = StandardDensity::new(Family::Cauchy);
        assert!(
            location_symmetry_defect(&normal, 1.0, &cfg())
                .unwrap()
                .abs()
                < 1e-8
        );
        assert!(
            location_symmetry_defect(&cauchy, 2.0, &cfg())
                .unwrap()
                .abs()
                < 1e-8
        );
        for f in [Family::Cauchy, Family::Normal, Family::Laplace] {
            assert_eq!(
                location_symmetry_defect(&StandardDensity::new(f), 0.0, &cfg()).unwrap(),
                0.0
            );
        }
        assert!(
            location_symmetry_defect(&StandardDensity::new(Family::Exponential), 1.0, &cfg())
                .is_err()
        );
    }

    #[test]
    fn scale_defects() {
        let cauchy = StandardDensity::new(Family::Cauchy);
        assert!(scale_symmetry_defect(&cauchy, 2.0, &cfg()).unwrap().abs() < 1e-8);
        for f in Family::ALL {
            assert_eq!(
                scale_symmetry_defect(&StandardDensity::new(f), 1.0, &cfg()).unwrap(),
                0.0
            );
        }
        // exponential: s - 1/s - 2 log s
        let ex =
            scale_symmetry_defect(&StandardDensity::new(Family::Exponential), 2.0, &cfg()).unwrap();
        assert!((ex - (1.5 - 2.0 * 2.0f64.ln())).abs() < 1e-9);
        assert!(ex.abs() > 0.1);
        assert!(scale_symmetry_defect(&cauchy, 0.0, &cfg()).is_err());
    }

    #[test]
    fn fdiv_symmetry_defects() {
        let kl = FDivGenerator::kl();
        let a = fdiv_symmetry_defect(
            &kl,
            &d(Family::Cauchy, 0.0, 1.0),
            &d(Family::Cauchy, 3.0, 1.0),
            &cfg(),
        )
        .unwrap();
        assert!(a.finite().unwrap().abs() < 1e-8);
        let b = fdiv_symmetry_defect(
            &kl,
            &d(Family::Cauchy, 0.0, 1.0),
            &d(Family::Cauchy, 0.0, 3.0),
            &cfg(),
        )
        .unwrap();
        assert!(b.finite().unwrap().abs() < 1e-8);
        let tv = FDivGenerator::total_variation();
        let c = fdiv_symmetry_defect(
            &tv,
            &d(Family::Normal, 0.0, 1.0),
            &d(Family::Laplace, 1.0, 0.5),
            &cfg(),
        )
        .unwrap();
        assert!(c.finite().unwrap().abs() < 1e-8);
        let n = fdiv_symmetry_defect(
            &kl,
            &d(Family::Cauchy, 0.0, 1.0),
            &d(Family::Normal, 0.0, 1.0),
            &cfg(),
        )
        .unwrap();
        assert!(
            matches!(n, SymmetryDefect::NonComparable { forward, .. } if forward.is_infinite())
        );
        // an asymmetric case really is asymmetric
        let h = fdiv_symmetry_defect(
            &kl,
            &d(Family::Normal, 0.0, 1.0),
            &d(Family::Normal, 0.0, 2.0),
            &cfg(),
        )
        .unwrap();
        assert!(h.finite().unwrap().abs() > 1e-2);
    }
}
