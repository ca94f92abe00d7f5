//! Seeded randomized verification batteries.
//!
//! Every item compares two independently computed quantities (usually a closed
//! form or a rewritten integral against direct quadrature) and records the
//! largest defect seen against a fixed tolerance. Each item draws from its own
//! generator seeded from the run seed and the item's name, so items do not
//! perturb each other's parameters.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::densities::{Family, LocationScaleDensity, StandardDensity};
use crate::divergence::{self, FDivGenerator};
use crate::group::GroupElement;
use crate::projection;
use crate::quadrature::{self, QuadratureConfig};
use crate::{Error, Result};

pub const IDENTITY_TOL: f64 = 1e-6;
pub const CLOSED_FORM_TOL: f64 = 1e-6;
pub const SYMMETRY_CONDITION_TOL: f64 = 1e-8;
pub const FORMULA_SYMMETRY_TOL: f64 = 1e-12;
pub const RATIO_TOL: f64 = 1e-4;

/// Random locations are drawn from `[-LOC_RANGE, LOC_RANGE]`.
pub const LOC_RANGE: f64 = 3.0;
/// Random scales are `exp(u)` with `u` in `[-LOG_SCALE_RANGE, LOG_SCALE_RANGE]`.
pub const LOG_SCALE_RANGE: f64 = 1.5;

/// Ordered (p, q) family pairs on the whole line whose cross-entropy and KL are finite
/// for every choice of parameters.
pub const FINITE_PAIRS: [(Family, Family); 7] = [
    (Family::Normal, Family::Normal),
    (Family::Normal, Family::Cauchy),
    (Family::Normal, Family::Laplace),
    (Family::Laplace, Family::Laplace),
    (Family::Laplace, Family::Cauchy),
    (Family::Laplace, Family::Normal),
    (Family::Cauchy, Family::Cauchy),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Symmetry,
    ClosedForms,
    Projection,
    All,
}

impl Suite {
    fn parts(&self) -> &'static [Suite] {
        match self {
            Suite::All => &[
                Suite::Identities,
                Suite::Symmetry,
                Suite::ClosedForms,
                Suite::Projection,
            ],
            Suite::Identities => &[Suite::Identities],
            Suite::Symmetry => &[Suite::Symmetry],
            Suite::ClosedForms => &[Suite::ClosedForms],
            Suite::Projection => &[Suite::Projection],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Symmetry => "symmetry",
            Suite::ClosedForms => "closed-forms",
            Suite::Projection => "projection",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Suite::Identities,
            Suite::Symmetry,
            Suite::ClosedForms,
            Suite::Projection,
            Suite::All,
        ]
        .into_iter()
        .find(|x| x.name() == s)
        .ok_or_else(|| {
            Error::Precondition(format!(
                "unknown suite `{s}` (valid: identities, symmetry, closed-forms, projection, all)"
            ))
        })
    }
}

/// Outcome of one check item.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemReport {
    pub suite: &'static str,
    pub name: String,
    pub tolerance: f64,
    pub trials: usize,
    /// Largest defect over all trials (`+inf` if a trial produced an infinite or failed comparison).
    pub max_defect: f64,
    pub failures: usize,
    /// Context of the first failure, if any.
    pub first_failure: Option<String>,
}

impl ItemReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for ItemReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{}: max defect {:.3e} (tol {:.0e}, {} trials)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.max_defect,
            self.tolerance,
            self.trials
        )?;
        if let Some(ctx) = &self.first_failure {
            write!(f, " first failure: {ctx}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub items: Vec<ItemReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.items.iter().all(ItemReport::passed)
    }

    pub fn failures(&self) -> usize {
        self.items.iter().filter(|i| !i.passed()).count()
    }

    pub fn item(&self, name: &str) -> Option<&ItemReport> {
        self.items.iter().find(|i| i.name == name)
    }
}

struct Tally {
    report: ItemReport,
}

impl Tally {
    fn new(suite: Suite, name: &str, tolerance: f64) -> Self {
        Self {
            report: ItemReport {
                suite: suite.name(),
                name: name.to_string(),
                tolerance,
                trials: 0,
                max_defect: 0.0,
                failures: 0,
                first_failure: None,
            },
        }
    }

    /// Records `|defect|`; NaN counts as an infinite defect.
    fn record(&mut self, defect: f64, context: impl FnOnce() -> String) {
        let d = if defect.is_nan() {
            f64::INFINITY
        } else {
            defect.abs()
        };
        let r = &mut self.report;
        r.trials += 1;
        r.max_defect = r.max_defect.max(d);
        if d > r.tolerance {
            r.failures += 1;
            if r.first_failure.is_none() {
                r.first_failure = Some(format!("{} (defect {d:.3e})", context()));
            }
        }
    }

    /// Records a yes/no property as defect 0 or +inf.
    fn require(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.record(if ok { 0.0 } else { f64::INFINITY }, context);
    }

    fn compare(&mut self, a: f64, b: f64, context: impl FnOnce() -> String) {
        let defect = if a == b { 0.0 } else { (a - b).abs() };
        self.record(defect, || format!("{} [{a} vs {b}]", context()));
    }

    fn finish(self) -> ItemReport {
        self.report
    }
}

/// Parameter sampler for the batteries.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64, item: &str) -> Self {
        // FNV-1a over the item name keeps streams distinct and stable across runs
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in item.bytes() {
            h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
        }
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed ^ h),
        }
    }

    pub fn location(&mut self) -> f64 {
        self.rng.random_range(-LOC_RANGE..=LOC_RANGE)
    }

    pub fn scale(&mut self) -> f64 {
        self.rng
            .random_range(-LOG_SCALE_RANGE..=LOG_SCALE_RANGE)
            .exp()
    }

    pub fn element(&mut self) -> GroupElement {
        let l = self.location();
        let s = self.scale();
        GroupElement::new(l, s).expect("sampled element is valid")
    }

    pub fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.rng.random_range(0..items.len())]
    }
}

fn d(f: Family, l: f64, s: f64) -> Result<LocationScaleDensity> {
    LocationScaleDensity::from_params(f, l, s)
}

pub fn run(suite: Suite, trials: usize, seed: u64, cfg: &QuadratureConfig) -> Result<Report> {
    let mut items = Vec::new();
    for part in suite.parts() {
        match part {
            Suite::Identities => identities(trials, seed, cfg, &mut items)?,
            Suite::Symmetry => symmetry(trials, seed, cfg, &mut items)?,
            Suite::ClosedForms => closed_forms(trials, seed, cfg, &mut items)?,
            Suite::Projection => projections(cfg, &mut items)?,
            Suite::All => unreachable!("expanded by parts()"),
        }
    }
    Ok(Report { items })
}

type CrossEntropyRule = fn(&mut Sampler, Family, Family) -> Result<Vec<(Side, Side, f64)>>;

/// `(p, q)` pair of one side of an identity.
type Side = (LocationScaleDensity, LocationScaleDensity);

/// The cross-entropy rewrite rules, each as `lhs = rhs + offset` (possibly several rhs).
fn cross_entropy_rules() -> Vec<(&'static str, CrossEntropyRule)> {
    vec![
        ("cross-entropy/left-scale", |rng, pf, qf| {
            let (l1, s1, l2, s2, lam) = (
                rng.location(),
                rng.scale(),
                rng.location(),
                rng.scale(),
                rng.scale(),
            );
            let lhs = (d(pf, l1, lam * s1)?, d(qf, l2, s2)?);
            let rhs = (d(pf, l1 / lam, s1)?, d(qf, l2 / lam, s2 / lam)?);
            Ok(vec![(lhs, rhs, lam.ln())])
        }),
        ("cross-entropy/left-translation", |rng, pf, qf| {
            let (l1, s1, l2, s2, a) = (
                rng.location(),
                rng.scale(),
                rng.location(),
                rng.scale(),
                rng.location(),
            );
            let lhs = (d(pf, l1 + a, s1)?, d(qf, l2, s2)?);
            let rhs = (d(pf, l1, s1)?, d(qf, l2 - a, s2)?);
            Ok(vec![(lhs, rhs, 0.0)])
        }),
        ("cross-entropy/right-scale", |rng, pf, qf| {
            let (l1, s1, l2, s2, lam) = (
                rng.location(),
                rng.scale(),
                rng.location(),
                rng.scale(),
                rng.scale(),
            );
            let lhs = (d(pf, l1, s1)?, d(qf, l2, lam * s2)?);
            let rhs = (d(pf, l1 / lam, s1 / lam)?, d(qf, l2 / lam, s2)?);
            Ok(vec![(lhs, rhs, lam.ln())])
        }),
        ("cross-entropy/right-translation", |rng, pf, qf| {
            let (l1, s1, l2, s2, a) = (
                rng.location(),
                rng.scale(),
                rng.location(),
                rng.scale(),
                rng.location(),
            );
            let lhs = (d(pf, l1, s1)?, d(qf, l2 + a, s2)?);
            let rhs = (d(pf, l1 - a, s1)?, d(qf, l2, s2)?);
            Ok(vec![(lhs, rhs, 0.0)])
        }),
        ("cross-entropy/double-scale", |rng, pf, qf| {
            let (l1, s1, l2, s2, lam) = (
                rng.location(),
                rng.scale(),
                rng.location(),
                rng.scale(),
                rng.scale(),
            );
            let lhs = (d(pf, l1, lam * s1)?, d(qf, l2, lam * s2)?);
            let rhs = (d(pf, l1 / lam, s1)?, d(qf, l2 / lam, s2)?);
            Ok(vec![(lhs, rhs, lam.ln())])
        }),
        ("cross-entropy/two-translation", |rng, pf, qf| {
            let (l1, s1, l2, s2) = (rng.location(), rng.scale(), rng.location(), rng.scale());
            let (a, b) = (rng.location(), rng.location());
            let lhs = (d(pf, l1 + a, s1)?, d(qf, l2 + b, s2)?);
            let rhs1 = (d(pf, l1, s1)?, d(qf, l2 + b - a, s2)?);
            let rhs2 = (d(pf, l1 + a - b, s1)?, d(qf, l2, s2)?);
            Ok(vec![(lhs, rhs1, 0.0), (lhs, rhs2, 0.0)])
        }),
    ]
}

type KlRule = fn(&mut Sampler, Family, Family) -> Result<(Side, Side)>;

/// The four KL rewrite identities, each as `lhs = rhs`.
fn kl_rules() -> Vec<(&'static str, KlRule)> {
    vec![
        ("kl/left-translation", |rng, pf, qf| {
            let (l1, s1, l2, s2, l, lam) = (
                rng.location(),
                rng.scale(),
                rng.location(),
                rng.scale(),
                rng.location(),
                rng.scale(),
            );
            Ok((
                (d(pf, l1 + l, s1)?, d(qf, l2, lam * s2)?),
                (d(pf, l1, s1)?, d(qf, l2 - l, lam * s2)?),
            ))
        }),
        ("kl/left-scale", |rng, pf, qf| {
            let (l1, s1, l2, s2, lam) = (
                rng.location(),
                rng.scale(),
                rng.location(),
                rng.scale(),
                rng.scale(),
            );
            Ok((
                (d(pf, l1, lam * s1)?, d(qf, l2, s2)?),
                (d(pf, l1 / lam, s1)?, d(qf, l2 / lam, s2 / lam)?),
            ))
        }),
        ("kl/right-translation", |rng, pf, qf| {
            let (l1, s1, l2, s2, l) = (
                rng.location(),
                rng.scale(),
                rng.location(),
                rng.scale(),
                rng.location(),
            );
            Ok((
                (d(pf, l1, s1)?, d(qf, l2 + l, s2)?),
                (d(pf, l1 - l, s1)?, d(qf, l2, s2)?),
            ))
        }),
        ("kl/right-scale", |rng, pf, qf| {
            let (l1, s1, l2, s2, lam) = (
                rng.location(),
                rng.scale(),
                rng.location(),
                rng.scale(),
                rng.scale(),
            );
            Ok((
                (d(pf, l1, s1)?, d(qf, l2, lam * s2)?),
                (d(pf, l1 / lam, s1 / lam)?, d(qf, l2 / lam, s2)?),
            ))
        }),
    ]
}

fn identities(
    trials: usize,
    seed: u64,
    cfg: &QuadratureConfig,
    out: &mut Vec<ItemReport>,
) -> Result<()> {
    let suite = Suite::Identities;
    for (name, rule) in cross_entropy_rules() {
        let mut rng = Sampler::new(seed, name);
        let mut t = Tally::new(suite, name, IDENTITY_TOL);
        for _ in 0..trials {
            let (pf, qf) = rng.pick(&FINITE_PAIRS);
            for (lhs, rhs, offset) in rule(&mut rng, pf, qf)? {
                let a = quadrature::cross_entropy_num(&lhs.0, &lhs.1, cfg)?.value;
                let b = quadrature::cross_entropy_num(&rhs.0, &rhs.1, cfg)?.value + offset;
                t.compare(a, b, || {
                    format!("h(x)({}:{}) vs h(x)({}:{})", lhs.0, lhs.1, rhs.0, rhs.1)
                });
            }
        }
        out.push(t.finish());
    }

    let kl = FDivGenerator::kl();
    for (name, rule) in kl_rules() {
        let mut rng = Sampler::new(seed, name);
        let mut t = Tally::new(suite, name, IDENTITY_TOL);
        for _ in 0..trials {
            let (pf, qf) = rng.pick(&FINITE_PAIRS);
            let (lhs, rhs) = rule(&mut rng, pf, qf)?;
            let a = quadrature::fdiv_num(&kl, &lhs.0, &lhs.1, cfg)?.value;
            let b = quadrature::fdiv_num(&kl, &rhs.0, &rhs.1, cfg)?.value;
            t.compare(a, b, || {
                format!("KL({}:{}) vs KL({}:{})", lhs.0, lhs.1, rhs.0, rhs.1)
            });
        }
        out.push(t.finish());
    }

    out.push(reduction_theorem(trials, seed, cfg)?);
    out.push(scale_invariance(cfg)?);
    out.push(scale_ratio(trials, seed, cfg)?);
    Ok(())
}

/// Direct, right-reduced and left-reduced evaluations of the same f-divergence.
pub fn reduction_theorem(trials: usize, seed: u64, cfg: &QuadratureConfig) -> Result<ItemReport> {
    let name = "reduction-theorem";
    let gens = [
        FDivGenerator::kl(),
        FDivGenerator::squared_hellinger(),
        FDivGenerator::total_variation(),
    ];
    let mut rng = Sampler::new(seed, name);
    let mut t = Tally::new(Suite::Identities, name, IDENTITY_TOL);
    for _ in 0..trials {
        let pf = rng.pick(&Family::ALL);
        let qf = rng.pick(&Family::ALL);
        let (e1, e2) = (rng.element(), rng.element());
        let p = StandardDensity::new(pf);
        let q = StandardDensity::new(qf);
        for gen in &gens {
            let direct = quadrature::fdiv_num(gen, &p.at(e1), &q.at(e2), cfg)?.value;
            let right = quadrature::fdiv_num(
                gen,
                &p.standard(),
                &q.at(divergence::reduce_right(&e1, &e2)),
                cfg,
            )?
            .value;
            let left = quadrature::fdiv_num(
                gen,
                &p.at(divergence::reduce_left(&e1, &e2)),
                &q.standard(),
                cfg,
            )?
            .value;
            if direct.is_infinite() || right.is_infinite() || left.is_infinite() {
                t.require(direct == right && right == left, || {
                    format!("{gen} {pf}{e1} : {qf}{e2} finiteness differs: {direct} {right} {left}")
                });
                continue;
            }
            let defect = (direct - right).abs().max((direct - left).abs());
            t.record(defect, || format!("{gen} {pf}{e1} : {qf}{e2}"));
        }
    }
    Ok(t.finish())
}

/// `KL(p_{lambda s1} : p_{lambda s2}) = KL(p_{s1} : p_{s2})` for every catalog family.
pub fn scale_invariance(cfg: &QuadratureConfig) -> Result<ItemReport> {
    let mut t = Tally::new(Suite::Identities, "scale-invariance", IDENTITY_TOL);
    let kl = FDivGenerator::kl();
    for f in Family::ALL {
        let base = quadrature::fdiv_num(&kl, &d(f, 0.0, 1.0)?, &d(f, 0.0, 2.0)?, cfg)?.value;
        for lam in [0.1, 1.0, 10.0] {
            let v = quadrature::fdiv_num(&kl, &d(f, 0.0, lam)?, &d(f, 0.0, 2.0 * lam)?, cfg)?.value;
            t.compare(v, base, || format!("{f} lambda={lam}"));
        }
    }
    Ok(t.finish())
}

/// `D_f(s1 : s2) = D_f(1 : s2/s1) = D_f(s1/s2 : 1)` for scale families.
fn scale_ratio(trials: usize, seed: u64, cfg: &QuadratureConfig) -> Result<ItemReport> {
    let name = "scale-ratio";
    let mut rng = Sampler::new(seed, name);
    let mut t = Tally::new(Suite::Identities, name, IDENTITY_TOL);
    let pairs = [
        (Family::HalfNormal, Family::Exponential),
        (Family::Exponential, Family::HalfNormal),
        (Family::Cauchy, Family::Normal),
        (Family::Laplace, Family::Laplace),
    ];
    let gens: Vec<FDivGenerator> = FDivGenerator::builtins().collect();
    for _ in 0..trials {
        let (pf, qf) = rng.pick(&pairs);
        let gen = rng.pick(&gens);
        let (s1, s2) = (rng.scale(), rng.scale());
        let a = quadrature::fdiv_num(&gen, &d(pf, 0.0, s1)?, &d(qf, 0.0, s2)?, cfg)?.value;
        let b = quadrature::fdiv_num(&gen, &d(pf, 0.0, 1.0)?, &d(qf, 0.0, s2 / s1)?, cfg)?.value;
        let c = quadrature::fdiv_num(&gen, &d(pf, 0.0, s1 / s2)?, &d(qf, 0.0, 1.0)?, cfg)?.value;
        if a.is_infinite() || b.is_infinite() || c.is_infinite() {
            t.require(a == b && b == c, || {
                format!("{gen} {pf}:{qf} s1={s1} s2={s2}: {a} {b} {c}")
            });
        } else {
            t.record((a - b).abs().max((a - c).abs()), || {
                format!("{gen} {pf}:{qf} s1={s1} s2={s2}")
            });
        }
    }
    Ok(t.finish())
}

fn symmetry(
    trials: usize,
    seed: u64,
    cfg: &QuadratureConfig,
    out: &mut Vec<ItemReport>,
) -> Result<()> {
    let suite = Suite::Symmetry;
    let normal = StandardDensity::new(Family::Normal);
    let cauchy = StandardDensity::new(Family::Cauchy);

    let mut t = Tally::new(suite, "normal-location-condition", SYMMETRY_CONDITION_TOL);
    for l in [0.5, 1.0, 2.0] {
        let v = divergence::location_symmetry_defect(&normal, l, cfg)?;
        t.record(v, || format!("l={l}"));
    }
    out.push(t.finish());

    let mut t = Tally::new(suite, "cauchy-scale-condition", SYMMETRY_CONDITION_TOL);
    for s in [0.5, 2.0, 5.0] {
        let v = divergence::scale_symmetry_defect(&cauchy, s, cfg)?;
        t.record(v, || format!("s={s}"));
    }
    out.push(t.finish());

    // the exponential scale family must violate the condition
    let mut t = Tally::new(suite, "exponential-scale-asymmetry", 0.0);
    let ex =
        divergence::scale_symmetry_defect(&StandardDensity::new(Family::Exponential), 2.0, cfg)?;
    t.require(ex.abs() > 1e-3, || format!("defect at s=2 is only {ex}"));
    out.push(t.finish());

    out.push(even_location_symmetry(trials, seed, cfg)?);
    out.push(adjoint_swap(trials, seed, cfg)?);
    Ok(())
}

/// `I_f(p_{l1} : p_{l2}) = I_f(p_{l2} : p_{l1})` inside location families with even `p`.
pub fn even_location_symmetry(
    trials: usize,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<ItemReport> {
    let name = "even-location-fdiv";
    let mut rng = Sampler::new(seed, name);
    let mut t = Tally::new(Suite::Symmetry, name, IDENTITY_TOL);
    let gens = [
        FDivGenerator::kl(),
        FDivGenerator::squared_hellinger(),
        FDivGenerator::chi_squared(),
    ];
    for f in [Family::Cauchy, Family::Normal, Family::Laplace] {
        for gen in &gens {
            for _ in 0..trials {
                let (l1, l2, s) = (rng.location(), rng.location(), rng.scale());
                let p1 = d(f, l1, s)?;
                let p2 = d(f, l2, s)?;
                match divergence::fdiv_symmetry_defect(gen, &p1, &p2, cfg)? {
                    divergence::SymmetryDefect::Finite(v) => {
                        t.record(v, || format!("{gen} {p1} vs {p2}"))
                    }
                    // both directions past the cap (or divergent) classify alike
                    divergence::SymmetryDefect::NonComparable { forward, backward } => t
                        .require(forward == backward, || {
                            format!("{gen} {p1} vs {p2}: {forward} / {backward}")
                        }),
                }
            }
        }
    }
    Ok(t.finish())
}

/// `I_{f*}(p:q) = I_f(q:p)`.
pub fn adjoint_swap(trials: usize, seed: u64, cfg: &QuadratureConfig) -> Result<ItemReport> {
    let name = "adjoint";
    let mut rng = Sampler::new(seed, name);
    let mut t = Tally::new(Suite::Symmetry, name, IDENTITY_TOL);
    let gens: Vec<FDivGenerator> = FDivGenerator::builtins().collect();
    let mut done = 0;
    let mut attempts = 0;
    while done < trials && attempts < 20 * trials.max(1) {
        attempts += 1;
        let gen = rng.pick(&gens);
        let p = StandardDensity::new(rng.pick(&Family::ALL)).at(rng.element());
        let q = StandardDensity::new(rng.pick(&Family::ALL)).at(rng.element());
        let a = quadrature::fdiv_num(&gen.adjoint(), &p, &q, cfg)?.value;
        let b = quadrature::fdiv_num(&gen, &q, &p, cfg)?.value;
        if a.is_infinite() || b.is_infinite() {
            // infinite cases must still agree on being infinite
            t.require(a == b, || format!("{gen} {p} vs {q}: {a} / {b}"));
            continue;
        }
        t.compare(a, b, || format!("{gen} {p} vs {q}"));
        done += 1;
    }
    Ok(t.finish())
}

fn closed_forms(
    trials: usize,
    seed: u64,
    cfg: &QuadratureConfig,
    out: &mut Vec<ItemReport>,
) -> Result<()> {
    let suite = Suite::ClosedForms;
    let kl = FDivGenerator::kl();

    let grid = [0.5, 1.0, 2.0, 4.0];
    let mut t = Tally::new(suite, "cauchy-scale-kl", CLOSED_FORM_TOL);
    for &s1 in &grid {
        for &s2 in &grid {
            let q = quadrature::fdiv_num(
                &kl,
                &d(Family::Cauchy, 0.0, s1)?,
                &d(Family::Cauchy, 0.0, s2)?,
                cfg,
            )?;
            t.compare(divergence::cauchy_scale_kl(s1, s2), q.value, || {
                format!("s1={s1} s2={s2}")
            });
        }
    }
    out.push(t.finish());

    let mut t = Tally::new(suite, "cauchy-scale-cross-entropy", CLOSED_FORM_TOL);
    for &s1 in &grid {
        for &s2 in &grid {
            let q = quadrature::cross_entropy_num(
                &d(Family::Cauchy, 0.0, s1)?,
                &d(Family::Cauchy, 0.0, s2)?,
                cfg,
            )?;
            t.compare(
                divergence::cauchy_scale_cross_entropy(s1, s2),
                q.value,
                || format!("s1={s1} s2={s2}"),
            );
        }
    }
    out.push(t.finish());

    let name = "cauchy-generic-kl";
    let mut rng = Sampler::new(seed, name);
    let mut t = Tally::new(suite, name, CLOSED_FORM_TOL);
    let mut sym = Tally::new(suite, "cauchy-generic-kl-symmetry", FORMULA_SYMMETRY_TOL);
    for _ in 0..trials {
        let (e1, e2) = (rng.element(), rng.element());
        let formula = divergence::cauchy_kl(&e1, &e2);
        let q = quadrature::fdiv_num(
            &kl,
            &d(Family::Cauchy, e1.location(), e1.scale_param())?,
            &d(Family::Cauchy, e2.location(), e2.scale_param())?,
            cfg,
        )?;
        t.compare(formula, q.value, || format!("{e1} vs {e2}"));
        sym.compare(formula, divergence::cauchy_kl(&e2, &e1), || {
            format!("{e1} vs {e2}")
        });
    }
    out.push(t.finish());
    out.push(sym.finish());

    let mut t = Tally::new(suite, "cauchy-entropy", CLOSED_FORM_TOL);
    for s in [0.5, 1.0, 3.0] {
        let p = d(Family::Cauchy, 0.0, s)?;
        let q = quadrature::entropy_num(&p, cfg)?;
        t.compare((4.0 * PI * s).ln(), q.value, || format!("s={s}"));
    }
    out.push(t.finish());

    let mut t = Tally::new(suite, "halfnormal-exponential-kl", CLOSED_FORM_TOL);
    for s1 in [0.5, 1.0, 2.0] {
        for s2 in [0.5, 1.0, 2.0] {
            let q = quadrature::fdiv_num(
                &kl,
                &d(Family::HalfNormal, 0.0, s1)?,
                &d(Family::Exponential, 0.0, s2)?,
                cfg,
            )?;
            t.compare(divergence::halfnormal_exp_kl(s1, s2), q.value, || {
                format!("s1={s1} s2={s2}")
            });
        }
    }
    out.push(t.finish());

    let mut t = Tally::new(suite, "log-integral", CLOSED_FORM_TOL);
    for (a, b) in [(1.0, 1.0), (1.0, 2.0), (3.0, 1.0), (0.5, 4.0)] {
        let q = quadrature::integrate(
            |x| (a * a + x * x).ln() / (b * b + x * x),
            f64::NEG_INFINITY,
            f64::INFINITY,
            cfg,
        )?;
        t.compare(divergence::log_integral_a(a, b), q.value, || {
            format!("a={a} b={b}")
        });
    }
    out.push(t.finish());

    let mut t = Tally::new(suite, "infinite-kl-classification", IDENTITY_TOL);
    let c = d(Family::Cauchy, 0.0, 1.0)?;
    let n = d(Family::Normal, 0.0, 1.0)?;
    let forward = quadrature::fdiv_num(&kl, &c, &n, cfg)?;
    t.require(forward.value == f64::INFINITY, || {
        format!("KL(cauchy:normal) = {}", forward.value)
    });
    let back = quadrature::fdiv_num(&kl, &n, &c, cfg)?;
    let back_half = quadrature::fdiv_num(&kl, &n, &c, &cfg.halved())?;
    t.require(back.value.is_finite() && back.value > 0.0, || {
        format!("KL(normal:cauchy) = {}", back.value)
    });
    t.compare(back.value, back_half.value, || {
        "KL(normal:cauchy) under tolerance halving".into()
    });
    out.push(t.finish());
    Ok(())
}

fn projections(cfg: &QuadratureConfig, out: &mut Vec<ItemReport>) -> Result<()> {
    let suite = Suite::Projection;
    let kl = FDivGenerator::kl();
    let exponential = StandardDensity::new(Family::Exponential);
    let halfnormal = StandardDensity::new(Family::HalfNormal);
    let expected_min = 0.5 + FRAC_2_PI.ln();
    let expected_ratio = (PI / 2.0).sqrt();

    let mut ratio = Tally::new(suite, "halfnormal-exponential-ratio", RATIO_TOL);
    let mut min = Tally::new(suite, "halfnormal-exponential-min", CLOSED_FORM_TOL);
    let mut recon = Tally::new(suite, "reconstruction", 1e-8);
    let mut values = Vec::new();
    for s1 in [0.5, 1.0, 3.0] {
        let query = d(Family::HalfNormal, 0.0, s1)?;
        let r = projection::project_right(&query, &exponential, &kl, cfg)?;
        ratio.compare(s1 / r.target_optimum.scale_param(), expected_ratio, || {
            format!("s1={s1}")
        });
        min.compare(r.min_value, expected_min, || format!("s1={s1}"));
        let at = divergence::fdiv_quadrature(&kl, &query, &exponential.at(r.target_optimum), cfg)?;
        recon.compare(at.value, r.min_value, || format!("s1={s1}"));
        values.push(r.min_value);
    }
    out.push(ratio.finish());
    out.push(min.finish());

    let mut indep = Tally::new(suite, "query-independence-right", IDENTITY_TOL);
    for v in &values[1..] {
        indep.compare(*v, values[0], || {
            "halfnormal queries s1 in {0.5, 1, 3}".into()
        });
    }
    let normal = StandardDensity::new(Family::Normal);
    let laplace_queries = [(0.0, 0.5), (0.0, 1.0), (3.0, 2.0)];
    let mut laplace_values = Vec::new();
    for (l1, s1) in laplace_queries {
        let query = d(Family::Laplace, l1, s1)?;
        let r = projection::project_right(&query, &normal, &kl, cfg)?;
        let at = divergence::fdiv_quadrature(&kl, &query, &normal.at(r.target_optimum), cfg)?;
        recon.compare(at.value, r.min_value, || {
            format!("laplace:{l1},{s1} -> normal")
        });
        laplace_values.push(r.min_value);
    }
    for v in &laplace_values[1..] {
        indep.compare(*v, laplace_values[0], || {
            "laplace queries onto normal".into()
        });
    }
    out.push(indep.finish());

    let mut indep = Tally::new(suite, "query-independence-left", IDENTITY_TOL);
    let a = projection::project_left(&d(Family::Exponential, 0.0, 2.0)?, &halfnormal, &kl, cfg)?;
    let b = projection::project_left(&d(Family::Exponential, 0.0, 5.0)?, &halfnormal, &kl, cfg)?;
    indep.compare(a.min_value, b.min_value, || {
        "exponential queries s2 in {2, 5}".into()
    });
    indep.compare(a.min_value, expected_min, || "left minimum".into());
    out.push(indep.finish());
    out.push(recon.finish());

    let mut sides = Tally::new(suite, "single-sided-minima", IDENTITY_TOL);
    let m = projection::family_min(&halfnormal, &exponential, &kl, cfg)?;
    sides.compare(m.right.min_value, m.left.min_value, || {
        "halfnormal/exponential".into()
    });
    let m = projection::family_min(&StandardDensity::new(Family::Laplace), &normal, &kl, cfg)?;
    sides.compare(m.right.min_value, m.left.min_value, || {
        "laplace/normal".into()
    });
    out.push(sides.finish());
    Ok(())
}
