//! Adaptive Gauss-Kronrod quadrature on finite and infinite intervals.
//!
//! Finite pieces are integrated directly. Half-lines use `x = a + t/(1-t)`
//! (mirrored for `(-inf, b]`) and the whole line uses `x = tan(theta)`. The
//! 15-point Kronrod rule never samples segment endpoints, so integrands that
//! blow up at a support edge are never evaluated there.
//!
//! Improper integrals that diverge are classified as `+inf`/`-inf` by probing
//! the tail shells `[T_k, T_{k+1}]` along the truncation schedule: if the
//! per-decade contribution of the last shell is not decaying against the
//! previous one, the integral is reported infinite. This is a heuristic
//! classification, not a proof.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::densities::LocationScaleDensity;
use crate::divergence::FDivGenerator;
use crate::{Error, Result};

#[allow(clippy::excessive_precision)] // published 15-point Kronrod / 7-point Gauss tables
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Weights of the embedded 7-point Gauss rule (nodes `XGK[1], XGK[3], XGK[5], XGK[7]`).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Hard cap on bisections per piece, independent of `max_depth`.
const MAX_SUBDIVISIONS: usize = 5000;

/// Per-decade tail contribution below which a tail shell counts as negligible.
const TAIL_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub divergence_cap: f64,
    /// Strictly increasing offsets from the finite end (or from 0) used to probe tails.
    pub truncation_schedule: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_depth: 50,
            divergence_cap: 1e8,
            truncation_schedule: vec![1e2, 1e3, 1e4, 1e6],
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::BadConfig(m.to_string()));
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) {
            return bad("tolerances must be nonnegative");
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return bad("at least one tolerance must be positive");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be positive");
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
        if !(self.divergence_cap > 0.0) {
            return bad("divergence_cap must be positive");
        }
        if self.truncation_schedule.len() < 3 {
            return bad("truncation schedule needs at least three offsets");
        }
        if self.truncation_schedule[0] <= 0.0
            || self.truncation_schedule.windows(2).any(|w| w[0] >= w[1])
        {
            return bad("truncation schedule must be positive and strictly increasing");
        }
        Ok(())
    }

    /// Same config with both tolerances halved.
    pub fn halved(&self) -> Self {
        Self {
            abs_tol: self.abs_tol / 2.0,
            rel_tol: self.rel_tol / 2.0,
            ..self.clone()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    /// Finite estimate, or `+inf`/`-inf` when classified divergent.
    pub value: f64,
    pub err_estimate: f64,
    /// For an infinite value this means the divergence classification was reached.
    pub converged: bool,
    pub evaluations: usize,
}

impl IntegralResult {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    fn infinite(sign: f64, evaluations: usize) -> Self {
        Self {
            value: sign.signum() * f64::INFINITY,
            err_estimate: 0.0,
            converged: true,
            evaluations,
        }
    }

    pub(crate) fn exact(value: f64) -> Self {
        Self {
            value,
            err_estimate: 0.0,
            converged: true,
            evaluations: 0,
        }
    }

    fn add(self, other: Self) -> Result<Self> {
        let value = self.value + other.value;
        if value.is_nan() {
            return Err(Error::Precondition(
                "integral splits into +inf and -inf parts".into(),
            ));
        }
        Ok(Self {
            value,
            err_estimate: self.err_estimate + other.err_estimate,
            converged: self.converged && other.converged,
            evaluations: self.evaluations + other.evaluations,
        })
    }
}

/// Integrate `f` over `(lower, upper)`; either end may be infinite.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    lower: f64,
    upper: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    integrate_with_breakpoints(f, lower, upper, &[], cfg)
}

/// Like [`integrate`], but splits the range at the given interior points first.
/// Points outside `(lower, upper)` are ignored.
pub fn integrate_with_breakpoints(
    f: impl Fn(f64) -> f64,
    lower: f64,
    upper: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    cfg.validate()?;
    if lower.is_nan() || upper.is_nan() || lower >= upper {
        return Err(Error::Precondition(format!(
            "integration bounds must satisfy lower < upper, got ({lower}, {upper})"
        )));
    }
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&b| b.is_finite() && b > lower && b < upper)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lower);
    edges.extend(cuts);
    edges.push(upper);

    let mut total = IntegralResult::exact(0.0);
    for w in edges.windows(2) {
        let piece = integrate_piece(&f, w[0], w[1], cfg)?;
        total = total.add(piece)?;
        if total.value.is_infinite() {
            break;
        }
    }
    if total.value.abs() > cfg.divergence_cap {
        return Ok(IntegralResult::infinite(total.value, total.evaluations));
    }
    Ok(total)
}

fn integrate_piece(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => adaptive(|x| (x, f(x)), a, b, cfg),
        (true, false) => {
            let probe = probe_tail(f, a, 1.0, cfg)?;
            if let Some(inf) = probe {
                return Ok(inf);
            }
            adaptive(
                |t| {
                    let r = 1.0 / (1.0 - t);
                    let x = a + t * r;
                    (x, f(x) * r * r)
                },
                0.0,
                1.0,
                cfg,
            )
        }
        (false, true) => {
            let probe = probe_tail(f, b, -1.0, cfg)?;
            if let Some(inf) = probe {
                return Ok(inf);
            }
            adaptive(
                |t| {
                    let r = 1.0 / (1.0 - t);
                    let x = b - t * r;
                    (x, f(x) * r * r)
                },
                0.0,
                1.0,
                cfg,
            )
        }
        (false, false) => {
            let right = probe_tail(f, 0.0, 1.0, cfg)?;
            let left = probe_tail(f, 0.0, -1.0, cfg)?;
            match (right, left) {
                (Some(r), Some(l)) => return IntegralResult::exact(0.0).add(r)?.add(l),
                (Some(inf), None) | (None, Some(inf)) => return Ok(inf),
                (None, None) => {}
            }
            adaptive(
                |theta| {
                    let x = theta.tan();
                    (x, f(x) * (1.0 + x * x))
                },
                -FRAC_PI_2,
                FRAC_PI_2,
                cfg,
            )
        }
    }
}

/// Integrates the shells `origin + dir * [T_k, T_{k+1}]` and decides whether the
/// tail in direction `dir` diverges. Returns `Some(+-inf)` when it does.
fn probe_tail(
    f: &impl Fn(f64) -> f64,
    origin: f64,
    dir: f64,
    cfg: &QuadratureConfig,
) -> Result<Option<IntegralResult>> {
    let mut evaluations = 0;
    let mut rates = Vec::with_capacity(cfg.truncation_schedule.len() - 1);
    for w in cfg.truncation_schedule.windows(2) {
        let (near, far) = (origin + dir * w[0], origin + dir * w[1]);
        let (lo, hi) = if dir > 0.0 { (near, far) } else { (far, near) };
        let shell = adaptive(|x| (x, f(x)), lo, hi, cfg)?;
        evaluations += shell.evaluations;
        if shell.value.is_infinite() || shell.value.abs() > cfg.divergence_cap {
            return Ok(Some(IntegralResult::infinite(shell.value, evaluations)));
        }
        rates.push(shell.value / (w[1] / w[0]).log10());
    }
    let (prev, last) = (rates[rates.len() - 2], rates[rates.len() - 1]);
    let growing =
        last.abs() > TAIL_FLOOR && last.signum() == prev.signum() && last.abs() >= 0.5 * prev.abs();
    Ok(growing.then(|| IntegralResult::infinite(last, evaluations)))
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Outcome of one Kronrod evaluation on a segment.
enum Rule {
    Finite { value: f64, err: f64 },
    Infinite(f64),
}

/// Globally adaptive bisection on a finite interval. `g(t)` returns the
/// original-space point (for diagnostics) and the transformed integrand value.
fn adaptive(
    g: impl Fn(f64) -> (f64, f64),
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    let mut evaluations = 0;
    let first = match kronrod(&g, a, b, &mut evaluations)? {
        Rule::Finite { value, err } => Segment {
            a,
            b,
            value,
            err,
            depth: 0,
        },
        Rule::Infinite(v) => return Ok(IntegralResult::infinite(v, evaluations)),
    };
    let mut value = first.value;
    let mut err = first.err;
    let mut heap = BinaryHeap::from([first]);
    let mut settled: Vec<Segment> = Vec::new();
    let mut splits = 0;

    while err > cfg.target(value) && splits < MAX_SUBDIVISIONS {
        let Some(seg) = heap.pop() else { break };
        if seg.depth >= cfg.max_depth {
            settled.push(seg);
            continue;
        }
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            settled.push(seg);
            continue;
        }
        splits += 1;
        value -= seg.value;
        err -= seg.err;
        for (lo, hi) in [(seg.a, mid), (mid, seg.b)] {
            match kronrod(&g, lo, hi, &mut evaluations)? {
                Rule::Finite { value: v, err: e } => {
                    value += v;
                    err += e;
                    heap.push(Segment {
                        a: lo,
                        b: hi,
                        value: v,
                        err: e,
                        depth: seg.depth + 1,
                    });
                }
                Rule::Infinite(v) => return Ok(IntegralResult::infinite(v, evaluations)),
            }
        }
    }

    // re-sum to shed the drift of the running totals
    let (value, err) = heap
        .iter()
        .chain(settled.iter())
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.err));
    Ok(IntegralResult {
        value,
        err_estimate: err,
        converged: err <= cfg.target(value),
        evaluations,
    })
}

fn kronrod(
    g: &impl Fn(f64) -> (f64, f64),
    a: f64,
    b: f64,
    evaluations: &mut usize,
) -> Result<Rule> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> Result<f64> {
        let (x, y) = g(t);
        if y.is_nan() {
            // the transform can send a node within rounding of the end to x = +-inf,
            // where the integrand is a measure-zero limit
            if x.is_infinite() {
                return Ok(0.0);
            }
            return Err(Error::NanIntegrand(x));
        }
        Ok(y)
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    *evaluations += 15;
    if !res_k.is_finite() {
        let mut infinite = fv1
            .iter()
            .chain(&fv2)
            .chain([&fc])
            .filter(|v| v.is_infinite());
        let first = infinite.next().copied().unwrap_or(res_k);
        if infinite.any(|v| v.signum() != first.signum()) || first.is_nan() {
            return Err(Error::Precondition(
                "integrand takes both +inf and -inf".into(),
            ));
        }
        return Ok(Rule::Infinite(first));
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let err = rescale_error(
        (res_k - res_g) * half,
        res_abs * half.abs(),
        res_asc * half.abs(),
    );
    Ok(Rule::Finite { value, err })
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn split_points(p: &LocationScaleDensity, q: &LocationScaleDensity) -> Vec<f64> {
    let mut pts = vec![
        p.location(),
        q.location(),
        p.support_lower(),
        q.support_lower(),
    ];
    pts.extend(p.breakpoints());
    pts.extend(q.breakpoints());
    pts
}

/// `-int p log q` over the support of `p`.
pub fn cross_entropy_num(
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if q.support_lower() > p.support_lower() {
        // p has mass on [p.lower, q.lower) where log q = -inf
        return Ok(IntegralResult::infinite(1.0, 0));
    }
    let integrand = |x: f64| {
        let lp = p.log_pdf(x);
        if lp == f64::NEG_INFINITY {
            return 0.0;
        }
        -lp.exp() * q.log_pdf(x)
    };
    integrate_with_breakpoints(
        integrand,
        p.support_lower(),
        f64::INFINITY,
        &split_points(p, q),
        cfg,
    )
}

/// Differential entropy as the self cross-entropy.
pub fn entropy_num(p: &LocationScaleDensity, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    cross_entropy_num(p, p, cfg)
}

/// `int p f(q/p)` with the usual conventions where either density vanishes.
pub fn fdiv_num(
    gen: &FDivGenerator,
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    let (p_lo, q_lo) = (p.support_lower(), q.support_lower());
    if q_lo > p_lo && gen.limit_at_zero() == f64::INFINITY {
        return Ok(IntegralResult::infinite(1.0, 0));
    }
    if p_lo > q_lo && gen.slope_at_infinity() == f64::INFINITY {
        return Ok(IntegralResult::infinite(1.0, 0));
    }
    let integrand = |x: f64| gen.weighted(p.log_pdf(x), q.log_pdf(x));
    integrate_with_breakpoints(
        integrand,
        p_lo.min(q_lo),
        f64::INFINITY,
        &split_points(p, q),
        cfg,
    )
}
