//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on input or parse errors, 2 on numeric failure
//! (a quadrature that did not converge, a NaN integrand, or a failed check).

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Number, Value};

use crate::check::{self, Suite};
use crate::densities::{Family, LocationScaleDensity, StandardDensity};
use crate::divergence::{self, DivergenceResult, Estimate, FDivGenerator, Method};
use crate::group::GroupElement;
use crate::projection::{self, Side};
use crate::quadrature::{self, QuadratureConfig};
use crate::Error;

#[derive(Debug, Parser)]
#[command(
    name = "lsdiv",
    version,
    about = "Entropy, cross-entropy and f-divergences between location-scale densities",
    after_help = "Densities are written <family>:<loc>,<scale>, e.g. cauchy:0,1.\n\
                  Families: cauchy, normal, halfnormal, exponential, laplace.\n\
                  Generators: kl, reverse-kl, hellinger2, tv, chi2."
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Emit a single JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Absolute quadrature tolerance.
    #[arg(long, global = true, value_name = "REAL")]
    abs_tol: Option<f64>,

    /// Relative quadrature tolerance.
    #[arg(long, global = true, value_name = "REAL")]
    rel_tol: Option<f64>,

    /// Maximum bisection depth.
    #[arg(long, global = true, value_name = "INT")]
    max_depth: Option<u32>,

    /// Also compute the quadrature value when a closed form is used, and report agreement.
    #[arg(long, global = true)]
    verify: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Differential entropy h(p).
    Entropy { p: LocationScaleDensity },
    /// Cross-entropy h(p : q) = -int p log q.
    CrossEntropy {
        p: LocationScaleDensity,
        q: LocationScaleDensity,
    },
    /// Kullback-Leibler divergence KL(p : q).
    Kl {
        p: LocationScaleDensity,
        q: LocationScaleDensity,
    },
    /// f-divergence I_f(p : q) = int p f(q/p).
    Fdiv {
        #[arg(long)]
        gen: FDivGenerator,
        p: LocationScaleDensity,
        q: LocationScaleDensity,
    },
    /// Reduced parameters: q relative to standard p, and p relative to standard q.
    Reduce {
        p: LocationScaleDensity,
        q: LocationScaleDensity,
    },
    /// Minimize the divergence from a query density over another family.
    Project {
        #[arg(long)]
        query: LocationScaleDensity,
        #[arg(long)]
        target: Family,
        #[arg(long, default_value = "kl")]
        gen: FDivGenerator,
        #[arg(long, default_value = "right")]
        side: Side,
    },
    /// Run the randomized verification batteries.
    Check {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String, numeric_failure: bool) -> Self {
        Self {
            code: if numeric_failure { 2 } else { 0 },
            stdout,
            stderr: String::new(),
        }
    }

    fn error(err: &Error) -> Self {
        let code = match err {
            Error::NanIntegrand(_) => 2,
            _ => 1,
        };
        Self {
            code,
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        }
    }
}

/// Runs the CLI on `argv` (including the program name) and captures its output.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(text, false),
                _ => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let cfg = match config(&cli.global) {
        Ok(c) => c,
        Err(e) => return Outcome::error(&e),
    };
    match dispatch(&cli, &cfg) {
        Ok((fields, failed)) => {
            let text = if cli.global.json {
                let mut s = Value::Object(fields.json).to_string();
                s.push('\n');
                s
            } else {
                fields.text
            };
            Outcome::ok(text, failed)
        }
        Err(e) => Outcome::error(&e),
    }
}

fn config(g: &GlobalOpts) -> crate::Result<QuadratureConfig> {
    let mut cfg = QuadratureConfig::default();
    if let Some(v) = g.abs_tol {
        cfg.abs_tol = v;
    }
    if let Some(v) = g.rel_tol {
        cfg.rel_tol = v;
    }
    if let Some(v) = g.max_depth {
        cfg.max_depth = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// JSON object and text rendering built side by side.
#[derive(Default)]
struct Output {
    json: Map<String, Value>,
    text: String,
}

impl Output {
    fn field(&mut self, key: &str, value: Value) -> &mut Self {
        self.json.insert(key.to_string(), value);
        self
    }

    fn line(&mut self, line: impl AsRef<str>) -> &mut Self {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
        self
    }
}

/// Numbers rounded to 9 significant digits; infinities as the strings `"inf"`/`"-inf"`.
pub fn json_number(v: f64) -> Value {
    if v.is_nan() {
        return Value::String("nan".into());
    }
    if v.is_infinite() {
        return Value::String(if v > 0.0 { "inf" } else { "-inf" }.into());
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    // avoid "-0.0"
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    Number::from_f64(rounded)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.9}")
    }
}

fn pair(e: &GroupElement) -> Value {
    json!([json_number(e.location()), json_number(e.scale_param())])
}

fn point(e: &GroupElement) -> Value {
    json!({"l": json_number(e.location()), "s": json_number(e.scale_param())})
}

fn estimate_fields(out: &mut Output, e: &Estimate) {
    out.field("value", json_number(e.value))
        .field("method", json!(e.method.as_str()))
        .field("error_estimate", json_number(e.err_estimate))
        .field("converged", json!(e.converged));
}

fn divergence_fields(out: &mut Output, r: &DivergenceResult) {
    out.field("value", json_number(r.value))
        .field("method", json!(r.method.as_str()))
        .field("error_estimate", json_number(r.err_estimate))
        .field("converged", json!(r.converged));
    if r.was_clamped() {
        out.field("raw_value", json_number(r.raw_value));
    }
}

fn verification(out: &mut Output, closed: f64, quad: f64, err: f64) {
    let discrepancy = if closed == quad {
        0.0
    } else {
        (closed - quad).abs()
    };
    out.field(
        "verify",
        json!({
            "closed_form": json_number(closed),
            "quadrature": json_number(quad),
            "quadrature_error_estimate": json_number(err),
            "discrepancy": json_number(discrepancy),
        }),
    );
    out.line(format!(
        "verify: closed form {} vs quadrature {} (discrepancy {:.3e})",
        fmt_value(closed),
        fmt_value(quad),
        discrepancy
    ));
}

fn dispatch(cli: &Cli, cfg: &QuadratureConfig) -> crate::Result<(Output, bool)> {
    let mut out = Output::default();
    let verify = cli.global.verify;
    let failed = match &cli.command {
        Command::Entropy { p } => {
            let e = divergence::entropy(p, cfg)?;
            estimate_fields(&mut out, &e);
            out.field("density", json!(p.to_string()));
            out.line(format!(
                "h({p}) = {} [{}]",
                fmt_value(e.value),
                e.method.as_str()
            ));
            if verify && e.method == Method::ClosedForm {
                let q = quadrature::entropy_num(p, cfg)?;
                verification(&mut out, e.value, q.value, q.err_estimate);
            }
            !e.converged
        }
        Command::CrossEntropy { p, q } => {
            let e = divergence::cross_entropy(p, q, cfg)?;
            estimate_fields(&mut out, &e);
            out.field("p", json!(p.to_string()))
                .field("q", json!(q.to_string()));
            out.line(format!(
                "hx({p} : {q}) = {} [{}]",
                fmt_value(e.value),
                e.method.as_str()
            ));
            if verify && e.method == Method::ClosedForm {
                let n = quadrature::cross_entropy_num(p, q, cfg)?;
                verification(&mut out, e.value, n.value, n.err_estimate);
            }
            !e.converged
        }
        Command::Kl { p, q } => fdiv_command(&mut out, &FDivGenerator::kl(), p, q, verify, cfg)?,
        Command::Fdiv { gen, p, q } => fdiv_command(&mut out, gen, p, q, verify, cfg)?,
        Command::Reduce { p, q } => {
            let right = divergence::reduce_right(&p.elem(), &q.elem());
            let left = divergence::reduce_left(&p.elem(), &q.elem());
            out.field("reduced", pair(&right))
                .field("reduced_left", pair(&left));
            out.line(format!(
                "right-reduced: {}:0,1 vs {}",
                p.standard().name(),
                q.with_elem(right)
            ));
            out.line(format!(
                "left-reduced:  {} vs {}:0,1",
                p.with_elem(left),
                q.standard().name()
            ));
            false
        }
        Command::Project {
            query,
            target,
            gen,
            side,
        } => {
            let other = StandardDensity::new(*target);
            let r = projection::project(query, &other, gen, *side, cfg)?;
            let feasible = r.is_feasible();
            let side_name = match side {
                Side::Right => "right",
                Side::Left => "left",
            };
            out.field("value", json_number(r.min_value))
                .field("method", json!("nelder_mead"))
                .field("error_estimate", json_number(0.0))
                .field("converged", json!(r.converged))
                .field(
                    "optimum",
                    if feasible {
                        point(&r.target_optimum)
                    } else {
                        Value::Null
                    },
                )
                .field(
                    "reduced_optimum",
                    if feasible {
                        point(&r.reduced_optimum)
                    } else {
                        Value::Null
                    },
                )
                .field("side", json!(side_name))
                .field("generator", json!(gen.name()))
                .field("evaluations", json!(r.evaluations))
                .field("starts", json!(r.starts_used));
            let free = other.at(r.target_optimum);
            match side {
                Side::Right => out.line(format!(
                    "min {gen}({query} : {target}) = {}",
                    fmt_value(r.min_value)
                )),
                Side::Left => out.line(format!(
                    "min {gen}({target} : {query}) = {}",
                    fmt_value(r.min_value)
                )),
            };
            if feasible {
                out.line(format!("optimum: {free}"));
                out.line(format!("reduced optimum: {}", r.reduced_optimum));
            } else {
                out.line("optimum: none (the divergence is infinite for every member)");
            }
            if !r.converged {
                out.line("warning: no start converged to a finite minimum");
            }
            !r.converged
        }
        Command::Check {
            suite,
            trials,
            seed,
        } => {
            let report = check::run(*suite, *trials, *seed, cfg)?;
            let items: Vec<Value> = report
                .items
                .iter()
                .map(|i| {
                    json!({
                        "suite": i.suite,
                        "name": i.name,
                        "passed": i.passed(),
                        "trials": i.trials,
                        "max_defect": json_number(i.max_defect),
                        "tolerance": json_number(i.tolerance),
                        "failures": i.failures,
                    })
                })
                .collect();
            out.field("passed", json!(report.passed()))
                .field("failures", json!(report.failures()))
                .field("seed", json!(seed))
                .field("trials", json!(trials))
                .field("items", Value::Array(items));
            for item in &report.items {
                out.line(item.to_string());
            }
            out.line(format!(
                "{} of {} checks passed",
                report.items.len() - report.failures(),
                report.items.len()
            ));
            !report.passed()
        }
    };
    Ok((out, failed))
}

fn fdiv_command(
    out: &mut Output,
    gen: &FDivGenerator,
    p: &LocationScaleDensity,
    q: &LocationScaleDensity,
    verify: bool,
    cfg: &QuadratureConfig,
) -> crate::Result<bool> {
    let v = if verify {
        divergence::fdiv_verified(gen, p, q, cfg)?
    } else {
        divergence::Verified {
            result: divergence::fdiv(gen, p, q, cfg)?,
            quadrature: None,
        }
    };
    let r = v.result;
    divergence_fields(out, &r);
    out.field("generator", json!(gen.name()))
        .field("p", json!(p.to_string()))
        .field("q", json!(q.to_string()));
    out.line(format!(
        "{gen}({p} : {q}) = {} [{}]",
        fmt_value(r.value),
        r.method.as_str()
    ));
    if let Some(quad) = v.quadrature {
        verification(out, r.value, quad.value, quad.err_estimate);
    }
    Ok(!r.converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &str) -> Outcome {
        run(std::iter::once("lsdiv").chain(args.split_whitespace()))
    }

    fn json_of(o: &Outcome) -> Value {
        serde_json::from_str(&o.stdout).unwrap()
    }

    #[test]
    fn number_formatting() {
        assert_eq!(json_number(0.22314355131420976).to_string(), "0.223143551");
        assert_eq!(json_number(f64::INFINITY), json!("inf"));
        assert_eq!(json_number(-0.0).to_string(), "0.0");
        assert_eq!(json_number(123456789012.0).to_string(), "123456789000.0");
    }

    #[test]
    fn kl_closed_form_json() {
        let o = run_args("kl cauchy:0,1 cauchy:1,1 --json");
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v = json_of(&o);
        assert_eq!(v["value"].as_f64().unwrap(), 0.223143551);
        assert_eq!(v["method"], "closed_form");
        assert_eq!(v["converged"], true);
    }

    #[test]
    fn kl_infinite_json() {
        let v = json_of(&run_args("kl cauchy:0,1 normal:0,1 --json"));
        assert_eq!(v["value"], "inf");
    }

    #[test]
    fn bad_input_exits_one() {
        for args in [
            "kl gumbel:0,1 normal:0,1",
            "kl cauchy:0,-1 normal:0,1",
            "fdiv --gen js cauchy:0,1 cauchy:0,1",
            "bogus",
            "kl cauchy:0,1",
        ] {
            let o = run_args(args);
            assert_eq!(o.code, 1, "{args}");
            assert!(!o.stderr.is_empty());
        }
        let o = run_args("fdiv --gen js cauchy:0,1 cauchy:0,1");
        assert!(o.stderr.contains("hellinger2"), "{}", o.stderr);
        let o = run_args("kl gumbel:0,1 normal:0,1");
        assert!(o.stderr.contains("laplace"), "{}", o.stderr);
        assert_eq!(run_args("kl cauchy:0,1 cauchy:0,1 --abs-tol -1").code, 1);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run_args("--help").code, 0);
    }

    #[test]
    fn reduce_prints_both_pairs() {
        let v = json_of(&run_args("reduce cauchy:1,2 normal:3,4 --json"));
        assert_eq!(v["reduced"], json!([1.0, 2.0]));
        assert_eq!(v["reduced_left"], json!([-0.5, 0.5]));
    }

    #[test]
    fn verify_reports_discrepancy() {
        let v = json_of(&run_args("kl cauchy:0,1 cauchy:0,2 --json --verify"));
        assert!(v["verify"]["discrepancy"].as_f64().unwrap() < 1e-8);
        let v = json_of(&run_args("entropy cauchy:0,3 --json --verify"));
        assert!(v["verify"]["discrepancy"].as_f64().unwrap() < 1e-8);
    }

    #[test]
    fn projection_json() {
        let o = run_args("project --query halfnormal:0,1 --target exponential --json");
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v = json_of(&o);
        assert!((v["value"].as_f64().unwrap() - 0.048417).abs() < 1e-6);
        assert_eq!(v["optimum"]["l"].as_f64().unwrap(), 0.0);
        assert!((v["optimum"]["s"].as_f64().unwrap() - 0.797885).abs() < 1e-5);
    }

    #[test]
    fn infeasible_projection_is_a_numeric_failure() {
        let o = run_args("project --query cauchy:0,1 --target normal --json");
        assert_eq!(o.code, 2);
        let v = json_of(&o);
        assert_eq!(v["value"], "inf");
        assert_eq!(v["optimum"], Value::Null);
    }

    #[test]
    fn text_output() {
        let o = run_args("entropy cauchy:0,1");
        assert_eq!(o.stdout, "h(cauchy:0,1) = 2.531024247 [closed_form]\n");
    }

    #[test]
    fn deterministic_output() {
        let a = run_args("check --suite closed-forms --trials 3 --seed 9 --json");
        let b = run_args("check --suite closed-forms --trials 3 --seed 9 --json");
        assert_eq!(a, b);
        assert_eq!(a.code, 0, "{}", a.stdout);
    }
}
