//! parse → determining system → solve → certify → reduce → checks.

use std::time::Instant;

use fraclie_core::assume::Assumption;
use fraclie_core::determining::{self, DeterminingSystem};
use fraclie_core::expr::fmt_q;
use fraclie_core::frac::{self, PowerSum};
use fraclie_core::model::{classify_terms, PDESystem};
use fraclie_core::oracle::{self, Env};
use fraclie_core::print::{Printer, Style};
use fraclie_core::prolong::{Branch, Generator};
use fraclie_core::reduce;
use fraclie_core::solver::{self, Residuals, SolutionBasis, SolveConfig};
use fraclie_core::{Expr, IndepVar};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::dsl;
use crate::report::*;

#[derive(Debug, Error)]
#[error("{stage}: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub message: String,
}

fn stage<E: std::fmt::Display>(stage: &'static str) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError { stage, message: e.to_string() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum BranchSel {
    Both,
    Zero,
    Nonzero,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub poly_degree: Option<u32>,
    /// Extra h-templates, in the expression syntax of the input language.
    pub h_templates: Vec<String>,
    pub branch: BranchSel,
    /// Source of a generator file.
    pub verify_generator: Option<String>,
    pub reduce: bool,
    pub oracle_check: bool,
    pub timing: bool,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            poly_degree: None,
            h_templates: Vec::new(),
            branch: BranchSel::Both,
            verify_generator: None,
            reduce: false,
            oracle_check: false,
            timing: false,
            seed: 0,
        }
    }
}

impl Config {
    /// Seed from `FRACLIE_SEED`, default 0.
    pub fn seed_from_env(mut self) -> Result<Self, PipelineError> {
        if let Ok(s) = std::env::var("FRACLIE_SEED") {
            self.seed = s.trim().parse().map_err(|_| PipelineError {
                stage: "config",
                message: format!("FRACLIE_SEED must be an unsigned integer, got `{}`", s),
            })?;
        }
        Ok(self)
    }
}

pub fn math(pr: &Printer, e: &Expr) -> Math {
    let text = pr.expr(e);
    Math { latex: to_latex(&text), text }
}

fn math_str(s: String) -> Math {
    Math { latex: to_latex(&s), text: s }
}

struct Clock {
    on: bool,
    last: Instant,
    out: Vec<Timing>,
}

impl Clock {
    fn lap(&mut self, name: &str) {
        if self.on {
            let now = Instant::now();
            self.out.push(Timing { stage: name.into(), ms: (now - self.last).as_secs_f64() * 1e3 });
            self.last = now;
        }
    }
}

/// Everything computed along the way, for callers that need the exact forms.
pub struct Analysis {
    pub system: PDESystem,
    pub determining: DeterminingSystem,
    pub reduced: Vec<Expr>,
    pub basis: SolutionBasis,
    pub report: Report,
}

pub fn run(source: &str, text: &str, cfg: &Config) -> Result<Report, PipelineError> {
    analyze(source, text, cfg).map(|a| a.report)
}

pub fn analyze(source: &str, text: &str, cfg: &Config) -> Result<Analysis, PipelineError> {
    let mut clock = Clock { on: cfg.timing, last: Instant::now(), out: Vec::new() };
    let sys = dsl::parse_system(text).map_err(stage("parse"))?;
    clock.lap("parse");
    let pr = sys.printer(Style::Subscript);

    let ds = determining::build(&sys, Branch::Symbolic).map_err(stage("determining"))?;
    let reduced = determining::autoreduce(&ds, &sys).map_err(stage("determining"))?;
    clock.lap("determining");

    let mut scfg = SolveConfig::new(&sys);
    if let Some(d) = cfg.poly_degree {
        scfg.poly_degree = d;
    }
    for src in &cfg.h_templates {
        let e = dsl::parse_expr(src, &sys, &[]).map_err(stage("h-template"))?;
        if !scfg.h_templates.contains(&e) {
            scfg.h_templates.push(e);
        }
    }
    scfg.branches = match cfg.branch {
        BranchSel::Both => vec![Branch::Zero, Branch::Nonzero],
        BranchSel::Zero => vec![Branch::Zero],
        BranchSel::Nonzero => vec![Branch::Nonzero],
    };
    let basis = solver::solve(&sys, &scfg).map_err(stage("solve"))?;
    clock.lap("solve");
    if !basis.verified() {
        let bad: Vec<String> = basis
            .generators
            .iter()
            .zip(&basis.residual_certificate)
            .filter(|(_, r)| !r.is_zero())
            .map(|(g, r)| format!("{}: {}", g.render(&sys, &pr), residual_lines(&pr, r).join("; ")))
            .collect();
        return Err(PipelineError { stage: "verify", message: format!("nonzero residuals: {}", bad.join(" | ")) });
    }

    let mut assumptions = declared_assumptions(&sys);
    for a in ds.assumptions.iter().chain(&basis.assumptions) {
        if !assumptions.contains(a) {
            assumptions.push(a.clone());
        }
    }

    let mut checks = Vec::new();
    if let Some(src) = &cfg.verify_generator {
        let (g, _) = dsl::parse_generator(src, &sys).map_err(stage("verify-generator"))?;
        checks.push(match solver::verify_generator(&sys, &g) {
            Ok(r) => Check {
                name: format!("verify-generator {}", g.render(&sys, &pr)),
                passed: r.is_zero(),
                skipped: false,
                detail: residual_lines(&pr, &r),
            },
            Err(e) => Check {
                name: format!("verify-generator {}", g.render(&sys, &pr)),
                passed: false,
                skipped: false,
                detail: vec![e.to_string()],
            },
        });
        clock.lap("verify");
    }

    let mut reductions = Vec::new();
    if cfg.reduce {
        for (i, g) in basis.generators.iter().enumerate() {
            if let Some(r) = reduction(&sys, g, i + 1) {
                reductions.push(r);
            }
        }
        clock.lap("reduce");
    }

    if cfg.oracle_check {
        checks.extend(oracle_checks(&sys, &scfg.h_templates, cfg.seed));
        clock.lap("oracle");
    }

    let classes = classify_terms(&sys);
    let equations = sys
        .equations
        .iter()
        .zip(&classes)
        .enumerate()
        .map(|(s, (eq, c))| EquationInfo {
            dep: sys.deps[s].clone(),
            f: math(&pr, &eq.f),
            h: math(&pr, &eq.h),
            linear: c.linear_exprs().iter().map(|e| math(&pr, e)).collect(),
            nonlinear: c.nonlinear.iter().map(|e| math(&pr, e)).collect(),
        })
        .collect();
    let basis_entries = basis
        .generators
        .iter()
        .zip(&basis.residual_certificate)
        .map(|(g, r)| BasisEntry {
            generator: math_str(g.render(&sys, &pr)),
            tau: math(&pr, &g.tau),
            xi: g.xi.iter().map(|e| math(&pr, e)).collect(),
            eta: g.eta.iter().map(|e| math(&pr, e)).collect(),
            residuals: residual_lines(&pr, r).into_iter().map(math_str).collect(),
        })
        .collect();
    let report = Report {
        schema: SCHEMA,
        system: SystemInfo {
            source: source.to_string(),
            dsl: dsl::emit(&sys),
            space: sys.space.clone(),
            deps: sys.deps.clone(),
            alpha: sys.alpha_name.clone(),
            equations,
        },
        determining: Determining {
            integer: ds
                .integer_eqs
                .iter()
                .map(|e| IntegerEqInfo { source: e.source + 1, monomial: e.monomial.clone(), eq: math(&pr, &e.expr) })
                .collect(),
            fractional: ds.frac_eqs.iter().map(|e| math(&pr, e)).collect(),
            reduced: reduced.iter().map(|e| math(&pr, e)).collect(),
        },
        assumptions,
        basis: basis_entries,
        reductions,
        checks,
        solver: SolverInfo {
            poly_degree: scfg.poly_degree,
            templates: scfg.h_templates.iter().map(|e| math(&pr, e)).collect(),
            branches: basis
                .branches
                .iter()
                .map(|b| BranchInfo {
                    name: b.branch.name().to_string(),
                    unknowns: b.unknowns,
                    equations: b.equations,
                    generators: b.generators.len(),
                })
                .collect(),
            notes: basis.notes.clone(),
        },
        timing: cfg.timing.then_some(clock.out),
    };
    Ok(Analysis { system: sys, determining: ds, reduced, basis, report })
}

fn residual_lines(pr: &Printer, r: &Residuals) -> Vec<String> {
    let mut out = Vec::new();
    for (s, e) in r.frac.iter().enumerate() {
        if !e.is_zero_literal() {
            out.push(format!("fractional condition {}: {}", s + 1, pr.expr(e)));
        }
    }
    for (m, e) in &r.separated {
        out.push(format!("coefficient of {}: {}", m, pr.expr(e)));
    }
    out
}

fn declared_assumptions(sys: &PDESystem) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(a) = sys.alpha_symbol() {
        out.push(format!("0 < {} < 1", a));
    }
    for p in &sys.params {
        match &p.assumption {
            Some(Assumption::Nonzero) => out.push(format!("{} != 0", p.name)),
            Some(Assumption::Positive) => out.push(format!("{} > 0", p.name)),
            Some(Assumption::Interval(lo, hi)) => out.push(format!("{} < {} < {}", fmt_q(lo), p.name, fmt_q(hi))),
            None => {}
        }
    }
    out
}

fn reduced_printer(sys: &PDESystem) -> Printer {
    let space: Vec<String> = if sys.p() == 1 {
        vec!["z".into()]
    } else {
        (1..=sys.p()).map(|i| format!("z{}", i)).collect()
    };
    let deps: Vec<String> = sys.deps.iter().map(|d| d.to_uppercase()).collect();
    Printer::new(&space, &deps, &sys.alpha_name, Style::Subscript)
}

fn reduction(sys: &PDESystem, g: &Generator, index: usize) -> Option<Reduction> {
    let pr = sys.printer(Style::Subscript);
    if let Ok((i, red)) = reduce::translation_reduction(sys, g) {
        let rp = red.printer(Style::Subscript);
        let mut items = vec![("invariant".to_string(), math_str(format!("drop {}", sys.space[i])))];
        for (s, eq) in red.equations.iter().enumerate() {
            items.push((format!("Dt^{}({})", sys.alpha_name, red.deps[s]), math(&rp, &eq.rhs())));
        }
        return Some(Reduction { generator: index, kind: "translation".into(), items });
    }
    let ek = reduce::scaling_similarity(sys, g).ok()?;
    let rp = reduced_printer(sys);
    let mut items = Vec::new();
    for (i, e) in ek.z_exponents.iter().enumerate() {
        items.push((rp.space_name(i), math_str(format!("{}*t^({})", sys.space[i], pr.expr(e)))));
    }
    for (s, b) in ek.u_exponents.iter().enumerate() {
        let z: Vec<String> = (0..sys.p()).map(|i| rp.space_name(i)).collect();
        items.push((sys.deps[s].clone(), math_str(format!("t^({})*{}({})", pr.expr(b), rp.dep_name(s), z.join(",")))));
    }
    for (i, d) in ek.delta.iter().enumerate() {
        if let Some(d) = d {
            items.push((format!("delta {}", rp.space_name(i)), math(&pr, d)));
        }
    }
    for (s, e) in ek.epsilon.iter().enumerate() {
        items.push((format!("epsilon {}", rp.dep_name(s)), math(&pr, e)));
    }
    for (s, r) in ek.reduced_rhs.iter().enumerate() {
        let lhs = format!("reduced rhs for {}", rp.dep_name(s));
        match r {
            Some(r) => items.push((lhs, math(&rp, r))),
            None => items.push((lhs, math_str("not t-homogeneous".into()))),
        }
    }
    Some(Reduction { generator: index, kind: "scaling".into(), items })
}

/// Compare the exact power rule against Gauss–Jacobi quadrature on every
/// h-template, at seeded random points.
fn oracle_checks(sys: &PDESystem, templates: &[Expr], seed: u64) -> Vec<Check> {
    let pr = sys.printer(Style::Subscript);
    let asm = sys.assumptions();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    for tpl in templates {
        let name = format!("oracle power rule on {}", pr.expr(tpl));
        let exact = match frac::frac_dt(tpl, &sys.alpha, &asm) {
            Ok(e) => e,
            Err(e) => {
                out.push(Check { name, passed: true, skipped: true, detail: vec![e.to_string()] });
                continue;
            }
        };
        let ps = match PowerSum::from_expr(tpl) {
            Ok(p) => p,
            Err(e) => {
                out.push(Check { name, passed: false, skipped: false, detail: vec![e.to_string()] });
                continue;
            }
        };
        let mut detail = Vec::new();
        let mut passed = true;
        for _ in 0..5 {
            let mut env = Env::default();
            let alpha = match sys.alpha_symbol() {
                Some(s) => {
                    let a: f64 = rng.gen_range(0.1..0.9);
                    env.params.insert(s, a);
                    a
                }
                None => oracle::eval_exponent(&sys.alpha, &env).unwrap_or(f64::NAN),
            };
            for p in &sys.params {
                env.params.insert(p.name.clone(), rng.gen_range(0.5..2.0));
            }
            let t: f64 = rng.gen_range(0.5..2.0);
            env.vars.insert(IndepVar::T, t);
            for i in 0..sys.p() {
                env.vars.insert(IndepVar::X(i), rng.gen_range(-1.0..1.0));
            }
            let mut terms = Vec::new();
            let mut ok = true;
            for (g, c) in &ps.terms {
                match (oracle::eval(c, &env), oracle::eval_exponent(g, &env)) {
                    (Ok(c), Ok(g)) => terms.push((c, g)),
                    _ => ok = false,
                }
            }
            let sym = oracle::eval(&exact, &env);
            let num = oracle::rl_power_sum(&terms, alpha, t, 64);
            match (ok, sym, num) {
                (true, Ok(s), Ok(n)) => {
                    let err = (s - n.value).abs() / s.abs().max(1.0);
                    if err > 1e-8 {
                        passed = false;
                    }
                    detail.push(format!("alpha={:.6} t={:.6}: exact {:.12e}, quadrature {:.12e}", alpha, t, s, n.value));
                }
                (_, Err(e), _) => {
                    passed = false;
                    detail.push(e);
                }
                (_, _, Err(e)) => {
                    passed = false;
                    detail.push(e.to_string());
                }
                _ => {
                    passed = false;
                    detail.push("cannot evaluate template coefficients".into());
                }
            }
        }
        out.push(Check { name, passed, skipped: false, detail });
    }
    out
}
