//! Polynomial / template ansatz for the determining system, exact null space,
//! normalization and verification of generators.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Zero};

use crate::diff;
use crate::determining::{self, DeterminingSystem};
use crate::error::{Error, Result};
use crate::expr::{ExponentForm, Expr, IndepVar, JetVar, Symbol, Q};
use crate::frac;
use crate::gamma;
use crate::linalg::{self, RatFunc};
use crate::model::PDESystem;
use crate::print::Style;
use crate::prolong::{Branch, Generator, UnknownKind, CHI1, CHI2};
use crate::simplify::{self, Mono, Poly};
use crate::subst::map_atoms;

pub const DEFAULT_POLY_DEGREE: u32 = 3;

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub poly_degree: u32,
    pub h_templates: Vec<Expr>,
    pub branches: Vec<Branch>,
    /// Re-solve at `poly_degree + 1` and fail on a dimension change.
    pub check_degree: bool,
}

impl SolveConfig {
    pub fn new(sys: &PDESystem) -> Self {
        SolveConfig {
            poly_degree: DEFAULT_POLY_DEGREE,
            h_templates: default_templates(sys),
            branches: alloc::vec![Branch::Zero, Branch::Nonzero],
            check_degree: true,
        }
    }
}

/// `1, t^(α-1), x_i t^(-α), x_i t^(α-1)`.
pub fn default_templates(sys: &PDESystem) -> Vec<Expr> {
    let a = sys.alpha.clone();
    let t_am1 = Expr::pow(Expr::t(), a.add_const(&-Q::one()));
    let t_ma = Expr::pow(Expr::t(), a.neg());
    let mut out = alloc::vec![Expr::one(), t_am1.clone()];
    for i in 0..sys.p() {
        out.push(Expr::mul(Expr::x(i), t_ma.clone()));
    }
    for i in 0..sys.p() {
        out.push(Expr::mul(Expr::x(i), t_am1.clone()));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residuals {
    /// Condition 1 per equation.
    pub frac: Vec<Expr>,
    /// Nonzero separated condition-2 coefficients, labelled by monomial.
    pub separated: Vec<(String, Expr)>,
}

impl Residuals {
    pub fn is_zero(&self) -> bool {
        self.frac.iter().all(|e| e.is_zero_literal()) && self.separated.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchSolution {
    pub branch: Branch,
    pub generators: Vec<Generator>,
    pub unknowns: usize,
    pub equations: usize,
    pub notes: Vec<String>,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionBasis {
    pub generators: Vec<Generator>,
    pub dimension: usize,
    pub residual_certificate: Vec<Residuals>,
    pub assumptions: Vec<String>,
    pub branches: Vec<BranchSolution>,
    pub notes: Vec<String>,
}

impl SolutionBasis {
    pub fn verified(&self) -> bool {
        self.residual_certificate.iter().all(Residuals::is_zero)
    }
}

fn coeff_symbol(name: &str, tag: &str) -> Symbol {
    Symbol::new(&format!("#{}:{}", name, tag))
}

fn is_column(s: &Symbol) -> bool {
    s.as_str().starts_with('#') || s.as_str() == CHI1 || s.as_str() == CHI2
}

/// Exponent vectors of total degree ≤ d in p variables, by degree then lex.
fn exponents(p: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for k in 0..=d {
        let mut cur = alloc::vec![0u32; p];
        fill(&mut out, &mut cur, 0, k);
    }
    out
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, i: usize, left: u32) {
    if i + 1 >= cur.len() {
        if !cur.is_empty() {
            cur[i] = left;
            out.push(cur.clone());
        } else if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=left).rev() {
        cur[i] = k;
        fill(out, cur, i + 1, left - k);
    }
    cur[i] = 0;
}

fn x_monomial(e: &[u32]) -> Expr {
    let fs: Vec<Expr> = e
        .iter()
        .enumerate()
        .filter(|(_, k)| **k > 0)
        .map(|(i, k)| Expr::powi(Expr::x(i), *k as i64))
        .collect();
    simplify::simplify(&Expr::Product(fs))
}

struct Instantiation {
    columns: Vec<Symbol>,
    bodies: BTreeMap<Symbol, Expr>,
    frac_bodies: BTreeMap<Symbol, Expr>,
    notes: Vec<String>,
}

fn instantiate(sys: &PDESystem, ds: &DeterminingSystem, cfg: &SolveConfig, degree: u32) -> Result<Instantiation> {
    let ans = &ds.ansatz;
    let asm = sys.assumptions();
    let pr = sys.printer(Style::Subscript);
    let mut columns = alloc::vec![Symbol::new(CHI1)];
    if ds.branch != Branch::Zero {
        columns.push(Symbol::new(CHI2));
    }
    let mut bodies = BTreeMap::new();
    let mut frac_bodies = BTreeMap::new();
    let mut notes = Vec::new();
    let rank = |k: &UnknownKind| match k {
        UnknownKind::Xi(_) => 0,
        UnknownKind::G(_) => 1,
        UnknownKind::F(..) => 2,
        UnknownKind::H(_) => 3,
    };
    let mut order: Vec<_> = ans.unknowns.iter().collect();
    order.sort_by_key(|u| rank(&u.kind));
    let exps = exponents(sys.p(), degree);
    let mut accepted: Vec<(Expr, Expr)> = Vec::new();
    for tpl in &cfg.h_templates {
        match frac::frac_dt(tpl, &sys.alpha, &asm) {
            Ok(v) => accepted.push((tpl.clone(), v)),
            Err(e) => notes.push(format!("h-template {} dropped: {}", pr.expr(tpl), e)),
        }
    }
    for u in order {
        let name = u.app.name.as_str();
        match u.kind {
            UnknownKind::H(_) => {
                let mut body = Vec::new();
                let mut fb = Vec::new();
                for (k, (tpl, v)) in accepted.iter().enumerate() {
                    let c = coeff_symbol(name, &k.to_string());
                    body.push(Expr::mul(Expr::Param(c.clone()), tpl.clone()));
                    fb.push(Expr::mul(Expr::Param(c.clone()), v.clone()));
                    columns.push(c);
                }
                bodies.insert(u.app.name.clone(), simplify::simplify(&Expr::Sum(body)));
                frac_bodies.insert(u.app.name.clone(), simplify::simplify(&Expr::Sum(fb)));
            }
            _ => {
                let mut body = Vec::new();
                for e in &exps {
                    let tag: Vec<String> = e.iter().map(|k| k.to_string()).collect();
                    let c = coeff_symbol(name, &tag.join(","));
                    body.push(Expr::mul(Expr::Param(c.clone()), x_monomial(e)));
                    columns.push(c);
                }
                bodies.insert(u.app.name.clone(), simplify::simplify(&Expr::Sum(body)));
            }
        }
    }
    Ok(Instantiation { columns, bodies, frac_bodies, notes })
}

fn apply_inst(e: &Expr, inst: &Instantiation) -> Expr {
    map_atoms(e, &|a| match a {
        Expr::Fn(f) if f.frac => inst.frac_bodies.get(&f.name).cloned(),
        Expr::Fn(f) => inst.bodies.get(&f.name).map(|b| {
            let mut out = b.clone();
            for (slot, d) in f.deriv.iter().enumerate() {
                if let crate::expr::Arg::Indep(v) = f.args[slot] {
                    for _ in 0..*d {
                        out = diff::partial(&out, v);
                    }
                }
            }
            out
        }),
        _ => None,
    })
}

type RowKey = (usize, ExponentForm, Vec<Q>);

fn split_rows(
    eq: usize,
    e: &Expr,
    col: &BTreeMap<Symbol, usize>,
    rows: &mut BTreeMap<RowKey, BTreeMap<usize, Poly>>,
) -> Result<()> {
    for (m, c) in simplify::expand(e) {
        let mut tex = ExponentForm::zero();
        let mut xs: Vec<Q> = Vec::new();
        let mut column = None;
        let mut rest = Mono::new();
        for (b, ex) in m {
            match &b {
                Expr::Var(IndepVar::T) => tex = ex,
                Expr::Var(IndepVar::X(i)) => {
                    let k = ex.as_constant().cloned().ok_or_else(|| Error::NotLinear(b.to_string()))?;
                    if xs.len() <= *i {
                        xs.resize(*i + 1, Q::zero());
                    }
                    xs[*i] = k;
                }
                Expr::Param(s) if is_column(s) => {
                    if column.is_some() || !ex.is_one() {
                        return Err(Error::NotLinear(e.to_string()));
                    }
                    column = Some(col[s]);
                }
                _ => {
                    if b.contains_var(IndepVar::T) || b.contains_jet() || (0..16).any(|i| b.contains_var(IndepVar::X(i))) {
                        return Err(Error::NotLinear(b.to_string()));
                    }
                    if b.symbols().iter().any(is_column) {
                        return Err(Error::NotLinear(b.to_string()));
                    }
                    rest.insert(b, ex);
                }
            }
        }
        while xs.last().map_or(false, |k| k.is_zero()) {
            xs.pop();
        }
        let Some(j) = column else {
            return Err(Error::TemplateResidual(simplify::mono_to_expr(&rest, &c).to_string()));
        };
        let mut one = Poly::new();
        one.insert(rest, c);
        let slot = rows.entry((eq, tex, xs)).or_default().entry(j).or_default();
        simplify::add_into(slot, &one, &Q::one());
    }
    Ok(())
}

/// Solve one χ₂ branch at a fixed polynomial degree.
pub fn solve_branch(sys: &PDESystem, ds: &DeterminingSystem, cfg: &SolveConfig, degree: u32) -> Result<BranchSolution> {
    let asm = sys.assumptions();
    let inst = instantiate(sys, ds, cfg, degree)?;
    let col: BTreeMap<Symbol, usize> = inst.columns.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut rows: BTreeMap<RowKey, BTreeMap<usize, Poly>> = BTreeMap::new();
    for (k, e) in ds.integer_eqs.iter().map(|e| &e.expr).chain(ds.frac_eqs.iter()).enumerate() {
        let ie = apply_inst(e, &inst);
        split_rows(k, &ie, &col, &mut rows)?;
    }
    let mut assumptions = Vec::new();
    let texps: BTreeSet<&ExponentForm> = rows.keys().map(|k| &k.1).collect();
    let texps: Vec<&ExponentForm> = texps.into_iter().collect();
    for i in 0..texps.len() {
        for j in i + 1..texps.len() {
            let d = texps[i].sub(texps[j]);
            if !d.is_constant() && !asm.is_nonzero(&d) {
                let s = format!("{} != 0 (t-exponents kept apart)", d);
                if !assumptions.contains(&s) {
                    assumptions.push(s);
                }
            }
        }
    }
    let n = inst.columns.len();
    let matrix: Vec<Vec<RatFunc>> = rows
        .values()
        .map(|r| {
            let mut v = alloc::vec![RatFunc::zero(); n];
            for (j, p) in r {
                v[*j] = RatFunc::from_expr(&simplify::to_expr(p));
            }
            v
        })
        .filter(|v: &Vec<RatFunc>| v.iter().any(|x| !x.is_zero()))
        .collect();
    let equations = matrix.len();
    let red = linalg::rref(matrix, n, &asm);
    for a in &red.assumptions {
        if !assumptions.contains(a) {
            assumptions.push(a.clone());
        }
    }
    let mut ns = linalg::nullspace(&red, n);
    let mut notes = inst.notes.clone();
    if ds.branch == Branch::Nonzero {
        let c2 = col[&Symbol::new(CHI2)];
        if ns.iter().all(|v| v[c2].is_zero()) {
            ns.clear();
            notes.push("branch chi2!=0: every solution has chi2 = 0".into());
        }
    }
    let mut generators = Vec::new();
    for v in ns {
        let vals: BTreeMap<Symbol, Expr> =
            inst.columns.iter().cloned().zip(v.iter().map(RatFunc::to_expr)).collect();
        let g = ds.ansatz.gen.map(&|c| {
            let c = apply_inst(c, &inst);
            map_atoms(&c, &|a| match a {
                Expr::Param(s) if is_column(s) => vals.get(s).cloned(),
                _ => None,
            })
        });
        generators.push(g);
    }
    Ok(BranchSolution { branch: ds.branch, generators, unknowns: n, equations, notes, assumptions })
}

/// Build, solve, merge, normalize and verify.
pub fn solve(sys: &PDESystem, cfg: &SolveConfig) -> Result<SolutionBasis> {
    let mut branches = Vec::new();
    let mut all = Vec::new();
    let mut assumptions: Vec<String> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let push = |v: &mut Vec<String>, s: &String| {
        if !v.contains(s) {
            v.push(s.clone());
        }
    };
    for &b in &cfg.branches {
        let ds = determining::build(sys, b)?;
        for a in &ds.assumptions {
            push(&mut assumptions, a);
        }
        let sol = solve_branch(sys, &ds, cfg, cfg.poly_degree)?;
        if cfg.check_degree {
            let hi = solve_branch(sys, &ds, cfg, cfg.poly_degree + 1)?;
            if hi.generators.len() != sol.generators.len() {
                return Err(Error::DegreeInsufficient {
                    degree: cfg.poly_degree,
                    low: sol.generators.len(),
                    high: hi.generators.len(),
                });
            }
        }
        for a in &sol.assumptions {
            push(&mut assumptions, &format!("[{}] {}", b.name(), a));
        }
        for n in &sol.notes {
            push(&mut notes, n);
        }
        all.extend(sol.generators.iter().cloned());
        branches.push(sol);
    }
    let generators = normalize_basis(sys, &all);
    let residual_certificate =
        generators.iter().map(|g| verify_generator(sys, g)).collect::<Result<Vec<_>>>()?;
    Ok(SolutionBasis {
        dimension: generators.len(),
        generators,
        residual_certificate,
        assumptions,
        branches,
        notes,
    })
}

/// Column key for a generator coefficient: component, position class, and
/// the monomial in t, x, u.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ColKey {
    comp: usize,
    class: u8,
    mono: Mono,
}

fn is_function_atom(b: &Expr) -> bool {
    matches!(b, Expr::Var(_) | Expr::Jet(_))
}

fn col_cmp(a: &ColKey, b: &ColKey) -> Ordering {
    a.comp
        .cmp(&b.comp)
        .then(a.class.cmp(&b.class))
        .then_with(|| mono_degree(&a.mono).cmp(&mono_degree(&b.mono)))
        .then_with(|| b.mono.cmp(&a.mono))
}

fn mono_degree(m: &Mono) -> Q {
    m.values().map(|e| e.as_constant().cloned().unwrap_or_else(|| e.constant_part().clone())).fold(Q::zero(), |a, b| a + b)
}

fn decompose(g: &Generator, p: usize) -> Vec<(ColKey, Expr)> {
    let mut acc: Vec<(ColKey, Poly)> = Vec::new();
    for (comp, c) in g.components().into_iter().enumerate() {
        for (m, k) in simplify::expand(c) {
            let (f, r): (Mono, Mono) = m.into_iter().partition(|(b, _)| is_function_atom(b));
            let class = if comp <= p {
                0
            } else {
                let s = comp - 1 - p;
                if f.contains_key(&Expr::Jet(JetVar::plain(s))) {
                    0
                } else if f.keys().any(|b| matches!(b, Expr::Jet(_))) {
                    1
                } else {
                    2
                }
            };
            let key = ColKey { comp, class, mono: f };
            let mut one = Poly::new();
            one.insert(r, k);
            match acc.iter_mut().find(|(k2, _)| *k2 == key) {
                Some((_, pp)) => simplify::add_into(pp, &one, &Q::one()),
                None => acc.push((key, one)),
            }
        }
    }
    acc.into_iter().filter(|(_, p)| !p.is_empty()).map(|(k, p)| (k, simplify::to_expr(&p))).collect()
}

/// Reduced row echelon form of the generator coefficient matrix.
pub fn normalize_basis(sys: &PDESystem, gens: &[Generator]) -> Vec<Generator> {
    let p = sys.p();
    let q = sys.q();
    let parts: Vec<Vec<(ColKey, Expr)>> = gens.iter().map(|g| decompose(g, p)).collect();
    let mut keys: Vec<ColKey> = Vec::new();
    for ps in &parts {
        for (k, _) in ps {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    keys.sort_by(col_cmp);
    let rows: Vec<Vec<RatFunc>> = parts
        .iter()
        .map(|ps| {
            let mut v = alloc::vec![RatFunc::zero(); keys.len()];
            for (k, e) in ps {
                let j = keys.iter().position(|x| x == k).unwrap();
                v[j] = RatFunc::from_expr(e);
            }
            v
        })
        .collect();
    let red = linalg::rref(rows, keys.len(), &sys.assumptions());
    red.rows
        .iter()
        .map(|row| {
            let mut g = Generator::zero(p, q);
            let mut comps: Vec<Vec<Expr>> = alloc::vec![Vec::new(); 1 + p + q];
            for (k, v) in keys.iter().zip(row) {
                if !v.is_zero() {
                    comps[k.comp].push(Expr::mul(v.to_expr(), simplify::mono_to_expr(&k.mono, &Q::one())));
                }
            }
            let mut it = comps.into_iter().map(|ts| simplify::simplify(&Expr::Sum(ts)));
            g.tau = it.next().unwrap();
            for i in 0..p {
                g.xi[i] = it.next().unwrap();
            }
            for s in 0..q {
                g.eta[s] = it.next().unwrap();
            }
            g
        })
        .collect()
}

fn free_of_t(e: &Expr) -> bool {
    !e.contains_var(IndepVar::T)
}

/// Substitute a concrete generator into both conditions.
pub fn verify_generator(sys: &PDESystem, g: &Generator) -> Result<Residuals> {
    check_shape(sys, g)?;
    let asm = sys.assumptions();
    let frac: Vec<Expr> = determining::h_condition(sys, g)?
        .into_iter()
        .map(|e| if gamma::is_zero(&e) { Expr::zero() } else { e })
        .collect();
    let pr = sys.printer(Style::Subscript);
    let mut separated = Vec::new();
    for cond in determining::invariance_condition(sys, g)? {
        let frag = determining::separate(&cond, sys, &asm)?;
        if !gamma::is_zero(&frag.jet_free) {
            separated.push(("1".to_string(), frag.jet_free));
        }
        for e in frag.eqs {
            if !gamma::is_zero(&e.expr) {
                separated.push((pr.expr(&simplify::mono_to_expr(&e.monomial, &Q::one())), e.expr));
            }
        }
    }
    Ok(Residuals { frac, separated })
}

fn shape_err(what: &str, e: &Expr) -> Error {
    Error::ShapeViolation(format!("{}: {}", what, e))
}

fn check_shape(sys: &PDESystem, g: &Generator) -> Result<()> {
    let t = IndepVar::T;
    let tau = &g.tau;
    if tau.contains_jet() || (0..sys.p()).any(|i| tau.contains_var(IndepVar::X(i))) {
        return Err(shape_err("tau must depend on t only", tau));
    }
    let d3 = diff::partial_n(tau, t, 3);
    let at0 = map_atoms(tau, &|a| matches!(a, Expr::Var(IndepVar::T)).then(Expr::zero));
    if !gamma::is_zero(&d3) || !gamma::is_zero(&at0) {
        return Err(shape_err("tau must be chi2*t^2 + chi1*t", tau));
    }
    for x in &g.xi {
        if !free_of_t(x) || x.contains_jet() {
            return Err(shape_err("xi must depend on x only", x));
        }
    }
    let tau2 = diff::partial_n(tau, t, 2);
    for (s, eta) in g.eta.iter().enumerate() {
        let jets = eta.jets();
        if jets.iter().any(|j| !j.is_plain()) || eta.fns().iter().any(|f| f.has_dep_arg()) {
            return Err(shape_err("eta must be affine in u", eta));
        }
        for i in 0..sys.q() {
            let a = diff::partial_jet(eta, &JetVar::plain(i));
            if a.contains_jet() {
                return Err(shape_err("eta must be affine in u", eta));
            }
            if i != s && !free_of_t(&a) {
                return Err(shape_err("cross coefficients must not depend on t", &a));
            }
            if i == s {
                let at = diff::partial(&a, t);
                let want = simplify::simplify(&Expr::Product(alloc::vec![
                    Expr::rat(1, 2),
                    Expr::sub(sys.alpha_expr(), Expr::one()),
                    tau2.clone(),
                ]));
                if !gamma::equivalent(&at, &want) {
                    return Err(shape_err("u coefficient must be g(x) + gamma*D_t(tau)", &a));
                }
            }
        }
    }
    Ok(())
}
