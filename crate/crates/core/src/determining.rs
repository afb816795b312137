//! The two determining conditions, separation by jet monomials and a light
//! autoreduction for presentation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::One;

use crate::assume::Assumptions;
use crate::diff;
use crate::error::{Error, Result};
use crate::expr::{ExponentForm, Expr, FnApp, IndepVar, JetVar, Symbol, Q};
use crate::frac;
use crate::model::{classify_terms, PDESystem, TermClass};
use crate::print::Printer;
use crate::prolong::{eta_theta, AnsatzGenerator, Branch, Generator, CHI1, CHI2};
use crate::simplify::{self, simplify, Mono, Poly};

/// `η_s` with every `u_i` set to zero.
pub fn h_parts(g: &Generator) -> Vec<Expr> {
    let q = g.eta.len();
    g.eta
        .iter()
        .map(|e| {
            crate::subst::map_atoms(e, &|a| match a {
                Expr::Jet(j) if j.is_plain() && j.dep < q => Some(Expr::zero()),
                _ => None,
            })
        })
        .collect()
}

struct Prolonged<'a> {
    g: &'a Generator,
    cache: BTreeMap<(usize, Vec<u32>), Expr>,
}

impl<'a> Prolonged<'a> {
    fn eta(&mut self, j: &JetVar) -> Result<Expr> {
        let key = (j.dep, j.space().to_vec());
        if let Some(e) = self.cache.get(&key) {
            return Ok(e.clone());
        }
        let e = eta_theta(self.g, j.dep, j.space())?;
        self.cache.insert(key, e.clone());
        Ok(e)
    }
}

/// Condition 2 for every equation.
pub fn invariance_condition(sys: &PDESystem, g: &Generator) -> Result<Vec<Expr>> {
    let classes = classify_terms(sys);
    let hs = h_parts(g);
    let dtau = diff::total(&g.tau, IndepVar::T)?;
    let alpha = sys.alpha_expr();
    let mut pro = Prolonged { g, cache: BTreeMap::new() };
    let mut out = Vec::new();
    for (s, eq) in sys.equations.iter().enumerate() {
        let f = &eq.f;
        let mut terms = Vec::new();
        for (i, eqi) in sys.equations.iter().enumerate() {
            let a = diff::partial_jet(&g.eta[s], &JetVar::plain(i));
            terms.push(Expr::mul(a, eqi.f.clone()));
        }
        terms.push(Expr::Product(alloc::vec![Expr::int(-1), alpha.clone(), dtau.clone(), f.clone()]));
        terms.push(Expr::neg(Expr::mul(g.tau.clone(), diff::partial(f, IndepVar::T))));
        for (i, xi) in g.xi.iter().enumerate() {
            terms.push(Expr::neg(Expr::mul(xi.clone(), diff::partial(f, IndepVar::X(i)))));
        }
        let tc: &TermClass = &classes[s];
        for l in &tc.linear {
            let eta = pro.eta(&l.jet)?;
            let dh = diff::total_multi(&hs[l.jet.dep], l.jet.space())?;
            terms.push(Expr::Product(alloc::vec![
                Expr::int(-1),
                Expr::sub(eta, dh),
                l.coeff.clone(),
            ]));
        }
        let nl = tc.nonlinear_part();
        for j in nl.jets() {
            let d = diff::partial_jet(&nl, &j);
            terms.push(Expr::Product(alloc::vec![Expr::int(-1), pro.eta(&j)?, d]));
        }
        // functional parameters depend on u_j through their argument
        for fa in nl.fns() {
            for a in &fa.args {
                if let crate::expr::Arg::Dep(d) = a {
                    let j = JetVar::plain(*d);
                    if !nl.jets().contains(&j) {
                        let dd = diff::partial_jet(&nl, &j);
                        terms.push(Expr::Product(alloc::vec![Expr::int(-1), pro.eta(&j)?, dd]));
                    }
                }
            }
        }
        out.push(simplify(&Expr::Sum(terms)));
    }
    Ok(out)
}

/// Condition 1 for every equation. `∂_t^α h_s` is evaluated when `h_s` is a
/// power sum in t and kept opaque for unknown functions.
pub fn h_condition(sys: &PDESystem, g: &Generator) -> Result<Vec<Expr>> {
    let classes = classify_terms(sys);
    let hs = h_parts(g);
    let asm = sys.assumptions();
    let dtau = diff::total(&g.tau, IndepVar::T)?;
    let alpha = sys.alpha_expr();
    let mut out = Vec::new();
    for (s, eq) in sys.equations.iter().enumerate() {
        let h = &eq.h;
        let mut terms = alloc::vec![frac::frac_dt(&hs[s], &sys.alpha, &asm)?];
        for (i, eqi) in sys.equations.iter().enumerate() {
            let a = diff::partial_jet(&g.eta[s], &JetVar::plain(i));
            terms.push(Expr::mul(a, eqi.h.clone()));
        }
        terms.push(Expr::Product(alloc::vec![Expr::int(-1), alpha.clone(), dtau.clone(), h.clone()]));
        terms.push(Expr::neg(Expr::mul(g.tau.clone(), diff::partial(h, IndepVar::T))));
        for (i, xi) in g.xi.iter().enumerate() {
            terms.push(Expr::neg(Expr::mul(xi.clone(), diff::partial(h, IndepVar::X(i)))));
        }
        for l in &classes[s].linear {
            let dh = diff::total_multi(&hs[l.jet.dep], l.jet.space())?;
            terms.push(Expr::Product(alloc::vec![Expr::int(-1), dh, l.coeff.clone()]));
        }
        out.push(simplify(&Expr::Sum(terms)));
    }
    Ok(out)
}

/// One separated equation: the coefficient of a jet monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatedEq {
    pub monomial: Mono,
    pub expr: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fragment {
    pub eqs: Vec<SeparatedEq>,
    pub jet_free: Expr,
    pub assumptions: Vec<String>,
    /// Functional-parameter atoms treated as independent.
    pub functional: BTreeSet<String>,
}

fn is_jet_factor(b: &Expr) -> bool {
    matches!(b, Expr::Jet(_)) || matches!(b, Expr::Fn(f) if f.has_dep_arg())
}

/// Coefficients of a condition with respect to every jet-dependent monomial.
pub fn separate(cond: &Expr, sys: &PDESystem, asm: &Assumptions) -> Result<Fragment> {
    let pr = sys.printer(crate::print::Style::Subscript);
    let mut groups: BTreeMap<Mono, Poly> = BTreeMap::new();
    for (m, c) in simplify::expand(cond) {
        let mut key = Mono::new();
        let mut rest = Mono::new();
        for (b, e) in m {
            if is_jet_factor(&b) {
                key.insert(b, e);
            } else if b.contains_jet() {
                return Err(Error::NonPolynomial(pr.expr(&b)));
            } else {
                rest.insert(b, e);
            }
        }
        let mut one = Poly::new();
        one.insert(rest, c);
        simplify::add_into(groups.entry(key).or_default(), &one, &Q::one());
    }
    groups.retain(|_, p| !p.is_empty());
    let mut frag = Fragment { eqs: Vec::new(), jet_free: Expr::zero(), assumptions: Vec::new(), functional: BTreeSet::new() };
    let keys: Vec<Mono> = groups.keys().cloned().collect();
    frag.assumptions = genericity(&keys, asm);
    frag.functional = functional_atoms(&keys, &pr);
    for (k, p) in groups {
        let e = simplify::to_expr(&p);
        if k.is_empty() {
            frag.jet_free = e;
        } else {
            frag.eqs.push(SeparatedEq { monomial: k, expr: e });
        }
    }
    Ok(frag)
}

/// Record which parameter coincidences would merge two separated monomials.
fn genericity(keys: &[Mono], asm: &Assumptions) -> Vec<String> {
    let mut out: BTreeSet<String> = BTreeSet::new();
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            let (a, b) = (&keys[i], &keys[j]);
            let bases: BTreeSet<&Expr> = a.keys().chain(b.keys()).collect();
            let mut symbolic = Vec::new();
            let mut differs = false;
            for base in bases {
                let ea = a.get(base).cloned().unwrap_or_default();
                let eb = b.get(base).cloned().unwrap_or_default();
                let d = ea.sub(&eb);
                if d.is_zero() {
                    continue;
                }
                if d.is_constant() {
                    differs = true;
                    break;
                }
                symbolic.push(d);
            }
            if differs || symbolic.is_empty() {
                continue;
            }
            if symbolic.iter().any(|d| asm.is_nonzero(d)) {
                continue;
            }
            let d = &symbolic[0];
            let text = normalize_nonzero(d);
            out.insert(text);
        }
    }
    out.into_iter().collect()
}

fn functional_atoms(keys: &[Mono], pr: &Printer) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for k in keys {
        for b in k.keys() {
            if let Expr::Fn(f) = b {
                out.insert(pr.fnapp(f));
            }
        }
    }
    out
}

/// `c·(s − k) ≠ 0` printed as `s != k`.
fn normalize_nonzero(d: &ExponentForm) -> String {
    let terms = d.terms();
    if terms.len() == 1 {
        let (s, c) = terms.iter().next().unwrap();
        let v = -(d.constant_part() / c);
        return format!("{} != {}", s, crate::expr::fmt_q(&v));
    }
    let lead = terms.values().next().unwrap().clone();
    format!("{} != 0", d.scale(&lead.recip()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegerEq {
    /// Equation index the condition came from.
    pub source: usize,
    pub monomial: String,
    pub expr: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeterminingSystem {
    pub integer_eqs: Vec<IntegerEq>,
    pub frac_eqs: Vec<Expr>,
    pub assumptions: Vec<String>,
    pub branch: Branch,
    pub ansatz: AnsatzGenerator,
}

pub fn build(sys: &PDESystem, branch: Branch) -> Result<DeterminingSystem> {
    let ans = AnsatzGenerator::new(sys, branch);
    let asm = sys.assumptions();
    let pr = sys.printer(crate::print::Style::Subscript);
    let c2 = invariance_condition(sys, &ans.gen)?;
    let c1 = h_condition(sys, &ans.gen)?;
    let mut integer_eqs = Vec::new();
    let mut frac_eqs = Vec::new();
    let mut assumptions: Vec<String> = Vec::new();
    let mut functional = BTreeSet::new();
    for (s, cond) in c2.iter().enumerate() {
        let frag = separate(cond, sys, &asm)?;
        functional.extend(frag.functional);
        for a in frag.assumptions {
            if !assumptions.contains(&a) {
                assumptions.push(a);
            }
        }
        for e in frag.eqs {
            integer_eqs.push(IntegerEq {
                source: s,
                monomial: pr.expr(&simplify::mono_to_expr(&e.monomial, &Q::one())),
                expr: e.expr,
            });
        }
        frac_eqs.push(simplify(&Expr::add(c1[s].clone(), frag.jet_free)));
    }
    if !functional.is_empty() {
        let list: Vec<String> = functional.into_iter().collect();
        assumptions.push(format!(
            "functional parameters generic: {{{}}} independent over polynomials in the jet variables",
            list.join(", ")
        ));
    }
    Ok(DeterminingSystem { integer_eqs, frac_eqs, assumptions, branch, ansatz: ans })
}

pub fn is_unknown_atom(e: &Expr, ans: &AnsatzGenerator) -> bool {
    match e {
        Expr::Fn(f) => ans.unknowns.iter().any(|u| u.app.name == f.name),
        Expr::Param(s) => s.as_str() == CHI1 || s.as_str() == CHI2,
        _ => false,
    }
}

/// Linear form of an equation in the unknown atoms.
pub fn linear_form(e: &Expr, ans: &AnsatzGenerator) -> Result<BTreeMap<Expr, Expr>> {
    let mut acc: BTreeMap<Expr, Poly> = BTreeMap::new();
    for (m, c) in simplify::expand(e) {
        let unk: Vec<&Expr> = m.keys().filter(|b| is_unknown_atom(b, ans)).collect();
        match unk.as_slice() {
            [u] if m[*u].is_one() => {
                let u = (*u).clone();
                let mut rest = m.clone();
                rest.remove(&u);
                let mut one = Poly::new();
                one.insert(rest, c);
                simplify::add_into(acc.entry(u).or_default(), &one, &Q::one());
            }
            _ => {
                return Err(Error::NotLinear(simplify::mono_to_expr(&m, &c).to_string()));
            }
        }
    }
    Ok(acc
        .into_iter()
        .filter(|(_, p)| !p.is_empty())
        .map(|(k, p)| (k, simplify::to_expr(&p)))
        .collect())
}

fn kills(zero: &Expr, atom: &Expr) -> bool {
    match (zero, atom) {
        (Expr::Fn(z), Expr::Fn(a)) => {
            z.name == a.name
                && !z.frac
                && z.deriv.iter().zip(&a.deriv).all(|(dz, da)| dz <= da)
        }
        (a, b) => a == b,
    }
}

fn apply_zeros(e: &Expr, zeros: &[Expr]) -> Expr {
    crate::subst::map_atoms(e, &|a| {
        if matches!(a, Expr::Fn(_) | Expr::Param(_)) && zeros.iter().any(|z| kills(z, a)) {
            Some(Expr::zero())
        } else {
            None
        }
    })
}

/// Differential autoreduction: equations naming a single unknown are facts
/// that annihilate that unknown and all its derivatives; space derivatives of
/// the remaining equations are scanned for further facts. Returns the
/// reduced list: facts first (as the bare atom), then the remaining equations.
pub fn autoreduce(ds: &DeterminingSystem, sys: &PDESystem) -> Result<Vec<Expr>> {
    let ans = &ds.ansatz;
    let mut eqs: Vec<Expr> = ds.integer_eqs.iter().map(|e| e.expr.clone()).collect();
    let mut zeros: Vec<Expr> = Vec::new();
    for _round in 0..8 {
        let mut changed = false;
        let mut probe = eqs.clone();
        for e in &eqs {
            for i in 0..sys.p() {
                probe.push(diff::partial(e, IndepVar::X(i)));
            }
        }
        for e in &probe {
            let e = apply_zeros(e, &zeros);
            let lf = linear_form(&e, ans)?;
            if lf.len() == 1 {
                let (atom, c) = lf.iter().next().unwrap();
                if !coefficient_vanishes(c) && !zeros.iter().any(|z| kills(z, atom)) {
                    zeros.retain(|z| !kills(atom, z));
                    zeros.push(atom.clone());
                    changed = true;
                }
            }
        }
        eqs = eqs.iter().map(|e| apply_zeros(e, &zeros)).filter(|e| !e.is_zero_literal()).collect();
        if !changed {
            break;
        }
    }
    let mut rest: Vec<Expr> = Vec::new();
    for e in &eqs {
        let lf = linear_form(e, ans)?;
        if lf.len() <= 1 {
            continue;
        }
        let n = normalize_scale(e, &lf);
        if !rest.contains(&n) {
            rest.push(n);
        }
    }
    // facts obtained by differentiating a surviving equation are left implicit
    let order = |e: &Expr| match e {
        Expr::Fn(f) => f.deriv.iter().sum::<u32>(),
        _ => 0,
    };
    zeros.sort_by_key(|z| core::cmp::Reverse(order(z)));
    let mut kept: Vec<Expr> = Vec::new();
    let mut dropped: Vec<Expr> = Vec::new();
    for z in &zeros {
        let others: Vec<Expr> = zeros.iter().filter(|o| *o != z && !dropped.contains(o)).cloned().collect();
        let mut implied = false;
        if order(z) < 2 {
            kept.push(z.clone());
            continue;
        }
        for e in &rest {
            for i in 0..sys.p() {
                let d = apply_zeros(&diff::partial(e, IndepVar::X(i)), &others);
                let lf = linear_form(&d, ans)?;
                if lf.len() == 1 && lf.contains_key(z) {
                    implied = true;
                }
            }
        }
        if implied {
            dropped.push(z.clone());
        } else {
            kept.push(z.clone());
        }
    }
    let mut out = kept;
    out.sort();
    out.extend(rest);
    Ok(out)
}

fn coefficient_vanishes(c: &Expr) -> bool {
    crate::gamma::is_zero(c)
}

/// Scale so that the first rational coefficient is 1.
fn normalize_scale(e: &Expr, lf: &BTreeMap<Expr, Expr>) -> Expr {
    let first = lf.values().next().unwrap();
    let c = match simplify::expand(first).iter().next() {
        Some((_, c)) => c.clone(),
        None => Q::one(),
    };
    simplify(&Expr::mul(Expr::Num(c.recip()), e.clone()))
}

pub fn unknown_fn<'a>(ans: &'a AnsatzGenerator, name: &Symbol) -> Option<&'a FnApp> {
    ans.unknowns.iter().find(|u| &u.app.name == name).map(|u| &u.app)
}
