//! Generators, the structured ansatz and extended infinitesimals.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use crate::diff;
use crate::error::Result;
use crate::expr::{q, qr, Arg, ExponentForm, Expr, FnApp, IndepVar, JetVar, Symbol, Q};
use crate::frac::{self, gen_binomial};
use crate::model::PDESystem;
use crate::simplify::simplify;

/// `X = τ ∂_t + ξ_i ∂_{x_i} + η_s ∂_{u_s}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub tau: Expr,
    pub xi: Vec<Expr>,
    pub eta: Vec<Expr>,
}

impl Generator {
    pub fn zero(p: usize, q: usize) -> Self {
        Generator { tau: Expr::zero(), xi: alloc::vec![Expr::zero(); p], eta: alloc::vec![Expr::zero(); q] }
    }

    pub fn translation(p: usize, q: usize, i: usize) -> Self {
        let mut g = Self::zero(p, q);
        g.xi[i] = Expr::one();
        g
    }

    pub fn components(&self) -> Vec<&Expr> {
        core::iter::once(&self.tau).chain(&self.xi).chain(&self.eta).collect()
    }

    pub fn map(&self, f: &dyn Fn(&Expr) -> Expr) -> Generator {
        Generator {
            tau: f(&self.tau),
            xi: self.xi.iter().map(f).collect(),
            eta: self.eta.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: &dyn Fn(&Expr) -> Result<Expr>) -> Result<Generator> {
        Ok(Generator {
            tau: f(&self.tau)?,
            xi: self.xi.iter().map(f).collect::<Result<_>>()?,
            eta: self.eta.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero_literal())
    }

    pub fn render(&self, sys: &PDESystem, pr: &crate::print::Printer) -> String {
        let mut parts = Vec::new();
        let mut push = |c: &Expr, d: String| {
            if c.is_zero_literal() {
                return;
            }
            let s = pr.expr(c);
            let body = if *c == Expr::one() {
                d
            } else if matches!(c, Expr::Sum(_)) {
                format!("({})*{}", s, d)
            } else {
                format!("{}*{}", s, d)
            };
            parts.push(body);
        };
        push(&self.tau, "∂t".into());
        for (i, x) in self.xi.iter().enumerate() {
            push(x, format!("∂{}", sys.space[i]));
        }
        for (s, e) in self.eta.iter().enumerate() {
            push(e, format!("∂{}", sys.deps[s]));
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Branch {
    /// γ_s kept as symbols, χ₂ free.
    Symbolic,
    /// χ₂ = 0, γ_s = 0.
    Zero,
    /// χ₂ ≠ 0, γ_s = (α−1)/2.
    Nonzero,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Symbolic => "symbolic",
            Branch::Zero => "chi2=0",
            Branch::Nonzero => "chi2!=0",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum UnknownKind {
    Xi(usize),
    G(usize),
    /// Coefficient of `u_i` in `η_s`.
    F(usize, usize),
    H(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnknownFn {
    pub kind: UnknownKind,
    pub app: FnApp,
}

pub const CHI1: &str = "chi1";
pub const CHI2: &str = "chi2";

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzGenerator {
    pub gen: Generator,
    pub branch: Branch,
    pub alpha: ExponentForm,
    pub gammas: Vec<Expr>,
    pub unknowns: Vec<UnknownFn>,
}

pub fn gamma_symbol(sys: &PDESystem, s: usize) -> Symbol {
    Symbol::new(&format!("gamma_{}", sys.deps[s]))
}

/// Names the ansatz introduces; user declarations must avoid them.
pub fn reserved_names(space: &[String], deps: &[String]) -> Vec<String> {
    let mut out = alloc::vec![String::from(CHI1), String::from(CHI2)];
    for x in space {
        out.push(format!("xi_{}", x));
    }
    for u in deps {
        out.push(format!("g_{}", u));
        out.push(format!("h_{}", u));
        out.push(format!("gamma_{}", u));
        for v in deps {
            if u != v {
                out.push(format!("f_{}_{}", u, v));
            }
        }
    }
    out
}

impl AnsatzGenerator {
    pub fn new(sys: &PDESystem, branch: Branch) -> Self {
        let t = Expr::t();
        let chi1 = Expr::param(CHI1);
        let chi2 = match branch {
            Branch::Zero => Expr::zero(),
            _ => Expr::param(CHI2),
        };
        let tau = simplify(&Expr::add(
            Expr::mul(chi2, Expr::powi(t.clone(), 2)),
            Expr::mul(chi1, t),
        ));
        Self::with_tau(sys, branch, tau)
    }

    /// Same shape with an arbitrary τ(t); used for negative fixtures.
    pub fn with_tau(sys: &PDESystem, branch: Branch, tau: Expr) -> Self {
        let p = sys.p();
        let q = sys.q();
        let xs: Vec<Arg> = (0..p).map(|i| Arg::Indep(IndepVar::X(i))).collect();
        let mut txs = alloc::vec![Arg::Indep(IndepVar::T)];
        txs.extend(xs.iter().copied());
        let mut unknowns = Vec::new();
        let mut xi = Vec::new();
        for i in 0..p {
            let app = FnApp::new(&Symbol::new(&format!("xi_{}", sys.space[i])), xs.clone());
            xi.push(Expr::Fn(app.clone()));
            unknowns.push(UnknownFn { kind: UnknownKind::Xi(i), app });
        }
        let dtau = diff::partial(&tau, IndepVar::T);
        let gammas: Vec<Expr> = (0..q)
            .map(|s| match branch {
                Branch::Symbolic => Expr::Param(gamma_symbol(sys, s)),
                Branch::Zero => Expr::zero(),
                Branch::Nonzero => simplify(&Expr::mul(
                    Expr::Num(qr(1, 2)),
                    Expr::sub(sys.alpha_expr(), Expr::one()),
                )),
            })
            .collect();
        let mut eta = Vec::new();
        for s in 0..q {
            let g = FnApp::new(&Symbol::new(&format!("g_{}", sys.deps[s])), xs.clone());
            unknowns.push(UnknownFn { kind: UnknownKind::G(s), app: g.clone() });
            let mut terms = alloc::vec![Expr::mul(
                Expr::add(Expr::Fn(g), Expr::mul(gammas[s].clone(), dtau.clone())),
                Expr::u(s),
            )];
            for i in 0..q {
                if i == s {
                    continue;
                }
                let f = FnApp::new(
                    &Symbol::new(&format!("f_{}_{}", sys.deps[s], sys.deps[i])),
                    xs.clone(),
                );
                unknowns.push(UnknownFn { kind: UnknownKind::F(s, i), app: f.clone() });
                terms.push(Expr::mul(Expr::Fn(f), Expr::u(i)));
            }
            let h = FnApp::new(&Symbol::new(&format!("h_{}", sys.deps[s])), txs.clone());
            unknowns.push(UnknownFn { kind: UnknownKind::H(s), app: h.clone() });
            terms.push(Expr::Fn(h));
            eta.push(simplify(&Expr::Sum(terms)));
        }
        AnsatzGenerator {
            gen: Generator { tau: simplify(&tau), xi, eta },
            branch,
            alpha: sys.alpha.clone(),
            gammas,
            unknowns,
        }
    }

    pub fn h_app(&self, s: usize) -> &FnApp {
        &self
            .unknowns
            .iter()
            .find(|u| u.kind == UnknownKind::H(s))
            .expect("h unknown present")
            .app
    }

    /// `h_s`, i.e. `η_s` at `u = 0`.
    pub fn h_expr(&self, s: usize) -> Expr {
        Expr::Fn(self.h_app(s).clone())
    }
}

/// `η_s^θ = D_θ(η_s − ξ_i u_{s,i}) + ξ_i u_{s,θ+e_i}` for τ = τ(t).
pub fn eta_theta(g: &Generator, s: usize, theta: &[u32]) -> Result<Expr> {
    let p = g.xi.len();
    let mut inner = alloc::vec![g.eta[s].clone()];
    for i in 0..p {
        let ui = JetVar::plain(s).bump(IndepVar::X(i));
        inner.push(Expr::neg(Expr::mul(g.xi[i].clone(), Expr::Jet(ui))));
    }
    let d = diff::total_multi(&simplify(&Expr::Sum(inner)), theta)?;
    let mut terms = alloc::vec![d];
    let base = JetVar::new(s, theta, 0, None);
    for i in 0..p {
        terms.push(Expr::mul(g.xi[i].clone(), Expr::Jet(base.bump(IndepVar::X(i)))));
    }
    Ok(simplify(&Expr::Sum(terms)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesCoeffs {
    pub k: u32,
    /// Coefficient of `∂_t^{α−k} u_i`.
    pub dep: Vec<Expr>,
    /// Coefficient of `∂_t^{α−k} ∂_{x_i} u_s`.
    pub space: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaAlpha {
    pub local: Expr,
    pub series: Vec<SeriesCoeffs>,
}

fn series_coeffs(g: &Generator, alpha: &Expr, s: usize, k: u32) -> Result<SeriesCoeffs> {
    let ck = gen_binomial(alpha, k as i64)?;
    let ck1 = gen_binomial(alpha, k as i64 + 1)?;
    let q = g.eta.len();
    let mut dep = Vec::new();
    for i in 0..q {
        let a = diff::partial_jet(&g.eta[s], &JetVar::plain(i));
        let mut c = Expr::mul(ck.clone(), diff::partial_n(&a, IndepVar::T, k));
        if i == s {
            c = Expr::sub(c, Expr::mul(ck1.clone(), diff::total_n(&g.tau, IndepVar::T, k + 1)?));
        }
        dep.push(simplify(&c));
    }
    let space = g
        .xi
        .iter()
        .map(|x| Ok(simplify(&Expr::neg(Expr::mul(ck.clone(), diff::total_n(x, IndepVar::T, k)?)))))
        .collect::<Result<_>>()?;
    Ok(SeriesCoeffs { k, dep, space })
}

/// Fractional extended infinitesimal for the ansatz with `∂_t^α u_i` eliminated.
pub fn eta_alpha_ansatz(
    ans: &AnsatzGenerator,
    sys: &PDESystem,
    s: usize,
    k_max: u32,
) -> Result<EtaAlpha> {
    let g = &ans.gen;
    let alpha = sys.alpha_expr();
    let asm = sys.assumptions();
    let dtau = diff::total(&g.tau, IndepVar::T)?;
    let mut terms = alloc::vec![frac::frac_dt(&ans.h_expr(s), &sys.alpha, &asm)?];
    for i in 0..sys.q() {
        let a = diff::partial_jet(&g.eta[s], &JetVar::plain(i));
        terms.push(Expr::mul(a, sys.equations[i].rhs()));
    }
    terms.push(Expr::Product(alloc::vec![
        Expr::int(-1),
        alpha.clone(),
        dtau,
        sys.equations[s].rhs(),
    ]));
    let series = (1..=k_max).map(|k| series_coeffs(g, &alpha, s, k)).collect::<Result<_>>()?;
    Ok(EtaAlpha { local: simplify(&Expr::Sum(terms)), series })
}

#[derive(Clone, Debug, PartialEq)]
pub enum AuxSlot {
    Dep { s: usize, i: usize },
    Space { s: usize, i: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuxResidual {
    pub k: u32,
    pub slot: AuxSlot,
    pub expr: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuxReport {
    pub ok: bool,
    pub residuals: Vec<AuxResidual>,
}

/// Every series coefficient of the fractional prolongation must vanish.
pub fn check_aux_conditions(ans: &AnsatzGenerator, k_max: u32) -> Result<AuxReport> {
    let alpha = ans.alpha.to_expr();
    let mut residuals = Vec::new();
    for s in 0..ans.gen.eta.len() {
        for k in 1..=k_max {
            let c = series_coeffs(&ans.gen, &alpha, s, k)?;
            for (i, e) in c.dep.into_iter().enumerate() {
                if !crate::gamma::is_zero(&e) {
                    residuals.push(AuxResidual { k, slot: AuxSlot::Dep { s, i }, expr: e });
                }
            }
            for (i, e) in c.space.into_iter().enumerate() {
                if !crate::gamma::is_zero(&e) {
                    residuals.push(AuxResidual { k, slot: AuxSlot::Space { s, i }, expr: e });
                }
            }
        }
    }
    Ok(AuxReport { ok: residuals.is_empty(), residuals })
}

fn factorial(n: u32) -> Q {
    (1..=n as i64).fold(Q::one(), |a, k| a * q(k))
}

fn binom(n: u32, k: u32) -> Q {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Compositions `(m_1..m_q)` with `Σ m_i ≤ n`.
fn compositions(q: usize, n: u32) -> Vec<Vec<u32>> {
    crate::model::multi_indices(q, n)
}

/// The nonlinear remainder `μ` of the fractional total derivative, summed to `n ≤ N`.
pub fn mu_truncated(eta: &Expr, n_max: u32, q: usize, alpha: &ExponentForm) -> Result<Expr> {
    let a = alpha.to_expr();
    let mut total = Vec::new();
    for n in 2..=n_max {
        let pre = Expr::Product(alloc::vec![
            gen_binomial(&a, n as i64)?,
            Expr::pow(Expr::t(), ExponentForm::int(n as i64).sub(alpha)),
            Expr::powi(Expr::gamma(ExponentForm::int(n as i64 + 1).sub(alpha)), -1),
        ]);
        for m in compositions(q, n) {
            let msum: u32 = m.iter().sum();
            if msum < 2 {
                continue;
            }
            let m0 = n - msum;
            let mut multi = factorial(n) / factorial(m0);
            for mi in &m {
                multi /= factorial(*mi);
            }
            for k in crate::model::multi_indices(q, msum) {
                if k.iter().zip(&m).any(|(ki, mi)| ki > mi) {
                    continue;
                }
                let ksum: u32 = k.iter().sum();
                if ksum < 2 {
                    continue;
                }
                let mut deriv = eta.clone();
                for (i, ki) in k.iter().enumerate() {
                    for _ in 0..*ki {
                        deriv = diff::partial_jet(&deriv, &JetVar::plain(i));
                    }
                }
                let deriv = diff::partial_n(&deriv, IndepVar::T, m0);
                if deriv.is_zero_literal() {
                    continue;
                }
                let mut factors = alloc::vec![pre.clone(), Expr::Num(multi.clone()), deriv];
                for i in 0..q {
                    let mut inner = Vec::new();
                    for r in 0..=k[i] {
                        let pw = k[i] - r;
                        if pw == 0 && m[i] > 0 {
                            continue;
                        }
                        let d = diff::total_n(&Expr::powi(Expr::u(i), pw as i64), IndepVar::T, m[i])?;
                        inner.push(Expr::Product(alloc::vec![
                            Expr::Num(binom(k[i], r) / factorial(k[i])),
                            Expr::powi(Expr::neg(Expr::u(i)), r as i64),
                            d,
                        ]));
                    }
                    factors.push(Expr::Sum(inner));
                }
                total.push(Expr::Product(factors));
            }
        }
    }
    Ok(simplify(&Expr::Sum(total)))
}
