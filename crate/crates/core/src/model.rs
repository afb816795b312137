//! PDE systems `∂_t^α u_s = F_s + H_s` and the term classification.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::assume::{Assumption, Assumptions};
use crate::expr::{Arg, ExponentForm, Expr, IndepVar, JetVar, Symbol, Q};
use crate::print::{Printer, Style};
use crate::simplify::{self, simplify};

#[derive(Clone, Debug, PartialEq)]
pub struct ParamDecl {
    pub name: Symbol,
    pub assumption: Option<Assumption>,
}

/// A functional parameter such as `P(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FnDecl {
    pub name: Symbol,
    pub arg: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub f: Expr,
    pub h: Expr,
}

impl Equation {
    pub fn split(rhs: &Expr) -> Equation {
        let mut f = Vec::new();
        let mut h = Vec::new();
        for t in simplify::terms(rhs) {
            if t.contains_jet() {
                f.push(t);
            } else {
                h.push(t);
            }
        }
        Equation { f: simplify(&Expr::Sum(f)), h: simplify(&Expr::Sum(h)) }
    }
    pub fn rhs(&self) -> Expr {
        simplify(&Expr::add(self.f.clone(), self.h.clone()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PDESystem {
    pub space: Vec<String>,
    pub deps: Vec<String>,
    /// Symbol name for α, or the printed rational.
    pub alpha_name: String,
    pub alpha: ExponentForm,
    pub params: Vec<ParamDecl>,
    pub functions: Vec<FnDecl>,
    pub equations: Vec<Equation>,
}

impl PDESystem {
    pub fn new(
        space: Vec<String>,
        deps: Vec<String>,
        alpha: ExponentForm,
        alpha_name: &str,
        params: Vec<ParamDecl>,
        functions: Vec<FnDecl>,
        rhs: &[Expr],
    ) -> Self {
        PDESystem {
            space,
            deps,
            alpha_name: alpha_name.into(),
            alpha,
            params,
            functions,
            equations: rhs.iter().map(Equation::split).collect(),
        }
    }

    pub fn p(&self) -> usize {
        self.space.len()
    }
    pub fn q(&self) -> usize {
        self.deps.len()
    }
    pub fn alpha_expr(&self) -> Expr {
        self.alpha.to_expr()
    }
    pub fn alpha_symbol(&self) -> Option<Symbol> {
        if self.alpha.is_constant() {
            None
        } else {
            self.alpha.terms().keys().next().cloned()
        }
    }

    /// Largest space-derivative order on any right-hand side.
    pub fn order(&self) -> u32 {
        self.equations
            .iter()
            .flat_map(|e| e.f.jets().into_iter().chain(e.h.jets()))
            .map(|j| j.order())
            .max()
            .unwrap_or(0)
    }

    pub fn assumptions(&self) -> Assumptions {
        let mut a = match self.alpha_symbol() {
            Some(s) => Assumptions::with_alpha(&s),
            None => Assumptions::new(),
        };
        for p in &self.params {
            if let Some(x) = &p.assumption {
                a.insert(&p.name, x.clone());
            }
        }
        a
    }

    pub fn printer(&self, style: Style) -> Printer {
        Printer::new(&self.space, &self.deps, &self.alpha_name, style)
    }

    pub fn space_index(&self, name: &str) -> Option<usize> {
        self.space.iter().position(|s| s == name)
    }
    pub fn dep_index(&self, name: &str) -> Option<usize> {
        self.deps.iter().position(|s| s == name)
    }

    /// Jet coordinates that can occur up to the system order, as a basis for
    /// coefficient extraction.
    pub fn jet_basis(&self, extra_order: u32) -> BTreeSet<JetVar> {
        let k = self.order() + extra_order;
        let mut out = BTreeSet::new();
        for s in 0..self.q() {
            for theta in multi_indices(self.p(), k) {
                out.insert(JetVar::new(s, &theta, 0, None));
            }
        }
        out
    }
}

/// All multi-indices of length `p` with `|θ| ≤ k`.
pub fn multi_indices(p: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = alloc::vec![0u32; p];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, k, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearTerm {
    pub jet: JetVar,
    pub coeff: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TermClass {
    pub all: Vec<Expr>,
    pub linear: Vec<LinearTerm>,
    pub nonlinear: Vec<Expr>,
}

impl TermClass {
    pub fn linear_exprs(&self) -> Vec<Expr> {
        self.linear
            .iter()
            .map(|l| simplify(&Expr::mul(l.coeff.clone(), Expr::Jet(l.jet.clone()))))
            .collect()
    }
    pub fn linear_part(&self) -> Expr {
        simplify(&Expr::Sum(self.linear_exprs()))
    }
    pub fn nonlinear_part(&self) -> Expr {
        simplify(&Expr::Sum(self.nonlinear.clone()))
    }
}

/// Split each `F_s` into terms linear in a single jet coordinate and the rest.
pub fn classify_terms(sys: &PDESystem) -> Vec<TermClass> {
    sys.equations
        .iter()
        .map(|eq| {
            let mut tc = TermClass { all: Vec::new(), linear: Vec::new(), nonlinear: Vec::new() };
            for (m, c) in simplify::expand(&eq.f) {
                let term = simplify::mono_to_expr(&m, &c);
                tc.all.push(term.clone());
                let jets: Vec<_> = m.iter().filter(|(b, _)| b.contains_jet()).collect();
                match jets.as_slice() {
                    [(Expr::Jet(j), e)] if e.is_one() => {
                        let mut rest = m.clone();
                        rest.remove(&Expr::Jet(j.clone()));
                        tc.linear.push(LinearTerm {
                            jet: j.clone(),
                            coeff: simplify::mono_to_expr(&rest, &c),
                        });
                    }
                    _ => tc.nonlinear.push(term),
                }
            }
            tc
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    EquationCount { deps: usize, equations: usize },
    JetFreeTermInF(usize),
    JetInH(usize),
    TimeDerivativeOnRHS(usize),
    FractionalOnRHS(usize),
    UnknownDependent(usize),
    UnknownSpaceVariable(usize),
    MissingSpaceCoupling(String),
    AlphaOutOfRange,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EquationCount { deps, equations } => {
                write!(f, "EquationCount: {} dependents but {} equations", deps, equations)
            }
            Diagnostic::JetFreeTermInF(s) => write!(f, "JetFreeTermInF: equation {}", s + 1),
            Diagnostic::JetInH(s) => write!(f, "JetInH: equation {}", s + 1),
            Diagnostic::TimeDerivativeOnRHS(s) => {
                write!(f, "TimeDerivativeOnRHS: equation {}", s + 1)
            }
            Diagnostic::FractionalOnRHS(s) => write!(f, "FractionalOnRHS: equation {}", s + 1),
            Diagnostic::UnknownDependent(s) => write!(f, "UnknownDependent: index {}", s),
            Diagnostic::UnknownSpaceVariable(i) => write!(f, "UnknownSpaceVariable: index {}", i),
            Diagnostic::MissingSpaceCoupling(x) => write!(f, "MissingSpaceCoupling({})", x),
            Diagnostic::AlphaOutOfRange => write!(f, "AlphaOutOfRange"),
        }
    }
}

pub fn validate_system(sys: &PDESystem) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if sys.equations.len() != sys.q() {
        out.push(Diagnostic::EquationCount { deps: sys.q(), equations: sys.equations.len() });
    }
    if let Some(c) = sys.alpha.as_constant() {
        if !c.is_positive() || *c >= Q::one() {
            out.push(Diagnostic::AlphaOutOfRange);
        }
    } else if sys.alpha.terms().len() != 1 || !sys.alpha.constant_part().is_zero() {
        out.push(Diagnostic::AlphaOutOfRange);
    }
    let mut coupled = alloc::vec![false; sys.p()];
    for (s, eq) in sys.equations.iter().enumerate() {
        for t in simplify::terms(&eq.f) {
            if !t.contains_jet() {
                out.push(Diagnostic::JetFreeTermInF(s));
            }
        }
        if eq.h.contains_jet() {
            out.push(Diagnostic::JetInH(s));
        }
        let rhs = eq.rhs();
        let jets = rhs.jets();
        if jets.iter().any(|j| j.t_order > 0) {
            out.push(Diagnostic::TimeDerivativeOnRHS(s));
        }
        if jets.iter().any(|j| j.is_fractional()) || rhs.fns().iter().any(|f| f.frac) {
            out.push(Diagnostic::FractionalOnRHS(s));
        }
        for j in &jets {
            if j.dep >= sys.q() {
                out.push(Diagnostic::UnknownDependent(j.dep));
            }
            if j.space().len() > sys.p() {
                out.push(Diagnostic::UnknownSpaceVariable(j.space().len() - 1));
            }
            for (i, c) in coupled.iter_mut().enumerate() {
                if j.space_at(i) > 0 {
                    *c = true;
                }
            }
        }
        for f in rhs.fns() {
            for a in &f.args {
                match a {
                    Arg::Dep(d) if *d >= sys.q() => out.push(Diagnostic::UnknownDependent(*d)),
                    Arg::Indep(IndepVar::X(i)) if *i >= sys.p() => {
                        out.push(Diagnostic::UnknownSpaceVariable(*i))
                    }
                    _ => {}
                }
            }
        }
    }
    for (i, c) in coupled.iter().enumerate() {
        if !c {
            out.push(Diagnostic::MissingSpaceCoupling(
                sys.space.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1)),
            ));
        }
    }
    out
}
