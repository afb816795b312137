//! Simultaneous substitution.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::diff;
use crate::error::{Error, Result};
use crate::expr::{Arg, ExponentForm, Expr, IndepVar, JetVar, Symbol};
use crate::simplify::simplify;

/// Definition of a named function: formal parameter symbols and a body.
#[derive(Clone, Debug, PartialEq)]
pub struct FnDef {
    pub formals: Vec<Symbol>,
    pub body: Expr,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bindings {
    pub params: BTreeMap<Symbol, Expr>,
    pub vars: BTreeMap<IndepVar, Expr>,
    pub jets: BTreeMap<JetVar, Expr>,
    pub fns: BTreeMap<Symbol, FnDef>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Param(Symbol),
    Var(IndepVar),
    Jet(JetVar),
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn param(mut self, s: &str, v: Expr) -> Self {
        self.params.insert(Symbol::new(s), v);
        self
    }
    pub fn var(mut self, v: IndepVar, e: Expr) -> Self {
        self.vars.insert(v, e);
        self
    }
    pub fn jet(mut self, j: JetVar, e: Expr) -> Self {
        self.jets.insert(j, e);
        self
    }
    pub fn func(mut self, name: &str, formals: &[&str], body: Expr) -> Self {
        self.fns.insert(
            Symbol::new(name),
            FnDef { formals: formals.iter().map(|s| Symbol::new(s)).collect(), body },
        );
        self
    }
    pub fn is_empty(&self) -> bool {
        self.params.is_empty() && self.vars.is_empty() && self.jets.is_empty() && self.fns.is_empty()
    }

    fn mentioned(&self, e: &Expr) -> BTreeSet<Key> {
        let mut out = BTreeSet::new();
        for s in e.symbols() {
            out.insert(Key::Param(s));
        }
        e.visit(&mut |n| match n {
            Expr::Var(v) => {
                out.insert(Key::Var(*v));
            }
            Expr::Jet(j) => {
                out.insert(Key::Jet(j.clone()));
            }
            Expr::Fn(f) => {
                for a in &f.args {
                    match a {
                        Arg::Indep(v) => out.insert(Key::Var(*v)),
                        Arg::Dep(s) => out.insert(Key::Jet(JetVar::plain(*s))),
                    };
                }
            }
            _ => {}
        });
        out
    }

    fn value(&self, k: &Key) -> Option<&Expr> {
        match k {
            Key::Param(s) => self.params.get(s),
            Key::Var(v) => self.vars.get(v),
            Key::Jet(j) => self.jets.get(j),
        }
    }

    fn check_acyclic(&self) -> Result<()> {
        let keys: Vec<Key> = self
            .params
            .keys()
            .map(|s| Key::Param(s.clone()))
            .chain(self.vars.keys().map(|v| Key::Var(*v)))
            .chain(self.jets.keys().map(|j| Key::Jet(j.clone())))
            .collect();
        let edges: BTreeMap<Key, BTreeSet<Key>> = keys
            .iter()
            .map(|k| {
                let m = self.mentioned(self.value(k).unwrap());
                (k.clone(), m.into_iter().filter(|x| self.value(x).is_some()).collect())
            })
            .collect();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: BTreeMap<Key, u8> = BTreeMap::new();
        fn dfs(
            k: &Key,
            edges: &BTreeMap<Key, BTreeSet<Key>>,
            state: &mut BTreeMap<Key, u8>,
        ) -> Option<Key> {
            state.insert(k.clone(), 1);
            for n in &edges[k] {
                match state.get(n).copied().unwrap_or(0) {
                    1 => return Some(n.clone()),
                    0 => {
                        if let Some(c) = dfs(n, edges, state) {
                            return Some(c);
                        }
                    }
                    _ => {}
                }
            }
            state.insert(k.clone(), 2);
            None
        }
        for k in &keys {
            if state.get(k).copied().unwrap_or(0) == 0 {
                if let Some(c) = dfs(k, &edges, &mut state) {
                    let name = match c {
                        Key::Param(s) => s.to_string(),
                        Key::Var(v) => format!("{:?}", v),
                        Key::Jet(j) => format!("{:?}", j),
                    };
                    return Err(Error::CyclicBinding(name));
                }
            }
        }
        Ok(())
    }

    fn exponent(&self, e: &ExponentForm) -> Result<ExponentForm> {
        let mut vals = BTreeMap::new();
        for s in e.terms().keys() {
            if let Some(v) = self.params.get(s) {
                let x = v.as_exponent().ok_or_else(|| Error::NonAffineExponent(v.to_string()))?;
                vals.insert(s.clone(), x);
            }
        }
        Ok(e.substitute(&|s| vals.get(s).cloned()))
    }

    fn apply(&self, e: &Expr) -> Result<Expr> {
        Ok(match e {
            Expr::Num(_) => e.clone(),
            Expr::Param(s) => self.params.get(s).cloned().unwrap_or_else(|| e.clone()),
            Expr::Var(v) => self.vars.get(v).cloned().unwrap_or_else(|| e.clone()),
            Expr::Jet(j) => self.jets.get(j).cloned().unwrap_or_else(|| e.clone()),
            Expr::Gamma(z) => Expr::Gamma(self.exponent(z)?),
            Expr::Fn(f) => match self.fns.get(&f.name) {
                Some(def) => {
                    if f.frac {
                        return Err(Error::Invalid(format!(
                            "cannot instantiate fractional application of {}",
                            f.name
                        )));
                    }
                    let mut body = def.body.clone();
                    for (slot, d) in f.deriv.iter().enumerate() {
                        for _ in 0..*d {
                            body = diff::partial_param(&body, &def.formals[slot])?;
                        }
                    }
                    let mut inner = Bindings::new();
                    for (slot, a) in f.args.iter().enumerate() {
                        let actual = match a {
                            Arg::Indep(v) => Expr::Var(*v),
                            Arg::Dep(s) => Expr::u(*s),
                        };
                        inner.params.insert(def.formals[slot].clone(), actual);
                    }
                    self.apply(&inner.apply(&body)?)?
                }
                None => {
                    for a in &f.args {
                        let bound = match a {
                            Arg::Indep(v) => self.vars.contains_key(v),
                            Arg::Dep(s) => self.jets.contains_key(&JetVar::plain(*s)),
                        };
                        if bound {
                            return Err(Error::Invalid(format!(
                                "argument of opaque function {} is bound",
                                f.name
                            )));
                        }
                    }
                    e.clone()
                }
            },
            Expr::Sum(ts) => Expr::Sum(ts.iter().map(|t| self.apply(t)).collect::<Result<_>>()?),
            Expr::Product(fs) => {
                Expr::Product(fs.iter().map(|t| self.apply(t)).collect::<Result<_>>()?)
            }
            Expr::Pow(b, ex) => {
                let ex2 = self.exponent(ex)?;
                Expr::pow(self.apply(b)?, ex2)
            }
        })
    }
}

pub fn substitute(e: &Expr, b: &Bindings) -> Result<Expr> {
    b.check_acyclic()?;
    Ok(simplify(&b.apply(e)?))
}

/// Replace atoms for which `f` returns a value. No cycle checks, no exponent rewriting.
pub fn map_atoms(e: &Expr, f: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
    fn go(e: &Expr, f: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
        match e {
            Expr::Sum(ts) => Expr::Sum(ts.iter().map(|t| go(t, f)).collect()),
            Expr::Product(fs) => Expr::Product(fs.iter().map(|t| go(t, f)).collect()),
            Expr::Pow(b, ex) => match f(e) {
                Some(v) => v,
                None => Expr::pow(go(b, f), ex.clone()),
            },
            _ => f(e).unwrap_or_else(|| e.clone()),
        }
    }
    simplify(&go(e, f))
}
