//! Partial and total derivatives on the jet space.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{Arg, Expr, IndepVar, JetVar, Symbol};
use crate::simplify::simplify;

type AtomRule<'a> = &'a dyn Fn(&Expr) -> Result<Option<Expr>>;

fn raw(e: &Expr, rule: AtomRule, sym: Option<&Symbol>) -> Result<Expr> {
    Ok(match e {
        Expr::Num(_) => Expr::zero(),
        Expr::Sum(ts) => Expr::Sum(ts.iter().map(|t| raw(t, rule, sym)).collect::<Result<_>>()?),
        Expr::Product(fs) => {
            let mut terms = Vec::new();
            for i in 0..fs.len() {
                let d = raw(&fs[i], rule, sym)?;
                if d.is_zero_literal() {
                    continue;
                }
                let mut p = fs.clone();
                p[i] = d;
                terms.push(Expr::Product(p));
            }
            Expr::Sum(terms)
        }
        Expr::Pow(b, ex) => {
            if let Some(s) = sym {
                if ex.mentions(s) {
                    return Err(Error::NonAffineExponent(alloc::format!(
                        "derivative of a power with exponent {} in {}",
                        ex,
                        s
                    )));
                }
            }
            let db = raw(b, rule, sym)?;
            if db.is_zero_literal() {
                Expr::zero()
            } else {
                Expr::Product(alloc::vec![
                    ex.to_expr(),
                    Expr::pow((**b).clone(), ex.add_const(&-crate::expr::q(1))),
                    db,
                ])
            }
        }
        Expr::Gamma(z) => {
            if let Some(s) = sym {
                if z.mentions(s) {
                    return Err(Error::Invalid(alloc::format!(
                        "derivative of Gamma({}) in {}",
                        z,
                        s
                    )));
                }
            }
            Expr::zero()
        }
        _ => rule(e)?.unwrap_or_else(Expr::zero),
    })
}

/// `∂e/∂v` with jet coordinates held fixed.
pub fn partial(e: &Expr, v: IndepVar) -> Expr {
    let rule = |a: &Expr| -> Result<Option<Expr>> {
        Ok(match a {
            Expr::Var(w) if *w == v => Some(Expr::one()),
            Expr::Fn(f) => {
                assert!(!(f.frac && v == IndepVar::T), "t-derivative of a fractional application");
                f.args
                    .iter()
                    .position(|x| *x == Arg::Indep(v))
                    .map(|slot| Expr::Fn(f.differentiated(slot)))
            }
            _ => None,
        })
    };
    simplify(&raw(e, &rule, None).expect("partial derivative is total"))
}

/// `∂e/∂j` treating `j` as an independent coordinate.
pub fn partial_jet(e: &Expr, j: &JetVar) -> Expr {
    let rule = |a: &Expr| -> Result<Option<Expr>> {
        Ok(match a {
            Expr::Jet(k) if k == j => Some(Expr::one()),
            Expr::Fn(f) if j.is_plain() => f
                .args
                .iter()
                .position(|x| *x == Arg::Dep(j.dep))
                .map(|slot| Expr::Fn(f.differentiated(slot))),
            _ => None,
        })
    };
    simplify(&raw(e, &rule, None).expect("jet derivative is total"))
}

/// Derivative with respect to a parameter symbol that must not occur in exponents.
pub fn partial_param(e: &Expr, s: &Symbol) -> Result<Expr> {
    let rule = |a: &Expr| -> Result<Option<Expr>> {
        Ok(match a {
            Expr::Param(p) if p == s => Some(Expr::one()),
            _ => None,
        })
    };
    Ok(simplify(&raw(e, &rule, Some(s))?))
}

/// Total derivative `D_v e`.
pub fn total(e: &Expr, v: IndepVar) -> Result<Expr> {
    let rule = |a: &Expr| -> Result<Option<Expr>> {
        Ok(match a {
            Expr::Var(w) if *w == v => Some(Expr::one()),
            Expr::Var(_) => None,
            Expr::Jet(j) => {
                if j.is_fractional() && v == IndepVar::T {
                    return Err(Error::FractionalChain(j.clone()));
                }
                Some(Expr::Jet(j.bump(v)))
            }
            Expr::Fn(f) => {
                if f.frac && v == IndepVar::T {
                    return Err(Error::Invalid(alloc::format!(
                        "t-derivative of fractional application {}",
                        f.name
                    )));
                }
                let mut terms = Vec::new();
                for (slot, arg) in f.args.iter().enumerate() {
                    match arg {
                        Arg::Indep(w) if *w == v => terms.push(Expr::Fn(f.differentiated(slot))),
                        Arg::Indep(_) => {}
                        Arg::Dep(s) => terms.push(Expr::mul(
                            Expr::Fn(f.differentiated(slot)),
                            Expr::Jet(JetVar::plain(*s).bump(v)),
                        )),
                    }
                }
                Some(Expr::Sum(terms))
            }
            _ => None,
        })
    };
    Ok(simplify(&raw(e, &rule, None)?))
}

/// `D_θ e` for a space multi-index, applied slot by slot.
pub fn total_multi(e: &Expr, theta: &[u32]) -> Result<Expr> {
    let mut r = e.clone();
    for (i, k) in theta.iter().enumerate() {
        for _ in 0..*k {
            r = total(&r, IndepVar::X(i))?;
        }
    }
    Ok(r)
}

pub fn total_n(e: &Expr, v: IndepVar, n: u32) -> Result<Expr> {
    let mut r = e.clone();
    for _ in 0..n {
        r = total(&r, v)?;
    }
    Ok(r)
}

pub fn partial_n(e: &Expr, v: IndepVar, n: u32) -> Expr {
    let mut r = e.clone();
    for _ in 0..n {
        r = partial(&r, v);
    }
    r
}
