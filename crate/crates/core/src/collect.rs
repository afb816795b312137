//! Coefficient extraction with respect to jet monomials.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;

use crate::error::{Error, Result};
use crate::expr::{Arg, ExponentForm, Expr, JetVar, Q};
use crate::simplify::{self, Mono, Poly};

pub type Monomial = BTreeMap<JetVar, ExponentForm>;

fn mentions_basis(e: &Expr, basis: &BTreeSet<JetVar>) -> bool {
    e.any(&|n| match n {
        Expr::Jet(j) => basis.contains(j),
        Expr::Fn(f) => f.args.iter().any(|a| match a {
            Arg::Dep(s) => basis.contains(&JetVar::plain(*s)),
            _ => false,
        }),
        _ => false,
    })
}

pub fn collect_monomials(e: &Expr, basis: &BTreeSet<JetVar>) -> Result<BTreeMap<Monomial, Expr>> {
    let mut acc: BTreeMap<Monomial, Poly> = BTreeMap::new();
    for (m, c) in simplify::expand(e) {
        let mut key = Monomial::new();
        let mut rest = Mono::new();
        for (b, ex) in m {
            match &b {
                Expr::Jet(j) if basis.contains(j) => {
                    key.insert(j.clone(), ex);
                }
                _ => {
                    if mentions_basis(&b, basis) {
                        return Err(Error::NonPolynomial(b.to_string()));
                    }
                    rest.insert(b, ex);
                }
            }
        }
        let entry = acc.entry(key).or_default();
        simplify::add_into(entry, &single(rest, c), &Q::from_integer(1.into()));
    }
    Ok(acc
        .into_iter()
        .filter(|(_, p)| !p.is_empty())
        .map(|(k, p)| (k, simplify::to_expr(&p)))
        .collect())
}

fn single(m: Mono, c: Q) -> Poly {
    let mut p = Poly::new();
    p.insert(m, c);
    p
}

pub fn monomial_expr(m: &Monomial) -> Expr {
    let mut fs = alloc::vec::Vec::new();
    for (j, e) in m {
        fs.push(Expr::pow(Expr::Jet(j.clone()), e.clone()));
    }
    simplify::simplify(&Expr::Product(fs))
}

/// Rebuild `Σ monomial · coefficient`.
pub fn reconstruct(parts: &BTreeMap<Monomial, Expr>) -> Expr {
    simplify::simplify(&Expr::Sum(
        parts.iter().map(|(m, c)| Expr::mul(monomial_expr(m), c.clone())).collect(),
    ))
}
