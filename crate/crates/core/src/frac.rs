//! Riemann–Liouville rules on power sums.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_traits::One;

use crate::assume::{Assumptions, Sign};
use crate::diff;
use crate::error::{Error, Result};
use crate::expr::{q, ExponentForm, Expr, FnApp, IndepVar, Q};
use crate::gamma::gamma_simplify;
use crate::simplify::{self, Mono, Poly};

pub const DEFAULT_SERIES_TERMS: u32 = 12;

/// `C(α, k)` by the recurrence `C(α,k) = C(α,k−1)(α−k+1)/k`.
pub fn gen_binomial(alpha: &Expr, k: i64) -> Result<Expr> {
    if k < 0 {
        return Err(Error::NegativeIndex(k));
    }
    let mut c = Expr::one();
    for j in 1..=k {
        c = Expr::Product(alloc::vec![
            c,
            Expr::sub(alpha.clone(), Expr::int(j - 1)),
            Expr::Num(Q::new(1.into(), j.into())),
        ]);
    }
    Ok(simplify::simplify(&c))
}

/// `Σ c_j t^{γ_j}` with t-free coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PowerSum {
    pub terms: BTreeMap<ExponentForm, Expr>,
}

impl PowerSum {
    pub fn monomial(c: Expr, g: ExponentForm) -> Self {
        let mut p = PowerSum::default();
        p.push(c, g);
        p
    }

    pub fn push(&mut self, c: Expr, g: ExponentForm) {
        let cur = self.terms.remove(&g).unwrap_or_else(Expr::zero);
        let v = simplify::simplify(&Expr::add(cur, c));
        if !v.is_zero_literal() {
            self.terms.insert(g, v);
        }
    }

    pub fn from_expr(e: &Expr) -> Result<Self> {
        let mut groups: BTreeMap<ExponentForm, Poly> = BTreeMap::new();
        for (m, c) in simplify::expand(e) {
            let mut rest = Mono::new();
            let mut g = ExponentForm::zero();
            for (b, ex) in m {
                if b == Expr::t() {
                    g = ex;
                } else if b.contains_var(IndepVar::T) {
                    return Err(Error::NotPowerSum(b.to_string()));
                } else {
                    rest.insert(b, ex);
                }
            }
            let mut one = Poly::new();
            one.insert(rest, c);
            simplify::add_into(groups.entry(g).or_default(), &one, &Q::one());
        }
        Ok(PowerSum {
            terms: groups
                .into_iter()
                .filter(|(_, p)| !p.is_empty())
                .map(|(g, p)| (g, simplify::to_expr(&p)))
                .collect(),
        })
    }

    pub fn to_expr(&self) -> Expr {
        simplify::simplify(&Expr::Sum(
            self.terms
                .iter()
                .map(|(g, c)| Expr::mul(c.clone(), Expr::pow(Expr::t(), g.clone())))
                .collect(),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Ordinary `∂_t^k`.
    pub fn dt(&self, k: u32) -> PowerSum {
        let mut out = PowerSum::default();
        for (g, c) in &self.terms {
            let mut coeff = c.clone();
            let mut e = g.clone();
            for _ in 0..k {
                coeff = Expr::mul(coeff, e.to_expr());
                e = e.add_const(&-Q::one());
            }
            out.push(simplify::simplify(&coeff), e);
        }
        out
    }
}

/// `∂_t^β t^γ` for `β = α − k`, `k ≥ 0`.
fn power_rule(
    g: &ExponentForm,
    alpha: &ExponentForm,
    k: u32,
    asm: &Assumptions,
) -> Result<Option<(Expr, ExponentForm)>> {
    let order = alpha.add_const(&-q(k as i64));
    if k == 0 {
        let d = g.sub(&alpha.add_const(&-Q::one()));
        match asm.sign(&d) {
            Sign::Zero => return Ok(None),
            Sign::Positive => {}
            Sign::Negative => return Err(Error::ExponentOutOfRange(g.clone())),
            _ => return Err(Error::UndecidableExponent(g.clone())),
        }
    } else {
        match asm.sign(&g.add_const(&Q::one())) {
            Sign::Positive => {}
            Sign::Negative | Sign::Zero => return Err(Error::ExponentOutOfRange(g.clone())),
            _ => return Err(Error::UndecidableExponent(g.clone())),
        }
    }
    let den = g.add_const(&Q::one()).sub(&order);
    if let Some(n) = den.as_integer() {
        if n <= 0 {
            return Ok(None);
        }
    }
    let c = Expr::div(Expr::gamma(g.add_const(&Q::one())), Expr::gamma(den));
    Ok(Some((gamma_simplify(&c), g.sub(&order))))
}

/// Termwise `c t^γ ↦ c Γ(γ+1)/Γ(γ+1−α) t^{γ−α}`; the `γ = α−1` term vanishes.
pub fn rl_derivative(f: &PowerSum, alpha: &ExponentForm, asm: &Assumptions) -> Result<PowerSum> {
    rl_order(f, alpha, 0, asm)
}

/// `∂_t^{α−k}`, a fractional integral when `k ≥ 1`.
pub fn rl_order(f: &PowerSum, alpha: &ExponentForm, k: u32, asm: &Assumptions) -> Result<PowerSum> {
    let mut out = PowerSum::default();
    for (g, c) in &f.terms {
        if let Some((r, e)) = power_rule(g, alpha, k, asm)? {
            out.push(gamma_simplify(&Expr::mul(c.clone(), r)), e);
        }
    }
    Ok(out)
}

/// `Σ_{k=0}^{K} C(α,k) ∂_t^k u · ∂_t^{α−k} v`.
pub fn leibniz_expand(
    u: &PowerSum,
    v: &PowerSum,
    alpha: &ExponentForm,
    kmax: u32,
    asm: &Assumptions,
) -> Result<Expr> {
    let a = alpha.to_expr();
    let mut terms = Vec::new();
    for k in 0..=kmax {
        let du = u.dt(k);
        if du.is_zero() {
            continue;
        }
        let dv = rl_order(v, alpha, k, asm)?;
        terms.push(Expr::Product(alloc::vec![
            gen_binomial(&a, k as i64)?,
            du.to_expr(),
            dv.to_expr(),
        ]));
    }
    Ok(gamma_simplify(&Expr::Sum(terms)))
}

/// `Σ_{k=0}^{K} C(α,k) t^{k−α}/Γ(k+1−α) · D_t^k e`.
pub fn rl_series_truncated(e: &Expr, alpha: &ExponentForm, kmax: u32) -> Result<Expr> {
    let a = alpha.to_expr();
    let mut terms = Vec::new();
    let mut d = e.clone();
    for k in 0..=kmax {
        if k > 0 {
            d = diff::total(&d, IndepVar::T)?;
        }
        if d.is_zero_literal() {
            break;
        }
        let kk = ExponentForm::int(k as i64);
        terms.push(Expr::Product(alloc::vec![
            gen_binomial(&a, k as i64)?,
            Expr::pow(Expr::t(), kk.sub(alpha)),
            Expr::powi(Expr::gamma(kk.sub(alpha).add_const(&Q::one())), -1),
            d.clone(),
        ]));
    }
    Ok(simplify::simplify(&Expr::Sum(terms)))
}

/// `∂_t^α e` where `e` is a power sum in t, possibly plus t-free multiples of
/// unknown functions of t, which become opaque fractional applications.
pub fn frac_dt(e: &Expr, alpha: &ExponentForm, asm: &Assumptions) -> Result<Expr> {
    let mut plain = Poly::new();
    let mut opaque = Vec::new();
    for (m, c) in simplify::expand(e) {
        let fns: Vec<&Expr> = m
            .keys()
            .filter(|b| matches!(b, Expr::Fn(f) if f.has_arg(crate::expr::Arg::Indep(IndepVar::T))))
            .collect();
        if fns.is_empty() {
            let mut p = Poly::new();
            p.insert(m, c);
            simplify::add_into(&mut plain, &p, &Q::one());
            continue;
        }
        let f = match fns.as_slice() {
            [Expr::Fn(f)] if m[fns[0]].is_one() && !f.frac && f.deriv[t_slot(f)] == 0 => f.clone(),
            _ => return Err(Error::NotPowerSum(simplify::mono_to_expr(&m, &c).to_string())),
        };
        let mut rest = m.clone();
        rest.remove(&Expr::Fn(f.clone()));
        let coeff = simplify::mono_to_expr(&rest, &c);
        if coeff.contains_var(IndepVar::T) {
            return Err(Error::NotPowerSum(coeff.to_string()));
        }
        let mut g = f;
        g.frac = true;
        opaque.push(Expr::mul(coeff, Expr::Fn(g)));
    }
    let ps = PowerSum::from_expr(&simplify::to_expr(&plain))?;
    let mut parts = opaque;
    parts.push(rl_derivative(&ps, alpha, asm)?.to_expr());
    Ok(simplify::simplify(&Expr::Sum(parts)))
}

fn t_slot(f: &FnApp) -> usize {
    f.args
        .iter()
        .position(|a| *a == crate::expr::Arg::Indep(IndepVar::T))
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{qr, Symbol};

    #[test]
    fn binomial_half() {
        assert_eq!(gen_binomial(&Expr::rat(1, 2), 2).unwrap(), Expr::Num(qr(-1, 8)));
        assert_eq!(gen_binomial(&Expr::param("a"), 0).unwrap(), Expr::one());
        assert!(gen_binomial(&Expr::param("a"), -1).is_err());
    }

    #[test]
    fn t_alpha_minus_one_vanishes() {
        let a = Symbol::new("a");
        let ea = ExponentForm::symbol(&a);
        let asm = Assumptions::with_alpha(&a);
        let f = PowerSum::monomial(Expr::one(), ea.add_const(&-Q::one()));
        assert!(rl_derivative(&f, &ea, &asm).unwrap().is_zero());
    }

    #[test]
    fn undecidable() {
        let a = Symbol::new("a");
        let ea = ExponentForm::symbol(&a);
        let asm = Assumptions::with_alpha(&a);
        let f = PowerSum::monomial(Expr::one(), ExponentForm::symbol(&Symbol::new("g")));
        assert!(matches!(rl_derivative(&f, &ea, &asm), Err(Error::UndecidableExponent(_))));
        // 1 − 2α has no definite sign on (0, 1)
        let f = PowerSum::monomial(Expr::one(), ea.neg());
        assert!(matches!(rl_derivative(&f, &ea, &asm), Err(Error::UndecidableExponent(_))));
        let f = PowerSum::monomial(Expr::one(), ExponentForm::int(-1));
        assert!(matches!(rl_derivative(&f, &ea, &asm), Err(Error::ExponentOutOfRange(_))));
    }
}
