//! Γ-function rewriting and exact zero testing.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::One;

use crate::expr::{q, ExponentForm, Expr, Q};
use crate::simplify::{self, Mono, Poly};

/// `(z)(z+1)…(z+m−1)`
pub fn pochhammer(z: &ExponentForm, m: u32) -> Expr {
    let fs: Vec<Expr> = (0..m).map(|r| z.add_const(&q(r as i64)).to_expr()).collect();
    simplify::simplify(&Expr::Product(fs))
}

fn int_diff(a: &ExponentForm, b: &ExponentForm) -> Option<i64> {
    a.sub(b).as_integer()
}

fn is_unit_gamma(z: &ExponentForm) -> bool {
    matches!(z.as_integer(), Some(1) | Some(2))
}

/// Pair Γ ratios whose arguments differ by an integer into Pochhammer products.
pub fn gamma_simplify(e: &Expr) -> Expr {
    let mut out = Poly::new();
    for (m, c) in simplify::expand(e) {
        simplify::add_into(&mut out, &simplify_term(m), &c);
    }
    simplify::to_expr(&out)
}

fn simplify_term(m: Mono) -> Poly {
    let mut rest = Mono::new();
    let mut gam: Vec<(ExponentForm, i64)> = Vec::new();
    for (b, ex) in m {
        match (&b, ex.as_integer()) {
            (Expr::Gamma(z), Some(_)) if is_unit_gamma(z) => {}
            (Expr::Gamma(z), Some(k)) => gam.push((z.clone(), k)),
            _ => {
                rest.insert(b, ex);
            }
        }
    }
    let mut factor = Expr::one();
    loop {
        let mut hit = None;
        'outer: for i in 0..gam.len() {
            if gam[i].1 <= 0 {
                continue;
            }
            for j in 0..gam.len() {
                if gam[j].1 >= 0 {
                    continue;
                }
                if let Some(d) = int_diff(&gam[i].0, &gam[j].0) {
                    hit = Some((i, j, d));
                    break 'outer;
                }
            }
        }
        let Some((i, j, d)) = hit else { break };
        let p = if d >= 0 {
            pochhammer(&gam[j].0, d as u32)
        } else {
            Expr::powi(pochhammer(&gam[i].0, (-d) as u32), -1)
        };
        factor = Expr::mul(factor, p);
        gam[i].1 -= 1;
        gam[j].1 += 1;
    }
    for (z, k) in gam {
        if k != 0 {
            rest.insert(Expr::Gamma(z), ExponentForm::int(k));
        }
    }
    let mut base = Poly::new();
    base.insert(rest, Q::one());
    simplify::mul(&base, &simplify::expand(&factor))
}

fn factorial(n: i64) -> Q {
    (1..=n).fold(Q::one(), |a, k| a * q(k))
}

/// Rewrite every Γ in terms of one representative per integer-shift class and
/// evaluate Γ at positive integers.
pub fn gamma_normalize(e: &Expr) -> Expr {
    let mut args: Vec<ExponentForm> = Vec::new();
    e.visit(&mut |n| {
        if let Expr::Gamma(z) = n {
            if !args.contains(z) {
                args.push(z.clone());
            }
        }
    });
    let mut rep: Vec<ExponentForm> = Vec::new();
    for z in &args {
        match rep.iter_mut().find(|r| int_diff(r, z).is_some()) {
            Some(r) => {
                if int_diff(z, r).unwrap() > 0 {
                    *r = z.clone();
                }
            }
            None => rep.push(z.clone()),
        }
    }
    let mut table: BTreeMap<ExponentForm, Expr> = BTreeMap::new();
    for z in &args {
        if let Some(n) = z.as_integer() {
            if n >= 1 {
                table.insert(z.clone(), Expr::Num(factorial(n - 1)));
                continue;
            }
        }
        let r = rep.iter().find(|r| int_diff(r, z).is_some()).unwrap();
        let m = int_diff(r, z).unwrap();
        if m == 0 {
            continue;
        }
        table.insert(
            z.clone(),
            Expr::mul(Expr::Gamma(r.clone()), Expr::powi(pochhammer(z, m as u32), -1)),
        );
    }
    if table.is_empty() {
        return simplify::simplify(e);
    }
    crate::subst::map_atoms(e, &|a| match a {
        Expr::Gamma(z) => table.get(z).cloned(),
        _ => None,
    })
}

/// Multiply each term by the common power of every opaque sum with a negative
/// integer exponent, so that rational identities become polynomial ones.
pub fn clear_denominators(p: &Poly) -> Poly {
    let mut need: BTreeMap<Expr, i64> = BTreeMap::new();
    for m in p.keys() {
        for (b, ex) in m {
            if let (Expr::Sum(_), Some(k)) = (b, ex.as_integer()) {
                if k < 0 {
                    let e = need.entry(b.clone()).or_insert(0);
                    *e = (*e).max(-k);
                }
            }
        }
    }
    if need.is_empty() {
        return p.clone();
    }
    let mut out = Poly::new();
    for (m, c) in p {
        let mut m2 = m.clone();
        for (b, k) in &need {
            let cur = m2.get(b).cloned().unwrap_or_default();
            m2.insert(b.clone(), cur.add_const(&q(*k)));
        }
        let mut single = Poly::new();
        single.insert(Mono::new(), c.clone());
        let term = simplify::mul(&single, &simplify::mul_mono_fixup(m2));
        simplify::add_into(&mut out, &term, &Q::one());
    }
    out
}

/// Exact zero test modulo Γ recurrences and rational-function identities.
pub fn is_zero(e: &Expr) -> bool {
    let p = simplify::expand(e);
    if p.is_empty() {
        return true;
    }
    let n = simplify::expand(&gamma_normalize(&simplify::to_expr(&p)));
    if n.is_empty() {
        return true;
    }
    let mut cur = n;
    for _ in 0..4 {
        let next = clear_denominators(&cur);
        if next.is_empty() {
            return true;
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    false
}

pub fn equivalent(a: &Expr, b: &Expr) -> bool {
    is_zero(&Expr::sub(a.clone(), b.clone()))
}
