//! Polynomial normal form.
//!
//! Every expression expands to a sum of monomials `c · Π base^e`. Bases are
//! atoms, opaque powers of sums, or nested powers whose exponent product is not
//! affine. Sums raised to a nonnegative integer are always expanded.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Pow, Zero};

use crate::expr::{ExponentForm, Expr, Q};

pub type Mono = BTreeMap<Expr, ExponentForm>;
pub type Poly = BTreeMap<Mono, Q>;

pub fn simplify(e: &Expr) -> Expr {
    to_expr(&expand(e))
}

pub fn constant(c: Q) -> Poly {
    let mut p = Poly::new();
    if !c.is_zero() {
        p.insert(Mono::new(), c);
    }
    p
}

fn atom(e: &Expr) -> Poly {
    let mut m = Mono::new();
    m.insert(e.clone(), ExponentForm::one());
    let mut p = Poly::new();
    p.insert(m, Q::one());
    p
}

pub fn expand(e: &Expr) -> Poly {
    match e {
        Expr::Num(c) => constant(c.clone()),
        Expr::Param(_) | Expr::Var(_) | Expr::Jet(_) | Expr::Gamma(_) | Expr::Fn(_) => atom(e),
        Expr::Sum(ts) => {
            let mut acc = Poly::new();
            for t in ts {
                add_into(&mut acc, &expand(t), &Q::one());
            }
            acc
        }
        Expr::Product(fs) => product(fs),
        Expr::Pow(b, ex) => pow_poly(&expand(b), ex),
    }
}

pub fn add_into(acc: &mut Poly, p: &Poly, k: &Q) {
    for (m, c) in p {
        let v = c * k;
        match acc.get_mut(m) {
            Some(x) => {
                *x += v;
                if x.is_zero() {
                    acc.remove(m);
                }
            }
            None => {
                if !v.is_zero() {
                    acc.insert(m.clone(), v);
                }
            }
        }
    }
}

pub fn add(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    add_into(&mut r, b, &Q::one());
    r
}

pub fn scale(a: &Poly, k: &Q) -> Poly {
    let mut r = Poly::new();
    add_into(&mut r, a, k);
    r
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut acc = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let mut m = ma.clone();
            for (base, e) in mb {
                let ne = match m.get(base) {
                    Some(x) => x.add(e),
                    None => e.clone(),
                };
                m.insert(base.clone(), ne);
            }
            let c = ca * cb;
            add_into(&mut acc, &fixup(m), &c);
        }
    }
    acc
}

/// Public entry to `fixup`.
pub fn mul_mono_fixup(m: Mono) -> Poly {
    fixup(m)
}

/// Drop unit factors, fold rational bases with integer exponents and expand
/// sums that ended up with a nonnegative integer exponent.
fn fixup(m: Mono) -> Poly {
    let mut clean = Mono::new();
    let mut pending: Vec<(Expr, i64)> = Vec::new();
    let mut coeff = Q::one();
    for (base, e) in m {
        if e.is_zero() {
            continue;
        }
        match (&base, e.as_integer()) {
            (Expr::Num(c), Some(k)) if !c.is_zero() || k > 0 => {
                coeff *= qpow(c, k);
            }
            (Expr::Sum(_), Some(k)) if k > 0 => pending.push((base, k)),
            _ => {
                clean.insert(base, e);
            }
        }
    }
    let mut p = Poly::new();
    if !coeff.is_zero() {
        p.insert(clean, coeff);
    }
    for (base, k) in pending {
        p = mul(&p, &int_pow(&expand(&base), k as u32));
    }
    p
}

fn qpow(c: &Q, k: i64) -> Q {
    if k >= 0 {
        Pow::pow(c, k as u32)
    } else {
        Pow::pow(c.recip(), (-k) as u32)
    }
}

fn int_pow(p: &Poly, k: u32) -> Poly {
    let mut r = constant(Q::one());
    for _ in 0..k {
        r = mul(&r, p);
    }
    r
}

fn single(base: Expr, e: ExponentForm) -> Poly {
    let mut m = Mono::new();
    m.insert(base, e);
    fixup(m)
}

/// Split a multi-term polynomial into (leading coefficient, monic part).
fn monic(p: &Poly) -> (Q, Poly) {
    let lead = p.values().next().cloned().unwrap_or_else(Q::one);
    (lead.clone(), scale(p, &lead.recip()))
}

pub fn pow_poly(p: &Poly, ex: &ExponentForm) -> Poly {
    if ex.is_zero() {
        return constant(Q::one());
    }
    if let Some(k) = ex.as_integer() {
        if k >= 0 {
            return int_pow(p, k as u32);
        }
    }
    if p.is_empty() {
        return single(Expr::zero(), ex.clone());
    }
    if p.len() >= 2 {
        return sum_pow(p, ex);
    }
    let (m, c) = p.iter().next().unwrap();
    let mut out = Mono::new();
    let mut coeff = Q::one();
    if !c.is_one() {
        match ex.as_integer() {
            Some(k) => coeff = qpow(c, k),
            None => {
                out.insert(Expr::Num(c.clone()), ex.clone());
            }
        }
    }
    let mut res = constant(coeff);
    for (base, e) in m {
        match e.mul(ex) {
            Some(ne) => {
                res = mul(&res, &single(base.clone(), ne));
            }
            None => {
                res = mul(&res, &single(Expr::pow(base.clone(), e.clone()), ex.clone()));
            }
        }
    }
    mul(&res, &fixup(out))
}

fn sum_pow(p: &Poly, ex: &ExponentForm) -> Poly {
    match ex.as_integer() {
        Some(k) => {
            let (lead, m) = monic(p);
            scale(&single(to_expr(&m), ex.clone()), &qpow(&lead, k))
        }
        None => single(to_expr(p), ex.clone()),
    }
}

fn product(fs: &[Expr]) -> Poly {
    let mut acc = constant(Q::one());
    let mut groups: BTreeMap<Expr, ExponentForm> = BTreeMap::new();
    for f in fs {
        let (base, ex) = match f {
            Expr::Pow(b, e) => (expand(b), e.clone()),
            other => (expand(other), ExponentForm::one()),
        };
        if base.len() >= 2 {
            if let Some(k) = ex.as_integer() {
                let (lead, m) = monic(&base);
                acc = scale(&acc, &qpow(&lead, k));
                let key = to_expr(&m);
                let e = groups.remove(&key).unwrap_or_default().add(&ex);
                groups.insert(key, e);
                continue;
            }
        }
        acc = mul(&acc, &pow_poly(&base, &ex));
        if acc.is_empty() {
            return acc;
        }
    }
    for (key, e) in groups {
        acc = mul(&acc, &single(key, e));
    }
    acc
}

pub fn mono_to_expr(m: &Mono, c: &Q) -> Expr {
    let mut fs = Vec::with_capacity(m.len() + 1);
    if !c.is_one() || m.is_empty() {
        fs.push(Expr::Num(c.clone()));
    }
    for (b, e) in m {
        if e.is_one() {
            fs.push(b.clone());
        } else {
            fs.push(Expr::pow(b.clone(), e.clone()));
        }
    }
    if fs.len() == 1 {
        fs.pop().unwrap()
    } else {
        Expr::Product(fs)
    }
}

pub fn to_expr(p: &Poly) -> Expr {
    let mut ts: Vec<Expr> = p.iter().map(|(m, c)| mono_to_expr(m, c)).collect();
    match ts.len() {
        0 => Expr::zero(),
        1 => ts.pop().unwrap(),
        _ => Expr::Sum(ts),
    }
}

/// Additive terms of the normal form.
pub fn terms(e: &Expr) -> Vec<Expr> {
    expand(e).iter().map(|(m, c)| mono_to_expr(m, c)).collect()
}

pub fn is_zero(e: &Expr) -> bool {
    expand(e).is_empty()
}
