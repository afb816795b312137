//! Exact linear algebra over rational functions in the symbolic atoms
//! (parameters, α, Γ values).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::assume::Assumptions;
use crate::expr::{ExponentForm, Expr, Q};
use crate::gamma::gamma_normalize;
use crate::simplify::{self, Mono, Poly};

fn degree(m: &Mono) -> Q {
    m.values().fold(Q::zero(), |a, e| a + e.as_constant().cloned().unwrap_or_else(Q::one))
}

/// Graded lexicographic order.
fn grlex(a: &Mono, b: &Mono) -> Ordering {
    degree(a).cmp(&degree(b)).then_with(|| {
        let mut keys: Vec<&Expr> = a.keys().chain(b.keys()).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            let ea = a.get(k).and_then(|e| e.as_constant().cloned()).unwrap_or_else(Q::zero);
            let eb = b.get(k).and_then(|e| e.as_constant().cloned()).unwrap_or_else(Q::zero);
            match ea.cmp(&eb) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    })
}

fn lead(p: &Poly) -> Option<(&Mono, &Q)> {
    p.iter().max_by(|x, y| grlex(x.0, y.0))
}

fn mono_div(a: &Mono, b: &Mono) -> Option<Mono> {
    let mut out = a.clone();
    for (k, e) in b {
        let cur = out.get(k).cloned().unwrap_or_default();
        let r = cur.sub(e);
        match r.as_constant() {
            Some(c) if c.is_negative() => return None,
            Some(c) if c.is_zero() => {
                out.remove(k);
            }
            Some(_) => {
                out.insert(k.clone(), r);
            }
            None => return None,
        }
    }
    Some(out)
}

/// Exact quotient `n / d`, if `d` divides `n`.
pub fn poly_div(n: &Poly, d: &Poly) -> Option<Poly> {
    let (ld, cd) = lead(d)?;
    let mut rem = n.clone();
    let mut quo = Poly::new();
    let mut guard = 0;
    while let Some((ln, cn)) = lead(&rem) {
        guard += 1;
        if guard > 10_000 {
            return None;
        }
        let m = mono_div(ln, ld)?;
        let c = cn / cd;
        let mut t = Poly::new();
        t.insert(m, c);
        simplify::add_into(&mut quo, &t, &Q::one());
        let sub = simplify::mul(&t, d);
        simplify::add_into(&mut rem, &sub, &-Q::one());
    }
    Some(quo)
}

/// `num / Π den_i^k_i` with monic denominator factors.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc {
    pub num: Poly,
    pub den: BTreeMap<Poly, u32>,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::new(), den: BTreeMap::new() }
    }
    pub fn one() -> Self {
        Self::constant(Q::one())
    }
    pub fn constant(c: Q) -> Self {
        RatFunc { num: simplify::constant(c), den: BTreeMap::new() }
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
    pub fn as_constant(&self) -> Option<Q> {
        if self.num.is_empty() {
            return Some(Q::zero());
        }
        if !self.den.is_empty() || self.num.len() != 1 {
            return None;
        }
        let (m, c) = self.num.iter().next().unwrap();
        m.is_empty().then(|| c.clone())
    }
    pub fn size(&self) -> usize {
        self.num.len() + self.den.keys().map(|p| p.len()).sum::<usize>()
    }

    pub fn from_expr(e: &Expr) -> Self {
        let p = simplify::expand(&gamma_normalize(e));
        let mut acc = RatFunc::zero();
        for (m, c) in p {
            let mut num = simplify::constant(c);
            let mut den: BTreeMap<Poly, u32> = BTreeMap::new();
            for (b, ex) in m {
                match ex.as_integer() {
                    Some(k) if k < 0 => {
                        let f = simplify::expand(&b);
                        let (f, lc) = monic(&f);
                        num = simplify::scale(&num, &pow_q(&lc, k));
                        *den.entry(f).or_insert(0) += (-k) as u32;
                    }
                    Some(k) => {
                        let mut one = Mono::new();
                        one.insert(b, ExponentForm::int(k));
                        num = simplify::mul(&num, &simplify::mul_mono_fixup(one));
                    }
                    None => {
                        let mut one = Mono::new();
                        one.insert(Expr::pow(b, ex), ExponentForm::one());
                        num = simplify::mul(&num, &simplify::mul_mono_fixup(one));
                    }
                }
            }
            acc = acc.add(&RatFunc { num, den });
        }
        acc
    }

    pub fn to_expr(&self) -> Expr {
        let mut fs = alloc::vec![simplify::to_expr(&self.num)];
        for (f, k) in &self.den {
            fs.push(Expr::powi(simplify::to_expr(f), -(*k as i64)));
        }
        simplify::simplify(&Expr::Product(fs))
    }

    fn reduce(mut self) -> Self {
        if self.num.is_empty() {
            self.den.clear();
            return self;
        }
        let keys: Vec<Poly> = self.den.keys().cloned().collect();
        for f in keys {
            while let Some(k) = self.den.get(&f).copied() {
                if k == 0 {
                    self.den.remove(&f);
                    break;
                }
                match poly_div(&self.num, &f) {
                    Some(q) => {
                        self.num = q;
                        if k == 1 {
                            self.den.remove(&f);
                        } else {
                            self.den.insert(f.clone(), k - 1);
                        }
                    }
                    None => break,
                }
            }
        }
        self
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        let mut den = self.den.clone();
        for (f, k) in &o.den {
            let e = den.entry(f.clone()).or_insert(0);
            *e = (*e).max(*k);
        }
        let lift = |r: &RatFunc| {
            let mut n = r.num.clone();
            for (f, k) in &den {
                let have = r.den.get(f).copied().unwrap_or(0);
                for _ in have..*k {
                    n = simplify::mul(&n, f);
                }
            }
            n
        };
        let num = simplify::add(&lift(self), &lift(o));
        RatFunc { num, den }.reduce()
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: simplify::scale(&self.num, &-Q::one()), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        let mut den = self.den.clone();
        for (f, k) in &o.den {
            *den.entry(f.clone()).or_insert(0) += k;
        }
        RatFunc { num: simplify::mul(&self.num, &o.num), den }.reduce()
    }

    /// Inverse. The numerator becomes a denominator factor after being made
    /// monic; callers must ensure it is nonzero.
    pub fn inv(&self) -> RatFunc {
        assert!(!self.is_zero(), "division by zero");
        let (f, lc) = monic(&self.num);
        let mut num = simplify::constant(lc.recip());
        for (g, k) in &self.den {
            for _ in 0..*k {
                num = simplify::mul(&num, g);
            }
        }
        let mut den = BTreeMap::new();
        if !(f.len() == 1 && f.keys().next().unwrap().is_empty()) {
            den.insert(f, 1);
        }
        RatFunc { num, den }.reduce()
    }

    pub fn div(&self, o: &RatFunc) -> RatFunc {
        self.mul(&o.inv())
    }
}

fn pow_q(c: &Q, k: i64) -> Q {
    let mut r = Q::one();
    for _ in 0..k.unsigned_abs() {
        r *= c;
    }
    if k < 0 {
        r.recip()
    } else {
        r
    }
}

/// Scale so that the leading coefficient is 1. Returns the polynomial and the
/// removed coefficient.
fn monic(p: &Poly) -> (Poly, Q) {
    match lead(p) {
        Some((_, c)) => {
            let c = c.clone();
            (simplify::scale(p, &c.recip()), c)
        }
        None => (p.clone(), Q::one()),
    }
}

/// Row reduction result.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<Vec<RatFunc>>,
    pub pivots: Vec<usize>,
    /// Nonconstant pivots assumed nonzero.
    pub assumptions: Vec<String>,
}

fn pivot_known_nonzero(r: &RatFunc, asm: &Assumptions) -> bool {
    if r.num.len() != 1 {
        let e = simplify::to_expr(&r.num);
        return e.as_exponent().map_or(false, |x| asm.is_nonzero(&x));
    }
    let (m, _) = r.num.iter().next().unwrap();
    m.iter().all(|(b, _)| match b {
        Expr::Gamma(_) => true,
        Expr::Param(s) => asm.is_nonzero(&ExponentForm::symbol(s)),
        _ => false,
    })
}

/// Reduced row echelon form. Constant pivots are preferred; a symbolic pivot
/// is taken to be nonzero and recorded.
pub fn rref(mut rows: Vec<Vec<RatFunc>>, ncols: usize, asm: &Assumptions) -> Rref {
    let mut pivots = Vec::new();
    let mut assumptions = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let mut best: Option<usize> = None;
        for i in r..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => {
                    let (x, y) = (&rows[i][c], &rows[b][c]);
                    match (x.as_constant().is_some(), y.as_constant().is_some()) {
                        (true, false) => true,
                        (false, true) => false,
                        _ => x.size() < y.size(),
                    }
                }
            };
            if better {
                best = Some(i);
            }
        }
        let Some(b) = best else { continue };
        rows.swap(r, b);
        let p = rows[r][c].clone();
        if p.as_constant().is_none() && !pivot_known_nonzero(&p, asm) {
            let s = alloc::format!("{} != 0", simplify::to_expr(&p.num));
            if !assumptions.contains(&s) {
                assumptions.push(s);
            }
        }
        let inv = p.inv();
        rows[r] = rows[r].iter().map(|x| x.mul(&inv)).collect();
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            let pr = rows[r].clone();
            for (x, y) in rows[i].iter_mut().zip(pr.iter()) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    Rref { rows, pivots, assumptions }
}

/// Basis of the right null space, one vector per free column, with a 1 in
/// that column.
pub fn nullspace(red: &Rref, ncols: usize) -> Vec<Vec<RatFunc>> {
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !red.pivots.contains(c)) {
        let mut v = alloc::vec![RatFunc::zero(); ncols];
        v[free] = RatFunc::one();
        for (row, &p) in red.rows.iter().zip(&red.pivots) {
            v[p] = row[free].neg();
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::q;

    fn rf(e: Expr) -> RatFunc {
        RatFunc::from_expr(&e)
    }

    #[test]
    fn cancel() {
        let a = Expr::param("a");
        let num = Expr::mul(Expr::sub(a.clone(), Expr::int(3)), Expr::add(a.clone(), Expr::one()));
        let den = Expr::sub(a.clone(), Expr::int(3));
        let r = rf(num).div(&rf(den));
        assert_eq!(r, rf(Expr::add(a, Expr::one())));
    }

    #[test]
    fn fractions_add() {
        let a = Expr::param("a");
        let x = rf(Expr::div(Expr::one(), a.clone()));
        let y = rf(Expr::div(Expr::int(-1), a.clone()));
        assert!(x.add(&y).is_zero());
        let two = x.add(&x);
        assert_eq!(two.mul(&rf(a)).as_constant(), Some(q(2)));
    }

    #[test]
    fn kernel() {
        let m = |v: &[i64]| v.iter().map(|x| RatFunc::constant(q(*x))).collect::<Vec<_>>();
        let red = rref(alloc::vec![m(&[1, 2, 3]), m(&[2, 4, 6])], 3, &Assumptions::new());
        assert_eq!(red.pivots, alloc::vec![0]);
        let ns = nullspace(&red, 3);
        assert_eq!(ns.len(), 2);
        assert_eq!(ns[0][0].as_constant(), Some(q(-2)));
    }
}
