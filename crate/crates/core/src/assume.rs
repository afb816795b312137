//! Sign decisions for exponent forms from declared assumptions.

use alloc::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::expr::{ExponentForm, Symbol, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assumption {
    Nonzero,
    Positive,
    /// Open interval.
    Interval(Q, Q),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
    Zero,
    Nonzero,
    Unknown,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assumptions {
    map: BTreeMap<Symbol, Assumption>,
}

impl Assumptions {
    pub fn new() -> Self {
        Self::default()
    }

    /// The fractional order lives in (0, 1).
    pub fn with_alpha(alpha: &Symbol) -> Self {
        let mut a = Self::new();
        a.insert(alpha, Assumption::Interval(Q::zero(), crate::expr::q(1)));
        a
    }

    pub fn insert(&mut self, s: &Symbol, a: Assumption) {
        self.map.insert(s.clone(), a);
    }

    pub fn get(&self, s: &Symbol) -> Option<&Assumption> {
        self.map.get(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Assumption)> {
        self.map.iter()
    }

    fn bounds(&self, s: &Symbol) -> (Option<Q>, Option<Q>) {
        match self.map.get(s) {
            Some(Assumption::Positive) => (Some(Q::zero()), None),
            Some(Assumption::Interval(lo, hi)) => (Some(lo.clone()), Some(hi.clone())),
            _ => (None, None),
        }
    }

    fn excludes_zero(&self, s: &Symbol) -> bool {
        match self.map.get(s) {
            Some(Assumption::Nonzero) | Some(Assumption::Positive) => true,
            Some(Assumption::Interval(lo, hi)) => !lo.is_negative() || hi.is_negative() || hi.is_zero(),
            None => false,
        }
    }

    pub fn sign(&self, e: &ExponentForm) -> Sign {
        let c = e.constant_part();
        if e.is_constant() {
            return if c.is_zero() {
                Sign::Zero
            } else if c.is_positive() {
                Sign::Positive
            } else {
                Sign::Negative
            };
        }
        let mut lo = Some(c.clone());
        let mut hi = Some(c.clone());
        for (s, a) in e.terms() {
            let (slo, shi) = self.bounds(s);
            let (pick_lo, pick_hi) = if a.is_positive() { (slo, shi) } else { (shi, slo) };
            lo = match (lo, pick_lo) {
                (Some(x), Some(b)) => Some(x + a * b),
                _ => None,
            };
            hi = match (hi, pick_hi) {
                (Some(x), Some(b)) => Some(x + a * b),
                _ => None,
            };
        }
        // intervals are open, so a bound touching zero still decides strictly
        if lo.as_ref().map_or(false, |l| !l.is_negative()) {
            return Sign::Positive;
        }
        if hi.as_ref().map_or(false, |h| !h.is_positive()) {
            return Sign::Negative;
        }
        if c.is_zero() && e.terms().len() == 1 && self.excludes_zero(e.terms().keys().next().unwrap()) {
            return Sign::Nonzero;
        }
        Sign::Unknown
    }

    pub fn is_nonzero(&self, e: &ExponentForm) -> bool {
        matches!(self.sign(e), Sign::Positive | Sign::Negative | Sign::Nonzero)
    }
}
