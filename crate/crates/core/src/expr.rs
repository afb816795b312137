//! Expression tree, exponent algebra and jet coordinates.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(s: &str) -> Self {
        Symbol(Arc::from(s))
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `c + Σ a_s·s` with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExponentForm {
    constant: Q,
    terms: BTreeMap<Symbol, Q>,
}

impl ExponentForm {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn one() -> Self {
        Self::constant(Q::one())
    }
    pub fn constant(c: Q) -> Self {
        ExponentForm { constant: c, terms: BTreeMap::new() }
    }
    pub fn int(n: i64) -> Self {
        Self::constant(q(n))
    }
    pub fn symbol(s: &Symbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(s.clone(), Q::one());
        ExponentForm { constant: Q::zero(), terms }
    }
    pub fn constant_part(&self) -> &Q {
        &self.constant
    }
    pub fn terms(&self) -> &BTreeMap<Symbol, Q> {
        &self.terms
    }
    pub fn coeff(&self, s: &Symbol) -> Q {
        self.terms.get(s).cloned().unwrap_or_else(Q::zero)
    }
    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.constant.is_one() && self.terms.is_empty()
    }
    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn as_constant(&self) -> Option<&Q> {
        if self.terms.is_empty() {
            Some(&self.constant)
        } else {
            None
        }
    }
    /// Integer value, if the form is an integer constant.
    pub fn as_integer(&self) -> Option<i64> {
        let c = self.as_constant()?;
        if c.is_integer() {
            c.to_integer().to_i64()
        } else {
            None
        }
    }
    pub fn add(&self, o: &ExponentForm) -> ExponentForm {
        let mut r = self.clone();
        r.constant += &o.constant;
        for (s, c) in &o.terms {
            let e = r.terms.entry(s.clone()).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                r.terms.remove(s);
            }
        }
        r
    }
    pub fn sub(&self, o: &ExponentForm) -> ExponentForm {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> ExponentForm {
        self.scale(&-Q::one())
    }
    pub fn add_const(&self, c: &Q) -> ExponentForm {
        let mut r = self.clone();
        r.constant += c;
        r
    }
    pub fn scale(&self, k: &Q) -> ExponentForm {
        if k.is_zero() {
            return ExponentForm::zero();
        }
        ExponentForm {
            constant: &self.constant * k,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c * k)).collect(),
        }
    }
    /// Product, defined when at least one factor is constant.
    pub fn mul(&self, o: &ExponentForm) -> Option<ExponentForm> {
        if let Some(c) = self.as_constant() {
            Some(o.scale(c))
        } else {
            o.as_constant().map(|c| self.scale(c))
        }
    }
    /// Substitute symbols by exponent forms.
    pub fn substitute(&self, f: &dyn Fn(&Symbol) -> Option<ExponentForm>) -> ExponentForm {
        let mut r = ExponentForm::constant(self.constant.clone());
        for (s, c) in &self.terms {
            match f(s) {
                Some(v) => r = r.add(&v.scale(c)),
                None => r = r.add(&ExponentForm::symbol(s).scale(c)),
            }
        }
        r
    }
    pub fn to_expr(&self) -> Expr {
        let mut parts = Vec::new();
        for (s, c) in &self.terms {
            parts.push(Expr::mul(Expr::Num(c.clone()), Expr::Param(s.clone())));
        }
        if !self.constant.is_zero() {
            parts.push(Expr::Num(self.constant.clone()));
        }
        crate::simplify::simplify(&Expr::Sum(parts))
    }
    pub fn mentions(&self, s: &Symbol) -> bool {
        self.terms.contains_key(s)
    }
}

impl fmt::Display for ExponentForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, c) in &self.terms {
            write_coeff_term(f, c, s.as_str(), first)?;
            first = false;
        }
        if !self.constant.is_zero() || first {
            if first {
                write!(f, "{}", fmt_q(&self.constant))?;
            } else if self.constant.is_negative() {
                write!(f, " - {}", fmt_q(&-self.constant.clone()))?;
            } else {
                write!(f, " + {}", fmt_q(&self.constant))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExponentForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn write_coeff_term(f: &mut fmt::Formatter<'_>, c: &Q, s: &str, first: bool) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            f.write_str("-")?;
        }
    } else if neg {
        f.write_str(" - ")?;
    } else {
        f.write_str(" + ")?;
    }
    if a.is_one() {
        f.write_str(s)
    } else if a.is_integer() {
        write!(f, "{}*{}", a, s)
    } else {
        write!(f, "{}*{}/{}", a.numer(), s, a.denom())
    }
}

pub fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        alloc::format!("{}/{}", c.numer(), c.denom())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum IndepVar {
    T,
    X(usize),
}

/// Jet coordinate `∂_t^j ∂_x^θ u_s`, or `∂_x^θ ∂_t^{α−k} u_s` when `frac_offset = Some(k)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JetVar {
    pub dep: usize,
    space: Vec<u32>,
    pub t_order: u32,
    pub frac_offset: Option<u32>,
}

impl JetVar {
    pub fn new(dep: usize, space: &[u32], t_order: u32, frac_offset: Option<u32>) -> Self {
        assert!(
            t_order == 0 || frac_offset.is_none(),
            "fractional offset and t-order are exclusive"
        );
        let mut space = space.to_vec();
        while space.last() == Some(&0) {
            space.pop();
        }
        JetVar { dep, space, t_order, frac_offset }
    }
    pub fn plain(dep: usize) -> Self {
        Self::new(dep, &[], 0, None)
    }
    pub fn space(&self) -> &[u32] {
        &self.space
    }
    pub fn space_at(&self, i: usize) -> u32 {
        self.space.get(i).copied().unwrap_or(0)
    }
    pub fn order(&self) -> u32 {
        self.space.iter().sum()
    }
    pub fn is_plain(&self) -> bool {
        self.space.is_empty() && self.t_order == 0 && self.frac_offset.is_none()
    }
    pub fn is_fractional(&self) -> bool {
        self.frac_offset.is_some()
    }
    /// Increment the derivative index along `v`.
    pub fn bump(&self, v: IndepVar) -> JetVar {
        match v {
            IndepVar::T => {
                assert!(self.frac_offset.is_none());
                JetVar::new(self.dep, &self.space, self.t_order + 1, None)
            }
            IndepVar::X(i) => {
                let mut s = self.space.clone();
                if s.len() <= i {
                    s.resize(i + 1, 0);
                }
                s[i] += 1;
                JetVar::new(self.dep, &s, self.t_order, self.frac_offset)
            }
        }
    }
    pub fn with_space(&self, space: &[u32]) -> JetVar {
        JetVar::new(self.dep, space, self.t_order, self.frac_offset)
    }
}

impl Ord for JetVar {
    fn cmp(&self, o: &Self) -> Ordering {
        self.dep
            .cmp(&o.dep)
            .then(self.order().cmp(&o.order()))
            .then_with(|| o.space.cmp(&self.space))
            .then(self.t_order.cmp(&o.t_order))
            .then(self.frac_offset.cmp(&o.frac_offset))
    }
}

impl PartialOrd for JetVar {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.dep)?;
        if let Some(k) = self.frac_offset {
            write!(f, "[a-{}]", k)?;
        }
        if self.t_order > 0 {
            write!(f, "_t{}", self.t_order)?;
        }
        if !self.space.is_empty() {
            write!(f, "_x{:?}", self.space)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Arg {
    Indep(IndepVar),
    Dep(usize),
}

/// Application of a named function, possibly differentiated.
///
/// `deriv[i]` counts derivatives in `args[i]`. With `frac` set the node stands
/// for `∂_t^α` applied to the differentiated function.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FnApp {
    pub name: Symbol,
    pub args: Vec<Arg>,
    pub deriv: Vec<u32>,
    pub frac: bool,
}

impl FnApp {
    pub fn new(name: &Symbol, args: Vec<Arg>) -> Self {
        let n = args.len();
        FnApp { name: name.clone(), args, deriv: alloc::vec![0; n], frac: false }
    }
    pub fn has_dep_arg(&self) -> bool {
        self.args.iter().any(|a| matches!(a, Arg::Dep(_)))
    }
    pub fn has_arg(&self, a: Arg) -> bool {
        self.args.contains(&a)
    }
    pub fn differentiated(&self, slot: usize) -> FnApp {
        let mut r = self.clone();
        r.deriv[slot] += 1;
        r
    }
    pub fn is_underived(&self) -> bool {
        self.deriv.iter().all(|d| *d == 0) && !self.frac
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Num(Q),
    Param(Symbol),
    Var(IndepVar),
    Jet(JetVar),
    Gamma(ExponentForm),
    Fn(FnApp),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, ExponentForm),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(Q::zero())
    }
    pub fn one() -> Expr {
        Expr::Num(Q::one())
    }
    pub fn int(n: i64) -> Expr {
        Expr::Num(q(n))
    }
    pub fn rat(n: i64, d: i64) -> Expr {
        Expr::Num(qr(n, d))
    }
    pub fn param(s: &str) -> Expr {
        Expr::Param(Symbol::new(s))
    }
    pub fn t() -> Expr {
        Expr::Var(IndepVar::T)
    }
    pub fn x(i: usize) -> Expr {
        Expr::Var(IndepVar::X(i))
    }
    pub fn jet(j: JetVar) -> Expr {
        Expr::Jet(j)
    }
    pub fn u(dep: usize) -> Expr {
        Expr::Jet(JetVar::plain(dep))
    }
    pub fn gamma(z: ExponentForm) -> Expr {
        Expr::Gamma(z)
    }
    pub fn pow(b: Expr, e: ExponentForm) -> Expr {
        Expr::Pow(Box::new(b), e)
    }
    pub fn powi(b: Expr, n: i64) -> Expr {
        Expr::Pow(Box::new(b), ExponentForm::int(n))
    }
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Sum(alloc::vec![a, b])
    }
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sum(alloc::vec![a, Expr::neg(b)])
    }
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Product(alloc::vec![a, b])
    }
    pub fn neg(a: Expr) -> Expr {
        Expr::Product(alloc::vec![Expr::int(-1), a])
    }
    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Product(alloc::vec![a, Expr::powi(b, -1)])
    }
    pub fn as_num(&self) -> Option<&Q> {
        match self {
            Expr::Num(c) => Some(c),
            _ => None,
        }
    }
    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(c) if c.is_zero())
    }

    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Sum(v) | Expr::Product(v) => v.iter().for_each(|e| e.visit(f)),
            Expr::Pow(b, _) => b.visit(f),
            _ => {}
        }
    }
    pub fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if !found && pred(e) {
                found = true;
            }
        });
        found
    }
    pub fn contains_jet(&self) -> bool {
        self.any(&|e| match e {
            Expr::Jet(_) => true,
            Expr::Fn(f) => f.has_dep_arg(),
            _ => false,
        })
    }
    pub fn contains_var(&self, v: IndepVar) -> bool {
        self.any(&|e| match e {
            Expr::Var(w) => *w == v,
            Expr::Fn(f) => f.has_arg(Arg::Indep(v)) || (v == IndepVar::T && f.frac),
            _ => false,
        })
    }
    pub fn contains_fractional(&self) -> bool {
        self.any(&|e| matches!(e, Expr::Jet(j) if j.is_fractional()))
    }
    /// Symbols mentioned anywhere, including inside exponents and Γ arguments.
    pub fn symbols(&self) -> alloc::collections::BTreeSet<Symbol> {
        let mut out = alloc::collections::BTreeSet::new();
        self.visit(&mut |e| match e {
            Expr::Param(s) => {
                out.insert(s.clone());
            }
            Expr::Gamma(z) | Expr::Pow(_, z) => out.extend(z.terms().keys().cloned()),
            _ => {}
        });
        out
    }
    pub fn jets(&self) -> alloc::collections::BTreeSet<JetVar> {
        let mut out = alloc::collections::BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Jet(j) = e {
                out.insert(j.clone());
            }
        });
        out
    }
    pub fn fns(&self) -> alloc::collections::BTreeSet<FnApp> {
        let mut out = alloc::collections::BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Fn(f) = e {
                out.insert(f.clone());
            }
        });
        out
    }
    /// Read an affine exponent back out of an expression.
    pub fn as_exponent(&self) -> Option<ExponentForm> {
        match crate::simplify::simplify(self) {
            Expr::Num(c) => Some(ExponentForm::constant(c)),
            Expr::Param(s) => Some(ExponentForm::symbol(&s)),
            Expr::Product(fs) => product_exponent(&fs),
            Expr::Sum(ts) => {
                let mut r = ExponentForm::zero();
                for t in &ts {
                    r = r.add(&match t {
                        Expr::Num(c) => ExponentForm::constant(c.clone()),
                        Expr::Param(s) => ExponentForm::symbol(s),
                        Expr::Product(fs) => product_exponent(fs)?,
                        _ => return None,
                    });
                }
                Some(r)
            }
            _ => None,
        }
    }
}

fn product_exponent(fs: &[Expr]) -> Option<ExponentForm> {
    match fs {
        [Expr::Num(c), Expr::Param(s)] => Some(ExponentForm::symbol(s).scale(c)),
        _ => None,
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Q> for Expr {
    fn from(c: Q) -> Self {
        Expr::Num(c)
    }
}

impl From<ExponentForm> for Expr {
    fn from(e: ExponentForm) -> Self {
        e.to_expr()
    }
}

impl core::ops::Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::add(self, o)
    }
}

impl core::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::sub(self, o)
    }
}

impl core::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::mul(self, o)
    }
}

impl core::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl core::ops::Div for Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        Expr::div(self, o)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::Printer::default().expr(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::Printer::default().expr(self))
    }
}
