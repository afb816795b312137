//! Infix rendering. The default style is re-readable by the system parser.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::expr::{fmt_q, Arg, ExponentForm, Expr, FnApp, IndepVar, JetVar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    /// `Dx(Dy^2(u))`, re-parseable.
    Dsl,
    /// `u_xyy`.
    Subscript,
    Latex,
}

#[derive(Clone, Debug)]
pub struct Printer {
    pub space: Vec<String>,
    pub deps: Vec<String>,
    pub style: Style,
    pub alpha: String,
}

impl Default for Printer {
    fn default() -> Self {
        Printer { space: Vec::new(), deps: Vec::new(), style: Style::Subscript, alpha: "a".to_string() }
    }
}

impl Printer {
    pub fn new(space: &[String], deps: &[String], alpha: &str, style: Style) -> Self {
        Printer { space: space.to_vec(), deps: deps.to_vec(), style, alpha: alpha.to_string() }
    }

    pub fn space_name(&self, i: usize) -> String {
        match self.space.get(i) {
            Some(s) => s.clone(),
            None if i < 3 => ["x", "y", "z"][i].to_string(),
            None => format!("x{}", i + 1),
        }
    }

    pub fn dep_name(&self, s: usize) -> String {
        match self.deps.get(s) {
            Some(n) => n.clone(),
            None if s < 3 => ["u", "v", "w"][s].to_string(),
            None => format!("u{}", s + 1),
        }
    }

    pub fn var(&self, v: IndepVar) -> String {
        match v {
            IndepVar::T => "t".to_string(),
            IndepVar::X(i) => self.space_name(i),
        }
    }

    pub fn jet(&self, j: &JetVar) -> String {
        let u = self.dep_name(j.dep);
        match self.style {
            Style::Dsl => {
                let mut inner = match j.frac_offset {
                    Some(0) => format!("Dt^{}({})", self.alpha, u),
                    Some(k) => format!("Dt^({}-{})({})", self.alpha, k, u),
                    None => u,
                };
                if j.t_order > 0 {
                    inner = wrap_d("t", j.t_order, &inner);
                }
                for i in (0..j.space().len()).rev() {
                    let k = j.space_at(i);
                    if k > 0 {
                        inner = wrap_d(&self.space_name(i), k, &inner);
                    }
                }
                inner
            }
            Style::Subscript | Style::Latex => {
                let mut sub = String::new();
                for _ in 0..j.t_order {
                    sub.push('t');
                }
                for i in 0..j.space().len() {
                    for _ in 0..j.space_at(i) {
                        sub.push_str(&self.space_name(i));
                    }
                }
                let base = match j.frac_offset {
                    Some(0) if self.style == Style::Latex => format!("\\partial_t^{{\\alpha}} {}", u),
                    Some(k) if self.style == Style::Latex => {
                        format!("\\partial_t^{{\\alpha-{}}} {}", k, u)
                    }
                    Some(0) => format!("Dt^{}({})", self.alpha, u),
                    Some(k) => format!("Dt^({}-{})({})", self.alpha, k, u),
                    None => u,
                };
                if sub.is_empty() {
                    base
                } else if self.style == Style::Latex {
                    format!("{}_{{{}}}", base, sub)
                } else {
                    format!("{}_{}", base, sub)
                }
            }
        }
    }

    pub fn fnapp(&self, f: &FnApp) -> String {
        let args: Vec<String> = f
            .args
            .iter()
            .map(|a| match a {
                Arg::Indep(v) => self.var(*v),
                Arg::Dep(s) => self.dep_name(*s),
            })
            .collect();
        let mut name = f.name.as_str().to_string();
        if f.args.len() == 1 && f.deriv[0] > 0 {
            match f.deriv[0] {
                n @ 1..=3 => name.push_str(&"'".repeat(n as usize)),
                n => name.push_str(&format!("^({})", n)),
            }
        } else if f.deriv.iter().any(|d| *d > 0) {
            name.push('[');
            for (i, d) in f.deriv.iter().enumerate() {
                for _ in 0..*d {
                    name.push_str(&args[i]);
                }
            }
            name.push(']');
        }
        let app = format!("{}({})", name, args.join(","));
        if f.frac {
            format!("Dt^{}[{}]", self.alpha, app)
        } else {
            app
        }
    }

    pub fn exponent(&self, e: &ExponentForm) -> String {
        let s = e.to_string();
        let simple = e.as_constant().map_or(false, |c| c.is_integer() && !c.is_negative())
            || (e.constant_part().is_zero()
                && e.terms().len() == 1
                && e.terms().values().next().unwrap().is_one());
        if simple {
            s
        } else {
            format!("({})", s)
        }
    }

    pub fn expr(&self, e: &Expr) -> String {
        match e {
            Expr::Num(c) => fmt_q(c),
            Expr::Param(s) => s.as_str().to_string(),
            Expr::Var(v) => self.var(*v),
            Expr::Jet(j) => self.jet(j),
            Expr::Gamma(z) => format!("Gamma({})", z),
            Expr::Fn(f) => self.fnapp(f),
            Expr::Sum(ts) => {
                let mut out = String::new();
                for (i, t) in ts.iter().enumerate() {
                    let s = self.expr(t);
                    if i == 0 {
                        out.push_str(&s);
                    } else if let Some(rest) = s.strip_prefix('-') {
                        out.push_str(" - ");
                        out.push_str(rest);
                    } else {
                        out.push_str(" + ");
                        out.push_str(&s);
                    }
                }
                out
            }
            Expr::Product(fs) => {
                let (den, num): (Vec<&Expr>, Vec<&Expr>) = fs.iter().partition(|f| {
                    matches!(f, Expr::Pow(_, ex) if ex.as_integer().map_or(false, |k| k < 0))
                });
                if !den.is_empty() && !num.is_empty() {
                    let inv: Vec<Expr> = den
                        .iter()
                        .map(|f| match f {
                            Expr::Pow(b, ex) if ex.neg().is_one() => (**b).clone(),
                            Expr::Pow(b, ex) => Expr::pow((**b).clone(), ex.neg()),
                            _ => unreachable!(),
                        })
                        .collect();
                    let n = match num.as_slice() {
                        [one] => (*one).clone(),
                        _ => Expr::Product(num.into_iter().cloned().collect()),
                    };
                    let d = match inv.len() {
                        1 => inv.into_iter().next().unwrap(),
                        _ => Expr::Product(inv),
                    };
                    let ns = if matches!(n, Expr::Sum(_)) { format!("({})", self.expr(&n)) } else { self.expr(&n) };
                    let ds = match &d {
                        Expr::Product(_) => format!("({})", self.expr(&d)),
                        _ => self.factor(&d),
                    };
                    return format!("{}/{}", ns, ds);
                }
                let mut parts = Vec::new();
                let mut sign = "";
                for (i, f) in fs.iter().enumerate() {
                    if i == 0 {
                        if let Expr::Num(c) = f {
                            if *c == -Q1::one() {
                                sign = "-";
                                continue;
                            }
                            if c.is_negative() {
                                sign = "-";
                                parts.push(fmt_q(&-c.clone()));
                                continue;
                            }
                            parts.push(fmt_q(c));
                            continue;
                        }
                    }
                    parts.push(self.factor(f));
                }
                format!("{}{}", sign, parts.join("*"))
            }
            Expr::Pow(b, ex) => format!("{}^{}", self.factor(b), self.exponent(ex)),
        }
    }

    fn factor(&self, e: &Expr) -> String {
        match e {
            Expr::Sum(_) => format!("({})", self.expr(e)),
            Expr::Num(c) if !c.is_integer() || c.is_negative() => format!("({})", fmt_q(c)),
            Expr::Pow(..) | Expr::Product(_) => {
                let s = self.expr(e);
                if matches!(e, Expr::Product(_)) {
                    format!("({})", s)
                } else {
                    s
                }
            }
            _ => self.expr(e),
        }
    }
}

type Q1 = crate::expr::Q;

fn wrap_d(var: &str, k: u32, inner: &str) -> String {
    if k == 1 {
        format!("D{}({})", var, inner)
    } else {
        format!("D{}^{}({})", var, k, inner)
    }
}
