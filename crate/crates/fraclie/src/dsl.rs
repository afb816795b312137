//! The `.fpde` input language and its printer.
//!
//! ```text
//! param n nonzero;
//! alpha a;
//! space x, y;
//! dep u;
//! Dt^a(u) = -u^n*Dx(u) - Dx^3(u) - Dx(Dy^2(u));
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use fraclie_core::assume::Assumption;
use fraclie_core::model::{validate_system, FnDecl, PDESystem, ParamDecl};
use fraclie_core::print::Style;
use fraclie_core::prolong::{reserved_names, Generator};
use fraclie_core::expr::fmt_q;
use fraclie_core::{diff, simplify, Arg, ExponentForm, Expr, FnApp, IndepVar, Symbol, Q};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: {msg}")]
    Semantic { line: usize, col: usize, msg: String },
}

impl DslError {
    pub fn is_syntax(&self) -> bool {
        matches!(self, DslError::Syntax { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Q),
    Sym(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, DslError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).map_or(false, |d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int: String = chars[start..i].iter().collect();
            let mut frac = String::new();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                frac = chars[fs..i].iter().collect();
            }
            col += i - start;
            let digits = format!("{}{}", if int.is_empty() { "0" } else { &int }, frac);
            let den = format!("1{}", "0".repeat(frac.len()));
            let v: Q = format!("{}/{}", digits, den).parse().map_err(|_| DslError::Syntax {
                line: l0,
                col: c0,
                msg: "malformed number".into(),
            })?;
            out.push(Token { tok: Tok::Num(v), line: l0, col: c0 });
            continue;
        }
        if "+-*/^(),;=".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        return Err(DslError::Syntax { line: l0, col: c0, msg: format!("unexpected character `{}`", c) });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Names visible inside expressions.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub space: Vec<String>,
    pub deps: Vec<String>,
    pub params: BTreeSet<String>,
    /// Function name to the dependent it takes.
    pub fns: BTreeMap<String, usize>,
    pub alpha: Option<String>,
}

impl Scope {
    pub fn of(sys: &PDESystem) -> Scope {
        Scope {
            space: sys.space.clone(),
            deps: sys.deps.clone(),
            params: sys.params.iter().map(|p| p.name.as_str().to_string()).collect(),
            fns: sys.functions.iter().map(|f| (f.name.as_str().to_string(), f.arg)).collect(),
            alpha: sys.alpha_symbol().map(|s| s.as_str().to_string()),
        }
    }

    fn declared(&self, name: &str) -> bool {
        name == "t"
            || self.space.iter().any(|s| s == name)
            || self.deps.iter().any(|s| s == name)
            || self.params.contains(name)
            || self.fns.contains_key(name)
            || self.alpha.as_deref() == Some(name)
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Scope,
}

impl Parser {
    fn new(src: &str, scope: Scope) -> Result<Self, DslError> {
        Ok(Parser { toks: lex(src)?, pos: 0, scope })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, DslError> {
        let t = self.peek();
        Err(DslError::Syntax { line: t.line, col: t.col, msg: msg.into() })
    }

    fn syntax_at<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T, DslError> {
        Err(DslError::Syntax { line: t.line, col: t.col, msg: msg.into() })
    }

    fn semantic_at<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T, DslError> {
        Err(DslError::Semantic { line: t.line, col: t.col, msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), DslError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.syntax(format!("expected `{}`", c))
        }
    }

    fn ident(&mut self) -> Result<(String, Token), DslError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.next();
                Ok((s, t))
            }
            _ => self.syntax("expected identifier"),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn signed_rational(&mut self) -> Result<Q, DslError> {
        let neg = self.eat('-');
        let t = self.next();
        let mut v = match t.tok {
            Tok::Num(v) => v,
            _ => return self.syntax_at(&t, "expected number"),
        };
        if self.eat('/') {
            let t = self.next();
            match t.tok {
                Tok::Num(d) if !d.is_zero() => v /= d,
                _ => return self.syntax_at(&t, "expected nonzero denominator"),
            }
        }
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = Expr::add(acc, self.term()?);
            } else if self.eat('-') {
                acc = Expr::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = Expr::mul(acc, self.unary()?);
            } else if self.peek().tok == Tok::Sym('/') {
                let at = self.next();
                let d = self.unary()?;
                if simplify::is_zero(&d) {
                    return self.semantic_at(&at, "division by zero");
                }
                acc = Expr::div(acc, d);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        if self.eat('-') {
            return Ok(Expr::neg(self.unary()?));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, DslError> {
        let base = self.primary()?;
        if self.peek().tok != Tok::Sym('^') {
            return Ok(base);
        }
        let at = self.next();
        let ex = self.unary()?;
        match ex.as_exponent() {
            Some(e) => Ok(Expr::pow(base, e)),
            None => self.semantic_at(&at, "exponent must be affine in the declared parameters"),
        }
    }

    fn primary(&mut self) -> Result<Expr, DslError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Num(v) => {
                self.next();
                Ok(Expr::Num(v.clone()))
            }
            Tok::Sym('(') => {
                self.next();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let name = name.clone();
                self.next();
                self.named(&name, &t)
            }
            Tok::Eof => self.syntax("unexpected end of input"),
            Tok::Sym(c) => self.syntax(format!("unexpected `{}`", c)),
        }
    }

    fn derivative_var(&self, name: &str) -> Option<Option<usize>> {
        let rest = name.strip_prefix('D')?;
        if rest == "t" {
            return Some(None);
        }
        self.scope.space.iter().position(|s| s == rest).map(Some)
    }

    fn named(&mut self, name: &str, at: &Token) -> Result<Expr, DslError> {
        if !self.scope.declared(name) {
            if let Some(var) = self.derivative_var(name) {
                let Some(i) = var else {
                    return self.semantic_at(at, "time derivative on the right-hand side");
                };
                let mut k = 1u32;
                if self.eat('^') {
                    let t = self.next();
                    match t.tok {
                        Tok::Num(v) if v.is_integer() && v.is_positive() => {
                            k = v.to_integer().try_into().unwrap_or(u32::MAX);
                        }
                        _ => return self.syntax_at(&t, "derivative order must be a positive integer"),
                    }
                }
                self.expect('(')?;
                let inner = self.expr()?;
                self.expect(')')?;
                return match diff::total_n(&inner, IndepVar::X(i), k) {
                    Ok(e) => Ok(e),
                    Err(e) => self.semantic_at(at, e.to_string()),
                };
            }
            if name == "Gamma" {
                self.expect('(')?;
                let inner = self.expr()?;
                self.expect(')')?;
                return match inner.as_exponent() {
                    Some(z) => Ok(Expr::gamma(z)),
                    None => self.semantic_at(at, "Gamma argument must be affine in the parameters"),
                };
            }
            return self.semantic_at(at, format!("undeclared symbol `{}`", name));
        }
        if name == "t" {
            return Ok(Expr::t());
        }
        if let Some(i) = self.scope.space.iter().position(|s| s == name) {
            return Ok(Expr::x(i));
        }
        if let Some(s) = self.scope.deps.iter().position(|s| s == name) {
            return Ok(Expr::u(s));
        }
        if let Some(&arg) = self.scope.fns.get(name) {
            self.expect('(')?;
            let (a, at_a) = self.ident()?;
            if self.scope.deps.get(arg).map(String::as_str) != Some(a.as_str()) {
                return self.semantic_at(&at_a, format!("`{}` is declared as a function of `{}`", name, self.scope.deps[arg]));
            }
            self.expect(')')?;
            return Ok(Expr::Fn(FnApp::new(&Symbol::new(name), vec![Arg::Dep(arg)])));
        }
        Ok(Expr::param(name))
    }

    fn end(&mut self, what: &str) -> Result<(), DslError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            self.syntax(format!("trailing input after {}", what))
        }
    }
}

fn check_fresh(p: &Parser, name: &str, at: &Token, reserved: &BTreeSet<String>) -> Result<(), DslError> {
    if reserved.contains(name) || name == "Gamma" || p.derivative_var(name).is_some() {
        return p.semantic_at(at, format!("`{}` is a reserved name", name));
    }
    if p.scope.declared(name) {
        return p.semantic_at(at, format!("`{}` is declared twice", name));
    }
    Ok(())
}

/// Parse and validate a system.
pub fn parse_system(src: &str) -> Result<PDESystem, DslError> {
    let mut p = Parser::new(src, Scope::default())?;
    let mut params: Vec<ParamDecl> = Vec::new();
    let mut functions = Vec::new();
    let mut alpha: Option<(ExponentForm, String)> = None;
    let mut reserved: BTreeSet<String> = ["t".to_string()].into();

    loop {
        let Tok::Ident(kw) = p.peek().tok.clone() else { break };
        match kw.as_str() {
            "param" => {
                p.next();
                let (name, at) = p.ident()?;
                check_fresh(&p, &name, &at, &reserved)?;
                let assumption = if p.at_keyword("nonzero") {
                    p.next();
                    Some(Assumption::Nonzero)
                } else if p.at_keyword("positive") {
                    p.next();
                    Some(Assumption::Positive)
                } else if p.at_keyword("in") {
                    p.next();
                    p.expect('(')?;
                    let lo = p.signed_rational()?;
                    p.expect(',')?;
                    let hi = p.signed_rational()?;
                    p.expect(')')?;
                    if lo >= hi {
                        return p.semantic_at(&at, "empty interval");
                    }
                    Some(Assumption::Interval(lo, hi))
                } else {
                    None
                };
                p.expect(';')?;
                p.scope.params.insert(name.clone());
                params.push(ParamDecl { name: Symbol::new(&name), assumption });
            }
            "alpha" => {
                let at = p.next();
                if alpha.is_some() {
                    return p.semantic_at(&at, "alpha declared twice");
                }
                if let Tok::Ident(_) = p.peek().tok {
                    let (name, at) = p.ident()?;
                    check_fresh(&p, &name, &at, &reserved)?;
                    p.scope.alpha = Some(name.clone());
                    alpha = Some((ExponentForm::symbol(&Symbol::new(&name)), name));
                } else {
                    let v = p.signed_rational()?;
                    if !v.is_positive() || v >= Q::one() {
                        return p.semantic_at(&at, "fractional order must lie in (0,1)");
                    }
                    alpha = Some((ExponentForm::constant(v.clone()), fmt_q(&v)));
                }
                p.expect(';')?;
            }
            "space" | "dep" => {
                let at = p.next();
                if (kw == "space" && !p.scope.space.is_empty()) || (kw == "dep" && !p.scope.deps.is_empty()) {
                    return p.semantic_at(&at, format!("`{}` declared twice", kw));
                }
                loop {
                    let (name, at) = p.ident()?;
                    check_fresh(&p, &name, &at, &reserved)?;
                    if kw == "space" {
                        p.scope.space.push(name);
                    } else {
                        p.scope.deps.push(name);
                    }
                    if !p.eat(',') {
                        break;
                    }
                }
                p.expect(';')?;
                reserved = reserved_names(&p.scope.space, &p.scope.deps).into_iter().collect();
                reserved.insert("t".into());
            }
            "fn" => {
                p.next();
                let (name, at) = p.ident()?;
                check_fresh(&p, &name, &at, &reserved)?;
                p.expect('(')?;
                let (arg, at_a) = p.ident()?;
                let Some(s) = p.scope.deps.iter().position(|d| *d == arg) else {
                    return p.semantic_at(&at_a, format!("`{}` is not a declared dependent", arg));
                };
                p.expect(')')?;
                p.expect(';')?;
                p.scope.fns.insert(name.clone(), s);
                functions.push(FnDecl { name: Symbol::new(&name), arg: s });
            }
            _ => break,
        }
    }

    if p.scope.deps.is_empty() {
        return p.syntax("expected a `dep` declaration before the equations");
    }
    let mut rhs: Vec<Option<Expr>> = vec![None; p.scope.deps.len()];
    while p.peek().tok != Tok::Eof {
        let (dt, at) = p.ident()?;
        if dt != "Dt" {
            return p.semantic_at(&at, format!("equation must start with Dt^<order>(<dep>), found `{}`", dt));
        }
        p.expect('^')?;
        let order_at = p.peek().clone();
        let order = if let Tok::Ident(name) = &order_at.tok {
            let name = name.clone();
            p.next();
            match &alpha {
                Some((_, n)) if *n == name => {}
                None => {
                    return p.semantic_at(&order_at, format!("undeclared fractional order `{}`", name));
                }
                _ => return p.semantic_at(&order_at, "all equations must share the declared order"),
            }
            alpha.clone().unwrap().0
        } else {
            let paren = p.eat('(');
            let v = p.signed_rational()?;
            if paren {
                p.expect(')')?;
            }
            ExponentForm::constant(v)
        };
        if let Some(c) = order.as_constant() {
            if !c.is_positive() || *c >= Q::one() {
                return p.semantic_at(&order_at, "fractional order must lie in (0,1)");
            }
        }
        match &alpha {
            None => alpha = Some((order.clone(), fmt_q(order.as_constant().unwrap()))),
            Some((a, _)) if *a != order => {
                return p.semantic_at(&order_at, "all equations must share the declared order");
            }
            _ => {}
        }
        p.expect('(')?;
        let (dep, at_d) = p.ident()?;
        let Some(s) = p.scope.deps.iter().position(|d| *d == dep) else {
            return p.semantic_at(&at_d, format!("`{}` is not a declared dependent", dep));
        };
        if rhs[s].is_some() {
            return p.semantic_at(&at_d, format!("second equation for `{}`", dep));
        }
        p.expect(')')?;
        p.expect('=')?;
        rhs[s] = Some(p.expr()?);
        p.expect(';')?;
    }
    p.end("equations")?;
    let eof = p.peek().clone();
    let mut eqs = Vec::new();
    for (s, r) in rhs.into_iter().enumerate() {
        match r {
            Some(e) => eqs.push(e),
            None => return p.semantic_at(&eof, format!("no equation for `{}`", p.scope.deps[s])),
        }
    }
    let Some((alpha, alpha_name)) = alpha else {
        return p.semantic_at(&eof, "no fractional order declared");
    };
    let sys = PDESystem::new(p.scope.space.clone(), p.scope.deps.clone(), alpha, &alpha_name, params, functions, &eqs);
    let diags = validate_system(&sys);
    if !diags.is_empty() {
        let list: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return p.semantic_at(&eof, format!("invalid system: {}", list.join(", ")));
    }
    Ok(sys)
}

/// Parse a single expression against the names of `sys`, plus `extra` parameters.
pub fn parse_expr(src: &str, sys: &PDESystem, extra: &[String]) -> Result<Expr, DslError> {
    let mut scope = Scope::of(sys);
    scope.params.extend(extra.iter().cloned());
    let mut p = Parser::new(src, scope)?;
    let e = p.expr()?;
    p.end("expression")?;
    Ok(simplify::simplify(&e))
}

/// Generator files: `param c2; tau = ...; xi x = ...; eta u = ...;`.
/// Components left out are zero.
pub fn parse_generator(src: &str, sys: &PDESystem) -> Result<(Generator, Vec<String>), DslError> {
    let mut p = Parser::new(src, Scope::of(sys))?;
    let mut g = Generator::zero(sys.p(), sys.q());
    let mut extra = Vec::new();
    let mut seen = BTreeSet::new();
    while p.peek().tok != Tok::Eof {
        let (kw, at) = p.ident()?;
        match kw.as_str() {
            "param" => {
                loop {
                    let (name, at) = p.ident()?;
                    if p.scope.declared(&name) {
                        return p.semantic_at(&at, format!("`{}` is declared twice", name));
                    }
                    p.scope.params.insert(name.clone());
                    extra.push(name);
                    if !p.eat(',') {
                        break;
                    }
                }
                p.expect(';')?;
                continue;
            }
            "tau" => {
                if !seen.insert("tau".to_string()) {
                    return p.semantic_at(&at, "tau given twice");
                }
                p.expect('=')?;
                g.tau = simplify::simplify(&p.expr()?);
            }
            "xi" | "eta" => {
                let (v, at_v) = p.ident()?;
                let names = if kw == "xi" { &sys.space } else { &sys.deps };
                let Some(i) = names.iter().position(|n| *n == v) else {
                    return p.semantic_at(&at_v, format!("`{}` is not a declared {}", v, if kw == "xi" { "space variable" } else { "dependent" }));
                };
                if !seen.insert(format!("{} {}", kw, v)) {
                    return p.semantic_at(&at_v, format!("{} {} given twice", kw, v));
                }
                p.expect('=')?;
                let e = simplify::simplify(&p.expr()?);
                if kw == "xi" {
                    g.xi[i] = e;
                } else {
                    g.eta[i] = e;
                }
            }
            _ => return p.semantic_at(&at, format!("expected tau, xi, eta or param, found `{}`", kw)),
        }
        p.expect(';')?;
    }
    Ok((g, extra))
}

fn fmt_assumption(a: &Assumption) -> String {
    match a {
        Assumption::Nonzero => " nonzero".into(),
        Assumption::Positive => " positive".into(),
        Assumption::Interval(lo, hi) => format!(" in ({}, {})", fmt_q(lo), fmt_q(hi)),
    }
}

/// Print a system in the input language.
pub fn emit(sys: &PDESystem) -> String {
    let mut out = String::new();
    for p in &sys.params {
        let a = p.assumption.as_ref().map(fmt_assumption).unwrap_or_default();
        let _ = writeln!(out, "param {}{};", p.name, a);
    }
    let order = match sys.alpha_symbol() {
        Some(s) => {
            let _ = writeln!(out, "alpha {};", s);
            s.as_str().to_string()
        }
        None => {
            let c = sys.alpha.as_constant().cloned().unwrap_or_else(Q::zero);
            let _ = writeln!(out, "alpha {};", fmt_q(&c));
            format!("({})", fmt_q(&c))
        }
    };
    if !sys.space.is_empty() {
        let _ = writeln!(out, "space {};", sys.space.join(", "));
    }
    let _ = writeln!(out, "dep {};", sys.deps.join(", "));
    for f in &sys.functions {
        let _ = writeln!(out, "fn {}({});", f.name, sys.deps[f.arg]);
    }
    let pr = sys.printer(Style::Dsl);
    for (s, eq) in sys.equations.iter().enumerate() {
        let rhs = eq.rhs();
        let body = if rhs.is_zero_literal() { "0".to_string() } else { pr.expr(&rhs) };
        let _ = writeln!(out, "Dt^{}({}) = {};", order, sys.deps[s], body);
    }
    out
}

/// Print a generator in the generator-file language.
pub fn emit_generator(sys: &PDESystem, g: &Generator, extra: &[String]) -> String {
    let pr = sys.printer(Style::Dsl);
    let mut out = String::new();
    if !extra.is_empty() {
        let _ = writeln!(out, "param {};", extra.join(", "));
    }
    let _ = writeln!(out, "tau = {};", pr.expr(&g.tau));
    for (i, x) in g.xi.iter().enumerate() {
        let _ = writeln!(out, "xi {} = {};", sys.space[i], pr.expr(x));
    }
    for (s, e) in g.eta.iter().enumerate() {
        let _ = writeln!(out, "eta {} = {};", sys.deps[s], pr.expr(e));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        let t = lex("0.25 .5 3").unwrap();
        assert_eq!(t[0].tok, Tok::Num(fraclie_core::qr(1, 4)));
        assert_eq!(t[1].tok, Tok::Num(fraclie_core::qr(1, 2)));
        assert_eq!(t[2].tok, Tok::Num(fraclie_core::q(3)));
    }

    #[test]
    fn positions() {
        let err = parse_system("dep u;\nalpha a;\nDt^a(u) = u $ 2;").unwrap_err();
        assert_eq!(err, DslError::Syntax { line: 3, col: 13, msg: "unexpected character `$`".into() });
    }
}
