//! The analysis record and its text, JSON and LaTeX renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

/// An expression in plain and LaTeX form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Math {
    pub text: String,
    pub latex: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationInfo {
    pub dep: String,
    pub f: Math,
    pub h: Math,
    pub linear: Vec<Math>,
    pub nonlinear: Vec<Math>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemInfo {
    pub source: String,
    pub dsl: String,
    pub space: Vec<String>,
    pub deps: Vec<String>,
    pub alpha: String,
    pub equations: Vec<EquationInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerEqInfo {
    /// 1-based equation index.
    pub source: usize,
    pub monomial: String,
    pub eq: Math,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Determining {
    pub integer: Vec<IntegerEqInfo>,
    pub fractional: Vec<Math>,
    /// Autoreduced form, one `expr = 0` per entry.
    pub reduced: Vec<Math>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub generator: Math,
    pub tau: Math,
    pub xi: Vec<Math>,
    pub eta: Vec<Math>,
    /// Nonzero residuals; empty for a certified generator.
    pub residuals: Vec<Math>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    /// 1-based index into the basis.
    pub generator: usize,
    pub kind: String,
    pub items: Vec<(String, Math)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Not applicable; `passed` is then true.
    #[serde(default)]
    pub skipped: bool,
    pub detail: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchInfo {
    pub name: String,
    pub unknowns: usize,
    pub equations: usize,
    pub generators: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub poly_degree: u32,
    pub templates: Vec<Math>,
    pub branches: Vec<BranchInfo>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub system: SystemInfo,
    pub determining: Determining,
    pub assumptions: Vec<String>,
    pub basis: Vec<BasisEntry>,
    pub reductions: Vec<Reduction>,
    pub checks: Vec<Check>,
    pub solver: SolverInfo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Vec<Timing>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

pub fn emit(r: &Report, f: Format) -> String {
    match f {
        Format::Text => text(r),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Latex => latex(r),
    }
}

pub fn from_json(s: &str) -> serde_json::Result<Report> {
    serde_json::from_str(s)
}

fn text(r: &Report) -> String {
    let mut o = String::new();
    let sys = &r.system;
    let _ = writeln!(o, "system: {}", sys.source);
    let _ = writeln!(o, "  space {}; dependents {}; order {}", sys.space.join(", "), sys.deps.join(", "), sys.alpha);
    for e in &sys.equations {
        let _ = writeln!(o, "  Dt^{}({}) = F + H", sys.alpha, e.dep);
        let _ = writeln!(o, "    F = {}", e.f.text);
        let _ = writeln!(o, "    H = {}", e.h.text);
        let lin: Vec<&str> = e.linear.iter().map(|m| m.text.as_str()).collect();
        let non: Vec<&str> = e.nonlinear.iter().map(|m| m.text.as_str()).collect();
        let _ = writeln!(o, "    J = {{{}}}", lin.join(", "));
        let _ = writeln!(o, "    I\\J = {{{}}}", non.join(", "));
    }
    let d = &r.determining;
    let _ = writeln!(o, "\ndetermining system ({} integer, {} fractional)", d.integer.len(), d.fractional.len());
    for e in &d.reduced {
        let _ = writeln!(o, "  {} = 0", e.text);
    }
    if !d.fractional.is_empty() {
        let _ = writeln!(o, "  fractional:");
        for e in &d.fractional {
            let _ = writeln!(o, "    {} = 0", e.text);
        }
    }
    let _ = writeln!(o, "\nassumptions");
    if r.assumptions.is_empty() {
        let _ = writeln!(o, "  (none)");
    }
    for a in &r.assumptions {
        let _ = writeln!(o, "  {}", a);
    }
    let _ = writeln!(o, "\nbasis (dimension {})", r.basis.len());
    for (i, b) in r.basis.iter().enumerate() {
        let cert = if b.residuals.is_empty() { "residuals 0" } else { "RESIDUALS NONZERO" };
        let _ = writeln!(o, "  X{} = {}    [{}]", i + 1, b.generator.text, cert);
    }
    let s = &r.solver;
    let _ = writeln!(o, "\nsolver: polynomial degree {}", s.poly_degree);
    let t: Vec<&str> = s.templates.iter().map(|m| m.text.as_str()).collect();
    let _ = writeln!(o, "  h-templates: {}", t.join(", "));
    for b in &s.branches {
        let _ = writeln!(
            o,
            "  branch {}: {} unknowns, {} equations, {} generators",
            b.name, b.unknowns, b.equations, b.generators
        );
    }
    for n in &s.notes {
        let _ = writeln!(o, "  note: {}", n);
    }
    if !r.reductions.is_empty() {
        let _ = writeln!(o, "\nreductions");
        for red in &r.reductions {
            let _ = writeln!(o, "  X{} ({})", red.generator, red.kind);
            for (k, v) in &red.items {
                let _ = writeln!(o, "    {}: {}", k, v.text);
            }
        }
    }
    if !r.checks.is_empty() {
        let _ = writeln!(o, "\nchecks");
        for c in &r.checks {
            let _ = writeln!(o, "  {} {}", verdict(c), c.name);
            for d in &c.detail {
                let _ = writeln!(o, "    {}", d);
            }
        }
    }
    if let Some(ts) = &r.timing {
        let _ = writeln!(o, "\ntiming");
        for t in ts {
            let _ = writeln!(o, "  {:<12} {:>10.3} ms", t.stage, t.ms);
        }
    }
    o
}

fn verdict(c: &Check) -> &'static str {
    match (c.skipped, c.passed) {
        (true, _) => "SKIP",
        (false, true) => "PASS",
        (false, false) => "FAIL",
    }
}

fn tex_text(s: &str) -> String {
    let mut o = String::new();
    for c in s.chars() {
        match c {
            '\\' => o.push_str("\\textbackslash{}"),
            '{' | '}' | '_' | '#' | '$' | '%' | '&' => {
                o.push('\\');
                o.push(c);
            }
            '^' => o.push_str("\\^{}"),
            '~' => o.push_str("\\~{}"),
            _ => o.push(c),
        }
    }
    o
}

fn latex(r: &Report) -> String {
    let mut o = String::new();
    o.push_str("\\documentclass{article}\n\\usepackage{amsmath}\n\\usepackage[margin=2cm]{geometry}\n\\allowdisplaybreaks\n\\begin{document}\n");
    let sys = &r.system;
    let _ = writeln!(o, "\\section*{{System: \\texttt{{{}}}}}", tex_text(&sys.source));
    let alpha = to_latex(&sys.alpha);
    o.push_str("\\begin{align*}\n");
    for e in &sys.equations {
        let _ = writeln!(o, "\\partial_t^{{{}}} {} &= {} + {} \\\\", alpha, e.dep, e.f.latex, e.h.latex);
    }
    o.push_str("\\end{align*}\n");
    let _ = writeln!(o, "\\section*{{Determining system}}");
    o.push_str("\\begin{align*}\n");
    for e in &r.determining.reduced {
        let _ = writeln!(o, "{} &= 0 \\\\", e.latex);
    }
    for e in &r.determining.fractional {
        let _ = writeln!(o, "{} &= 0 \\\\", e.latex);
    }
    if r.determining.reduced.is_empty() && r.determining.fractional.is_empty() {
        o.push_str("0 &= 0\n");
    }
    o.push_str("\\end{align*}\n");
    let _ = writeln!(o, "\\section*{{Assumptions}}");
    if r.assumptions.is_empty() {
        o.push_str("None.\n");
    } else {
        o.push_str("\\begin{itemize}\n");
        for a in &r.assumptions {
            let _ = writeln!(o, "\\item \\texttt{{{}}}", tex_text(a));
        }
        o.push_str("\\end{itemize}\n");
    }
    let _ = writeln!(o, "\\section*{{Symmetry basis}}");
    if r.basis.is_empty() {
        o.push_str("Only the trivial generator.\n");
    } else {
        o.push_str("\\begin{align*}\n");
        for (i, b) in r.basis.iter().enumerate() {
            let _ = writeln!(o, "X_{{{}}} &= {} \\\\", i + 1, b.generator.latex);
        }
        o.push_str("\\end{align*}\n");
    }
    if !r.reductions.is_empty() {
        let _ = writeln!(o, "\\section*{{Reductions}}");
        for red in &r.reductions {
            let _ = writeln!(o, "\\paragraph{{$X_{{{}}}$, {}}}", red.generator, tex_text(&red.kind));
            o.push_str("\\begin{align*}\n");
            for (k, v) in &red.items {
                let _ = writeln!(o, "\\text{{{}}} &: {} \\\\", tex_text(k), v.latex);
            }
            o.push_str("\\end{align*}\n");
        }
    }
    if !r.checks.is_empty() {
        let _ = writeln!(o, "\\section*{{Checks}}");
        o.push_str("\\begin{itemize}\n");
        for c in &r.checks {
            let _ = writeln!(
                o,
                "\\item {} \\texttt{{{}}}",
                verdict(c),
                tex_text(&c.name)
            );
        }
        o.push_str("\\end{itemize}\n");
    }
    o.push_str("\\end{document}\n");
    o
}

/// Turn printer output into LaTeX math: `*` becomes a thin space, grouped
/// exponents get braces, multi-underscore names become single subscripts.
pub fn to_latex(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut o = String::new();
    let mut i = 0;
    let mut stack: Vec<usize> = Vec::new();
    let mut depth = 0usize;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if start > 0 && chars[start - 1] == '\\' {
                o.push_str(&word);
            } else {
                o.push_str(&latex_name(&word));
            }
            continue;
        }
        match c {
            '*' => o.push_str("\\,"),
            '^' if chars.get(i + 1) == Some(&'(') => {
                o.push_str("^{");
                depth += 1;
                stack.push(depth);
                i += 2;
                continue;
            }
            '(' => {
                depth += 1;
                o.push('(');
            }
            ')' => {
                if stack.last() == Some(&depth) {
                    stack.pop();
                    o.push('}');
                } else {
                    o.push(')');
                }
                depth = depth.saturating_sub(1);
            }
            '∂' => o.push_str("\\partial_"),
            _ => o.push(c),
        }
        i += 1;
    }
    o
}

fn latex_name(w: &str) -> String {
    let greek = |b: &str| match b {
        "alpha" | "beta" | "gamma" | "delta" | "epsilon" | "lambda" | "mu" | "xi" | "eta" | "tau" | "chi" => {
            Some(format!("\\{}", b))
        }
        "Gamma" => Some("\\Gamma".to_string()),
        _ => None,
    };
    if w.len() > 3 && w.starts_with("chi") && w[3..].chars().all(|c| c.is_ascii_digit()) {
        return format!("\\chi_{{{}}}", &w[3..]);
    }
    let mut parts = w.split('_');
    let head = parts.next().unwrap_or_default();
    let rest: Vec<&str> = parts.filter(|p| !p.is_empty()).collect();
    let head = greek(head).unwrap_or_else(|| {
        if head.len() > 1 {
            format!("\\mathrm{{{}}}", head)
        } else {
            head.to_string()
        }
    });
    if rest.is_empty() {
        if w.ends_with('_') {
            format!("{}_", head)
        } else {
            head
        }
    } else {
        format!("{}_{{{}}}", head, rest.join(""))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latex_exponents_and_names() {
        assert_eq!(to_latex("1/3*a*x*t^(a - 1)"), "1/3\\,a\\,x\\,t^{a - 1}");
        assert_eq!(to_latex("f_u_v(t,x)"), "f_{uv}(t,x)");
        assert_eq!(to_latex("chi1*t"), "\\chi_{1}\\,t");
        assert_eq!(to_latex("Gamma(a + 1)"), "\\Gamma(a + 1)");
        assert_eq!(to_latex("u^n*u_xyy"), "u^n\\,u_{xyy}");
    }
}
