use std::path::PathBuf;

use fraclie::dsl::{emit, emit_generator, parse_expr, parse_generator, parse_system, DslError};
use fraclie_core::model::{classify_terms, validate_system, Diagnostic};
use fraclie_core::simplify::simplify;
use fraclie_core::{Expr, JetVar};

fn systems() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("systems")
}

fn load(name: &str) -> String {
    std::fs::read_to_string(systems().join(name)).unwrap()
}

fn jet(dep: usize, space: &[u32]) -> Expr {
    Expr::Jet(JetVar::new(dep, space, 0, None))
}

#[test]
fn zk_source() {
    let sys = parse_system(&load("zk.fpde")).unwrap();
    assert_eq!((sys.p(), sys.q()), (2, 1));
    let n = fraclie_core::ExponentForm::symbol(&fraclie_core::Symbol::new("n"));
    let f = -(Expr::pow(Expr::u(0), n) * jet(0, &[1])) - jet(0, &[3]) - jet(0, &[1, 2]);
    assert_eq!(sys.equations[0].f, simplify(&f));
    assert!(sys.equations[0].h.is_zero_literal());
    let c = &classify_terms(&sys)[0];
    assert_eq!((c.all.len(), c.linear.len(), c.nonlinear.len()), (3, 2, 1));
}

#[test]
fn telegraph_source() {
    let sys = parse_system(&load("telegraph.fpde")).unwrap();
    assert_eq!(sys.q(), 2);
    assert_eq!(sys.functions.len(), 2);
    assert_eq!(sys.equations[0].f, jet(1, &[1]));
    let c = &classify_terms(&sys)[1];
    assert_eq!(c.all.len(), 2);
    assert!(c.linear.is_empty());
}

#[test]
fn source_term_goes_to_h() {
    let sys = parse_system("alpha 1/2; space x; dep u; Dt^(1/2)(u) = Dx^2(u) + t*x;").unwrap();
    assert_eq!(sys.equations[0].h, simplify(&(Expr::t() * Expr::x(0))));
    assert_eq!(sys.equations[0].f, jet(0, &[2]));
}

#[test]
fn round_trip_bundled() {
    for name in ["zk.fpde", "hs.fpde", "telegraph.fpde", "telegraph_power.fpde"] {
        let sys = parse_system(&load(name)).unwrap();
        let text = emit(&sys);
        let again = parse_system(&text).unwrap_or_else(|e| panic!("{}: {}\n{}", name, e, text));
        assert_eq!(sys, again, "{}", text);
        assert_eq!(emit(&again), text);
    }
}

#[test]
fn round_trip_awkward_terms() {
    let src = "param k in (-1/2, 3); param m; alpha 0.25; space x; dep u;\n\
               Dt^(1/4)(u) = 1/3*k*u^(m - 1)*Dx(u)/m - 2.5*Gamma(k + 1)*Dx^2(u) + x^2*t^(-1);";
    let sys = parse_system(src).unwrap();
    let again = parse_system(&emit(&sys)).unwrap();
    assert_eq!(sys, again, "{}", emit(&sys));
}

#[test]
fn generator_file() {
    let sys = parse_system(&load("telegraph_power.fpde")).unwrap();
    let (g, extra) = parse_generator(&load("telegraph_power.gen"), &sys).unwrap();
    assert_eq!(extra, vec!["c2".to_string(), "c3".to_string()]);
    let (g2, _) = parse_generator(&emit_generator(&sys, &g, &extra), &sys).unwrap();
    assert_eq!(g, g2);
}

#[test]
fn template_expression() {
    let sys = parse_system(&load("zk.fpde")).unwrap();
    let e = parse_expr("x*t^(a-1)", &sys, &[]).unwrap();
    let a1 = fraclie_core::ExponentForm::symbol(&fraclie_core::Symbol::new("a")).add_const(&-fraclie_core::q(1));
    assert_eq!(e, simplify(&(Expr::x(0) * Expr::pow(Expr::t(), a1))));
}

fn semantic(src: &str) -> String {
    match parse_system(src) {
        Err(e @ DslError::Semantic { .. }) => e.to_string(),
        other => panic!("expected a semantic error, got {:?}", other),
    }
}

#[test]
fn semantic_errors() {
    assert!(semantic("alpha a; space x; dep u; Dt^a(u) = Dx(w);").contains("undeclared symbol `w`"));
    assert!(semantic("alpha a; space x; dep u; Dt^a(u) = Dt(u) + Dx(u);").contains("time derivative"));
    assert!(semantic("alpha 3/2; space x; dep u; Dt^a(u) = Dx(u);").contains("(0,1)"));
    assert!(semantic("space x; dep u; Dt^(5/4)(u) = Dx(u);").contains("(0,1)"));
    assert!(semantic("alpha a; space x; dep u; param chi1; Dt^a(u) = Dx(u);").contains("reserved"));
    assert!(semantic("alpha a; space x; dep u; param xi_x; Dt^a(u) = Dx(u);").contains("reserved"));
    assert!(semantic("alpha a; space x; dep u, v; Dt^a(u) = Dx(v);").contains("no equation for `v`"));
    assert!(semantic("alpha a; space x, y; dep u; Dt^a(u) = Dx^2(u);").contains("MissingSpaceCoupling(y)"));
    assert!(semantic("alpha a; space x; dep u; Dt^a(u) = u^u*Dx(u);").contains("affine"));
}

#[test]
fn syntax_errors_carry_positions() {
    let e = parse_system("alpha a;\nspace x;\ndep u;\nDt^a(u) = Dx(u) +;").unwrap_err();
    assert!(e.is_syntax());
    assert!(e.to_string().starts_with("4:18:"), "{}", e);
    let e = parse_system("alpha a; space x; dep u; Dt^a(u) = Dx(u)").unwrap_err();
    assert!(e.is_syntax(), "{}", e);
}

#[test]
fn validation_matches_core() {
    // the parser refuses what validate_system flags
    let sys = parse_system("alpha a; space x, y; dep u; Dt^a(u) = Dx(Dy(u));").unwrap();
    assert_eq!(validate_system(&sys), Vec::<Diagnostic>::new());
}
