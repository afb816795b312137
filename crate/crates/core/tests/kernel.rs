use fraclie_core::collect::{collect_monomials, reconstruct};
use fraclie_core::diff::{partial, total};
use fraclie_core::gamma::{equivalent, gamma_simplify, is_zero};
use fraclie_core::simplify::simplify;
use fraclie_core::subst::{substitute, Bindings};
use fraclie_core::*;

fn a() -> Expr {
    Expr::param("a")
}
fn n() -> Expr {
    Expr::param("n")
}
fn ea() -> ExponentForm {
    ExponentForm::symbol(&Symbol::new("a"))
}
fn ux() -> Expr {
    Expr::Jet(JetVar::new(0, &[1], 0, None))
}

#[test]
fn like_terms_merge() {
    let e = Expr::int(2) * Expr::u(0) + Expr::int(3) * Expr::u(0);
    assert_eq!(simplify(&e), simplify(&(Expr::int(5) * Expr::u(0))));
}

#[test]
fn exponents_add() {
    let en = ExponentForm::symbol(&Symbol::new("n"));
    let e = Expr::u(0) * Expr::pow(Expr::u(0), en.add_const(&q(-1)));
    assert_eq!(simplify(&e), Expr::pow(Expr::u(0), en));
}

#[test]
fn cancellation() {
    let p = Expr::pow(Expr::t(), ea().add_const(&q(-1)));
    assert_eq!(simplify(&(p.clone() - p)), Expr::zero());
}

#[test]
fn sum_times_inverse_is_one() {
    let s = a() + Expr::int(1);
    let e = Expr::mul(s.clone(), Expr::powi(s, -1));
    assert_eq!(simplify(&e), Expr::one());
    let s2 = Expr::int(2) * a() + Expr::int(2);
    let e = Expr::mul(s2, Expr::powi(a() + Expr::int(1), -1));
    assert_eq!(simplify(&e), Expr::int(2));
}

#[test]
fn substitution_examples() {
    let e = Expr::u(0) * ux();
    let r = substitute(&e, &Bindings::new().jet(JetVar::plain(0), Expr::powi(Expr::t(), 2))).unwrap();
    assert_eq!(r, simplify(&(Expr::powi(Expr::t(), 2) * ux())));
    let e = Expr::pow(Expr::u(0), ExponentForm::symbol(&Symbol::new("n")));
    let r = substitute(&e, &Bindings::new().param("n", Expr::int(3))).unwrap();
    assert_eq!(r, simplify(&Expr::powi(Expr::u(0), 3)));
    let cyc = Bindings::new().param("n", n() + Expr::int(1));
    assert!(matches!(substitute(&n(), &cyc), Err(Error::CyclicBinding(_))));
}

#[test]
fn derivative_examples() {
    let e = Expr::x(0) * Expr::u(0);
    assert_eq!(partial(&e, IndepVar::X(0)), Expr::u(0));
    let e = Expr::pow(Expr::t(), ea());
    let d = partial(&e, IndepVar::T);
    assert_eq!(d, simplify(&(a() * Expr::pow(Expr::t(), ea().add_const(&q(-1))))));
    assert_eq!(total(&Expr::u(0), IndepVar::X(0)).unwrap(), ux());
}

#[test]
fn gamma_examples() {
    let e = Expr::div(Expr::gamma(ea().add_const(&q(2))), Expr::gamma(ea()));
    assert_eq!(gamma_simplify(&e), simplify(&(a() * (a() + Expr::int(1)))));
    let e = Expr::div(Expr::gamma(ExponentForm::int(3)), Expr::gamma(ExponentForm::int(3)));
    assert_eq!(gamma_simplify(&e), Expr::one());
    let e = Expr::div(Expr::gamma(ExponentForm::int(6)), Expr::gamma(ExponentForm::constant(qr(11, 2))));
    assert_eq!(gamma_simplify(&e), simplify(&e));
    // α/Γ(2−α) + 1/Γ(1−α) = 1/Γ(2−α)
    let one_m = ExponentForm::one().sub(&ea());
    let lhs = a() / Expr::gamma(one_m.add_const(&q(1))) + Expr::one() / Expr::gamma(one_m.clone());
    assert!(equivalent(&lhs, &(Expr::one() / Expr::gamma(one_m.add_const(&q(1))))));
    assert!(!is_zero(&lhs));
}

#[test]
fn collect_example() {
    let basis = [JetVar::plain(0), JetVar::new(0, &[1], 0, None)].into_iter().collect();
    let e = Expr::param("p") * ux() + Expr::param("b") * Expr::u(0) * ux();
    let m = collect_monomials(&e, &basis).unwrap();
    assert_eq!(m.len(), 2);
    assert_eq!(reconstruct(&m), simplify(&e));
    assert!(collect_monomials(&Expr::zero(), &basis).unwrap().is_empty());
    println!("{}", simplify(&e));
}
