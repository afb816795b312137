mod common;

use common::*;
use fraclie_core::gamma::{equivalent, is_zero};
use fraclie_core::model::*;
use fraclie_core::prolong::*;
use fraclie_core::*;

#[test]
fn mu_square() {
    let mu = mu_truncated(&Expr::powi(Expr::u(0), 2), 2, 1, &a()).unwrap();
    let ut = Expr::Jet(JetVar::new(0, &[], 1, None));
    let al = a().to_expr();
    let expect = Expr::Product(vec![
        al.clone(),
        al - Expr::one(),
        Expr::pow(Expr::t(), ExponentForm::int(2).sub(&a())),
        Expr::powi(Expr::gamma(ExponentForm::int(3).sub(&a())), -1),
        Expr::powi(ut, 2),
    ]);
    assert!(equivalent(&mu, &expect), "{}", mu);
}

#[test]
fn mu_linear_vanishes() {
    let eta = Expr::Fn(FnApp::new(&Symbol::new("c"), vec![Arg::Indep(IndepVar::T)])) * Expr::u(0)
        + Expr::t();
    assert!(is_zero(&mu_truncated(&eta, 6, 1, &a()).unwrap()));
}

#[test]
fn aux_branches() {
    let sys = zk();
    for b in [Branch::Zero, Branch::Nonzero] {
        let r = check_aux_conditions(&AnsatzGenerator::new(&sys, b), 6).unwrap();
        assert!(r.ok, "{:?}", r.residuals);
    }
    let bad = AnsatzGenerator::with_tau(&sys, Branch::Nonzero, Expr::powi(Expr::t(), 3));
    let r = check_aux_conditions(&bad, 6).unwrap();
    assert!(!r.ok);
    assert_eq!(r.residuals.iter().map(|x| x.k).min(), Some(2));
    println!("{:?}", r.residuals[0].expr);
}

#[test]
fn zk_classification() {
    let sys = zk();
    let c = &classify_terms(&sys)[0];
    assert_eq!(c.all.len(), 3);
    assert_eq!(c.linear.len(), 2);
    assert_eq!(c.nonlinear.len(), 1);
    assert!(validate_system(&sys).is_empty());
    let ans = AnsatzGenerator::new(&sys, Branch::Symbolic);
    println!("{}", eta_theta(&ans.gen, 0, &[1]).unwrap());
}
