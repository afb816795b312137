#![allow(dead_code)]

use fraclie_core::assume::Assumption;
use fraclie_core::model::*;
use fraclie_core::*;

pub fn a() -> ExponentForm {
    ExponentForm::symbol(&Symbol::new("a"))
}

pub fn jet(dep: usize, space: &[u32]) -> Expr {
    Expr::Jet(JetVar::new(dep, space, 0, None))
}

pub fn zk() -> PDESystem {
    let n = ExponentForm::symbol(&Symbol::new("n"));
    let rhs = -(Expr::pow(Expr::u(0), n) * jet(0, &[1])) - jet(0, &[3]) - jet(0, &[1, 2]);
    PDESystem::new(
        vec!["x".into(), "y".into()],
        vec!["u".into()],
        a(),
        "a",
        vec![ParamDecl { name: Symbol::new("n"), assumption: Some(Assumption::Nonzero) }],
        vec![],
        &[rhs],
    )
}

pub fn hs() -> PDESystem {
    let (u, v) = (Expr::u(0), Expr::u(1));
    let r1 = u.clone() * jet(0, &[1]) + v.clone() * jet(1, &[1]) + jet(0, &[3]);
    let r2 = -(u * jet(1, &[1])) - Expr::int(2) * jet(1, &[3]);
    PDESystem::new(vec!["x".into()], vec!["u".into(), "v".into()], a(), "a", vec![], vec![], &[r1, r2])
}

pub fn func(name: &str, dep: usize) -> Expr {
    Expr::Fn(FnApp::new(&Symbol::new(name), vec![Arg::Dep(dep)]))
}

pub fn telegraph() -> PDESystem {
    let r1 = jet(1, &[1]);
    let r2 = func("P", 0) * jet(0, &[1]) + func("G", 0);
    PDESystem::new(
        vec!["x".into()],
        vec!["u".into(), "v".into()],
        a(),
        "a",
        vec![],
        vec![FnDecl { name: Symbol::new("P"), arg: 0 }, FnDecl { name: Symbol::new("G"), arg: 0 }],
        &[r1, r2],
    )
}

/// Telegraph with P = u^2 and G = u^lam.
pub fn telegraph_power(lam: Expr) -> PDESystem {
    let r1 = jet(1, &[1]);
    let ex = lam.as_exponent().unwrap();
    let r2 = Expr::powi(Expr::u(0), 2) * jet(0, &[1]) + Expr::pow(Expr::u(0), ex);
    let params = lam
        .symbols()
        .into_iter()
        .map(|s| ParamDecl { name: s, assumption: Some(Assumption::Nonzero) })
        .collect();
    PDESystem::new(vec!["x".into()], vec!["u".into(), "v".into()], a(), "a", params, vec![], &[r1, r2])
}

/// The case-II generator with χ₁ = (2 - lam)/α.
pub fn telegraph_generator(lam: Expr) -> fraclie_core::prolong::Generator {
    let al = a().to_expr();
    let chi1 = (Expr::int(2) - lam.clone()) / al;
    let c2 = Expr::param("c2");
    let c3 = Expr::param("c3");
    fraclie_core::prolong::Generator {
        tau: chi1 * Expr::t(),
        xi: vec![(Expr::int(3) - lam) * Expr::x(0) + c3],
        eta: vec![
            Expr::u(0),
            Expr::int(2) * Expr::u(1) + c2 * Expr::pow(Expr::t(), a().add_const(&-fraclie_core::q(1))),
        ],
    }
}
