mod common;

use common::*;
use fraclie_core::determining::*;
use fraclie_core::prolong::*;
use fraclie_core::*;

fn unknown(ans: &AnsatzGenerator, name: &str, deriv: &[u32]) -> Expr {
    let mut f = ans.unknowns.iter().find(|u| u.app.name.as_str() == name).unwrap().app.clone();
    f.deriv = deriv.to_vec();
    Expr::Fn(f)
}

fn dtau() -> Expr {
    Expr::param("chi1") + Expr::int(2) * Expr::param("chi2") * Expr::t()
}

#[test]
fn zk_coefficients() {
    let sys = zk();
    let ds = build(&sys, Branch::Symbolic).unwrap();
    let ans = &ds.ansatz;
    let get = |m: &str| ds.integer_eqs.iter().find(|e| e.monomial == m).unwrap().expr.clone();
    let al = a().to_expr();
    let xi_x = unknown(ans, "xi_x", &[1, 0]);
    assert!(gamma::is_zero(&(get("u_xxx") - (al.clone() * dtau() - Expr::int(3) * xi_x.clone()))));
    let n = Expr::param("n");
    let g = unknown(ans, "g_u", &[0, 0]);
    let want = n.clone() * g + (al + Expr::param("gamma_u") * n.clone()) * dtau() - xi_x;
    assert!(gamma::is_zero(&(get("u^n*u_x") - want)));
    assert!(gamma::is_zero(&(get("u^(n - 1)*u_x") - n * unknown(ans, "h_u", &[0, 0, 0]))));
    assert_eq!(ds.assumptions, vec!["n != 1".to_string()]);
    assert_eq!(ds.frac_eqs.len(), 1);
    assert!(ds.frac_eqs[0].contains_fractional() || ds.frac_eqs[0].fns().iter().any(|f| f.frac));
}

#[test]
fn reduced_forms() {
    let sys = zk();
    let red = autoreduce(&build(&sys, Branch::Symbolic).unwrap(), &sys).unwrap();
    assert_eq!(red.len(), 8);
    let sys = hs();
    let red = autoreduce(&build(&sys, Branch::Symbolic).unwrap(), &sys).unwrap();
    assert_eq!(red.len(), 9);
}

#[test]
fn telegraph_separates_functional_atoms() {
    let sys = telegraph();
    let ds = build(&sys, Branch::Symbolic).unwrap();
    assert!(ds.assumptions.iter().any(|a| a.contains("P'(u)")));
    assert!(ds.integer_eqs.iter().any(|e| e.monomial.contains("P'(u)")));
}
