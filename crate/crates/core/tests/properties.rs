mod common;

use common::*;
use fraclie_core::collect::{collect_monomials, reconstruct};
use fraclie_core::determining::{build, separate};
use fraclie_core::diff;
use fraclie_core::gamma::is_zero;
use fraclie_core::prolong::*;
use fraclie_core::simplify::simplify;
use fraclie_core::*;
use proptest::prelude::*;
use std::collections::BTreeSet;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-4i64..5).prop_map(Expr::int),
        (1i64..4, 2i64..5).prop_map(|(n, d)| Expr::rat(n, d)),
        Just(Expr::param("a")),
        Just(Expr::param("b")),
        Just(Expr::t()),
        Just(Expr::x(0)),
        Just(Expr::x(1)),
        Just(Expr::u(0)),
        Just(jet(0, &[1])),
        Just(jet(0, &[0, 1])),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Sum),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Product),
            (inner, 0i64..3).prop_map(|(b, k)| Expr::powi(b, k)),
        ]
    })
}

/// Polynomial in t, x, y with symbolic coefficients.
fn coeff() -> impl Strategy<Value = Expr> {
    prop::collection::vec((-3i64..4, 0i64..3, 0i64..3, 0i64..2), 1..4).prop_map(|ts| {
        Expr::Sum(
            ts.into_iter()
                .map(|(c, i, j, k)| {
                    Expr::Product(vec![
                        Expr::int(c),
                        Expr::powi(Expr::t(), i),
                        Expr::powi(Expr::x(0), j),
                        Expr::powi(Expr::x(1), k),
                    ])
                })
                .collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn simplify_idempotent(e in expr()) {
        let s = simplify(&e);
        prop_assert_eq!(simplify(&s), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn total_derivative_rules(f in expr(), g in expr(), k in -3i64..4) {
        for v in [IndepVar::T, IndepVar::X(0), IndepVar::X(1)] {
            let lin = diff::total(&(Expr::int(k) * f.clone() + g.clone()), v).unwrap();
            let sep = Expr::int(k) * diff::total(&f, v).unwrap() + diff::total(&g, v).unwrap();
            prop_assert!(is_zero(&(lin - sep)));
            let prod = diff::total(&(f.clone() * g.clone()), v).unwrap();
            let rule = diff::total(&f, v).unwrap() * g.clone() + f.clone() * diff::total(&g, v).unwrap();
            prop_assert!(is_zero(&(prod - rule)));
        }
        let xy = diff::total(&diff::total(&f, IndepVar::X(0)).unwrap(), IndepVar::X(1)).unwrap();
        let yx = diff::total(&diff::total(&f, IndepVar::X(1)).unwrap(), IndepVar::X(0)).unwrap();
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn collect_round_trip(e in expr()) {
        let basis: BTreeSet<JetVar> = [JetVar::plain(0), JetVar::new(0, &[1], 0, None), JetVar::new(0, &[0, 1], 0, None)].into();
        let parts = collect_monomials(&e, &basis).unwrap();
        prop_assert!(is_zero(&(reconstruct(&parts) - e)));
    }

    #[test]
    fn eta_theta_linear(c1 in coeff(), c2 in coeff(), d1 in coeff(), d2 in coeff(), k in -3i64..4) {
        let gen = |c: &Expr, d: &Expr| Generator {
            tau: c.clone(),
            xi: vec![d.clone(), Expr::zero()],
            eta: vec![c.clone() * Expr::u(0) + d.clone()],
        };
        let (g1, g2) = (gen(&c1, &d1), gen(&c2, &d2));
        let sum = Generator {
            tau: Expr::int(k) * g1.tau.clone() + g2.tau.clone(),
            xi: vec![Expr::int(k) * g1.xi[0].clone() + g2.xi[0].clone(), Expr::zero()],
            eta: vec![Expr::int(k) * g1.eta[0].clone() + g2.eta[0].clone()],
        };
        for th in [vec![1u32], vec![0, 2], vec![1, 1]] {
            let l = eta_theta(&sum, 0, &th).unwrap();
            let r = Expr::int(k) * eta_theta(&g1, 0, &th).unwrap() + eta_theta(&g2, 0, &th).unwrap();
            prop_assert!(is_zero(&(l - r)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn mu_vanishes_for_linear_eta(c in coeff(), d in coeff(), e in coeff()) {
        let eta = c * Expr::u(0) + d * Expr::u(1) + e;
        prop_assert!(is_zero(&mu_truncated(&eta, 6, 2, &a()).unwrap()));
    }
}

#[test]
fn mu_nonzero_for_nonlinear_eta() {
    for eta in [Expr::powi(Expr::u(0), 2), Expr::u(0) * Expr::u(1), Expr::powi(Expr::u(0), 3)] {
        assert!(!is_zero(&mu_truncated(&eta, 6, 2, &a()).unwrap()), "{}", eta);
    }
}

#[test]
fn separation_reconstructs_and_is_affine() {
    for sys in [zk(), hs(), telegraph()] {
        let asm = sys.assumptions();
        let ans = AnsatzGenerator::new(&sys, Branch::Symbolic);
        for cond in fraclie_core::determining::invariance_condition(&sys, &ans.gen).unwrap() {
            let frag = separate(&cond, &sys, &asm).unwrap();
            let mut back = vec![frag.jet_free.clone()];
            for e in &frag.eqs {
                back.push(fraclie_core::simplify::mono_to_expr(&e.monomial, &q(1)) * e.expr.clone());
                assert!(!e.expr.contains_jet());
            }
            assert!(is_zero(&(Expr::Sum(back) - cond)));
        }
        let ds = build(&sys, Branch::Symbolic).unwrap();
        for e in &ds.integer_eqs {
            // affine in the unknowns: each term has exactly one unknown factor
            fraclie_core::determining::linear_form(&e.expr, &ds.ansatz)
                .unwrap_or_else(|err| panic!("{}: {}", e.expr, err));
        }
    }
}

#[test]
fn conditions_add_up_to_full_criterion() {
    // condition 1 + condition 2 equals η^α local − pr X(F + H), assembled independently
    let sys = hs();
    let ans = AnsatzGenerator::new(&sys, Branch::Symbolic);
    let c1 = fraclie_core::determining::h_condition(&sys, &ans.gen).unwrap();
    let c2 = fraclie_core::determining::invariance_condition(&sys, &ans.gen).unwrap();
    let asm = sys.assumptions();
    let dtau = diff::total(&ans.gen.tau, IndepVar::T).unwrap();
    for s in 0..sys.q() {
        let rhs = sys.equations[s].rhs();
        let mut local = vec![fraclie_core::frac::frac_dt(&ans.h_expr(s), &sys.alpha, &asm).unwrap()];
        for i in 0..sys.q() {
            local.push(diff::partial_jet(&ans.gen.eta[s], &JetVar::plain(i)) * sys.equations[i].rhs());
        }
        local.push(-(sys.alpha_expr() * dtau.clone() * rhs.clone()));
        let mut pr = vec![ans.gen.tau.clone() * diff::partial(&rhs, IndepVar::T)];
        pr.push(ans.gen.xi[0].clone() * diff::partial(&rhs, IndepVar::X(0)));
        for j in rhs.jets() {
            pr.push(eta_theta(&ans.gen, j.dep, j.space()).unwrap() * diff::partial_jet(&rhs, &j));
        }
        let full = Expr::Sum(local) - Expr::Sum(pr);
        assert!(is_zero(&(full - c1[s].clone() - c2[s].clone())));
    }
}
