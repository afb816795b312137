use fraclie_core::assume::Assumptions;
use fraclie_core::frac::*;
use fraclie_core::gamma::{equivalent, is_zero};
use fraclie_core::oracle::{self, Env};
use fraclie_core::*;

const GAMMAS: [(i64, i64); 5] = [(0, 1), (1, 2), (1, 1), (2, 1), (5, 2)];
const ALPHAS: [(i64, i64); 3] = [(1, 4), (1, 2), (3, 4)];
const TS: [f64; 3] = [0.5, 1.0, 2.0];

fn f(c: &Q) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap()
}

fn symbolic(g: &ExponentForm, alpha: &Q, t: f64) -> f64 {
    let a = ExponentForm::symbol(&Symbol::new("a"));
    let r = rl_derivative(&PowerSum::monomial(Expr::one(), g.clone()), &a, &Assumptions::with_alpha(&Symbol::new("a")))
        .unwrap();
    let mut env = Env::default();
    env.params.insert(Symbol::new("a"), f(alpha));
    env.vars.insert(IndepVar::T, t);
    oracle::eval(&r.to_expr(), &env).unwrap()
}

#[test]
fn power_rule_matches_quadrature() {
    let mut worst: f64 = 0.0;
    for (gn, gd) in GAMMAS {
        for (an, ad) in ALPHAS {
            for t in TS {
                let g = qr(gn, gd);
                let al = qr(an, ad);
                let s = symbolic(&ExponentForm::constant(g.clone()), &al, t);
                let o = oracle::rl_power_sum(&[(1.0, f(&g))], f(&al), t, 64).unwrap();
                worst = worst.max((s - o.value).abs());
            }
        }
    }
    assert!(worst < 1e-8, "{}", worst);
}

#[test]
fn power_rule_matches_grunwald() {
    let mut worst: f64 = 0.0;
    for (gn, gd) in GAMMAS {
        for (an, ad) in ALPHAS {
            for t in TS {
                let (g, al) = (f(&qr(gn, gd)), f(&qr(an, ad)));
                let s = symbolic(&ExponentForm::constant(qr(gn, gd)), &qr(an, ad), t);
                let o = oracle::rl_sampled(&|x: f64| x.powf(g), al, t, oracle::default_gl_steps());
                worst = worst.max((s - o.value).abs() / s.abs().max(1.0));
            }
        }
    }
    assert!(worst < 1e-4, "{}", worst);
}

#[test]
fn oracle_spot_values() {
    let v = oracle::rl_power_sum(&[(1.0, 2.0)], 0.5, 1.0, 64).unwrap();
    assert!((v.value - 1.504_505_556).abs() < 1e-8);
    for t in TS {
        let v = oracle::rl_power_sum(&[(1.0, -0.5)], 0.5, t, 64).unwrap();
        assert!(v.value.abs() < 1e-6, "{}", v.value);
    }
    let v = oracle::rl_power_sum(&[(1.0, 0.0)], 0.5, 1.0, 64).unwrap();
    assert!((v.value - 0.564_189_583_5).abs() < 1e-9);
    assert!(matches!(oracle::rl_power_sum(&[(1.0, -1.0)], 0.5, 1.0, 64), Err(Error::SingularInput(_))));
}

#[test]
fn leibniz_terminates() {
    let a = ExponentForm::symbol(&Symbol::new("a"));
    let asm = Assumptions::with_alpha(&Symbol::new("a"));
    let mut bs: Vec<ExponentForm> = (0..4).map(ExponentForm::int).collect();
    bs.push(a.add_const(&q(1)));
    for ai in 0..=4 {
        for b in &bs {
            let u = PowerSum::monomial(Expr::one(), ExponentForm::int(ai));
            let v = PowerSum::monomial(Expr::one(), b.clone());
            let lhs = leibniz_expand(&u, &v, &a, ai as u32, &asm).unwrap();
            let prod = PowerSum::monomial(Expr::one(), b.add_const(&q(ai)));
            let rhs = rl_derivative(&prod, &a, &asm).unwrap().to_expr();
            assert!(equivalent(&lhs, &rhs), "t^{} t^{}: {} vs {}", ai, b, lhs, rhs);
            // more terms change nothing
            let longer = leibniz_expand(&u, &v, &a, ai as u32 + 3, &asm).unwrap();
            assert!(equivalent(&longer, &rhs));
        }
    }
}

#[test]
fn binomial_at_integers() {
    for n in 0..8i64 {
        for k in 0..10i64 {
            let b = gen_binomial(&Expr::int(n), k).unwrap();
            let mut exact = Q::from_integer(1.into());
            for j in 0..k {
                exact = exact * q(n - j) / q(j + 1);
            }
            assert_eq!(b, Expr::Num(exact), "C({},{})", n, k);
        }
    }
}

#[test]
fn leibniz_u_t_v_one() {
    let a = ExponentForm::symbol(&Symbol::new("a"));
    let asm = Assumptions::with_alpha(&Symbol::new("a"));
    let u = PowerSum::monomial(Expr::one(), ExponentForm::int(1));
    let v = PowerSum::monomial(Expr::one(), ExponentForm::zero());
    let lhs = leibniz_expand(&u, &v, &a, 1, &asm).unwrap();
    let one_minus = ExponentForm::int(1).sub(&a);
    let rhs = Expr::pow(Expr::t(), one_minus.clone()) / Expr::gamma(one_minus.add_const(&q(1)));
    assert!(is_zero(&(lhs - rhs)));
}
