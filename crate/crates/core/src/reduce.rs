//! Symmetry reductions and closed-form solution checks.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::diff;
use crate::error::{Error, Result};
use crate::expr::{Expr, IndepVar, JetVar};
use crate::frac;
use crate::gamma;
use crate::model::PDESystem;
use crate::prolong::Generator;
use crate::simplify::{self, simplify};
use crate::subst::map_atoms;

/// Reduction by `∂_{x_i}`: drop `x_i` and every jet that differentiates in it.
pub fn translation_reduction(sys: &PDESystem, g: &Generator) -> Result<(usize, PDESystem)> {
    let ones: Vec<usize> = (0..sys.p()).filter(|&i| g.xi[i] == Expr::one()).collect();
    let pure = g.tau.is_zero_literal()
        && g.eta.iter().all(|e| e.is_zero_literal())
        && ones.len() == 1
        && g.xi.iter().filter(|x| !x.is_zero_literal()).count() == 1;
    if !pure {
        return Err(Error::NotTranslation);
    }
    let i = ones[0];
    let drop = |e: &Expr| -> Result<Expr> {
        if e.contains_var(IndepVar::X(i)) {
            return Err(Error::NotTranslation);
        }
        let out = map_atoms(e, &|a| match a {
            Expr::Jet(j) if j.space_at(i) > 0 => Some(Expr::zero()),
            Expr::Jet(j) => {
                let mut th: Vec<u32> = (0..sys.p()).map(|k| j.space_at(k)).collect();
                th.remove(i);
                Some(Expr::Jet(j.with_space(&th)))
            }
            Expr::Var(IndepVar::X(k)) if *k > i => Some(Expr::x(k - 1)),
            _ => None,
        });
        Ok(out)
    };
    let rhs: Vec<Expr> = sys.equations.iter().map(|e| drop(&e.rhs())).collect::<Result<_>>()?;
    let mut space = sys.space.clone();
    space.remove(i);
    let red = PDESystem::new(
        space,
        sys.deps.clone(),
        sys.alpha.clone(),
        &sys.alpha_name,
        sys.params.clone(),
        sys.functions.clone(),
        &rhs,
    );
    Ok((i, red))
}

/// Similarity data of a scaling generator
/// `χ₁ t∂t + Σ a_i x_i ∂x_i + Σ b_s u_s ∂u_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct EKReduction {
    /// `z_i = x_i t^{-a_i/χ₁}`: the exponents `-a_i/χ₁`.
    pub z_exponents: Vec<Expr>,
    /// `u_s = t^{β_s} U_s(z)` with `β_s = b_s/χ₁`.
    pub u_exponents: Vec<Expr>,
    /// `δ_i = χ₁/a_i`, `None` where `a_i = 0`.
    pub delta: Vec<Option<Expr>>,
    /// `ε_s = 1 + β_s − α`.
    pub epsilon: Vec<Expr>,
    pub alpha: Expr,
    /// `F_s(t^β U)` divided by `t^{β_s−α}`, when that is free of t.
    pub reduced_rhs: Vec<Option<Expr>>,
}

fn coeff_of(e: &Expr, atom: &Expr) -> Option<Expr> {
    let c = simplify(&Expr::div(e.clone(), atom.clone()));
    let free = !c.contains_var(IndepVar::T) && !c.contains_jet() && !(0..16).any(|k| c.contains_var(IndepVar::X(k)));
    free.then_some(c)
}

pub fn scaling_similarity(sys: &PDESystem, g: &Generator) -> Result<EKReduction> {
    let not = |what: &str, e: &Expr| Error::NotScaling(alloc::format!("{}: {}", what, e));
    let chi1 = coeff_of(&g.tau, &Expr::t()).ok_or_else(|| not("tau", &g.tau))?;
    if gamma::is_zero(&chi1) {
        return Err(not("tau", &g.tau));
    }
    let mut z_exponents = Vec::new();
    let mut delta = Vec::new();
    for (i, x) in g.xi.iter().enumerate() {
        let a = if x.is_zero_literal() {
            Expr::zero()
        } else {
            coeff_of(x, &Expr::x(i)).ok_or_else(|| not("xi", x))?
        };
        z_exponents.push(simplify(&Expr::neg(Expr::div(a.clone(), chi1.clone()))));
        delta.push((!gamma::is_zero(&a)).then(|| simplify(&Expr::div(chi1.clone(), a.clone()))));
    }
    let alpha = sys.alpha_expr();
    let mut u_exponents = Vec::new();
    let mut epsilon = Vec::new();
    for (s, e) in g.eta.iter().enumerate() {
        let b = if e.is_zero_literal() {
            Expr::zero()
        } else {
            coeff_of(e, &Expr::u(s)).ok_or_else(|| not("eta", e))?
        };
        let beta = simplify(&Expr::div(b, chi1.clone()));
        epsilon.push(simplify(&Expr::Sum(alloc::vec![Expr::one(), beta.clone(), Expr::neg(alpha.clone())])));
        u_exponents.push(beta);
    }
    let reduced_rhs = reduced(sys, &z_exponents, &u_exponents);
    Ok(EKReduction { z_exponents, u_exponents, delta, epsilon, alpha, reduced_rhs })
}

/// With `u_s^θ = t^{β_s + Σ θ_i λ_i} U_s^θ` and `x_i = z_i t^{-λ_i}`, every
/// term of `F_s + H_s` must carry `t^{β_s − α}`; then the reduced right-hand
/// side is the original one read in `(z, U)`.
fn reduced(sys: &PDESystem, lam: &[Expr], beta: &[Expr]) -> Vec<Option<Expr>> {
    let alpha = sys.alpha_expr();
    sys.equations
        .iter()
        .enumerate()
        .map(|(s, eq)| {
            let rhs = eq.rhs();
            let want = Expr::sub(beta[s].clone(), alpha.clone());
            for (m, _) in simplify::expand(&rhs) {
                let mut w = Vec::new();
                for (b, e) in &m {
                    let k = e.to_expr();
                    match b {
                        Expr::Jet(j) if j.t_order == 0 && j.frac_offset.is_none() => {
                            let mut x = alloc::vec![beta[j.dep].clone()];
                            for i in 0..sys.p() {
                                x.push(Expr::mul(Expr::int(j.space_at(i) as i64), lam[i].clone()));
                            }
                            w.push(Expr::mul(k, Expr::Sum(x)));
                        }
                        Expr::Var(IndepVar::X(i)) => w.push(Expr::neg(Expr::mul(k, lam[*i].clone()))),
                        Expr::Var(IndepVar::T) => w.push(k),
                        b if b.contains_jet() || b.contains_var(IndepVar::T) => return None,
                        b if (0..sys.p()).any(|i| b.contains_var(IndepVar::X(i))) => return None,
                        _ => {}
                    }
                }
                if !gamma::is_zero(&Expr::sub(Expr::Sum(w), want.clone())) {
                    return None;
                }
            }
            Some(rhs)
        })
        .collect()
}

/// `∂_t^α u_s − (F_s + H_s)` at a closed-form candidate, per equation. Zero
/// residuals are returned as literal zeros.
pub fn verify_exact_solution(sys: &PDESystem, sol: &[Expr]) -> Result<Vec<Expr>> {
    if sol.len() != sys.q() {
        return Err(Error::Invalid("one expression per dependent variable".to_string()));
    }
    let asm = sys.assumptions();
    let mut out = Vec::new();
    for (s, eq) in sys.equations.iter().enumerate() {
        let lhs = frac::frac_dt(&sol[s], &sys.alpha, &asm)?;
        let bad: core::cell::RefCell<Option<String>> = core::cell::RefCell::new(None);
        let rhs = map_atoms(&eq.rhs(), &|a| match a {
            Expr::Jet(j) => {
                if j.is_fractional() {
                    *bad.borrow_mut() = Some(a.to_string());
                    return None;
                }
                Some(jet_value(&sol[j.dep], j))
            }
            Expr::Fn(f) if f.has_dep_arg() => {
                *bad.borrow_mut() = Some(a.to_string());
                None
            }
            _ => None,
        });
        if let Some(b) = bad.into_inner() {
            return Err(Error::Invalid(alloc::format!("cannot evaluate {} at a closed form", b)));
        }
        let r = gamma::gamma_simplify(&Expr::sub(lhs, rhs));
        out.push(if gamma::is_zero(&r) { Expr::zero() } else { simplify(&gamma::gamma_normalize(&r)) });
    }
    Ok(out)
}

fn jet_value(u: &Expr, j: &JetVar) -> Expr {
    let mut e = diff::partial_n(u, IndepVar::T, j.t_order);
    for (i, k) in j.space().iter().enumerate() {
        e = diff::partial_n(&e, IndepVar::X(i), *k);
    }
    simplify::simplify(&e)
}
