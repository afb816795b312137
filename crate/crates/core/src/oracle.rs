//! Floating-point reference values: Γ, Gauss–Jacobi quadrature and
//! Grünwald–Letnikov differences for Riemann–Liouville derivatives.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use libm::{exp, fabs, floor, log, pow, sin};
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::expr::{ExponentForm, Expr, IndepVar, JetVar, Symbol, Q};

const PI: f64 = core::f64::consts::PI;

// g = 7, n = 9 (Godfrey)
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / (sin(PI * x) * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + 7.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt_() * pow(t, x + 0.5) * exp(-t) * a
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + 7.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * log(2.0 * PI) + (x + 0.5) * log(t) - t + log(a)
}

trait Sqrt {
    fn sqrt_(self) -> f64;
}
impl Sqrt for f64 {
    fn sqrt_(self) -> f64 {
        libm::sqrt(self)
    }
}

/// Nodes and weights for `∫_{-1}^{1} (1−x)^a (1+x)^b f(x) dx`, by Newton
/// iteration on the Jacobi recurrence.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let nf = n as f64;
    let alfbet = a + b;
    let mut z = 0.0f64;
    for i in 0..n {
        if i == 0 {
            let an = a / nf;
            let bn = b / nf;
            let r1 = (1.0 + a) * (2.78 / (4.0 + nf * nf) + 0.768 * an / nf);
            let r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
            z = 1.0 - r1 / r2;
        } else if i == 1 {
            let r1 = (4.1 + a) / ((1.0 + a) * (1.0 + 0.156 * a));
            let r2 = 1.0 + 0.06 * (nf - 8.0) * (1.0 + 0.12 * a) / nf;
            let r3 = 1.0 + 0.012 * b * (1.0 + 0.25 * fabs(a)) / nf;
            z -= (1.0 - z) * r1 * r2 * r3;
        } else if i == 2 {
            let r1 = (1.67 + 0.28 * a) / (1.0 + 0.37 * a);
            let r2 = 1.0 + 0.22 * (nf - 8.0) / nf;
            let r3 = 1.0 + 8.0 * b / ((6.28 + b) * nf * nf);
            z -= (x[0] - z) * r1 * r2 * r3;
        } else if i == n - 2 {
            let r1 = (1.0 + 0.235 * b) / (0.766 + 0.119 * b);
            let r2 = 1.0 / (1.0 + 0.639 * (nf - 4.0) / (1.0 + 0.71 * (nf - 4.0)));
            let r3 = 1.0 / (1.0 + 20.0 * a / ((7.5 + a) * nf * nf));
            z += (z - x[n - 4]) * r1 * r2 * r3;
        } else if i == n - 1 {
            let r1 = (1.0 + 0.37 * b) / (1.67 + 0.28 * b);
            let r2 = 1.0 / (1.0 + 0.22 * (nf - 8.0) / nf);
            let r3 = 1.0 / (1.0 + 8.0 * a / ((6.28 + a) * nf * nf));
            z += (z - x[n - 3]) * r1 * r2 * r3;
        } else {
            z = 3.0 * x[i - 1] - 3.0 * x[i - 2] + x[i - 3];
        }
        let mut pp = 1.0;
        let mut p2 = 1.0;
        let mut temp = 2.0 + alfbet;
        for _ in 0..100 {
            temp = 2.0 + alfbet;
            let mut p1 = (a - b + temp * z) / 2.0;
            p2 = 1.0;
            for j in 2..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                temp = 2.0 * jf + alfbet;
                let aa = 2.0 * jf * (jf + alfbet) * (temp - 2.0);
                let bb = (temp - 1.0) * (a * a - b * b + temp * (temp - 2.0) * z);
                let c = 2.0 * (jf - 1.0 + a) * (jf - 1.0 + b) * temp;
                p1 = (bb * p2 - c * p3) / aa;
            }
            pp = (nf * (a - b - temp * z) * p1 + 2.0 * (nf + a) * (nf + b) * p2)
                / (temp * (1.0 - z * z));
            let z1 = z;
            z = z1 - p1 / pp;
            if fabs(z - z1) <= 1e-15 {
                break;
            }
        }
        x[i] = z;
        w[i] = exp(ln_gamma(a + nf) + ln_gamma(b + nf) - ln_gamma(nf + 1.0) - ln_gamma(nf + alfbet + 1.0))
            * temp
            * pow(2.0, alfbet)
            / (pp * p2);
    }
    (x, w)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    /// Difference between two resolutions.
    pub error: f64,
}

/// `∂_t^α Σ c_j t^{γ_j}` by Gauss–Jacobi on the Riemann–Liouville integral.
///
/// With `s = tσ` the integral is `t^{1−α+γ} ∫_0^1 (1−σ)^{−α} σ^γ dσ`. The
/// fractional part of γ goes into the Jacobi weight, the rest is sampled.
pub fn rl_power_sum(terms: &[(f64, f64)], alpha: f64, t: f64, nodes: usize) -> Result<OracleValue> {
    let mut hi = 0.0;
    let mut lo = 0.0;
    for &(c, g) in terms {
        if g <= -1.0 {
            return Err(Error::SingularInput(format!("t^{}", g)));
        }
        let frac = g - floor(g);
        let b = if g < 0.0 { g } else { frac };
        let rest = g - b;
        let integral = |n: usize| -> f64 {
            let (xs, ws) = gauss_jacobi(n, -alpha, b);
            let mut s = 0.0;
            for (x, w) in xs.iter().zip(&ws) {
                let sigma = 0.5 * (1.0 + x);
                s += w * pow(sigma, rest);
            }
            // dσ = dx/2, (1−σ)^{−α} σ^b = 2^{α−b} (1−x)^{−α} (1+x)^b
            s * pow(2.0, alpha - b) * 0.5
        };
        let k = 1.0 - alpha + g;
        let scale = c * k * pow(t, g - alpha) / gamma(1.0 - alpha);
        hi += scale * integral(nodes);
        lo += scale * integral(nodes / 2);
    }
    Ok(OracleValue { value: hi, error: fabs(hi - lo) })
}

fn gl_sum(f: &dyn Fn(f64) -> f64, alpha: f64, t: f64, n: usize) -> f64 {
    let h = t / n as f64;
    let mut w = 1.0;
    let mut s = f(t);
    for j in 1..=n {
        w *= 1.0 - (alpha + 1.0) / j as f64;
        s += w * f(t - j as f64 * h);
    }
    s * pow(h, -alpha)
}

/// Grünwald–Letnikov with one Richardson step; `n` is the fine step count.
pub fn rl_sampled(f: &dyn Fn(f64) -> f64, alpha: f64, t: f64, n: usize) -> OracleValue {
    let fine = gl_sum(f, alpha, t, n);
    let coarse = gl_sum(f, alpha, t, n / 2);
    let value = 2.0 * fine - coarse;
    OracleValue { value, error: fabs(value - fine) }
}

pub fn default_gl_steps() -> usize {
    1 << 12
}

/// Numeric values for evaluating expressions.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub params: BTreeMap<Symbol, f64>,
    pub vars: BTreeMap<IndepVar, f64>,
    pub jets: BTreeMap<JetVar, f64>,
}

fn qf(c: &Q) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

pub fn eval_exponent(e: &ExponentForm, env: &Env) -> core::result::Result<f64, String> {
    let mut v = qf(e.constant_part());
    for (s, c) in e.terms() {
        v += qf(c) * env.params.get(s).copied().ok_or_else(|| format!("unbound {}", s))?;
    }
    Ok(v)
}

pub fn eval(e: &Expr, env: &Env) -> core::result::Result<f64, String> {
    Ok(match e {
        Expr::Num(c) => qf(c),
        Expr::Param(s) => *env.params.get(s).ok_or_else(|| format!("unbound {}", s))?,
        Expr::Var(v) => *env.vars.get(v).ok_or_else(|| format!("unbound {:?}", v))?,
        Expr::Jet(j) => *env.jets.get(j).ok_or_else(|| format!("unbound {:?}", j))?,
        Expr::Gamma(z) => gamma(eval_exponent(z, env)?),
        Expr::Fn(f) => return Err(format!("cannot evaluate function {}", f.name)),
        Expr::Sum(ts) => {
            let mut s = 0.0;
            for t in ts {
                s += eval(t, env)?;
            }
            s
        }
        Expr::Product(fs) => {
            let mut p = 1.0;
            for f in fs {
                p *= eval(f, env)?;
            }
            p
        }
        Expr::Pow(b, ex) => pow(eval(b, env)?, eval_exponent(ex, env)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!(fabs(gamma(0.5) - PI.sqrt_()) < 1e-14);
        assert!(fabs(gamma(5.0) - 24.0) / 24.0 < 1e-14);
        assert!(fabs(gamma(2.5) - 1.329_340_388_179_137) < 1e-13);
        assert!(fabs(gamma(0.25) - 3.625_609_908_221_908) < 1e-13);
    }

    #[test]
    fn jacobi_integrates_weight() {
        // ∫ (1−x)^{-1/2} (1+x)^{1/2} dx = 2 B(1/2, 3/2) = π
        let (_, w) = gauss_jacobi(20, -0.5, 0.5);
        let s: f64 = w.iter().sum();
        assert!(fabs(s - PI) < 1e-12, "{}", s);
    }

    #[test]
    fn constant_half_order() {
        let v = rl_power_sum(&[(1.0, 0.0)], 0.5, 1.0, 64).unwrap();
        assert!(fabs(v.value - 0.564_189_583_5) < 1e-9);
        assert!(rl_power_sum(&[(1.0, -1.0)], 0.5, 1.0, 64).is_err());
    }
}
