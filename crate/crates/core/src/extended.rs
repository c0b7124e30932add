//! Extended-precision evaluation of the thresholds `ρ₁`, `ρ₂`, `α₁`, `α₂`.
//!
//! Every building block is `√y·f(ay)·g(by)` with Jacobi thetas `f`, `g`, so the second
//! derivative at `y = 1` needs only `ϑ^{(j)}(t) = Σ (−πk²)^j e^{−πk²t}`, `j ≤ 2`, at
//! `t ∈ {¼, ½, 1, 2, 4}`.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta_kernel::ThetaKind;

const RM: RoundingMode = RoundingMode::ToEven;

struct Ctx {
    p: usize,
    cc: Consts,
}

impl Ctx {
    fn new(bits: usize) -> Result<Self> {
        let cc = Consts::new().map_err(|e| Error::domain(format!("constants cache: {e:?}")))?;
        Ok(Ctx { p: bits + 64, cc })
    }

    fn int(&self, v: i64) -> BigFloat {
        BigFloat::from_i64(v, self.p)
    }

    fn ratio(&self, n: i64, d: i64) -> BigFloat {
        self.int(n).div(&self.int(d), self.p, RM)
    }

    fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, RM, &mut self.cc)
    }

    /// `[ϑ(t), ϑ′(t), ϑ″(t)]` summed until the terms drop below `2^{−p}`.
    fn jacobi(&mut self, kind: ThetaKind, t: &BigFloat, tf: f64) -> [BigFloat; 3] {
        let pi = self.pi();
        let mut out = [self.int(0), self.int(0), self.int(0)];
        if kind != ThetaKind::Two {
            out[0] = self.int(1);
        }
        // k runs over positive integers (ϑ₃, ϑ₄) or positive half-integers (ϑ₂), doubled
        let stop = self.p as f64 * std::f64::consts::LN_2 + 10.0;
        let mut k = 1i64;
        loop {
            let kk = if kind == ThetaKind::Two { self.ratio((2 * k - 1) * (2 * k - 1), 4) } else { self.int(k * k) };
            let kf = if kind == ThetaKind::Two { (k as f64 - 0.5).powi(2) } else { (k * k) as f64 };
            if std::f64::consts::PI * kf * tf > stop {
                break;
            }
            let pk = self.mul(&pi, &kk);
            let arg = self.mul(&pk, t).neg();
            let e = self.exp(&arg);
            let mut term = self.mul(&self.int(2), &e);
            if kind == ThetaKind::Four && k % 2 == 1 {
                term = term.neg();
            }
            let d1 = self.mul(&term, &pk.neg());
            let d2 = self.mul(&d1, &pk.neg());
            out[0] = self.add(&out[0], &term);
            out[1] = self.add(&out[1], &d1);
            out[2] = self.add(&out[2], &d2);
            k += 1;
        }
        out
    }

    /// Second derivative at `y = 1` of `√y·f(ay)·g(by)`.
    fn block_d2(&mut self, f: (ThetaKind, (i64, i64)), g: (ThetaKind, (i64, i64))) -> BigFloat {
        let a = self.ratio(f.1 .0, f.1 .1);
        let b = self.ratio(g.1 .0, g.1 .1);
        let fv = self.jacobi(f.0, &a, f.1 .0 as f64 / f.1 .1 as f64);
        let gv = self.jacobi(g.0, &b, g.1 .0 as f64 / g.1 .1 as f64);
        // derivatives of y ↦ f(ay) at y = 1 pick up powers of a
        let fs = [fv[0].clone(), self.mul(&fv[1], &a), self.mul(&self.mul(&fv[2], &a), &a)];
        let gs = [gv[0].clone(), self.mul(&gv[1], &b), self.mul(&self.mul(&gv[2], &b), &b)];
        // (fg)'' and (fg)'
        let two = self.int(2);
        let fg0 = self.mul(&fs[0], &gs[0]);
        let fg1 = self.add(&self.mul(&fs[1], &gs[0]), &self.mul(&fs[0], &gs[1]));
        let cross = self.mul(&two, &self.mul(&fs[1], &gs[1]));
        let fg2 = self.add(&self.add(&self.mul(&fs[2], &gs[0]), &cross), &self.mul(&fs[0], &gs[2]));
        // (√y·F)″ at 1 is −¼F + F′ + F″
        let quarter = self.ratio(-1, 4);
        self.add(&self.add(&self.mul(&quarter, &fg0), &fg1), &fg2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedThresholds {
    pub digits: usize,
    pub rho1: String,
    pub rho2: String,
    pub sigma1b: String,
    pub sigma2b: String,
    pub alpha1: String,
    pub alpha2: String,
}

impl ExtendedThresholds {
    pub fn rows(&self) -> [(&'static str, &str); 6] {
        [
            ("rho1", &self.rho1),
            ("rho2", &self.rho2),
            ("sigma1b", &self.sigma1b),
            ("sigma2b", &self.sigma2b),
            ("alpha1", &self.alpha1),
            ("alpha2", &self.alpha2),
        ]
    }
}

fn decimal(v: &BigFloat, digits: usize, cc: &mut Consts) -> Result<String> {
    let s = v
        .format(Radix::Dec, RM, cc)
        .map_err(|e| Error::domain(format!("formatting failed: {e:?}")))?;
    // astro-float prints `d.ddddde±x`; rescale to a plain decimal with `digits` significant digits
    let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
    let exp: i32 = exp.parse().map_err(|_| Error::Parse(format!("exponent in {s}")))?;
    let neg = mant.starts_with('-');
    let body: String = mant.chars().filter(|c| c.is_ascii_digit()).take(digits).collect();
    let point = exp + 1;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-point) as usize));
        out.push_str(&body);
    } else if (point as usize) < body.len() {
        out.push_str(&body[..point as usize]);
        out.push('.');
        out.push_str(&body[point as usize..]);
    } else {
        out.push_str(&body);
        out.push_str(&"0".repeat(point as usize - body.len()));
    }
    Ok(out)
}

/// Thresholds to `digits` significant decimal digits (at least 20).
pub fn thresholds_extended(digits: usize) -> Result<ExtendedThresholds> {
    let digits = digits.max(20);
    let bits = (digits as f64 * 3.33).ceil() as usize + 32;
    let mut c = Ctx::new(bits)?;
    use ThetaKind::*;
    let x2 = c.block_d2((Three, (1, 1)), (Three, (1, 1)));
    let y2a = c.block_d2((Three, (4, 1)), (Three, (1, 4)));
    let y2b = c.block_d2((Two, (4, 1)), (Four, (1, 4)));
    let y2 = c.add(&y2a, &y2b);
    let a2 = c.block_d2((Three, (2, 1)), (Three, (1, 2)));
    let b2 = c.block_d2((Two, (2, 1)), (Four, (1, 2)));

    let one = c.int(1);
    let two = c.int(2);
    let rho1 = c.div(&y2, &c.mul(&two, &x2)).neg();
    let rho2 = c.add(&one, &c.div(&b2, &a2)).neg();
    let sigma1b = c.div(&one, &rho2);
    let sigma2b = c.div(&one, &rho1);
    let alpha1 = c.div(&one, &c.add(&one, &c.mul(&two, &sigma1b)));
    let alpha2 = c.div(&one, &c.add(&one, &c.mul(&two, &rho1)));
    let mut f = |v: &BigFloat| decimal(v, digits, &mut c.cc);
    Ok(ExtendedThresholds {
        digits,
        rho1: f(&rho1)?,
        rho2: f(&rho2)?,
        sigma1b: f(&sigma1b)?,
        sigma2b: f(&sigma2b)?,
        alpha1: f(&alpha1)?,
        alpha2: f(&alpha2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::competing_functionals::thresholds;

    #[test]
    fn agrees_with_double_precision() {
        let ext = thresholds_extended(32).unwrap();
        let th = thresholds();
        let rho1: f64 = ext.rho1.parse().unwrap();
        let rho2: f64 = ext.rho2.parse().unwrap();
        assert!((rho1 - th.rho1).abs() < 1e-14, "{} vs {}", ext.rho1, th.rho1);
        assert!((rho2 - th.rho2).abs() < 1e-13, "{} vs {}", ext.rho2, th.rho2);
        assert_eq!(ext.rho1.trim_start_matches("0.").trim_start_matches('0').len(), 32);
    }

    #[test]
    fn frozen_reference_digits() {
        // 30-digit values from an independent mpmath evaluation of the same formulas
        let ext = thresholds_extended(30).unwrap();
        assert!(ext.rho1.starts_with("0.04016114454776267518045660"), "{}", ext.rho1);
        assert!(ext.rho2.starts_with("1.190889412926888925826191"), "{}", ext.rho2);
        assert!(ext.sigma2b.starts_with("24.89968877283176661085378"), "{}", ext.sigma2b);
        assert!(ext.alpha1.starts_with("0.3732155079089778259600688"), "{}", ext.alpha1);
        assert!(ext.alpha2.starts_with("0.9256496974039355290428667"), "{}", ext.alpha2);
    }

    #[test]
    fn decimal_formatting() {
        let mut cc = Consts::new().unwrap();
        let v = BigFloat::from_f64(-0.00125, 128);
        assert_eq!(decimal(&v, 3, &mut cc).unwrap(), "-0.00125");
        let v = BigFloat::from_f64(1234.5, 128);
        assert_eq!(decimal(&v, 5, &mut cc).unwrap(), "1234.5");
    }
}
