//! The competing functionals `W₁,ρ`, `W₂,ρ`, their axis building blocks and their minimizers.
//!
//! On the imaginary axis
//! `W₁,ρ(iy) = Y(y)/2 + ρX(y)` and `√2·W₂,ρ(iy) = A(y) + B(y) + ρA(y)` with
//!
//! ```text
//! X(y) = √y ϑ₃(y)²
//! Y(y) = √y (ϑ₃(4y)ϑ₃(y/4) + ϑ₂(4y)ϑ₄(y/4))
//! A(y) = √y ϑ₃(2y)ϑ₃(y/2)
//! B(y) = √y ϑ₂(2y)ϑ₄(y/2)
//! ```
//!
//! The thresholds are the values of `ρ` at which `y = 1` stops being a local maximum of the
//! axis restriction: `ρ₁ = −Y″(1)/(2X″(1))` and `ρ₂ = −1 − B″(1)/A″(1)`.

use std::f64::consts::SQRT_2;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular_domain::{cayley, Branch};
use crate::theta_kernel::{
    jacobi_theta_estimate, theta2d, theta2d_shifted, Estimate, HalfPlanePoint, SeriesTruncation,
    ThetaKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionalKind {
    W1,
    W2,
}

impl FunctionalKind {
    /// The partner functional under the Cayley duality.
    pub fn dual(self) -> Self {
        match self {
            FunctionalKind::W1 => FunctionalKind::W2,
            FunctionalKind::W2 => FunctionalKind::W1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum XYABKind {
    X,
    Y,
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub rho1: f64,
    pub rho2: f64,
    pub sigma1a: f64,
    pub sigma1b: f64,
    pub sigma2a: f64,
    pub sigma2b: f64,
}

impl Thresholds {
    fn from_rhos(rho1: f64, rho2: f64) -> Self {
        Thresholds {
            rho1,
            rho2,
            sigma1a: rho1,
            sigma1b: 1.0 / rho2,
            sigma2a: rho2,
            sigma2b: 1.0 / rho1,
        }
    }

    /// Upper end of the existence window of `solve_y_branch`.
    pub fn window(&self, kind: FunctionalKind) -> f64 {
        match kind {
            FunctionalKind::W1 => self.rho1,
            FunctionalKind::W2 => self.rho2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub rho: f64,
    pub z: HalfPlanePoint,
    pub branch: Branch,
}

/// Products `√y · ϑ_p(a·y) · ϑ_q(b·y)` whose sum gives each building block.
pub(crate) fn factors(which: XYABKind) -> &'static [((ThetaKind, f64), (ThetaKind, f64))] {
    use ThetaKind::*;
    match which {
        XYABKind::X => &[((Three, 1.0), (Three, 1.0))],
        XYABKind::Y => &[((Three, 4.0), (Three, 0.25)), ((Two, 4.0), (Four, 0.25))],
        XYABKind::A => &[((Three, 2.0), (Three, 0.5))],
        XYABKind::B => &[((Two, 2.0), (Four, 0.5))],
    }
}

/// `d^k/dy^k √y`
pub(crate) fn sqrt_derivative(y: f64, k: u32) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        c *= 0.5 - j as f64;
    }
    c * y.powf(0.5 - k as f64)
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Value or `order`-th derivative of `X`, `Y`, `A` or `B`.
pub fn xyab(which: XYABKind, y: f64, order: u32, trunc: SeriesTruncation) -> Result<f64> {
    xyab_estimate(which, y, order, trunc).map(|e| e.value)
}

pub fn xyab_estimate(
    which: XYABKind,
    y: f64,
    order: u32,
    trunc: SeriesTruncation,
) -> Result<Estimate> {
    if order > 4 {
        return Err(Error::domain(format!("derivative order {order} exceeds 4")));
    }
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::domain(format!("y must be positive, got {y}")));
    }
    let scaled = |kind: ThetaKind, a: f64| -> Result<Vec<Estimate>> {
        (0..=order)
            .map(|j| jacobi_theta_estimate(kind, a * y, j, trunc).map(|e| e * a.powi(j as i32)))
            .collect()
    };
    let mut total = Estimate::exact(0.0);
    for &((k1, a1), (k2, a2)) in factors(which) {
        let f = scaled(k1, a1)?;
        let g = scaled(k2, a2)?;
        for i in 0..=order {
            let h = sqrt_derivative(y, i);
            for j in 0..=order - i {
                let l = order - i - j;
                let c = binomial(order, i) * binomial(order - i, j);
                total = total + (f[j as usize] * g[l as usize]) * (c * h);
            }
        }
    }
    Ok(total)
}

/// Thresholds with the default truncation, computed once.
pub fn thresholds() -> Thresholds {
    static CELL: OnceLock<Thresholds> = OnceLock::new();
    *CELL.get_or_init(|| {
        thresholds_with(SeriesTruncation::default().with_tol(1e-16))
            .expect("thresholds at y = 1 are well inside the series domain")
    })
}

pub fn thresholds_with(trunc: SeriesTruncation) -> Result<Thresholds> {
    let d2 = |w| xyab(w, 1.0, 2, trunc);
    let rho1 = -d2(XYABKind::Y)? / (2.0 * d2(XYABKind::X)?);
    let rho2 = -1.0 - d2(XYABKind::B)? / d2(XYABKind::A)?;
    Ok(Thresholds::from_rhos(rho1, rho2))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::domain(format!("rho must be finite and non-negative, got {rho}")));
    }
    Ok(())
}

/// `W₁,ρ(z) = θ(2;(z+1)/2) + ρθ(1;z)` or `W₂,ρ(z) = θ(1;(z+1)/2) + ρθ(2;z)`.
pub fn w_eval(kind: FunctionalKind, rho: f64, z: HalfPlanePoint, trunc: SeriesTruncation) -> Result<f64> {
    check_rho(rho)?;
    Ok(match kind {
        FunctionalKind::W1 => theta2d_shifted(2.0, z, trunc)? + rho * theta2d(1.0, z, trunc)?,
        FunctionalKind::W2 => theta2d_shifted(1.0, z, trunc)? + rho * theta2d(2.0, z, trunc)?,
    })
}

/// `order`-th y-derivative of `W(iy)` through the axis building blocks.
pub fn w_axis(kind: FunctionalKind, rho: f64, y: f64, order: u32, trunc: SeriesTruncation) -> Result<f64> {
    check_rho(rho)?;
    Ok(match kind {
        FunctionalKind::W1 => {
            0.5 * xyab(XYABKind::Y, y, order, trunc)? + rho * xyab(XYABKind::X, y, order, trunc)?
        }
        FunctionalKind::W2 => {
            let a = xyab(XYABKind::A, y, order, trunc)?;
            let b = xyab(XYABKind::B, y, order, trunc)?;
            ((1.0 + rho) * a + b) / SQRT_2
        }
    })
}

/// The quotient whose level sets give the axis critical points: `Y′/(2X′)` for `W1` and
/// `1 + B′/A′` for `W2`. At `y = 1` both derivatives vanish and the second-derivative ratio is
/// used instead.
pub fn branch_quotient(kind: FunctionalKind, y: f64, trunc: SeriesTruncation) -> Result<f64> {
    let order = if (y - 1.0).abs() < 1e-7 { 2 } else { 1 };
    Ok(match kind {
        FunctionalKind::W1 => {
            xyab(XYABKind::Y, y, order, trunc)? / (2.0 * xyab(XYABKind::X, y, order, trunc)?)
        }
        FunctionalKind::W2 => {
            1.0 + xyab(XYABKind::B, y, order, trunc)? / xyab(XYABKind::A, y, order, trunc)?
        }
    })
}

/// Bisection down to `width`, then secant polish inside the bracket until `|f| ≤ residual`.
pub(crate) fn bracketed_root<F>(mut f: F, lo: f64, hi: f64, width: f64, residual: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot(format!("no sign change on [{lo}, {hi}]")));
    }
    while b - a > width {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let (mut x0, mut f0, mut x1, mut f1) = (a, fa, b, fb);
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for _ in 0..60 {
        if best.1.abs() <= residual || f1 == f0 {
            break;
        }
        let mut x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !(x2 > a && x2 < b) {
            x2 = 0.5 * (a + b);
        }
        let f2 = f(x2)?;
        if f2.signum() == fa.signum() {
            a = x2;
            fa = f2;
        } else {
            b = x2;
        }
        if f2.abs() < best.1.abs() {
            best = (x2, f2);
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    Ok(best.0)
}

pub const BRANCH_LO: f64 = 1.0 + 1e-9;

/// Root in `(1, √3]` of `Y′/(2X′) + c = 0` (W1) or `1 + B′/A′ + c = 0` (W2).
pub fn solve_y_branch(kind: FunctionalKind, c: f64) -> Result<f64> {
    let th = thresholds();
    let window = th.window(kind);
    if !(c >= 0.0 && c < window) {
        return Err(Error::NoRoot(format!(
            "c = {c} outside [0, {window}); the minimizer is the corner i"
        )));
    }
    let trunc = SeriesTruncation::default().with_tol(1e-16);
    let hi = 3f64.sqrt();
    let f = |y: f64| branch_quotient(kind, y, trunc).map(|q| q + c);
    if f(hi)?.abs() <= 1e-12 {
        return Ok(hi);
    }
    bracketed_root(f, BRANCH_LO, hi, 1e-6, 1e-12)
}

/// The exact minimizer of `W_kind,ρ` on the curve `Ωₑ`.
pub fn minimizer(kind: FunctionalKind, rho: f64) -> Result<TrajectoryPoint> {
    check_rho(rho)?;
    let th = thresholds();
    let (lo, hi) = match kind {
        FunctionalKind::W1 => (th.rho1, th.sigma1b),
        FunctionalKind::W2 => (th.rho2, th.sigma2b),
    };
    let (z, branch) = if rho < lo {
        let y = solve_y_branch(kind, rho)?;
        (HalfPlanePoint::on_axis(y)?, Branch::Segment)
    } else if rho <= hi {
        (HalfPlanePoint::I, Branch::Corner)
    } else {
        let y = solve_y_branch(kind.dual(), 1.0 / rho)?;
        (cayley(HalfPlanePoint::on_axis(y)?), Branch::Arc)
    };
    Ok(TrajectoryPoint { rho, z, branch })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuotientKind {
    /// `Z = Y′/X′`
    ZofXY,
    /// `C = B′/A′`
    CofAB,
}

impl QuotientKind {
    fn parts(self) -> (XYABKind, XYABKind) {
        match self {
            QuotientKind::ZofXY => (XYABKind::Y, XYABKind::X),
            QuotientKind::CofAB => (XYABKind::B, XYABKind::A),
        }
    }
}

/// `Y′/X′` or `B′/A′`, with the second-derivative ratio at `y = 1`.
pub fn quotient(kind: QuotientKind, y: f64, trunc: SeriesTruncation) -> Result<f64> {
    let (num, den) = kind.parts();
    let order = if (y - 1.0).abs() < 1e-7 { 2 } else { 1 };
    Ok(xyab(num, y, order, trunc)? / xyab(den, y, order, trunc)?)
}

/// Derivative of the quotient by the quotient rule; its removable value at `y = 1` is zero
/// because the quotient is invariant under `y ↦ 1/y`.
pub fn quotient_derivative(kind: QuotientKind, y: f64, trunc: SeriesTruncation) -> Result<f64> {
    if (y - 1.0).abs() < 1e-6 {
        return Ok(0.0);
    }
    let (num, den) = kind.parts();
    let n1 = xyab(num, y, 1, trunc)?;
    let n2 = xyab(num, y, 2, trunc)?;
    let d1 = xyab(den, y, 1, trunc)?;
    let d2 = xyab(den, y, 2, trunc)?;
    Ok((n2 * d1 - n1 * d2) / (d1 * d1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientScan {
    pub kind: QuotientKind,
    pub ys: Vec<f64>,
    pub derivative: Vec<f64>,
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl QuotientScan {
    pub fn all_positive(&self) -> bool {
        self.positive == self.ys.len()
    }

    pub fn all_negative(&self) -> bool {
        self.negative == self.ys.len()
    }
}

pub fn quotient_scan(
    kind: QuotientKind,
    y_lo: f64,
    y_hi: f64,
    n: usize,
    trunc: SeriesTruncation,
) -> Result<QuotientScan> {
    if !(y_lo > 0.0 && y_lo < y_hi) || n < 2 {
        return Err(Error::domain("scan needs 0 < lo < hi and n ≥ 2"));
    }
    let ys: Vec<f64> = (0..n).map(|i| y_lo + (y_hi - y_lo) * i as f64 / (n - 1) as f64).collect();
    let derivative = ys
        .iter()
        .map(|&y| quotient_derivative(kind, y, trunc))
        .collect::<Result<Vec<_>>>()?;
    let positive = derivative.iter().filter(|v| **v > 0.0).count();
    let negative = derivative.iter().filter(|v| **v < 0.0).count();
    let zero = derivative.len() - positive - negative;
    Ok(QuotientScan { kind, ys, derivative, positive, negative, zero })
}

/// Number of sign changes of `∂_y W(iy)` on an `n`-point grid of `[lo, hi]`.
pub fn axis_sign_changes(
    kind: FunctionalKind,
    rho: f64,
    lo: f64,
    hi: f64,
    n: usize,
    trunc: SeriesTruncation,
) -> Result<usize> {
    let mut prev = 0.0f64;
    let mut changes = 0;
    for i in 0..n {
        let y = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let d = w_axis(kind, rho, y, 1, trunc)?;
        if d != 0.0 {
            if prev != 0.0 && d.signum() != prev.signum() {
                changes += 1;
            }
            prev = d;
        }
    }
    Ok(changes)
}

/// Exact corner value `W(i)`, handy for reports.
pub fn corner_value(kind: FunctionalKind, rho: f64) -> Result<f64> {
    w_axis(kind, rho, 1.0, 0, SeriesTruncation::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular_domain::{on_trajectory, DEFAULT_TRAJECTORY_TOL};
    use crate::theta_kernel::theta2d_shifted;

    fn t() -> SeriesTruncation {
        SeriesTruncation::default()
    }

    #[test]
    fn x_is_symmetric_and_matches_theta() {
        let a = xyab(XYABKind::X, 1.7, 0, t()).unwrap();
        let b = xyab(XYABKind::X, 1.0 / 1.7, 0, t()).unwrap();
        assert!((a - b).abs() < 1e-12);
        let z = HalfPlanePoint::on_axis(1.3).unwrap();
        let x = xyab(XYABKind::X, 1.3, 0, t()).unwrap();
        assert!((x - theta2d(1.0, z, t()).unwrap()).abs() < 1e-10);
        let y = xyab(XYABKind::Y, 1.3, 0, t()).unwrap();
        assert!((y - 2.0 * theta2d_shifted(2.0, z, t()).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for w in [XYABKind::X, XYABKind::Y, XYABKind::A, XYABKind::B] {
            for order in 1..=4u32 {
                let y0 = 1.2;
                let f = |y| xyab(w, y, order - 1, t()).unwrap();
                let fd = (f(y0 + h) - f(y0 - h)) / (2.0 * h);
                let d = xyab(w, y0, order, t()).unwrap();
                let scale = d.abs().max(1e-3);
                assert!(((fd - d) / scale).abs() < 1e-6, "{w:?} order {order}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn threshold_relations() {
        let th = thresholds();
        assert_eq!(th.sigma1a, th.rho1);
        assert!((th.sigma2b * th.rho1 - 1.0).abs() < 1e-12);
        assert!((th.sigma1b * th.rho2 - 1.0).abs() < 1e-12);
        assert!(th.rho1 < th.sigma1b && th.sigma1b < th.rho2 && th.rho2 < th.sigma2b);
    }

    #[test]
    fn axis_values_match_lattice_thetas() {
        for &y in &[0.8, 1.0, 1.3, 2.1] {
            let z = HalfPlanePoint::on_axis(y).unwrap();
            for kind in [FunctionalKind::W1, FunctionalKind::W2] {
                for &rho in &[0.0, 0.3, 4.0] {
                    let a = w_eval(kind, rho, z, t()).unwrap();
                    let b = w_axis(kind, rho, y, 0, t()).unwrap();
                    assert!((a - b).abs() < 1e-10, "{kind:?} {rho} {y}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn branch_endpoints() {
        let s3 = 3f64.sqrt();
        assert!((solve_y_branch(FunctionalKind::W1, 0.0).unwrap() - s3).abs() < 1e-10);
        assert!((solve_y_branch(FunctionalKind::W2, 0.0).unwrap() - s3).abs() < 1e-10);
        let th = thresholds();
        let near = solve_y_branch(FunctionalKind::W1, th.rho1 * (1.0 - 1e-6)).unwrap();
        assert!(near - 1.0 < 5e-3, "{near}");
        assert!(matches!(solve_y_branch(FunctionalKind::W1, th.rho1), Err(Error::NoRoot(_))));
    }

    #[test]
    fn branch_root_matches_dense_scan() {
        let c = 0.02;
        let root = solve_y_branch(FunctionalKind::W1, c).unwrap();
        let tr = t().with_tol(1e-16);
        let n = 1_000_000usize;
        let (lo, hi) = (BRANCH_LO, 3f64.sqrt());
        let step = (hi - lo) / n as f64;
        // sign changes only once; bisect the grid index rather than evaluating every point
        let g = |i: usize| branch_quotient(FunctionalKind::W1, lo + step * i as f64, tr).unwrap() + c;
        let (mut a, mut b) = (0usize, n);
        assert!(g(a) < 0.0 && g(b) > 0.0);
        while b - a > 1 {
            let m = (a + b) / 2;
            if g(m) < 0.0 {
                a = m
            } else {
                b = m
            }
        }
        let (ya, yb) = (lo + step * a as f64, lo + step * b as f64);
        assert!(root >= ya - 1e-12 && root <= yb + 1e-12, "{root} not in [{ya}, {yb}]");
    }

    #[test]
    fn minimizer_table() {
        let p = minimizer(FunctionalKind::W1, 0.4).unwrap();
        assert_eq!(p.branch, Branch::Corner);
        assert_eq!(p.z, HalfPlanePoint::I);
        let p = minimizer(FunctionalKind::W1, 0.0).unwrap();
        assert_eq!(p.branch, Branch::Segment);
        assert!((p.z.y() - 3f64.sqrt()).abs() < 1e-10);
        let p = minimizer(FunctionalKind::W1, 1e3).unwrap();
        assert_eq!(p.branch, Branch::Arc);
        assert!((p.z.modulus() - 1.0).abs() < 1e-12);
        assert!(p.z.x() < 0.5 && p.z.x() > 0.49);
        for kind in [FunctionalKind::W1, FunctionalKind::W2] {
            for &rho in &[0.0, 0.01, 0.03, 0.5, 1.0, 1.5, 10.0, 30.0, 200.0] {
                let p = minimizer(kind, rho).unwrap();
                assert_eq!(on_trajectory(p.z, DEFAULT_TRAJECTORY_TOL), Some(p.branch), "{kind:?} {rho}");
            }
        }
    }

    #[test]
    fn quotient_scans() {
        let s = quotient_scan(QuotientKind::ZofXY, 1.01, 5.0, 500, t()).unwrap();
        assert!(s.all_positive());
        let s = quotient_scan(QuotientKind::CofAB, 0.2, 0.99, 500, t()).unwrap();
        assert!(s.all_negative());
        for &y in &[0.4, 0.77, 1.6, 2.5] {
            for k in [QuotientKind::ZofXY, QuotientKind::CofAB] {
                let a = quotient(k, y, t()).unwrap();
                let b = quotient(k, 1.0 / y, t()).unwrap();
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn axis_census_counts() {
        let th = thresholds();
        let tr = t();
        let n = 20_000;
        let below = axis_sign_changes(FunctionalKind::W1, th.rho1 * 0.9, 0.3, 3.5, n, tr).unwrap();
        let above = axis_sign_changes(FunctionalKind::W1, th.rho1 * 1.1, 0.3, 3.5, n, tr).unwrap();
        assert_eq!((below, above), (3, 1));
        let below = axis_sign_changes(FunctionalKind::W2, th.rho2 * 0.9, 0.3, 3.5, n, tr).unwrap();
        let above = axis_sign_changes(FunctionalKind::W2, th.rho2 * 1.1, 0.3, 3.5, n, tr).unwrap();
        assert_eq!((below, above), (3, 1));
    }
}
