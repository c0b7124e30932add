//! Jacobi theta series, the one-dimensional theta `ϑ(X;Y)` and the lattice theta `θ(s;z)`.
//!
//! Every infinite sum is truncated under a [`SeriesTruncation`] policy: terms are added until a
//! rigorous majorant of the discarded tail drops below `tail_tol`, or the index cap is hit, in
//! which case a [`Error::Truncation`] carrying the achieved bound is returned.
//!
//! Along the imaginary axis the lattice theta factorizes as `θ(s;iy) = ϑ₃(sy)·ϑ₃(s/y)`, see
//! [`theta2d_axis_product`].

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice modulus `z = x + iy` in the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

impl HalfPlanePoint {
    pub const I: HalfPlanePoint = HalfPlanePoint { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::domain(format!("non-finite modulus {x}+{y}i")));
        }
        if y <= 0.0 {
            return Err(Error::domain(format!("imaginary part must be positive, got {y}")));
        }
        Ok(HalfPlanePoint { x, y })
    }

    /// The point `iy` on the imaginary axis.
    pub fn on_axis(y: f64) -> Result<Self> {
        Self::new(0.0, y)
    }

    /// The hexagonal modulus `½ + i√3/2`.
    pub fn hexagonal() -> Self {
        HalfPlanePoint { x: 0.5, y: 0.75f64.sqrt() }
    }

    pub fn from_complex(w: Complex64) -> Result<Self> {
        Self::new(w.re, w.im)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn modulus(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// `(z+1)/2`, which stays in the upper half-plane.
    pub fn shifted_midpoint(&self) -> Self {
        HalfPlanePoint { x: 0.5 * (self.x + 1.0), y: 0.5 * self.y }
    }
}

impl fmt::Display for HalfPlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x.is_sign_negative() && self.x != 0.0 {
            write!(f, "{}+{}i", self.x, self.y)
        } else {
            write!(f, "{}+{}i", self.x.abs(), self.y)
        }
    }
}

/// Truncation policy shared by all series in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    /// Largest summation index `N` that may be used.
    pub max_index: usize,
    /// Target for the absolute tail bound.
    pub tail_tol: f64,
}

impl SeriesTruncation {
    pub const DEFAULT_MAX_INDEX: usize = 64;
    pub const DEFAULT_TAIL_TOL: f64 = 1e-13;

    pub fn new(max_index: usize, tail_tol: f64) -> Result<Self> {
        if max_index == 0 {
            return Err(Error::domain("max_index must be at least 1"));
        }
        if !(tail_tol > 0.0 && tail_tol.is_finite()) {
            return Err(Error::domain(format!("tail tolerance must be positive, got {tail_tol}")));
        }
        Ok(SeriesTruncation { max_index, tail_tol })
    }

    /// Same cap, different tolerance.
    pub fn with_tol(self, tail_tol: f64) -> Self {
        SeriesTruncation { tail_tol, ..self }
    }
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        SeriesTruncation { max_index: Self::DEFAULT_MAX_INDEX, tail_tol: Self::DEFAULT_TAIL_TOL }
    }
}

/// Which Jacobi theta: `ϑ₂(y) = Σ e^{−π(n−½)²y}`, `ϑ₃(y) = Σ e^{−πn²y}`, `ϑ₄(y) = Σ (−1)ⁿe^{−πn²y}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThetaKind {
    Two,
    Three,
    Four,
}

/// A value together with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub tail: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, tail: 0.0 }
    }
}

impl Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate { value: self.value + o.value, tail: self.tail + o.tail }
    }
}

impl Sub for Estimate {
    type Output = Estimate;
    fn sub(self, o: Estimate) -> Estimate {
        Estimate { value: self.value - o.value, tail: self.tail + o.tail }
    }
}

impl Neg for Estimate {
    type Output = Estimate;
    fn neg(self) -> Estimate {
        Estimate { value: -self.value, tail: self.tail }
    }
}

impl Mul for Estimate {
    type Output = Estimate;
    fn mul(self, o: Estimate) -> Estimate {
        Estimate {
            value: self.value * o.value,
            tail: self.value.abs() * o.tail + o.value.abs() * self.tail + self.tail * o.tail,
        }
    }
}

impl Mul<f64> for Estimate {
    type Output = Estimate;
    fn mul(self, c: f64) -> Estimate {
        Estimate { value: self.value * c, tail: self.tail * c.abs() }
    }
}

/// Series families with a closed-form tail majorant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SumKind {
    /// One-sided `Σ_{k>N} (k+shift)^degree · e^{−rate·(k+shift)²}` with `shift ∈ (−1, 1)`.
    Gaussian { rate: f64, degree: u32, shift: f64 },
    /// Both tails `|n| > N` of the `order`-th y-derivative of a Jacobi theta series.
    Jacobi { kind: ThetaKind, y: f64, order: u32 },
    /// Rows `|m| > N` of the row decomposition of `θ(s; x+iy)`.
    LatticeRows { s: f64, y: f64 },
}

/// Upper bound on the discarded tail of `sum` when the index is cut at `n`.
///
/// The bound is non-increasing in `n`: it adds the explicit majorant terms while consecutive
/// term ratios are still ≥ 1, then closes with a geometric series.
pub fn tail_bound(sum: SumKind, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("tail index must be at least 1"));
    }
    match sum {
        SumKind::Gaussian { rate, degree, shift } => gaussian_tail(rate, degree, shift, n),
        SumKind::Jacobi { kind, y, order } => {
            if !(y > 0.0) {
                return Err(Error::domain(format!("theta argument must be positive, got {y}")));
            }
            let shift = if kind == ThetaKind::Two { -0.5 } else { 0.0 };
            let g = gaussian_tail(PI * y, 2 * order, shift, n)?;
            Ok(2.0 * PI.powi(order as i32) * g)
        }
        SumKind::LatticeRows { s, y } => {
            if !(s > 0.0 && y > 0.0) {
                return Err(Error::domain("lattice rows need s > 0 and y > 0"));
            }
            let big_x = y / s;
            let inner = 1.0 + 2.0 / (PI * big_x).exp_m1();
            let g = gaussian_tail(s * PI * y, 0, 0.0, n)?;
            Ok((y / s).sqrt() * inner * 2.0 * g)
        }
    }
}

fn gaussian_tail(rate: f64, degree: u32, shift: f64, n: usize) -> Result<f64> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::domain(format!("decay rate must be positive, got {rate}")));
    }
    if !(shift > -1.0 && shift < 1.0) {
        return Err(Error::domain(format!("shift must lie in (-1, 1), got {shift}")));
    }
    let d = degree as i32;
    let term = |u: f64| u.powi(d) * (-rate * u * u).exp();
    let ratio = |u: f64| ((u + 1.0) / u).powi(d) * (-rate * (2.0 * u + 1.0)).exp();
    let mut u = n as f64 + 1.0 + shift;
    let mut acc = 0.0;
    loop {
        let r = ratio(u);
        if r < 1.0 {
            return Ok(acc + term(u) / (1.0 - r));
        }
        acc += term(u);
        u += 1.0;
    }
}

fn check_order(order: u32, max: u32) -> Result<()> {
    if order > max {
        return Err(Error::domain(format!("derivative order {order} exceeds {max}")));
    }
    Ok(())
}

/// Term-wise `order`-th derivative in `y` of a Jacobi theta.
pub fn jacobi_theta(kind: ThetaKind, y: f64, order: u32, trunc: SeriesTruncation) -> Result<f64> {
    jacobi_theta_estimate(kind, y, order, trunc).map(|e| e.value)
}

pub fn jacobi_theta_estimate(
    kind: ThetaKind,
    y: f64,
    order: u32,
    trunc: SeriesTruncation,
) -> Result<Estimate> {
    check_order(order, 4)?;
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::domain(format!("theta argument must be positive, got {y}")));
    }
    let o = order as i32;
    let mut sum = match kind {
        ThetaKind::Two => 0.0,
        _ if order == 0 => 1.0,
        _ => 0.0,
    };
    let mut tail = f64::INFINITY;
    for n in 1..=trunc.max_index {
        let k = match kind {
            ThetaKind::Two => n as f64 - 0.5,
            _ => n as f64,
        };
        let k2 = k * k;
        let mut t = 2.0 * (-PI * k2).powi(o) * (-PI * k2 * y).exp();
        if kind == ThetaKind::Four && n % 2 == 1 {
            t = -t;
        }
        sum += t;
        tail = tail_bound(SumKind::Jacobi { kind, y, order }, n)?;
        if tail <= trunc.tail_tol {
            return Ok(Estimate { value: sum, tail });
        }
    }
    Err(Error::Truncation { achieved: tail, max_index: trunc.max_index })
}

/// `ϑ(X;Y) = Σ e^{−πn²X} cos(2πnY)` or its `Y`-derivative.
///
/// The direct series is used for `X ≥ 1` and the Poisson form `X^{−½} Σ e^{−π(n−Y)²/X}` below,
/// so the effective decay rate is `π·max(X, 1/X)`.
pub fn theta1d(big_x: f64, big_y: f64, dy_order: u32, trunc: SeriesTruncation) -> Result<f64> {
    theta1d_estimate(big_x, big_y, dy_order, trunc).map(|e| e.value)
}

pub fn theta1d_estimate(
    big_x: f64,
    big_y: f64,
    dy_order: u32,
    trunc: SeriesTruncation,
) -> Result<Estimate> {
    if big_x >= 1.0 {
        theta1d_direct(big_x, big_y, dy_order, trunc)
    } else {
        theta1d_poisson(big_x, big_y, dy_order, trunc)
    }
}

fn check_theta1d_args(big_x: f64, big_y: f64, dy_order: u32) -> Result<()> {
    check_order(dy_order, 1)?;
    if !(big_x > 0.0 && big_x.is_finite()) {
        return Err(Error::domain(format!("X must be positive, got {big_x}")));
    }
    if !big_y.is_finite() {
        return Err(Error::domain("Y must be finite"));
    }
    Ok(())
}

/// Direct cosine series, valid for any `X > 0`.
pub fn theta1d_direct(
    big_x: f64,
    big_y: f64,
    dy_order: u32,
    trunc: SeriesTruncation,
) -> Result<Estimate> {
    check_theta1d_args(big_x, big_y, dy_order)?;
    let mut sum = if dy_order == 0 { 1.0 } else { 0.0 };
    let rate = PI * big_x;
    let scale = 2.0 * (2.0 * PI).powi(dy_order as i32);
    let mut tail = f64::INFINITY;
    for n in 1..=trunc.max_index {
        let nf = n as f64;
        let w = (-rate * nf * nf).exp();
        let phase = 2.0 * PI * nf * big_y;
        sum += if dy_order == 0 {
            2.0 * w * phase.cos()
        } else {
            -4.0 * PI * nf * w * phase.sin()
        };
        tail = scale * gaussian_tail(rate, dy_order, 0.0, n)?;
        if tail <= trunc.tail_tol {
            return Ok(Estimate { value: sum, tail });
        }
    }
    Err(Error::Truncation { achieved: tail, max_index: trunc.max_index })
}

/// Poisson-summed form, valid for any `X > 0`.
pub fn theta1d_poisson(
    big_x: f64,
    big_y: f64,
    dy_order: u32,
    trunc: SeriesTruncation,
) -> Result<Estimate> {
    check_theta1d_args(big_x, big_y, dy_order)?;
    let u = big_y - big_y.floor();
    let rate = PI / big_x;
    let pref = big_x.powf(-0.5);
    let term = |t: f64| {
        let g = (-rate * t * t).exp();
        if dy_order == 0 {
            g
        } else {
            2.0 * PI * t / big_x * g
        }
    };
    let mut sum = term(-u);
    let scale = pref * (2.0 * PI / big_x).powi(dy_order as i32);
    let mut tail = f64::INFINITY;
    for k in 1..=trunc.max_index {
        let kf = k as f64;
        sum += term(kf - u) + term(-(kf + u));
        let lo = gaussian_tail(rate, dy_order, -u, k)?;
        let hi = gaussian_tail(rate, dy_order, u, k)?;
        tail = scale * (lo + hi);
        if tail <= trunc.tail_tol {
            return Ok(Estimate { value: pref * sum, tail });
        }
    }
    Err(Error::Truncation { achieved: tail, max_index: trunc.max_index })
}

/// Jacobi triple product `Π (1−q²ⁿ)(1 + q⁴ⁿ⁻² + 2q²ⁿ⁻¹cos 2πY)` with `q = e^{−πX}`.
pub fn theta1d_product(big_x: f64, big_y: f64, trunc: SeriesTruncation) -> Result<Estimate> {
    check_theta1d_args(big_x, big_y, 0)?;
    let q = (-PI * big_x).exp();
    let c = (2.0 * PI * big_y).cos();
    let mut prod = 1.0;
    let mut tail = f64::INFINITY;
    for n in 1..=trunc.max_index {
        let q_odd = q.powi(2 * n as i32 - 1);
        prod *= (1.0 - q_odd * q) * (1.0 + q_odd * q_odd + 2.0 * q_odd * c);
        // every later factor differs from 1 by at most 7q^{2k−1}
        let s = 7.0 * q.powi(2 * n as i32 + 1) / (1.0 - q * q);
        tail = prod.abs() * s.exp_m1();
        if tail <= trunc.tail_tol {
            return Ok(Estimate { value: prod, tail });
        }
    }
    Err(Error::Truncation { achieved: tail, max_index: trunc.max_index })
}

/// `θ(s;z) = Σ_{m,n} exp(−sπ|mz+n|²/y)`.
///
/// The modulus is first moved into the standard fundamental domain (θ is invariant under the
/// full modular group and under `z ↦ −z̄`), then summed by rows:
/// `θ(s;z) = √(y/s) Σ_m e^{−sπym²} ϑ(y/s; mx)`.
pub fn theta2d(s: f64, z: HalfPlanePoint, trunc: SeriesTruncation) -> Result<f64> {
    theta2d_estimate(s, z, trunc).map(|e| e.value)
}

pub fn theta2d_estimate(s: f64, z: HalfPlanePoint, trunc: SeriesTruncation) -> Result<Estimate> {
    check_s(s)?;
    let w = crate::modular_domain::reduce_point(z)?;
    theta2d_rows(s, w, None, trunc)
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain(format!("s must be positive, got {s}")));
    }
    Ok(())
}

/// Row decomposition at `z` as given (no reduction), with an optional fixed row cut.
///
/// With `rows = Some(m)` exactly the rows `|row| ≤ m` are summed and the returned tail is
/// the [`SumKind::LatticeRows`] bound plus the accumulated inner truncation.
pub fn theta2d_rows(
    s: f64,
    z: HalfPlanePoint,
    rows: Option<usize>,
    trunc: SeriesTruncation,
) -> Result<Estimate> {
    check_s(s)?;
    let (x, y) = (z.x, z.y);
    let big_x = y / s;
    let rate = s * PI * y;
    let pref = big_x.sqrt();
    let weight_sum = 1.0 + 2.0 / rate.exp_m1();
    let inner = trunc.with_tol(0.25 * trunc.tail_tol / (pref * weight_sum));

    let first = theta1d_estimate(big_x, 0.0, 0, inner)?;
    let mut sum = first.value;
    let mut inner_tail = first.tail;
    let limit = rows.unwrap_or(trunc.max_index);
    let mut row_tail = f64::INFINITY;
    for m in 1..=limit {
        let mf = m as f64;
        let w = (-rate * mf * mf).exp();
        let th = theta1d_estimate(big_x, mf * x, 0, inner)?;
        sum += 2.0 * w * th.value;
        inner_tail += 2.0 * w * th.tail;
        row_tail = tail_bound(SumKind::LatticeRows { s, y }, m)?;
        if rows.is_none() && row_tail + pref * inner_tail <= trunc.tail_tol {
            break;
        }
    }
    let tail = row_tail + pref * inner_tail;
    if rows.is_none() && tail > trunc.tail_tol {
        return Err(Error::Truncation { achieved: tail, max_index: trunc.max_index });
    }
    Ok(Estimate { value: pref * sum, tail })
}

/// `θ(s;(z+1)/2)`, evaluated by feeding the midpoint-shifted modulus to [`theta2d`].
pub fn theta2d_shifted(s: f64, z: HalfPlanePoint, trunc: SeriesTruncation) -> Result<f64> {
    theta2d(s, z.shifted_midpoint(), trunc)
}

pub fn theta2d_shifted_estimate(
    s: f64,
    z: HalfPlanePoint,
    trunc: SeriesTruncation,
) -> Result<Estimate> {
    theta2d_estimate(s, z.shifted_midpoint(), trunc)
}

/// `θ(s;iy) = ϑ₃(sy)·ϑ₃(s/y)`.
pub fn theta2d_axis_product(s: f64, y: f64, trunc: SeriesTruncation) -> Result<f64> {
    check_s(s)?;
    let a = jacobi_theta(ThetaKind::Three, s * y, 0, trunc)?;
    let b = jacobi_theta(ThetaKind::Three, s / y, 0, trunc)?;
    Ok(a * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> SeriesTruncation {
        SeriesTruncation::default()
    }

    fn brute_theta(s: f64, x: f64, y: f64, n: i64) -> f64 {
        let mut acc = 0.0;
        for m in -n..=n {
            for k in -n..=n {
                let re = m as f64 * x + k as f64;
                let im = m as f64 * y;
                acc += (-s * PI * (re * re + im * im) / y).exp();
            }
        }
        acc
    }

    #[test]
    fn theta3_large_argument_is_one() {
        let v = jacobi_theta(ThetaKind::Three, 1e6, 0, t()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta2_equals_theta4_at_one() {
        let a = jacobi_theta(ThetaKind::Two, 1.0, 0, t()).unwrap();
        let b = jacobi_theta(ThetaKind::Four, 1.0, 0, t()).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn theta3_inversion_at_half() {
        let a = jacobi_theta(ThetaKind::Three, 0.5, 0, t()).unwrap();
        let b = jacobi_theta(ThetaKind::Three, 2.0, 0, t()).unwrap();
        assert!((a - 2f64.sqrt() * b).abs() < 1e-13);
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        let h = 1e-4;
        let f = |y| jacobi_theta(ThetaKind::Three, y, 0, t()).unwrap();
        let fd = (f(1.3 + h) - 2.0 * f(1.3) + f(1.3 - h)) / (h * h);
        let d2 = jacobi_theta(ThetaKind::Three, 1.3, 2, t()).unwrap();
        assert!(((fd - d2) / d2).abs() < 1e-6, "{fd} vs {d2}");
    }

    #[test]
    fn non_positive_argument_is_domain_error() {
        assert!(matches!(jacobi_theta(ThetaKind::Two, 0.0, 0, t()), Err(Error::Domain(_))));
        assert!(matches!(jacobi_theta(ThetaKind::Two, 1.0, 5, t()), Err(Error::Domain(_))));
    }

    #[test]
    fn tiny_cap_reports_truncation() {
        let tr = SeriesTruncation::new(2, 1e-13).unwrap();
        match jacobi_theta(ThetaKind::Three, 0.01, 0, tr) {
            Err(Error::Truncation { achieved, max_index }) => {
                assert_eq!(max_index, 2);
                assert!(achieved > 1e-13);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn theta1d_special_values() {
        let a = theta1d(2.0, 0.0, 0, t()).unwrap();
        let b = jacobi_theta(ThetaKind::Three, 2.0, 0, t()).unwrap();
        assert!((a - b).abs() < 1e-14);
        let c = theta1d(2.0, 0.5, 0, t()).unwrap();
        let d = jacobi_theta(ThetaKind::Four, 2.0, 0, t()).unwrap();
        assert!((c - d).abs() < 1e-14);
        let p = theta1d(0.7, 0.3, 0, t()).unwrap();
        assert!((p - theta1d(0.7, 1.3, 0, t()).unwrap()).abs() < 1e-12);
        assert!((p - theta1d(0.7, -0.3, 0, t()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn theta1d_derivative_matches_direct_sum() {
        let (x, y) = (0.5, 0.25);
        let mut brute = 0.0;
        for n in -60i32..=60 {
            let nf = n as f64;
            brute += -2.0 * PI * nf * (2.0 * PI * nf * y).sin() * (-PI * nf * nf * x).exp();
        }
        let v = theta1d(x, y, 1, t()).unwrap();
        assert!((v - brute).abs() < 1e-12, "{v} vs {brute}");
    }

    #[test]
    fn theta2d_spot_values() {
        let a = theta2d(1.0, HalfPlanePoint::I, t()).unwrap();
        assert!((a - 1.1803).abs() < 5e-5);
        let b = theta2d(1.0, HalfPlanePoint::hexagonal(), t()).unwrap();
        assert!((b - 1.1596).abs() < 5e-5);
        let half = theta2d(0.5, HalfPlanePoint::I, t()).unwrap();
        let two = theta2d(2.0, HalfPlanePoint::I, t()).unwrap();
        assert!((half - 2.0 * two).abs() < 1e-12);
    }

    #[test]
    fn theta2d_matches_naive_double_sum() {
        let z = HalfPlanePoint::new(0.2, 1.4).unwrap();
        let v = theta2d(1.0, z, t()).unwrap();
        let b = brute_theta(1.0, 0.2, 1.4, 40);
        assert!((v - b).abs() < 1e-10, "{v} vs {b}");
    }

    #[test]
    fn shifted_theta_properties() {
        let z = HalfPlanePoint::new(0.3, 1.2).unwrap();
        let z2 = HalfPlanePoint::new(2.3, 1.2).unwrap();
        let a = theta2d_shifted(1.0, z, t()).unwrap();
        let b = theta2d_shifted(1.0, z2, t()).unwrap();
        assert!((a - b).abs() < 1e-12);

        let v = theta2d_shifted(1.0, HalfPlanePoint::I, t()).unwrap();
        let brute = brute_theta(1.0, 0.5, 0.5, 40);
        assert!((v - brute).abs() < 1e-10);

        let y: f64 = 1.5;
        let lhs = theta2d_shifted(2.0, HalfPlanePoint::on_axis(y).unwrap(), t()).unwrap();
        let th = |k, a| jacobi_theta(k, a, 0, t()).unwrap();
        let rhs = y.sqrt() / 2.0
            * (th(ThetaKind::Three, 4.0 * y) * th(ThetaKind::Three, y / 4.0)
                + th(ThetaKind::Two, 4.0 * y) * th(ThetaKind::Four, y / 4.0));
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn axis_product_uses_reciprocal_argument() {
        for &(s, y) in &[(1.0, 1.3), (2.0, 0.7), (0.5, 2.4), (3.0, 1.0)] {
            let brute = brute_theta(s, 0.0, y, 40);
            let prod = theta2d_axis_product(s, y, t()).unwrap();
            assert!((brute - prod).abs() < 1e-10);
            let a = jacobi_theta(ThetaKind::Three, s * y, 0, t()).unwrap();
            let b = jacobi_theta(ThetaKind::Three, y / s, 0, t()).unwrap();
            if (s - 1.0f64).abs() > 0.1 {
                assert!((brute - a * b).abs() > 1e-6);
            }
        }
    }

    #[test]
    fn tail_bound_is_monotone_and_valid() {
        let k = SumKind::Jacobi { kind: ThetaKind::Three, y: 0.3, order: 2 };
        let mut prev = f64::INFINITY;
        for n in 1..40 {
            let b = tail_bound(k, n).unwrap();
            assert!(b <= prev);
            prev = b;
        }
        for n in 1..10usize {
            let y = 0.8;
            let b = tail_bound(SumKind::Jacobi { kind: ThetaKind::Three, y, order: 0 }, n).unwrap();
            let nf = n as f64;
            let maj = 2.0 * (-PI * nf * nf * y).exp() / (1.0 - (-PI * (2.0 * nf + 1.0) * y).exp());
            assert!(b <= maj);
        }
        let exact = brute_theta(1.0, 0.0, 1.0, 40);
        for n in 2..=10 {
            let e = theta2d_rows(1.0, HalfPlanePoint::I, Some(n), t()).unwrap();
            assert!((exact - e.value).abs() <= e.tail + 1e-15);
        }
    }

    #[test]
    fn representations_agree() {
        for i in 0..25 {
            let x = 0.2 + 4.8 * i as f64 / 24.0;
            for j in 0..10 {
                let y = j as f64 / 10.0;
                let d = theta1d_direct(x, y, 0, t()).unwrap();
                let p = theta1d_poisson(x, y, 0, t()).unwrap();
                let q = theta1d_product(x, y, t()).unwrap();
                assert!((d.value - p.value).abs() <= d.tail + p.tail + 1e-13);
                assert!((d.value - q.value).abs() <= d.tail + q.tail + 1e-13);
            }
        }
    }
}
