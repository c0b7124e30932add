//! The Mueller-Ho two-component energy `E(z;a,b) = θ(1;z) + αJ(z;a,b)` with
//! `J(z;a,b) = Σ e^{−π|mz−n|²/y} cos(2π(ma+nb))`.

use std::f64::consts::{FRAC_PI_3, PI};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::competing_functionals::{bracketed_root, minimizer, thresholds, FunctionalKind};
use crate::error::{Error, Result};
use crate::modular_domain::Branch;
use crate::theta_kernel::{
    jacobi_theta, theta2d, Estimate, HalfPlanePoint, SeriesTruncation, ThetaKind,
};

/// Relative displacement `(a,b)` of the two lattices, reduced to `[0,1)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Displacement {
    a: f64,
    b: f64,
}

fn unit_mod(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl Displacement {
    pub const W0: Displacement = Displacement { a: 0.0, b: 0.0 };
    pub const W1: Displacement = Displacement { a: 0.5, b: 0.0 };
    pub const W2: Displacement = Displacement { a: 0.0, b: 0.5 };
    pub const W3: Displacement = Displacement { a: 0.5, b: 0.5 };
    pub const THIRDS: Displacement = Displacement { a: 1.0 / 3.0, b: 1.0 / 3.0 };

    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain(format!("displacement must be finite, got ({a}, {b})")));
        }
        Ok(Displacement { a: unit_mod(a), b: unit_mod(b) })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn universal() -> [Displacement; 4] {
        [Self::W0, Self::W1, Self::W2, Self::W3]
    }

    /// Image under `(a,b) ↦ (1−a,1−b)`.
    pub fn mirrored(&self) -> Displacement {
        Displacement { a: unit_mod(1.0 - self.a), b: unit_mod(1.0 - self.b) }
    }

    /// Distance on the flat torus.
    pub fn torus_distance(&self, o: &Displacement) -> f64 {
        let d = |u: f64, v: f64| {
            let t = (u - v).abs();
            t.min(1.0 - t)
        };
        d(self.a, o.a).hypot(d(self.b, o.b))
    }
}

impl fmt::Display for Displacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// `J` with its first and second `(a,b)`-derivatives from a single pass.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JJet {
    pub value: f64,
    pub da: f64,
    pub db: f64,
    pub daa: f64,
    pub dab: f64,
    pub dbb: f64,
    /// Estimated bound on the discarded terms of any of the six sums.
    pub tail: f64,
}

impl JJet {
    pub fn gradient_norm(&self) -> f64 {
        self.da.hypot(self.db)
    }

    pub fn hessian_det(&self) -> f64 {
        self.daa * self.dbb - self.dab * self.dab
    }

    fn pick(&self, da_order: u32, db_order: u32) -> Result<f64> {
        Ok(match (da_order, db_order) {
            (0, 0) => self.value,
            (1, 0) => self.da,
            (0, 1) => self.db,
            (2, 0) => self.daa,
            (1, 1) => self.dab,
            (0, 2) => self.dbb,
            _ => {
                return Err(Error::domain(format!(
                    "derivative orders ({da_order}, {db_order}) exceed total order 2"
                )))
            }
        })
    }
}

/// Direct double sum over `|m| ≤ M` and `|n − mx| ≤ K`, with `M`, `K` chosen so every dropped
/// exponent is below `ln(tail_tol) − 12`.
pub fn j_jet(z: HalfPlanePoint, d: Displacement, trunc: SeriesTruncation) -> Result<JJet> {
    let (x, y) = (z.x(), z.y());
    let level = -trunc.tail_tol.ln() + 12.0;
    let big_m = (level / (PI * y)).sqrt().ceil() as i64 + 1;
    let big_k = (level * y / PI).sqrt().ceil() as i64 + 1;
    let cap = 20 * trunc.max_index as i64;
    if big_m > cap || big_k > cap {
        return Err(Error::Truncation { achieved: f64::INFINITY, max_index: trunc.max_index });
    }
    let tp = 2.0 * PI;
    let mut jet = JJet::default();
    for m in -big_m..=big_m {
        let mf = m as f64;
        let row = (-PI * mf * mf * y).exp();
        let centre = (mf * x).round() as i64;
        for n in centre - big_k..=centre + big_k {
            let nf = n as f64;
            let u = mf * x - nf;
            let w = row * (-PI * u * u / y).exp();
            let phi = tp * (mf * d.a + nf * d.b);
            let (s, c) = phi.sin_cos();
            let (pm, pn) = (tp * mf, tp * nf);
            jet.value += w * c;
            jet.da -= w * pm * s;
            jet.db -= w * pn * s;
            jet.daa -= w * pm * pm * c;
            jet.dab -= w * pm * pn * c;
            jet.dbb -= w * pn * pn * c;
        }
    }
    let reach = tp * (big_m as f64 * (1.0 + x.abs()) + big_k as f64 + 1.0);
    let count = (2 * big_m + 1 + 2 * big_k + 1) as f64;
    jet.tail = 2.0 * count * reach * reach * (-level).exp();
    Ok(jet)
}

pub fn j_eval(
    z: HalfPlanePoint,
    d: Displacement,
    da_order: u32,
    db_order: u32,
    trunc: SeriesTruncation,
) -> Result<f64> {
    j_jet(z, d, trunc)?.pick(da_order, db_order)
}

pub fn j_estimate(
    z: HalfPlanePoint,
    d: Displacement,
    da_order: u32,
    db_order: u32,
    trunc: SeriesTruncation,
) -> Result<Estimate> {
    let jet = j_jet(z, d, trunc)?;
    Ok(Estimate { value: jet.pick(da_order, db_order)?, tail: jet.tail })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UniversalPoint {
    W1,
    W2,
    W3,
}

/// Closed-form `(a,b)`-Hessian determinant of `J` at `z = iy` and a universal point.
///
/// On the axis `J(iy;a,b) = ϑ(y;a)ϑ(1/y;b)`, the mixed derivative vanishes at the universal
/// points and `∂²_Y ϑ = 4π ∂_X ϑ`, so the determinant is
/// `16π² ϑ(y;a)∂_Xϑ(y;a) · ϑ(1/y;b)∂_Xϑ(1/y;b)`.
pub fn hessian_universal(y: f64, which: UniversalPoint, trunc: SeriesTruncation) -> Result<f64> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::domain(format!("y must be positive, got {y}")));
    }
    let (ka, kb) = match which {
        UniversalPoint::W1 => (ThetaKind::Four, ThetaKind::Three),
        UniversalPoint::W2 => (ThetaKind::Three, ThetaKind::Four),
        UniversalPoint::W3 => (ThetaKind::Four, ThetaKind::Four),
    };
    let fa = jacobi_theta(ka, y, 0, trunc)? * jacobi_theta(ka, y, 1, trunc)?;
    let fb = jacobi_theta(kb, 1.0 / y, 0, trunc)? * jacobi_theta(kb, 1.0 / y, 1, trunc)?;
    Ok(16.0 * PI * PI * fa * fb)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.abs() <= 1.0) {
        return Err(Error::domain(format!("alpha must lie in [-1, 1], got {alpha}")));
    }
    Ok(())
}

pub fn energy(alpha: f64, z: HalfPlanePoint, d: Displacement, trunc: SeriesTruncation) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(theta2d(1.0, z, trunc)? + alpha * j_eval(z, d, 0, 0, trunc)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeShape {
    Hexagonal,
    Rhombic,
    Square,
    Rectangular,
}

impl fmt::Display for LatticeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LatticeShape::Hexagonal => "hexagonal",
            LatticeShape::Rhombic => "rhombic",
            LatticeShape::Square => "square",
            LatticeShape::Rectangular => "rectangular",
        };
        f.write_str(s)
    }
}

/// One row of the phase diagram.
///
/// `angle_or_ratio` is the lattice angle in radians for hexagonal and rhombic rows and the
/// aspect ratio `y` for square and rectangular rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub alpha: f64,
    pub shape: LatticeShape,
    pub z: HalfPlanePoint,
    pub angle_or_ratio: f64,
    pub energy: f64,
    pub displacement: Displacement,
    /// Set for `0 < α < α₀`, where the hexagonal lattice with `(a,b) = (⅓,⅓)` undercuts the
    /// `(½,½)` minimizer reported in the row.
    pub below_alpha0: bool,
}

/// `α₁ = 1/(1+2σ₁,ᵦ)` and `α₂ = 1/(1+2σ₁,ₐ)`.
pub fn alpha_thresholds() -> (f64, f64) {
    let th = thresholds();
    (1.0 / (1.0 + 2.0 * th.sigma1b), 1.0 / (1.0 + 2.0 * th.sigma1a))
}

pub fn rho_of_alpha(alpha: f64) -> f64 {
    (1.0 - alpha) / (2.0 * alpha)
}

/// Angle of a point on the unit circle, `arctan(2y/(y²−1))` for the Cayley image of `iy`.
fn arc_angle(z: HalfPlanePoint) -> f64 {
    z.y().atan2(z.x())
}

/// Minimizer of `E(z;½,½) = 2α·W₁,ρ(z)` for `0 < α ≤ 1`.
pub fn optimal_lattice(alpha: f64, trunc: SeriesTruncation) -> Result<PhaseRow> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!(
            "alpha must lie in (0, 1], got {alpha}; for alpha <= 0 the hexagonal lattice with (a,b)=(0,0) is optimal"
        )));
    }
    let p = minimizer(FunctionalKind::W1, rho_of_alpha(alpha))?;
    let (shape, angle_or_ratio) = match p.branch {
        Branch::Arc => (LatticeShape::Rhombic, arc_angle(p.z)),
        Branch::Corner => (LatticeShape::Square, 1.0),
        Branch::Segment => (LatticeShape::Rectangular, p.z.y()),
    };
    let e = energy(alpha, p.z, Displacement::W3, trunc)?;
    Ok(PhaseRow {
        alpha,
        shape,
        z: p.z,
        angle_or_ratio,
        energy: e,
        displacement: Displacement::W3,
        below_alpha0: alpha < alpha0_cached(),
    })
}

/// Phase row for any `α ∈ [−1, 1]`: the hexagonal lattice with coincident components for
/// `α ≤ 0`, [`optimal_lattice`] otherwise.
pub fn phase_row(alpha: f64, trunc: SeriesTruncation) -> Result<PhaseRow> {
    check_alpha(alpha)?;
    if alpha > 0.0 {
        return optimal_lattice(alpha, trunc);
    }
    let z = HalfPlanePoint::hexagonal();
    Ok(PhaseRow {
        alpha,
        shape: LatticeShape::Hexagonal,
        z,
        angle_or_ratio: FRAC_PI_3,
        energy: energy(alpha, z, Displacement::W0, trunc)?,
        displacement: Displacement::W0,
        below_alpha0: false,
    })
}

/// Phase rows for a list of `α`, computed in parallel and returned in input order.
pub fn phase_sweep(alphas: &[f64], trunc: SeriesTruncation) -> Result<Vec<PhaseRow>> {
    alphas.par_iter().map(|&a| phase_row(a, trunc)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alpha0 {
    pub alpha0: f64,
    pub theta_alpha0: f64,
    /// `(θ(1;i) − θ(1;z₀)) / (J(z₀;⅓,⅓) − J(i;½,½))`, an upper bound for `α₀`.
    pub rough_bound: f64,
}

/// Solve `θ(1;z₀) + αJ(z₀;⅓,⅓) = θ(1;e^{iθ_α}) + αJ(e^{iθ_α};½,½)` for `α`.
pub fn solve_alpha0(trunc: SeriesTruncation) -> Result<Alpha0> {
    let z0 = HalfPlanePoint::hexagonal();
    let t0 = theta2d(1.0, z0, trunc)?;
    let j_thirds = j_eval(z0, Displacement::THIRDS, 0, 0, trunc)?;
    let ti = theta2d(1.0, HalfPlanePoint::I, trunc)?;
    let j_square = j_eval(HalfPlanePoint::I, Displacement::W3, 0, 0, trunc)?;
    let rough_bound = (ti - t0) / (j_thirds - j_square);

    let rhombic = |alpha: f64| -> Result<HalfPlanePoint> {
        Ok(minimizer(FunctionalKind::W1, rho_of_alpha(alpha))?.z)
    };
    let gap = |alpha: f64| -> Result<f64> {
        let z = rhombic(alpha)?;
        Ok(t0 + alpha * j_thirds - energy(alpha, z, Displacement::W3, trunc)?)
    };
    let (lo, hi) = (1e-2, rough_bound.min(alpha_thresholds().0));
    let alpha0 = bracketed_root(gap, lo, hi, 1e-12, 1e-15)?;
    Ok(Alpha0 { alpha0, theta_alpha0: arc_angle(rhombic(alpha0)?), rough_bound })
}

fn alpha0_cached() -> f64 {
    use std::sync::OnceLock;
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| {
        solve_alpha0(SeriesTruncation::default())
            .map(|a| a.alpha0)
            .expect("the alpha0 bracket is fixed and contains a sign change")
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Min,
    Max,
    Saddle,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub d: Displacement,
    pub kind: CriticalKind,
    /// `‖∇J‖` at the reported point.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointReport {
    pub z: HalfPlanePoint,
    /// One representative per orbit of `(a,b) ↦ (1−a,1−b)`, sorted by `(a, b)`.
    pub points: Vec<CriticalPoint>,
    pub count: usize,
    /// Number of distinct critical points on the torus before the symmetry is quotiented.
    pub torus_count: usize,
}

impl CriticalPointReport {
    pub fn find(&self, d: Displacement, tol: f64) -> Option<&CriticalPoint> {
        self.points
            .iter()
            .find(|p| p.d.torus_distance(&d) <= tol || p.d.torus_distance(&d.mirrored()) <= tol)
    }
}

fn classify(jet: &JJet, residual: f64, refine_tol: f64) -> CriticalKind {
    let det = jet.hessian_det();
    let scale = jet.daa.abs().max(jet.dbb.abs()).max(1.0);
    if residual > refine_tol || det.abs() <= 1e-9 * scale * scale {
        CriticalKind::Degenerate
    } else if det < 0.0 {
        CriticalKind::Saddle
    } else if jet.daa > 0.0 {
        CriticalKind::Min
    } else {
        CriticalKind::Max
    }
}

/// Newton iteration on `∇J = 0`; the step is halved while the residual fails to decrease.
fn newton(
    z: HalfPlanePoint,
    start: Displacement,
    refine_tol: f64,
    trunc: SeriesTruncation,
) -> Result<(Displacement, JJet)> {
    let mut d = start;
    let mut jet = j_jet(z, d, trunc)?;
    for _ in 0..60 {
        let r = jet.gradient_norm();
        if r <= refine_tol {
            break;
        }
        let det = jet.hessian_det();
        if det == 0.0 {
            break;
        }
        let sa = -(jet.dbb * jet.da - jet.dab * jet.db) / det;
        let sb = -(jet.daa * jet.db - jet.dab * jet.da) / det;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = Displacement::new(d.a + step * sa, d.b + step * sb)?;
            let cj = j_jet(z, cand, trunc)?;
            if cj.gradient_norm() < r {
                d = cand;
                jet = cj;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((d, jet))
}

/// Critical points of `(a,b) ↦ J(z;a,b)` on the torus.
///
/// The gradient is sampled on a `grid_n × grid_n` mesh; every cell whose corner values of
/// both components change sign seeds a Newton run. The four universal points are always
/// seeded. Points closer than `1e-6` on the torus are merged.
pub fn critical_census(
    z: HalfPlanePoint,
    grid_n: usize,
    refine_tol: f64,
    trunc: SeriesTruncation,
) -> Result<CriticalPointReport> {
    if grid_n < 32 {
        return Err(Error::domain(format!("census grid must be at least 32, got {grid_n}")));
    }
    if !(refine_tol > 0.0) {
        return Err(Error::domain("refine_tol must be positive"));
    }
    let h = 1.0 / grid_n as f64;
    let grad: Vec<(f64, f64)> = (0..grid_n * grid_n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / grid_n, k % grid_n);
            let jet = j_jet(z, Displacement { a: i as f64 * h, b: j as f64 * h }, trunc)?;
            Ok((jet.da, jet.db))
        })
        .collect::<Result<_>>()?;
    let at = |i: usize, j: usize| grad[(i % grid_n) * grid_n + (j % grid_n)];
    let changes = |vals: [f64; 4]| {
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    let mut seeds: Vec<Displacement> = Displacement::universal().to_vec();
    for i in 0..grid_n {
        for j in 0..grid_n {
            let c = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            if changes(c.map(|g| g.0)) && changes(c.map(|g| g.1)) {
                seeds.push(Displacement { a: (i as f64 + 0.5) * h, b: (j as f64 + 0.5) * h });
            }
        }
    }
    let refined: Vec<CriticalPoint> = seeds
        .par_iter()
        .map(|&s| {
            let (d, jet) = newton(z, s, refine_tol, trunc)?;
            let residual = jet.gradient_norm();
            Ok(CriticalPoint { d, kind: classify(&jet, residual, refine_tol), residual })
        })
        .collect::<Result<_>>()?;

    let mut torus: Vec<CriticalPoint> = Vec::new();
    for p in refined {
        // seeds that wandered off without converging are dropped unless they are universal
        if p.kind == CriticalKind::Degenerate && p.residual > 1e3 * refine_tol {
            continue;
        }
        if !torus.iter().any(|q| q.d.torus_distance(&p.d) < 1e-6) {
            torus.push(p);
        }
    }
    for w in Displacement::universal() {
        if !torus.iter().any(|q| q.d.torus_distance(&w) < 1e-6) {
            let jet = j_jet(z, w, trunc)?;
            let r = jet.gradient_norm();
            torus.push(CriticalPoint { d: w, kind: classify(&jet, r, refine_tol), residual: r });
        }
    }
    let torus_count = torus.len();
    let mut points: Vec<CriticalPoint> = Vec::new();
    for p in torus {
        let m = p.d.mirrored();
        if let Some(q) = points.iter_mut().find(|q| q.d.torus_distance(&m) < 1e-6) {
            // keep the lexicographically smaller representative
            if (p.d.a, p.d.b) < (q.d.a, q.d.b) {
                *q = p;
            }
        } else {
            points.push(p);
        }
    }
    points.sort_by(|p, q| (p.d.a, p.d.b).partial_cmp(&(q.d.a, q.d.b)).unwrap());
    Ok(CriticalPointReport { z, count: points.len(), points, torus_count })
}

/// Energy of the square lattice minimizer, used by continuity checks near `α₁`, `α₂`.
pub fn corner_energy(alpha: f64, trunc: SeriesTruncation) -> Result<f64> {
    energy(alpha, HalfPlanePoint::I, Displacement::W3, trunc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta_kernel::theta2d_shifted;
    use std::f64::consts::FRAC_PI_2;

    fn t() -> SeriesTruncation {
        SeriesTruncation::default()
    }

    fn samples() -> Vec<HalfPlanePoint> {
        [(0.0, 1.0), (0.2, 1.4), (-0.4, 0.95), (0.5, 0.8660254037844386), (0.31, 2.3), (1.7, 0.6)]
            .iter()
            .map(|&(x, y)| HalfPlanePoint::new(x, y).unwrap())
            .collect()
    }

    fn brute_j(x: f64, y: f64, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        for m in -30i64..=30 {
            for n in -60i64..=60 {
                let (mf, nf) = (m as f64, n as f64);
                let q = ((mf * x - nf).powi(2) + mf * mf * y * y) / y;
                acc += (-PI * q).exp() * (2.0 * PI * (mf * a + nf * b)).cos();
            }
        }
        acc
    }

    #[test]
    fn displacement_is_canonical() {
        let d = Displacement::new(-0.25, 1.75).unwrap();
        assert_eq!((d.a(), d.b()), (0.75, 0.75));
        let d = Displacement::new(-1e-18, 0.0).unwrap();
        assert!(d.a() < 1.0);
    }

    #[test]
    fn j_matches_brute_sum_and_theta() {
        for z in samples() {
            for &(a, b) in &[(0.0, 0.0), (0.2, 0.7), (1.0 / 3.0, 1.0 / 3.0)] {
                let d = Displacement::new(a, b).unwrap();
                let v = j_eval(z, d, 0, 0, t()).unwrap();
                assert!((v - brute_j(z.x(), z.y(), a, b)).abs() < 1e-11, "{z} {d}");
            }
            let v = j_eval(z, Displacement::W0, 0, 0, t()).unwrap();
            assert!((v - theta2d(1.0, z, t()).unwrap()).abs() < 1e-10);
            let v = j_eval(z, Displacement::W3, 0, 0, t()).unwrap();
            let lemma = 2.0 * theta2d_shifted(2.0, z, t()).unwrap() - theta2d(1.0, z, t()).unwrap();
            assert!((v - lemma).abs() < 1e-10, "{z}: {v} vs {lemma}");
        }
    }

    #[test]
    fn j_symmetries() {
        for z in samples() {
            let (a, b) = (0.17, 0.62);
            let v = j_eval(z, Displacement::new(a, b).unwrap(), 0, 0, t()).unwrap();
            let w = j_eval(z, Displacement::new(1.0 - a, 1.0 - b).unwrap(), 0, 0, t()).unwrap();
            assert!((v - w).abs() < 1e-12);
            let zt = HalfPlanePoint::new(z.x() + 1.0, z.y()).unwrap();
            let u = j_eval(zt, Displacement::new(a - b, b).unwrap(), 0, 0, t()).unwrap();
            assert!((v - u).abs() < 1e-11);
        }
    }

    #[test]
    fn j_derivatives_match_finite_differences() {
        let z = HalfPlanePoint::on_axis(1.1).unwrap();
        let h = 1e-4;
        let f = |a: f64, b: f64, p, q| j_eval(z, Displacement::new(a, b).unwrap(), p, q, t()).unwrap();
        let (a, b) = (0.2, 0.3);
        let fd = (f(a + h, b + h, 0, 0) - f(a + h, b - h, 0, 0) - f(a - h, b + h, 0, 0)
            + f(a - h, b - h, 0, 0))
            / (4.0 * h * h);
        let exact = f(a, b, 1, 1);
        assert!(((fd - exact) / exact).abs() < 1e-6, "{fd} vs {exact}");
        for (p, q) in [(1, 0), (0, 1), (2, 0), (0, 2)] {
            let (pa, pb) = (p.min(1), q.min(1));
            let lower = |a: f64, b: f64| f(a, b, p - pa, q - pb);
            let fd = (lower(a + h * pa as f64, b + h * pb as f64)
                - lower(a - h * pa as f64, b - h * pb as f64))
                / (2.0 * h);
            let exact = f(a, b, p, q);
            assert!(((fd - exact) / exact).abs() < 1e-6, "({p},{q}) {fd} vs {exact}");
        }
        assert!(j_eval(z, Displacement::W0, 2, 1, t()).is_err());
    }

    #[test]
    fn hessian_closed_form_matches_jet() {
        for &y in &[0.8, 1.0, 1.6] {
            let z = HalfPlanePoint::on_axis(y).unwrap();
            for (w, d) in [
                (UniversalPoint::W1, Displacement::W1),
                (UniversalPoint::W2, Displacement::W2),
                (UniversalPoint::W3, Displacement::W3),
            ] {
                let closed = hessian_universal(y, w, t()).unwrap();
                let det = j_jet(z, d, t()).unwrap().hessian_det();
                assert!(((closed - det) / det).abs() < 1e-9, "{y} {w:?}: {closed} vs {det}");
                match w {
                    UniversalPoint::W3 => assert!(closed > 0.0),
                    _ => assert!(closed < 0.0),
                }
            }
        }
        assert!(hessian_universal(0.0, UniversalPoint::W1, t()).is_err());
    }

    #[test]
    fn hexagonal_criticality_identity() {
        for &x in &[0.5, 1.0, 2.0] {
            let mut acc = 0.0f64;
            for m in -40i64..=40 {
                for n in -40i64..=40 {
                    let (mf, nf) = (m as f64, n as f64);
                    acc += (-x * (mf * mf + nf * nf - mf * nf)).exp()
                        * mf
                        * (2.0 * PI * (mf + nf) / 3.0).sin();
                }
            }
            assert!(acc.abs() < 1e-12, "{x}: {acc}");
        }
    }

    #[test]
    fn thirds_gradient_at_square_lattice() {
        let jet = j_jet(HalfPlanePoint::I, Displacement::THIRDS, t()).unwrap();
        assert!((jet.da - jet.db).abs() < 1e-12);
        assert!(jet.da < -1e-2, "{}", jet.da);
        let hex = j_jet(HalfPlanePoint::hexagonal(), Displacement::THIRDS, t()).unwrap();
        assert!(hex.gradient_norm() < 1e-10);
    }

    #[test]
    fn w0_is_the_maximum() {
        for z in samples().into_iter().take(4) {
            let top = j_eval(z, Displacement::W0, 0, 0, t()).unwrap();
            for i in 0..64 {
                for j in 0..64 {
                    let d = Displacement::new(i as f64 / 64.0, j as f64 / 64.0).unwrap();
                    assert!(j_eval(z, d, 0, 0, t()).unwrap() <= top + 1e-12);
                }
            }
        }
    }

    #[test]
    fn energy_formula_for_half_half() {
        for z in samples() {
            for &alpha in &[-0.7, 0.0, 0.3, 1.0] {
                let e = energy(alpha, z, Displacement::W3, t()).unwrap();
                let f = (1.0 - alpha) * theta2d(1.0, z, t()).unwrap()
                    + 2.0 * alpha * theta2d_shifted(2.0, z, t()).unwrap();
                assert!((e - f).abs() < 1e-10);
            }
        }
        assert!(energy(1.5, HalfPlanePoint::I, Displacement::W0, t()).is_err());
    }

    #[test]
    fn hexagonal_coincident_regime() {
        let alpha = -0.5;
        let z0 = HalfPlanePoint::hexagonal();
        let best = energy(alpha, z0, Displacement::W0, t()).unwrap();
        for i in 0..=20 {
            for j in 0..=20 {
                let x = i as f64 * 0.5 / 20.0;
                let y = (1.0 - x * x).sqrt() + j as f64 * 0.1;
                let z = HalfPlanePoint::new(x, y).unwrap();
                for d in [Displacement::W0, Displacement::W3, Displacement::THIRDS] {
                    assert!(energy(alpha, z, d, t()).unwrap() >= best - 1e-12);
                }
            }
        }
        let row = phase_row(-0.3, t()).unwrap();
        assert_eq!(row.shape, LatticeShape::Hexagonal);
        assert_eq!(row.displacement, Displacement::W0);
    }

    #[test]
    fn phase_rows() {
        let row = optimal_lattice(0.6, t()).unwrap();
        assert_eq!(row.shape, LatticeShape::Square);
        assert_eq!(row.z, HalfPlanePoint::I);
        let row = optimal_lattice(1.0, t()).unwrap();
        assert_eq!(row.shape, LatticeShape::Rectangular);
        assert!((row.angle_or_ratio - 3f64.sqrt()).abs() < 1e-8);
        let row = optimal_lattice(0.95, t()).unwrap();
        assert!(row.angle_or_ratio > 1.0 && row.angle_or_ratio < 3f64.sqrt());
        let row = optimal_lattice(0.2, t()).unwrap();
        assert_eq!(row.shape, LatticeShape::Rhombic);
        assert!(row.angle_or_ratio > FRAC_PI_3 && row.angle_or_ratio < FRAC_PI_2);
        assert!(optimal_lattice(0.0, t()).is_err());
    }

    #[test]
    fn phase_energy_is_continuous_at_thresholds() {
        let (a1, a2) = alpha_thresholds();
        for a in [a1, a2] {
            let left = phase_row(a * (1.0 - 1e-10), t()).unwrap().energy;
            let right = phase_row(a * (1.0 + 1e-10), t()).unwrap().energy;
            assert!((left - right).abs() < 1e-8, "{a}: {left} vs {right}");
        }
    }

    #[test]
    fn census_at_square_and_hexagonal_lattices() {
        let hex = critical_census(HalfPlanePoint::hexagonal(), 64, 1e-11, t()).unwrap();
        let p = hex.find(Displacement::THIRDS, 1e-8).expect("(1/3,1/3) is critical");
        assert!(p.residual <= 1e-10);
        for w in Displacement::universal() {
            assert!(hex.find(w, 1e-12).is_some());
        }
        assert_eq!(hex.count, hex.points.len());
        let sq = critical_census(HalfPlanePoint::I, 64, 1e-11, t()).unwrap();
        assert!(sq.find(Displacement::THIRDS, 1e-3).is_none());
        assert!(critical_census(HalfPlanePoint::I, 16, 1e-11, t()).is_err());
    }
}
