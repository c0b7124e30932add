//! Moebius words, fundamental-domain reduction for `Γ`, `G₁`, `G₂`, and the Cayley map.
//!
//! `G₁` is generated by `z ↦ −1/z`, `z ↦ z+1`, `z ↦ −z̄`; `G₂` swaps the unit translation for
//! `z ↦ z+2`. Reduction targets the closures
//! `D_Γ = {|z|≥1, −½≤x≤½}`, `D_G₁ = {|z|≥1, 0≤x≤½}`, `D_G₂ = {|z|≥1, 0≤x≤1}`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta_kernel::HalfPlanePoint;

const REDUCTION_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupId {
    Gamma,
    G1,
    G2,
}

/// Elementary moves recorded while reducing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    /// `z ↦ z + k`
    Translate(i64),
    /// `z ↦ −1/z`
    Invert,
    /// `z ↦ −z̄`
    Reflect,
}

/// `z ↦ (a·w + b)/(c·w + d)` with `w = −z̄` when `reflect` is set and `w = z` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoebiusWord {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
    reflect: bool,
    /// Generator trail in application order, kept for debugging; the matrix is canonical.
    pub trail: Vec<Generator>,
}

impl MoebiusWord {
    pub fn new(a: i64, b: i64, c: i64, d: i64, reflect: bool) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::domain(format!("det({a},{b};{c},{d}) != 1")));
        }
        Ok(MoebiusWord { a, b, c, d, reflect, trail: Vec::new() })
    }

    pub fn identity() -> Self {
        MoebiusWord { a: 1, b: 0, c: 0, d: 1, reflect: false, trail: Vec::new() }
    }

    pub fn generator(g: Generator) -> Self {
        let mut w = match g {
            Generator::Translate(k) => MoebiusWord { a: 1, b: k, c: 0, d: 1, reflect: false, trail: vec![] },
            Generator::Invert => MoebiusWord { a: 0, b: -1, c: 1, d: 0, reflect: false, trail: vec![] },
            Generator::Reflect => MoebiusWord { reflect: true, ..Self::identity() },
        };
        w.trail.push(g);
        w
    }

    pub fn matrix(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn reflects(&self) -> bool {
        self.reflect
    }

    /// Same map, as a canonical matrix (sign fixed so the first nonzero of `(c, d)` is positive).
    pub fn is_identity(&self) -> bool {
        let m = self.canonical();
        !self.reflect && m == [1, 0, 0, 1]
    }

    fn canonical(&self) -> [i64; 4] {
        let flip = self.c < 0 || (self.c == 0 && self.d < 0);
        if flip {
            [-self.a, -self.b, -self.c, -self.d]
        } else {
            [self.a, self.b, self.c, self.d]
        }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &MoebiusWord) -> MoebiusWord {
        // R∘M∘R has matrix (a,−b;−c,d), so a reflection in `self` can be pushed past `first`.
        let f = if self.reflect {
            [first.a, -first.b, -first.c, first.d]
        } else {
            [first.a, first.b, first.c, first.d]
        };
        let [a, b, c, d] = [self.a, self.b, self.c, self.d];
        let mut trail = first.trail.clone();
        trail.extend_from_slice(&self.trail);
        MoebiusWord {
            a: a * f[0] + b * f[2],
            b: a * f[1] + b * f[3],
            c: c * f[0] + d * f[2],
            d: c * f[1] + d * f[3],
            reflect: self.reflect ^ first.reflect,
            trail,
        }
    }

    pub fn inverse(&self) -> MoebiusWord {
        let inv = [self.d, -self.b, -self.c, self.a];
        let m = if self.reflect { [inv[0], -inv[1], -inv[2], inv[3]] } else { inv };
        let trail = self
            .trail
            .iter()
            .rev()
            .map(|g| match g {
                Generator::Translate(k) => Generator::Translate(-k),
                other => *other,
            })
            .collect();
        MoebiusWord { a: m[0], b: m[1], c: m[2], d: m[3], reflect: self.reflect, trail }
    }
}

impl fmt::Display for MoebiusWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)?;
        if self.reflect {
            write!(f, "∘R")?;
        }
        Ok(())
    }
}

pub fn apply(word: &MoebiusWord, z: HalfPlanePoint) -> HalfPlanePoint {
    let w = if word.reflect {
        Complex64::new(-z.x(), z.y())
    } else {
        z.to_complex()
    };
    let num = w * word.a as f64 + word.b as f64;
    let den = w * word.c as f64 + word.d as f64;
    let r = num / den;
    // det = 1 keeps the image in the upper half-plane; guard against underflow only
    HalfPlanePoint::new(r.re, r.im.max(f64::MIN_POSITIVE)).expect("image of a finite modulus")
}

/// Move `z` into the closed fundamental domain of `group`, returning the point and the word.
pub fn reduce(z: HalfPlanePoint, group: GroupId) -> Result<(HalfPlanePoint, MoebiusWord)> {
    let mut word = MoebiusWord::identity();
    let mut p = z;
    let period = match group {
        GroupId::G2 => 2.0,
        _ => 1.0,
    };
    for _ in 0..REDUCTION_CAP {
        let (lo, hi) = match group {
            GroupId::Gamma | GroupId::G1 => (-0.5, 0.5),
            GroupId::G2 => (-1.0, 1.0),
        };
        let step = if p.x() < lo || p.x() > hi {
            let k = -((p.x() - lo) / period).floor() as i64;
            let k = if p.x() + k as f64 * period > hi { k - 1 } else { k };
            Some(Generator::Translate(k * period as i64))
        } else if group != GroupId::Gamma && p.x() < 0.0 {
            Some(Generator::Reflect)
        } else if p.x() * p.x() + p.y() * p.y() < 1.0
            || (group == GroupId::Gamma && p.x() < 0.0 && p.x() * p.x() + p.y() * p.y() == 1.0)
        {
            Some(Generator::Invert)
        } else if group == GroupId::Gamma && p.x() == -0.5 {
            Some(Generator::Translate(1))
        } else {
            None
        };
        match step {
            None => return Ok((p, word)),
            Some(g) => {
                let gw = MoebiusWord::generator(g);
                p = apply(&gw, p);
                word = gw.compose(&word);
            }
        }
    }
    Err(Error::Reduction(format!("no settlement after {REDUCTION_CAP} steps from {z}")))
}

/// Standard-domain representative without the word, for the theta engine.
pub(crate) fn reduce_point(z: HalfPlanePoint) -> Result<HalfPlanePoint> {
    let mut p = z;
    for _ in 0..REDUCTION_CAP {
        let x = p.x() - p.x().round();
        let r2 = x * x + p.y() * p.y();
        if r2 >= 1.0 {
            return HalfPlanePoint::new(x.abs(), p.y());
        }
        p = HalfPlanePoint::new(-x / r2, p.y() / r2)?;
    }
    Err(Error::Reduction(format!("no settlement after {REDUCTION_CAP} steps from {z}")))
}

/// `w = (z−1)/(z+1)`.
pub fn cayley(z: HalfPlanePoint) -> HalfPlanePoint {
    let c = z.to_complex();
    let w = (c - 1.0) / (c + 1.0);
    HalfPlanePoint::new(w.re, w.im).expect("Cayley image stays in the upper half-plane")
}

/// `z = (1+w)/(1−w)`.
pub fn cayley_inv(w: HalfPlanePoint) -> HalfPlanePoint {
    let c = w.to_complex();
    let z = (c + 1.0) / (1.0 - c);
    HalfPlanePoint::new(z.re, z.im).expect("inverse Cayley image stays in the upper half-plane")
}

/// Location on the minimizer curve: the segment `{x=0, 1≤y≤√3}`, the corner `i`, or the
/// unit arc in the first quadrant (minimizers only reach `0 ≤ x < ½` of it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Segment,
    Corner,
    Arc,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Segment => "segment",
            Branch::Corner => "corner",
            Branch::Arc => "arc",
        })
    }
}

pub const DEFAULT_TRAJECTORY_TOL: f64 = 1e-9;

pub fn on_trajectory(z: HalfPlanePoint, tol: f64) -> Option<Branch> {
    let (x, y) = (z.x(), z.y());
    if x.abs() <= tol && (y - 1.0).abs() <= tol {
        Some(Branch::Corner)
    } else if x.abs() <= tol && y >= 1.0 - tol && y <= 3f64.sqrt() + tol {
        Some(Branch::Segment)
    } else if (z.modulus() - 1.0).abs() <= tol && x >= -tol && x < 1.0 {
        Some(Branch::Arc)
    } else {
        None
    }
}
