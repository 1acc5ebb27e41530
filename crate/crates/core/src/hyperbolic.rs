//! Hyperbolic geometry of the open unit disc.
//!
//! The metric used throughout is `beta(z, w) = log((1 + rho)/(1 - rho))`
//! where `rho` is the pseudohyperbolic distance `|[z, w]|` and
//! `[z, a] = (a - z)/(1 - conj(a) z)` is the Mobius bracket. Curve length
//! uses the density `|dz|/(1 - |z|^2)`, so the length of the geodesic
//! between `z` and `w` is `beta(z, w)/2`; both conventions are kept as is
//! and the factor of two is never folded away.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::selfmap::SelfMap;

/// Points with modulus above `1 - BOUNDARY_MARGIN` are rejected: the
/// bracket denominator `1 - conj(a) z` underflows there.
pub const BOUNDARY_MARGIN: f64 = 1e-15;

/// A point strictly inside the unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint(Complex64);

impl DiscPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(value: Complex64) -> Result<Self> {
        let modulus = value.norm();
        if !modulus.is_finite() || modulus >= 1.0 - BOUNDARY_MARGIN {
            return Err(Error::PointOutsideDisc { modulus });
        }
        Ok(Self(value))
    }

    pub fn origin() -> Self {
        Self(Complex64::new(0.0, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn abs(self) -> f64 {
        self.0.norm()
    }
}

impl Serialize for DiscPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(deserializer)?;
        DiscPoint::new(re, im).map_err(serde::de::Error::custom)
    }
}

/// `[z, a] = (a - z)/(1 - conj(a) z)` on raw complex values.
///
/// Callers are responsible for keeping the denominator away from zero;
/// with at least one argument strictly inside the disc it never vanishes.
pub(crate) fn bracket_c(z: Complex64, a: Complex64) -> Complex64 {
    (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

pub(crate) fn rho_c(z: Complex64, w: Complex64) -> f64 {
    bracket_c(z, w).norm()
}

pub(crate) fn beta_c(z: Complex64, w: Complex64) -> f64 {
    let rho = rho_c(z, w);
    ((1.0 + rho) / (1.0 - rho)).ln()
}

/// The Mobius bracket `[z, a] = (a - z)/(1 - conj(a) z)`.
///
/// For fixed `a` this is a disc automorphism of `z`; its modulus is the
/// pseudohyperbolic distance between the two points.
pub fn mobius_bracket(z: DiscPoint, a: DiscPoint) -> Complex64 {
    bracket_c(z.value(), a.value())
}

/// Pseudohyperbolic distance `rho(z, w) = |[z, w]|`, in `[0, 1)`.
pub fn pseudo_dist(z: DiscPoint, w: DiscPoint) -> f64 {
    mobius_bracket(z, w).norm()
}

/// Hyperbolic distance `beta(z, w) = log((1 + rho)/(1 - rho))`.
pub fn hyp_dist(z: DiscPoint, w: DiscPoint) -> f64 {
    beta_c(z.value(), w.value())
}

/// A polyline approximation of a curve in the disc.
#[derive(Debug, Clone)]
pub struct HyperbolicPath {
    samples: Vec<DiscPoint>,
}

impl HyperbolicPath {
    /// Requires at least two samples with consecutive samples distinct.
    pub fn new(samples: Vec<DiscPoint>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::DegeneratePath);
        }
        if samples.windows(2).any(|w| w[0].value() == w[1].value()) {
            return Err(Error::DegeneratePath);
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[DiscPoint] {
        &self.samples
    }
}

/// Length of the polyline under the density `|dz|/(1 - |z|^2)`,
/// one midpoint-rule term per segment.
pub fn hyp_length(path: &HyperbolicPath) -> f64 {
    path.samples
        .windows(2)
        .map(|w| {
            let (p, q) = (w[0].value(), w[1].value());
            let mid = 0.5 * (p + q);
            (q - p).norm() / (1.0 - mid.norm_sqr())
        })
        .sum()
}

/// Uniformly parametrized polyline along the geodesic from `z` to `w`.
pub fn geodesic(z: DiscPoint, w: DiscPoint, samples: usize) -> Result<HyperbolicPath> {
    if samples < 2 || z.value() == w.value() {
        return Err(Error::DegeneratePath);
    }
    let (zc, wc) = (z.value(), w.value());
    // Transport to the origin, walk the straight ray, transport back.
    let c = (wc - zc) / (Complex64::new(1.0, 0.0) - zc.conj() * wc);
    let mut pts = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let u = t * c;
        let g = (u + zc) / (Complex64::new(1.0, 0.0) + zc.conj() * u);
        pts.push(DiscPoint::from_complex(g)?);
    }
    HyperbolicPath::new(pts)
}

/// A disc automorphism `z -> rotation * (center - z)/(1 - conj(center) z)`.
#[derive(Debug, Clone, Copy)]
pub struct Automorphism {
    rotation: Complex64,
    center: DiscPoint,
}

impl Automorphism {
    /// `rotation` must be unimodular to within 1e-14.
    pub fn new(rotation: Complex64, center: DiscPoint) -> Result<Self> {
        let modulus = rotation.norm();
        if (modulus - 1.0).abs() > 1e-14 {
            return Err(Error::NotUnimodular { modulus });
        }
        Ok(Self { rotation, center })
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.rotation * bracket_c(z, self.center.value())
    }

    pub fn apply(&self, z: DiscPoint) -> Result<DiscPoint> {
        DiscPoint::from_complex(self.eval_c(z.value()))
    }

    /// The bracket `z -> [z, a]` is an involution, which gives the inverse
    /// in closed form: `rotation' = conj(rotation)`, `center' = rotation * center`.
    pub fn inverse(&self) -> Self {
        Self {
            rotation: self.rotation.conj(),
            center: DiscPoint(self.rotation * self.center.value()),
        }
    }
}

impl SelfMap for Automorphism {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_c(z)
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        let a = self.center.value();
        let den = Complex64::new(1.0, 0.0) - a.conj() * z;
        self.rotation * (a.norm_sqr() - 1.0) / (den * den)
    }
}

/// Concentric-ring lattice: rings every `step_beta` in hyperbolic radius,
/// angular spacing chosen so adjacent ring points are at most `step_beta`
/// apart. Covers the closed hyperbolic disc of radius `radius_beta` about
/// the origin with cells of diameter below `step_beta` radially and
/// tangentially.
pub fn hyperbolic_lattice(radius_beta: f64, step_beta: f64) -> Result<Vec<DiscPoint>> {
    if !(step_beta > 0.0) || !(radius_beta >= 0.0) {
        return Err(Error::InvalidParameter(
            "lattice requires step_beta > 0 and radius_beta >= 0".into(),
        ));
    }
    let rings = (radius_beta / step_beta + 1e-9).floor() as usize;
    let mut points = vec![DiscPoint::origin()];
    for i in 1..=rings {
        let r_beta = i as f64 * step_beta;
        let r = (r_beta / 2.0).tanh();
        // Circumference in the beta metric; chord distance is below arc.
        let circ = 4.0 * std::f64::consts::PI * r / (1.0 - r * r);
        let count = (circ / step_beta).ceil().max(1.0) as usize;
        for j in 0..count {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
            points.push(DiscPoint(Complex64::from_polar(r, theta)));
        }
    }
    Ok(points)
}
