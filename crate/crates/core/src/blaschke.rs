//! Finite Blaschke products, scaled test functions, hyperbolic
//! derivatives, and outer functions built from boundary modulus data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::DiscPoint;
use crate::selfmap::SelfMap;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `rotation * scale * prod_j (|z_j|/z_j) (z_j - z)/(1 - conj(z_j) z)`.
///
/// A zero at the origin contributes the plain factor `z` (the normalizer
/// `|z_j|/z_j` is undefined there). With `|rotation| = 1` and
/// `|scale| <= 1` the product maps the disc into its closure, with
/// modulus `|scale|` on the unit circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaledBlaschke {
    #[serde(with = "crate::ser::complex_pair")]
    rotation: Complex64,
    #[serde(with = "crate::ser::complex_pair")]
    scale: Complex64,
    zeros: Vec<DiscPoint>,
}

impl ScaledBlaschke {
    pub fn new(rotation: Complex64, scale: Complex64, zeros: Vec<DiscPoint>) -> Result<Self> {
        let rot_mod = rotation.norm();
        if (rot_mod - 1.0).abs() > 1e-14 {
            return Err(Error::NotUnimodular { modulus: rot_mod });
        }
        let scale_mod = scale.norm();
        if !(scale_mod <= 1.0) {
            return Err(Error::ValueOutsideClosedDisc { modulus: scale_mod });
        }
        Ok(Self { rotation, scale, zeros })
    }

    /// Plain Blaschke product: rotation 1, scale 1.
    pub fn unit(zeros: Vec<DiscPoint>) -> Self {
        Self {
            rotation: ONE,
            scale: ONE,
            zeros,
        }
    }

    pub fn constant(c: Complex64) -> Result<Self> {
        Self::new(ONE, c, Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn zeros(&self) -> &[DiscPoint] {
        &self.zeros
    }

    pub fn rotation(&self) -> Complex64 {
        self.rotation
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    fn factor(zero: Complex64, z: Complex64) -> Complex64 {
        if zero == Complex64::new(0.0, 0.0) {
            return z;
        }
        let norm = zero.norm();
        (Complex64::new(norm, 0.0) / zero) * (zero - z) / (ONE - zero.conj() * z)
    }

    fn factor_derivative(zero: Complex64, z: Complex64) -> Complex64 {
        if zero == Complex64::new(0.0, 0.0) {
            return ONE;
        }
        let norm = zero.norm();
        let den = ONE - zero.conj() * z;
        (Complex64::new(norm, 0.0) / zero) * Complex64::new(zero.norm_sqr() - 1.0, 0.0)
            / (den * den)
    }

    /// Valid on the closed disc (poles sit at `1/conj(z_j)` outside).
    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        let mut out = self.rotation * self.scale;
        for zero in &self.zeros {
            out *= Self::factor(zero.value(), z);
        }
        out
    }

    /// Product rule over the factors, closed form.
    pub fn derivative_c(&self, z: Complex64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..self.zeros.len() {
            let mut term = Self::factor_derivative(self.zeros[i].value(), z);
            for (j, zero) in self.zeros.iter().enumerate() {
                if j != i {
                    term *= Self::factor(zero.value(), z);
                }
            }
            sum += term;
        }
        self.rotation * self.scale * sum
    }
}

impl SelfMap for ScaledBlaschke {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_c(z)
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        self.derivative_c(z)
    }

    fn boundary_abs(&self, theta: f64) -> f64 {
        self.eval_c(Complex64::from_polar(1.0, theta)).norm()
    }
}

/// Hyperbolic derivative `(1 - |z|^2) f'(z) / (1 - |f(z)|^2)`.
///
/// Errors when `|f(z)|` is within 1e-12 of the unit circle: the
/// denominator vanishes there.
pub fn hyp_deriv(f: &dyn SelfMap, z: DiscPoint) -> Result<Complex64> {
    let zc = z.value();
    let fz = f.eval(zc);
    let denom = 1.0 - fz.norm_sqr();
    if fz.norm() >= 1.0 - 1e-12 {
        return Err(Error::DegenerateBoundary { modulus: fz.norm() });
    }
    Ok(f.derivative(zc) * Complex64::new((1.0 - zc.norm_sqr()) / denom, 0.0))
}

/// Positive weight on the unit circle, sampled on a uniform angular grid.
pub struct BoundaryModulus {
    sampler: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    node_count: usize,
}

/// Samples below this floor are clipped up before taking logs; samples
/// at or below zero are rejected outright.
pub const BOUNDARY_FLOOR: f64 = 1e-12;

impl BoundaryModulus {
    pub fn new(
        node_count: usize,
        sampler: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidParameter("node_count must be positive".into()));
        }
        Ok(Self {
            sampler: Box::new(sampler),
            node_count,
        })
    }

    /// The weight `theta -> 1 - |f(e^{i theta})|`.
    pub fn one_minus_abs(f: impl SelfMap + 'static, node_count: usize) -> Result<Self> {
        Self::new(node_count, move |theta| 1.0 - f.boundary_abs(theta))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn sample(&self, theta: f64) -> f64 {
        (self.sampler)(theta)
    }
}

/// Zero-free analytic function with prescribed boundary modulus,
/// evaluated through the Herglotz integral
/// `E(z) = exp( (1/2pi) int (e^{it} + z)/(e^{it} - z) log w(t) dt )`
/// with a composite trapezoid rule on the uniform grid.
#[derive(Clone)]
pub struct OuterFunction {
    log_samples: Vec<f64>,
    margin: f64,
}

pub const DEFAULT_QUADRATURE_NODES: usize = 4096;
pub const DEFAULT_QUADRATURE_MARGIN: f64 = 0.01;

impl OuterFunction {
    pub fn from_modulus(modulus: &BoundaryModulus) -> Result<Self> {
        Self::with_margin(modulus, DEFAULT_QUADRATURE_MARGIN)
    }

    pub fn with_margin(modulus: &BoundaryModulus, margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin < 1.0) {
            return Err(Error::InvalidParameter("margin must lie in (0, 1)".into()));
        }
        let n = modulus.node_count();
        let mut log_samples = Vec::with_capacity(n);
        for j in 0..n {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let w = modulus.sample(theta);
            if !(w > 0.0) {
                return Err(Error::InvalidBoundaryData { theta, value: w });
            }
            log_samples.push(w.max(BOUNDARY_FLOOR).ln());
        }
        Ok(Self { log_samples, margin })
    }

    pub fn node_count(&self) -> usize {
        self.log_samples.len()
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Herglotz sum without the margin guard. The quadrature error grows
    /// like `|z|^N`, so results close to the circle are meaningless.
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let n = self.log_samples.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &lw) in self.log_samples.iter().enumerate() {
            let e = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64);
            acc += (e + z) / (e - z) * lw;
        }
        (acc / n as f64).exp()
    }

    pub fn eval(&self, z: DiscPoint) -> Result<Complex64> {
        if z.abs() > 1.0 - self.margin {
            return Err(Error::OutsideQuadratureMargin {
                modulus: z.abs(),
                margin: self.margin,
            });
        }
        Ok(self.eval_unchecked(z.value()))
    }
}
