//! Evaluable analytic self-maps of the disc.

use num_complex::Complex64;

/// An analytic map of the open unit disc into its closure.
///
/// `eval` is the primary operation; `derivative` defaults to a central
/// finite difference and should be overridden where a closed form exists.
/// `boundary_abs` reports `|f|` on (or numerically next to) the unit
/// circle and feeds outer-function construction.
pub trait SelfMap: Send + Sync {
    fn eval(&self, z: Complex64) -> Complex64;

    fn derivative(&self, z: Complex64) -> Complex64 {
        let h = 1e-6;
        let re = self.eval(z + Complex64::new(h, 0.0)) - self.eval(z - Complex64::new(h, 0.0));
        re / Complex64::new(2.0 * h, 0.0)
    }

    fn boundary_abs(&self, theta: f64) -> f64 {
        self.eval(Complex64::from_polar(1.0 - 1e-6, theta)).norm()
    }
}

impl<T: SelfMap + ?Sized> SelfMap for &T {
    fn eval(&self, z: Complex64) -> Complex64 {
        (**self).eval(z)
    }
    fn derivative(&self, z: Complex64) -> Complex64 {
        (**self).derivative(z)
    }
    fn boundary_abs(&self, theta: f64) -> f64 {
        (**self).boundary_abs(theta)
    }
}

impl SelfMap for Box<dyn SelfMap> {
    fn eval(&self, z: Complex64) -> Complex64 {
        (**self).eval(z)
    }
    fn derivative(&self, z: Complex64) -> Complex64 {
        (**self).derivative(z)
    }
    fn boundary_abs(&self, theta: f64) -> f64 {
        (**self).boundary_abs(theta)
    }
}

impl SelfMap for std::sync::Arc<dyn SelfMap> {
    fn eval(&self, z: Complex64) -> Complex64 {
        (**self).eval(z)
    }
    fn derivative(&self, z: Complex64) -> Complex64 {
        (**self).derivative(z)
    }
    fn boundary_abs(&self, theta: f64) -> f64 {
        (**self).boundary_abs(theta)
    }
}

/// Closure adapter.
pub struct FnMap<F>(pub F);

impl<F: Fn(Complex64) -> Complex64 + Send + Sync> SelfMap for FnMap<F> {
    fn eval(&self, z: Complex64) -> Complex64 {
        (self.0)(z)
    }
}
