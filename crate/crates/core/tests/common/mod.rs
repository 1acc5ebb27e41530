//! Shared generators and independent metric oracles for the
//! integration suites. The oracles are deliberately written from the
//! definitions rather than through the library's internals.

#![allow(dead_code)]

use num_complex::Complex64;
use pickdisc::blaschke::ScaledBlaschke;
use pickdisc::hyperbolic::{Automorphism, DiscPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TAU: f64 = 2.0 * std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `[z, a]` straight from the definition.
pub fn bracket(z: Complex64, a: Complex64) -> Complex64 {
    (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

pub fn rho(z: Complex64, a: Complex64) -> f64 {
    bracket(z, a).norm()
}

pub fn beta(z: Complex64, a: Complex64) -> f64 {
    let r = rho(z, a);
    ((1.0 + r) / (1.0 - r)).ln()
}

/// Area-uniform point in the euclidean disc of the given radius.
pub fn random_point(r: &mut impl Rng, max_abs: f64) -> DiscPoint {
    let radius = r.gen::<f64>().sqrt() * max_abs;
    let angle = r.gen_range(0.0..TAU);
    DiscPoint::from_complex(Complex64::from_polar(radius, angle)).unwrap()
}

/// `n` nodes inside `|z| <= max_abs` with pairwise hyperbolic distance
/// at least `min_sep`.
pub fn distinct_nodes(
    r: &mut impl Rng,
    n: usize,
    max_abs: f64,
    min_sep: f64,
) -> Vec<DiscPoint> {
    let mut nodes: Vec<DiscPoint> = Vec::with_capacity(n);
    while nodes.len() < n {
        let cand = random_point(r, max_abs);
        if nodes
            .iter()
            .all(|q| beta(q.value(), cand.value()) >= min_sep)
        {
            nodes.push(cand);
        }
    }
    nodes
}

/// Scaled Blaschke product with the given degree range and scale-modulus
/// range; zeros are kept within `|z| <= 0.9`.
pub fn random_blaschke(
    r: &mut impl Rng,
    max_degree: usize,
    scale_lo: f64,
    scale_hi: f64,
) -> ScaledBlaschke {
    let rotation = Complex64::from_polar(1.0, r.gen_range(0.0..TAU));
    let scale = Complex64::from_polar(r.gen_range(scale_lo..=scale_hi), r.gen_range(0.0..TAU));
    let degree = r.gen_range(0..=max_degree);
    let zeros = (0..degree)
        .map(|_| random_point(r, 0.9))
        .collect();
    ScaledBlaschke::new(rotation, scale, zeros).unwrap()
}

/// Unimodular Blaschke product of exactly the given degree.
pub fn unit_blaschke(r: &mut impl Rng, degree: usize) -> ScaledBlaschke {
    let rotation = Complex64::from_polar(1.0, r.gen_range(0.0..TAU));
    let zeros = (0..degree).map(|_| random_point(r, 0.85)).collect();
    ScaledBlaschke::new(rotation, Complex64::new(1.0, 0.0), zeros).unwrap()
}

pub fn random_automorphism(r: &mut impl Rng) -> Automorphism {
    let rotation = Complex64::from_polar(1.0, r.gen_range(0.0..TAU));
    Automorphism::new(rotation, random_point(r, 0.8)).unwrap()
}

/// Hyperbolic translate of `local` to sit around `center`.
pub fn translate(center: DiscPoint, local: Complex64) -> DiscPoint {
    let c = center.value();
    DiscPoint::from_complex((local + c) / (Complex64::new(1.0, 0.0) + c.conj() * local)).unwrap()
}

/// Cluster of `n` points inside the hyperbolic disc of radius
/// `radius_beta` about `center`, pairwise distinct.
pub fn tight_cluster(
    r: &mut impl Rng,
    center: DiscPoint,
    n: usize,
    radius_beta: f64,
) -> Vec<DiscPoint> {
    let mut pts: Vec<DiscPoint> = Vec::with_capacity(n);
    while pts.len() < n {
        let rho_local = (r.gen_range(0.0..radius_beta) / 2.0).tanh();
        let local = Complex64::from_polar(rho_local, r.gen_range(0.0..TAU));
        let cand = translate(center, local);
        if pts
            .iter()
            .all(|q| (q.value() - cand.value()).norm() > 1e-9)
        {
            pts.push(cand);
        }
    }
    pts
}
