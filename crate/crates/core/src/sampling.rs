//! Sampling-constant estimation: hyperbolic Lipschitz capacity of a test
//! function, pairwise sampling ratios of a node sequence, and their
//! infimum over a seeded test-function family.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::blaschke::{hyp_deriv, ScaledBlaschke};
use crate::error::{Error, Result};
use crate::hyperbolic::{beta_c, hyp_dist, hyperbolic_lattice, DiscPoint};
use crate::selfmap::SelfMap;

/// Family members whose capacity estimate falls below this floor are
/// excluded: their ratio-to-capacity quotient is numerically meaningless.
pub const CAPACITY_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CapacityEstimate {
    /// Grid maximum of `|f^h|`; a certified lower bound for the true
    /// supremum, to be read together with the grid metadata.
    pub value: f64,
    pub grid_radius_beta: f64,
    pub grid_step_beta: f64,
    pub grid_points: usize,
    pub argmax: DiscPoint,
}

/// Grid estimate of the hyperbolic Lipschitz constant
/// `sup_z |f^h(z)|` over the lattice of the given radius and step.
pub fn capacity(
    f: &dyn SelfMap,
    grid_radius_beta: f64,
    grid_step_beta: f64,
) -> Result<CapacityEstimate> {
    let grid = hyperbolic_lattice(grid_radius_beta, grid_step_beta)?;
    let best = grid
        .par_iter()
        .enumerate()
        .map(|(idx, z)| hyp_deriv(f, *z).map(|d| (d.norm(), idx)))
        .try_reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;
    Ok(CapacityEstimate {
        value: best.0,
        grid_radius_beta,
        grid_step_beta,
        grid_points: grid.len(),
        argmax: grid[best.1],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioEstimate {
    /// `sup_{n != m} beta(f(z_n), f(z_m)) / beta(z_n, z_m)`.
    pub sup_ratio: f64,
    pub witness: [usize; 2],
}

/// Exact pairwise maximum of the image-to-node distance ratios.
pub fn sampling_ratio(z: &[DiscPoint], f: &dyn SelfMap) -> Result<RatioEstimate> {
    if z.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: z.len() });
    }
    let images: Vec<Complex64> = z.iter().map(|q| f.eval(q.value())).collect();
    for w in &images {
        if w.norm() >= 1.0 - 1e-12 {
            return Err(Error::DegenerateBoundary { modulus: w.norm() });
        }
    }
    let n = z.len();
    let best = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let mut row_best = (f64::NEG_INFINITY, [usize::MAX, usize::MAX]);
            for j in (i + 1)..n {
                let denom = hyp_dist(z[i], z[j]);
                if denom == 0.0 {
                    return Err(Error::DegenerateNodes { i, j });
                }
                let ratio = beta_c(images[i], images[j]) / denom;
                if ratio > row_best.0 {
                    row_best = (ratio, [i, j]);
                }
            }
            Ok(row_best)
        })
        .try_reduce(
            || (f64::NEG_INFINITY, [usize::MAX, usize::MAX]),
            |a, b| Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;
    Ok(RatioEstimate {
        sup_ratio: best.0,
        witness: best.1,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingReport {
    /// Capacity of the minimizing family member.
    pub n_of_f: f64,
    /// Its pairwise ratio supremum and the realizing node pair.
    pub sup_ratio: f64,
    pub ratio_witness: [usize; 2],
    /// `min_f sup_ratio(f) / capacity(f)` over the retained family: an
    /// upper bound for the sampling constant restricted to this family.
    pub c_estimate: f64,
    pub family_size: usize,
    pub witness_function: usize,
    /// Indices excluded for degenerate or below-floor capacity.
    pub excluded: Vec<usize>,
}

/// Per-member measurements from a family scan; `None` entries were
/// excluded by the capacity floor or the boundary guard.
#[derive(Debug, Clone, Serialize)]
pub struct MemberScan {
    pub capacity: Option<f64>,
    pub sup_ratio: Option<f64>,
    pub witness: Option<[usize; 2]>,
    pub excluded: bool,
}

/// Runs capacity and ratio estimation for each family member.
pub fn sampling_scan<F: SelfMap>(
    z: &[DiscPoint],
    family: &[F],
    capacity_radius_beta: f64,
    capacity_step_beta: f64,
) -> Result<Vec<MemberScan>> {
    family
        .par_iter()
        .map(|f| {
            let cap = match capacity(f, capacity_radius_beta, capacity_step_beta) {
                Ok(cap) if cap.value > CAPACITY_FLOOR => cap,
                Ok(cap) => {
                    return Ok(MemberScan {
                        capacity: Some(cap.value),
                        sup_ratio: None,
                        witness: None,
                        excluded: true,
                    })
                }
                Err(Error::DegenerateBoundary { .. }) => {
                    return Ok(MemberScan {
                        capacity: None,
                        sup_ratio: None,
                        witness: None,
                        excluded: true,
                    })
                }
                Err(e) => return Err(e),
            };
            match sampling_ratio(z, f) {
                Ok(ratio) => Ok(MemberScan {
                    capacity: Some(cap.value),
                    sup_ratio: Some(ratio.sup_ratio),
                    witness: Some(ratio.witness),
                    excluded: false,
                }),
                Err(Error::DegenerateBoundary { .. }) => Ok(MemberScan {
                    capacity: Some(cap.value),
                    sup_ratio: None,
                    witness: None,
                    excluded: true,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Scans a family of test functions for the worst ratio-to-capacity
/// quotient of the sequence. Members with capacity below the floor (or
/// failing the boundary guard) are excluded and recorded.
pub fn sampling_constant<F: SelfMap>(
    z: &[DiscPoint],
    family: &[F],
    capacity_radius_beta: f64,
    capacity_step_beta: f64,
) -> Result<SamplingReport> {
    if family.is_empty() {
        return Err(Error::DegenerateFamily);
    }
    let scans = sampling_scan(z, family, capacity_radius_beta, capacity_step_beta)?;
    report_from_scans(&scans, family.len())
}

/// Folds per-member scans into the report.
pub fn report_from_scans(scans: &[MemberScan], family_size: usize) -> Result<SamplingReport> {
    let excluded: Vec<usize> = scans
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.excluded.then_some(i))
        .collect();
    let mut best: Option<(f64, usize)> = None;
    for (i, member) in scans.iter().enumerate() {
        if let (false, Some(cap), Some(ratio)) = (member.excluded, member.capacity, member.sup_ratio)
        {
            let quotient = ratio / cap;
            if best.is_none_or(|(b, _)| quotient < b) {
                best = Some((quotient, i));
            }
        }
    }
    let (c_estimate, witness_function) = best.ok_or(Error::DegenerateFamily)?;
    let winner = &scans[witness_function];
    Ok(SamplingReport {
        n_of_f: winner.capacity.unwrap(),
        sup_ratio: winner.sup_ratio.unwrap(),
        ratio_witness: winner.witness.unwrap(),
        c_estimate,
        family_size,
        witness_function,
        excluded,
    })
}

/// Deterministic family of scaled Blaschke products: degrees uniform in
/// `0..=max_degree`, zeros area-uniform in the hyperbolic disc of radius
/// 3, scale moduli uniform in `[0.3, 1]`, angles uniform.
pub fn make_test_family(seed: u64, count: usize, max_degree: usize) -> Vec<ScaledBlaschke> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = 2.0 * std::f64::consts::PI;
    let sinh_half = (1.5f64).sinh();
    (0..count)
        .map(|_| {
            let rotation = Complex64::from_polar(1.0, rng.gen_range(0.0..tau));
            let scale = Complex64::from_polar(rng.gen_range(0.3..=1.0), rng.gen_range(0.0..tau));
            let degree = rng.gen_range(0..=max_degree);
            let zeros = (0..degree)
                .map(|_| {
                    let s = rng.gen::<f64>().sqrt() * sinh_half;
                    let rho = s / (1.0 + s * s).sqrt();
                    let angle = rng.gen_range(0.0..tau);
                    DiscPoint::from_complex(Complex64::from_polar(rho, angle))
                        .expect("radius tanh(1.5) is interior")
                })
                .collect();
            ScaledBlaschke::new(rotation, scale, zeros).expect("construction is in range")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::Automorphism;
    use crate::selfmap::FnMap;
    use approx::assert_abs_diff_eq;

    fn p(re: f64, im: f64) -> DiscPoint {
        DiscPoint::new(re, im).unwrap()
    }

    #[test]
    fn capacity_of_half_z() {
        // |f^h| = (1 - r^2)/(2 - r^2/2) * ... attains 1/2 at the origin.
        let f = FnMap(|z: Complex64| 0.5 * z);
        let est = capacity(&f, 4.0, 0.1).unwrap();
        assert_abs_diff_eq!(est.value, 0.5, epsilon = 1e-12);
        assert_eq!(est.argmax.value(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn capacity_of_automorphism_is_one() {
        let tau = Automorphism::new(Complex64::from_polar(1.0, 0.2), p(0.4, 0.4)).unwrap();
        let est = capacity(&tau, 3.0, 0.2).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn capacity_of_squaring_climbs_with_radius() {
        // |f^h| = 2r/(1 + r^2) approaches but never attains 1.
        let sq = FnMap(|z: Complex64| z * z);
        let near = capacity(&sq, 2.0, 0.1).unwrap().value;
        let far = capacity(&sq, 6.0, 0.1).unwrap().value;
        assert!(near < far && far < 1.0);
        let r: f64 = 3.0f64.tanh();
        assert_abs_diff_eq!(far, 2.0 * r / (1.0 + r * r), epsilon = 1e-9);
    }

    #[test]
    fn capacity_rejects_unimodular_constants() {
        let f = ScaledBlaschke::constant(Complex64::new(0.0, 1.0)).unwrap();
        assert!(matches!(
            capacity(&f, 2.0, 0.5),
            Err(Error::DegenerateBoundary { .. })
        ));
    }

    #[test]
    fn ratio_of_half_z_on_two_points() {
        let f = FnMap(|z: Complex64| 0.5 * z);
        let est = sampling_ratio(&[p(0.0, 0.0), p(0.5, 0.0)], &f).unwrap();
        assert_abs_diff_eq!(est.sup_ratio, 0.464_973_520_717_927_2, epsilon = 1e-12);
        assert_eq!(est.witness, [0, 1]);
    }

    #[test]
    fn ratio_of_automorphism_is_one() {
        let tau = Automorphism::new(Complex64::from_polar(1.0, -0.5), p(0.2, -0.5)).unwrap();
        let pts = [p(0.0, 0.0), p(0.5, 0.0), p(-0.3, 0.6), p(0.1, -0.8)];
        let est = sampling_ratio(&pts, &tau).unwrap();
        assert_abs_diff_eq!(est.sup_ratio, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ratio_of_constant_is_zero() {
        let f = FnMap(|_| Complex64::new(0.3, 0.1));
        let est = sampling_ratio(&[p(0.0, 0.0), p(0.5, 0.0), p(0.0, 0.5)], &f).unwrap();
        assert_eq!(est.sup_ratio, 0.0);
    }

    #[test]
    fn pairwise_ratios_obey_schwarz_pick() {
        let family = make_test_family(7, 25, 3);
        let pts = [p(0.1, 0.2), p(-0.4, 0.3), p(0.6, 0.0), p(0.0, -0.55), p(0.3, 0.62)];
        for f in &family {
            match sampling_ratio(&pts, f) {
                Ok(est) => assert!(est.sup_ratio <= 1.0 + 1e-9, "ratio {}", est.sup_ratio),
                Err(Error::DegenerateBoundary { .. }) => {}
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn automorphism_family_gives_constant_one() {
        let taus: Vec<Automorphism> = [(0.3, 0.1), (-0.2, 0.4), (0.0, 0.0)]
            .iter()
            .map(|&(x, y)| {
                Automorphism::new(Complex64::from_polar(1.0, x + y), p(x, y)).unwrap()
            })
            .collect();
        let report = sampling_constant(&[p(0.0, 0.0), p(0.5, 0.0)], &taus, 3.0, 0.25).unwrap();
        assert_abs_diff_eq!(report.c_estimate, 1.0, epsilon = 1e-9);
        assert!(report.excluded.is_empty());
    }

    #[test]
    fn boundary_pairs_collapse_for_half_z() {
        // Outermost radial points against f = z/2: the image distance
        // shrinks while the node distance stays bounded below.
        let z: Vec<DiscPoint> = (1..=20).map(|k| p(1.0 - 2f64.powi(-k), 0.0)).collect();
        let tail: Vec<DiscPoint> = z.iter().copied().filter(|q| q.abs() > 0.99).collect();
        let f = [FnMap(|z: Complex64| 0.5 * z)];
        let report = sampling_constant(&tail, &f, 3.0, 0.25).unwrap();
        assert!(report.c_estimate < 0.05, "estimate {}", report.c_estimate);
    }

    #[test]
    fn ratio_decay_is_monotone_along_the_radial_tail() {
        let f = FnMap(|z: Complex64| 0.5 * z);
        let mut previous = f64::INFINITY;
        for k in 5..=19 {
            let a = p(1.0 - 2f64.powi(-k), 0.0);
            let b = p(1.0 - 2f64.powi(-(k + 1)), 0.0);
            let est = sampling_ratio(&[a, b], &f).unwrap();
            assert!(est.sup_ratio < previous);
            previous = est.sup_ratio;
        }
    }

    #[test]
    fn family_generation_is_deterministic() {
        let a = make_test_family(99, 10, 3);
        let b = make_test_family(99, 10, 3);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.rotation(), y.rotation());
            assert_eq!(x.scale(), y.scale());
            assert_eq!(x.zeros().len(), y.zeros().len());
            for (u, v) in x.zeros().iter().zip(y.zeros()) {
                assert_eq!(u.value(), v.value());
            }
        }
        let c = make_test_family(100, 10, 3);
        assert!(a.iter().zip(&c).any(|(x, y)| x.rotation() != y.rotation()));
    }

    #[test]
    fn family_members_stay_in_the_unit_ball() {
        let family = make_test_family(3, 40, 3);
        let grid = hyperbolic_lattice(4.0, 0.35).unwrap();
        for f in &family {
            for z in &grid {
                assert!(f.eval_c(z.value()).norm() <= 1.0 + 1e-12);
            }
            for zero in f.zeros() {
                assert!(hyp_dist(DiscPoint::origin(), *zero) <= 3.0 + 1e-9);
            }
        }
    }

    #[test]
    fn degree_zero_family_is_constant() {
        let family = make_test_family(11, 1, 0);
        assert_eq!(family.len(), 1);
        assert_eq!(family[0].degree(), 0);
        let f = &family[0];
        let v = f.eval_c(Complex64::new(0.3, 0.3));
        assert_eq!(v, f.eval_c(Complex64::new(-0.5, 0.1)));
    }

    #[test]
    fn conformal_invariance_of_the_ratio() {
        // Moving the nodes by tau and testing against f o tau^{-1}
        // reproduces the ratio of (Z, f).
        let tau = Automorphism::new(Complex64::from_polar(1.0, 0.77), p(0.3, -0.2)).unwrap();
        let inv = tau.inverse();
        let pts = [p(0.05, 0.1), p(-0.3, 0.42), p(0.55, 0.0), p(0.0, -0.61)];
        let moved: Vec<DiscPoint> = pts.iter().map(|&q| tau.apply(q).unwrap()).collect();
        let f = ScaledBlaschke::new(
            Complex64::from_polar(1.0, 0.1),
            Complex64::new(0.8, 0.0),
            vec![p(0.25, 0.25), p(-0.4, 0.0)],
        )
        .unwrap();
        let composed = FnMap(move |z: Complex64| f.eval_c(inv.eval_c(z)));
        let f2 = ScaledBlaschke::new(
            Complex64::from_polar(1.0, 0.1),
            Complex64::new(0.8, 0.0),
            vec![p(0.25, 0.25), p(-0.4, 0.0)],
        )
        .unwrap();
        let base = sampling_ratio(&pts, &f2).unwrap();
        let conj = sampling_ratio(&moved, &composed).unwrap();
        assert_abs_diff_eq!(base.sup_ratio, conj.sup_ratio, epsilon = 1e-10);
    }
}
