//! Geometric classification of node sequences: separation constants,
//! greedy separated partitions, Carleson-square layer counts, dyadic
//! density fitting, and grid-based density radii.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{hyp_dist, hyperbolic_lattice, DiscPoint};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// The boundary box `{r e^{i theta}: 0 < 1 - r < side, |theta - theta0| < side}`,
/// with the angle difference wrapped into `(-pi, pi]`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CarlesonSquare {
    pub theta0: f64,
    pub side: f64,
}

impl CarlesonSquare {
    pub fn new(theta0: f64, side: f64) -> Result<Self> {
        if !(side > 0.0) {
            return Err(Error::InvalidParameter("square side must be positive".into()));
        }
        Ok(Self { theta0, side })
    }

    fn angle_gap(&self, z: DiscPoint) -> f64 {
        let mut d = (z.value().arg() - self.theta0).rem_euclid(TAU);
        if d > std::f64::consts::PI {
            d -= TAU;
        }
        d.abs()
    }

    pub fn contains(&self, z: DiscPoint) -> bool {
        let depth = 1.0 - z.abs();
        depth > 0.0 && depth < self.side && self.angle_gap(z) < self.side
    }

    /// Dyadic layer index `m >= 1` with
    /// `2^{-m-1} side < 1 - |z| <= 2^{-m} side`, searched up to `m_max`.
    /// The outer bound is inclusive, the inner strict.
    pub fn layer_of(&self, z: DiscPoint, m_max: usize) -> Option<usize> {
        if self.angle_gap(z) >= self.side {
            return None;
        }
        let depth = 1.0 - z.abs();
        for m in 1..=m_max {
            let outer = self.side * 2f64.powi(-(m as i32));
            let inner = 0.5 * outer;
            if inner < depth && depth <= outer {
                return Some(m);
            }
        }
        None
    }
}

/// Points of `Z` in each dyadic layer of `Q`, for `m = 1..=m_max`
/// (`counts[m - 1]` is layer `m`).
pub fn carleson_layer_counts(z: &[DiscPoint], q: &CarlesonSquare, m_max: usize) -> Vec<usize> {
    let mut counts = vec![0usize; m_max];
    for point in z {
        if let Some(m) = q.layer_of(*point, m_max) {
            counts[m - 1] += 1;
        }
    }
    counts
}

/// Exact pairwise minimum of the hyperbolic distance.
pub fn separation_constant(z: &[DiscPoint]) -> Result<f64> {
    if z.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: z.len() });
    }
    let mut min = f64::INFINITY;
    for i in 0..z.len() {
        for j in (i + 1)..z.len() {
            let d = hyp_dist(z[i], z[j]);
            if d == 0.0 {
                return Err(Error::DegenerateNodes { i, j });
            }
            min = min.min(d);
        }
    }
    Ok(min)
}

#[derive(Debug, Clone, Serialize)]
pub struct Partition {
    /// Index lists, each separated by at least the requested constant.
    pub parts: Vec<Vec<usize>>,
    pub part_count: usize,
}

/// Greedy first-fit partition into separated subsequences: points are
/// colored in order of decreasing distance to the boundary, each taking
/// the first part it does not crowd. The count is an upper bound on the
/// minimal number of parts.
pub fn decompose_separated(z: &[DiscPoint], eta_target: f64) -> Result<Partition> {
    if !(eta_target > 0.0) {
        return Err(Error::InvalidParameter("eta_target must be positive".into()));
    }
    // Decreasing 1 - |z|, i.e. innermost points first; ties by index.
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[a].abs().partial_cmp(&z[b].abs()).unwrap().then(a.cmp(&b)));
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        let slot = parts.iter().position(|part| {
            part.iter().all(|&other| hyp_dist(z[idx], z[other]) >= eta_target)
        });
        match slot {
            Some(s) => parts[s].push(idx),
            None => parts.push(vec![idx]),
        }
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    let part_count = parts.len();
    Ok(Partition { parts, part_count })
}

/// Greedy clique among points pairwise closer than `eta_target`; a lower
/// bound on the number of parts any separated partition needs.
pub fn clique_lower_bound(z: &[DiscPoint], eta_target: f64) -> usize {
    let n = z.len();
    let close =
        |a: usize, b: usize| -> bool { hyp_dist(z[a], z[b]) < eta_target };
    let mut best = usize::from(n > 0);
    for start in 0..n {
        let mut clique = vec![start];
        for cand in 0..n {
            if cand != start && clique.iter().all(|&m| close(m, cand)) {
                clique.push(cand);
            }
        }
        best = best.max(clique.len());
    }
    best
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityFit {
    /// `max counts[m] 2^{-alpha m}` over the audited family at the
    /// fitted alpha.
    pub m_const: f64,
    pub alpha: f64,
    /// Whether some grid alpha passed the growth test; when none did,
    /// the largest grid value is reported with `accepted = false`.
    pub accepted: bool,
    pub squares_audited: usize,
    pub depth: usize,
}

/// Fits `(M, alpha)` with `counts[m] <= M 2^{alpha m}` over the dyadic
/// square family `{theta0 = 2 pi j 2^{-l}, side = 2 pi 2^{-l}}`, plus a
/// square of every dyadic side centered at each point's angle.
///
/// An alpha is accepted when no audited square shows growth into its
/// deepest populated layer: whenever a square has more than one
/// populated layer, the weighted count `counts[m] 2^{-alpha m}` at the
/// deepest one must not strictly exceed every earlier populated layer.
/// The reported `M` is the weighted maximum over the whole family at the
/// returned alpha.
pub fn fit_density(z: &[DiscPoint], depth: usize, alpha_grid: &[f64]) -> Result<DensityFit> {
    if depth == 0 || depth > 14 {
        return Err(Error::InvalidParameter("depth must lie in 1..=14".into()));
    }
    if alpha_grid.is_empty() || alpha_grid.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(Error::InvalidParameter(
            "alpha grid must be nonempty inside (0, 1)".into(),
        ));
    }
    let mut grid: Vec<f64> = alpha_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut squares = Vec::new();
    for l in 0..=depth {
        let side = TAU * 2f64.powi(-(l as i32));
        for j in 0..(1usize << l) {
            squares.push(CarlesonSquare { theta0: TAU * j as f64 / (1 << l) as f64, side });
        }
        for point in z {
            squares.push(CarlesonSquare { theta0: point.value().arg(), side });
        }
    }
    let tables: Vec<Vec<usize>> = squares
        .iter()
        .map(|q| carleson_layer_counts(z, q, depth))
        .collect();

    let weighted_max = |alpha: f64| -> (f64, bool) {
        let mut max = 0.0f64;
        let mut accepted = true;
        for table in &tables {
            let mut earlier_max: Option<f64> = None;
            let mut deepest: Option<f64> = None;
            for (idx, &count) in table.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let m = idx + 1;
                let v = count as f64 * 2f64.powf(-alpha * m as f64);
                max = max.max(v);
                if let Some(d) = deepest {
                    earlier_max = Some(earlier_max.map_or(d, |e| e.max(d)));
                }
                deepest = Some(v);
            }
            if let (Some(d), Some(e)) = (deepest, earlier_max) {
                if d > e {
                    accepted = false;
                }
            }
        }
        (max, accepted)
    };

    let mut last = (0.0, false, grid[0]);
    for &alpha in &grid {
        let (m_const, accepted) = weighted_max(alpha);
        if accepted {
            return Ok(DensityFit {
                m_const,
                alpha,
                accepted: true,
                squares_audited: squares.len(),
                depth,
            });
        }
        last = (m_const, false, alpha);
    }
    Ok(DensityFit {
        m_const: last.0,
        alpha: last.2,
        accepted: false,
        squares_audited: squares.len(),
        depth,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityEstimate {
    /// Largest distance from a probe to the sequence: every probed point
    /// is within `r` of `Z`, and the true covering radius of the probed
    /// region lies within `grid_step_beta` below `r`.
    pub r: f64,
    pub probe_radius_beta: f64,
    pub grid_step_beta: f64,
    pub probe_count: usize,
    pub witness_probe: DiscPoint,
}

/// Covering radius of `Z` over a probe lattice filling the hyperbolic
/// disc of radius `probe_radius_beta` about the origin. The probed
/// region is bounded; the global condition is not decided here.
pub fn r_density(
    z: &[DiscPoint],
    probe_radius_beta: f64,
    grid_step_beta: f64,
) -> Result<DensityEstimate> {
    if z.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let probes = hyperbolic_lattice(probe_radius_beta, grid_step_beta)?;
    let (r, witness) = probes
        .par_iter()
        .enumerate()
        .map(|(idx, probe)| {
            let nearest = z
                .iter()
                .map(|point| hyp_dist(*probe, *point))
                .fold(f64::INFINITY, f64::min);
            (nearest, idx)
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(DensityEstimate {
        r,
        probe_radius_beta,
        grid_step_beta,
        probe_count: probes.len(),
        witness_probe: probes[witness],
    })
}

/// Combined audit of the two order-interpolation hypotheses for a target
/// of `n` separated parts.
#[derive(Debug, Clone, Serialize)]
pub struct SequenceReport {
    pub order: usize,
    pub separation_eta: f64,
    pub parts: Vec<Vec<usize>>,
    pub part_count: usize,
    pub condition_a: bool,
    /// Set when condition (a) fails: a certified lower bound on the
    /// number of parts needed.
    pub clique_lower_bound: Option<usize>,
    pub carleson_m: f64,
    pub carleson_alpha: f64,
    pub carleson_alpha_accepted: bool,
    pub condition_b: bool,
    pub density_r: Option<f64>,
}

pub fn order_check(
    z: &[DiscPoint],
    n: usize,
    eta_target: f64,
    depth: usize,
    alpha_grid: &[f64],
) -> Result<SequenceReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("order target n must be positive".into()));
    }
    let separation_eta = separation_constant(z)?;
    let partition = decompose_separated(z, eta_target)?;
    let condition_a = partition.part_count <= n;
    let clique = if condition_a {
        None
    } else {
        Some(clique_lower_bound(z, eta_target))
    };
    let fit = fit_density(z, depth, alpha_grid)?;
    let condition_b = fit.accepted && fit.alpha < 1.0;
    Ok(SequenceReport {
        order: n - 1,
        separation_eta,
        parts: partition.parts,
        part_count: partition.part_count,
        condition_a,
        clique_lower_bound: clique,
        carleson_m: fit.m_const,
        carleson_alpha: fit.alpha,
        carleson_alpha_accepted: fit.accepted,
        condition_b,
        density_r: None,
    })
}
