//! Assembling interpolants from a base solution, a Blaschke factor over
//! its node set, and an outer factor, plus the audits that make the
//! construction checkable: auxiliary target values with their split
//! identity, base-solution property constants, and the stressed value
//! generator for clustered nodes.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::blaschke::{BoundaryModulus, OuterFunction, ScaledBlaschke};
use crate::error::{Error, Result};
use crate::hyperbolic::{beta_c, bracket_c, hyp_dist, hyperbolic_lattice, DiscPoint};
use crate::selfmap::SelfMap;

/// Nodes closer than this (in beta) to a Blaschke zero are rejected:
/// the auxiliary values divide by the Blaschke factor.
pub const POLE_TOL: f64 = 1e-9;

/// The ingredients of the assembled solution
/// `f = f1 - B1 * E1 * f_tilde`: the base interpolant `f1` on the
/// subsequence carried by the zeros of `b1`, the outer factor `e1`, and
/// the correction `f_tilde`.
#[derive(Clone)]
pub struct AssemblyInputs {
    pub f1: Arc<dyn SelfMap>,
    pub b1: ScaledBlaschke,
    pub e1: OuterFunction,
    pub f_tilde: Arc<dyn SelfMap>,
}

impl AssemblyInputs {
    pub fn new(
        f1: Arc<dyn SelfMap>,
        b1: ScaledBlaschke,
        e1: OuterFunction,
        f_tilde: Arc<dyn SelfMap>,
    ) -> Self {
        Self { f1, b1, e1, f_tilde }
    }

    /// The declared base subsequence.
    pub fn z1(&self) -> &[DiscPoint] {
        self.b1.zeros()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuxiliaryValues {
    /// `(f1(z) - w) / (B1(z) E1(z))` per node.
    #[serde(with = "crate::ser::complex_pair_vec")]
    pub w_tilde: Vec<Complex64>,
    /// `2 (f1(z) - f1(z*)) / (B1(z) E1(z))` with `z*` the paired base node.
    #[serde(with = "crate::ser::complex_pair_vec")]
    pub h_part: Vec<Complex64>,
    /// `2 (f1(z*) - w) / (B1(z) E1(z))`.
    #[serde(with = "crate::ser::complex_pair_vec")]
    pub t_part: Vec<Complex64>,
    /// Index of the paired base node per node.
    pub pairing: Vec<usize>,
}

/// Auxiliary interpolation targets for the correction problem, split so
/// that `w_tilde = (h_part + t_part)/2` holds entrywise.
///
/// When `pairing` is not supplied each node is paired with its nearest
/// base node in the hyperbolic metric, ties to the lowest index.
pub fn auxiliary_values(
    inputs: &AssemblyInputs,
    nodes: &[DiscPoint],
    values: &[Complex64],
    pairing: Option<&[usize]>,
) -> Result<AuxiliaryValues> {
    let z1 = inputs.z1();
    if z1.is_empty() {
        return Err(Error::InvalidParameter(
            "assembly needs a nonempty base subsequence".into(),
        ));
    }
    if nodes.len() != values.len() {
        return Err(Error::InvalidParameter(
            "need equally many nodes and values".into(),
        ));
    }
    let pairing: Vec<usize> = match pairing {
        Some(given) => {
            if given.len() != nodes.len() || given.iter().any(|&i| i >= z1.len()) {
                return Err(Error::InvalidParameter(
                    "pairing must map every node to a base index".into(),
                ));
            }
            given.to_vec()
        }
        None => nodes
            .iter()
            .map(|&z| {
                let mut best = (f64::INFINITY, 0usize);
                for (i, &zi) in z1.iter().enumerate() {
                    let d = hyp_dist(z, zi);
                    if d < best.0 {
                        best = (d, i);
                    }
                }
                best.1
            })
            .collect(),
    };

    let mut w_tilde = Vec::with_capacity(nodes.len());
    let mut h_part = Vec::with_capacity(nodes.len());
    let mut t_part = Vec::with_capacity(nodes.len());
    for (m, (&z, &w)) in nodes.iter().zip(values).enumerate() {
        if z1.iter().any(|&zero| hyp_dist(z, zero) < POLE_TOL) {
            return Err(Error::PoleAtNode { index: m });
        }
        let denom = inputs.b1.eval_c(z.value()) * inputs.e1.eval(z)?;
        let f1z = inputs.f1.eval(z.value());
        let f1p = inputs.f1.eval(z1[pairing[m]].value());
        w_tilde.push((f1z - w) / denom);
        h_part.push(2.0 * (f1z - f1p) / denom);
        t_part.push(2.0 * (f1p - w) / denom);
    }
    Ok(AuxiliaryValues {
        w_tilde,
        h_part,
        t_part,
        pairing,
    })
}

/// `f(z) = f1(z) - B1(z) E1(z) f_tilde(z)`.
///
/// At the zeros of `B1` this reduces to `f1` exactly; at a node where
/// `f_tilde` hits the auxiliary target, it reproduces the original
/// value. Membership in the unit ball is audited on grids, not assumed.
#[derive(Clone)]
pub struct AssembledSolution {
    inputs: AssemblyInputs,
}

pub fn assemble_solution(inputs: &AssemblyInputs) -> AssembledSolution {
    AssembledSolution {
        inputs: inputs.clone(),
    }
}

impl SelfMap for AssembledSolution {
    fn eval(&self, z: Complex64) -> Complex64 {
        let i = &self.inputs;
        i.f1.eval(z) - i.b1.eval_c(z) * i.e1.eval_unchecked(z) * i.f_tilde.eval(z)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AuditGrid {
    pub radius_beta: f64,
    pub step_beta: f64,
    pub boundary_nodes: usize,
}

impl Default for AuditGrid {
    fn default() -> Self {
        Self {
            radius_beta: 3.0,
            step_beta: 0.1,
            boundary_nodes: 2048,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct F1Audit {
    /// `min |E1(z)| / (1 - |f1(z)|)` over the grid.
    pub outer_floor_constant: f64,
    /// `max beta(f1(z), f1(z_i)) / (eps beta(z, z_i))` over grid points
    /// within `eta1` of some base node.
    pub local_lipschitz_constant: f64,
    /// Grid points dropped from the floor-constant minimum because `1 - |f1|`
    /// fell below 1e-9.
    pub outer_floor_excluded: usize,
    pub lipschitz_pairs: usize,
    pub grid_points: usize,
}

/// Measures the two properties the assembly relies on for a candidate
/// base solution, over a hyperbolic grid truncated to the outer
/// function's quadrature margin.
pub fn audit_f1_properties(
    f1: Arc<dyn SelfMap>,
    z1: &[DiscPoint],
    eta1: f64,
    eps: f64,
    grid: &AuditGrid,
) -> Result<F1Audit> {
    if !(eta1 > 0.0) || !(eps > 0.0) {
        return Err(Error::InvalidParameter("eta1 and eps must be positive".into()));
    }
    let modulus = BoundaryModulus::one_minus_abs(f1.clone(), grid.boundary_nodes)?;
    let outer = OuterFunction::from_modulus(&modulus)?;
    let points: Vec<DiscPoint> = hyperbolic_lattice(grid.radius_beta, grid.step_beta)?
        .into_iter()
        .filter(|z| z.abs() <= 1.0 - outer.margin())
        .collect();

    let (outer_floor_constant, outer_floor_excluded) = points
        .par_iter()
        .map(|&z| {
            let denom = 1.0 - f1.eval(z.value()).norm();
            if denom < 1e-9 {
                (f64::INFINITY, 1usize)
            } else {
                (outer.eval_unchecked(z.value()).norm() / denom, 0)
            }
        })
        .reduce(
            || (f64::INFINITY, 0usize),
            |a, b| (a.0.min(b.0), a.1 + b.1),
        );

    let f1_at_base: Vec<Complex64> = z1.iter().map(|&zi| f1.eval(zi.value())).collect();
    let (local_lipschitz_constant, lipschitz_pairs) = points
        .par_iter()
        .map(|&z| {
            let f1z = f1.eval(z.value());
            let mut worst = 0.0f64;
            let mut pairs = 0usize;
            for (&zi, &f1zi) in z1.iter().zip(&f1_at_base) {
                let d = hyp_dist(z, zi);
                if d == 0.0 || d > eta1 {
                    continue;
                }
                if f1z.norm() >= 1.0 - 1e-12 || f1zi.norm() >= 1.0 - 1e-12 {
                    continue;
                }
                worst = worst.max(beta_c(f1z, f1zi) / (eps * d));
                pairs += 1;
            }
            (worst, pairs)
        })
        .reduce(|| (0.0f64, 0usize), |a, b| (a.0.max(b.0), a.1 + b.1));

    Ok(F1Audit {
        outer_floor_constant,
        local_lipschitz_constant,
        outer_floor_excluded,
        lipschitz_pairs,
        grid_points: points.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StressValues {
    /// Values in the original cluster order: zero everywhere except the
    /// selected special point, which carries `eps * x`.
    #[serde(with = "crate::ser::complex_pair_vec")]
    pub values: Vec<Complex64>,
    #[serde(with = "crate::ser::complex_pair")]
    pub x: Complex64,
    /// Index of the point carrying the nonzero value (the one nearest to
    /// the first cluster point).
    pub special_index: usize,
    /// Index left out of the bracket product (the point farthest from
    /// the special one).
    pub excluded_index: usize,
    /// Cluster indices in the relabeled order used by the construction;
    /// the excluded point is second to last, the special point last.
    pub relabeling: Vec<usize>,
}

/// Stressed interpolation targets for a cluster of `n + 1` points:
/// zeros except one value `eps * x` with
/// `x = C * prod [z_special, z_j]` over the relabeled leading points.
/// Any `n`-point subproblem then satisfies the column compatibility
/// bound `C * eps`, while the full cluster does not stay strictly
/// solvable once the cluster is tight enough.
pub fn necessity_stress(
    cluster: &[DiscPoint],
    eps: f64,
    c_const: f64,
) -> Result<StressValues> {
    if cluster.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: cluster.len(),
        });
    }
    if !(c_const > 0.0 && c_const < 1.0) {
        return Err(Error::InvalidParameter("C must lie in (0, 1)".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    for i in 0..cluster.len() {
        for j in (i + 1)..cluster.len() {
            if cluster[i].value() == cluster[j].value() {
                return Err(Error::DegenerateNodes { i, j });
            }
        }
    }

    // Nearest to the first point becomes the special (valued) point.
    let special_index = (1..cluster.len())
        .min_by(|&a, &b| {
            hyp_dist(cluster[0], cluster[a])
                .partial_cmp(&hyp_dist(cluster[0], cluster[b]))
                .unwrap()
                .then(a.cmp(&b))
        })
        .expect("cluster has at least two points");
    let rest: Vec<usize> = (0..cluster.len()).filter(|&i| i != special_index).collect();
    // Farthest from the special point drops out of the product.
    let excluded_index = *rest
        .iter()
        .max_by(|&&a, &&b| {
            hyp_dist(cluster[a], cluster[special_index])
                .partial_cmp(&hyp_dist(cluster[b], cluster[special_index]))
                .unwrap()
                .then(b.cmp(&a))
        })
        .expect("rest is nonempty");

    let mut x = Complex64::new(c_const, 0.0);
    let mut relabeling = Vec::with_capacity(cluster.len());
    for &j in &rest {
        if j != excluded_index {
            x *= bracket_c(cluster[special_index].value(), cluster[j].value());
            relabeling.push(j);
        }
    }
    relabeling.push(excluded_index);
    relabeling.push(special_index);

    let target = eps * x;
    if !(target.norm() <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps * |x| = {} exceeds 1; shrink eps",
            target.norm()
        )));
    }
    let mut values = vec![Complex64::new(0.0, 0.0); cluster.len()];
    values[special_index] = target;
    Ok(StressValues {
        values,
        x,
        special_index,
        excluded_index,
        relabeling,
    })
}
