//! Triangles of hyperbolic difference quotients.
//!
//! Given nodes `z_1..z_n` and values `w_1..w_n`, the triangle holds
//! `D(0, j) = w_j` and
//! `D(k, j) = [D(k-1, j), D(k-1, k)] / [z_j, z_k]` for `k < j`
//! (1-based in that formula; this module indexes rows and levels from 0).
//! Entries of modulus `>= 1 - SATURATION_TOL` are flagged saturated and
//! poison their descendants: a bracket against a unimodular value
//! collapses to a constant, so anything computed from it would be
//! misleading.

use itertools::Itertools;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{beta_c, bracket_c, DiscPoint};
use crate::selfmap::SelfMap;

pub const SATURATION_TOL: f64 = 1e-12;

/// Sweeps are exhaustive up to 7! arrangements and sampled above.
pub const DEFAULT_PERMUTATION_BUDGET: usize = 10_000;

/// Distance below which an evaluation point counts as sitting on a base
/// node and the quotient is taken as a limit.
pub const DIAGONAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TriangleEntry {
    Value { value: Complex64, saturated: bool },
    /// An ancestor saturated; this entry was not computed.
    Poisoned,
}

impl TriangleEntry {
    pub fn value(&self) -> Option<Complex64> {
        match self {
            TriangleEntry::Value { value, .. } => Some(*value),
            TriangleEntry::Poisoned => None,
        }
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self, TriangleEntry::Value { saturated: true, .. })
    }

    pub fn is_poisoned(&self) -> bool {
        matches!(self, TriangleEntry::Poisoned)
    }

    /// Usable for brackets: finite, strictly inside the saturation band.
    fn usable(&self) -> Option<Complex64> {
        match self {
            TriangleEntry::Value { value, saturated: false } => Some(*value),
            _ => None,
        }
    }
}

impl Serialize for TriangleEntry {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            TriangleEntry::Value { value, saturated } => {
                let mut s = serializer.serialize_struct("TriangleEntry", 2)?;
                s.serialize_field("value", &[value.re, value.im])?;
                s.serialize_field("saturated", saturated)?;
                s.end()
            }
            TriangleEntry::Poisoned => {
                let mut s = serializer.serialize_struct("TriangleEntry", 1)?;
                s.serialize_field("poisoned", &true)?;
                s.end()
            }
        }
    }
}

/// Lower-triangular table of difference quotients together with the node
/// ordering that produced it. Row `j` holds levels `0..=j`.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientTriangle {
    nodes: Vec<DiscPoint>,
    rows: Vec<Vec<TriangleEntry>>,
}

impl QuotientTriangle {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[DiscPoint] {
        &self.nodes
    }

    /// Entry at level `k`, row `j` (0-based, `k <= j`).
    pub fn entry(&self, k: usize, j: usize) -> &TriangleEntry {
        &self.rows[j][k]
    }

    pub fn rows(&self) -> &[Vec<TriangleEntry>] {
        &self.rows
    }

    /// Diagonal entry `D(k, k)`; these parametrize Schur chains.
    pub fn diagonal(&self, k: usize) -> &TriangleEntry {
        &self.rows[k][k]
    }

    pub fn any_saturated(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .any(|e| e.is_saturated() || e.is_poisoned())
    }

    /// Largest modulus over computed entries (all levels).
    pub fn max_modulus(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .filter_map(|e| e.value().map(|v| v.norm()))
            .fold(0.0, f64::max)
    }

    /// Smallest `1 - |entry|` over computed entries; negative when some
    /// entry leaves the closed disc.
    pub fn margin(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .filter_map(|e| e.value().map(|v| 1.0 - v.norm()))
            .fold(f64::INFINITY, f64::min)
    }

}

fn check_nodes_distinct(nodes: &[DiscPoint]) -> Result<()> {
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            if nodes[i].value() == nodes[j].value() {
                return Err(Error::DegenerateNodes { i, j });
            }
        }
    }
    Ok(())
}

fn check_values(values: &[Complex64]) -> Result<()> {
    for value in values {
        let modulus = value.norm();
        if !(modulus <= 1.0 + 1e-12) {
            return Err(Error::ValueOutsideClosedDisc { modulus });
        }
    }
    Ok(())
}

fn entry_from(value: Complex64) -> TriangleEntry {
    TriangleEntry::Value {
        value,
        saturated: value.norm() >= 1.0 - SATURATION_TOL,
    }
}

/// Builds the full triangle for the given node order.
pub fn build_triangle(nodes: &[DiscPoint], values: &[Complex64]) -> Result<QuotientTriangle> {
    if nodes.len() != values.len() || nodes.is_empty() {
        return Err(Error::InvalidParameter(
            "need equally many nodes and values, at least one each".into(),
        ));
    }
    check_nodes_distinct(nodes)?;
    check_values(values)?;

    let n = nodes.len();
    let mut rows: Vec<Vec<TriangleEntry>> = Vec::with_capacity(n);
    for (j, &value) in values.iter().enumerate() {
        let mut row = Vec::with_capacity(j + 1);
        row.push(entry_from(value));
        rows.push(row);
    }
    for k in 1..n {
        for j in k..n {
            let pivot = rows[k - 1][k - 1];
            let above = rows[j][k - 1];
            let entry = match (above.usable(), pivot.usable()) {
                (Some(a), Some(b)) => {
                    let num = bracket_c(a, b);
                    let den = bracket_c(nodes[j].value(), nodes[k - 1].value());
                    entry_from(num / den)
                }
                _ => TriangleEntry::Poisoned,
            };
            rows[j].push(entry);
        }
    }
    Ok(QuotientTriangle {
        nodes: nodes.to_vec(),
        rows,
    })
}

/// Bracket of two interior values; a vanishing denominator with equal
/// arguments collapses to zero (constant level), otherwise it means a
/// boundary value was hit.
fn checked_bracket(a: Complex64, b: Complex64) -> Result<Complex64> {
    let den = Complex64::new(1.0, 0.0) - b.conj() * a;
    if den.norm() < 1e-14 {
        if (a - b).norm() < 1e-10 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::DegenerateBoundary { modulus: b.norm() });
    }
    Ok((b - a) / den)
}

fn limit_direction(zk: Complex64) -> Complex64 {
    // Step inward when the node is away from the origin so the probe
    // points stay well inside the disc.
    if zk.norm() > 0.5 {
        -zk / Complex64::new(zk.norm(), 0.0)
    } else {
        Complex64::new(1.0, 0.0)
    }
}

fn delta_rec(f: &dyn SelfMap, bases: &[DiscPoint], z: Complex64) -> Result<Complex64> {
    let Some((zk, head)) = bases.split_last() else {
        return Ok(f.eval(z));
    };
    let zkc = zk.value();
    if (z - zkc).norm() < DIAGONAL_TOL {
        return diagonal_limit(f, head, zkc);
    }
    let gz = delta_rec(f, head, z)?;
    let gzk = delta_rec(f, head, zkc)?;
    Ok(checked_bracket(gz, gzk)? / bracket_c(z, zkc))
}

/// Richardson extrapolation of the off-diagonal quotient along probe
/// points `z_k + h u`, h = 1e-3, 1e-4, 1e-5.
fn diagonal_limit(f: &dyn SelfMap, head: &[DiscPoint], zk: Complex64) -> Result<Complex64> {
    let dir = limit_direction(zk);
    let gzk = delta_rec(f, head, zk)?;
    let probe = |h: f64| -> Result<Complex64> {
        let zz = zk + Complex64::new(h, 0.0) * dir;
        let gz = delta_rec(f, head, zz)?;
        Ok(checked_bracket(gz, gzk)? / bracket_c(zz, zk))
    };
    let v1 = probe(1e-3)?;
    let v2 = probe(1e-4)?;
    let v3 = probe(1e-5)?;
    let e1 = (v2 * 10.0 - v1) / 9.0;
    let e2 = (v3 * 10.0 - v2) / 9.0;
    let spread = (e2 - e1).norm();
    // Written so NaN spreads fail closed.
    if !(spread <= 1e-4 * (1.0 + e2.norm())) {
        return Err(Error::LimitDivergence { spread });
    }
    Ok((e2 * 100.0 - e1) / 99.0)
}

/// The k-th difference quotient of a function over the first `k` base
/// nodes, interpreted as a limit when `z` sits on a base node.
pub fn delta_k_of_function(
    f: &dyn SelfMap,
    base_nodes: &[DiscPoint],
    z: DiscPoint,
    k: usize,
) -> Result<Complex64> {
    if k > base_nodes.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the {} base nodes",
            base_nodes.len()
        )));
    }
    check_nodes_distinct(&base_nodes[..k])?;
    delta_rec(f, &base_nodes[..k], z.value())
}

/// Maximum deviation between the data triangle of `(z_j, f(z_j))` and the
/// function quotients evaluated at the data nodes. Poisoned entries are
/// skipped.
pub fn verify_data_function_identity(f: &dyn SelfMap, nodes: &[DiscPoint]) -> Result<f64> {
    check_nodes_distinct(nodes)?;
    let values: Vec<Complex64> = nodes.iter().map(|z| f.eval(z.value())).collect();
    let triangle = build_triangle(nodes, &values)?;
    let mut worst = 0.0_f64;
    for j in 0..nodes.len() {
        for k in 0..=j {
            let Some(entry) = triangle.entry(k, j).value() else {
                continue;
            };
            let from_function = delta_k_of_function(f, &nodes[..k], nodes[j], k)?;
            worst = worst.max((entry - from_function).norm());
        }
    }
    Ok(worst)
}

/// How a permutation sweep enumerates arrangements.
#[derive(Debug, Clone, Copy)]
pub enum PermutationSweep {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

impl PermutationSweep {
    /// Exhaustive up to 7 points, sampled with 10^4 draws above.
    pub fn default_for(n: usize, seed: u64) -> Self {
        if n <= 7 {
            PermutationSweep::Exhaustive
        } else {
            PermutationSweep::Sampled {
                count: DEFAULT_PERMUTATION_BUDGET,
                seed,
            }
        }
    }
}

/// Number of ordered `s`-arrangements of `n` items, `None` on overflow.
fn arrangement_count(n: usize, s: usize) -> Option<usize> {
    let mut total: usize = 1;
    for i in 0..s {
        total = total.checked_mul(n - i)?;
    }
    Some(total)
}

/// Ordered index arrangements of size `s`, exhaustive when the count fits
/// the budget, otherwise `budget` seeded draws.
fn arrangements(n: usize, s: usize, budget: usize, seed: u64) -> (Vec<Vec<usize>>, bool) {
    match arrangement_count(n, s) {
        Some(total) if total <= budget => ((0..n).permutations(s).collect(), true),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let draws = (0..budget)
                .map(|_| rand::seq::index::sample(&mut rng, n, s).into_vec())
                .collect();
            (draws, false)
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SweepWitness {
    /// Triangle level of the offending pair or entry.
    pub level: usize,
    /// Row positions inside the arrangement.
    pub i: usize,
    pub j: usize,
    /// Index of the arrangement in enumeration (or draw) order.
    pub perm_id: usize,
    /// Original node indices in the order used.
    pub arrangement: Vec<usize>,
}

/// Result of the compatibility-constant sweep.
///
/// `epsilon_min` is the largest observed ratio
/// `beta(D(k,i), D(k,j)) / beta(z_i, z_j)` over all checked arrangements,
/// i.e. the smallest constant for which the checked data satisfies the
/// compatibility condition. A saturated entry inside a swept level makes
/// the ratio infinite; that is reported through `saturated_witness`
/// rather than folded into the number.
#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityReport {
    pub epsilon_min: f64,
    pub worst_witness: Option<SweepWitness>,
    pub saturated_witness: Option<SweepWitness>,
    pub permutations_checked: usize,
    pub exhaustive: bool,
    pub subset_size: usize,
}

struct SweepOutcome {
    best_ratio: f64,
    best: Option<SweepWitness>,
    saturated: Option<SweepWitness>,
}

fn witness_key(w: &SweepWitness) -> (usize, usize, usize, usize) {
    (w.perm_id, w.level, w.i, w.j)
}

fn merge_outcomes(mut a: SweepOutcome, b: SweepOutcome) -> SweepOutcome {
    let take_b = b.best_ratio > a.best_ratio
        || (b.best_ratio == a.best_ratio
            && match (&a.best, &b.best) {
                (Some(x), Some(y)) => witness_key(y) < witness_key(x),
                (None, Some(_)) => true,
                _ => false,
            });
    if take_b {
        a.best_ratio = b.best_ratio;
        a.best = b.best;
    }
    a.saturated = match (a.saturated, b.saturated) {
        (Some(x), Some(y)) => Some(if witness_key(&y) < witness_key(&x) { y } else { x }),
        (x, y) => x.or(y),
    };
    a
}

/// Sweep of the compatibility ratios over ordered subsets of the data.
pub fn epsilon_of(
    nodes: &[DiscPoint],
    values: &[Complex64],
    subset_size: usize,
    permutation_budget: usize,
    seed: u64,
) -> Result<CompatibilityReport> {
    if nodes.len() != values.len() {
        return Err(Error::InvalidParameter(
            "need equally many nodes and values".into(),
        ));
    }
    if subset_size < 2 || subset_size > nodes.len() {
        return Err(Error::InvalidParameter(format!(
            "subset_size must lie in [2, {}]",
            nodes.len()
        )));
    }
    check_nodes_distinct(nodes)?;
    check_values(values)?;

    let (arrs, exhaustive) = arrangements(nodes.len(), subset_size, permutation_budget, seed);
    let permutations_checked = arrs.len();

    let outcome = arrs
        .par_iter()
        .enumerate()
        .map(|(perm_id, arr)| sweep_one(nodes, values, perm_id, arr))
        .try_reduce(
            || SweepOutcome {
                best_ratio: 0.0,
                best: None,
                saturated: None,
            },
            |a, b| Ok(merge_outcomes(a, b)),
        )?;

    Ok(CompatibilityReport {
        epsilon_min: outcome.best_ratio,
        worst_witness: outcome.best,
        saturated_witness: outcome.saturated,
        permutations_checked,
        exhaustive,
        subset_size,
    })
}

fn sweep_one(
    nodes: &[DiscPoint],
    values: &[Complex64],
    perm_id: usize,
    arr: &[usize],
) -> Result<SweepOutcome> {
    let sub_nodes: Vec<DiscPoint> = arr.iter().map(|&i| nodes[i]).collect();
    let sub_values: Vec<Complex64> = arr.iter().map(|&i| values[i]).collect();
    let triangle = build_triangle(&sub_nodes, &sub_values)?;
    let s = arr.len();
    let mut out = SweepOutcome {
        best_ratio: 0.0,
        best: None,
        saturated: None,
    };
    // Pairs exist at levels 0..=s-2 only.
    for k in 0..=(s - 2) {
        for i in k..s {
            for j in (i + 1)..s {
                let witness = || SweepWitness {
                    level: k,
                    i,
                    j,
                    perm_id,
                    arrangement: arr.to_vec(),
                };
                let (a, b) = match (triangle.entry(k, i).usable(), triangle.entry(k, j).usable()) {
                    (Some(a), Some(b)) => (a, b),
                    _ => {
                        if out.saturated.is_none() {
                            out.saturated = Some(witness());
                        }
                        continue;
                    }
                };
                let ratio = beta_c(a, b) / beta_c(sub_nodes[i].value(), sub_nodes[j].value());
                if out.best.is_none() || ratio > out.best_ratio {
                    out.best_ratio = ratio;
                    out.best = Some(witness());
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnWitness {
    pub level: usize,
    pub row: usize,
    pub modulus: Option<f64>,
    pub perm_id: usize,
    pub arrangement: Vec<usize>,
}

/// Result of checking `|D(k, j)| <= eps` for all levels `k >= 1` over the
/// requested permutations.
#[derive(Debug, Clone, Serialize)]
pub struct ColumnCheck {
    pub holds: bool,
    pub witness: Option<ColumnWitness>,
    /// Largest level->=1 modulus over computed entries in the sweep.
    pub max_modulus: f64,
    pub poisoned_encountered: bool,
    pub permutations_checked: usize,
    pub exhaustive: bool,
}

/// Checks the column form of the compatibility condition over full-length
/// permutations of the data.
pub fn column_condition_check(
    nodes: &[DiscPoint],
    values: &[Complex64],
    eps: f64,
    sweep: PermutationSweep,
) -> Result<ColumnCheck> {
    if nodes.len() != values.len() || nodes.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: nodes.len(),
        });
    }
    check_nodes_distinct(nodes)?;
    check_values(values)?;

    let n = nodes.len();
    let (arrs, exhaustive) = match sweep {
        PermutationSweep::Exhaustive => arrangements(n, n, usize::MAX, 0),
        PermutationSweep::Sampled { count, seed } => arrangements(n, n, count, seed),
    };
    let permutations_checked = arrs.len();

    struct ColOutcome {
        witness: Option<ColumnWitness>,
        max_modulus: f64,
        poisoned: bool,
    }

    let outcome = arrs
        .par_iter()
        .enumerate()
        .map(|(perm_id, arr)| -> Result<ColOutcome> {
            let sub_nodes: Vec<DiscPoint> = arr.iter().map(|&i| nodes[i]).collect();
            let sub_values: Vec<Complex64> = arr.iter().map(|&i| values[i]).collect();
            let triangle = build_triangle(&sub_nodes, &sub_values)?;
            let mut witness = None;
            let mut max_modulus = 0.0_f64;
            let mut poisoned = false;
            'scan: for k in 1..n {
                for j in k..n {
                    match triangle.entry(k, j) {
                        TriangleEntry::Value { value, .. } => {
                            let m = value.norm();
                            max_modulus = max_modulus.max(m);
                            if m > eps {
                                witness = Some(ColumnWitness {
                                    level: k,
                                    row: j,
                                    modulus: Some(m),
                                    perm_id,
                                    arrangement: arr.to_vec(),
                                });
                                break 'scan;
                            }
                        }
                        TriangleEntry::Poisoned => {
                            poisoned = true;
                            witness = Some(ColumnWitness {
                                level: k,
                                row: j,
                                modulus: None,
                                perm_id,
                                arrangement: arr.to_vec(),
                            });
                            break 'scan;
                        }
                    }
                }
            }
            Ok(ColOutcome {
                witness,
                max_modulus,
                poisoned,
            })
        })
        .try_reduce(
            || ColOutcome {
                witness: None,
                max_modulus: 0.0,
                poisoned: false,
            },
            |mut a, b| {
                a.witness = match (a.witness, b.witness) {
                    (Some(x), Some(y)) => {
                        Some(if (y.perm_id, y.level, y.row) < (x.perm_id, x.level, x.row) {
                            y
                        } else {
                            x
                        })
                    }
                    (x, y) => x.or(y),
                };
                a.max_modulus = a.max_modulus.max(b.max_modulus);
                a.poisoned |= b.poisoned;
                Ok(a)
            },
        )?;

    Ok(ColumnCheck {
        holds: outcome.witness.is_none(),
        witness: outcome.witness,
        max_modulus: outcome.max_modulus,
        poisoned_encountered: outcome.poisoned,
        permutations_checked,
        exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::ScaledBlaschke;
    use crate::hyperbolic::DiscPoint;
    use crate::selfmap::FnMap;
    use approx::assert_abs_diff_eq;

    fn p(re: f64, im: f64) -> DiscPoint {
        DiscPoint::new(re, im).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hand_computed_two_point_triangle() {
        let t = build_triangle(&[p(0.0, 0.0), p(0.5, 0.0)], &[c(0.0, 0.0), c(0.25, 0.0)]).unwrap();
        // [0.25, 0]/[0.5, 0] = (-0.25)/(-0.5) = 0.5
        assert_abs_diff_eq!(t.entry(1, 1).value().unwrap().re, 0.5, epsilon = 1e-15);
        assert!(!t.any_saturated());
    }

    #[test]
    fn equal_values_zero_out_higher_levels() {
        let w = c(0.3, -0.4);
        let nodes = [p(0.1, 0.0), p(-0.2, 0.3), p(0.5, 0.5), p(0.0, -0.6)];
        let t = build_triangle(&nodes, &[w, w, w, w]).unwrap();
        for j in 1..4 {
            for k in 1..=j {
                assert_eq!(t.entry(k, j).value().unwrap().norm(), 0.0);
            }
        }
    }

    #[test]
    fn squaring_data_saturates_at_level_two() {
        let nodes = [p(0.0, 0.0), p(0.5, 0.0), p(-0.5, 0.0)];
        let values = [c(0.0, 0.0), c(0.25, 0.0), c(0.25, 0.0)];
        let t = build_triangle(&nodes, &values).unwrap();
        assert_abs_diff_eq!(t.entry(1, 1).value().unwrap().re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.entry(1, 2).value().unwrap().re, -0.5, epsilon = 1e-15);
        let apex = t.entry(2, 2);
        assert_abs_diff_eq!(apex.value().unwrap().re, 1.0, epsilon = 1e-14);
        assert!(apex.is_saturated());
        assert!(t.any_saturated());
    }

    #[test]
    fn duplicate_nodes_are_rejected() {
        let z = p(0.3, 0.3);
        assert!(matches!(
            build_triangle(&[z, z], &[c(0.0, 0.0), c(0.1, 0.0)]),
            Err(Error::DegenerateNodes { .. })
        ));
    }

    #[test]
    fn saturation_poisons_descendants() {
        // Identity data on three nodes: level 1 is unimodular, level 2 poisoned.
        let nodes = [p(0.0, 0.0), p(0.4, 0.0), p(0.0, 0.5)];
        let values: Vec<Complex64> = nodes.iter().map(|z| z.value()).collect();
        let t = build_triangle(&nodes, &values).unwrap();
        assert!(t.entry(1, 1).is_saturated());
        assert!(t.entry(1, 2).is_saturated());
        assert!(t.entry(2, 2).is_poisoned());
    }

    #[test]
    fn entries_depend_on_node_order() {
        let nodes = [p(0.0, 0.0), p(0.5, 0.0), p(0.2, 0.4)];
        let f = ScaledBlaschke::new(c(1.0, 0.0), c(0.7, 0.1), vec![p(0.3, -0.2), p(-0.1, 0.5)])
            .unwrap();
        let values: Vec<Complex64> = nodes.iter().map(|z| f.eval_c(z.value())).collect();
        let t1 = build_triangle(&nodes, &values).unwrap();
        let swapped_nodes = [nodes[1], nodes[0], nodes[2]];
        let swapped_values = [values[1], values[0], values[2]];
        let t2 = build_triangle(&swapped_nodes, &swapped_values).unwrap();
        let a = t1.entry(2, 2).value().unwrap();
        let b = t2.entry(2, 2).value().unwrap();
        assert!((a - b).norm() > 1e-6, "expected order dependence, got {a} vs {b}");
    }

    #[test]
    fn delta_one_of_squaring_is_identity() {
        // f = z^2 with base (0): [f(z), 0]/[z, 0] = z.
        let sq = FnMap(|z: Complex64| z * z);
        for z in [p(0.3, 0.0), p(-0.2, 0.5), p(0.0, -0.7)] {
            let d = delta_k_of_function(&sq, &[p(0.0, 0.0)], z, 1).unwrap();
            assert_abs_diff_eq!((d - z.value()).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn delta_two_of_squaring_is_unimodular_constant() {
        let sq = FnMap(|z: Complex64| z * z);
        let bases = [p(0.0, 0.0), p(0.4, 0.1)];
        for z in [p(0.25, -0.3), p(-0.6, 0.0)] {
            let d = delta_k_of_function(&sq, &bases, z, 2).unwrap();
            assert_abs_diff_eq!(d.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_limit_recovers_hyperbolic_derivative() {
        let f = ScaledBlaschke::new(c(1.0, 0.0), c(0.8, 0.0), vec![p(0.5, 0.0), p(-0.3, 0.3)])
            .unwrap();
        let z1 = p(0.2, -0.1);
        let limit = delta_k_of_function(&f, &[z1], z1, 1).unwrap();
        let closed = crate::blaschke::hyp_deriv(&f, z1).unwrap();
        assert!(
            (limit - closed).norm() < 1e-8,
            "limit {limit} vs closed form {closed}"
        );
    }

    #[test]
    fn diagonal_limit_of_automorphism_is_unimodular() {
        let tau = crate::hyperbolic::Automorphism::new(
            Complex64::from_polar(1.0, 0.31),
            p(0.45, -0.25),
        )
        .unwrap();
        let z1 = p(-0.3, 0.2);
        let d = delta_k_of_function(&tau, &[z1], z1, 1).unwrap();
        assert_abs_diff_eq!(d.norm(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn diagonal_limit_rejects_non_analytic_garbage() {
        // A square-root cusp at the base node makes the off-diagonal
        // quotient blow up like h^{-1/2}; the limit must refuse rather
        // than return a number.
        let z1 = p(0.3, 0.0);
        let base = z1.value();
        let f = FnMap(move |z: Complex64| Complex64::new(0.1 * (z - base).norm().sqrt(), 0.0));
        let err = delta_k_of_function(&f, &[z1], z1, 1);
        assert!(
            matches!(err, Err(Error::LimitDivergence { .. })),
            "expected divergence, got {err:?}"
        );
    }

    #[test]
    fn data_function_identity_on_squaring_data() {
        let sq = FnMap(|z: Complex64| z * z);
        let dev = verify_data_function_identity(&sq, &[p(0.0, 0.0), p(0.5, 0.0), p(-0.5, 0.0)]).unwrap();
        assert!(dev < 1e-12, "deviation {dev}");
    }

    #[test]
    fn data_function_identity_on_constant_is_exact() {
        let f = FnMap(|_| c(0.3, 0.2));
        let dev = verify_data_function_identity(&f, &[p(0.1, 0.0), p(0.0, 0.4), p(-0.5, 0.1)]).unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn epsilon_of_two_points() {
        let report = epsilon_of(
            &[p(0.0, 0.0), p(0.5, 0.0)],
            &[c(0.0, 0.0), c(0.25, 0.0)],
            2,
            DEFAULT_PERMUTATION_BUDGET,
            0,
        )
        .unwrap();
        // beta(0, 0.25)/beta(0, 0.5) = ln(5/3)/ln 3, level 0 only.
        assert_abs_diff_eq!(report.epsilon_min, 0.464_973_520_717_927_2, epsilon = 1e-12);
        assert_eq!(report.worst_witness.as_ref().unwrap().level, 0);
        assert!(report.exhaustive);
        assert_eq!(report.permutations_checked, 2);
    }

    #[test]
    fn epsilon_of_squaring_data_is_one_at_level_one() {
        let nodes = [p(0.0, 0.0), p(0.5, 0.0), p(-0.5, 0.0)];
        let values = [c(0.0, 0.0), c(0.25, 0.0), c(0.25, 0.0)];
        let report = epsilon_of(&nodes, &values, 3, DEFAULT_PERMUTATION_BUDGET, 0).unwrap();
        assert_abs_diff_eq!(report.epsilon_min, 1.0, epsilon = 1e-12);
        assert_eq!(report.worst_witness.as_ref().unwrap().level, 1);
        assert_eq!(report.permutations_checked, 6);
    }

    #[test]
    fn epsilon_of_constant_values_is_zero() {
        let nodes = [p(0.0, 0.0), p(0.3, 0.2), p(-0.4, 0.1)];
        let w = c(0.2, 0.2);
        let report = epsilon_of(&nodes, &[w, w, w], 3, DEFAULT_PERMUTATION_BUDGET, 0).unwrap();
        assert_eq!(report.epsilon_min, 0.0);
        assert!(report.saturated_witness.is_none());
    }

    #[test]
    fn epsilon_of_flags_saturated_levels() {
        // Identity data: level-1 entries are unimodular and get swept for n = 4.
        let nodes = [p(0.0, 0.0), p(0.4, 0.0), p(0.0, 0.5), p(-0.3, -0.3)];
        let values: Vec<Complex64> = nodes.iter().map(|z| z.value()).collect();
        let report = epsilon_of(&nodes, &values, 4, DEFAULT_PERMUTATION_BUDGET, 0).unwrap();
        assert!(report.saturated_witness.is_some());
    }

    #[test]
    fn column_check_small_scaling() {
        let nodes = [p(0.05, 0.0), p(0.0, 0.08), p(-0.06, 0.02)];
        let values: Vec<Complex64> = nodes.iter().map(|z| z.value() * 0.1).collect();
        let check = column_condition_check(&nodes, &values, 0.2, PermutationSweep::Exhaustive)
            .unwrap();
        assert!(check.holds, "witness {:?}", check.witness);
        assert!(check.max_modulus <= 0.2);
    }

    #[test]
    fn column_check_identity_data_fails() {
        let nodes = [p(0.0, 0.0), p(0.4, 0.0), p(0.0, 0.5)];
        let values: Vec<Complex64> = nodes.iter().map(|z| z.value()).collect();
        let check = column_condition_check(&nodes, &values, 0.5, PermutationSweep::Exhaustive)
            .unwrap();
        assert!(!check.holds);
        assert_abs_diff_eq!(check.witness.unwrap().modulus.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn column_check_zero_values_hold_for_any_eps() {
        let nodes = [p(0.0, 0.0), p(0.4, 0.0), p(0.0, 0.5)];
        let zeros = [c(0.0, 0.0); 3];
        let check =
            column_condition_check(&nodes, &zeros, 0.0, PermutationSweep::Exhaustive).unwrap();
        assert!(check.holds);
        assert_eq!(check.max_modulus, 0.0);
    }

    #[test]
    fn sampled_sweep_is_deterministic() {
        let nodes: Vec<DiscPoint> = (0..9)
            .map(|i| p(0.08 * i as f64 - 0.35, 0.05 * ((i * i) % 7) as f64))
            .collect();
        let values: Vec<Complex64> = nodes.iter().map(|z| z.value() * 0.5).collect();
        let a = epsilon_of(&nodes, &values, 9, 500, 42).unwrap();
        let b = epsilon_of(&nodes, &values, 9, 500, 42).unwrap();
        assert_eq!(a.epsilon_min, b.epsilon_min);
        assert_eq!(a.worst_witness, b.worst_witness);
        assert!(!a.exhaustive);
        assert_eq!(a.permutations_checked, 500);
    }
}
