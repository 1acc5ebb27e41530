//! Solvability of finite interpolation problems in the unit ball and the
//! Schur recursion that constructs explicit solutions.
//!
//! Three criteria are computed independently and cross-checked: the
//! diagonal of the quotient triangle, the full triangle, and positive
//! semidefiniteness of the Pick matrix `((1 - w_i conj(w_j))/(1 - z_i conj(z_j)))`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::{bracket_c, DiscPoint};
use crate::quotients::{build_triangle, QuotientTriangle, TriangleEntry};
use crate::selfmap::SelfMap;

/// Width of the band around modulus one inside which data is classified
/// `Boundary` instead of strictly solvable or unsolvable.
pub const DEGENERACY_BAND: f64 = 1e-6;

/// Eigenvalue tolerance for the positive-semidefiniteness decision.
pub const PICK_PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Solvability {
    /// Every triangle entry stays strictly below the band: infinitely
    /// many solutions exist and a chain can be constructed.
    InfinitelyMany,
    /// Some entry sits inside the band around modulus one. The strict
    /// theory does not apply; a unique unimodular-type solution may
    /// exist but is not constructed.
    Boundary,
    Unsolvable,
}

impl Solvability {
    pub fn as_str(self) -> &'static str {
        match self {
            Solvability::InfinitelyMany => "InfinitelyMany",
            Solvability::Boundary => "Boundary",
            Solvability::Unsolvable => "Unsolvable",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolvabilityVerdict {
    pub status: Solvability,
    /// Strictness criteria over levels >= 1 of the triangle.
    pub diagonal_strict: bool,
    pub all_entries_strict: bool,
    pub pick_psd: bool,
    pub pick_min_eigenvalue: f64,
    /// Smallest `1 - |entry|` over computed entries of the triangle.
    pub margin: f64,
    pub max_modulus: f64,
}

pub fn pick_matrix(nodes: &[DiscPoint], values: &[Complex64]) -> DMatrix<Complex64> {
    let n = nodes.len();
    DMatrix::from_fn(n, n, |i, j| {
        let num = Complex64::new(1.0, 0.0) - values[i] * values[j].conj();
        let den = Complex64::new(1.0, 0.0) - nodes[i].value() * nodes[j].value().conj();
        num / den
    })
}

/// Smallest eigenvalue of the Hermitian Pick matrix, computed through the
/// real symmetric embedding `[[A, -B], [B, A]]` (spectrum doubled).
pub fn pick_psd(nodes: &[DiscPoint], values: &[Complex64]) -> Result<(bool, f64)> {
    if nodes.len() != values.len() || nodes.is_empty() {
        return Err(Error::InvalidParameter(
            "need equally many nodes and values, at least one each".into(),
        ));
    }
    let n = nodes.len();
    let m = pick_matrix(nodes, values);
    let mut embed = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in i..n {
            // Hermitian part only, mirrored, so rounding cannot break symmetry.
            let entry = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            embed[(i, j)] = entry.re;
            embed[(j, i)] = entry.re;
            embed[(n + i, n + j)] = entry.re;
            embed[(n + j, n + i)] = entry.re;
            embed[(i, n + j)] = -entry.im;
            embed[(n + j, i)] = -entry.im;
            embed[(j, n + i)] = entry.im;
            embed[(n + i, j)] = entry.im;
        }
    }
    let eigen = embed.symmetric_eigen();
    let min_eig = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((min_eig >= -PICK_PSD_TOL, min_eig))
}

fn entry_strict(entry: &TriangleEntry) -> bool {
    matches!(entry, TriangleEntry::Value { saturated: false, .. })
}

fn classify(max_modulus: f64) -> Solvability {
    if max_modulus < 1.0 - DEGENERACY_BAND {
        Solvability::InfinitelyMany
    } else if max_modulus <= 1.0 + DEGENERACY_BAND {
        Solvability::Boundary
    } else {
        Solvability::Unsolvable
    }
}

/// Classifies the data by all three criteria.
pub fn solvability(nodes: &[DiscPoint], values: &[Complex64]) -> Result<SolvabilityVerdict> {
    let triangle = build_triangle(nodes, values)?;
    let (psd, min_eig) = pick_psd(nodes, values)?;
    Ok(verdict_from(&triangle, psd, min_eig))
}

fn verdict_from(triangle: &QuotientTriangle, pick_psd: bool, pick_min: f64) -> SolvabilityVerdict {
    let n = triangle.n();
    let diagonal_strict = (1..n).all(|k| entry_strict(triangle.diagonal(k)));
    let all_entries_strict = (0..n)
        .all(|j| (1..=j).all(|k| entry_strict(triangle.entry(k, j))));
    SolvabilityVerdict {
        status: classify(triangle.max_modulus()),
        diagonal_strict,
        all_entries_strict,
        pick_psd,
        pick_min_eigenvalue: pick_min,
        margin: triangle.margin(),
        max_modulus: triangle.max_modulus(),
    }
}

/// Initial function fed into the Schur recursion.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum InitialFn {
    Constant(#[serde(with = "crate::ser::complex_pair")] Complex64),
}

impl InitialFn {
    pub fn zero() -> Self {
        InitialFn::Constant(Complex64::new(0.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Result<Self> {
        if !(c.norm() <= 1.0) {
            return Err(Error::ValueOutsideClosedDisc { modulus: c.norm() });
        }
        Ok(InitialFn::Constant(c))
    }

    fn value(self) -> Complex64 {
        match self {
            InitialFn::Constant(c) => c,
        }
    }
}

/// An evaluable interpolant: nodes in problem order plus the diagonal
/// parameters in the order the recursion consumes them (deepest level
/// first, the first value last).
///
/// Evaluation runs `g_k = [[z, node] g_{k-1}, parameter]` from the initial
/// function, walking the stored nodes back to front.
#[derive(Debug, Clone, Serialize)]
pub struct SchurChain {
    nodes: Vec<DiscPoint>,
    #[serde(with = "crate::ser::complex_pair_vec")]
    diagonal: Vec<Complex64>,
    initial: InitialFn,
}

impl SchurChain {
    pub fn nodes(&self) -> &[DiscPoint] {
        &self.nodes
    }

    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    pub fn initial(&self) -> InitialFn {
        self.initial
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        let n = self.nodes.len();
        let mut g = self.initial.value();
        for (i, &param) in self.diagonal.iter().enumerate() {
            let node = self.nodes[n - 1 - i].value();
            g = bracket_c(bracket_c(z, node) * g, param);
        }
        g
    }

    pub fn eval(&self, z: DiscPoint) -> Complex64 {
        self.eval_c(z.value())
    }
}

impl SelfMap for SchurChain {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_c(z)
    }
}

/// Runs the Schur recursion on strictly solvable data.
///
/// Refuses `Boundary` and `Unsolvable` data: the recursion divides by
/// `1 - |parameter|`-sized quantities and its output would be spurious.
pub fn schur_solve(
    nodes: &[DiscPoint],
    values: &[Complex64],
    initial: InitialFn,
) -> Result<SchurChain> {
    let triangle = build_triangle(nodes, values)?;
    let (psd, min_eig) = pick_psd(nodes, values)?;
    let verdict = verdict_from(&triangle, psd, min_eig);
    if verdict.status != Solvability::InfinitelyMany {
        return Err(Error::NotStrictlySolvable {
            status: verdict.status.as_str(),
        });
    }
    let n = nodes.len();
    let diagonal = (0..n)
        .map(|i| {
            triangle
                .diagonal(n - 1 - i)
                .value()
                .expect("strictly solvable triangle has no poisoned diagonal")
        })
        .collect();
    Ok(SchurChain {
        nodes: nodes.to_vec(),
        diagonal,
        initial,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DenjoyReport {
    /// Running sums of `(1 - |z_k|)/(1 - |D(k, k)|)` over the leading
    /// diagonal, stopping at the first saturated entry.
    pub partial_sums: Vec<f64>,
    pub terms: Vec<f64>,
    pub saturated: bool,
    /// Index of the diagonal entry that saturated, when any.
    pub saturated_at: Option<usize>,
}

/// Partial sums of the classical infinite-data solvability series.
pub fn denjoy_sum(nodes: &[DiscPoint], values: &[Complex64]) -> Result<DenjoyReport> {
    if nodes.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: nodes.len(),
        });
    }
    let triangle = build_triangle(nodes, values)?;
    let mut partial_sums = Vec::new();
    let mut terms = Vec::new();
    let mut acc = 0.0;
    for (k, node) in nodes.iter().enumerate() {
        match triangle.diagonal(k) {
            TriangleEntry::Value { value, saturated: false } => {
                let term = (1.0 - node.abs()) / (1.0 - value.norm());
                acc += term;
                terms.push(term);
                partial_sums.push(acc);
            }
            _ => {
                return Ok(DenjoyReport {
                    partial_sums,
                    terms,
                    saturated: true,
                    saturated_at: Some(k),
                });
            }
        }
    }
    Ok(DenjoyReport {
        partial_sums,
        terms,
        saturated: false,
        saturated_at: None,
    })
}
