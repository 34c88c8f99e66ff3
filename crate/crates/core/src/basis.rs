//! Biorthogonal basis systems over a quasi-normed space, plus the ready-made
//! catalog of example bases the verification harness runs on.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::space::Space;

const BIORTHOGONALITY_TOL: f64 = 1e-10;

/// An n-vector basis of an n-dimensional space, stored with its dual system.
///
/// Column `j` of `vectors` is the j-th basis vector in ambient coordinates;
/// row `j` of `duals` is the j-th coordinate functional. Duals are stored
/// explicitly so that ill-conditioned systems are caught at construction.
#[derive(Debug, Clone)]
pub struct Basis {
    space: Space,
    vectors: Matrix,
    duals: Matrix,
    labels: Vec<String>,
    /// d = max_j ||x_j||.
    vector_norm_bound: f64,
    /// c = max_j ||x_j*|| (operator sense); exact where a closed form or
    /// vertex oracle exists, otherwise a probe lower bound.
    dual_norm_bound: f64,
    dual_norm_bound_exact: bool,
    condition_estimate: f64,
    biorthogonality_residual: f64,
}

impl Basis {
    /// Build a basis from explicit vectors and duals, validating
    /// biorthogonality to 1e-10 entrywise.
    pub fn new(space: Space, vectors: Matrix, duals: Matrix, labels: Vec<String>) -> Result<Basis> {
        let n = space.dim();
        if !vectors.is_square() || vectors.n_rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: vectors.n_rows(),
            });
        }
        if !duals.is_square() || duals.n_rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: duals.n_rows(),
            });
        }
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: labels.len(),
            });
        }
        for j in 0..n {
            if math::max_abs(&vectors.column(j)) == 0.0 {
                return Err(Error::InvalidParameter(format!("basis vector {j} is zero")));
            }
        }
        let residual = duals
            .mat_mul(&vectors)?
            .max_abs_diff(&Matrix::identity(n));
        if residual > BIORTHOGONALITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "biorthogonality residual {residual:.3e} exceeds {BIORTHOGONALITY_TOL:.0e}"
            )));
        }
        let vector_norm_bound = (0..n)
            .map(|j| space.norm_raw(&vectors.column(j)))
            .fold(0.0f64, f64::max);
        let (dual_norm_bound, dual_norm_bound_exact) = dual_bound(&space, &duals);
        let condition_estimate = inf_operator_norm(&vectors) * inf_operator_norm(&duals);
        Ok(Basis {
            space,
            vectors,
            duals,
            labels,
            vector_norm_bound,
            dual_norm_bound,
            dual_norm_bound_exact,
            condition_estimate,
            biorthogonality_residual: residual,
        })
    }

    /// Build from vectors only; duals are computed by inversion.
    pub fn from_vectors(space: Space, vectors: Matrix, labels: Vec<String>) -> Result<Basis> {
        let duals = vectors.inverse()?;
        Basis::new(space, vectors, duals, labels)
    }

    /// The unit vector basis of `space` (identity system).
    pub fn identity(space: Space) -> Basis {
        let n = space.dim();
        let labels = (0..n).map(|j| format!("e{}", j + 1)).collect();
        Basis::new(space, Matrix::identity(n), Matrix::identity(n), labels)
            .expect("identity system is always biorthogonal")
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn duals(&self) -> &Matrix {
        &self.duals
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// (c, d, c_exact): dual and primal norm bounds of the system.
    pub fn norm_bounds(&self) -> (f64, f64, bool) {
        (
            self.dual_norm_bound,
            self.vector_norm_bound,
            self.dual_norm_bound_exact,
        )
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    pub fn biorthogonality_residual(&self) -> f64 {
        self.biorthogonality_residual
    }

    /// Coefficient sequence (x_j^*(f))_j of an ambient vector.
    pub fn coefficients(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.space.validate_vector(f)?;
        Ok(self.duals.mul_vec(f))
    }

    /// Coefficients without validation, for enumeration hot paths.
    pub fn coefficients_raw(&self, f: &[f64]) -> Vec<f64> {
        self.duals.mul_vec(f)
    }

    /// Ambient vector with the given coefficient sequence.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        self.vectors.mul_vec(coeffs)
    }

    /// Basis vector `j` in ambient coordinates.
    pub fn element(&self, j: usize) -> Result<Vec<f64>> {
        if j >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: j,
                dim: self.dim(),
            });
        }
        Ok(self.vectors.column(j))
    }

    /// `sum_{j in A} eps_j x_j` in ambient coordinates.
    pub fn signed_indicator(&self, indices: &[usize], signs: &[i8]) -> Result<Vec<f64>> {
        debug_assert_eq!(indices.len(), signs.len());
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (&j, &s) in indices.iter().zip(signs) {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, dim: n });
            }
            let col = self.vectors.column(j);
            for (o, v) in out.iter_mut().zip(&col) {
                *o += s as f64 * v;
            }
        }
        Ok(out)
    }

    /// Norm of `sum_{j in A} eps_j x_j` straight from a coefficient buffer.
    pub fn signed_indicator_norm(&self, coeffs: &[f64]) -> f64 {
        self.space.norm_raw(&self.combine(coeffs))
    }

    /// True for the identity system in a lattice space, where every
    /// coordinate projection is a norm contraction and the sup-type
    /// parameters are exactly 1.
    pub fn is_identity_lattice(&self) -> bool {
        if !self.space.is_lattice() {
            return false;
        }
        let n = self.dim();
        let id = Matrix::identity(n);
        self.vectors.max_abs_diff(&id) < 1e-12 && self.duals.max_abs_diff(&id) < 1e-12
    }
}

fn inf_operator_norm(m: &Matrix) -> f64 {
    (0..m.n_rows())
        .map(|i| m.row(i).iter().map(|x| math::abs(*x)).sum::<f64>())
        .fold(0.0f64, f64::max)
}

/// Max over rows of the dual functional norm; falls back to a seeded probe
/// lower bound for kinds without a closed form.
fn dual_bound(space: &Space, duals: &Matrix) -> (f64, bool) {
    let n = space.dim();
    let mut best = 0.0f64;
    let mut exact = true;
    let mut rng = ChaCha8Rng::seed_from_u64(0x00d7a1);
    for j in 0..n {
        let row = duals.row(j);
        match space.dual_functional_norm(row) {
            Some(v) => best = best.max(v),
            None => {
                exact = false;
                for i in 0..n {
                    let mut f = vec![0.0; n];
                    f[i] = 1.0;
                    let denom = space.norm_raw(&f);
                    if denom > 0.0 {
                        best = best.max(math::abs(row[i]) / denom);
                    }
                }
                for _ in 0..512 {
                    let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let denom = space.norm_raw(&f);
                    if denom == 0.0 {
                        continue;
                    }
                    let val: f64 = row.iter().zip(&f).map(|(a, b)| a * b).sum();
                    best = best.max(math::abs(val) / denom);
                }
            }
        }
    }
    (best, exact)
}

/// Tags recording what is already known about a catalog basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BasisProperty {
    Unconditional,
    Democratic,
    Greedy,
    Conditional,
    NonDemocratic,
}

impl BasisProperty {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasisProperty::Unconditional => "unconditional",
            BasisProperty::Democratic => "democratic",
            BasisProperty::Greedy => "greedy",
            BasisProperty::Conditional => "conditional",
            BasisProperty::NonDemocratic => "non-democratic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub basis: Basis,
    pub properties: BTreeSet<BasisProperty>,
}

/// Formats an lp exponent the way catalog ids spell it ("0.5", "1.0", ...).
pub fn format_exponent(p: f64) -> String {
    format!("{p:?}")
}

/// The summing basis x_j = e_1 + ... + e_j of the sup-norm space; duals are
/// the difference functionals e_j^* - e_{j+1}^* (last row e_n^*).
pub fn summing_basis(dim: usize) -> Result<Basis> {
    let space = Space::lp_inf(dim)?;
    let mut vectors = Matrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..=j {
            vectors.set(i, j, 1.0);
        }
    }
    let mut duals = Matrix::zeros(dim, dim);
    for j in 0..dim {
        duals.set(j, j, 1.0);
        if j + 1 < dim {
            duals.set(j, j + 1, -1.0);
        }
    }
    let labels = (0..dim).map(|j| format!("s{}", j + 1)).collect();
    Basis::new(space, vectors, duals, labels)
}

/// Canonical (identity) basis of the direct sum of euclidean blocks glued by
/// an outer lp norm.
pub fn l2_block_basis(outer_p: f64, block_sizes: &[usize]) -> Result<Basis> {
    let space = Space::l2_blocks(outer_p, block_sizes)?;
    Ok(Basis::identity(space))
}

/// Identity plus a small seeded strictly-upper-triangular perturbation, in
/// the l1 space; used as a fuzzing entry with exact polyhedral oracles.
pub fn perturbed_identity_basis(dim: usize, seed: u64) -> Result<Basis> {
    let space = Space::lp(1.0, dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = Matrix::identity(dim);
    for i in 0..dim {
        for j in (i + 1)..dim {
            vectors.set(i, j, 0.1 * rng.random_range(-1.0..1.0));
        }
    }
    let labels = (0..dim).map(|j| format!("f{}", j + 1)).collect();
    Basis::from_vectors(space, vectors, labels)
}

/// Largest K with 1 + 2 + ... + K <= dim.
fn block_count_for(dim: usize) -> usize {
    let mut k = 1;
    while (k + 1) * (k + 2) / 2 <= dim {
        k += 1;
    }
    k
}

/// The standard catalog: lp unit bases (p in {1/2, 1, 2}), the summing basis,
/// the block-l2 basis inside l1, and a seeded perturbed-identity basis.
/// Deterministic given (dim, seed).
pub fn make_catalog(dim: usize, seed: u64) -> Result<Vec<CatalogEntry>> {
    if dim < 2 {
        return Err(Error::InvalidParameter("catalog needs dim >= 2".into()));
    }
    let mut entries = Vec::new();
    for p in [0.5, 1.0, 2.0] {
        let basis = Basis::identity(Space::lp(p, dim)?);
        entries.push(CatalogEntry {
            id: format!("lp:{}:{}", format_exponent(p), dim),
            basis,
            properties: BTreeSet::from([
                BasisProperty::Unconditional,
                BasisProperty::Democratic,
                BasisProperty::Greedy,
            ]),
        });
    }
    entries.push(CatalogEntry {
        id: format!("summing:{dim}"),
        basis: summing_basis(dim)?,
        properties: BTreeSet::from([BasisProperty::Conditional, BasisProperty::Democratic]),
    });
    let blocks: Vec<usize> = (1..=block_count_for(dim)).collect();
    let block_id = blocks
        .iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join("+");
    entries.push(CatalogEntry {
        id: format!("l2blocks:1.0:{block_id}"),
        basis: l2_block_basis(1.0, &blocks)?,
        properties: BTreeSet::from([
            BasisProperty::Unconditional,
            BasisProperty::NonDemocratic,
        ]),
    });
    entries.push(CatalogEntry {
        id: format!("fuzz:{dim}"),
        basis: perturbed_identity_basis(dim, seed)?,
        properties: BTreeSet::new(),
    });
    Ok(entries)
}
