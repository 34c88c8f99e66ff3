//! The nonlinear operator family driven by coefficient magnitudes: greedy
//! sets and projections, the restricted truncation operators, and their
//! threshold-indexed variants.
//!
//! Greedy-set ties are broken by ascending index, so every operator here is
//! deterministic; estimators that need tie-robust suprema enumerate all
//! greedy sets via [`crate::sets::all_greedy_sets`].

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::math;

/// A greedy set: indices ordered by descending coefficient magnitude, ties
/// by ascending index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedySelection {
    indices: Vec<usize>,
}

impl GreedySelection {
    /// Indices in selection order (largest magnitude first).
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// An index set with a sign pattern on exactly those indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedSet {
    pub indices: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedSet {
    pub fn new(indices: Vec<usize>, signs: Vec<i8>) -> Result<SignedSet> {
        if indices.len() != signs.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                got: signs.len(),
            });
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidParameter("signs must be +1 or -1".into()));
        }
        Ok(SignedSet { indices, signs })
    }
}

/// Greedy set of `f` of cardinality `m` under the ascending-index tie rule.
pub fn greedy_set(basis: &Basis, f: &[f64], m: usize) -> Result<GreedySelection> {
    let coeffs = basis.coefficients(f)?;
    greedy_set_of_coefficients(&coeffs, m)
}

/// Greedy set straight from a coefficient sequence.
pub fn greedy_set_of_coefficients(coeffs: &[f64], m: usize) -> Result<GreedySelection> {
    let n = coeffs.len();
    if m > n {
        return Err(Error::RankTooLarge { m, dim: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        math::abs(coeffs[b])
            .total_cmp(&math::abs(coeffs[a]))
            .then(a.cmp(&b))
    });
    order.truncate(m);
    Ok(GreedySelection { indices: order })
}

/// Coordinate projection `S_A(f) = sum_{j in A} x_j^*(f) x_j`.
pub fn project(basis: &Basis, f: &[f64], set: &[usize]) -> Result<Vec<f64>> {
    let coeffs = basis.coefficients(f)?;
    let masked = mask_coefficients(&coeffs, set)?;
    Ok(basis.combine(&masked))
}

/// Coefficient sequence of `S_A(f)` given the coefficient sequence of `f`.
pub fn mask_coefficients(coeffs: &[f64], set: &[usize]) -> Result<Vec<f64>> {
    let n = coeffs.len();
    let mut masked = vec![0.0; n];
    for &j in set {
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, dim: n });
        }
        masked[j] = coeffs[j];
    }
    Ok(masked)
}

/// `G_m(f) = S_{A_m(f)}(f)`.
pub fn greedy_operator(basis: &Basis, f: &[f64], m: usize) -> Result<Vec<f64>> {
    let sel = greedy_set(basis, f, m)?;
    project(basis, f, sel.indices())
}

/// `R(f, A)`: every coefficient on `A` is flattened to the minimal magnitude
/// over `A`, keeping its sign; zero off `A`. An empty `A` gives 0, and a zero
/// coefficient anywhere on `A` forces the whole output to 0 (the minimum is
/// then 0).
pub fn restricted_truncation(basis: &Basis, f: &[f64], set: &[usize]) -> Result<Vec<f64>> {
    let coeffs = basis.coefficients(f)?;
    let truncated = truncation_coefficients(&coeffs, set)?;
    Ok(basis.combine(&truncated))
}

/// Coefficient sequence of `R(f, A)` given the coefficient sequence of `f`.
pub fn truncation_coefficients(coeffs: &[f64], set: &[usize]) -> Result<Vec<f64>> {
    let n = coeffs.len();
    let mut out = vec![0.0; n];
    if set.is_empty() {
        return Ok(out);
    }
    let mut min_mag = f64::INFINITY;
    for &j in set {
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, dim: n });
        }
        min_mag = min_mag.min(math::abs(coeffs[j]));
    }
    for &j in set {
        let c = coeffs[j];
        let sign = if c > 0.0 {
            1.0
        } else if c < 0.0 {
            -1.0
        } else {
            0.0
        };
        out[j] = min_mag * sign;
    }
    Ok(out)
}

/// `R_m(f) = R(f, A_m(f))`; `R_0 = 0`.
pub fn restricted_truncation_m(basis: &Basis, f: &[f64], m: usize) -> Result<Vec<f64>> {
    let sel = greedy_set(basis, f, m)?;
    restricted_truncation(basis, f, sel.indices())
}

/// `T_m = R_m + Id - G_m`, with one shared greedy set for both terms.
pub fn truncation_operator(basis: &Basis, f: &[f64], m: usize) -> Result<Vec<f64>> {
    let sel = greedy_set(basis, f, m)?;
    let r = restricted_truncation(basis, f, sel.indices())?;
    let g = project(basis, f, sel.indices())?;
    Ok(r.iter()
        .zip(f)
        .zip(&g)
        .map(|((r_i, f_i), g_i)| r_i + f_i - g_i)
        .collect())
}

/// `A(a, f) = { j : |x_j^*(f)| >= a }` (closed inequality).
pub fn threshold_set(basis: &Basis, f: &[f64], a: f64) -> Result<Vec<usize>> {
    let coeffs = basis.coefficients(f)?;
    Ok(threshold_set_of_coefficients(&coeffs, a))
}

pub fn threshold_set_of_coefficients(coeffs: &[f64], a: f64) -> Vec<usize> {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| math::abs(**c) >= a)
        .map(|(j, _)| j)
        .collect()
}

/// `G^(a)(f) = S_{A(a,f)}(f)`.
pub fn thresholding_greedy(basis: &Basis, f: &[f64], a: f64) -> Result<Vec<f64>> {
    let set = threshold_set(basis, f, a)?;
    project(basis, f, &set)
}

/// `R^(a)(f) = R(f, A(a,f))`; 0 when the threshold set is empty.
pub fn thresholding_truncation(basis: &Basis, f: &[f64], a: f64) -> Result<Vec<f64>> {
    let set = threshold_set(basis, f, a)?;
    restricted_truncation(basis, f, &set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{make_catalog, summing_basis};
    use crate::space::Space;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_l1(n: usize) -> Basis {
        Basis::identity(Space::lp(1.0, n).unwrap())
    }

    #[test]
    fn greedy_set_orders_by_magnitude_then_index() {
        let b = unit_l1(3);
        let sel = greedy_set(&b, &[0.5, -0.9, 0.2], 2).unwrap();
        assert_eq!(sel.indices(), &[1, 0]);
        let tie = greedy_set(&b, &[1.0, 1.0, 0.0], 1).unwrap();
        assert_eq!(tie.indices(), &[0]);
        assert!(greedy_set(&b, &[1.0, 1.0, 0.0], 0).unwrap().is_empty());
        assert!(greedy_set(&b, &[1.0, 1.0, 0.0], 4).is_err());
    }

    #[test]
    fn projection_examples() {
        let b = Basis::identity(Space::lp(2.0, 3).unwrap());
        assert_eq!(project(&b, &[3.0, 1.0, 2.0], &[0, 2]).unwrap(), vec![3.0, 0.0, 2.0]);
        assert_eq!(project(&b, &[3.0, 1.0, 2.0], &[]).unwrap(), vec![0.0, 0.0, 0.0]);
        assert!(project(&b, &[3.0, 1.0, 2.0], &[3]).is_err());

        // Summing basis: coefficients (0,1,0) live at ambient (1,1,0).
        let s = summing_basis(3).unwrap();
        let f = s.combine(&[0.0, 1.0, 0.0]);
        assert_eq!(project(&s, &f, &[1]).unwrap(), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn projection_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for entry in make_catalog(6, 3).unwrap() {
            let n = entry.basis.dim();
            for _ in 0..50 {
                let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let set: Vec<usize> = (0..n).filter(|_| rng.random_range(0..2) == 1).collect();
                let once = project(&entry.basis, &f, &set).unwrap();
                let twice = project(&entry.basis, &once, &set).unwrap();
                for (a, b) in once.iter().zip(&twice) {
                    assert!(math::abs(a - b) < 1e-10);
                }
                let full: Vec<usize> = (0..n).collect();
                let all = project(&entry.basis, &f, &full).unwrap();
                for (a, b) in f.iter().zip(&all) {
                    assert!(math::abs(a - b) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn greedy_operator_examples() {
        let b = unit_l1(3);
        assert_eq!(greedy_operator(&b, &[3.0, 1.0, 2.0], 2).unwrap(), vec![3.0, 0.0, 2.0]);
        assert_eq!(greedy_operator(&b, &[3.0, 1.0, 2.0], 3).unwrap(), vec![3.0, 1.0, 2.0]);
        assert_eq!(greedy_operator(&b, &[1.0, 1.0, 0.0], 1).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn restricted_truncation_examples() {
        let b = unit_l1(3);
        assert_eq!(
            restricted_truncation(&b, &[3.0, 1.0, 2.0], &[0, 2]).unwrap(),
            vec![2.0, 0.0, 2.0]
        );
        let b2 = unit_l1(2);
        assert_eq!(
            restricted_truncation(&b2, &[-3.0, 2.0], &[0, 1]).unwrap(),
            vec![-2.0, 2.0]
        );
        assert_eq!(
            restricted_truncation(&b, &[3.0, 1.0, 2.0], &[1]).unwrap(),
            vec![0.0, 1.0, 0.0]
        );
        // empty set and zero-on-set conventions
        assert_eq!(
            restricted_truncation(&b, &[3.0, 1.0, 2.0], &[]).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
        assert_eq!(
            restricted_truncation(&b, &[3.0, 0.0, 2.0], &[0, 1]).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn truncation_operator_examples() {
        let b = unit_l1(3);
        assert_eq!(
            restricted_truncation_m(&b, &[3.0, 1.0, 2.0], 2).unwrap(),
            vec![2.0, 0.0, 2.0]
        );
        assert_eq!(
            restricted_truncation_m(&b, &[3.0, 1.0, 2.0], 0).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
        assert_eq!(
            truncation_operator(&b, &[3.0, 1.0, 2.0], 2).unwrap(),
            vec![2.0, 1.0, 2.0]
        );
        assert_eq!(
            truncation_operator(&b, &[3.0, 1.0, 2.0], 0).unwrap(),
            vec![3.0, 1.0, 2.0]
        );
        assert_eq!(
            truncation_operator(&b, &[3.0, 1.0, 2.0], 3).unwrap(),
            vec![1.0, 1.0, 1.0]
        );
    }

    #[test]
    fn threshold_operators() {
        let b = unit_l1(3);
        let f = [0.9, 0.5, 0.1];
        assert_eq!(threshold_set(&b, &f, 0.5).unwrap(), vec![0, 1]);
        assert_eq!(threshold_set(&b, &f, 1.1).unwrap(), Vec::<usize>::new());
        assert_eq!(threshold_set(&b, &f, 1e-12).unwrap(), vec![0, 1, 2]);
        assert_eq!(thresholding_greedy(&b, &f, 0.5).unwrap(), vec![0.9, 0.5, 0.0]);
        assert_eq!(
            thresholding_truncation(&b, &f, 0.5).unwrap(),
            vec![0.5, 0.5, 0.0]
        );
        let b2 = unit_l1(2);
        assert_eq!(thresholding_truncation(&b2, &[1.0, 1.0], 1.0).unwrap(), vec![1.0, 1.0]);
        assert_eq!(
            thresholding_truncation(&b2, &[0.3, 0.2], 0.5).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn greedy_dominance_and_truncation_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x714);
        for entry in make_catalog(6, 3).unwrap() {
            let basis = &entry.basis;
            let n = basis.dim();
            for _ in 0..500 {
                let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let m = rng.random_range(0..=n);
                let coeffs = basis.coefficients(&f).unwrap();
                let sel = greedy_set(basis, &f, m).unwrap();
                let selected: Vec<usize> = sel.indices().to_vec();
                let min_in = selected
                    .iter()
                    .map(|&j| math::abs(coeffs[j]))
                    .fold(f64::INFINITY, f64::min);
                let max_out = (0..n)
                    .filter(|j| !selected.contains(j))
                    .map(|j| math::abs(coeffs[j]))
                    .fold(0.0f64, f64::max);
                if m > 0 && m < n {
                    assert!(min_in >= max_out);
                }
                // T_m - R_m - f + G_m = 0
                let t = truncation_operator(basis, &f, m).unwrap();
                let r = restricted_truncation_m(basis, &f, m).unwrap();
                let g = greedy_operator(basis, &f, m).unwrap();
                for i in 0..n {
                    assert!(math::abs(t[i] - r[i] - f[i] + g[i]) < 1e-10);
                }
                // R_m coefficients share one magnitude on the greedy set
                let rc = basis.coefficients(&r).unwrap();
                let mags: Vec<f64> = selected.iter().map(|&j| math::abs(rc[j])).collect();
                if let Some(first) = mags.first() {
                    for v in &mags {
                        assert!(math::abs(v - first) < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn greedy_set_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
        let b = unit_l1(5);
        for _ in 0..200 {
            let f: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            let alpha = loop {
                let a: f64 = rng.random_range(-4.0..4.0);
                if math::abs(a) > 1e-3 {
                    break a;
                }
            };
            let scaled: Vec<f64> = f.iter().map(|x| alpha * x).collect();
            for m in 0..=5 {
                assert_eq!(
                    greedy_set(&b, &f, m).unwrap(),
                    greedy_set(&b, &scaled, m).unwrap()
                );
            }
        }
    }

    #[test]
    fn threshold_scaling_identity_on_grid_vectors() {
        // R^(b)(f) = (b/a) R^(a)((a/b) f) for dyadic grids, where scaling
        // maps grid coefficients to grid coefficients exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(0x90aa);
        let s = 2.0f64;
        for entry in make_catalog(5, 3).unwrap() {
            let basis = &entry.basis;
            let n = basis.dim();
            for _ in 0..200 {
                let coeffs: Vec<f64> = (0..n)
                    .map(|_| {
                        if rng.random_range(0..4) == 0 {
                            0.0
                        } else {
                            let level: i32 = rng.random_range(0..6);
                            let sign = if rng.random_range(0..2) == 0 { 1.0 } else { -1.0 };
                            sign * math::powf(s, -level as f64)
                        }
                    })
                    .collect();
                let f = basis.combine(&coeffs);
                let (ka, kb) = (3, 1);
                let a = math::powf(s, -ka as f64);
                let b_thr = math::powf(s, -kb as f64);
                let lhs = thresholding_truncation(basis, &f, b_thr).unwrap();
                let scaled: Vec<f64> = f.iter().map(|x| x * (a / b_thr)).collect();
                let inner = thresholding_truncation(basis, &scaled, a).unwrap();
                for i in 0..n {
                    assert!(math::abs(lhs[i] - (b_thr / a) * inner[i]) < 1e-10);
                }
            }
        }
    }
}
