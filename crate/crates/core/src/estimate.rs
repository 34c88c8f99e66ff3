//! Estimated values with provenance: every sup-type parameter is reported as
//! either exact or a certified lower bound, and always carries a witness that
//! re-evaluates to the reported value.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::math;
use crate::operators;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    LowerBound,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::LowerBound => "lower_bound",
        }
    }
}

/// The input attaining an estimated value. Each variant knows how to
/// recompute its ratio on the basis it was found on.
///
/// All vectors are coefficient sequences relative to the basis; sets hold
/// 0-based indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// `||1_A||` (fundamental function).
    SetNorm { indices: Vec<usize> },
    /// `||1_A|| / ||1_B||` (democracy parameter).
    SetRatio {
        numerator: Vec<usize>,
        denominator: Vec<usize>,
    },
    /// `||1_{eps,B}|| / ||1_{eps,A}||` with `B` a subset of `A` (SUCC).
    SignedSuppression {
        indices: Vec<usize>,
        signs: Vec<i8>,
        subset: Vec<usize>,
    },
    /// `||S_A f|| / ||f||` (unconditionality and quasi-greedy ratios).
    Projection { set: Vec<usize>, coeffs: Vec<f64> },
    /// `||R(f, A)|| / ||f||` (truncation ratios).
    Truncation { set: Vec<usize>, coeffs: Vec<f64> },
    /// `||S_A f|| / ||f||` with `A = A(a, f)` (subset `None`) or an explicit
    /// subset of it (threshold functions theta / phi).
    ThresholdProjection {
        coeffs: Vec<f64>,
        a: f64,
        subset: Option<Vec<usize>>,
    },
    /// `||R^(a) f|| / ||f||` (lambda).
    ThresholdTruncation { coeffs: Vec<f64>, a: f64 },
    /// `||sum a_n x_n|| / ||1_{eps,A}||` over the support of `signs`.
    LinearCombination { coeffs: Vec<f64>, signs: Vec<i8> },
    /// `||f - S_G f|| / sigma_m(f)` for a fixed greedy set `G` (Lebesgue).
    GreedyError {
        coeffs: Vec<f64>,
        m: usize,
        greedy_set: Vec<usize>,
    },
}

impl Witness {
    /// Recompute the claimed ratio on `basis`.
    pub fn reevaluate(&self, basis: &Basis) -> Result<f64> {
        let space = basis.space();
        match self {
            Witness::SetNorm { indices } => {
                let signs = alloc::vec![1i8; indices.len()];
                let v = basis.signed_indicator(indices, &signs)?;
                Ok(space.norm_raw(&v))
            }
            Witness::SetRatio {
                numerator,
                denominator,
            } => {
                let num = basis.signed_indicator(numerator, &alloc::vec![1i8; numerator.len()])?;
                let den =
                    basis.signed_indicator(denominator, &alloc::vec![1i8; denominator.len()])?;
                ratio(space.norm_raw(&num), space.norm_raw(&den))
            }
            Witness::SignedSuppression {
                indices,
                signs,
                subset,
            } => {
                let full = basis.signed_indicator(indices, signs)?;
                let sub_signs: Vec<i8> = subset
                    .iter()
                    .map(|j| {
                        indices
                            .iter()
                            .position(|i| i == j)
                            .map(|pos| signs[pos])
                            .ok_or(Error::IndexOutOfRange {
                                index: *j,
                                dim: basis.dim(),
                            })
                    })
                    .collect::<Result<_>>()?;
                let sub = basis.signed_indicator(subset, &sub_signs)?;
                ratio(space.norm_raw(&sub), space.norm_raw(&full))
            }
            Witness::Projection { set, coeffs } => {
                let f = basis.combine(coeffs);
                let masked = operators::mask_coefficients(coeffs, set)?;
                ratio(
                    space.norm_raw(&basis.combine(&masked)),
                    space.norm_raw(&f),
                )
            }
            Witness::Truncation { set, coeffs } => {
                let f = basis.combine(coeffs);
                let trunc = operators::truncation_coefficients(coeffs, set)?;
                ratio(space.norm_raw(&basis.combine(&trunc)), space.norm_raw(&f))
            }
            Witness::ThresholdProjection { coeffs, a, subset } => {
                let f = basis.combine(coeffs);
                let threshold = operators::threshold_set_of_coefficients(coeffs, *a);
                let set = match subset {
                    Some(s) => {
                        if s.iter().any(|j| !threshold.contains(j)) {
                            return Err(Error::InvalidParameter(
                                "witness subset escapes the threshold set".into(),
                            ));
                        }
                        s.clone()
                    }
                    None => threshold,
                };
                let masked = operators::mask_coefficients(coeffs, &set)?;
                ratio(
                    space.norm_raw(&basis.combine(&masked)),
                    space.norm_raw(&f),
                )
            }
            Witness::ThresholdTruncation { coeffs, a } => {
                let f = basis.combine(coeffs);
                let set = operators::threshold_set_of_coefficients(coeffs, *a);
                let trunc = operators::truncation_coefficients(coeffs, &set)?;
                ratio(space.norm_raw(&basis.combine(&trunc)), space.norm_raw(&f))
            }
            Witness::LinearCombination { coeffs, signs } => {
                if coeffs.len() != signs.len() {
                    return Err(Error::DimensionMismatch {
                        expected: coeffs.len(),
                        got: signs.len(),
                    });
                }
                let indices: Vec<usize> =
                    (0..signs.len()).filter(|&j| signs[j] != 0).collect();
                let sub_signs: Vec<i8> = indices.iter().map(|&j| signs[j]).collect();
                let num = basis.combine(coeffs);
                let den = basis.signed_indicator(&indices, &sub_signs)?;
                ratio(space.norm_raw(&num), space.norm_raw(&den))
            }
            Witness::GreedyError {
                coeffs,
                m,
                greedy_set,
            } => {
                let f = basis.combine(coeffs);
                let masked = operators::mask_coefficients(coeffs, greedy_set)?;
                let approx = basis.combine(&masked);
                let residual: Vec<f64> = f.iter().zip(&approx).map(|(a, b)| a - b).collect();
                let sigma = crate::lebesgue::sigma_m(basis, &f, *m, 100_000)?;
                ratio(space.norm_raw(&residual), sigma.error)
            }
        }
    }
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 {
        return Err(Error::InvalidParameter(
            "witness denominator evaluates to zero".into(),
        ));
    }
    Ok(num / den)
}

/// A numeric value tagged exact / certified-lower-bound, with the witness
/// that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateValue {
    pub value: f64,
    pub mode: Mode,
    pub witness: Witness,
}

impl EstimateValue {
    pub fn new(value: f64, mode: Mode, witness: Witness) -> EstimateValue {
        EstimateValue {
            value,
            mode,
            witness,
        }
    }

    /// Check the defining invariant: the witness reproduces the value.
    pub fn witness_consistent(&self, basis: &Basis, rel_tol: f64) -> bool {
        match self.witness.reevaluate(basis) {
            Ok(v) => math::approx_eq(v, self.value, rel_tol),
            Err(_) => false,
        }
    }
}

/// A map m -> estimate over 1..=m_max.
#[derive(Debug, Clone)]
pub struct ParamTable {
    pub param_id: String,
    pub entries: BTreeMap<usize, EstimateValue>,
}

impl ParamTable {
    pub fn new(param_id: impl Into<String>) -> ParamTable {
        ParamTable {
            param_id: param_id.into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn value(&self, m: usize) -> Option<f64> {
        self.entries.get(&m).map(|e| e.value)
    }

    pub fn max_value(&self) -> Option<&EstimateValue> {
        self.entries
            .values()
            .max_by(|a, b| a.value.total_cmp(&b.value))
    }

    pub fn all_exact(&self) -> bool {
        self.entries.values().all(|e| e.mode == Mode::Exact)
    }

    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        let vals: Vec<f64> = self.entries.values().map(|e| e.value).collect();
        vals.windows(2).all(|w| w[1] >= w[0] - tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{summing_basis, Basis};
    use crate::space::Space;
    use alloc::vec;

    #[test]
    fn witnesses_reevaluate() {
        let b = Basis::identity(Space::lp(1.0, 3).unwrap());
        let w = Witness::SetNorm {
            indices: vec![0, 2],
        };
        assert_eq!(w.reevaluate(&b).unwrap(), 2.0);

        let w = Witness::Projection {
            set: vec![0],
            coeffs: vec![3.0, 1.0, 0.0],
        };
        assert_eq!(w.reevaluate(&b).unwrap(), 0.75);

        let s = summing_basis(4).unwrap();
        let w = Witness::SignedSuppression {
            indices: vec![0, 1, 2, 3],
            signs: vec![1, -1, 1, -1],
            subset: vec![0, 2],
        };
        // alternating signs make the full sum small, the positive part big
        assert_eq!(w.reevaluate(&s).unwrap(), 2.0);
    }

    #[test]
    fn zero_denominator_witness_is_an_error() {
        let b = Basis::identity(Space::lp(1.0, 2).unwrap());
        let w = Witness::Projection {
            set: vec![0],
            coeffs: vec![0.0, 0.0],
        };
        assert!(w.reevaluate(&b).is_err());
    }

    #[test]
    fn table_monotonicity_helper() {
        let b = Basis::identity(Space::lp(1.0, 2).unwrap());
        let witness = Witness::SetNorm { indices: vec![0] };
        let mut t = ParamTable::new("phi");
        t.entries.insert(
            1,
            EstimateValue::new(1.0, Mode::Exact, witness.clone()),
        );
        t.entries.insert(2, EstimateValue::new(2.0, Mode::Exact, witness));
        assert!(t.is_nondecreasing(0.0));
        assert!(t.entries[&1].witness_consistent(&b, 1e-9));
    }
}
