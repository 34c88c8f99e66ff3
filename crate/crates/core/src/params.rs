//! Indexed parameters of a basis: fundamental function, democracy parameter,
//! SUCC constant, unconditionality constants, and the quasi-greedy /
//! truncation-quasi-greedy constants.
//!
//! Every sup-type quantity is reported as `Exact` only when a finite oracle
//! covers the whole search space (subset sweeps, signed-set enumeration,
//! polyhedral vertex maximization, or the lattice contraction argument for
//! identity systems); everything else is a certified lower bound whose
//! witness re-evaluates to the reported value.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::estimate::{EstimateValue, Mode, ParamTable, Witness};
use crate::probe::ProbeFamily;
use crate::sets;

/// Full subset sweeps switch to sampling above this dimension.
pub const FULL_SWEEP_MAX_DIM: usize = 24;
/// Exact SUCC enumeration (3^n signed sets) above this dimension is refused.
pub const SUCC_EXACT_MAX_DIM: usize = 12;
/// Probe-mode estimators enumerate all coordinate subsets up to this
/// dimension and sample beyond it.
pub const SUBSET_ENUM_MAX_DIM: usize = 12;
/// Cap on tie-enumeration of greedy sets per probe.
pub const GREEDY_TIE_CAP: u64 = 4096;
/// Operation budget for the exact vertex-based unconditionality oracle.
const VERTEX_ORACLE_BUDGET: u64 = 200_000_000;

const SAMPLES_PER_CARDINALITY: usize = 512;

/// Per-cardinality extremes of `||1_A||` with their witnesses.
struct IndicatorExtremes {
    /// index k-1 holds (max value, argmax indices) over |A| = k
    max: Vec<(f64, Vec<usize>)>,
    /// index k-1 holds (min value, argmin indices) over |A| = k
    min: Vec<(f64, Vec<usize>)>,
    exact: bool,
}

/// Depth-first sweep over all subsets of cardinality <= `max_card`,
/// maintaining the ambient partial sum of the selected columns; `visit` sees
/// (mask, cardinality, sum).
fn for_each_subset_sum(
    columns: &[Vec<f64>],
    max_card: usize,
    visit: &mut impl FnMut(u64, usize, &[f64]),
) {
    fn rec(
        columns: &[Vec<f64>],
        i: usize,
        mask: u64,
        card: usize,
        max_card: usize,
        buf: &mut [f64],
        visit: &mut impl FnMut(u64, usize, &[f64]),
    ) {
        if i == columns.len() {
            visit(mask, card, buf);
            return;
        }
        rec(columns, i + 1, mask, card, max_card, buf, visit);
        if card < max_card {
            for (b, c) in buf.iter_mut().zip(&columns[i]) {
                *b += c;
            }
            rec(
                columns,
                i + 1,
                mask | 1 << i,
                card + 1,
                max_card,
                buf,
                visit,
            );
            for (b, c) in buf.iter_mut().zip(&columns[i]) {
                *b -= c;
            }
        }
    }
    let dim = columns.first().map_or(0, Vec::len);
    let mut buf = vec![0.0; dim];
    rec(columns, 0, 0, 0, max_card, &mut buf, visit);
}

fn indicator_extremes(basis: &Basis, m_max: usize) -> IndicatorExtremes {
    let n = basis.dim();
    let space = basis.space();
    let mut max = vec![(f64::NEG_INFINITY, Vec::new()); m_max];
    let mut min = vec![(f64::INFINITY, Vec::new()); m_max];
    if n <= FULL_SWEEP_MAX_DIM {
        let columns: Vec<Vec<f64>> = (0..n).map(|j| basis.vectors().column(j)).collect();
        for_each_subset_sum(&columns, m_max, &mut |mask, card, sum| {
            if card == 0 {
                return;
            }
            let v = space.norm_raw(sum);
            let slot = card - 1;
            if v > max[slot].0 {
                max[slot] = (v, sets::mask_indices(mask, n));
            }
            if v < min[slot].0 {
                min[slot] = (v, sets::mask_indices(mask, n));
            }
        });
        IndicatorExtremes {
            max,
            min,
            exact: true,
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1d1c);
        let mut scratch: Vec<usize> = (0..n).collect();
        for k in 1..=m_max {
            for _ in 0..SAMPLES_PER_CARDINALITY {
                // partial Fisher-Yates for a uniform k-subset
                for pos in 0..k {
                    let swap = rng.random_range(pos..n);
                    scratch.swap(pos, swap);
                }
                let mut indices: Vec<usize> = scratch[..k].to_vec();
                indices.sort_unstable();
                let signs = vec![1i8; k];
                let f = basis
                    .signed_indicator(&indices, &signs)
                    .expect("indices in range");
                let v = space.norm_raw(&f);
                let slot = k - 1;
                if v > max[slot].0 {
                    max[slot] = (v, indices.clone());
                }
                if v < min[slot].0 {
                    min[slot] = (v, indices);
                }
            }
        }
        IndicatorExtremes {
            max,
            min,
            exact: false,
        }
    }
}

/// Fundamental function `phi(m) = sup_{|A| <= m} ||1_A||` for m = 1..=m_max.
pub fn fundamental_function(basis: &Basis, m_max: usize) -> Result<ParamTable> {
    let n = basis.dim();
    if m_max > n {
        return Err(Error::RankTooLarge { m: m_max, dim: n });
    }
    let extremes = indicator_extremes(basis, m_max);
    let mode = if extremes.exact {
        Mode::Exact
    } else {
        Mode::LowerBound
    };
    let mut table = ParamTable::new("phi");
    let mut best = f64::NEG_INFINITY;
    let mut best_set: Vec<usize> = Vec::new();
    for m in 1..=m_max {
        let (v, ref set) = extremes.max[m - 1];
        if v > best {
            best = v;
            best_set = set.clone();
        }
        table.entries.insert(
            m,
            EstimateValue::new(
                best,
                mode,
                Witness::SetNorm {
                    indices: best_set.clone(),
                },
            ),
        );
    }
    Ok(table)
}

/// Democracy parameter `mu_m = sup_{|A| = |B| <= m} ||1_A|| / ||1_B||`.
pub fn democracy_parameter(basis: &Basis, m_max: usize) -> Result<ParamTable> {
    let n = basis.dim();
    if m_max > n {
        return Err(Error::RankTooLarge { m: m_max, dim: n });
    }
    let extremes = indicator_extremes(basis, m_max);
    let mode = if extremes.exact {
        Mode::Exact
    } else {
        Mode::LowerBound
    };
    let mut table = ParamTable::new("mu");
    let mut best = f64::NEG_INFINITY;
    let mut witness = Witness::SetRatio {
        numerator: Vec::new(),
        denominator: Vec::new(),
    };
    for m in 1..=m_max {
        let (hi, ref a) = extremes.max[m - 1];
        let (lo, ref b) = extremes.min[m - 1];
        let ratio = hi / lo;
        if ratio > best {
            best = ratio;
            witness = Witness::SetRatio {
                numerator: a.clone(),
                denominator: b.clone(),
            };
        }
        table
            .entries
            .insert(m, EstimateValue::new(best, mode, witness.clone()));
    }
    Ok(table)
}

/// SUCC constant: `sup ||1_{eps,B}|| / ||1_{eps,A}||` over `B` a subset of
/// `A`, `|A| <= max_card`, and sign patterns `eps` on `A`.
///
/// Exact for n <= 12 via a superset-minimum dynamic program over the 3^n
/// signed sets; seeded sampling lower bound beyond that.
pub fn succ_constant(basis: &Basis, max_card: usize) -> Result<EstimateValue> {
    let n = basis.dim();
    let max_card = max_card.min(n);
    if max_card == 0 {
        return Err(Error::InvalidParameter("SUCC needs max_card >= 1".into()));
    }
    if basis.is_identity_lattice() {
        return Ok(EstimateValue::new(
            1.0,
            Mode::Exact,
            Witness::SignedSuppression {
                indices: vec![0],
                signs: vec![1],
                subset: vec![0],
            },
        ));
    }
    if n <= SUCC_EXACT_MAX_DIM {
        succ_exact(basis, max_card)
    } else {
        succ_sampled(basis, max_card)
    }
}

fn succ_exact(basis: &Basis, max_card: usize) -> Result<EstimateValue> {
    let n = basis.dim();
    let pow3 = sets::pow3_table(n);
    let total = pow3[n] as usize;
    let mut norms = vec![0.0f64; total];
    let mut cards = vec![0u8; total];
    let mut buf = vec![0.0; n];
    for code in 1..total {
        sets::signed_set_coefficients(code as u64, n, &mut buf);
        norms[code] = basis.signed_indicator_norm(&buf);
        cards[code] = sets::signed_set_cardinality(code as u64) as u8;
    }
    // minsup[code] = min norm over signed supersets with cardinality <= cap
    let mut minsup = vec![f64::INFINITY; total];
    let mut arg: Vec<u64> = vec![0; total];
    for code in (1..total).rev() {
        if cards[code] as usize <= max_card {
            minsup[code] = norms[code];
            arg[code] = code as u64;
        }
        let mut c = code as u64;
        for i in 0..n {
            if c % 3 == 0 {
                for d in [1u64, 2u64] {
                    let ext = code + (d * pow3[i]) as usize;
                    if minsup[ext] < minsup[code] {
                        minsup[code] = minsup[ext];
                        arg[code] = arg[ext];
                    }
                }
            }
            c /= 3;
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_code = 0usize;
    for code in 1..total {
        if !minsup[code].is_finite() {
            continue;
        }
        let ratio = norms[code] / minsup[code];
        if ratio > best {
            best = ratio;
            best_code = code;
        }
    }
    let (subset, _) = sets::signed_set_members(best_code as u64, n);
    let (indices, signs) = sets::signed_set_members(arg[best_code], n);
    Ok(EstimateValue::new(
        best,
        Mode::Exact,
        Witness::SignedSuppression {
            indices,
            signs,
            subset,
        },
    ))
}

fn succ_sampled(basis: &Basis, max_card: usize) -> Result<EstimateValue> {
    let n = basis.dim();
    let space = basis.space();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5acc);
    let mut best = 1.0f64;
    let mut witness = Witness::SignedSuppression {
        indices: vec![0],
        signs: vec![1],
        subset: vec![0],
    };
    let mut scratch: Vec<usize> = (0..n).collect();
    for _ in 0..4096 {
        let card = rng.random_range(1..=max_card);
        for pos in 0..card {
            let swap = rng.random_range(pos..n);
            scratch.swap(pos, swap);
        }
        let mut indices: Vec<usize> = scratch[..card].to_vec();
        indices.sort_unstable();
        let signs: Vec<i8> = (0..card)
            .map(|_| if rng.random_range(0..2) == 0 { 1 } else { -1 })
            .collect();
        let full = basis.signed_indicator(&indices, &signs)?;
        let denom = space.norm_raw(&full);
        if denom == 0.0 {
            continue;
        }
        for _ in 0..32 {
            let keep: Vec<usize> = (0..card).filter(|_| rng.random_range(0..2) == 1).collect();
            if keep.is_empty() {
                continue;
            }
            let subset: Vec<usize> = keep.iter().map(|&pos| indices[pos]).collect();
            let sub_signs: Vec<i8> = keep.iter().map(|&pos| signs[pos]).collect();
            let num = space.norm_raw(&basis.signed_indicator(&subset, &sub_signs)?);
            let ratio = num / denom;
            if ratio > best {
                best = ratio;
                witness = Witness::SignedSuppression {
                    indices: indices.clone(),
                    signs: signs.clone(),
                    subset,
                };
            }
        }
    }
    Ok(EstimateValue::new(best, Mode::LowerBound, witness))
}

/// Unconditionality constants `k_m = sup_{|A| <= m} ||S_A||`.
///
/// Exact via unit-ball vertex maximization on polyhedral spaces within
/// budget, exact (= 1) for identity systems in lattice spaces, probe lower
/// bound otherwise.
pub fn unconditionality_constants(
    basis: &Basis,
    m_max: usize,
    probe: &ProbeFamily,
    vertex_cap: usize,
) -> Result<ParamTable> {
    let n = basis.dim();
    if m_max > n {
        return Err(Error::RankTooLarge { m: m_max, dim: n });
    }
    if basis.is_identity_lattice() {
        let mut table = ParamTable::new("k");
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        for m in 1..=m_max {
            table.entries.insert(
                m,
                EstimateValue::new(
                    1.0,
                    Mode::Exact,
                    Witness::Projection {
                        set: vec![0],
                        coeffs: e1.clone(),
                    },
                ),
            );
        }
        return Ok(table);
    }
    if basis.space().is_polyhedral() {
        if let Ok(vertices) = basis.space().unit_ball_vertices(vertex_cap) {
            let ops = (1u64 << n.min(62))
                .saturating_mul(vertices.len() as u64)
                .saturating_mul(n as u64);
            if n <= FULL_SWEEP_MAX_DIM && ops <= VERTEX_ORACLE_BUDGET {
                return km_vertex_exact(basis, m_max, &vertices);
            }
        }
    }
    km_probe(basis, m_max, probe)
}

fn km_vertex_exact(basis: &Basis, m_max: usize, vertices: &[Vec<f64>]) -> Result<ParamTable> {
    let n = basis.dim();
    let space = basis.space();
    // best projection ratio per cardinality, with (mask, vertex) witness
    let mut per_card = vec![(f64::NEG_INFINITY, 0u64, 0usize); m_max];
    for (vi, v) in vertices.iter().enumerate() {
        let coeffs = basis.coefficients_raw(v);
        let denom = space.norm_raw(v);
        // columns scaled by the vertex coefficients: partial sums are S_A v
        let scaled: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                basis
                    .vectors()
                    .column(j)
                    .iter()
                    .map(|x| x * coeffs[j])
                    .collect()
            })
            .collect();
        for_each_subset_sum(&scaled, m_max, &mut |mask, card, sum| {
            if card == 0 {
                return;
            }
            let ratio = space.norm_raw(sum) / denom;
            let slot = card - 1;
            if ratio > per_card[slot].0 {
                per_card[slot] = (ratio, mask, vi);
            }
        });
    }
    let mut table = ParamTable::new("k");
    let mut best = f64::NEG_INFINITY;
    let mut best_witness: Option<Witness> = None;
    for m in 1..=m_max {
        let (v, mask, vi) = per_card[m - 1];
        if v > best {
            best = v;
            best_witness = Some(Witness::Projection {
                set: sets::mask_indices(mask, n),
                coeffs: basis.coefficients_raw(&vertices[vi]),
            });
        }
        let w = best_witness.clone().ok_or(Error::EmptyProbeFamily)?;
        table.entries.insert(m, EstimateValue::new(best, Mode::Exact, w));
    }
    Ok(table)
}

fn km_probe(basis: &Basis, m_max: usize, probe: &ProbeFamily) -> Result<ParamTable> {
    if probe.is_empty() {
        return Err(Error::EmptyProbeFamily);
    }
    let n = basis.dim();
    let space = basis.space();
    let mut per_card: Vec<(f64, Vec<usize>, Vec<f64>)> =
        vec![(f64::NEG_INFINITY, Vec::new(), Vec::new()); m_max];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a5a);
    for coeffs in probe.vectors() {
        let f = basis.combine(coeffs);
        let denom = space.norm_raw(&f);
        if denom == 0.0 {
            continue;
        }
        let eval_mask = |mask: u64, per_card: &mut Vec<(f64, Vec<usize>, Vec<f64>)>| {
            let set = sets::mask_indices(mask, n);
            if set.is_empty() || set.len() > m_max {
                return;
            }
            let masked = crate::operators::mask_coefficients(coeffs, &set).expect("in range");
            let ratio = space.norm_raw(&basis.combine(&masked)) / denom;
            let slot = set.len() - 1;
            if ratio > per_card[slot].0 {
                per_card[slot] = (ratio, set, coeffs.clone());
            }
        };
        if n <= SUBSET_ENUM_MAX_DIM {
            for mask in 1..(1u64 << n) {
                eval_mask(mask, &mut per_card);
            }
        } else {
            // greedy prefixes plus seeded random masks
            let order = crate::operators::greedy_set_of_coefficients(coeffs, n)?;
            let mut mask = 0u64;
            for &j in order.indices() {
                mask |= 1 << j;
                eval_mask(mask, &mut per_card);
            }
            for _ in 0..256 {
                let m: u64 = rng.random_range(1..(1u64 << n.min(62)));
                eval_mask(m, &mut per_card);
            }
        }
    }
    let mut table = ParamTable::new("k");
    let mut best = f64::NEG_INFINITY;
    let mut witness: Option<Witness> = None;
    for m in 1..=m_max {
        let (v, ref set, ref coeffs) = per_card[m - 1];
        if v.is_finite() && v > best {
            best = v;
            witness = Some(Witness::Projection {
                set: set.clone(),
                coeffs: coeffs.clone(),
            });
        }
        let w = witness.clone().ok_or(Error::EmptyProbeFamily)?;
        table
            .entries
            .insert(m, EstimateValue::new(best, Mode::LowerBound, w));
    }
    Ok(table)
}

/// `sup_{f, m, greedy sets} ||G_m f|| / ||f||` over the probe family,
/// tie-robust via full greedy-set enumeration.
pub fn quasi_greedy_constant(basis: &Basis, probe: &ProbeFamily) -> Result<EstimateValue> {
    greedy_type_constant(basis, probe, false)
}

/// `sup_{f, m, greedy sets} ||R_m f|| / ||f||` over the probe family.
pub fn truncation_qg_constant(basis: &Basis, probe: &ProbeFamily) -> Result<EstimateValue> {
    greedy_type_constant(basis, probe, true)
}

fn greedy_type_constant(
    basis: &Basis,
    probe: &ProbeFamily,
    truncate: bool,
) -> Result<EstimateValue> {
    let n = basis.dim();
    if basis.is_identity_lattice() {
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        let witness = if truncate {
            Witness::Truncation {
                set: vec![0],
                coeffs: e1,
            }
        } else {
            Witness::Projection {
                set: vec![0],
                coeffs: e1,
            }
        };
        return Ok(EstimateValue::new(1.0, Mode::Exact, witness));
    }
    if probe.is_empty() {
        return Err(Error::EmptyProbeFamily);
    }
    let space = basis.space();
    let mut best = f64::NEG_INFINITY;
    let mut witness: Option<Witness> = None;
    for coeffs in probe.vectors() {
        let f = basis.combine(coeffs);
        let denom = space.norm_raw(&f);
        if denom == 0.0 {
            continue;
        }
        for m in 1..=n {
            let greedy_sets = match sets::all_greedy_sets(coeffs, m, GREEDY_TIE_CAP) {
                Ok(s) => s,
                Err(Error::Capacity { .. }) => {
                    vec![crate::operators::greedy_set_of_coefficients(coeffs, m)?
                        .indices()
                        .to_vec()]
                }
                Err(e) => return Err(e),
            };
            for set in greedy_sets {
                let image = if truncate {
                    crate::operators::truncation_coefficients(coeffs, &set)?
                } else {
                    crate::operators::mask_coefficients(coeffs, &set)?
                };
                let ratio = space.norm_raw(&basis.combine(&image)) / denom;
                if ratio > best {
                    best = ratio;
                    witness = Some(if truncate {
                        Witness::Truncation {
                            set: set.clone(),
                            coeffs: coeffs.clone(),
                        }
                    } else {
                        Witness::Projection {
                            set: set.clone(),
                            coeffs: coeffs.clone(),
                        }
                    });
                }
            }
        }
    }
    let witness = witness.ok_or(Error::EmptyProbeFamily)?;
    Ok(EstimateValue::new(best, Mode::LowerBound, witness))
}

/// `psi(m) = min over |B| = m of ||1_B||`, the internal consistency
/// companion of the democracy parameter.
pub fn indicator_minimum(basis: &Basis, m_max: usize) -> Result<BTreeMap<usize, f64>> {
    let n = basis.dim();
    if m_max > n {
        return Err(Error::RankTooLarge { m: m_max, dim: n });
    }
    let extremes = indicator_extremes(basis, m_max);
    Ok((1..=m_max).map(|m| (m, extremes.min[m - 1].0)).collect())
}
