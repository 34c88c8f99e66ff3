//! The threshold-indexed functions on a geometric grid: lambda (truncation
//! after thresholding), theta (projection onto the full threshold set), and
//! phi (projection onto any subset of the threshold set), over the
//! coefficient unit ball.
//!
//! The true suprema range over an infinite set; tables therefore carry their
//! search-space provenance. `ExhaustiveGrid` means every coefficient vector
//! with entries in `{0} u {+-s^-j}` was visited (a certified lower bound for
//! the true function, exact over that grid); `Probe` means a probe-family
//! lower bound; `LatticeExact` means the identity-system contraction argument
//! pins the true value at 1.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::Basis;
use crate::error::{Error, Result};
use crate::estimate::{EstimateValue, Mode, Witness};
use crate::math;
use crate::operators;
use crate::probe::ProbeFamily;

/// Exhaustive grid enumeration is refused above this dimension.
pub const EXHAUSTIVE_MAX_DIM: usize = 6;
/// Subsets of the threshold set are enumerated exhaustively up to this size.
const PHI_SUBSET_ENUM_MAX: usize = 16;

/// Geometric threshold grid a_k = s^-k, k = 1..=k_max, with s > 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    s: f64,
    k_max: usize,
}

impl ThresholdGrid {
    pub fn new(s: f64, k_max: usize) -> Result<ThresholdGrid> {
        if !(s > 1.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "grid ratio must be finite and > 1, got {s}"
            )));
        }
        if k_max == 0 {
            return Err(Error::InvalidParameter("grid needs k_max >= 1".into()));
        }
        Ok(ThresholdGrid { s, k_max })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// a_k for 1-based k.
    pub fn point(&self, k: usize) -> f64 {
        debug_assert!(k >= 1 && k <= self.k_max);
        math::powf(self.s, -(k as f64))
    }

    pub fn points(&self) -> Vec<f64> {
        (1..=self.k_max).map(|k| self.point(k)).collect()
    }

    /// Smallest grid index k with s^-k <= a (snap a downward onto the grid).
    pub fn snap_down(&self, a: f64) -> Option<usize> {
        (1..=self.k_max).find(|&k| self.point(k) <= a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuncId {
    Lambda,
    Theta,
    Phi,
}

impl FuncId {
    pub fn as_str(&self) -> &'static str {
        match self {
            FuncId::Lambda => "lambda",
            FuncId::Theta => "theta",
            FuncId::Phi => "phi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TableSource {
    ExhaustiveGrid { levels: usize },
    Probe,
    LatticeExact,
}

impl TableSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            TableSource::ExhaustiveGrid { .. } => "exhaustive_grid",
            TableSource::Probe => "probe",
            TableSource::LatticeExact => "lattice_exact",
        }
    }
}

/// A threshold function sampled on the grid: raw per-point estimates plus the
/// non-increasing-in-a envelope (running max toward smaller thresholds).
#[derive(Debug, Clone)]
pub struct FunctionTable {
    pub func_id: FuncId,
    pub grid: ThresholdGrid,
    /// index k-1 corresponds to a_k
    pub raw: Vec<EstimateValue>,
    pub envelope: Vec<f64>,
    pub source: TableSource,
}

impl FunctionTable {
    fn from_raw(
        func_id: FuncId,
        grid: ThresholdGrid,
        raw: Vec<EstimateValue>,
        source: TableSource,
    ) -> FunctionTable {
        let envelope = running_max(&raw);
        FunctionTable {
            func_id,
            grid,
            raw,
            envelope,
            source,
        }
    }

    /// Raw estimate at a_k (1-based k).
    pub fn raw_value(&self, k: usize) -> f64 {
        self.raw[k - 1].value
    }

    /// Envelope value at a_k (1-based k).
    pub fn envelope_value(&self, k: usize) -> f64 {
        self.envelope[k - 1]
    }

    /// True when hard inequality checks may treat the table as covering its
    /// whole declared search space (grid-exhaustive or exactly known).
    pub fn search_space_exact(&self) -> bool {
        matches!(
            self.source,
            TableSource::ExhaustiveGrid { .. } | TableSource::LatticeExact
        )
    }

    pub fn same_grid(&self, other: &FunctionTable) -> bool {
        self.grid == other.grid
    }
}

fn running_max(raw: &[EstimateValue]) -> Vec<f64> {
    let mut acc = f64::NEG_INFINITY;
    raw.iter()
        .map(|e| {
            acc = acc.max(e.value);
            acc
        })
        .collect()
}

/// Re-derive the envelope (running max over j <= k); idempotent.
pub fn monotone_envelope(table: &FunctionTable) -> FunctionTable {
    let mut out = table.clone();
    out.envelope = running_max(&table.raw);
    out
}

/// Envelope value at the largest grid point a_1, the finite stand-in for the
/// limit value at 1^-.
pub fn succ_from_lambda(table: &FunctionTable) -> EstimateValue {
    let first = &table.raw[0];
    EstimateValue::new(table.envelope[0], first.mode, first.witness.clone())
}

/// For identity systems in lattice spaces every ratio is at most 1 and the
/// single-coordinate witness attains it, so all three functions are exactly 1.
pub fn lattice_exact_table(
    basis: &Basis,
    func_id: FuncId,
    grid: &ThresholdGrid,
) -> Option<FunctionTable> {
    if !basis.is_identity_lattice() {
        return None;
    }
    let n = basis.dim();
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let raw: Vec<EstimateValue> = grid
        .points()
        .iter()
        .map(|&a| {
            let witness = match func_id {
                FuncId::Lambda => Witness::ThresholdTruncation {
                    coeffs: e1.clone(),
                    a,
                },
                FuncId::Theta => Witness::ThresholdProjection {
                    coeffs: e1.clone(),
                    a,
                    subset: None,
                },
                FuncId::Phi => Witness::ThresholdProjection {
                    coeffs: e1.clone(),
                    a,
                    subset: Some(vec![0]),
                },
            };
            EstimateValue::new(1.0, Mode::Exact, witness)
        })
        .collect();
    Some(FunctionTable::from_raw(
        func_id,
        grid.clone(),
        raw,
        TableSource::LatticeExact,
    ))
}

#[derive(Clone)]
struct RatioAccumulator {
    value: f64,
    witness: Option<Witness>,
}

impl RatioAccumulator {
    fn new() -> RatioAccumulator {
        RatioAccumulator {
            value: f64::NEG_INFINITY,
            witness: None,
        }
    }

    fn offer(&mut self, value: f64, witness: impl FnOnce() -> Witness) {
        if value > self.value {
            self.value = value;
            self.witness = Some(witness());
        }
    }

    fn into_estimate(self) -> Result<EstimateValue> {
        let witness = self.witness.ok_or(Error::EmptyProbeFamily)?;
        Ok(EstimateValue::new(self.value, Mode::LowerBound, witness))
    }
}

/// Evaluate the three ratios of one coefficient vector at one threshold.
/// Returns (lambda, theta, phi, phi-attaining subset).
fn ratios_at(
    basis: &Basis,
    coeffs: &[f64],
    norm_f: f64,
    a: f64,
) -> Result<(f64, f64, f64, Vec<usize>)> {
    let space = basis.space();
    let set = operators::threshold_set_of_coefficients(coeffs, a);
    let trunc = operators::truncation_coefficients(coeffs, &set)?;
    let lambda = space.norm_raw(&basis.combine(&trunc)) / norm_f;
    let masked = operators::mask_coefficients(coeffs, &set)?;
    let theta = space.norm_raw(&basis.combine(&masked)) / norm_f;

    let mut phi = theta;
    let mut phi_subset = set.clone();
    if set.len() <= PHI_SUBSET_ENUM_MAX {
        let card = set.len();
        for sub_mask in 0u64..(1 << card) {
            let subset: Vec<usize> = (0..card)
                .filter(|p| sub_mask >> p & 1 == 1)
                .map(|p| set[p])
                .collect();
            let sub_masked = operators::mask_coefficients(coeffs, &subset)?;
            let value = space.norm_raw(&basis.combine(&sub_masked)) / norm_f;
            if value > phi {
                phi = value;
                phi_subset = subset;
            }
        }
    } else {
        // fall back to magnitude-ordered prefixes of the threshold set
        let mut by_mag = set.clone();
        by_mag.sort_by(|&x, &y| {
            math::abs(coeffs[y])
                .total_cmp(&math::abs(coeffs[x]))
                .then(x.cmp(&y))
        });
        let mut prefix = Vec::new();
        for &j in &by_mag {
            prefix.push(j);
            let mut sorted = prefix.clone();
            sorted.sort_unstable();
            let sub_masked = operators::mask_coefficients(coeffs, &sorted)?;
            let value = space.norm_raw(&basis.combine(&sub_masked)) / norm_f;
            if value > phi {
                phi = value;
                phi_subset = sorted;
            }
        }
    }
    Ok((lambda, theta, phi, phi_subset))
}

struct TripleAccumulators {
    lambda: Vec<RatioAccumulator>,
    theta: Vec<RatioAccumulator>,
    phi: Vec<RatioAccumulator>,
}

impl TripleAccumulators {
    fn new(k_max: usize) -> TripleAccumulators {
        TripleAccumulators {
            lambda: vec![RatioAccumulator::new(); k_max],
            theta: vec![RatioAccumulator::new(); k_max],
            phi: vec![RatioAccumulator::new(); k_max],
        }
    }

    fn offer_vector(&mut self, basis: &Basis, coeffs: &[f64], points: &[f64]) -> Result<()> {
        let norm_f = basis.space().norm_raw(&basis.combine(coeffs));
        if norm_f == 0.0 {
            return Ok(());
        }
        for (ki, &a) in points.iter().enumerate() {
            let (l, t, p, p_subset) = ratios_at(basis, coeffs, norm_f, a)?;
            self.lambda[ki].offer(l, || Witness::ThresholdTruncation {
                coeffs: coeffs.to_vec(),
                a,
            });
            self.theta[ki].offer(t, || Witness::ThresholdProjection {
                coeffs: coeffs.to_vec(),
                a,
                subset: None,
            });
            self.phi[ki].offer(p, || Witness::ThresholdProjection {
                coeffs: coeffs.to_vec(),
                a,
                subset: Some(p_subset),
            });
        }
        Ok(())
    }

    fn finish(
        self,
        grid: &ThresholdGrid,
        source: TableSource,
    ) -> Result<(FunctionTable, FunctionTable, FunctionTable)> {
        let build = |func_id: FuncId,
                     best: Vec<RatioAccumulator>,
                     source: TableSource|
         -> Result<FunctionTable> {
            let raw: Result<Vec<EstimateValue>> =
                best.into_iter().map(RatioAccumulator::into_estimate).collect();
            Ok(FunctionTable::from_raw(func_id, grid.clone(), raw?, source))
        };
        Ok((
            build(FuncId::Lambda, self.lambda, source.clone())?,
            build(FuncId::Theta, self.theta, source.clone())?,
            build(FuncId::Phi, self.phi, source)?,
        ))
    }
}

/// Exhaustive oracle over all coefficient vectors with entries in
/// `{0} u {+-s^-j : 0 <= j <= levels}`; requires n <= 6 and levels >= k_max+1
/// (so the scaling map between neighboring thresholds stays inside the grid).
pub fn exact_grid_tables(
    basis: &Basis,
    grid: &ThresholdGrid,
    levels: usize,
) -> Result<(FunctionTable, FunctionTable, FunctionTable)> {
    let n = basis.dim();
    if n > EXHAUSTIVE_MAX_DIM {
        return Err(Error::Capacity {
            what: "exhaustive grid oracle (dimension cap)",
            needed: n as u64,
            cap: EXHAUSTIVE_MAX_DIM as u64,
        });
    }
    if levels < grid.k_max() + 1 {
        return Err(Error::InvalidParameter(alloc::format!(
            "levels must be >= k_max + 1 ({} < {})",
            levels,
            grid.k_max() + 1
        )));
    }
    let s = grid.s();
    let mut values = vec![0.0f64];
    for j in 0..=levels {
        let mag = math::powf(s, -(j as f64));
        values.push(mag);
        values.push(-mag);
    }
    let points = grid.points();
    let mut acc = TripleAccumulators::new(grid.k_max());

    let mut digits = vec![0usize; n];
    let mut coeffs = vec![0.0f64; n];
    'sweep: loop {
        // advance the odometer; the all-zero start is skipped by advancing first
        let mut pos = 0;
        loop {
            if pos == n {
                break 'sweep;
            }
            digits[pos] += 1;
            if digits[pos] < values.len() {
                coeffs[pos] = values[digits[pos]];
                break;
            }
            digits[pos] = 0;
            coeffs[pos] = 0.0;
            pos += 1;
        }
        acc.offer_vector(basis, &coeffs, &points)?;
    }
    acc.finish(grid, TableSource::ExhaustiveGrid { levels })
}

/// One function from the exhaustive oracle (convenience over
/// [`exact_grid_tables`]).
pub fn exact_grid_oracle(
    basis: &Basis,
    func_id: FuncId,
    grid: &ThresholdGrid,
    levels: usize,
) -> Result<FunctionTable> {
    let (lambda, theta, phi) = exact_grid_tables(basis, grid, levels)?;
    Ok(match func_id {
        FuncId::Lambda => lambda,
        FuncId::Theta => theta,
        FuncId::Phi => phi,
    })
}

/// Probe lower-bound tables for all three functions from one probe family.
pub fn probe_tables(
    basis: &Basis,
    grid: &ThresholdGrid,
    probe: &ProbeFamily,
) -> Result<(FunctionTable, FunctionTable, FunctionTable)> {
    if probe.is_empty() {
        return Err(Error::EmptyProbeFamily);
    }
    let points = grid.points();
    let mut acc = TripleAccumulators::new(grid.k_max());
    for coeffs in probe.vectors() {
        acc.offer_vector(basis, coeffs, &points)?;
    }
    acc.finish(grid, TableSource::Probe)
}

/// One function from the probe estimator.
pub fn probe_estimate(
    basis: &Basis,
    func_id: FuncId,
    grid: &ThresholdGrid,
    probe: &ProbeFamily,
) -> Result<FunctionTable> {
    let (lambda, theta, phi) = probe_tables(basis, grid, probe)?;
    Ok(match func_id {
        FuncId::Lambda => lambda,
        FuncId::Theta => theta,
        FuncId::Phi => phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{summing_basis, Basis};
    use crate::probe::{ProbeConfig, ProbeFamily};
    use crate::space::Space;

    fn grid4() -> ThresholdGrid {
        ThresholdGrid::new(2.0, 4).unwrap()
    }

    #[test]
    fn grid_points_and_snap() {
        let g = grid4();
        assert_eq!(g.points(), vec![0.5, 0.25, 0.125, 0.0625]);
        assert_eq!(g.snap_down(0.3), Some(2));
        assert_eq!(g.snap_down(0.5), Some(1));
        assert_eq!(g.snap_down(0.01), None);
    }

    #[test]
    fn unit_l1_tables_are_all_ones() {
        let b = Basis::identity(Space::lp(1.0, 3).unwrap());
        let (l, t, p) = exact_grid_tables(&b, &grid4(), 6).unwrap();
        for k in 1..=4 {
            assert_eq!(l.raw_value(k), 1.0);
            assert_eq!(t.raw_value(k), 1.0);
            assert_eq!(p.raw_value(k), 1.0);
        }
        // and the lattice shortcut agrees
        let shortcut = lattice_exact_table(&b, FuncId::Lambda, &grid4()).unwrap();
        for k in 1..=4 {
            assert_eq!(shortcut.raw_value(k), 1.0);
        }
        for e in shortcut.raw.iter().chain(l.raw.iter()) {
            assert!(e.witness_consistent(&b, 1e-9));
        }
    }

    #[test]
    fn entries_are_at_least_one() {
        let b = summing_basis(4).unwrap();
        let (l, t, p) = exact_grid_tables(&b, &grid4(), 6).unwrap();
        for k in 1..=4 {
            assert!(l.raw_value(k) >= 1.0);
            assert!(t.raw_value(k) >= 1.0);
            assert!(p.raw_value(k) >= 1.0);
        }
    }

    #[test]
    fn summing_tables_match_independent_oracle() {
        // Independent enumeration for the summing basis at n = 4, s = 2,
        // k_max = 4, levels = 6: explicit loops, prefix-sum ambient norm.
        let n = 4;
        let levels: usize = 6;
        let k_max = 4;
        let b = summing_basis(n).unwrap();
        let mut vals = vec![0.0f64];
        for j in 0..=levels {
            let m = 0.5f64.powi(j as i32);
            vals.push(m);
            vals.push(-m);
        }
        let sup_norm_of_coeffs = |c: &[f64]| -> f64 {
            // ambient entry i = sum_{j >= i} c_j
            let mut sup = 0.0f64;
            for i in 0..n {
                let acc: f64 = (i..n).map(|j| c[j]).sum();
                sup = sup.max(acc.abs());
            }
            sup
        };
        let mut expect_lambda = vec![0.0f64; k_max];
        let mut expect_theta = vec![0.0f64; k_max];
        let mut expect_phi = vec![0.0f64; k_max];
        let count = vals.len().pow(n as u32);
        for flat in 1..count {
            let mut idx = flat;
            let mut c = vec![0.0; n];
            for slot in c.iter_mut() {
                *slot = vals[idx % vals.len()];
                idx /= vals.len();
            }
            let nf = sup_norm_of_coeffs(&c);
            if nf == 0.0 {
                continue;
            }
            for k in 1..=k_max {
                let a = 0.5f64.powi(k as i32);
                let set: Vec<usize> = (0..n).filter(|&j| c[j].abs() >= a).collect();
                // lambda
                let min_mag = set
                    .iter()
                    .map(|&j| c[j].abs())
                    .fold(f64::INFINITY, f64::min);
                let mut tc = vec![0.0; n];
                if !set.is_empty() {
                    for &j in &set {
                        tc[j] = min_mag * c[j].signum();
                    }
                }
                expect_lambda[k - 1] = expect_lambda[k - 1].max(sup_norm_of_coeffs(&tc) / nf);
                // theta and phi
                let card = set.len();
                for sub in 0u32..(1 << card) {
                    let mut mc = vec![0.0; n];
                    for p in 0..card {
                        if sub >> p & 1 == 1 {
                            mc[set[p]] = c[set[p]];
                        }
                    }
                    let r = sup_norm_of_coeffs(&mc) / nf;
                    if sub == (1 << card) - 1 {
                        expect_theta[k - 1] = expect_theta[k - 1].max(r);
                    }
                    expect_phi[k - 1] = expect_phi[k - 1].max(r);
                }
            }
        }

        let grid = ThresholdGrid::new(2.0, k_max).unwrap();
        let (l, t, p) = exact_grid_tables(&b, &grid, levels).unwrap();
        for k in 1..=k_max {
            assert!(
                math::approx_eq(l.raw_value(k), expect_lambda[k - 1], 1e-12),
                "lambda k={k}: {} vs {}",
                l.raw_value(k),
                expect_lambda[k - 1]
            );
            assert!(math::approx_eq(t.raw_value(k), expect_theta[k - 1], 1e-12));
            assert!(math::approx_eq(p.raw_value(k), expect_phi[k - 1], 1e-12));
        }
        for table in [&l, &t, &p] {
            for e in &table.raw {
                assert!(e.witness_consistent(&b, 1e-9));
            }
        }
    }

    #[test]
    fn theta_never_exceeds_phi() {
        for basis in [
            summing_basis(4).unwrap(),
            crate::basis::perturbed_identity_basis(4, 9).unwrap(),
        ] {
            let (_, t, p) = exact_grid_tables(&basis, &grid4(), 6).unwrap();
            for k in 1..=4 {
                assert!(t.raw_value(k) <= p.raw_value(k));
            }
        }
    }

    #[test]
    fn exhaustive_tables_are_monotone_in_a() {
        for basis in [
            summing_basis(4).unwrap(),
            crate::basis::perturbed_identity_basis(4, 9).unwrap(),
        ] {
            let (l, t, p) = exact_grid_tables(&basis, &grid4(), 6).unwrap();
            for table in [&l, &t, &p] {
                for k in 2..=4 {
                    assert!(
                        table.raw_value(k) >= table.raw_value(k - 1) - 1e-12,
                        "{:?} at k={k}",
                        table.func_id
                    );
                }
            }
        }
    }

    #[test]
    fn probe_tables_stay_below_exhaustive() {
        let b = summing_basis(4).unwrap();
        let cfg = ProbeConfig {
            grid_levels: 6,
            ..ProbeConfig::default()
        };
        let fam = ProbeFamily::build(4, &cfg);
        assert!(fam.grid_valued());
        let (pl, pt, pp) = probe_tables(&b, &grid4(), &fam).unwrap();
        let (el, et, ep) = exact_grid_tables(&b, &grid4(), 6).unwrap();
        for k in 1..=4 {
            assert!(pl.raw_value(k) <= el.raw_value(k) + 1e-12);
            assert!(pt.raw_value(k) <= et.raw_value(k) + 1e-12);
            assert!(pp.raw_value(k) <= ep.raw_value(k) + 1e-12);
            assert!(pl.raw_value(k) >= 1.0);
        }
    }

    #[test]
    fn probe_tables_of_unit_l2_are_all_ones() {
        let b = Basis::identity(Space::lp(2.0, 8).unwrap());
        let grid = ThresholdGrid::new(2.0, 4).unwrap();
        let fam = ProbeFamily::build(8, &ProbeConfig::default());
        let (l, t, p) = probe_tables(&b, &grid, &fam).unwrap();
        for k in 1..=4 {
            assert!(math::approx_eq(l.raw_value(k), 1.0, 1e-12));
            assert!(math::approx_eq(t.raw_value(k), 1.0, 1e-12));
            assert!(math::approx_eq(p.raw_value(k), 1.0, 1e-12));
        }
    }

    #[test]
    fn envelope_is_idempotent_running_max() {
        let b = summing_basis(4).unwrap();
        let (l, _, _) = exact_grid_tables(&b, &grid4(), 6).unwrap();
        let once = monotone_envelope(&l);
        let twice = monotone_envelope(&once);
        assert_eq!(once.envelope, twice.envelope);
        for k in 1..=4 {
            assert!(once.envelope_value(k) >= once.raw_value(k));
            if k > 1 {
                assert!(once.envelope_value(k) >= once.envelope_value(k - 1));
            }
        }
    }

    #[test]
    fn succ_from_lambda_is_the_first_grid_value() {
        let b = summing_basis(4).unwrap();
        let (l, _, _) = exact_grid_tables(&b, &grid4(), 6).unwrap();
        let s = succ_from_lambda(&l);
        assert_eq!(s.value, l.envelope_value(1));
        assert_eq!(s.value, l.raw_value(1));
    }

    #[test]
    fn capacity_and_parameter_errors() {
        let b = Basis::identity(Space::lp(1.0, 8).unwrap());
        assert!(matches!(
            exact_grid_tables(&b, &grid4(), 6),
            Err(Error::Capacity { .. })
        ));
        let small = Basis::identity(Space::lp(1.0, 3).unwrap());
        assert!(exact_grid_tables(&small, &grid4(), 4).is_err());
        assert!(ThresholdGrid::new(1.0, 4).is_err());
        assert!(ThresholdGrid::new(2.0, 0).is_err());
    }
}
