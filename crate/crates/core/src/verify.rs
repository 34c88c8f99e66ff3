//! Inequality checks tying the computed tables together, each
//! phrased so that a hard `Fail` verdict is only possible when the estimate
//! modes make the inequality direction sound; everything else is `Recorded`
//! for inspection.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{Basis, BasisProperty, CatalogEntry};
use crate::error::{Error, Result};
use crate::estimate::{EstimateValue, ParamTable, Witness};
use crate::lebesgue::{self, ApproxMode};
use crate::math;
use crate::params;
use crate::probe::{ProbeConfig, ProbeFamily};
use crate::sets;
use crate::space::{NormKind, Space};
use crate::threshold::{self, FuncId, FunctionTable, ThresholdGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Recorded,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Recorded => "recorded",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub check_id: String,
    pub basis_id: String,
    pub verdict: Verdict,
    pub details: BTreeMap<String, f64>,
    pub constants_used: BTreeMap<String, f64>,
}

impl CheckResult {
    fn new(check_id: &str, basis_id: &str) -> CheckResult {
        CheckResult {
            check_id: check_id.to_string(),
            basis_id: basis_id.to_string(),
            verdict: Verdict::Recorded,
            details: BTreeMap::new(),
            constants_used: BTreeMap::new(),
        }
    }
}

/// The constant bounding `||sum a_n x_n||` by `||1_{eps,A}||` over `|a_n| <= 1`.
#[derive(Debug, Clone)]
pub struct CuEstimate {
    pub value: f64,
    /// True when the whole declared search space was enumerated (grid-exact)
    /// or the value is known exactly (lattice argument); hard checks require
    /// this flag.
    pub grid_exact: bool,
    pub witness: Witness,
}

/// For identity systems in lattice spaces the coefficient bound |a_n| <= 1
/// makes the combination entrywise dominated by the indicator, so C_u = 1.
pub fn lattice_exact_cu(basis: &Basis) -> Option<CuEstimate> {
    if !basis.is_identity_lattice() {
        return None;
    }
    let n = basis.dim();
    let mut coeffs = vec![0.0; n];
    coeffs[0] = 1.0;
    let mut signs = vec![0i8; n];
    signs[0] = 1;
    Some(CuEstimate {
        value: 1.0,
        grid_exact: true,
        witness: Witness::LinearCombination { coeffs, signs },
    })
}

/// Exact max of `||sum a_n x_n|| / ||1_{eps,A}||` over sets A, sign patterns
/// eps, and grid-valued coefficients |a_n| <= 1. Enumeration is (4L+7)^n
/// states, so n <= 6 is enforced.
pub fn grid_exact_cu(basis: &Basis, s: f64, levels: usize) -> Result<CuEstimate> {
    let n = basis.dim();
    if n > 6 {
        return Err(Error::Capacity {
            what: "grid-exact C_u enumeration (dimension cap)",
            needed: n as u64,
            cap: 6,
        });
    }
    if !(s > 1.0) {
        return Err(Error::InvalidParameter("C_u grid ratio must exceed 1".into()));
    }
    let space = basis.space();
    let mut magnitudes = vec![0.0f64];
    for j in 0..=levels {
        magnitudes.push(math::powf(s, -(j as f64)));
    }
    let columns: Vec<Vec<f64>> = (0..n).map(|j| basis.vectors().column(j)).collect();

    // per-index states: out of A, or (sign eps, signed coefficient value)
    struct Scan<'a> {
        columns: &'a [Vec<f64>],
        magnitudes: &'a [f64],
        space: &'a Space,
        num: Vec<f64>,
        den: Vec<f64>,
        coeffs: Vec<f64>,
        signs: Vec<i8>,
        best: f64,
        best_coeffs: Vec<f64>,
        best_signs: Vec<i8>,
    }

    impl Scan<'_> {
        fn rec(&mut self, i: usize) {
            let n = self.columns.len();
            if i == n {
                if self.signs.iter().all(|s| *s == 0) {
                    return;
                }
                let d = self.space.norm_raw(&self.den);
                if d == 0.0 {
                    return;
                }
                let ratio = self.space.norm_raw(&self.num) / d;
                if ratio > self.best {
                    self.best = ratio;
                    self.best_coeffs = self.coeffs.clone();
                    self.best_signs = self.signs.clone();
                }
                return;
            }
            // index out of A
            self.rec(i + 1);
            // index in A with each sign and each signed coefficient magnitude
            for eps in [1i8, -1i8] {
                for (d, x) in self.den.iter_mut().zip(&self.columns[i]) {
                    *d += eps as f64 * x;
                }
                self.signs[i] = eps;
                for mi in 0..self.magnitudes.len() {
                    let mag = self.magnitudes[mi];
                    for sign in [1.0, -1.0] {
                        let a = sign * mag;
                        if a == 0.0 && sign < 0.0 {
                            continue;
                        }
                        for (v, x) in self.num.iter_mut().zip(&self.columns[i]) {
                            *v += a * x;
                        }
                        self.coeffs[i] = a;
                        self.rec(i + 1);
                        for (v, x) in self.num.iter_mut().zip(&self.columns[i]) {
                            *v -= a * x;
                        }
                        self.coeffs[i] = 0.0;
                    }
                }
                for (d, x) in self.den.iter_mut().zip(&self.columns[i]) {
                    *d -= eps as f64 * x;
                }
                self.signs[i] = 0;
            }
        }
    }

    let mut scan = Scan {
        columns: &columns,
        magnitudes: &magnitudes,
        space,
        num: vec![0.0; n],
        den: vec![0.0; n],
        coeffs: vec![0.0; n],
        signs: vec![0; n],
        best: f64::NEG_INFINITY,
        best_coeffs: Vec::new(),
        best_signs: Vec::new(),
    };
    scan.rec(0);
    let (best, best_coeffs, best_signs) = (scan.best, scan.best_coeffs, scan.best_signs);
    Ok(CuEstimate {
        value: best,
        grid_exact: true,
        witness: Witness::LinearCombination {
            coeffs: best_coeffs,
            signs: best_signs,
        },
    })
}

/// theta <= phi pointwise at tolerance zero. A hard verdict needs both tables
/// from the same estimator run (equal source and grid); otherwise recorded.
pub fn check_theta_le_phi(
    basis_id: &str,
    theta: &FunctionTable,
    phi: &FunctionTable,
) -> Result<CheckResult> {
    if !theta.same_grid(phi) {
        return Err(Error::GridMismatch);
    }
    let mut result = CheckResult::new("theta_le_phi", basis_id);
    let mut worst = f64::NEG_INFINITY;
    for k in 1..=theta.grid.k_max() {
        worst = worst.max(theta.raw_value(k) - phi.raw_value(k));
    }
    result.details.insert("max_theta_minus_phi".into(), worst);
    let comparable = theta.source == phi.source;
    result.verdict = if comparable {
        if worst <= 0.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    } else {
        Verdict::Recorded
    };
    Ok(result)
}

/// Raw exhaustive-grid tables must be non-increasing in a (tolerance 1e-12);
/// probe tables are only inspected through their envelope and cannot fail.
pub fn check_monotone(basis_id: &str, tables: &[&FunctionTable]) -> CheckResult {
    let mut result = CheckResult::new("monotone", basis_id);
    let mut any_exhaustive = false;
    let mut violated = false;
    for table in tables {
        let mut worst = 0.0f64;
        for k in 2..=table.grid.k_max() {
            worst = worst.max(table.raw_value(k - 1) - table.raw_value(k));
        }
        result
            .details
            .insert(format!("{}_max_raw_drop", table.func_id.as_str()), worst);
        if table.search_space_exact() {
            any_exhaustive = true;
            if worst > 1e-12 {
                violated = true;
            }
        }
    }
    result.verdict = if !any_exhaustive {
        Verdict::Recorded
    } else if violated {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    result
}

/// Constant in the upper chain estimate: 5 * 2^(1/p + 5) / (2^p - 1)^(1/p).
pub fn chain_constant(p: f64) -> f64 {
    5.0 * math::powf(2.0, 1.0 / p + 5.0) / math::powf(math::powf(2.0, p) - 1.0, 1.0 / p)
}

/// The chain ratios r1 = max lambda/theta, r2 = max theta/phi,
/// r3 = max a*phi(a)/lambda(a), with a hard bound r3 <= K_p * C_u when all
/// inputs cover their search space exactly.
pub fn check_threshold_chain(
    basis_id: &str,
    lambda: &FunctionTable,
    theta: &FunctionTable,
    phi: &FunctionTable,
    p: f64,
    cu: Option<&CuEstimate>,
) -> Result<CheckResult> {
    if !lambda.same_grid(theta) || !lambda.same_grid(phi) {
        return Err(Error::GridMismatch);
    }
    let mut result = CheckResult::new("threshold_chain", basis_id);
    let (mut r1, mut r2, mut r3) = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for k in 1..=lambda.grid.k_max() {
        let a = lambda.grid.point(k);
        let (l, t, ph) = (lambda.raw_value(k), theta.raw_value(k), phi.raw_value(k));
        if t > 0.0 {
            r1 = r1.max(l / t);
        }
        if ph > 0.0 {
            r2 = r2.max(t / ph);
        }
        if l > 0.0 {
            r3 = r3.max(a * ph / l);
        }
    }
    result.details.insert("r1_lambda_over_theta".into(), r1);
    result.details.insert("r2_theta_over_phi".into(), r2);
    result.details.insert("r3_a_phi_over_lambda".into(), r3);
    let k_p = chain_constant(p);
    result.constants_used.insert("K_p".into(), k_p);
    result.constants_used.insert("p".into(), p);
    result
        .constants_used
        .insert("C_ps_at_grid_s".into(), c_ps(p, lambda.grid.s()));
    let sound = lambda.search_space_exact()
        && phi.search_space_exact()
        && cu.is_some_and(|c| c.grid_exact);
    if let Some(cu) = cu {
        result.constants_used.insert("C_u".into(), cu.value);
        let bound = k_p * cu.value;
        result.constants_used.insert("r3_bound".into(), bound);
        if sound {
            result.verdict = if r3 <= bound { Verdict::Pass } else { Verdict::Fail };
            return Ok(result);
        }
    }
    result.verdict = Verdict::Recorded;
    Ok(result)
}

/// `C_{p,s} = s (1 - s^-p)^{-1/p}`, the p-convexity geometric-series constant.
pub fn c_ps(p: f64, s: f64) -> f64 {
    s * math::powf(1.0 - math::powf(s, -p), -1.0 / p)
}

/// Growth check `k_m <= 2^(1/p) C_u lambda(1^-) * lambda(m^(-1/p)) (log2 m)^(1/p)`,
/// with m^(-1/p) snapped down to the grid. Hard verdict only with exact k_m,
/// a search-space-exact lambda table, and a grid-exact C_u.
pub fn check_unconditionality_growth(
    basis_id: &str,
    lambda: &FunctionTable,
    k_table: &ParamTable,
    p: f64,
    cu: Option<&CuEstimate>,
    m_max: usize,
) -> CheckResult {
    let mut result = CheckResult::new("unconditionality_growth", basis_id);
    let lambda_env = threshold::monotone_envelope(lambda);
    let lambda_one_minus = lambda_env.envelope_value(1);
    result
        .constants_used
        .insert("lambda_one_minus".into(), lambda_one_minus);
    result.constants_used.insert("p".into(), p);
    let mut max_ratio = f64::NEG_INFINITY;
    let mut evaluated = 0usize;
    for m in 2..=m_max {
        let Some(k_m) = k_table.value(m) else { continue };
        let a_target = math::powf(m as f64, -1.0 / p);
        let Some(k_idx) = lambda.grid.snap_down(a_target) else {
            continue;
        };
        let lam = lambda_env.envelope_value(k_idx);
        let log_factor = math::powf(math::log2(m as f64), 1.0 / p);
        if lam <= 0.0 || log_factor <= 0.0 {
            continue;
        }
        let ratio = k_m / (lam * log_factor);
        result.details.insert(format!("ratio_m{m}"), ratio);
        max_ratio = max_ratio.max(ratio);
        evaluated += 1;
    }
    if evaluated == 0 {
        result.verdict = Verdict::Recorded;
        return result;
    }
    result.details.insert("max_ratio".into(), max_ratio);
    let sound =
        k_table.all_exact() && lambda.search_space_exact() && cu.is_some_and(|c| c.grid_exact);
    if let Some(cu) = cu {
        result.constants_used.insert("C_u".into(), cu.value);
        let bound = math::powf(2.0, 1.0 / p) * cu.value * lambda_one_minus;
        result.constants_used.insert("ratio_bound".into(), bound);
        if sound {
            result.verdict = if max_ratio <= bound {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            return result;
        }
    }
    result.verdict = Verdict::Recorded;
    result
}

/// `L_m / max(mu_m, k_m)` must sit in [1/8, 8] for unconditional democratic
/// entries when the democracy and unconditionality tables are exact and
/// sigma_m has a closed form; recorded otherwise.
pub fn check_lebesgue_equivalence(
    basis_id: &str,
    lebesgue: &ParamTable,
    mu: &ParamTable,
    k: &ParamTable,
    properties: &BTreeSet<BasisProperty>,
    sigma_exact: bool,
) -> CheckResult {
    let mut result = CheckResult::new("lebesgue_equivalence", basis_id);
    let mut low = f64::INFINITY;
    let mut high = f64::NEG_INFINITY;
    for (m, entry) in &lebesgue.entries {
        let (Some(mu_m), Some(k_m)) = (mu.value(*m), k.value(*m)) else {
            continue;
        };
        let denom = mu_m.max(k_m);
        if denom <= 0.0 {
            continue;
        }
        let ratio = entry.value / denom;
        result.details.insert(format!("ratio_m{m}"), ratio);
        low = low.min(ratio);
        high = high.max(ratio);
    }
    result.details.insert("min_ratio".into(), low);
    result.details.insert("max_ratio".into(), high);
    let applicable = properties.contains(&BasisProperty::Unconditional)
        && properties.contains(&BasisProperty::Democratic);
    let sound = mu.all_exact() && k.all_exact() && sigma_exact;
    result.verdict = if applicable && sound {
        if low >= 0.125 && high <= 8.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    } else {
        Verdict::Recorded
    };
    result
}

/// Lorentz domination data: C = max ||1_{eps,A}|| / |A|^(1/r) (exact over all
/// signed sets for n <= 12) and D = max over probes of
/// `||sum a_n x_n|| / ||a||_{l_{r,p}}`; always recorded.
pub fn check_lorentz_domination(
    basis: &Basis,
    basis_id: &str,
    r: f64,
    probe: &ProbeFamily,
) -> Result<CheckResult> {
    if probe.is_empty() {
        return Err(Error::EmptyProbeFamily);
    }
    let mut result = CheckResult::new("lorentz_domination", basis_id);
    let n = basis.dim();
    let space = basis.space();
    let p = space.p_convexity();
    result.constants_used.insert("r".into(), r);
    result.constants_used.insert("p".into(), p);

    let mut c_bound = f64::NEG_INFINITY;
    let c_exact = n <= params::SUCC_EXACT_MAX_DIM;
    if c_exact {
        let pow3 = sets::pow3_table(n);
        let mut buf = vec![0.0; n];
        for code in 1..pow3[n] {
            sets::signed_set_coefficients(code, n, &mut buf);
            let card = sets::signed_set_cardinality(code);
            let value =
                basis.signed_indicator_norm(&buf) / math::powf(card as f64, 1.0 / r);
            c_bound = c_bound.max(value);
        }
    } else {
        let fam = ProbeFamily::build(
            n,
            &ProbeConfig {
                random_count: 512,
                ..ProbeConfig::default()
            },
        );
        for coeffs in fam.vectors() {
            let signed: Vec<f64> = coeffs
                .iter()
                .map(|c| {
                    if *c > 0.0 {
                        1.0
                    } else if *c < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            let card = signed.iter().filter(|c| **c != 0.0).count();
            if card == 0 {
                continue;
            }
            let value = basis.signed_indicator_norm(&signed)
                / math::powf(card as f64, 1.0 / r);
            c_bound = c_bound.max(value);
        }
    }
    result.details.insert("C".into(), c_bound);
    result
        .details
        .insert("C_exact".into(), if c_exact { 1.0 } else { 0.0 });

    let lorentz = Space::lorentz(r, p, n)?;
    let mut d_bound = f64::NEG_INFINITY;
    for coeffs in probe.vectors() {
        let denom = lorentz.norm_raw(coeffs);
        if denom == 0.0 {
            continue;
        }
        let value = space.norm_raw(&basis.combine(coeffs)) / denom;
        d_bound = d_bound.max(value);
    }
    result.details.insert("D".into(), d_bound);
    let single = (0..n)
        .map(|j| space.norm_raw(&basis.vectors().column(j)))
        .fold(0.0f64, f64::max);
    result.details.insert("single_coordinate_ratio".into(), single);
    result.details.insert(
        "d_dominates_single".into(),
        if d_bound + 1e-9 >= single { 1.0 } else { 0.0 },
    );
    result.verdict = Verdict::Recorded;
    Ok(result)
}

/// Cross-check `SUCC <= lambda(1^-)` through the grid stand-in. The lambda
/// table is a lower bound of the true function, so a violation is possible
/// for honest inputs; the outcome is recorded, never failed.
pub fn check_succ_vs_lambda(
    basis_id: &str,
    succ: &EstimateValue,
    lambda: &FunctionTable,
) -> CheckResult {
    let mut result = CheckResult::new("succ_vs_lambda", basis_id);
    let stand_in = threshold::succ_from_lambda(lambda);
    result.details.insert("succ".into(), succ.value);
    result
        .details
        .insert("lambda_one_minus".into(), stand_in.value);
    result.details.insert(
        "consistent".into(),
        if succ.value <= stand_in.value * (1.0 + 1e-9) {
            1.0
        } else {
            0.0
        },
    );
    result.verdict = Verdict::Recorded;
    result
}

/// Catalog-level dichotomy check: unconditional+democratic entries must keep
/// a bounded greedy constant, and the non-democratic unconditional entry must
/// show genuine democracy-parameter growth (at dim >= 10, exact tables).
pub fn check_greedy_dichotomy(reports: &[BasisReport]) -> CheckResult {
    let mut result = CheckResult::new("greedy_dichotomy", "catalog");
    let mut applicable = false;
    let mut ok = true;
    for report in reports {
        let tags = &report.properties;
        if tags.contains(&BasisProperty::Unconditional)
            && tags.contains(&BasisProperty::Democratic)
        {
            applicable = true;
            let cg = report.greedy_c.value;
            result
                .details
                .insert(format!("{}:c_g", report.basis_id), cg);
            if cg > 8.0 {
                ok = false;
            }
        }
        if tags.contains(&BasisProperty::Unconditional)
            && tags.contains(&BasisProperty::NonDemocratic)
        {
            let mu = &report.mu;
            let m_max = mu.entries.keys().next_back().copied().unwrap_or(0);
            let mu_1 = mu.value(1).unwrap_or(1.0);
            let mu_last = mu.value(m_max).unwrap_or(1.0);
            let values: Vec<f64> = mu.entries.values().map(|e| e.value).collect();
            let increases = values
                .windows(2)
                .filter(|w| w[1] > w[0] + 1e-12)
                .count();
            result
                .details
                .insert(format!("{}:mu_growth", report.basis_id), mu_last / mu_1);
            result
                .details
                .insert(format!("{}:mu_increases", report.basis_id), increases as f64);
            if report.dim >= 10 && mu.all_exact() {
                applicable = true;
                if increases < 2 || mu_last < 1.4 * mu_1 {
                    ok = false;
                }
            }
        }
    }
    result.verdict = if !applicable {
        Verdict::Recorded
    } else if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    result
}

/// The Lorentz-domination exponent the harness exercises per basis: 1/r is
/// the indicator growth rate, so diagonal lp bases use r = p and everything
/// else the safe r = 1.
pub fn default_lorentz_r(basis: &Basis) -> f64 {
    match basis.space().kind() {
        NormKind::Lp { p } if p.is_finite() && basis.is_identity_lattice() => *p,
        _ => 1.0,
    }
}

/// Knobs for the per-basis pipeline.
#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub grid_s: f64,
    pub grid_k: usize,
    pub levels: usize,
    pub probe: ProbeConfig,
    /// None means the full range 1..=n.
    pub m_max: Option<usize>,
    pub sigma_support_cap: u64,
    pub vertex_cap: usize,
    /// None means |A| up to n in the SUCC search.
    pub succ_max_card: Option<usize>,
    /// Grid-exact C_u enumeration is skipped above this dimension.
    pub cu_max_dim: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            grid_s: 2.0,
            grid_k: 8,
            levels: 9,
            probe: ProbeConfig::default(),
            m_max: None,
            sigma_support_cap: 100_000,
            vertex_cap: 16,
            succ_max_card: None,
            cu_max_dim: 4,
        }
    }
}

/// Everything the harness computed for one basis, plus the per-basis checks.
#[derive(Debug, Clone)]
pub struct BasisReport {
    pub basis_id: String,
    pub dim: usize,
    pub properties: BTreeSet<BasisProperty>,
    pub dual_bound: f64,
    pub vector_bound: f64,
    pub fundamental: ParamTable,
    pub mu: ParamTable,
    pub k: ParamTable,
    pub succ: EstimateValue,
    pub quasi_greedy: EstimateValue,
    pub truncation_qg: EstimateValue,
    pub lambda: FunctionTable,
    pub theta: FunctionTable,
    pub phi: FunctionTable,
    pub lebesgue: ParamTable,
    pub greedy_c: EstimateValue,
    pub sigma_exact: bool,
    pub cu: Option<CuEstimate>,
    pub checks: Vec<CheckResult>,
}

/// Run every estimator and per-basis check for one catalog entry.
pub fn basis_report(entry: &CatalogEntry, cfg: &HarnessConfig) -> Result<BasisReport> {
    let basis = &entry.basis;
    let n = basis.dim();
    let m_max = cfg.m_max.unwrap_or(n).min(n);
    let grid = ThresholdGrid::new(cfg.grid_s, cfg.grid_k)?;
    let base_probe = ProbeFamily::build(n, &cfg.probe);

    let fundamental = params::fundamental_function(basis, m_max)?;
    let mu = params::democracy_parameter(basis, m_max)?;
    let succ = params::succ_constant(basis, cfg.succ_max_card.unwrap_or(n))?;
    let k = params::unconditionality_constants(basis, m_max, &base_probe, cfg.vertex_cap)?;

    // feed witnesses from earlier estimators into the later probe searches
    let mut rich_probe = base_probe.clone();
    if let Witness::SignedSuppression { indices, signs, .. } = &succ.witness {
        let mut v = vec![0.0; n];
        for (&j, &s) in indices.iter().zip(signs) {
            v[j] = s as f64;
        }
        rich_probe.add_witness_vector(&v);
    }
    if let Some(top) = k.max_value() {
        if let Witness::Projection { coeffs, .. } = &top.witness {
            rich_probe.add_witness_vector(coeffs);
        }
    }

    let quasi_greedy = params::quasi_greedy_constant(basis, &rich_probe)?;
    let truncation_qg = params::truncation_qg_constant(basis, &rich_probe)?;

    let lattice_tables = (
        threshold::lattice_exact_table(basis, FuncId::Lambda, &grid),
        threshold::lattice_exact_table(basis, FuncId::Theta, &grid),
        threshold::lattice_exact_table(basis, FuncId::Phi, &grid),
    );
    let (lambda, theta, phi) = match lattice_tables {
        (Some(l), Some(t), Some(p)) => (l, t, p),
        _ => {
            if n <= threshold::EXHAUSTIVE_MAX_DIM {
                threshold::exact_grid_tables(basis, &grid, cfg.levels)?
            } else {
                threshold::probe_tables(basis, &grid, &base_probe)?
            }
        }
    };

    let cu = match lattice_exact_cu(basis) {
        Some(cu) => Some(cu),
        None if n <= cfg.cu_max_dim => Some(grid_exact_cu(basis, cfg.grid_s, cfg.levels)?),
        None => None,
    };

    let lebesgue_table =
        lebesgue::lebesgue_constants(basis, &rich_probe, m_max, cfg.sigma_support_cap)?;
    let greedy_c = lebesgue_table
        .max_value()
        .cloned()
        .ok_or(Error::EmptyProbeFamily)?;
    let sigma_exact = lebesgue::sigma_mode(basis) == ApproxMode::Exact;
    let p = basis.space().p_convexity();

    let mut checks = Vec::new();
    checks.push(check_theta_le_phi(&entry.id, &theta, &phi)?);
    checks.push(check_monotone(&entry.id, &[&lambda, &theta, &phi]));
    checks.push(check_threshold_chain(
        &entry.id,
        &lambda,
        &theta,
        &phi,
        p,
        cu.as_ref(),
    )?);
    checks.push(check_unconditionality_growth(&entry.id, &lambda, &k, p, cu.as_ref(), m_max));
    checks.push(check_lebesgue_equivalence(
        &entry.id,
        &lebesgue_table,
        &mu,
        &k,
        &entry.properties,
        sigma_exact,
    ));
    checks.push(check_lorentz_domination(
        basis,
        &entry.id,
        default_lorentz_r(basis),
        &rich_probe,
    )?);
    checks.push(check_succ_vs_lambda(&entry.id, &succ, &lambda));

    let (dual_bound, vector_bound, _) = basis.norm_bounds();
    Ok(BasisReport {
        basis_id: entry.id.clone(),
        dim: n,
        properties: entry.properties.clone(),
        dual_bound,
        vector_bound,
        fundamental,
        mu,
        k,
        succ,
        quasi_greedy,
        truncation_qg,
        lambda,
        theta,
        phi,
        lebesgue: lebesgue_table,
        greedy_c,
        sigma_exact,
        cu,
        checks,
    })
}

/// True when no check across the reports (including the catalog-level
/// dichotomy) failed.
pub fn all_checks_pass(reports: &[BasisReport], catalog_check: &CheckResult) -> bool {
    reports
        .iter()
        .flat_map(|r| r.checks.iter())
        .chain(core::iter::once(catalog_check))
        .all(|c| c.verdict != Verdict::Fail)
}
