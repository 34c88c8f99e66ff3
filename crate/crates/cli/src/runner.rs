//! Pipeline execution: basis-id resolution, custom basis files, the four
//! subcommands, and the thread-pooled verify run with deterministic merging.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::Deserialize;

use greedylab_core::basis::{
    l2_block_basis, make_catalog, perturbed_identity_basis, summing_basis, Basis, CatalogEntry,
};
use greedylab_core::estimate::Mode;
use greedylab_core::lebesgue;
use greedylab_core::linalg::Matrix;
use greedylab_core::params;
use greedylab_core::probe::ProbeFamily;
use greedylab_core::space::Space;
use greedylab_core::threshold::{self, FuncId, ThresholdGrid};
use greedylab_core::verify::{self, BasisReport, CheckResult, Verdict};

use crate::config::{thread_count, RunConfig};
use crate::report::{self, ParamsBundle, WitnessStore};
use crate::AppError;

/// Resolve a basis id of one of the forms
/// `lp:<p>:<dim>`, `summing:<dim>`, `l2blocks:<p>:<s1+s2+...>`, `fuzz:<dim>`.
pub fn resolve_basis_id(id: &str, config: &RunConfig) -> Result<CatalogEntry, AppError> {
    let parts: Vec<&str> = id.split(':').collect();
    let parse_dim = |text: &str| -> Result<usize, AppError> {
        text.parse::<usize>()
            .map_err(|_| AppError::Usage(format!("bad dimension in basis id {id}")))
    };
    let basis = match parts.as_slice() {
        ["lp", p_text, dim_text] => {
            let p: f64 = p_text
                .parse()
                .map_err(|_| AppError::Usage(format!("bad exponent in basis id {id}")))?;
            let dim = parse_dim(dim_text)?;
            Basis::identity(Space::lp(p, dim).map_err(AppError::from)?)
        }
        ["summing", dim_text] => summing_basis(parse_dim(dim_text)?)?,
        ["l2blocks", p_text, blocks_text] => {
            let p: f64 = p_text
                .parse()
                .map_err(|_| AppError::Usage(format!("bad exponent in basis id {id}")))?;
            let blocks: Vec<usize> = blocks_text
                .split('+')
                .map(|b| {
                    b.parse::<usize>()
                        .map_err(|_| AppError::Usage(format!("bad block sizes in basis id {id}")))
                })
                .collect::<Result<_, _>>()?;
            l2_block_basis(p, &blocks)?
        }
        ["fuzz", dim_text] => perturbed_identity_basis(parse_dim(dim_text)?, config.catalog.seed)?,
        _ => return Err(AppError::Usage(format!("unknown basis id {id}"))),
    };
    Ok(CatalogEntry {
        id: id.to_string(),
        basis,
        properties: Default::default(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SpaceSpec {
    Lp { p: f64, dim: usize },
    Lorentz { p: f64, q: f64, dim: usize },
    WeakLp { p: f64, dim: usize },
    L2Blocks { p: f64, blocks: Vec<usize> },
    LinearImage { base: Box<SpaceSpec>, matrix: Vec<Vec<f64>> },
}

impl SpaceSpec {
    fn build(&self) -> Result<Space, AppError> {
        Ok(match self {
            SpaceSpec::Lp { p, dim } => Space::lp(*p, *dim)?,
            SpaceSpec::Lorentz { p, q, dim } => Space::lorentz(*p, *q, *dim)?,
            SpaceSpec::WeakLp { p, dim } => Space::weak_lp(*p, *dim)?,
            SpaceSpec::L2Blocks { p, blocks } => Space::l2_blocks(*p, blocks)?,
            SpaceSpec::LinearImage { base, matrix } => {
                let base = base.build()?;
                Space::linear_image(base, Matrix::from_rows(matrix)?)?
            }
        })
    }
}

/// Custom basis file: the `vectors` matrix is given as rows, its columns are
/// the basis vectors; `duals` (rows = functionals) is computed by inversion
/// when absent.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisFile {
    space: SpaceSpec,
    vectors: Vec<Vec<f64>>,
    #[serde(default)]
    duals: Option<Vec<Vec<f64>>>,
}

pub fn load_basis_file(path: &str) -> Result<CatalogEntry, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::Usage(format!("cannot read basis file {path}: {e}")))?;
    let file: BasisFile = serde_json::from_str(&text)
        .map_err(|e| AppError::Usage(format!("bad basis file {path}: {e}")))?;
    let space = file.space.build()?;
    let vectors = Matrix::from_rows(&file.vectors)?;
    let labels = (0..space.dim()).map(|j| format!("x{}", j + 1)).collect();
    let basis = match file.duals {
        Some(rows) => Basis::new(space, vectors, Matrix::from_rows(&rows)?, labels)?,
        None => Basis::from_vectors(space, vectors, labels)?,
    };
    let id = Path::new(path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "custom".into());
    Ok(CatalogEntry {
        id: format!("custom:{id}"),
        basis,
        properties: Default::default(),
    })
}

/// Ill-conditioned dual systems make the biorthogonality residual unreliable.
pub fn warn_if_ill_conditioned(entry: &CatalogEntry) {
    let cond = entry.basis.condition_estimate();
    if cond > 1e8 {
        eprintln!(
            "warning: basis {} has condition estimate {cond:.3e}; dual accuracy is degraded",
            entry.id
        );
    }
}

fn catalog_with_customs(config: &RunConfig) -> Result<Vec<CatalogEntry>, AppError> {
    let mut catalog = make_catalog(config.catalog.dim, config.catalog.seed)?;
    for path in &config.catalog.custom_basis_files {
        catalog.push(load_basis_file(path)?);
    }
    for entry in &catalog {
        warn_if_ill_conditioned(entry);
    }
    Ok(catalog)
}

fn ensure_out_dir(config: &RunConfig) -> Result<PathBuf, AppError> {
    let dir = PathBuf::from(&config.outputs.dir);
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn wants(config: &RunConfig, format: &str) -> bool {
    config.outputs.formats.iter().any(|f| f == format)
}

fn clipped_m_max(config: &RunConfig, n: usize) -> usize {
    let requested = config.limits.m_max;
    if requested == 0 {
        n
    } else if requested > n {
        eprintln!("warning: m_max {requested} exceeds dimension {n}; clipping");
        n
    } else {
        requested
    }
}

/// `params` subcommand: phi(m), mu_m, k_m, SUCC, quasi-greedy and
/// truncation-quasi-greedy tables for one basis.
pub fn cmd_params(config: &RunConfig, entry: &CatalogEntry, exact: bool) -> Result<(), AppError> {
    let basis = &entry.basis;
    let n = basis.dim();
    if exact && n > params::FULL_SWEEP_MAX_DIM {
        return Err(AppError::Capacity(format!(
            "exact mode needs a full subset sweep; dim {n} exceeds cap {}",
            params::FULL_SWEEP_MAX_DIM
        )));
    }
    let m_max = clipped_m_max(config, n);
    let probe = ProbeFamily::build(n, &config.probe_config());
    let bundle = ParamsBundle {
        fundamental: params::fundamental_function(basis, m_max)?,
        mu: params::democracy_parameter(basis, m_max)?,
        k: params::unconditionality_constants(basis, m_max, &probe, config.limits.vertex_cap)?,
        succ: params::succ_constant(basis, n)?,
        quasi_greedy: params::quasi_greedy_constant(basis, &probe)?,
        truncation_qg: params::truncation_qg_constant(basis, &probe)?,
    };
    if exact {
        let mut lower: Vec<&str> = Vec::new();
        for (name, table) in [
            ("phi", &bundle.fundamental),
            ("mu", &bundle.mu),
            ("k", &bundle.k),
        ] {
            if !table.all_exact() {
                lower.push(name);
            }
        }
        for (name, value) in [
            ("succ", &bundle.succ),
            ("quasi_greedy", &bundle.quasi_greedy),
            ("truncation_qg", &bundle.truncation_qg),
        ] {
            if value.mode != Mode::Exact {
                lower.push(name);
            }
        }
        if !lower.is_empty() {
            return Err(AppError::Capacity(format!(
                "exact mode unavailable for {} on {}",
                lower.join(", "),
                entry.id
            )));
        }
    }
    let dir = ensure_out_dir(config)?;
    let mut store = WitnessStore::new();
    let csv = report::params_csv(&bundle, &mut store);
    if wants(config, "csv") {
        fs::write(dir.join("params.csv"), csv)?;
    }
    if wants(config, "json") {
        fs::write(dir.join("witnesses.json"), store.to_json())?;
    }
    Ok(())
}

/// `thresholds` subcommand: lambda, theta, phi tables (raw + envelope).
pub fn cmd_thresholds(
    config: &RunConfig,
    entry: &CatalogEntry,
    exact: bool,
) -> Result<(), AppError> {
    let basis = &entry.basis;
    let n = basis.dim();
    let grid = ThresholdGrid::new(config.grid.s, config.grid.k)?;
    let lattice = (
        threshold::lattice_exact_table(basis, FuncId::Lambda, &grid),
        threshold::lattice_exact_table(basis, FuncId::Theta, &grid),
        threshold::lattice_exact_table(basis, FuncId::Phi, &grid),
    );
    let (lambda, theta, phi) = match lattice {
        (Some(l), Some(t), Some(p)) => (l, t, p),
        _ if n <= threshold::EXHAUSTIVE_MAX_DIM => {
            threshold::exact_grid_tables(basis, &grid, config.grid.levels)?
        }
        _ if exact => {
            return Err(AppError::Capacity(format!(
                "exhaustive grid oracle needs dim <= {}; {} has dim {n}",
                threshold::EXHAUSTIVE_MAX_DIM,
                entry.id
            )))
        }
        _ => {
            let probe = ProbeFamily::build(n, &config.probe_config());
            threshold::probe_tables(basis, &grid, &probe)?
        }
    };
    let dir = ensure_out_dir(config)?;
    let mut store = WitnessStore::new();
    let csv = report::thresholds_csv(&[&lambda, &theta, &phi], &mut store);
    if wants(config, "csv") {
        fs::write(dir.join("thresholds.csv"), csv)?;
    }
    if wants(config, "json") {
        fs::write(dir.join("witnesses.json"), store.to_json())?;
    }
    Ok(())
}

/// `lebesgue` subcommand: sigma-mode summary plus the L_m table.
pub fn cmd_lebesgue(config: &RunConfig, entry: &CatalogEntry) -> Result<(), AppError> {
    let basis = &entry.basis;
    let n = basis.dim();
    let m_max = clipped_m_max(config, n);
    let probe = ProbeFamily::build(n, &config.probe_config());
    let table = lebesgue::lebesgue_constants(
        basis,
        &probe,
        m_max,
        config.limits.subset_cap.min(100_000),
    )?;
    let sigma = lebesgue::sigma_mode(basis);
    let dir = ensure_out_dir(config)?;
    let mut store = WitnessStore::new();
    let csv = report::lebesgue_csv(&table, sigma, &mut store);
    if wants(config, "csv") {
        fs::write(dir.join("lebesgue.csv"), csv)?;
    }
    if wants(config, "json") {
        fs::write(dir.join("witnesses.json"), store.to_json())?;
    }
    Ok(())
}

/// Index-preserving parallel map over catalog entries with at most
/// `threads` workers; the output order is the input order regardless of
/// scheduling.
fn parallel_reports(
    catalog: &[CatalogEntry],
    config: &RunConfig,
) -> Result<Vec<BasisReport>, AppError> {
    let harness = config.harness_config();
    let threads = thread_count().min(catalog.len().max(1));
    let slots: Vec<Mutex<Option<Result<BasisReport, greedylab_core::Error>>>> =
        (0..catalog.len()).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for worker in 0..threads {
            let harness = &harness;
            let slots = &slots;
            scope.spawn(move || {
                for (i, entry) in catalog.iter().enumerate() {
                    if i % threads != worker {
                        continue;
                    }
                    let result = verify::basis_report(entry, harness);
                    *slots[i].lock().expect("slot lock") = Some(result);
                }
            });
        }
    });
    let mut reports = Vec::with_capacity(catalog.len());
    for slot in slots {
        let result = slot
            .into_inner()
            .expect("slot lock")
            .expect("every slot filled");
        reports.push(result?);
    }
    Ok(reports)
}

fn sanitize_id(id: &str) -> String {
    id.replace(':', "-")
}

/// `verify` subcommand: full harness over the catalog; returns the verdicts.
pub fn cmd_verify(config: &RunConfig) -> Result<(Vec<BasisReport>, CheckResult), AppError> {
    let catalog = catalog_with_customs(config)?;
    let reports = parallel_reports(&catalog, config)?;
    let kt = verify::check_greedy_dichotomy(&reports);

    let dir = ensure_out_dir(config)?;
    if wants(config, "json") {
        fs::write(
            dir.join("verify_report.json"),
            report::verify_report_json(&reports, &kt),
        )?;
    }
    if wants(config, "csv") {
        for r in &reports {
            let sub = dir.join(sanitize_id(&r.basis_id));
            fs::create_dir_all(&sub)?;
            let mut store = WitnessStore::new();
            let bundle = ParamsBundle {
                fundamental: r.fundamental.clone(),
                mu: r.mu.clone(),
                k: r.k.clone(),
                succ: r.succ.clone(),
                quasi_greedy: r.quasi_greedy.clone(),
                truncation_qg: r.truncation_qg.clone(),
            };
            fs::write(sub.join("params.csv"), report::params_csv(&bundle, &mut store))?;
            fs::write(
                sub.join("thresholds.csv"),
                report::thresholds_csv(&[&r.lambda, &r.theta, &r.phi], &mut store),
            )?;
            let sigma = if r.sigma_exact {
                lebesgue::ApproxMode::Exact
            } else {
                lebesgue::ApproxMode::UpperBound
            };
            fs::write(
                sub.join("lebesgue.csv"),
                report::lebesgue_csv(&r.lebesgue, sigma, &mut store),
            )?;
            fs::write(sub.join("witnesses.json"), store.to_json())?;
        }
    }
    print!("{}", report::verify_summary(&reports, &kt));
    Ok((reports, kt))
}

pub fn verify_exit(reports: &[BasisReport], kt: &CheckResult) -> Result<(), AppError> {
    let failed = reports
        .iter()
        .flat_map(|r| r.checks.iter())
        .chain(std::iter::once(kt))
        .filter(|c| c.verdict == Verdict::Fail)
        .count();
    if failed > 0 {
        return Err(AppError::CheckFailure);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_ids_resolve() {
        let config = RunConfig::default();
        for id in ["lp:1.0:8", "lp:0.5:4", "summing:6", "l2blocks:1.0:1+2+3", "fuzz:5"] {
            let entry = resolve_basis_id(id, &config).unwrap();
            assert_eq!(entry.id, id);
        }
        assert!(resolve_basis_id("nope:3", &config).is_err());
        assert!(resolve_basis_id("lp:zero:3", &config).is_err());
    }

    #[test]
    fn check_failures_map_to_exit_code_one() {
        use greedylab_core::verify::{CheckResult, Verdict};
        let mut failing = CheckResult {
            check_id: "fixture".into(),
            basis_id: "fixture".into(),
            verdict: Verdict::Fail,
            details: Default::default(),
            constants_used: Default::default(),
        };
        let err = verify_exit(&[], &failing).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        failing.verdict = Verdict::Recorded;
        assert!(verify_exit(&[], &failing).is_ok());
    }

    #[test]
    fn catalog_ids_round_trip_through_the_resolver() {
        let config = RunConfig::default();
        for entry in make_catalog(8, config.catalog.seed).unwrap() {
            let resolved = resolve_basis_id(&entry.id, &config).unwrap();
            assert_eq!(resolved.basis.vectors(), entry.basis.vectors());
        }
    }
}
