//! Report emission: full-precision CSV tables, the witness sidecar, and the
//! verify report JSON. Everything is written in a fixed order from already
//! computed results, so identical configs produce byte-identical files.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use greedylab_core::estimate::{EstimateValue, ParamTable, Witness};
use greedylab_core::lebesgue::ApproxMode;
use greedylab_core::threshold::{FunctionTable, TableSource};
use greedylab_core::verify::{BasisReport, CheckResult};

/// 17 significant digits: enough for a bit-faithful f64 round trip.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x:.16e}")
}

/// Sequentially numbered witness sidecar; `add` returns the reference the CSV
/// rows carry.
#[derive(Debug, Default)]
pub struct WitnessStore {
    entries: BTreeMap<String, Value>,
    counter: usize,
}

impl WitnessStore {
    pub fn new() -> WitnessStore {
        WitnessStore::default()
    }

    pub fn add(&mut self, witness: &Witness) -> String {
        self.counter += 1;
        let key = format!("w{:06}", self.counter);
        self.entries.insert(key.clone(), witness_json(witness));
        key
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&Value::Object(
            self.entries
                .iter()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        ))
        .expect("witness map serializes");
        text.push('\n');
        text
    }
}

fn usize_array(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&x| json!(x)).collect())
}

fn i8_array(xs: &[i8]) -> Value {
    Value::Array(xs.iter().map(|&x| json!(x)).collect())
}

fn f64_array(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json!(x)).collect())
}

pub fn witness_json(witness: &Witness) -> Value {
    match witness {
        Witness::SetNorm { indices } => json!({
            "kind": "set_norm",
            "indices": usize_array(indices),
        }),
        Witness::SetRatio {
            numerator,
            denominator,
        } => json!({
            "kind": "set_ratio",
            "numerator": usize_array(numerator),
            "denominator": usize_array(denominator),
        }),
        Witness::SignedSuppression {
            indices,
            signs,
            subset,
        } => json!({
            "kind": "signed_suppression",
            "indices": usize_array(indices),
            "signs": i8_array(signs),
            "subset": usize_array(subset),
        }),
        Witness::Projection { set, coeffs } => json!({
            "kind": "projection",
            "set": usize_array(set),
            "coeffs": f64_array(coeffs),
        }),
        Witness::Truncation { set, coeffs } => json!({
            "kind": "truncation",
            "set": usize_array(set),
            "coeffs": f64_array(coeffs),
        }),
        Witness::ThresholdProjection { coeffs, a, subset } => json!({
            "kind": "threshold_projection",
            "a": a,
            "coeffs": f64_array(coeffs),
            "subset": subset.as_ref().map(|s| usize_array(s)).unwrap_or(Value::Null),
        }),
        Witness::ThresholdTruncation { coeffs, a } => json!({
            "kind": "threshold_truncation",
            "a": a,
            "coeffs": f64_array(coeffs),
        }),
        Witness::LinearCombination { coeffs, signs } => json!({
            "kind": "linear_combination",
            "coeffs": f64_array(coeffs),
            "signs": i8_array(signs),
        }),
        Witness::GreedyError {
            coeffs,
            m,
            greedy_set,
        } => json!({
            "kind": "greedy_error",
            "m": m,
            "coeffs": f64_array(coeffs),
            "greedy_set": usize_array(greedy_set),
        }),
    }
}

fn param_rows(out: &mut String, table: &ParamTable, store: &mut WitnessStore) {
    for (m, entry) in &table.entries {
        let witness_ref = store.add(&entry.witness);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            table.param_id,
            m,
            fmt_f64(entry.value),
            entry.mode.as_str(),
            witness_ref
        ));
    }
}

fn scalar_row(out: &mut String, id: &str, value: &EstimateValue, store: &mut WitnessStore) {
    let witness_ref = store.add(&value.witness);
    out.push_str(&format!(
        "{},,{},{},{}\n",
        id,
        fmt_f64(value.value),
        value.mode.as_str(),
        witness_ref
    ));
}

/// Bundle of per-basis parameter results written by `params`.
pub struct ParamsBundle {
    pub fundamental: ParamTable,
    pub mu: ParamTable,
    pub k: ParamTable,
    pub succ: EstimateValue,
    pub quasi_greedy: EstimateValue,
    pub truncation_qg: EstimateValue,
}

pub fn params_csv(bundle: &ParamsBundle, store: &mut WitnessStore) -> String {
    let mut out = String::from("param_id,m,value,mode,witness_ref\n");
    param_rows(&mut out, &bundle.fundamental, store);
    param_rows(&mut out, &bundle.mu, store);
    param_rows(&mut out, &bundle.k, store);
    scalar_row(&mut out, "succ", &bundle.succ, store);
    scalar_row(&mut out, "quasi_greedy", &bundle.quasi_greedy, store);
    scalar_row(&mut out, "truncation_qg", &bundle.truncation_qg, store);
    out
}

fn table_mode(table: &FunctionTable) -> String {
    match table.source {
        TableSource::LatticeExact => "exact".into(),
        TableSource::ExhaustiveGrid { .. } => "lower_bound:exhaustive_grid".into(),
        TableSource::Probe => "lower_bound:probe".into(),
    }
}

pub fn thresholds_csv(tables: &[&FunctionTable], store: &mut WitnessStore) -> String {
    let mut out = String::from("func_id,a,raw_value,envelope_value,mode,witness_ref\n");
    for table in tables {
        let mode = table_mode(table);
        for k in 1..=table.grid.k_max() {
            let entry = &table.raw[k - 1];
            let witness_ref = store.add(&entry.witness);
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                table.func_id.as_str(),
                fmt_f64(table.grid.point(k)),
                fmt_f64(entry.value),
                fmt_f64(table.envelope_value(k)),
                mode,
                witness_ref
            ));
        }
    }
    out
}

pub fn lebesgue_csv(
    table: &ParamTable,
    sigma: ApproxMode,
    store: &mut WitnessStore,
) -> String {
    let mut out = String::from("m,sigma_mode,L_m_value,witness_ref\n");
    for (m, entry) in &table.entries {
        let witness_ref = store.add(&entry.witness);
        out.push_str(&format!(
            "{},{},{},{}\n",
            m,
            sigma.as_str(),
            fmt_f64(entry.value),
            witness_ref
        ));
    }
    out
}

fn check_json(check: &CheckResult) -> Value {
    json!({
        "check_id": check.check_id,
        "basis_id": check.basis_id,
        "verdict": check.verdict.as_str(),
        "details": check.details.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "constants_used": check.constants_used.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
    })
}

fn param_table_json(table: &ParamTable) -> Value {
    Value::Array(
        table
            .entries
            .iter()
            .map(|(m, e)| {
                json!({
                    "m": m,
                    "value": e.value,
                    "mode": e.mode.as_str(),
                })
            })
            .collect(),
    )
}

fn function_table_json(table: &FunctionTable) -> Value {
    let points: Vec<Value> = (1..=table.grid.k_max())
        .map(|k| {
            json!({
                "a": table.grid.point(k),
                "raw": table.raw_value(k),
                "envelope": table.envelope_value(k),
            })
        })
        .collect();
    json!({
        "func_id": table.func_id.as_str(),
        "source": table.source.as_str(),
        "points": points,
    })
}

fn estimate_json(value: &EstimateValue) -> Value {
    json!({
        "value": value.value,
        "mode": value.mode.as_str(),
    })
}

pub fn basis_report_json(report: &BasisReport) -> Value {
    json!({
        "id": report.basis_id,
        "dim": report.dim,
        "properties": report.properties.iter().map(|p| p.as_str()).collect::<Vec<_>>(),
        "dual_norm_bound": report.dual_bound,
        "vector_norm_bound": report.vector_bound,
        "phi_m": param_table_json(&report.fundamental),
        "mu_m": param_table_json(&report.mu),
        "k_m": param_table_json(&report.k),
        "succ": estimate_json(&report.succ),
        "quasi_greedy": estimate_json(&report.quasi_greedy),
        "truncation_qg": estimate_json(&report.truncation_qg),
        "lambda": function_table_json(&report.lambda),
        "theta": function_table_json(&report.theta),
        "phi_a": function_table_json(&report.phi),
        "lebesgue": param_table_json(&report.lebesgue),
        "greedy_constant": estimate_json(&report.greedy_c),
        "sigma_exact": report.sigma_exact,
        "c_u": report.cu.as_ref().map(|cu| json!({
            "value": cu.value,
            "grid_exact": cu.grid_exact,
        })).unwrap_or(Value::Null),
        "checks": report.checks.iter().map(check_json).collect::<Vec<_>>(),
    })
}

pub fn verify_report_json(reports: &[BasisReport], kt: &CheckResult) -> String {
    let all_checks: Vec<Value> = reports
        .iter()
        .flat_map(|r| r.checks.iter())
        .chain(std::iter::once(kt))
        .map(check_json)
        .collect();
    let value = json!({
        "checks": all_checks,
        "bases": reports.iter().map(basis_report_json).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
    text.push('\n');
    text
}

/// One human-readable verdict line per check, in catalog order.
pub fn verify_summary(reports: &[BasisReport], kt: &CheckResult) -> String {
    let mut out = String::new();
    for report in reports {
        for check in &report.checks {
            out.push_str(&format!(
                "{:<24} {:<22} {}\n",
                report.basis_id,
                check.check_id,
                check.verdict.as_str()
            ));
        }
    }
    out.push_str(&format!(
        "{:<24} {:<22} {}\n",
        kt.basis_id,
        kt.check_id,
        kt.verdict.as_str()
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.5, 1.0 / 3.0, 1.7071067811865475, 1e-300, -2.5e17] {
            let text = fmt_f64(x);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back, x, "{text}");
        }
        assert_eq!(fmt_f64(0.0), "0");
    }

    #[test]
    fn witness_store_assigns_sequential_refs() {
        let mut store = WitnessStore::new();
        let a = store.add(&Witness::SetNorm { indices: vec![0] });
        let b = store.add(&Witness::SetNorm { indices: vec![1] });
        assert_eq!(a, "w000001");
        assert_eq!(b, "w000002");
        assert!(store.contains(&a));
        let json = store.to_json();
        assert!(json.contains("set_norm"));
    }
}
