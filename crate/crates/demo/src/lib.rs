//! Browser bindings: load the reference sequence, analyze a sequence with
//! all three methods, and resample from an inferred machine.
//!
//! The `*_impl` functions hold the logic and run natively; the exported
//! wrappers only convert errors.

use pfsa_core::clique::clique_pipeline;
use pfsa_core::cssr::{cssr, CssrConfig};
use pfsa_core::exact::{solve_msdpfsa, SearchLimits};
use pfsa_core::machine::{build_machine, sample, Pfsa};
use pfsa_core::sequence::{gen_fixture, SuccessorTable, SymbolSequence, TokenMode, WindowCounts};
use pfsa_core::stats::{pvalue_matrix, DistributionTest, TestConfig};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest sequence the page will analyze.
pub const MAX_INPUT: usize = 200_000;
/// Largest history set handed to the exact search from the page.
pub const MAX_EXACT_HISTORIES: usize = 40;

pub fn fixture_impl() -> String {
    gen_fixture().to_text()
}

fn machine_value(m: &Pfsa) -> Value {
    serde_json::from_str(&m.to_json()).expect("machine JSON is valid")
}

/// Graph, p-values and the machine of each method, as one JSON document.
pub fn analyze_impl(text: &str, max_len: usize, alpha: f64, test: &str) -> Result<String, String> {
    let seq = SymbolSequence::parse(text, TokenMode::Chars).map_err(|e| e.to_string())?;
    if seq.len() > MAX_INPUT {
        return Err(format!("sequence longer than {MAX_INPUT} symbols"));
    }
    let test: DistributionTest = test.parse()?;
    let test = TestConfig::new(test, alpha).map_err(|e| e.to_string())?;
    let cfg = CssrConfig::new(max_len, test).map_err(|e| e.to_string())?;
    let wc = WindowCounts::new(&seq, max_len).map_err(|e| e.to_string())?;
    let w = wc.strings();
    let pvalues = pvalue_matrix(&w, &wc, &test).map_err(|e| e.to_string())?;
    let labels: Vec<String> = w.iter().map(|h| wc.alphabet().format_history(h)).collect();
    let mut edges = Vec::new();
    for (l, row) in pvalues.iter().enumerate() {
        for (i, &p) in row.iter().enumerate().take(l) {
            if test.accepts(p) {
                edges.push([i, l]);
            }
        }
    }

    let cssr_out = cssr(&wc, &cfg).map_err(|e| e.to_string())?;
    let (exact, clique) = if w.len() <= MAX_EXACT_HISTORIES {
        let pipeline = clique_pipeline(&wc, &cfg).map_err(|e| e.to_string())?;
        let result = solve_msdpfsa(&pipeline.graph, &SuccessorTable::new(&w, &wc), &SearchLimits::default())
            .map_err(|e| e.to_string())?;
        (
            machine_value(&build_machine(&result.partition, &wc)),
            machine_value(&pipeline.machine),
        )
    } else {
        (Value::Null, Value::Null)
    };
    let doc = json!({
        "histories": labels,
        "pvalues": pvalues,
        "edges": edges,
        "machines": {
            "cssr": machine_value(&cssr_out.machine),
            "ip": exact,
            "clique": clique,
        },
    });
    Ok(doc.to_string())
}

/// Draws `n` symbols from a machine in the JSON export format.
pub fn sample_impl(machine_json: &str, n: usize, seed: u64) -> Result<String, String> {
    if n > MAX_INPUT {
        return Err(format!("at most {MAX_INPUT} symbols"));
    }
    let m = Pfsa::from_json(machine_json).map_err(|e| e.to_string())?;
    sample(&m, n, seed).map(|s| s.to_text()).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn fixture() -> String {
    fixture_impl()
}

#[wasm_bindgen]
pub fn analyze(text: &str, max_len: usize, alpha: f64, test: &str) -> Result<String, JsError> {
    analyze_impl(text, max_len, alpha, test).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn resample(machine_json: &str, n: usize, seed: u32) -> Result<String, JsError> {
    sample_impl(machine_json, n, u64::from(seed)).map_err(|e| JsError::new(&e))
}
