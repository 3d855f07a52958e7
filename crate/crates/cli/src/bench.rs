//! Runtime comparison of the inference methods on sequences drawn from
//! seeded random deterministic sources.

use std::io::Write;
use std::time::{Duration, Instant};

use pfsa_core::cssr::CssrConfig;
use pfsa_core::exact::SearchLimits;
use pfsa_core::machine::{sample, Pfsa, Transition};
use pfsa_core::sequence::{Alphabet, SymbolSequence, WindowCounts};
use pfsa_core::stats::{DistributionTest, TestConfig};
use pfsa_core::{infer_counts, Error, Method};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

pub const CSV_HEADER: [&str; 7] = ["method", "alphabet", "length", "rep", "seconds", "states", "flag"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    methods: Vec<String>,
    alphabet_sizes: Vec<usize>,
    lengths: Vec<usize>,
    #[serde(rename = "L")]
    max_len: usize,
    alpha: f64,
    seed: u64,
    repetitions: usize,
    timeout: Option<f64>,
    threads: Option<usize>,
    test: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub methods: Vec<Method>,
    pub alphabet_sizes: Vec<usize>,
    pub lengths: Vec<usize>,
    pub cssr: CssrConfig,
    pub seed: u64,
    pub repetitions: usize,
    pub timeout: Duration,
    pub threads: usize,
}

impl BenchConfig {
    /// Parses `key = value` lines; lists are written `[a, b]`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        let methods = raw
            .methods
            .iter()
            .map(|m| m.parse::<Method>())
            .collect::<Result<Vec<_>, _>>()?;
        if methods.is_empty() {
            return Err("methods must not be empty".into());
        }
        if raw.repetitions < 1 {
            return Err("repetitions must be at least 1".into());
        }
        if !raw.lengths.windows(2).all(|w| w[0] < w[1]) {
            return Err("lengths must be ascending".into());
        }
        if raw.alphabet_sizes.iter().any(|&k| !(2..=10).contains(&k)) {
            return Err("alphabet sizes must lie in 2..=10".into());
        }
        let test: DistributionTest = raw.test.as_deref().unwrap_or("chi2").parse()?;
        let test = TestConfig::new(test, raw.alpha).map_err(|e| e.to_string())?;
        let cssr = CssrConfig::new(raw.max_len, test).map_err(|e| e.to_string())?;
        let timeout = raw.timeout.unwrap_or(300.0);
        if !(timeout > 0.0 && timeout.is_finite()) {
            return Err("timeout must be positive".into());
        }
        Ok(Self {
            methods,
            alphabet_sizes: raw.alphabet_sizes,
            lengths: raw.lengths,
            cssr,
            seed: raw.seed,
            repetitions: raw.repetitions,
            timeout: Duration::from_secs_f64(timeout),
            threads: raw.threads.unwrap_or(1).max(1),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub alphabet: usize,
    pub length: usize,
    pub rep: usize,
    pub seconds: f64,
    pub states: Option<usize>,
    pub flags: Vec<&'static str>,
}

impl BenchRow {
    pub fn flag(&self) -> String {
        if self.flags.is_empty() {
            "ok".into()
        } else {
            self.flags.join(";")
        }
    }
}

/// A random deterministic machine with 2 to 4 states over `k` symbols.
pub fn random_source(rng: &mut impl Rng, k: usize) -> Pfsa {
    let n = rng.random_range(2..=4);
    let alphabet = Alphabet::new((0..k).map(|a| a.to_string())).expect("distinct symbols");
    let mut transitions = Vec::new();
    for q in 0..n {
        let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for (a, w) in weights.into_iter().enumerate() {
            transitions.push(Transition {
                from: q,
                symbol: a,
                to: rng.random_range(0..n),
                prob: w / total,
            });
        }
    }
    Pfsa::new(alphabet, vec![Vec::new(); n], transitions, 0).expect("valid source")
}

/// The sequence fed to every method at one benchmark point.
pub fn point_sequence(seed: u64, point: u64, k: usize, length: usize) -> SymbolSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point);
    let source = random_source(&mut rng, k);
    sample(&source, length, rng.random()).expect("sources have no dead ends")
}

fn run_method(seq: &SymbolSequence, method: Method, cfg: &BenchConfig) -> (f64, Option<usize>, Vec<&'static str>) {
    let limits = SearchLimits {
        time_limit: Some(cfg.timeout),
    };
    let t = Instant::now();
    let result = WindowCounts::new(seq, cfg.cssr.max_len).and_then(|wc| infer_counts(&wc, method, &cfg.cssr, &limits));
    let seconds = t.elapsed().as_secs_f64();
    match result {
        Ok(inf) if seconds > cfg.timeout.as_secs_f64() => (seconds, Some(inf.machine.num_states()), vec!["timeout"]),
        Ok(inf) => (seconds, Some(inf.machine.num_states()), Vec::new()),
        Err(Error::Timeout) => (seconds, None, vec!["timeout"]),
        Err(Error::CoverOverflow { .. }) => (seconds, None, vec!["overflow"]),
        Err(_) => (seconds, None, vec!["error"]),
    }
}

fn run_point(cfg: &BenchConfig, point: u64, k: usize, length: usize, rep: usize) -> Vec<BenchRow> {
    let seq = point_sequence(cfg.seed, point, k, length);
    let mut rows: Vec<BenchRow> = cfg
        .methods
        .iter()
        .map(|&method| {
            let (seconds, states, flags) = run_method(&seq, method, cfg);
            BenchRow {
                method,
                alphabet: k,
                length,
                rep,
                seconds,
                states,
                flags,
            }
        })
        .collect();
    let states_of = |m: Method| rows.iter().find(|r| r.method == m).and_then(|r| r.states);
    let (ip, clique, cssr) = (states_of(Method::Ip), states_of(Method::Clique), states_of(Method::Cssr));
    for row in &mut rows {
        match (row.method, ip) {
            (Method::Clique, Some(opt)) if clique != Some(opt) && clique.is_some() => row.flags.push("mismatch"),
            (Method::Cssr, Some(opt)) if cssr.is_some_and(|c| c < opt) => row.flags.push("cssr-below-optimum"),
            _ => {}
        }
    }
    rows
}

/// Runs every method on every (alphabet size, length, repetition) point.
/// Rows come back ordered by point, then by method.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, String> {
    let mut points = Vec::new();
    for &k in &cfg.alphabet_sizes {
        for &length in &cfg.lengths {
            for rep in 0..cfg.repetitions {
                points.push((points.len() as u64, k, length, rep));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| e.to_string())?;
    let mut rows: Vec<BenchRow> = pool.install(|| {
        points
            .par_iter()
            .flat_map_iter(|&(p, k, length, rep)| run_point(cfg, p, k, length, rep))
            .collect()
    });
    rows.sort_by_key(|r| (r.alphabet, r.length, r.rep, r.method));
    Ok(rows)
}

pub fn write_csv(cfg: &BenchConfig, rows: &[BenchRow], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "# source: seeded random deterministic pFSA with 2-4 states, seed {}", cfg.seed)?;
    writeln!(
        out,
        "# L = {}, alpha = {}, test = {}, timeout = {} s",
        cfg.cssr.max_len,
        cfg.cssr.test.alpha,
        cfg.cssr.test.test.name(),
        cfg.timeout.as_secs_f64()
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            r.alphabet.to_string(),
            r.length.to_string(),
            r.rep.to_string(),
            format!("{:.6}", r.seconds),
            r.states.map_or(String::new(), |s| s.to_string()),
            r.flag(),
        ])?;
    }
    w.flush()
}
