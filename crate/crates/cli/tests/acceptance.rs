//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeSet;
use std::time::Instant;

use pfsa_cli::bench::{point_sequence, run_bench, write_csv, BenchConfig, BenchRow};
use pfsa_core::clique::{bron_kerbosch, clique_pipeline, min_clique_cover};
use pfsa_core::cssr::{cssr, CssrConfig};
use pfsa_core::exact::{brute_force_min_states, solve_msdpfsa, solve_msndpfsa, SearchLimits};
use pfsa_core::machine::{build_machine, check_determinism, sample, Pfsa, StatePartition};
use pfsa_core::sequence::{gen_fixture, History, SuccessorTable, SymbolSequence, WindowCounts};
use pfsa_core::stats::{compatibility_graph, pvalue_matrix, CompatibilityGraph, DistributionTest, TestConfig};
use pfsa_core::{Error, Method};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn chi2_cfg(max_len: usize, alpha: f64) -> CssrConfig {
    CssrConfig::new(max_len, TestConfig::new(DistributionTest::ChiSquared, alpha).unwrap()).unwrap()
}

fn h(s: &str) -> History {
    s.bytes().map(|b| (b - b'0') as usize).collect()
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fixture_blocks() -> Vec<Vec<History>> {
    let mut b = vec![vec![h("00"), h("10")], vec![h("01")], vec![h("11")]];
    b.sort();
    b
}

/// Row-stochastic state-to-state matrix.
fn transition_matrix(m: &Pfsa) -> Vec<Vec<f64>> {
    let n = m.num_states();
    let mut t = vec![vec![0.0; n]; n];
    for tr in m.transitions() {
        t[tr.from][tr.to] += tr.prob;
    }
    t
}

fn rows_sum_to_one(m: &Pfsa) -> bool {
    (0..m.num_states()).all(|q| {
        let s: f64 = m.outgoing(q).map(|t| t.prob).sum();
        (s - 1.0).abs() <= 1e-9
    })
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let wc = WindowCounts::new(&gen_fixture(), 2).unwrap();
    let table1 = [("00", 0.9314, 0.0686), ("01", 0.5789, 0.4211), ("11", 1.0, 0.0), ("10", 0.9737, 0.0263)];
    let mut worst_p = 0.0f64;
    for (s, p0, p1) in table1 {
        let d = wc.cond_dist(&h(s)).unwrap();
        worst_p = worst_p.max((d.probs[0] - p0).abs()).max((d.probs[1] - p1).abs());
    }
    check(worst_p <= 5e-4, format!("conditional max error {worst_p:.2e}"))?;

    let w = wc.strings();
    check(w == vec![h("00"), h("01"), h("11"), h("10")], "histories not in appearance order")?;
    let pv = pvalue_matrix(&w, &wc, &chi2_cfg(2, 0.05).test).unwrap();
    // (row, column, value) over W = 00, 01, 11, 10.
    let table2 = [(1, 0, 0.0), (2, 0, 0.0067), (2, 1, 0.0), (3, 0, 0.0944), (3, 1, 0.0), (3, 2, 0.7924)];
    let mut worst_v = 0.0f64;
    for (l, i, want) in table2 {
        let got = pv[l][i];
        if want == 0.0 {
            check(got < 1e-3, format!("p[{l}][{i}] = {got} should be below 1e-3"))?;
        } else {
            worst_v = worst_v.max((got - want).abs());
        }
    }
    check(worst_v <= 0.02, format!("p-value max error {worst_v:.4}"))?;
    let secs = t.elapsed().as_secs_f64();
    check(secs < 1.0, format!("took {secs:.3} s"))?;
    Ok(format!("conditionals within {worst_p:.1e}, p-values within {worst_v:.1e}, {secs:.3} s"))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let wc = WindowCounts::new(&gen_fixture(), 2).unwrap();
    let cfg = chi2_cfg(2, 0.05);
    let c = cssr(&wc, &cfg).unwrap();
    check(c.machine.num_states() == 4, format!("CSSR gave {} states", c.machine.num_states()))?;

    let w = wc.strings();
    let graph = compatibility_graph(&w, &wc, &cfg.test).unwrap();
    let exact = solve_msdpfsa(&graph, &SuccessorTable::new(&w, &wc), &SearchLimits::default()).unwrap();
    let pipeline = clique_pipeline(&wc, &cfg).unwrap();
    let table4 = [[0.9341, 0.0659, 0.0], [0.5789, 0.0, 0.4211], [1.0, 0.0, 0.0]];
    let mut worst = 0.0f64;
    for (name, part) in [("exact", &exact.partition), ("clique", &pipeline.partition)] {
        check(part.num_states() == 3, format!("{name} gave {} states", part.num_states()))?;
        check(part.canonical_blocks() == fixture_blocks(), format!("{name} partition {:?}", part.canonical_blocks()))?;
        let m = build_machine(part, &wc);
        let tm = transition_matrix(&m);
        for q in 0..3 {
            for r in 0..3 {
                worst = worst.max((tm[q][r] - table4[q][r]).abs());
            }
        }
    }
    check(worst <= 5e-4, format!("transition max error {worst:.2e}"))?;
    let secs = t.elapsed().as_secs_f64();
    check(secs < 5.0, format!("took {secs:.3} s"))?;
    Ok(format!("CSSR 4, exact 3, clique 3, transitions within {worst:.1e}, {secs:.3} s"))
}

struct Instance {
    graph: CompatibilityGraph,
    succ: SuccessorTable,
}

/// Graphs and successor tables from sampled sequences with at most eight
/// distinct length-L histories, across tests and significance levels.
fn sequence_instances(count: usize, seed: u64) -> Vec<(Instance, WindowCounts, CssrConfig)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut point = 0u64;
    while out.len() < count {
        point += 1;
        let (k, max_len) = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1)][rng.random_range(0..6)];
        let length = 10f64.powf(rng.random_range(1.0..3.3)) as usize;
        let seq = point_sequence(seed, point, k, length);
        let Ok(wc) = WindowCounts::new(&seq, max_len) else { continue };
        let w = wc.strings();
        if w.len() > 8 {
            continue;
        }
        let test = [DistributionTest::ChiSquared, DistributionTest::ChiSquaredCounts, DistributionTest::KolmogorovSmirnov]
            [rng.random_range(0..3)];
        let alpha = [0.01, 0.05, 0.2][rng.random_range(0..3)];
        let cfg = CssrConfig::new(max_len, TestConfig::new(test, alpha).unwrap()).unwrap();
        let graph = compatibility_graph(&w, &wc, &cfg.test).unwrap();
        let succ = SuccessorTable::new(&w, &wc);
        out.push((Instance { graph, succ }, wc, cfg));
    }
    out
}

fn criterion_3(instances: &[(Instance, WindowCounts, CssrConfig)]) -> Outcome {
    let t = Instant::now();
    let mut sizes = BTreeSet::new();
    for (i, (inst, _, _)) in instances.iter().enumerate() {
        let d = solve_msdpfsa(&inst.graph, &inst.succ, &SearchLimits::default()).unwrap().optimum;
        let nd = solve_msndpfsa(&inst.graph, &SearchLimits::default()).unwrap().optimum;
        let bd = brute_force_min_states(&inst.graph, &inst.succ, true).unwrap();
        let bnd = brute_force_min_states(&inst.graph, &inst.succ, false).unwrap();
        check(d == bd, format!("instance {i}: deterministic {d} vs oracle {bd}"))?;
        check(nd == bnd, format!("instance {i}: non-deterministic {nd} vs oracle {bnd}"))?;
        sizes.insert(inst.graph.len());
    }
    let secs = t.elapsed().as_secs_f64();
    check(secs < 120.0, format!("took {secs:.1} s"))?;
    Ok(format!("{} instances, n in {:?}, {secs:.2} s", instances.len(), sizes))
}

fn subset_cliques(g: &CompatibilityGraph) -> Vec<Vec<usize>> {
    let n = g.len();
    let members = |m: u32| (0..n).filter(move |&i| m >> i & 1 == 1).collect::<Vec<_>>();
    let cliques: Vec<u32> = (1u32..1 << n).filter(|&m| g.is_clique(&members(m))).collect();
    let mut maximal: Vec<Vec<usize>> = cliques
        .iter()
        .filter(|&&m| !cliques.iter().any(|&o| o != m && o & m == m))
        .map(|&m| members(m))
        .collect();
    maximal.sort();
    maximal
}

/// Fewest blocks over all set partitions into cliques.
fn partition_cover_number(g: &CompatibilityGraph) -> usize {
    fn go(g: &CompatibilityGraph, v: usize, blocks: &mut Vec<Vec<usize>>, best: &mut usize) {
        if blocks.len() >= *best {
            return;
        }
        if v == g.len() {
            *best = blocks.len();
            return;
        }
        for b in 0..blocks.len() {
            if blocks[b].iter().all(|&u| g.adjacent(u, v)) {
                blocks[b].push(v);
                go(g, v + 1, blocks, best);
                blocks[b].pop();
            }
        }
        blocks.push(vec![v]);
        go(g, v + 1, blocks, best);
        blocks.pop();
    }
    let mut best = g.len() + 1;
    go(g, 0, &mut Vec::new(), &mut best);
    best.min(g.len())
}

fn random_graphs(count: usize, seed: u64) -> Vec<CompatibilityGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=12);
            let density = rng.random_range(0.1..0.9);
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|_| rng.random_bool(density))
                .collect();
            CompatibilityGraph::unlabelled(n, &edges)
        })
        .collect()
}

fn criterion_4(graphs: &[CompatibilityGraph]) -> Outcome {
    let t = Instant::now();
    for (i, g) in graphs.iter().enumerate() {
        let bk = bron_kerbosch(g);
        check(bk == subset_cliques(g), format!("graph {i}: maximal cliques differ"))?;
        let cover = min_clique_cover(g, &bk, g.len()).unwrap().size();
        let oracle = partition_cover_number(g);
        check(cover == oracle, format!("graph {i}: cover {cover} vs oracle {oracle}"))?;
    }
    let secs = t.elapsed().as_secs_f64();
    check(secs < 120.0, format!("took {secs:.1} s"))?;
    Ok(format!("{} graphs up to 12 vertices, {secs:.2} s", graphs.len()))
}

fn criterion_5(instances: &[(Instance, WindowCounts, CssrConfig)], graphs: &[CompatibilityGraph]) -> Outcome {
    let all = instances.iter().map(|(i, _, _)| &i.graph).chain(graphs.iter());
    let mut count = 0;
    for (i, g) in all.enumerate() {
        let cover = min_clique_cover(g, &bron_kerbosch(g), g.len()).unwrap().size();
        let nd = solve_msndpfsa(g, &SearchLimits::default()).unwrap().optimum;
        check(cover == nd, format!("instance {i}: cover {cover} vs non-deterministic optimum {nd}"))?;
        count += 1;
    }
    Ok(format!("{count} instances equal"))
}

fn criterion_6(instances: &[(Instance, WindowCounts, CssrConfig)]) -> Outcome {
    let mut inputs: Vec<(WindowCounts, CssrConfig)> = vec![(WindowCounts::new(&gen_fixture(), 2).unwrap(), chi2_cfg(2, 0.05))];
    inputs.extend(instances.iter().map(|(_, wc, cfg)| (wc.clone(), *cfg)));
    let mut machines = 0;
    let mut overflow = 0;
    for (i, (wc, cfg)) in inputs.iter().enumerate() {
        let mut emitted = vec![cssr(wc, cfg).unwrap().machine];
        let w = wc.strings();
        let g = compatibility_graph(&w, wc, &cfg.test).unwrap();
        let exact = solve_msdpfsa(&g, &SuccessorTable::new(&w, wc), &SearchLimits::default()).unwrap();
        emitted.push(build_machine(&exact.partition, wc));
        match clique_pipeline(wc, cfg) {
            Ok(p) => emitted.push(p.machine),
            Err(Error::CoverOverflow { .. }) => overflow += 1,
            Err(e) => return Err(format!("input {i}: {e}")),
        }
        for m in &emitted {
            check(check_determinism(m).is_empty(), format!("input {i}: non-deterministic machine"))?;
            check(rows_sum_to_one(m), format!("input {i}: a probability row does not sum to 1"))?;
            machines += 1;
        }
    }
    Ok(format!("{machines} machines from {} inputs ({overflow} cover overflows)", inputs.len()))
}

fn criterion_7() -> Outcome {
    let wc = WindowCounts::new(&gen_fixture(), 2).unwrap();
    let w = wc.strings();
    let part = StatePartition::from_blocks(w, &[vec![0, 3], vec![1], vec![2]]).unwrap();
    let m = build_machine(&part, &wc);
    let seq: SymbolSequence = sample(&m, 50_000, 7).unwrap();
    let wc2 = WindowCounts::new(&seq, 2).unwrap();
    let mut worst = 0.0f64;
    for (q, hs) in m.states().iter().enumerate() {
        let got = wc2.state_dist(hs).unwrap().probs;
        let want = m.emission_row(q);
        for (g, e) in got.iter().zip(&want) {
            worst = worst.max((g - e).abs());
        }
    }
    check(worst <= 0.03, format!("max deviation {worst:.4}"))?;
    Ok(format!("max deviation {worst:.4} over 50000 symbols"))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn criterion_8() -> Outcome {
    let growth_cfg = BenchConfig::parse(
        "methods = [\"clique\"]\nalphabet_sizes = [2]\nlengths = [100, 1000, 10000]\nL = 2\nalpha = 0.05\nseed = 8\nrepetitions = 5\n",
    )
    .unwrap();
    let race_cfg = BenchConfig::parse(
        "methods = [\"cssr\", \"ip\", \"clique\"]\nalphabet_sizes = [3, 4]\nlengths = [25, 50, 100]\nL = 2\nalpha = 0.05\nseed = 8\nrepetitions = 10\n",
    )
    .unwrap();
    let growth = run_bench(&growth_cfg).unwrap();
    let race = run_bench(&race_cfg).unwrap();
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    for (name, cfg, rows) in [("growth", &growth_cfg, &growth), ("race", &race_cfg, &race)] {
        let mut f = std::fs::File::create(dir.join(format!("acceptance_{name}.csv"))).unwrap();
        write_csv(cfg, rows, &mut f).unwrap();
    }

    let mut problems = Vec::new();
    let slowest = growth.iter().map(|r| r.seconds).fold(0.0, f64::max);
    if slowest >= 5.0 || growth.iter().any(|r| r.states.is_none()) {
        problems.push(format!("slowest clique run {slowest:.3} s"));
    }
    let med = |len: usize| median(growth.iter().filter(|r| r.length == len).map(|r| r.seconds).collect());
    let (t1, t2, t3) = (med(100), med(1000), med(10000));
    let slopes = [(t2 / t1).log10(), (t3 / t2).log10()];
    if slopes.iter().any(|&s| s >= 2.0) {
        problems.push(format!("growth exponents {:.2}, {:.2}", slopes[0], slopes[1]));
    }

    let points: Vec<&[BenchRow]> = race.chunks(3).collect();
    let wins = points
        .iter()
        .filter(|p| {
            let sec = |m: Method| p.iter().find(|r| r.method == m).unwrap().seconds;
            sec(Method::Cssr) < sec(Method::Ip) && sec(Method::Cssr) < sec(Method::Clique)
        })
        .count();
    let share = wins as f64 / points.len() as f64;
    if share < 0.8 {
        problems.push(format!("CSSR fastest share {share:.2} is below 0.80"));
    }
    let detail = format!(
        "clique medians {:.2e}/{:.2e}/{:.2e} s (exponents {:.2}, {:.2}), slowest {slowest:.3} s; CSSR fastest in {wins}/{} runs",
        t1,
        t2,
        t3,
        slopes[0],
        slopes[1],
        points.len()
    );
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", problems.join("; ")))
    }
}

fn main() {
    let instances = sequence_instances(200, 31);
    let graphs = random_graphs(100, 47);
    let results: Vec<(usize, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3(&instances)),
        (4, criterion_4(&graphs)),
        (5, criterion_5(&instances, &graphs)),
        (6, criterion_6(&instances)),
        (7, criterion_7()),
        (8, criterion_8()),
    ];
    let mut failed = 0;
    for (n, r) in &results {
        match r {
            Ok(msg) => println!("criterion {n}: PASS ({msg})"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL ({msg})");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
