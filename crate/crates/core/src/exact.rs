//! Exact minimum-state search, the 0/1 program it solves, and a brute-force
//! oracle over set partitions.

use std::fmt::Write as _;
use std::time::Duration;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::machine::StatePartition;
use crate::sequence::{SuccessorTable, Symbol};
use crate::stats::CompatibilityGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// The minimum-state program over `n` histories with up to `n` states.
///
/// Variables are `x_i_j` (history `i` in state `j`), `y_s_j_k` (state `j`
/// moves to state `k` on symbol `s`, deterministic variant only) and `p_j`
/// (state `j` is used). `z` and `mu` are data and appear as constants.
#[derive(Debug, Clone, PartialEq)]
pub struct IpModel {
    pub n: usize,
    pub alphabet_size: usize,
    pub deterministic: bool,
    pub variables: Vec<String>,
    pub constants: Vec<(String, bool)>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, f64)>,
}

impl IpModel {
    pub fn x(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn y(&self, s: Symbol, j: usize, k: usize) -> Option<usize> {
        self.deterministic
            .then(|| self.n * self.n + (s * self.n + j) * self.n + k)
    }

    pub fn p(&self, j: usize) -> usize {
        let ys = if self.deterministic { self.alphabet_size * self.n * self.n } else { 0 };
        self.n * self.n + ys + j
    }

    /// Number of variables, or constants, whose name starts with `family_`.
    pub fn family_size(&self, family: &str) -> usize {
        let prefix = format!("{family}_");
        let vars = self.variables.iter().filter(|v| v.starts_with(&prefix)).count();
        let consts = self.constants.iter().filter(|(c, _)| c.starts_with(&prefix)).count();
        vars + consts
    }

    /// True when `values` satisfies every constraint.
    pub fn evaluate(&self, values: &[bool]) -> bool {
        self.constraints.iter().all(|c| {
            let lhs: f64 = c.terms.iter().map(|&(v, a)| if values[v] { a } else { 0.0 }).sum();
            match c.sense {
                Sense::Le => lhs <= c.rhs + 1e-9,
                Sense::Ge => lhs >= c.rhs - 1e-9,
                Sense::Eq => (lhs - c.rhs).abs() <= 1e-9,
            }
        })
    }

    pub fn objective_value(&self, values: &[bool]) -> f64 {
        self.objective.iter().map(|&(v, a)| if values[v] { a } else { 0.0 }).sum()
    }

    /// The variable vector induced by a state assignment: `y` holds exactly
    /// the transitions the members produce and `p` marks non-empty states.
    pub fn values_for(&self, assign: &[usize], succ: &SuccessorTable) -> Vec<bool> {
        let mut values = vec![false; self.variables.len()];
        for (i, &j) in assign.iter().enumerate() {
            values[self.x(i, j)] = true;
            values[self.p(j)] = true;
            if self.deterministic {
                for s in 0..self.alphabet_size {
                    if let Some(l) = succ.get(i, s) {
                        values[self.y(s, j, assign[l]).unwrap()] = true;
                    }
                }
            }
        }
        values
    }

    /// CPLEX LP text.
    pub fn to_lp(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        push_terms(&mut out, &self.objective, &self.variables);
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            push_terms(&mut out, &c.terms, &self.variables);
            let sense = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {sense} {}", c.rhs);
        }
        out.push_str("Binary\n");
        for v in &self.variables {
            let _ = writeln!(out, " {v}");
        }
        out.push_str("End\n");
        out
    }
}

fn push_terms(out: &mut String, terms: &[(usize, f64)], names: &[String]) {
    for (k, &(v, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 { " -" } else if k == 0 { "" } else { " +" };
        let mag = a.abs();
        if mag == 1.0 {
            let _ = write!(out, "{sign} {}", names[v]);
        } else {
            let _ = write!(out, "{sign} {mag} {}", names[v]);
        }
    }
}

pub fn build_ip_model(graph: &CompatibilityGraph, succ: &SuccessorTable, deterministic: bool) -> IpModel {
    let n = graph.len();
    let k = succ.alphabet_size();
    let mut variables = Vec::new();
    for i in 0..n {
        for j in 0..n {
            variables.push(format!("x_{i}_{j}"));
        }
    }
    if deterministic {
        for s in 0..k {
            for j in 0..n {
                for l in 0..n {
                    variables.push(format!("y_{s}_{j}_{l}"));
                }
            }
        }
    }
    for j in 0..n {
        variables.push(format!("p_{j}"));
    }
    let mut constants = Vec::new();
    for s in 0..k {
        for i in 0..n {
            for l in 0..n {
                constants.push((format!("z_{s}_{i}_{l}"), succ.get(i, s) == Some(l)));
            }
        }
    }
    for i in 0..n {
        for l in i + 1..n {
            constants.push((format!("mu_{i}_{l}"), graph.adjacent(i, l)));
        }
    }

    let mut model = IpModel {
        n,
        alphabet_size: k,
        deterministic,
        variables,
        constants,
        constraints: Vec::new(),
        objective: Vec::new(),
    };
    model.objective = (0..n).map(|j| (model.p(j), 1.0)).collect();

    let mut cons = Vec::new();
    for i in 0..n {
        cons.push(Constraint {
            name: format!("assign_{i}"),
            terms: (0..n).map(|j| (model.x(i, j), 1.0)).collect(),
            sense: Sense::Eq,
            rhs: 1.0,
        });
    }
    for i in 0..n {
        for l in i + 1..n {
            let mu = if graph.adjacent(i, l) { 1.0 } else { 0.0 };
            for j in 0..n {
                cons.push(Constraint {
                    name: format!("mu_{i}_{l}_{j}"),
                    terms: vec![(model.x(i, j), 1.0), (model.x(l, j), 1.0)],
                    sense: Sense::Le,
                    rhs: 1.0 + mu,
                });
            }
        }
    }
    if deterministic {
        for s in 0..k {
            for i in 0..n {
                let Some(l) = succ.get(i, s) else { continue };
                for j in 0..n {
                    for q in 0..n {
                        cons.push(Constraint {
                            name: format!("link_{s}_{i}_{l}_{j}_{q}"),
                            terms: vec![
                                (model.x(i, j), -1.0),
                                (model.x(l, q), -1.0),
                                (model.y(s, j, q).unwrap(), 1.0),
                            ],
                            sense: Sense::Ge,
                            rhs: -1.0,
                        });
                    }
                }
            }
        }
        for s in 0..k {
            for j in 0..n {
                cons.push(Constraint {
                    name: format!("func_{s}_{j}"),
                    terms: (0..n).map(|q| (model.y(s, j, q).unwrap(), 1.0)).collect(),
                    sense: Sense::Le,
                    rhs: 1.0,
                });
            }
        }
    }
    for j in 0..n {
        let mut terms = vec![(model.p(j), n as f64)];
        terms.extend((0..n).map(|i| (model.x(i, j), -1.0)));
        cons.push(Constraint {
            name: format!("used_{j}"),
            terms,
            sense: Sense::Ge,
            rhs: 0.0,
        });
    }
    model.constraints = cons;
    model
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchLimits {
    /// Wall-clock budget. Ignored on targets without a clock.
    pub time_limit: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub partition: StatePartition,
    pub optimum: usize,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

/// Minimum number of states such that co-assigned histories are compatible
/// and every (state, symbol) has at most one observed successor state.
pub fn solve_msdpfsa(
    graph: &CompatibilityGraph,
    succ: &SuccessorTable,
    limits: &SearchLimits,
) -> Result<SolveResult> {
    if succ.len() != graph.len() {
        return Err(Error::InvalidPartition(format!(
            "successor table has {} rows for {} histories",
            succ.len(),
            graph.len()
        )));
    }
    Search::new(graph, Some(succ), limits).run(graph)
}

/// Minimum number of states under the compatibility constraint alone, i.e.
/// the clique cover number of the graph.
pub fn solve_msndpfsa(graph: &CompatibilityGraph, limits: &SearchLimits) -> Result<SolveResult> {
    Search::new(graph, None, limits).run(graph)
}

#[cfg(not(target_arch = "wasm32"))]
type Clock = Option<std::time::Instant>;
#[cfg(target_arch = "wasm32")]
type Clock = Option<()>;

#[cfg(not(target_arch = "wasm32"))]
fn clock_now() -> Clock {
    Some(std::time::Instant::now())
}
#[cfg(target_arch = "wasm32")]
fn clock_now() -> Clock {
    None
}

#[cfg(not(target_arch = "wasm32"))]
fn clock_elapsed(c: Clock) -> Duration {
    c.map_or(Duration::ZERO, |t| t.elapsed())
}
#[cfg(target_arch = "wasm32")]
fn clock_elapsed(_: Clock) -> Duration {
    Duration::ZERO
}

const UNASSIGNED: usize = usize::MAX;

struct Search<'a> {
    n: usize,
    k: usize,
    adj: Vec<FixedBitSet>,
    succ: Option<&'a SuccessorTable>,
    preds: Vec<Vec<(usize, Symbol)>>,
    assign: Vec<usize>,
    members: Vec<FixedBitSet>,
    used: usize,
    targets: Vec<(usize, u32)>,
    log: Vec<usize>,
    best: usize,
    best_assign: Vec<usize>,
    lower: usize,
    nodes: u64,
    started: Clock,
    time_limit: Option<Duration>,
    timed_out: bool,
}

impl<'a> Search<'a> {
    fn new(graph: &'a CompatibilityGraph, succ: Option<&'a SuccessorTable>, limits: &SearchLimits) -> Self {
        let n = graph.len();
        let k = succ.map_or(0, SuccessorTable::alphabet_size);
        let adj = (0..n)
            .map(|i| {
                let mut b = FixedBitSet::with_capacity(n);
                graph.neighbors(i).for_each(|j| b.insert(j));
                b
            })
            .collect();
        let started = if limits.time_limit.is_some() { clock_now() } else { None };
        Self {
            n,
            k,
            adj,
            succ,
            preds: succ.map_or_else(|| vec![Vec::new(); n], SuccessorTable::predecessors),
            assign: vec![UNASSIGNED; n],
            members: vec![FixedBitSet::with_capacity(n); n],
            used: 0,
            targets: vec![(0, 0); n * k],
            log: Vec::new(),
            best: n,
            best_assign: (0..n).collect(),
            lower: greedy_independent_set(graph),
            nodes: 0,
            started,
            time_limit: limits.time_limit,
            timed_out: false,
        }
    }

    fn run(mut self, graph: &CompatibilityGraph) -> Result<SolveResult> {
        let t0 = clock_now();
        if self.lower < self.best {
            self.dfs(0);
        }
        if self.timed_out {
            return Err(Error::Timeout);
        }
        let partition = StatePartition::new(graph.vertices().to_vec(), self.best_assign)?;
        Ok(SolveResult {
            optimum: partition.num_states(),
            partition,
            nodes_explored: self.nodes,
            elapsed: clock_elapsed(t0),
        })
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if let Some(limit) = self.time_limit {
            if self.nodes.is_multiple_of(1024) && clock_elapsed(self.started) > limit {
                self.timed_out = true;
            }
        }
        self.timed_out
    }

    fn bump(&mut self, s: usize, a: Symbol, to: usize) -> bool {
        let slot = s * self.k + a;
        let entry = &mut self.targets[slot];
        if entry.1 == 0 {
            *entry = (to, 1);
        } else if entry.0 == to {
            entry.1 += 1;
        } else {
            return false;
        }
        self.log.push(slot);
        true
    }

    fn place(&mut self, v: usize, s: usize) -> bool {
        self.assign[v] = s;
        self.members[s].insert(v);
        let Some(succ) = self.succ else { return true };
        for a in 0..self.k {
            if let Some(t) = succ.get(v, a) {
                let st = self.assign[t];
                if st != UNASSIGNED && !self.bump(s, a, st) {
                    return false;
                }
            }
        }
        for idx in 0..self.preds[v].len() {
            let (p, a) = self.preds[v][idx];
            let sp = self.assign[p];
            if p != v && sp != UNASSIGNED && !self.bump(sp, a, s) {
                return false;
            }
        }
        true
    }

    fn unplace(&mut self, v: usize, s: usize, mark: usize) {
        while self.log.len() > mark {
            let slot = self.log.pop().unwrap();
            self.targets[slot].1 -= 1;
        }
        self.members[s].set(v, false);
        self.assign[v] = UNASSIGNED;
    }

    /// Unassigned vertices that fit no open state and are pairwise
    /// incompatible each need a state of their own.
    fn bound(&self, from: usize) -> usize {
        let mut chosen: Vec<usize> = Vec::new();
        for u in from..self.n {
            let fits = (0..self.used).any(|s| self.members[s].is_subset(&self.adj[u]));
            if !fits && chosen.iter().all(|&w| !self.adj[u].contains(w)) {
                chosen.push(u);
            }
        }
        chosen.len()
    }

    fn done(&self) -> bool {
        self.timed_out || self.best == self.lower
    }

    fn dfs(&mut self, v: usize) {
        self.nodes += 1;
        if self.out_of_time() {
            return;
        }
        if v == self.n {
            if self.used < self.best {
                self.best = self.used;
                self.best_assign = self.assign.clone();
            }
            return;
        }
        if self.used + self.bound(v) >= self.best {
            return;
        }
        for s in 0..self.used {
            if !self.members[s].is_subset(&self.adj[v]) {
                continue;
            }
            let mark = self.log.len();
            if self.place(v, s) {
                self.dfs(v + 1);
            }
            self.unplace(v, s, mark);
            if self.done() {
                return;
            }
        }
        if self.used + 1 < self.best {
            let s = self.used;
            self.used += 1;
            let mark = self.log.len();
            if self.place(v, s) {
                self.dfs(v + 1);
            }
            self.unplace(v, s, mark);
            self.used -= 1;
        }
    }
}

/// Pairwise non-adjacent vertices picked greedily by ascending degree.
fn greedy_independent_set(graph: &CompatibilityGraph) -> usize {
    let mut order: Vec<usize> = (0..graph.len()).collect();
    order.sort_by_key(|&i| (graph.degree(i), i));
    let mut chosen: Vec<usize> = Vec::new();
    for i in order {
        if chosen.iter().all(|&j| !graph.adjacent(i, j)) {
            chosen.push(i);
        }
    }
    chosen.len()
}

pub const ORACLE_LIMIT: usize = 10;

/// Minimum block count over every set partition of the histories that keeps
/// compatible histories together and, when `deterministic`, gives each
/// (block, symbol) a single successor block.
pub fn brute_force_min_states(
    graph: &CompatibilityGraph,
    succ: &SuccessorTable,
    deterministic: bool,
) -> Result<usize> {
    let n = graph.len();
    if n > ORACLE_LIMIT {
        return Err(Error::TooLargeForOracle { n, limit: ORACLE_LIMIT });
    }
    let mut best = n;
    let mut labels = vec![0usize; n];
    each_partition(&mut labels, 0, 0, &mut |labels, blocks| {
        if blocks < best && partition_ok(graph, succ, deterministic, labels) {
            best = blocks;
        }
    });
    Ok(best)
}

/// Calls `f` on every restricted-growth labelling of `labels.len()` items.
pub(crate) fn each_partition(labels: &mut Vec<usize>, i: usize, blocks: usize, f: &mut impl FnMut(&[usize], usize)) {
    if i == labels.len() {
        f(labels, blocks);
        return;
    }
    for b in 0..=blocks {
        labels[i] = b;
        each_partition(labels, i + 1, blocks.max(b + 1), f);
    }
}

fn partition_ok(graph: &CompatibilityGraph, succ: &SuccessorTable, deterministic: bool, labels: &[usize]) -> bool {
    let n = labels.len();
    for i in 0..n {
        for l in i + 1..n {
            if labels[i] == labels[l] && !graph.adjacent(i, l) {
                return false;
            }
        }
    }
    if deterministic {
        for i in 0..n {
            for l in i + 1..n {
                if labels[i] != labels[l] {
                    continue;
                }
                for a in 0..succ.alphabet_size() {
                    if let (Some(ti), Some(tl)) = (succ.get(i, a), succ.get(l, a)) {
                        if labels[ti] != labels[tl] {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{build_machine, check_determinism};
    use crate::sequence::{gen_fixture, History, WindowCounts};
    use crate::stats::{compatibility_graph, DistributionTest, TestConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h(s: &str) -> History {
        s.bytes().map(|b| (b - b'0') as usize).collect()
    }

    fn fixture() -> (WindowCounts, CompatibilityGraph, SuccessorTable) {
        let wc = WindowCounts::new(&gen_fixture(), 2).unwrap();
        let w = wc.strings();
        let cfg = TestConfig::new(DistributionTest::ChiSquared, 0.05).unwrap();
        let g = compatibility_graph(&w, &wc, &cfg).unwrap();
        let succ = SuccessorTable::new(&w, &wc);
        (wc, g, succ)
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, k: usize) -> (CompatibilityGraph, SuccessorTable) {
        let density = rng.random_range(0.2..0.9);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| rng.random_bool(density))
            .collect();
        let rows = (0..n)
            .map(|_| {
                (0..k)
                    .map(|_| rng.random_bool(0.7).then(|| rng.random_range(0..n)))
                    .collect()
            })
            .collect();
        (CompatibilityGraph::unlabelled(n, &edges), SuccessorTable::from_rows(rows))
    }

    #[test]
    fn fixture_optimum_is_three() {
        let (wc, g, succ) = fixture();
        let r = solve_msdpfsa(&g, &succ, &SearchLimits::default()).unwrap();
        assert_eq!(r.optimum, 3);
        let mut want = vec![vec![h("00"), h("10")], vec![h("01")], vec![h("11")]];
        want.sort();
        assert_eq!(r.partition.canonical_blocks(), want);
        assert!(check_determinism(&build_machine(&r.partition, &wc)).is_empty());
        assert_eq!(brute_force_min_states(&g, &succ, true).unwrap(), 3);
        assert_eq!(brute_force_min_states(&g, &succ, false).unwrap(), 3);
        assert_eq!(solve_msndpfsa(&g, &SearchLimits::default()).unwrap().optimum, 3);
    }

    #[test]
    fn fixture_model_sizes() {
        let (_, g, succ) = fixture();
        let m = build_ip_model(&g, &succ, true);
        assert_eq!(m.family_size("x"), 16);
        assert_eq!(m.family_size("z"), 32);
        assert_eq!(m.family_size("y"), 32);
        assert_eq!(m.family_size("p"), 4);
        let nd = build_ip_model(&g, &succ, false);
        assert_eq!(nd.family_size("y"), 0);
        assert!(nd.constraints.iter().all(|c| !c.name.starts_with("link") && !c.name.starts_with("func")));
        let lp = m.to_lp();
        assert!(lp.starts_with("Minimize\n obj: p_0 + p_1 + p_2 + p_3\n"));
        assert!(lp.contains(" used_0: 4 p_0 - x_0_0 - x_1_0 - x_2_0 - x_3_0 >= 0\n"));
        assert!(lp.ends_with("End\n"));
    }

    #[test]
    fn single_history_model() {
        let g = CompatibilityGraph::unlabelled(1, &[]);
        let succ = SuccessorTable::from_rows(vec![vec![Some(0)]]);
        let m = build_ip_model(&g, &succ, true);
        assert!(m.evaluate(&m.values_for(&[0], &succ)));
        assert_eq!(m.objective_value(&m.values_for(&[0], &succ)), 1.0);
        assert_eq!(solve_msdpfsa(&g, &succ, &SearchLimits::default()).unwrap().optimum, 1);
    }

    #[test]
    fn edgeless_and_complete_graphs() {
        let n = 6;
        let rows = vec![vec![None]; n];
        let succ = SuccessorTable::from_rows(rows);
        let empty = CompatibilityGraph::unlabelled(n, &[]);
        assert_eq!(solve_msdpfsa(&empty, &succ, &SearchLimits::default()).unwrap().optimum, n);
        assert_eq!(brute_force_min_states(&empty, &succ, false).unwrap(), n);
        let all: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let full = CompatibilityGraph::unlabelled(n, &all);
        assert_eq!(solve_msndpfsa(&full, &SearchLimits::default()).unwrap().optimum, 1);
        let big = CompatibilityGraph::unlabelled(11, &[]);
        let succ11 = SuccessorTable::from_rows(vec![vec![None]; 11]);
        assert!(matches!(
            brute_force_min_states(&big, &succ11, true),
            Err(Error::TooLargeForOracle { n: 11, .. })
        ));
    }

    #[test]
    fn constant_sequence_is_one_state() {
        let seq = crate::sequence::SymbolSequence::parse(&"0".repeat(50), crate::sequence::TokenMode::Chars).unwrap();
        let wc = WindowCounts::new(&seq, 2).unwrap();
        let w = wc.strings();
        let cfg = TestConfig::new(DistributionTest::ChiSquared, 0.05).unwrap();
        let g = compatibility_graph(&w, &wc, &cfg).unwrap();
        let succ = SuccessorTable::new(&w, &wc);
        assert_eq!(solve_msdpfsa(&g, &succ, &SearchLimits::default()).unwrap().optimum, 1);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.random_range(1..=8);
            let k = rng.random_range(1..=3);
            let (g, succ) = random_instance(&mut rng, n, k);
            let d = solve_msdpfsa(&g, &succ, &SearchLimits::default()).unwrap();
            let nd = solve_msndpfsa(&g, &SearchLimits::default()).unwrap();
            assert_eq!(d.optimum, brute_force_min_states(&g, &succ, true).unwrap());
            assert_eq!(nd.optimum, brute_force_min_states(&g, &succ, false).unwrap());
            assert!(nd.optimum <= d.optimum);
            assert!(partition_ok(&g, &succ, true, d.partition.assignment()));
        }
    }

    #[test]
    fn returns_first_optimal_assignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.random_range(1..=7);
            let (g, succ) = random_instance(&mut rng, n, 2);
            let r = solve_msdpfsa(&g, &succ, &SearchLimits::default()).unwrap();
            let mut first: Option<Vec<usize>> = None;
            let mut labels = vec![0; n];
            each_partition(&mut labels, 0, 0, &mut |l, b| {
                if first.is_none() && b == r.optimum && partition_ok(&g, &succ, true, l) {
                    first = Some(l.to_vec());
                }
            });
            assert_eq!(first.unwrap(), r.partition.assignment());
        }
    }

    #[test]
    fn model_agrees_with_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..60 {
            let n = rng.random_range(1..=6);
            let k = rng.random_range(1..=2);
            let (g, succ) = random_instance(&mut rng, n, k);
            for deterministic in [true, false] {
                let m = build_ip_model(&g, &succ, deterministic);
                let mut best = f64::INFINITY;
                let mut labels = vec![0; n];
                each_partition(&mut labels, 0, 0, &mut |l, _| {
                    let v = m.values_for(l, &succ);
                    assert_eq!(m.evaluate(&v), partition_ok(&g, &succ, deterministic, l));
                    if m.evaluate(&v) {
                        best = best.min(m.objective_value(&v));
                    }
                });
                let r = if deterministic {
                    solve_msdpfsa(&g, &succ, &SearchLimits::default()).unwrap()
                } else {
                    solve_msndpfsa(&g, &SearchLimits::default()).unwrap()
                };
                assert_eq!(best, r.optimum as f64);
            }
        }
    }

    #[test]
    fn deadline_raises_timeout() {
        let n = 60;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| rng.random_bool(0.5))
            .collect();
        let g = CompatibilityGraph::unlabelled(n, &edges);
        let limits = SearchLimits { time_limit: Some(Duration::ZERO) };
        assert_eq!(solve_msndpfsa(&g, &limits).unwrap_err(), Error::Timeout);
    }
}
