//! Maximal cliques, minimum clique covers and determinizing reconstruction
//! of the covers.

use fixedbitset::FixedBitSet;

use crate::cssr::{cssr, split_by_signature, CssrConfig};
use crate::error::{Error, Result};
use crate::machine::{build_machine, Pfsa, StatePartition};
use crate::sequence::{SuccessorTable, WindowCounts};
use crate::stats::{compatibility_graph, CompatibilityGraph};

pub const DEFAULT_COVER_CAP: usize = 10_000;

fn adjacency(graph: &CompatibilityGraph) -> Vec<FixedBitSet> {
    let n = graph.len();
    (0..n)
        .map(|i| {
            let mut b = FixedBitSet::with_capacity(n);
            graph.neighbors(i).for_each(|j| b.insert(j));
            b
        })
        .collect()
}

/// Every maximal clique, vertices ascending, cliques in lexicographic order.
pub fn bron_kerbosch(graph: &CompatibilityGraph) -> Vec<Vec<usize>> {
    let n = graph.len();
    let adj = adjacency(graph);
    let mut out = Vec::new();
    let mut p = FixedBitSet::with_capacity(n);
    p.insert_range(..);
    expand(&adj, &mut Vec::new(), p, FixedBitSet::with_capacity(n), &mut out);
    out.sort();
    out
}

fn expand(
    adj: &[FixedBitSet],
    r: &mut Vec<usize>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_clear() {
        if x.is_clear() {
            let mut clique = r.clone();
            clique.sort_unstable();
            out.push(clique);
        }
        return;
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| (p.intersection(&adj[u]).count(), std::cmp::Reverse(u)))
        .expect("p is non-empty");
    let mut candidates = p.clone();
    candidates.difference_with(&adj[pivot]);
    for v in candidates.ones() {
        let mut np = p.clone();
        np.intersect_with(&adj[v]);
        let mut nx = x.clone();
        nx.intersect_with(&adj[v]);
        r.push(v);
        expand(adj, r, np, nx, out);
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueCover {
    /// Indices into the clique list, ascending.
    pub selected: Vec<usize>,
    /// For each vertex, the position in `selected` of the first clique
    /// holding it.
    pub assignment: Vec<usize>,
}

impl CliqueCover {
    pub fn size(&self) -> usize {
        self.selected.len()
    }
}

/// Fewest cliques from `cliques` whose union is every vertex, searched with
/// at most `k_upper` cliques first and without a limit if that fails.
pub fn min_clique_cover(graph: &CompatibilityGraph, cliques: &[Vec<usize>], k_upper: usize) -> Result<CliqueCover> {
    let n = graph.len();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, clique) in cliques.iter().enumerate() {
        for &v in clique {
            holders[v].push(c);
        }
    }
    if let Some(v) = holders.iter().position(Vec::is_empty) {
        return Err(Error::InvalidPartition(format!("vertex {v} lies in no clique")));
    }
    let adj = adjacency(graph);
    let sets: Vec<FixedBitSet> = cliques
        .iter()
        .map(|c| {
            let mut b = FixedBitSet::with_capacity(n);
            c.iter().for_each(|&v| b.insert(v));
            b
        })
        .collect();
    let mut search = CoverSearch {
        adj: &adj,
        holders: &holders,
        sets: &sets,
        chosen: Vec::new(),
        best: None,
        limit: k_upper.max(1).min(n.max(1)) + 1,
    };
    search.run(FixedBitSet::with_capacity(n));
    if search.best.is_none() {
        search.limit = n + 1;
        search.run(FixedBitSet::with_capacity(n));
    }
    let mut selected = search.best.expect("singleton-holding cliques always cover");
    selected.sort_unstable();
    let assignment = (0..n)
        .map(|v| selected.iter().position(|&c| sets[c].contains(v)).unwrap())
        .collect();
    Ok(CliqueCover { selected, assignment })
}

struct CoverSearch<'a> {
    adj: &'a [FixedBitSet],
    holders: &'a [Vec<usize>],
    sets: &'a [FixedBitSet],
    chosen: Vec<usize>,
    best: Option<Vec<usize>>,
    /// Only covers with fewer cliques than this are accepted.
    limit: usize,
}

impl CoverSearch<'_> {
    fn run(&mut self, covered: FixedBitSet) {
        let n = self.holders.len();
        if n == 0 {
            self.best = Some(Vec::new());
            return;
        }
        self.dfs(covered);
    }

    fn dfs(&mut self, covered: FixedBitSet) {
        let n = self.holders.len();
        let uncovered: Vec<usize> = (0..n).filter(|&v| !covered.contains(v)).collect();
        if uncovered.is_empty() {
            self.limit = self.chosen.len();
            self.best = Some(self.chosen.clone());
            return;
        }
        let mut independent: Vec<usize> = Vec::new();
        for &v in &uncovered {
            if independent.iter().all(|&w| !self.adj[v].contains(w)) {
                independent.push(v);
            }
        }
        if self.chosen.len() + independent.len() >= self.limit {
            return;
        }
        let v = *uncovered
            .iter()
            .min_by_key(|&&v| (self.holders[v].len(), v))
            .unwrap();
        for &c in &self.holders[v] {
            let mut next = covered.clone();
            next.union_with(&self.sets[c]);
            self.chosen.push(c);
            self.dfs(next);
            self.chosen.pop();
        }
    }
}

/// Every partition of the vertices into exactly `optimum` cliques, each as a
/// list of blocks ordered by smallest member.
pub fn enumerate_exact_covers(graph: &CompatibilityGraph, optimum: usize, cap: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    let n = graph.len();
    let adj = adjacency(graph);
    let mut e = CoverEnum {
        adj: &adj,
        optimum,
        cap,
        blocks: Vec::new(),
        out: Vec::new(),
        overflow: false,
    };
    e.dfs(0, n);
    if e.overflow {
        return Err(Error::CoverOverflow { cap });
    }
    Ok(e.out)
}

struct CoverEnum<'a> {
    adj: &'a [FixedBitSet],
    optimum: usize,
    cap: usize,
    blocks: Vec<FixedBitSet>,
    out: Vec<Vec<Vec<usize>>>,
    overflow: bool,
}

impl CoverEnum<'_> {
    fn dfs(&mut self, v: usize, n: usize) {
        if self.overflow {
            return;
        }
        if v == n {
            if self.blocks.len() == self.optimum {
                if self.out.len() == self.cap {
                    self.overflow = true;
                    return;
                }
                self.out.push(self.blocks.iter().map(|b| b.ones().collect()).collect());
            }
            return;
        }
        let mut lonely: Vec<usize> = Vec::new();
        for u in v..n {
            let fits = self.blocks.iter().any(|b| b.is_subset(&self.adj[u]));
            if !fits && lonely.iter().all(|&w| !self.adj[u].contains(w)) {
                lonely.push(u);
            }
        }
        if self.blocks.len() + lonely.len() > self.optimum {
            return;
        }
        for b in 0..self.blocks.len() {
            if self.blocks[b].is_subset(&self.adj[v]) {
                self.blocks[b].insert(v);
                self.dfs(v + 1, n);
                self.blocks[b].set(v, false);
            }
        }
        if self.blocks.len() < self.optimum {
            let mut fresh = FixedBitSet::with_capacity(n);
            fresh.insert(v);
            self.blocks.push(fresh);
            self.dfs(v + 1, n);
            self.blocks.pop();
        }
    }
}

/// Splits the blocks of `cover` by successor-block signature until every
/// observed transition out of a block agrees on its target block. Blocks are
/// only ever split.
pub fn reconstruct_deterministic(cover: &StatePartition, succ: &SuccessorTable) -> StatePartition {
    let mut current = cover.clone();
    loop {
        let next = split_by_signature(&current, succ);
        if next.num_states() == current.num_states() {
            return current;
        }
        current = next;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    /// State count from CSSR, the upper bound handed to the cover search.
    pub k_upper: usize,
    pub graph: CompatibilityGraph,
    pub cliques: Vec<Vec<usize>>,
    pub cover: CliqueCover,
    pub exact_covers: usize,
    pub partition: StatePartition,
    pub machine: Pfsa,
}

/// CSSR bound, maximal cliques, minimum cover, and the best reconstruction
/// over every exact cover of that size. Ties go to the lexicographically
/// least assignment.
pub fn clique_pipeline(wc: &WindowCounts, cfg: &CssrConfig) -> Result<PipelineOutput> {
    let k_upper = cssr(wc, cfg)?.machine.num_states();
    let w = wc.strings();
    let graph = compatibility_graph(&w, wc, &cfg.test)?;
    let succ = SuccessorTable::new(&w, wc);
    let cliques = bron_kerbosch(&graph);
    let cover = min_clique_cover(&graph, &cliques, k_upper)?;
    let covers = enumerate_exact_covers(&graph, cover.size(), DEFAULT_COVER_CAP)?;
    let mut best: Option<StatePartition> = None;
    for blocks in &covers {
        let start = StatePartition::from_blocks(w.clone(), blocks)?;
        let part = reconstruct_deterministic(&start, &succ);
        let better = match &best {
            None => true,
            Some(b) => (part.num_states(), part.assignment()) < (b.num_states(), b.assignment()),
        };
        if better {
            best = Some(part);
        }
    }
    let partition = best.expect("at least one exact cover of minimum size");
    let machine = build_machine(&partition, wc);
    Ok(PipelineOutput {
        k_upper,
        exact_covers: covers.len(),
        graph,
        cliques,
        cover,
        partition,
        machine,
    })
}
