//! The inferred model: a partition of histories into states and the
//! probabilistic transition relation it induces.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::{successor, Alphabet, History, Symbol, SymbolSequence, WindowCounts};

/// Assignment of histories to states, with states numbered `0..num_states`
/// in order of their first member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StatePartition {
    histories: Vec<History>,
    assign: Vec<usize>,
    num_states: usize,
}

impl StatePartition {
    /// Renumbers `assign` canonically; labels may be arbitrary.
    pub fn new(histories: Vec<History>, assign: Vec<usize>) -> Result<Self> {
        if histories.len() != assign.len() {
            return Err(Error::InvalidPartition(format!(
                "{} histories but {} assignments",
                histories.len(),
                assign.len()
            )));
        }
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        let assign: Vec<usize> = assign
            .into_iter()
            .map(|label| {
                let next = relabel.len();
                *relabel.entry(label).or_insert(next)
            })
            .collect();
        Ok(Self {
            histories,
            num_states: relabel.len(),
            assign,
        })
    }

    /// Builds a partition from blocks of indices into `histories`.
    pub fn from_blocks(histories: Vec<History>, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut assign = vec![usize::MAX; histories.len()];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                if i >= histories.len() || assign[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("index {i} missing or repeated")));
                }
                assign[i] = b;
            }
        }
        if assign.contains(&usize::MAX) {
            return Err(Error::InvalidPartition("blocks do not cover every history".into()));
        }
        Self::new(histories, assign)
    }

    /// Every history in its own state.
    pub fn singletons(histories: Vec<History>) -> Self {
        let assign = (0..histories.len()).collect();
        Self::new(histories, assign).expect("lengths match")
    }

    pub fn histories(&self) -> &[History] {
        &self.histories
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    pub fn state_of(&self, i: usize) -> usize {
        self.assign[i]
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Member indices of each state.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_states];
        for (i, &s) in self.assign.iter().enumerate() {
            blocks[s].push(i);
        }
        blocks
    }

    /// Member histories of each state.
    pub fn state_histories(&self) -> Vec<Vec<History>> {
        self.blocks()
            .into_iter()
            .map(|b| b.into_iter().map(|i| self.histories[i].clone()).collect())
            .collect()
    }

    /// The sub-partition over histories of exactly `len` symbols.
    pub fn restrict_to_len(&self, len: usize) -> Self {
        let (histories, assign) = self
            .histories
            .iter()
            .zip(&self.assign)
            .filter(|(h, _)| h.len() == len)
            .map(|(h, &s)| (h.clone(), s))
            .unzip();
        Self::new(histories, assign).expect("lengths match")
    }

    /// Blocks as sets of histories, sorted, for order-independent comparison.
    pub fn canonical_blocks(&self) -> Vec<Vec<History>> {
        let mut blocks = self.state_histories();
        blocks.iter_mut().for_each(|b| b.sort());
        blocks.sort();
        blocks
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub from: usize,
    pub symbol: Symbol,
    pub to: usize,
    pub prob: f64,
}

/// `G = <Q, A, delta, p>`.
///
/// States are ordered by their smallest history. Transitions are sorted by
/// `(from, symbol, to)`; only transitions with positive probability exist.
#[derive(Debug, Clone, PartialEq)]
pub struct Pfsa {
    alphabet: Alphabet,
    states: Vec<Vec<History>>,
    transitions: Vec<Transition>,
    start: usize,
}

/// An observed transition whose target history is in no state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DanglingTransition {
    pub history: History,
    pub symbol: Symbol,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminismViolation {
    pub state: usize,
    pub symbol: Symbol,
    pub targets: Vec<usize>,
}

impl Pfsa {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<Vec<History>>,
        mut transitions: Vec<Transition>,
        start: usize,
    ) -> Result<Self> {
        let n = states.len();
        for t in &transitions {
            if t.from >= n || t.to >= n || t.symbol >= alphabet.len() {
                return Err(Error::InvalidMachine(format!("transition {t:?} out of range")));
            }
            if !(t.prob > 0.0 && t.prob <= 1.0 + 1e-9) {
                return Err(Error::InvalidMachine(format!("bad probability in {t:?}")));
            }
        }
        if n > 0 && start >= n {
            return Err(Error::InvalidMachine(format!("start state {start} out of range")));
        }
        transitions.sort_by_key(|t| (t.from, t.symbol, t.to));
        let m = Self {
            alphabet,
            states,
            transitions,
            start,
        };
        for q in 0..n {
            let mass: f64 = m.outgoing(q).map(|t| t.prob).sum();
            if mass > 0.0 && (mass - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidMachine(format!("state {q} has outgoing mass {mass}")));
            }
        }
        Ok(m)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<History>] {
        &self.states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn outgoing(&self, q: usize) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.from == q)
    }

    /// `delta(q, a)`: every target state.
    pub fn delta(&self, q: usize, a: Symbol) -> Vec<usize> {
        self.outgoing(q).filter(|t| t.symbol == a).map(|t| t.to).collect()
    }

    /// Probability of emitting `a` from `q`, summed over targets.
    pub fn emission(&self, q: usize, a: Symbol) -> f64 {
        self.outgoing(q).filter(|t| t.symbol == a).map(|t| t.prob).sum()
    }

    /// Per-state emission vector over the alphabet.
    pub fn emission_row(&self, q: usize) -> Vec<f64> {
        (0..self.alphabet.len()).map(|a| self.emission(q, a)).collect()
    }

    /// The state containing history `h`.
    pub fn state_containing(&self, h: &[Symbol]) -> Option<usize> {
        self.states.iter().position(|s| s.iter().any(|x| x == h))
    }

    pub fn is_deterministic(&self) -> bool {
        check_determinism(self).is_empty()
    }

    pub fn to_json(&self) -> String {
        let doc = JsonMachine {
            alphabet: self.alphabet.symbols().to_vec(),
            states: self
                .states
                .iter()
                .enumerate()
                .map(|(id, hs)| JsonState {
                    id,
                    histories: hs.iter().map(|h| self.alphabet.format_history(h)).collect(),
                })
                .collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| JsonTransition {
                    from: t.from,
                    symbol: self.alphabet.symbol(t.symbol).to_string(),
                    to: t.to,
                    prob: t.prob,
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
        text.push('\n');
        text
    }

    /// Parses the JSON export. The start state is not part of the format; it
    /// is re-derived with [`default_start_by_mass`].
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: JsonMachine =
            serde_json::from_str(text).map_err(|e| Error::InvalidMachine(e.to_string()))?;
        let alphabet = Alphabet::new(doc.alphabet)?;
        let mut states = vec![Vec::new(); doc.states.len()];
        for s in doc.states {
            let slot = states
                .get_mut(s.id)
                .ok_or_else(|| Error::InvalidMachine(format!("state id {} out of range", s.id)))?;
            *slot = s
                .histories
                .iter()
                .map(|h| alphabet.parse_history(h))
                .collect::<Result<_>>()?;
        }
        let transitions = doc
            .transitions
            .into_iter()
            .map(|t| {
                let symbol = alphabet
                    .index_of(&t.symbol)
                    .ok_or_else(|| Error::UnknownSymbol(t.symbol.clone()))?;
                Ok(Transition {
                    from: t.from,
                    symbol,
                    to: t.to,
                    prob: t.prob,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut m = Self::new(alphabet, states, transitions, 0)?;
        m.start = default_start_by_mass(&m);
        Ok(m)
    }

    /// Graphviz rendering; nodes `q1..qN`, edges labelled `symbol/prob`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph pfsa {\n  rankdir=LR;\n");
        for (id, hs) in self.states.iter().enumerate() {
            let members: Vec<String> = hs.iter().map(|h| self.alphabet.format_history(h)).collect();
            let _ = writeln!(
                out,
                "  q{0} [label=\"q{0}\", tooltip=\"{{{1}}}\"];",
                id + 1,
                members.join(",")
            );
        }
        for t in &self.transitions {
            let _ = writeln!(
                out,
                "  q{} -> q{} [label=\"{}/{:.4}\"];",
                t.from + 1,
                t.to + 1,
                self.alphabet.symbol(t.symbol),
                t.prob
            );
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct JsonMachine {
    alphabet: Vec<String>,
    states: Vec<JsonState>,
    transitions: Vec<JsonTransition>,
}

#[derive(Serialize, Deserialize)]
struct JsonState {
    id: usize,
    histories: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonTransition {
    from: usize,
    symbol: String,
    to: usize,
    prob: f64,
}

/// Builds the machine induced by `part`, dropping dangling transitions.
pub fn build_machine(part: &StatePartition, wc: &WindowCounts) -> Pfsa {
    build_machine_with_report(part, wc).0
}

/// As [`build_machine`], also returning the observed transitions whose
/// successor history is not covered by the partition. Their counts are
/// excluded, so each state's distribution is renormalized over the
/// remaining transitions.
pub fn build_machine_with_report(
    part: &StatePartition,
    wc: &WindowCounts,
) -> (Pfsa, Vec<DanglingTransition>) {
    let mut blocks = part.state_histories();
    blocks.iter_mut().for_each(|b| b.sort());
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by(|&x, &y| blocks[x].first().cmp(&blocks[y].first()));
    let states: Vec<Vec<History>> = order.iter().map(|&b| blocks[b].clone()).collect();

    let state_of: HashMap<&[Symbol], usize> = states
        .iter()
        .enumerate()
        .flat_map(|(q, hs)| hs.iter().map(move |h| (h.as_slice(), q)))
        .collect();

    let mut dangling = Vec::new();
    let mut transitions = Vec::new();
    for (q, hs) in states.iter().enumerate() {
        let mut edges: BTreeMap<(Symbol, usize), u64> = BTreeMap::new();
        for h in hs {
            for (a, c) in wc.next_counts(h).into_iter().enumerate() {
                if c == 0 {
                    continue;
                }
                match state_of.get(successor(h, a).as_slice()) {
                    Some(&to) => *edges.entry((a, to)).or_insert(0) += c,
                    None => dangling.push(DanglingTransition {
                        history: h.clone(),
                        symbol: a,
                        count: c,
                    }),
                }
            }
        }
        let total: u64 = edges.values().sum();
        transitions.extend(edges.into_iter().map(|((symbol, to), c)| Transition {
            from: q,
            symbol,
            to,
            prob: c as f64 / total as f64,
        }));
    }

    let start = default_start_by_counts(&states, wc);
    let m = Pfsa::new(wc.alphabet().clone(), states, transitions, start).expect("consistent by construction");
    (m, dangling)
}

/// State holding the history made of the most frequent symbol repeated;
/// state 0 when no state holds it.
fn default_start_by_counts(states: &[Vec<History>], wc: &WindowCounts) -> usize {
    let freq = wc.next_counts(&[]);
    let top = (0..freq.len()).max_by_key(|&a| (freq[a], std::cmp::Reverse(a))).unwrap_or(0);
    repeated_symbol_state(states, top).unwrap_or(0)
}

/// Start state for a machine without its data: the symbol with the largest
/// total emission mass stands in for the most frequent one.
pub fn default_start_by_mass(m: &Pfsa) -> usize {
    let k = m.alphabet.len();
    let mass: Vec<f64> = (0..k)
        .map(|a| (0..m.num_states()).map(|q| m.emission(q, a)).sum())
        .collect();
    let top = (0..k)
        .max_by(|&x, &y| mass[x].total_cmp(&mass[y]).then(y.cmp(&x)))
        .unwrap_or(0);
    repeated_symbol_state(&m.states, top).unwrap_or(0)
}

fn repeated_symbol_state(states: &[Vec<History>], a: Symbol) -> Option<usize> {
    let len = states.iter().flatten().map(Vec::len).max()?;
    let target = vec![a; len];
    states.iter().position(|s| s.contains(&target))
}

/// Every `(state, symbol)` with more than one target.
pub fn check_determinism(m: &Pfsa) -> Vec<DeterminismViolation> {
    let mut by_key: BTreeMap<(usize, Symbol), Vec<usize>> = BTreeMap::new();
    for t in m.transitions() {
        by_key.entry((t.from, t.symbol)).or_default().push(t.to);
    }
    by_key
        .into_iter()
        .filter(|(_, targets)| targets.len() > 1)
        .map(|((state, symbol), targets)| DeterminismViolation { state, symbol, targets })
        .collect()
}

/// Draws `n` symbols by walking the transition relation from the machine's
/// start state.
pub fn sample(m: &Pfsa, n: usize, seed: u64) -> Result<SymbolSequence> {
    sample_from(m, n, seed, m.start())
}

pub fn sample_from(m: &Pfsa, n: usize, seed: u64, start: usize) -> Result<SymbolSequence> {
    if start >= m.num_states() {
        return Err(Error::InvalidMachine(format!("start state {start} out of range")));
    }
    let outgoing: Vec<Vec<&Transition>> = (0..m.num_states()).map(|q| m.outgoing(q).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tokens = Vec::with_capacity(n);
    let mut q = start;
    for _ in 0..n {
        let out = &outgoing[q];
        let last = out.last().ok_or(Error::DeadEnd(q))?;
        let mut u: f64 = rng.random();
        let mut pick = *last;
        for t in out {
            if u < t.prob {
                pick = t;
                break;
            }
            u -= t.prob;
        }
        tokens.push(pick.symbol);
        q = pick.to;
    }
    SymbolSequence::new(tokens, m.alphabet().clone())
}
