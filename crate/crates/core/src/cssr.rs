//! Causal-state splitting and reconstruction.

use crate::error::{Error, Result};
use crate::machine::{build_machine, Pfsa, StatePartition};
use crate::sequence::{History, SuccessorTable, Symbol, WindowCounts};
use crate::stats::TestConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CssrConfig {
    pub max_len: usize,
    pub test: TestConfig,
}

impl CssrConfig {
    pub fn new(max_len: usize, test: TestConfig) -> Result<Self> {
        if max_len < 1 {
            return Err(Error::InvalidHistoryLength { min: 1, got: max_len });
        }
        Ok(Self { max_len, test })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CssrOutput {
    /// States after splitting, over every history of length at most `max_len`.
    pub split: StatePartition,
    /// Deterministic partition of the length-`max_len` histories.
    pub partition: StatePartition,
    pub machine: Pfsa,
}

struct GrowingState {
    members: Vec<History>,
    pooled: Vec<u64>,
}

/// Grows histories from the empty one up to `cfg.max_len`, placing each in
/// the state whose pooled distribution gives it the largest p-value, or in a
/// new state when no p-value exceeds alpha.
///
/// Histories at each length are visited in order of first appearance.
/// Ties go to the lowest-indexed state.
pub fn cssr_split(wc: &WindowCounts, cfg: &CssrConfig) -> Result<StatePartition> {
    if wc.max_len() < cfg.max_len {
        return Err(Error::InvalidHistoryLength {
            min: cfg.max_len,
            got: wc.max_len(),
        });
    }
    let mut states = vec![GrowingState {
        members: vec![Vec::new()],
        pooled: wc.next_counts(&[]),
    }];
    for len in 1..=cfg.max_len {
        let candidates: Vec<(History, Vec<u64>)> = wc
            .windows(len)
            .map(|(h, _)| (h.clone(), wc.next_counts(h)))
            .filter(|(_, c)| c.iter().any(|&x| x > 0))
            .collect();
        for (h, counts) in candidates {
            let mut best: Option<(usize, f64)> = None;
            for (q, state) in states.iter().enumerate() {
                let p = cfg.test.pvalue(&counts, &state.pooled)?;
                if best.is_none_or(|(_, bp)| p > bp) {
                    best = Some((q, p));
                }
            }
            match best {
                Some((q, p)) if cfg.test.accepts(p) => {
                    let state = &mut states[q];
                    state.pooled.iter_mut().zip(&counts).for_each(|(s, c)| *s += c);
                    state.members.push(h);
                }
                _ => states.push(GrowingState {
                    members: vec![h],
                    pooled: counts,
                }),
            }
        }
    }
    let (histories, assign) = states
        .into_iter()
        .enumerate()
        .flat_map(|(q, s)| s.members.into_iter().map(move |h| (h, q)))
        .unzip();
    StatePartition::new(histories, assign)
}

/// Splits states of a partition over the length-`max_len` histories until
/// every observed transition is a function of (state, symbol).
pub fn cssr_reconstruct(part: &StatePartition, wc: &WindowCounts) -> StatePartition {
    let succ = SuccessorTable::new(part.histories(), wc);
    let mut current = part.clone();
    loop {
        let next = split_by_signature(&current, &succ);
        if next.num_states() == current.num_states() {
            return current;
        }
        current = next;
    }
}

/// One refinement pass: each state is split into groups whose members agree
/// on the successor state for every symbol both have observed.
pub(crate) fn split_by_signature(part: &StatePartition, succ: &SuccessorTable) -> StatePartition {
    let k = succ.alphabet_size();
    let mut assign = vec![0usize; part.histories().len()];
    let mut label = 0usize;
    for block in part.blocks() {
        let mut groups: Vec<(Vec<Option<usize>>, usize)> = Vec::new();
        for i in block {
            let sig: Vec<Option<usize>> = (0..k as Symbol)
                .map(|a| succ.get(i, a).map(|t| part.state_of(t)))
                .collect();
            let slot = groups.iter().position(|(merged, _)| compatible(merged, &sig));
            let id = match slot {
                Some(g) => {
                    let merged = &mut groups[g].0;
                    for (m, s) in merged.iter_mut().zip(&sig) {
                        if m.is_none() {
                            *m = *s;
                        }
                    }
                    groups[g].1
                }
                None => {
                    groups.push((sig, label));
                    label += 1;
                    label - 1
                }
            };
            assign[i] = id;
        }
    }
    StatePartition::new(part.histories().to_vec(), assign).expect("lengths match")
}

fn compatible(a: &[Option<usize>], b: &[Option<usize>]) -> bool {
    a.iter().zip(b).all(|(x, y)| match (x, y) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    })
}

/// Splitting, then reconstruction over the length-`max_len` histories that
/// have an observed continuation.
pub fn cssr(wc: &WindowCounts, cfg: &CssrConfig) -> Result<CssrOutput> {
    if wc.max_len() != cfg.max_len {
        return Err(Error::InvalidHistoryLength {
            min: cfg.max_len,
            got: wc.max_len(),
        });
    }
    let split = cssr_split(wc, cfg)?;
    let w = wc.strings();
    let state_of: std::collections::HashMap<&History, usize> = split
        .histories()
        .iter()
        .zip(split.assignment())
        .map(|(h, &s)| (h, s))
        .collect();
    let assign = w.iter().map(|h| state_of[h]).collect();
    let top = StatePartition::new(w.clone(), assign)?;
    let partition = cssr_reconstruct(&top, wc);
    let machine = build_machine(&partition, wc);
    Ok(CssrOutput {
        split,
        partition,
        machine,
    })
}
