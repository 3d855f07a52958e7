//! One entry point over the three inference routes.

use std::fmt;
use std::str::FromStr;

use crate::clique::clique_pipeline;
use crate::cssr::{cssr, CssrConfig};
use crate::error::Result;
use crate::exact::{solve_msdpfsa, SearchLimits};
use crate::machine::{build_machine, Pfsa, StatePartition};
use crate::sequence::{SuccessorTable, SymbolSequence, WindowCounts};
use crate::stats::compatibility_graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Cssr,
    Ip,
    Clique,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cssr, Method::Ip, Method::Clique];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cssr => "cssr",
            Method::Ip => "ip",
            Method::Clique => "clique",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cssr" => Ok(Method::Cssr),
            "ip" => Ok(Method::Ip),
            "clique" => Ok(Method::Clique),
            other => Err(format!("unknown method {other:?} (expected cssr, ip or clique)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub partition: StatePartition,
    pub machine: Pfsa,
}

/// Counts windows of `seq` and runs `method`.
pub fn infer(seq: &SymbolSequence, method: Method, cfg: &CssrConfig, limits: &SearchLimits) -> Result<Inference> {
    let wc = WindowCounts::new(seq, cfg.max_len)?;
    infer_counts(&wc, method, cfg, limits)
}

pub fn infer_counts(wc: &WindowCounts, method: Method, cfg: &CssrConfig, limits: &SearchLimits) -> Result<Inference> {
    let partition = match method {
        Method::Cssr => cssr(wc, cfg)?.partition,
        Method::Ip => {
            let w = wc.strings();
            let graph = compatibility_graph(&w, wc, &cfg.test)?;
            let succ = SuccessorTable::new(&w, wc);
            solve_msdpfsa(&graph, &succ, limits)?.partition
        }
        Method::Clique => clique_pipeline(wc, cfg)?.partition,
    };
    let machine = build_machine(&partition, wc);
    Ok(Inference { partition, machine })
}
