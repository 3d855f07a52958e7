//! Distribution-equality tests and the compatibility graph they induce.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::sequence::{Alphabet, History, WindowCounts};

/// Pseudo-sample size both distributions are scaled to by [`chi2_pvalue`].
pub const CHI2_PSEUDO_COUNT: f64 = 100.0;

/// Above this `n_small * (n_a + n_b)` the KS p-value falls back to the
/// asymptotic Kolmogorov distribution.
const KS_EXACT_WORK_LIMIT: u64 = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistributionTest {
    /// Pearson goodness-of-fit of the observed distribution against the
    /// reference distribution, both scaled to [`CHI2_PSEUDO_COUNT`].
    #[default]
    ChiSquared,
    /// Pearson homogeneity test on the 2 x |A| table of raw counts.
    ChiSquaredCounts,
    /// Two-sample Kolmogorov-Smirnov over the ordered symbols.
    KolmogorovSmirnov,
}

impl DistributionTest {
    pub fn name(self) -> &'static str {
        match self {
            Self::ChiSquared => "chi2",
            Self::ChiSquaredCounts => "chi2-counts",
            Self::KolmogorovSmirnov => "ks",
        }
    }
}

impl std::str::FromStr for DistributionTest {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "chi2" => Ok(Self::ChiSquared),
            "chi2-counts" => Ok(Self::ChiSquaredCounts),
            "ks" => Ok(Self::KolmogorovSmirnov),
            other => Err(format!("unknown test {other:?} (expected chi2, chi2-counts or ks)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig {
    pub test: DistributionTest,
    pub alpha: f64,
}

impl TestConfig {
    pub fn new(test: DistributionTest, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self { test, alpha })
    }

    /// p-value for "`observed` was drawn from the same distribution as
    /// `reference`". Only [`DistributionTest::ChiSquared`] is asymmetric.
    pub fn pvalue(&self, observed: &[u64], reference: &[u64]) -> Result<f64> {
        match self.test {
            DistributionTest::ChiSquared => chi2_pvalue(observed, reference),
            DistributionTest::ChiSquaredCounts => chi2_homogeneity_pvalue(observed, reference),
            DistributionTest::KolmogorovSmirnov => ks_pvalue(observed, reference),
        }
    }

    /// Equality is accepted only when the p-value strictly exceeds alpha.
    pub fn accepts(&self, pvalue: f64) -> bool {
        pvalue > self.alpha
    }
}

fn totals(a: &[u64], b: &[u64]) -> Result<(u64, u64)> {
    if a.len() != b.len() {
        return Err(Error::DegenerateSample("samples have different alphabets"));
    }
    let (na, nb) = (a.iter().sum::<u64>(), b.iter().sum::<u64>());
    if na == 0 || nb == 0 {
        return Err(Error::DegenerateSample("sample with zero total"));
    }
    Ok((na, nb))
}

fn chi2_sf(stat: f64, df: usize) -> f64 {
    if df == 0 || stat <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df as f64)
        .expect("positive degrees of freedom")
        .sf(stat)
        .clamp(0.0, 1.0)
}

/// Pearson goodness-of-fit of `observed`'s empirical distribution against
/// `reference`'s, with both scaled to [`CHI2_PSEUDO_COUNT`] observations.
///
/// Symbols the reference never emits contribute nothing to the statistic.
/// Degrees of freedom are the number of symbols seen in either sample,
/// minus one.
pub fn chi2_pvalue(observed: &[u64], reference: &[u64]) -> Result<f64> {
    let (no, nr) = totals(observed, reference)?;
    let mut stat = 0.0;
    let mut categories = 0usize;
    for (&o, &r) in observed.iter().zip(reference) {
        if o + r == 0 {
            continue;
        }
        categories += 1;
        if r > 0 {
            let p = o as f64 / no as f64;
            let q = r as f64 / nr as f64;
            stat += CHI2_PSEUDO_COUNT * (p - q).powi(2) / q;
        }
    }
    Ok(chi2_sf(stat, categories.saturating_sub(1)))
}

/// Pearson chi-squared homogeneity test (no continuity correction) on the
/// 2 x k contingency table; all-zero columns are dropped.
pub fn chi2_homogeneity_pvalue(a: &[u64], b: &[u64]) -> Result<f64> {
    let (na, nb) = totals(a, b)?;
    let n = (na + nb) as f64;
    let mut stat = 0.0;
    let mut kept = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        kept += 1;
        let ea = na as f64 * col / n;
        let eb = nb as f64 * col / n;
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    Ok(chi2_sf(stat, kept.saturating_sub(1)))
}

/// Largest gap between the two cumulative proportions over the symbols in
/// ordinal order.
pub fn ks_statistic(a: &[u64], b: &[u64]) -> Result<f64> {
    let (na, nb) = totals(a, b)?;
    let (mut ca, mut cb, mut d) = (0u64, 0u64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        ca += x;
        cb += y;
        d = d.max((ca as f64 / na as f64 - cb as f64 / nb as f64).abs());
    }
    Ok(d)
}

/// Two-sample Kolmogorov-Smirnov p-value for categorical samples.
///
/// Small samples use the exact permutation null of D (the first sample's
/// category counts are multivariate hypergeometric given the pooled
/// margins). Larger ones use the asymptotic Kolmogorov distribution at
/// effective size `n_a n_b / (n_a + n_b)`.
pub fn ks_pvalue(a: &[u64], b: &[u64]) -> Result<f64> {
    let (na, nb) = totals(a, b)?;
    let d = ks_statistic(a, b)?;
    if d <= 1e-12 {
        return Ok(1.0);
    }
    if na.min(nb) * (na + nb) <= KS_EXACT_WORK_LIMIT {
        return Ok(ks_exact_pvalue(a, b, d));
    }
    let ne = (na * nb) as f64 / (na + nb) as f64;
    Ok(kolmogorov_sf(ne.sqrt() * d))
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_exact_pvalue(a: &[u64], b: &[u64], d_obs: f64) -> f64 {
    let (a, b) = if a.iter().sum::<u64>() <= b.iter().sum::<u64>() {
        (a, b)
    } else {
        (b, a)
    };
    let na = a.iter().sum::<u64>() as usize;
    let nb = b.iter().sum::<u64>() as usize;
    let n = na + nb;
    let mut ln_fact = vec![0.0f64; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let ln_choose = |n: usize, k: usize| ln_fact[n] - ln_fact[k] - ln_fact[n - k];

    let last = a.len() - 1;
    // dist[s]: probability that s first-sample items fell in the categories
    // seen so far without the gap reaching d_obs
    let mut dist = vec![0.0f64; na + 1];
    dist[0] = 1.0;
    let mut exceeded = 0.0;
    let mut placed = 0usize;
    for (k, (&x, &y)) in a.iter().zip(b).enumerate() {
        let t = (x + y) as usize;
        if t == 0 {
            continue;
        }
        let remaining = n - placed;
        let mut next = vec![0.0f64; na + 1];
        for (s, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let r = na - s;
            let lo = r.saturating_sub(remaining - t);
            let hi = t.min(r);
            let denom = ln_choose(remaining, r);
            for take in lo..=hi {
                let p = (ln_choose(t, take) + ln_choose(remaining - t, r - take) - denom).exp();
                next[s + take] += mass * p;
            }
        }
        placed += t;
        if k < last {
            for (s, mass) in next.iter_mut().enumerate() {
                if *mass == 0.0 {
                    continue;
                }
                let gap = (s as f64 / na as f64 - (placed - s) as f64 / nb as f64).abs();
                if gap >= d_obs - 1e-12 {
                    exceeded += *mass;
                    *mass = 0.0;
                }
            }
        }
        dist = next;
    }
    exceeded.clamp(0.0, 1.0)
}

/// Undirected graph on histories; an edge means the two next-symbol
/// distributions were not distinguishable at the configured level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityGraph {
    vertices: Vec<History>,
    adj: Vec<Vec<bool>>,
}

impl CompatibilityGraph {
    /// Graph with reflexive diagonal and the given undirected edges.
    pub fn from_edges(vertices: Vec<History>, edges: &[(usize, usize)]) -> Self {
        let n = vertices.len();
        let mut adj = vec![vec![false; n]; n];
        for (i, row) in adj.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(i, j) in edges {
            adj[i][j] = true;
            adj[j][i] = true;
        }
        Self { vertices, adj }
    }

    /// Unlabelled graph on `n` vertices; vertex `i` is labelled `[i]`.
    pub fn unlabelled(n: usize, edges: &[(usize, usize)]) -> Self {
        Self::from_edges((0..n).map(|i| vec![i]).collect(), edges)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[History] {
        &self.vertices
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i]
            .iter()
            .enumerate()
            .filter(move |&(j, &e)| e && j != i)
            .map(|(j, _)| j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors(i).count()
    }

    /// Edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| ((i + 1)..self.len()).filter(move |&j| self.adj[i][j]).map(move |j| (i, j)))
            .collect()
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(k, &i)| vertices[k + 1..].iter().all(|&j| self.adj[i][j]))
    }

    /// One `"u v"` line per edge, vertices named by their history text.
    pub fn to_edge_list(&self, alphabet: &Alphabet) -> String {
        let label = |i: usize| {
            let text = alphabet.format_history(&self.vertices[i]);
            if text.is_empty() {
                "λ".to_string()
            } else {
                text.replace(' ', "_")
            }
        };
        self.edges()
            .into_iter()
            .map(|(i, j)| format!("{} {}\n", label(i), label(j)))
            .collect()
    }
}

/// Pairwise p-values in vertex order. Entry `[l][i]` for `i < l` tests
/// history `l` (observed) against history `i` (reference); the matrix is
/// mirrored and its diagonal is 1.
pub fn pvalue_matrix(histories: &[History], wc: &WindowCounts, cfg: &TestConfig) -> Result<Vec<Vec<f64>>> {
    let counts: Vec<Vec<u64>> = histories
        .iter()
        .map(|h| {
            let c = wc.next_counts(h);
            if c.iter().all(|&x| x == 0) {
                Err(Error::UnobservedHistory(h.clone()))
            } else {
                Ok(c)
            }
        })
        .collect::<Result<_>>()?;
    let n = histories.len();
    let mut m = vec![vec![1.0; n]; n];
    for l in 0..n {
        for i in 0..l {
            let p = cfg.pvalue(&counts[l], &counts[i])?;
            m[l][i] = p;
            m[i][l] = p;
        }
    }
    Ok(m)
}

/// `mu_il = 1` iff the p-value for the pair exceeds alpha.
pub fn compatibility_graph(
    histories: &[History],
    wc: &WindowCounts,
    cfg: &TestConfig,
) -> Result<CompatibilityGraph> {
    let pvalues = pvalue_matrix(histories, wc, cfg)?;
    let mut edges = Vec::new();
    for (l, row) in pvalues.iter().enumerate() {
        for (i, &p) in row.iter().enumerate().take(l) {
            if cfg.accepts(p) {
                edges.push((i, l));
            }
        }
    }
    Ok(CompatibilityGraph::from_edges(histories.to_vec(), &edges))
}
