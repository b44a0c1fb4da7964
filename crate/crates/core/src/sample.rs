//! Negative edge sampling and edge-set splitting.
//!
//! All randomness comes from seeded ChaCha20 streams, so a fixed seed
//! gives byte-identical results on every platform. The generator
//! identity ("chacha20") is recorded in run metadata.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::graph::{EdgeList, Graph};

/// Name of the PRNG algorithm behind every seeded decision in this crate.
pub const PRNG_NAME: &str = "chacha20";

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("requested {requested} negative edges but only {available} eligible non-edges exist")]
    InfeasibleCount { requested: usize, available: usize },
    #[error("rejection sampling gave up after {attempts} attempts; graph is near-complete, retry with exhaustive mode")]
    Exhausted { attempts: usize },
    #[error("invalid sampler config: {0}")]
    InvalidConfig(String),
}

/// How many non-edges to draw and from which random stream.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    /// Requested count as a fraction of the graph's edge count. The
    /// working default is one third; treat it as a per-dataset knob.
    pub negative_ratio: f64,
    pub seed: u64,
    /// Rejection sampling gives up after `max_attempts_factor * k` draws.
    pub max_attempts_factor: usize,
}

impl SamplerConfig {
    pub fn new(seed: u64) -> Self {
        SamplerConfig {
            negative_ratio: 1.0 / 3.0,
            seed,
            max_attempts_factor: 100,
        }
    }

    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.negative_ratio = ratio;
        self
    }
}

/// Sample `round(negative_ratio * |E|)` node pairs absent from the graph.
///
/// Output pairs are unique, canonical, disjoint from both the graph's
/// edges and `forbidden`, and drawn uniformly from the eligible
/// non-edges. Identical `(graph, config, forbidden)` produce identical
/// output.
pub fn sample_negatives(
    g: &Graph,
    cfg: &SamplerConfig,
    forbidden: &EdgeList,
) -> Result<EdgeList, SampleError> {
    if !cfg.negative_ratio.is_finite() || cfg.negative_ratio <= 0.0 {
        return Err(SampleError::InvalidConfig(format!(
            "negative_ratio {} must be a positive real",
            cfg.negative_ratio
        )));
    }
    let k = (cfg.negative_ratio * g.num_edges() as f64).round() as usize;
    sample_negatives_count(g, k, cfg.seed, cfg.max_attempts_factor, forbidden)
}

/// Exact-count variant; validation and test negatives are sized 1:1 with
/// their positive splits rather than through a ratio.
pub fn sample_negatives_count(
    g: &Graph,
    k: usize,
    seed: u64,
    max_attempts_factor: usize,
    forbidden: &EdgeList,
) -> Result<EdgeList, SampleError> {
    let n = g.num_nodes();
    let total_pairs = n * n.saturating_sub(1) / 2;
    let forbidden_outside_e = forbidden
        .iter()
        .filter(|&(u, v)| v < n && !g.has_edge(u, v).unwrap_or(false))
        .count();
    let eligible = total_pairs - g.num_edges() - forbidden_outside_e;
    if k == 0 {
        return Err(SampleError::InvalidConfig(
            "requested negative count rounds to zero".into(),
        ));
    }
    if k > eligible {
        return Err(SampleError::InfeasibleCount {
            requested: k,
            available: eligible,
        });
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    if 2 * k > eligible {
        return Ok(sample_exhaustive(g, k, forbidden, &mut rng));
    }

    let mut chosen = Vec::with_capacity(k);
    let mut seen = std::collections::HashSet::with_capacity(2 * k);
    let max_attempts = max_attempts_factor.saturating_mul(k);
    let mut attempts = 0;
    while chosen.len() < k {
        if attempts >= max_attempts {
            return Err(SampleError::Exhausted { attempts });
        }
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if g.has_edge(pair.0, pair.1).unwrap()
            || forbidden.contains(pair.0, pair.1)
            || !seen.insert(pair)
        {
            continue;
        }
        chosen.push(pair);
    }
    chosen.sort_unstable();
    Ok(chosen.into_iter().collect())
}

/// Dense fallback: enumerate every eligible pair once and take a seeded
/// partial shuffle. Used when the rejection loop would mostly collide.
fn sample_exhaustive(g: &Graph, k: usize, forbidden: &EdgeList, rng: &mut ChaCha20Rng) -> EdgeList {
    let n = g.num_nodes();
    let mut pool = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if !g.has_edge(u, v).unwrap() && !forbidden.contains(u, v) {
                pool.push((u, v));
            }
        }
    }
    partial_shuffle(&mut pool, k, rng);
    let mut chosen: Vec<_> = pool[..k].to_vec();
    chosen.sort_unstable();
    chosen.into_iter().collect()
}

/// Fisher-Yates over the first `k` slots only.
fn partial_shuffle<T>(items: &mut [T], k: usize, rng: &mut ChaCha20Rng) {
    let len = items.len();
    for i in 0..k.min(len.saturating_sub(1)) {
        let j = rng.gen_range(i..len);
        items.swap(i, j);
    }
}

/// Partition a canonical edge list into train/validation/test by a
/// seeded shuffle. Fractions must be positive-or-zero and sum to 1.
pub fn split_edges(
    edges: &EdgeList,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<(EdgeList, EdgeList, EdgeList), SampleError> {
    let (ft, fv, fs) = fractions;
    if ft < 0.0 || fv < 0.0 || fs < 0.0 || (ft + fv + fs - 1.0).abs() > 1e-9 {
        return Err(SampleError::InvalidConfig(format!(
            "split fractions ({ft}, {fv}, {fs}) must be non-negative and sum to 1"
        )));
    }
    let m = edges.len();
    let n_valid = (fv * m as f64).round() as usize;
    let n_test = (fs * m as f64).round() as usize;
    if n_valid + n_test > m {
        return Err(SampleError::InvalidConfig(
            "validation and test fractions leave no train edges".into(),
        ));
    }
    let mut pool: Vec<_> = edges.iter().collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    partial_shuffle(&mut pool, m, &mut rng);
    let mut valid: Vec<_> = pool[..n_valid].to_vec();
    let mut test: Vec<_> = pool[n_valid..n_valid + n_test].to_vec();
    let mut train: Vec<_> = pool[n_valid + n_test..].to_vec();
    valid.sort_unstable();
    test.sort_unstable();
    train.sort_unstable();
    Ok((
        train.into_iter().collect(),
        valid.into_iter().collect(),
        test.into_iter().collect(),
    ))
}
