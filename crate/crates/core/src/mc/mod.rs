//! Monte Carlo sampling of extreme first passage times.
//!
//! Every replicate draws from its own ChaCha8 stream derived from
//! `(seed, replicate index)`, and estimates are aggregated in replicate
//! order, so results do not depend on the number of worker threads.

mod inverse;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::models::{ModelKind, SurvivalModel};

pub use inverse::{sample_fpt_inverse, sample_fpt_inverse_complement, InverseTable};

/// How single first passage times are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampler {
    /// Lévy sampler for `point1d`, otherwise `Inverse`, switching to
    /// `Tabulated` from `N = 10^6`.
    #[default]
    Auto,
    /// Exact Lévy construction `L^2 / (2 D Z^2)`; `point1d` only.
    Exact,
    /// Root finding on the survival function for every retained draw.
    Inverse,
    /// Interpolated inverse table with a Newton polish.
    Tabulated,
}

const TABLE_THRESHOLD: u64 = 1_000_000;

/// Parameters of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleConfig {
    /// Searchers per replicate.
    pub n: u64,
    /// Number of fastest times retained per replicate.
    pub k: u32,
    pub replicates: u64,
    pub seed: u64,
    /// Worker threads.
    pub workers: usize,
    pub sampler: Sampler,
}

impl SampleConfig {
    /// Single-worker configuration with the automatic sampler.
    pub fn new(n: u64, k: u32, replicates: u64, seed: u64) -> Self {
        Self { n, k, replicates, seed, workers: 1, sampler: Sampler::Auto }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }

    pub fn with_sampler(self, sampler: Sampler) -> Self {
        Self { sampler, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.k as u64 > self.n {
            return domain(format!("need 1 <= k <= N, got k = {}, N = {}", self.k, self.n));
        }
        if self.replicates < 1 {
            return domain("need at least one replicate");
        }
        if self.workers < 1 {
            return domain("need at least one worker");
        }
        Ok(())
    }
}

/// Mean and standard error of `T_{k,N}` over replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KEstimate {
    pub k: u32,
    pub mean: f64,
    pub std_error: f64,
}

/// Result of [`sample_extremes`]. `mean` and `std_error` refer to the
/// fastest time `T_{1,N}`; `per_k` lists `k = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub per_k: Vec<KEstimate>,
}

/// The random stream of replicate `index`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `L^2 / (2 D z^2)`, the hitting time produced by a standard normal draw `z`.
pub fn levy_from_normal(l: f64, d: f64, z: f64) -> f64 {
    l * l / (2.0 * d * z * z)
}

/// One hitting time of a point at distance `l` for diffusivity `d`.
pub fn sample_fpt_levy_1d<R: Rng + ?Sized>(l: f64, d: f64, rng: &mut R) -> Result<f64> {
    if !(l > 0.0 && d > 0.0) {
        return domain(format!("L and D must be positive, got L = {l}, D = {d}"));
    }
    Ok(levy_from_normal(l, d, rng.sample(StandardNormal)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// The `k` smallest values pushed so far, in O(k) memory.
struct Smallest {
    k: usize,
    heap: BinaryHeap<Key>,
}

impl Smallest {
    fn new(k: usize) -> Self {
        Self { k, heap: BinaryHeap::with_capacity(k + 1) }
    }

    #[inline]
    fn push(&mut self, x: f64) {
        if self.heap.len() < self.k {
            self.heap.push(Key(x));
        } else if let Some(mut top) = self.heap.peek_mut() {
            if x < top.0 {
                *top = Key(x);
            }
        }
    }

    fn into_sorted(self) -> Vec<f64> {
        self.heap.into_sorted_vec().into_iter().map(|k| k.0).collect()
    }
}

enum Draw {
    Levy { l: f64, d: f64 },
    Inverse,
    Table(Box<InverseTable>),
}

fn resolve(model: &SurvivalModel, cfg: &SampleConfig) -> Result<Draw> {
    let levy = match model.kind() {
        ModelKind::Point1d { l, d } => Some(Draw::Levy { l: *l, d: *d }),
        _ => None,
    };
    match cfg.sampler {
        Sampler::Exact => {
            levy.ok_or_else(|| Error::Domain("the exact sampler exists only for point1d".into()))
        }
        Sampler::Inverse => Ok(Draw::Inverse),
        Sampler::Tabulated => Ok(Draw::Table(Box::new(InverseTable::new(model)?))),
        Sampler::Auto => match levy {
            Some(draw) => Ok(draw),
            None if cfg.n >= TABLE_THRESHOLD => Ok(Draw::Table(Box::new(InverseTable::new(model)?))),
            None => Ok(Draw::Inverse),
        },
    }
}

/// The `k` fastest of `n` times for one replicate, ascending.
fn one_replicate(model: &SurvivalModel, draw: &Draw, n: u64, k: u32, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let mut keep = Smallest::new(k as usize);
    match draw {
        Draw::Levy { l, d } => {
            for _ in 0..n {
                keep.push(levy_from_normal(*l, *d, rng.sample(StandardNormal)));
            }
            Ok(keep.into_sorted())
        }
        Draw::Inverse | Draw::Table(_) => {
            // the fastest times come from the smallest 1 - u
            for _ in 0..n {
                keep.push(rng.sample(Open01));
            }
            keep.into_sorted()
                .into_iter()
                .map(|v| match draw {
                    Draw::Table(table) => table.sample_complement(v),
                    _ => sample_fpt_inverse_complement(model, v),
                })
                .collect()
        }
    }
}

/// The `k` fastest times of every replicate, ascending within each replicate,
/// in replicate order.
pub fn sample_replicates(model: &SurvivalModel, cfg: &SampleConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let draw = resolve(model, cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Validation(format!("could not start worker pool: {e}")))?;
    pool.install(|| {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|i| {
                let mut rng = replicate_rng(cfg.seed, i);
                one_replicate(model, &draw, cfg.n, cfg.k, &mut rng)
            })
            .collect()
    })
}

/// Compensated running sum.
#[derive(Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Per-`k` means and standard errors of the fastest times.
pub fn summarize(samples: &[Vec<f64>], k: u32) -> McEstimate {
    let r = samples.len() as f64;
    let per_k: Vec<KEstimate> = (0..k as usize)
        .map(|j| {
            let mut total = Kahan::default();
            for s in samples {
                total.add(s[j]);
            }
            let mean = total.sum / r;
            let mut sq = Kahan::default();
            for s in samples {
                sq.add((s[j] - mean).powi(2));
            }
            let std_error = if samples.len() > 1 { (sq.sum / (r - 1.0) / r).sqrt() } else { 0.0 };
            KEstimate { k: j as u32 + 1, mean, std_error }
        })
        .collect();
    McEstimate { mean: per_k[0].mean, std_error: per_k[0].std_error, per_k }
}

/// Draws `replicates` independent sets of `N` first passage times and
/// estimates `E[T_{k,N}]` for `k = 1..=K`.
pub fn sample_extremes(model: &SurvivalModel, cfg: &SampleConfig) -> Result<McEstimate> {
    let samples = sample_replicates(model, cfg)?;
    Ok(summarize(&samples, cfg.k))
}
