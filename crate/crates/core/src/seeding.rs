//! Randomized center initialization.
//!
//! * [`kmeanspp_seed`]: D² sampling, one center at a time, with probability
//!   proportional to `w(x) · D(x)²`.
//! * [`kmeans_sharp`]: oversampled variant that draws a batch of
//!   `max(1, ⌈3·log₂ k⌉)` points per round for `k` rounds.
//! * [`best_of`]: runs a seeding procedure several times on independent
//!   sub-seeds and keeps the cheapest result.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ClusterError, Result};
use crate::geometry::{sq_dist, CenterSet, Dataset};
use crate::potential::hard_cost;

/// Deterministic random source: the same seed always replays the same draws.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Draws a fresh seed for an independent child generator.
    pub fn next_seed(&mut self) -> u64 {
        self.inner.random()
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random()
    }

    pub fn inner_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.inner
    }
}

/// One sampled selection: the chosen point, its sampling mass and the total
/// mass it was drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedStep {
    pub index: usize,
    pub point_mass: f64,
    pub total_mass: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeedingTrace {
    pub steps: Vec<SeedStep>,
}

impl SeedingTrace {
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|s| s.index)
    }
}

/// Output of a seeding procedure.
///
/// `degenerate` is set when the sampling mass ran out before the requested
/// number of centers was drawn, i.e. the data has too few distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct Seeding {
    pub centers: CenterSet,
    pub trace: SeedingTrace,
    pub degenerate: bool,
}

/// Centers drawn per round by [`kmeans_sharp`]: `max(1, ⌈3·log₂ k⌉)`.
pub fn sharp_batch_size(k: usize) -> usize {
    if k <= 1 {
        return 1;
    }
    ((3.0 * (k as f64).log2()).ceil() as usize).max(1)
}

/// Inverse-transform draw over `masses`, whose left-to-right sum is `total`.
///
/// Only indices with positive mass can be returned.
fn sample_index(masses: &[f64], total: f64, rng: &mut SeededRng) -> usize {
    debug_assert!(total > 0.0);
    let target = rng.uniform() * total;
    let mut cumulative = 0.0;
    let mut last_positive = None;
    for (i, &m) in masses.iter().enumerate() {
        if m > 0.0 {
            cumulative += m;
            last_positive = Some(i);
            if cumulative > target {
                return i;
            }
        }
    }
    // unreachable when `total` was accumulated in the same order
    last_positive.expect("positive total mass")
}

fn check_request(data: &Dataset, k: usize) -> Result<()> {
    data.ensure_nonempty()?;
    if k == 0 {
        return Err(ClusterError::InvalidK {
            k,
            reason: "must be at least 1",
        });
    }
    Ok(())
}

/// k-means++ seeding with weighted D² sampling.
///
/// The first center is drawn with probability ∝ `w(x)`, each later one with
/// probability ∝ `w(x) · D(x)²`. If every remaining point already coincides
/// with a chosen center, the missing slots are filled by repeating the chosen
/// centers in order and the result is marked degenerate.
pub fn kmeanspp_seed(data: &Dataset, k: usize, rng: &mut SeededRng) -> Result<Seeding> {
    check_request(data, k)?;
    let n = data.len();
    let mut centers = CenterSet::empty(data.dim())?;
    let mut trace = SeedingTrace::default();

    let weights = data.weights();
    let total: f64 = weights.iter().sum();
    let first = sample_index(weights, total, rng);
    centers.push(data.point(first))?;
    trace.steps.push(SeedStep {
        index: first,
        point_mass: weights[first],
        total_mass: total,
    });

    let mut d2: Vec<f64> = data.iter().map(|(x, _)| sq_dist(x, data.point(first))).collect();
    let mut masses = vec![0.0; n];
    let mut degenerate = false;

    while centers.len() < k {
        let mut total = 0.0;
        for ((m, &d), &w) in masses.iter_mut().zip(&d2).zip(weights) {
            *m = w * d;
            total += *m;
        }
        if !(total > 0.0) {
            degenerate = true;
            break;
        }
        let chosen = sample_index(&masses, total, rng);
        centers.push(data.point(chosen))?;
        trace.steps.push(SeedStep {
            index: chosen,
            point_mass: masses[chosen],
            total_mass: total,
        });
        let c = data.point(chosen);
        for (d, (x, _)) in d2.iter_mut().zip(data.iter()) {
            let nd = sq_dist(x, c);
            if nd < *d {
                *d = nd;
            }
        }
    }

    if degenerate {
        let chosen = centers.len();
        for i in 0..k - chosen {
            let copy = centers.center(i % chosen).to_vec();
            centers.push(&copy)?;
        }
    }

    Ok(Seeding {
        centers,
        trace,
        degenerate,
    })
}

/// k-means# oversampled seeding.
///
/// Runs `k` rounds; each draws up to `B = sharp_batch_size(k)` points from the
/// D² distribution frozen at the start of the round (the first round uses the
/// weights alone). Within a round a point coinciding with one already drawn is
/// excluded, so the output never contains duplicates. Returns `k·B` centers,
/// or every distinct point when the data has fewer (flagged degenerate).
pub fn kmeans_sharp(data: &Dataset, k: usize, rng: &mut SeededRng) -> Result<Seeding> {
    check_request(data, k)?;
    let batch = sharp_batch_size(k);
    let weights = data.weights();
    let mut centers = CenterSet::empty(data.dim())?;
    let mut trace = SeedingTrace::default();
    let mut d2 = vec![f64::INFINITY; data.len()];
    let mut live = vec![0.0; data.len()];

    'rounds: for round in 0..k {
        for (l, (&w, &d)) in live.iter_mut().zip(weights.iter().zip(&d2)) {
            *l = if round == 0 { w } else { w * d };
        }
        let mut drawn = 0;
        for _ in 0..batch {
            let total: f64 = live.iter().sum();
            if !(total > 0.0) {
                break;
            }
            let chosen = sample_index(&live, total, rng);
            trace.steps.push(SeedStep {
                index: chosen,
                point_mass: live[chosen],
                total_mass: total,
            });
            let c = data.point(chosen);
            centers.push(c)?;
            drawn += 1;
            for ((d, l), (x, _)) in d2.iter_mut().zip(live.iter_mut()).zip(data.iter()) {
                let nd = sq_dist(x, c);
                if nd < *d {
                    *d = nd;
                }
                if nd == 0.0 {
                    *l = 0.0;
                }
            }
        }
        if drawn < batch {
            break 'rounds;
        }
    }

    let degenerate = centers.len() < k * batch;
    Ok(Seeding {
        centers,
        trace,
        degenerate,
    })
}

/// Outcome of [`best_of`]: the cheapest seeding and every run's hard cost.
#[derive(Debug, Clone)]
pub struct BestOf {
    pub best: Seeding,
    pub cost: f64,
    pub run_costs: Vec<f64>,
}

/// Runs `procedure` `runs` times, each on a child generator seeded from
/// `rng.next_seed()`, and keeps the run with the smallest hard cost on `data`
/// (earliest run on ties).
pub fn best_of<F>(runs: usize, data: &Dataset, rng: &mut SeededRng, mut procedure: F) -> Result<BestOf>
where
    F: FnMut(&Dataset, &mut SeededRng) -> Result<Seeding>,
{
    if runs == 0 {
        return Err(ClusterError::InvalidConfig("best_of needs at least one run".into()));
    }
    let mut best: Option<(Seeding, f64)> = None;
    let mut run_costs = Vec::with_capacity(runs);
    for _ in 0..runs {
        let mut child = SeededRng::new(rng.next_seed());
        let seeding = procedure(data, &mut child)?;
        let cost = hard_cost(data, &seeding.centers)?;
        run_costs.push(cost);
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((seeding, cost));
        }
    }
    let (best, cost) = best.expect("at least one run");
    Ok(BestOf {
        best,
        cost,
        run_costs,
    })
}

/// `k` distinct data points drawn uniformly without replacement.
pub fn uniform_seed(data: &Dataset, k: usize, rng: &mut SeededRng) -> Result<CenterSet> {
    check_request(data, k)?;
    if k > data.len() {
        return Err(ClusterError::InvalidK {
            k,
            reason: "exceeds the number of data points",
        });
    }
    let mut centers = CenterSet::empty(data.dim())?;
    for i in rand::seq::index::sample(rng.inner_mut(), data.len(), k) {
        centers.push(data.point(i))?;
    }
    Ok(centers)
}
