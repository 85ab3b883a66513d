//! Refinement loops: Lloyd's algorithm for hard k-means and the EM
//! alternation for fuzzy k-means, plus the seeded EM / EM++ drivers.

use std::time::{Duration, Instant};

use crate::error::{ClusterError, Result};
use crate::geometry::{nearest, CenterSet, Dataset};
use crate::potential::{em_step, hard_cost, SoftParams};
use crate::seeding::{kmeanspp_seed, uniform_seed, SeededRng};

/// When to stop iterating. `max_iters` is always enforced; a tolerance of 0
/// disables that criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub max_iters: usize,
    /// Relative change of the potential between consecutive iterations.
    pub rel_tol: f64,
    /// Largest center displacement (Euclidean) in one iteration.
    pub move_tol: f64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_iters: 300,
            rel_tol: 1e-6,
            move_tol: 1e-8,
        }
    }
}

impl StopRule {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(ClusterError::InvalidConfig("max_iters must be >= 1".into()));
        }
        if !(self.rel_tol >= 0.0 && self.move_tol >= 0.0) {
            return Err(ClusterError::InvalidConfig(
                "tolerances must be non-negative".into(),
            ));
        }
        Ok(())
    }

    fn satisfied(&self, previous: f64, current: f64, movement: f64) -> bool {
        let rel = if previous > 0.0 {
            (previous - current).abs() / previous
        } else if current == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        movement <= self.move_tol || rel <= self.rel_tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iterations: usize,
    pub initial_potential: f64,
    pub final_potential: f64,
    pub converged: bool,
    pub wall_time: Duration,
    /// Potential before the first iteration followed by the potential after
    /// each accepted iteration.
    pub potentials: Vec<f64>,
}

fn check_inputs(data: &Dataset, init: &CenterSet, stop: &StopRule) -> Result<()> {
    data.ensure_nonempty()?;
    init.ensure_compatible(data)?;
    stop.validate()
}

/// Weighted nearest-center means; a center with no points keeps its position.
fn lloyd_update(data: &Dataset, centers: &CenterSet) -> CenterSet {
    let k = centers.len();
    let dim = data.dim();
    let mut sums = vec![0.0; k * dim];
    let mut mass = vec![0.0; k];
    for (x, w) in data.iter() {
        let (i, _) = nearest(x, centers);
        mass[i] += w;
        for (s, xj) in sums[i * dim..(i + 1) * dim].iter_mut().zip(x) {
            *s += w * xj;
        }
    }
    let mut next = centers.clone();
    for i in 0..k {
        if mass[i] > 0.0 {
            for (c, s) in next.center_mut(i).iter_mut().zip(&sums[i * dim..(i + 1) * dim]) {
                *c = s / mass[i];
            }
        }
    }
    next
}

/// Lloyd's algorithm from `init`.
///
/// An update that would raise the hard cost (possible only through rounding
/// at a fixed point) is rejected and the run ends as converged, so the
/// recorded potentials never increase.
pub fn lloyd_run(
    data: &Dataset,
    init: &CenterSet,
    stop: &StopRule,
) -> Result<(CenterSet, IterationReport)> {
    check_inputs(data, init, stop)?;
    let start = Instant::now();
    let mut centers = init.clone();
    let mut cost = hard_cost(data, &centers)?;
    let initial = cost;
    let mut potentials = vec![cost];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < stop.max_iters {
        iterations += 1;
        let next = lloyd_update(data, &centers);
        let next_cost = hard_cost(data, &next)?;
        if next_cost > cost {
            converged = true;
            break;
        }
        let movement = centers.max_displacement(&next);
        let done = stop.satisfied(cost, next_cost, movement);
        centers = next;
        cost = next_cost;
        potentials.push(cost);
        if done {
            converged = true;
            break;
        }
    }

    Ok((
        centers,
        IterationReport {
            iterations,
            initial_potential: initial,
            final_potential: cost,
            converged,
            wall_time: start.elapsed(),
            potentials,
        },
    ))
}

/// Fuzzy k-means EM loop from `init`: memberships, then membership-weighted
/// centroids, until the stop rule fires. The reported potentials are the soft
/// potential of the centers after each iteration; they are not assumed to be
/// monotone.
pub fn em_run(
    data: &Dataset,
    init: &CenterSet,
    params: &SoftParams,
    stop: &StopRule,
) -> Result<(CenterSet, IterationReport)> {
    check_inputs(data, init, stop)?;
    let start = Instant::now();
    let mut centers = init.clone();
    let (mut next, mut phi) = em_step(data, &centers, params);
    let initial = phi;
    let mut potentials = vec![phi];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < stop.max_iters {
        iterations += 1;
        let movement = centers.max_displacement(&next);
        centers = next;
        let (following, next_phi) = em_step(data, &centers, params);
        potentials.push(next_phi);
        let done = stop.satisfied(phi, next_phi, movement);
        next = following;
        phi = next_phi;
        if done {
            converged = true;
            break;
        }
    }

    Ok((
        centers,
        IterationReport {
            iterations,
            initial_potential: initial,
            final_potential: phi,
            converged,
            wall_time: start.elapsed(),
            potentials,
        },
    ))
}

/// EM from `k` distinct data points drawn uniformly at random (the plain EM
/// baseline). The reported wall time includes initialization.
pub fn em_uniform(
    data: &Dataset,
    k: usize,
    params: &SoftParams,
    stop: &StopRule,
    rng: &mut SeededRng,
) -> Result<(CenterSet, IterationReport)> {
    let start = Instant::now();
    let init = uniform_seed(data, k, rng)?;
    let (centers, mut report) = em_run(data, &init, params, stop)?;
    report.wall_time = start.elapsed();
    Ok((centers, report))
}

/// EM seeded by k-means++ (EM++). The reported wall time includes seeding.
pub fn em_plus_plus(
    data: &Dataset,
    k: usize,
    params: &SoftParams,
    stop: &StopRule,
    rng: &mut SeededRng,
) -> Result<(CenterSet, IterationReport)> {
    let start = Instant::now();
    let seeding = kmeanspp_seed(data, k, rng)?;
    let (centers, mut report) = em_run(data, &seeding.centers, params, stop)?;
    report.wall_time = start.elapsed();
    Ok((centers, report))
}
