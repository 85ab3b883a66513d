//! Ground truth for small instances and standalone checkers for the
//! hard/soft inequality chain.
//!
//! Nothing here calls into the seeding or iteration code, so these routines
//! can be used to validate them.

use crate::error::{ClusterError, Result};
use crate::geometry::{sq_dist, CenterSet, Dataset};
use crate::potential::{approx_factor, hard_cost, soft_cost, SoftParams};

/// Largest `k^n` accepted by [`brute_force_kmeans`].
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// Part index of every point, numbered in order of first appearance.
    pub assignment: Vec<usize>,
    pub centers: CenterSet,
    pub cost: f64,
}

/// Exact k-means optimum by enumerating every partition of the points into at
/// most `k` nonempty parts.
///
/// Partitions are walked as restricted growth strings so each one is visited
/// once regardless of part labelling. The first partition reaching the
/// minimum wins, which makes the result deterministic.
pub fn brute_force_kmeans(data: &Dataset, k: usize) -> Result<BruteForceResult> {
    data.ensure_nonempty()?;
    if k == 0 {
        return Err(ClusterError::InvalidK {
            k,
            reason: "must be at least 1",
        });
    }
    let n = data.len();
    let too_large = ClusterError::InstanceTooLarge {
        n,
        k,
        limit: BRUTE_FORCE_LIMIT,
    };
    let space = u32::try_from(n)
        .ok()
        .and_then(|n| (k as u64).checked_pow(n))
        .ok_or(too_large)?;
    if space > BRUTE_FORCE_LIMIT {
        return Err(ClusterError::InstanceTooLarge {
            n,
            k,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    let mut labels = vec![0usize; n];
    // prefix_max[i] = max(labels[..i]); labels[i] may go up to prefix_max[i] + 1
    let mut prefix_max = vec![0usize; n];
    let mut best_cost = f64::INFINITY;
    let mut best_labels = labels.clone();

    loop {
        let cost = partition_cost(data, &labels, k);
        if cost < best_cost {
            best_cost = cost;
            best_labels.copy_from_slice(&labels);
        }
        // advance to the next restricted growth string
        let mut pos = n;
        loop {
            if pos <= 1 {
                let centers = part_centroids(data, &best_labels, k)?;
                return Ok(BruteForceResult {
                    assignment: best_labels,
                    centers,
                    cost: best_cost,
                });
            }
            pos -= 1;
            let cap = (prefix_max[pos] + 1).min(k - 1);
            if labels[pos] < cap {
                labels[pos] += 1;
                break;
            }
        }
        for i in pos + 1..n {
            labels[i] = 0;
            prefix_max[i] = prefix_max[i - 1].max(labels[i - 1]);
        }
    }
}

fn part_sums(data: &Dataset, labels: &[usize], k: usize) -> (Vec<f64>, Vec<f64>) {
    let dim = data.dim();
    let mut sums = vec![0.0; k * dim];
    let mut mass = vec![0.0; k];
    for ((x, w), &l) in data.iter().zip(labels) {
        mass[l] += w;
        for (s, v) in sums[l * dim..(l + 1) * dim].iter_mut().zip(x) {
            *s += w * v;
        }
    }
    (sums, mass)
}

fn partition_cost(data: &Dataset, labels: &[usize], k: usize) -> f64 {
    let dim = data.dim();
    let (mut sums, mass) = part_sums(data, labels, k);
    for (i, &m) in mass.iter().enumerate() {
        if m > 0.0 {
            sums[i * dim..(i + 1) * dim].iter_mut().for_each(|s| *s /= m);
        }
    }
    data.iter()
        .zip(labels)
        .map(|((x, w), &l)| w * sq_dist(x, &sums[l * dim..(l + 1) * dim]))
        .sum()
}

fn part_centroids(data: &Dataset, labels: &[usize], k: usize) -> Result<CenterSet> {
    let dim = data.dim();
    let (sums, mass) = part_sums(data, labels, k);
    let mut centers = CenterSet::empty(dim)?;
    for (i, &m) in mass.iter().enumerate() {
        if m > 0.0 {
            let c: Vec<f64> = sums[i * dim..(i + 1) * dim].iter().map(|s| s / m).collect();
            centers.push(&c)?;
        }
    }
    Ok(centers)
}

/// Checks `Σ a_i^p ≥ k^{1−p} (Σ a_i)^p` for `p ≥ 1` with `1e-12` relative slack.
pub fn power_mean_check(a: &[f64], p: f64) -> bool {
    if a.is_empty() {
        return true;
    }
    let k = a.len() as f64;
    let lhs: f64 = a.iter().map(|x| x.powf(p)).sum();
    let rhs = k.powf(1.0 - p) * a.iter().sum::<f64>().powf(p);
    lhs >= rhs * (1.0 - 1e-12)
}

/// Result of evaluating `hard ≤ soft ≤ k^{m/(1−m)} · hard` on one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// `soft / hard`, or 1 when both vanish.
    pub ratio: f64,
    pub factor: f64,
    pub hard: f64,
    pub soft: f64,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Relative tolerance used by [`sandwich_check`].
pub const SANDWICH_TOL: f64 = 1e-9;

pub fn sandwich_check(
    data: &Dataset,
    centers: &CenterSet,
    params: &SoftParams,
) -> Result<SandwichReport> {
    let hard = hard_cost(data, centers)?;
    let soft = soft_cost(data, centers, params)?;
    let factor = approx_factor(centers.len(), params);
    let ratio = if hard == 0.0 && soft == 0.0 {
        1.0
    } else {
        soft / hard
    };
    Ok(SandwichReport {
        lower_ok: hard <= soft * (1.0 + SANDWICH_TOL),
        upper_ok: soft <= factor * hard * (1.0 + SANDWICH_TOL),
        ratio,
        factor,
        hard,
        soft,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Plain `k^n` label enumeration, used to validate the partition walk.
    fn exhaustive_cost(data: &Dataset, k: usize) -> f64 {
        let n = data.len();
        let mut labels = vec![0usize; n];
        let mut best = f64::INFINITY;
        loop {
            best = best.min(partition_cost(data, &labels, k));
            let mut i = 0;
            loop {
                if i == n {
                    return best;
                }
                labels[i] += 1;
                if labels[i] < k {
                    break;
                }
                labels[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn brute_force_known_instance() {
        let data = Dataset::from_rows(&[[0.0], [1.0], [4.0], [5.0]]).unwrap();
        let r = brute_force_kmeans(&data, 2).unwrap();
        assert_eq!(r.cost, 1.0);
        assert_eq!(r.assignment, vec![0, 0, 1, 1]);
        assert_eq!(r.centers.rows(), vec![vec![0.5], vec![4.5]]);
    }

    #[test]
    fn brute_force_n_equals_k() {
        let data = Dataset::from_rows(&[[0.0, 1.0], [3.0, 1.0], [9.0, 9.0]]).unwrap();
        let r = brute_force_kmeans(&data, 3).unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.assignment, vec![0, 1, 2]);
        assert_eq!(r.centers.rows(), data.rows());
    }

    #[test]
    fn brute_force_matches_exhaustive_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let n = rng.random_range(1..8);
            let k = rng.random_range(1..4);
            let rows: Vec<[f64; 2]> = (0..n)
                .map(|_| [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)])
                .collect();
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(1..4) as f64).collect();
            let data = Dataset::from_weighted_rows(&rows, &weights).unwrap();
            let r = brute_force_kmeans(&data, k).unwrap();
            let e = exhaustive_cost(&data, k);
            assert!((r.cost - e).abs() <= 1e-12 * e.max(1.0));
            assert!((hard_cost(&data, &r.centers).unwrap() - r.cost).abs() <= 1e-9 * r.cost.max(1.0));
        }
    }

    #[test]
    fn brute_force_guard() {
        let rows: Vec<[f64; 1]> = (0..16).map(|i| [i as f64]).collect();
        let data = Dataset::from_rows(&rows).unwrap();
        assert!(matches!(
            brute_force_kmeans(&data, 3),
            Err(ClusterError::InstanceTooLarge { .. })
        ));
        assert!(brute_force_kmeans(&data, 2).is_ok());
    }

    #[test]
    fn power_mean_examples() {
        assert!(power_mean_check(&[1.0; 7], 3.3));
        assert!(power_mean_check(&[0.0, 0.0, 4.0], 2.0));
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100_000 {
            let k = rng.random_range(1..10);
            let a: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..100.0)).collect();
            let p = rng.random_range(1.0..12.0);
            assert!(power_mean_check(&a, p), "{a:?} {p}");
        }
    }

    #[test]
    fn sandwich_trivial_cases() {
        let p = SoftParams::new(0.25).unwrap();
        let data = Dataset::from_rows(&[[0.0], [2.0], [7.0]]).unwrap();
        let one = CenterSet::from_rows(&[[1.0]]).unwrap();
        let r = sandwich_check(&data, &one, &p).unwrap();
        assert!(r.holds());
        assert_eq!(r.ratio, 1.0);

        let on_points = CenterSet::from_rows(&[[0.0], [2.0], [7.0]]).unwrap();
        let r = sandwich_check(&data, &on_points, &p).unwrap();
        assert!(r.holds());
        assert_eq!(r.ratio, 1.0);
    }
}
