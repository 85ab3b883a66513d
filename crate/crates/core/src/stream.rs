//! Cash-register streaming clusterer.
//!
//! Points enter level 1 with weight 1. When a level holds `memory` points it
//! is compressed (the first level lazily, when one more point arrives) with the best of `sharp_runs` k-means# runs into at most
//! `k·⌈3·log₂ k⌉` weighted points, which are pushed to the next level. The
//! last level compresses into itself. A query runs weighted k-means++ over
//! everything still buffered.

use crate::error::{ClusterError, Result};
use crate::geometry::{nearest, CenterSet, Dataset};
use crate::iterate::{lloyd_run, StopRule};
use crate::seeding::{best_of, kmeans_sharp, kmeanspp_seed, sharp_batch_size, SeededRng};

#[derive(Debug, Clone, PartialEq)]
pub struct StreamConfig {
    pub k: usize,
    /// Maximum number of buffered points per level.
    pub memory: usize,
    pub levels: usize,
    /// Repetitions of k-means# per compression; the cheapest run is kept.
    pub sharp_runs: usize,
    pub seed: u64,
    /// Weighted k-means++ runs at query time; the run cheapest on the stored
    /// points is kept.
    pub query_runs: usize,
    /// Weighted Lloyd refinement of the final centers, if set.
    pub refine: Option<StopRule>,
}

impl StreamConfig {
    /// Defaults: 3 levels, `⌈log₂ memory⌉` k-means# runs, one query run,
    /// seed 0, no refinement.
    pub fn new(k: usize, memory: usize) -> Self {
        Self {
            k,
            memory,
            levels: 3,
            sharp_runs: default_runs(memory),
            seed: 0,
            query_runs: 1,
            refine: None,
        }
    }

    /// Points produced by compressing one full level.
    pub fn summary_size(&self) -> usize {
        self.k * sharp_batch_size(self.k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(ClusterError::InvalidK {
                k: 0,
                reason: "must be at least 1",
            });
        }
        if self.memory <= self.summary_size() {
            return Err(ClusterError::InvalidConfig(format!(
                "memory {} must exceed the summary size k*ceil(3 log2 k) = {}",
                self.memory,
                self.summary_size()
            )));
        }
        if self.levels == 0 {
            return Err(ClusterError::InvalidConfig("levels must be >= 1".into()));
        }
        if self.sharp_runs == 0 {
            return Err(ClusterError::InvalidConfig("sharp_runs must be >= 1".into()));
        }
        if self.query_runs == 0 {
            return Err(ClusterError::InvalidConfig("query_runs must be >= 1".into()));
        }
        if let Some(stop) = &self.refine {
            stop.validate()?;
        }
        Ok(())
    }
}

pub(crate) fn default_runs(n: usize) -> usize {
    ((n.max(2) as f64).log2().ceil() as usize).max(1)
}

/// Buffered weighted points of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelBuffer {
    pub level: usize,
    pub points: Dataset,
    /// Total weight ever pushed into this level.
    pub ingested_weight: f64,
}

/// Compresses a buffer into weighted representatives.
///
/// Runs the best of `runs` k-means# seedings, assigns each buffered point to
/// its nearest representative (lowest index on ties) and gives every
/// representative the total weight assigned to it. Representatives that
/// receive nothing are dropped, so the output weight equals the input weight.
pub fn compress_level(
    buffer: &Dataset,
    k: usize,
    runs: usize,
    rng: &mut SeededRng,
) -> Result<Dataset> {
    buffer.ensure_nonempty()?;
    let best = best_of(runs, buffer, rng, |data, r| kmeans_sharp(data, k, r))?;
    Ok(summarize(buffer, &best.best.centers))
}

/// Weighted k-means++ on `points` (best of `runs` by weighted hard cost),
/// optionally refined by Lloyd. A single run draws from `rng` directly, so it
/// matches [`kmeanspp_seed`] on the same generator.
pub(crate) fn query_centers(
    points: &Dataset,
    k: usize,
    runs: usize,
    refine: Option<&StopRule>,
    rng: &mut SeededRng,
) -> Result<CenterSet> {
    let seeded = if runs <= 1 {
        kmeanspp_seed(points, k, rng)?
    } else {
        best_of(runs, points, rng, |data, r| kmeanspp_seed(data, k, r))?.best
    };
    match refine {
        Some(stop) => Ok(lloyd_run(points, &seeded.centers, stop)?.0),
        None => Ok(seeded.centers),
    }
}

/// Nearest-assignment weight sums of `data` onto `centers`.
pub(crate) fn summarize(data: &Dataset, centers: &CenterSet) -> Dataset {
    let mut mass = vec![0.0; centers.len()];
    for (x, w) in data.iter() {
        mass[nearest(x, centers).0] += w;
    }
    let mut out = Dataset::empty(data.dim()).expect("dim >= 1");
    for (c, &m) in centers.iter().zip(&mass) {
        if m > 0.0 {
            out.push(c, m).expect("centers are finite");
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct StreamClusterer {
    config: StreamConfig,
    levels: Vec<LevelBuffer>,
    rng: SeededRng,
    ingested: u64,
}

impl StreamClusterer {
    pub fn new(config: StreamConfig, dim: usize) -> Result<Self> {
        config.validate()?;
        let levels = (0..config.levels)
            .map(|level| {
                Ok(LevelBuffer {
                    level,
                    points: Dataset::empty(dim)?,
                    ingested_weight: 0.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let rng = SeededRng::new(config.seed);
        Ok(Self {
            config,
            levels,
            rng,
            ingested: 0,
        })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.levels[0].points.dim()
    }

    pub fn levels(&self) -> &[LevelBuffer] {
        &self.levels
    }

    /// Number of raw points ingested so far.
    pub fn ingested(&self) -> u64 {
        self.ingested
    }

    /// Number of weighted points currently stored across all levels.
    pub fn live_len(&self) -> usize {
        self.levels.iter().map(|l| l.points.len()).sum()
    }

    pub fn live_weight(&self) -> f64 {
        self.levels.iter().map(|l| l.points.total_weight()).sum()
    }

    /// Adds one raw point with weight 1.
    ///
    /// A full first level is compressed just before the next point arrives,
    /// so up to `memory` raw points are held uncompressed. Higher levels are
    /// compressed as soon as they fill.
    pub fn ingest(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(ClusterError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if self.levels[0].points.len() >= self.config.memory {
            self.cascade()?;
        }
        self.levels[0].points.push(x, 1.0)?;
        self.levels[0].ingested_weight += 1.0;
        self.ingested += 1;
        Ok(())
    }

    fn cascade(&mut self) -> Result<()> {
        let top = self.levels.len() - 1;
        for level in 0..self.levels.len() {
            if self.levels[level].points.len() < self.config.memory {
                break;
            }
            let summary = compress_level(
                &self.levels[level].points,
                self.config.k,
                self.config.sharp_runs,
                &mut self.rng,
            )?;
            self.levels[level].points.clear();
            let target = (level + 1).min(top);
            self.levels[target].points.extend_from(&summary)?;
            if target != level {
                self.levels[target].ingested_weight += summary.total_weight();
            }
        }
        Ok(())
    }

    /// Snapshot of every stored weighted point, level 1 first.
    pub fn live_points(&self) -> Dataset {
        let mut out = Dataset::empty(self.dim()).expect("dim >= 1");
        for level in &self.levels {
            out.extend_from(&level.points).expect("same dim");
        }
        out
    }

    /// k centers for everything seen so far. Leaves the stream untouched.
    pub fn finalize(&self, rng: &mut SeededRng) -> Result<CenterSet> {
        if self.ingested == 0 {
            return Err(ClusterError::EmptyStream);
        }
        query_centers(
            &self.live_points(),
            self.config.k,
            self.config.query_runs,
            self.config.refine.as_ref(),
            rng,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let offset = (i % 3) as f64 * 20.0;
                (0..dim).map(|_| offset + rng.random_range(-1.0..1.0)).collect()
            })
            .collect()
    }

    #[test]
    fn config_validation() {
        assert!(StreamConfig::new(0, 100).validate().is_err());
        // k = 4 summarizes to 24 points
        assert!(StreamConfig::new(4, 24).validate().is_err());
        assert!(StreamConfig::new(4, 25).validate().is_ok());
        let mut c = StreamConfig::new(2, 50);
        c.levels = 0;
        assert!(c.validate().is_err());
        assert_eq!(StreamConfig::new(2, 1000).sharp_runs, 10);
    }

    #[test]
    fn below_memory_nothing_is_compressed() {
        let mut s = StreamClusterer::new(StreamConfig::new(3, 100), 2).unwrap();
        let pts = random_points(99, 2, 1);
        for p in &pts {
            s.ingest(p).unwrap();
        }
        assert_eq!(s.levels()[0].points.rows(), pts);
        assert_eq!(s.live_len(), 99);
    }

    #[test]
    fn full_level_moves_up() {
        let mut s = StreamClusterer::new(StreamConfig::new(4, 100), 3).unwrap();
        let pts = random_points(101, 3, 2);
        for p in &pts[..100] {
            s.ingest(p).unwrap();
        }
        assert_eq!(s.levels()[0].points.len(), 100);
        assert!(s.levels()[1].points.is_empty());
        s.ingest(&pts[100]).unwrap();
        assert_eq!(s.levels()[0].points.rows(), vec![pts[100].clone()]);
        assert_eq!(s.levels()[1].points.len(), 24);
        assert_eq!(s.levels()[1].points.total_weight(), 100.0);
        assert_eq!(s.levels()[1].ingested_weight, 100.0);
    }

    #[test]
    fn memory_and_weight_invariants_hold_on_every_step() {
        let mut config = StreamConfig::new(3, 60);
        config.levels = 2;
        let mut s = StreamClusterer::new(config, 2).unwrap();
        for (i, p) in random_points(2000, 2, 3).iter().enumerate() {
            s.ingest(p).unwrap();
            assert!(s.levels()[0].points.len() <= 60);
            assert!(s.levels()[1].points.len() < 60);
            assert!(s.live_len() <= 2 * 60);
            assert_eq!(s.live_weight(), (i + 1) as f64);
        }
    }

    #[test]
    fn compress_passthrough_and_dedup() {
        let small = Dataset::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        let out = compress_level(&small, 2, 3, &mut SeededRng::new(0)).unwrap();
        let mut rows = out.rows();
        rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(rows, small.rows());
        assert!(out.weights().iter().all(|&w| w == 1.0));

        let copies = Dataset::from_rows(&vec![[4.0, 4.0]; 50]).unwrap();
        let out = compress_level(&copies, 3, 2, &mut SeededRng::new(0)).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.weight(0), 50.0);
    }

    #[test]
    fn compress_conserves_integer_weight() {
        let rows = random_points(300, 4, 5);
        let weights: Vec<f64> = (0..300).map(|i| (i % 7 + 1) as f64).collect();
        let data = Dataset::from_weighted_rows(&rows, &weights).unwrap();
        let out = compress_level(&data, 3, 4, &mut SeededRng::new(6)).unwrap();
        assert!(out.len() <= 3 * sharp_batch_size(3));
        assert_eq!(out.total_weight(), data.total_weight());
    }

    #[test]
    fn finalize_small_stream_matches_batch() {
        let pts = random_points(80, 2, 7);
        let mut s = StreamClusterer::new(StreamConfig::new(3, 100), 2).unwrap();
        for p in &pts {
            s.ingest(p).unwrap();
        }
        let streamed = s.finalize(&mut SeededRng::new(42)).unwrap();
        let batch = kmeanspp_seed(&Dataset::from_rows(&pts).unwrap(), 3, &mut SeededRng::new(42)).unwrap();
        assert_eq!(streamed, batch.centers);
        // finalize does not disturb the stream
        assert_eq!(s.finalize(&mut SeededRng::new(42)).unwrap(), streamed);
        s.ingest(&pts[0]).unwrap();
        assert_eq!(s.ingested(), 81);
    }

    #[test]
    fn empty_stream_and_bad_dim() {
        let mut s = StreamClusterer::new(StreamConfig::new(2, 50), 2).unwrap();
        assert!(matches!(
            s.finalize(&mut SeededRng::new(0)),
            Err(ClusterError::EmptyStream)
        ));
        assert!(matches!(
            s.ingest(&[1.0]),
            Err(ClusterError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn query_runs_keep_the_cheapest_seeding() {
        let pts = random_points(400, 2, 9);
        let mut config = StreamConfig::new(3, 100);
        config.query_runs = 8;
        let mut s = StreamClusterer::new(config, 2).unwrap();
        for p in &pts {
            s.ingest(p).unwrap();
        }
        let live = s.live_points();
        let best = s.finalize(&mut SeededRng::new(3)).unwrap();
        let expected = best_of(8, &live, &mut SeededRng::new(3), |d, r| kmeanspp_seed(d, 3, r)).unwrap();
        assert_eq!(best, expected.best.centers);
        let mut bad = StreamConfig::new(3, 100);
        bad.query_runs = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn deterministic_under_seed() {
        let pts = random_points(700, 3, 8);
        let run = || {
            let mut c = StreamConfig::new(3, 50);
            c.seed = 77;
            let mut s = StreamClusterer::new(c, 3).unwrap();
            for p in &pts {
                s.ingest(p).unwrap();
            }
            (s.live_points(), s.finalize(&mut SeededRng::new(1)).unwrap())
        };
        assert_eq!(run(), run());
    }
}
