//! Seeded trial runner comparing clustering pipelines on the soft potential.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::bench::dataset::{load_dataset, DatasetSource};
use crate::error::{ClusterError, Result};
use crate::geometry::{CenterSet, Dataset};
use crate::iterate::{em_plus_plus, em_uniform, StopRule};
use crate::potential::{soft_cost, SoftParams};
use crate::seeding::SeededRng;
use crate::stream::{StreamClusterer, StreamConfig};
use crate::window::{WindowClusterer, WindowConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// EM from uniformly chosen data points.
    Em,
    /// EM from k-means++ seeds.
    EmPlusPlus,
    /// Cash-register stream over the dataset, k-means++ on the summaries.
    Stream,
    /// Sliding window over the tail of the dataset.
    Window,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Self::Em => "EM",
            Self::EmPlusPlus => "EM++",
            Self::Stream => "Stream",
            Self::Window => "Window",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = ClusterError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "em" => Ok(Self::Em),
            "empp" | "em++" => Ok(Self::EmPlusPlus),
            "stream" => Ok(Self::Stream),
            "window" => Ok(Self::Window),
            other => Err(ClusterError::InvalidConfig(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub source: DatasetSource,
    pub ks: Vec<usize>,
    pub ms: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// The first algorithm is the baseline the others are compared against.
    pub algorithms: Vec<Algorithm>,
    pub stop: StopRule,
    /// Per-level memory for [`Algorithm::Stream`].
    pub stream_memory: usize,
    pub stream_levels: usize,
    /// Window length for [`Algorithm::Window`]; `None` means the whole dataset.
    pub window: Option<usize>,
    pub window_epsilon: f64,
}

impl ExperimentSpec {
    /// The default EM vs EM++ grid: k ∈ {10, 25, 50},
    /// m ∈ {0.1, 0.25, 0.5}, 20 trials.
    pub fn em_comparison(source: DatasetSource) -> Self {
        Self {
            source,
            ks: vec![10, 25, 50],
            ms: vec![0.1, 0.25, 0.5],
            trials: 20,
            seed: 0,
            algorithms: vec![Algorithm::Em, Algorithm::EmPlusPlus],
            stop: StopRule::default(),
            stream_memory: 1000,
            stream_levels: 3,
            window: None,
            window_epsilon: 1.0 / 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(ClusterError::InvalidConfig("trials must be >= 1".into()));
        }
        if self.ks.is_empty() || self.ms.is_empty() || self.algorithms.is_empty() {
            return Err(ClusterError::InvalidConfig(
                "k list, m list and algorithm list must be nonempty".into(),
            ));
        }
        for &m in &self.ms {
            SoftParams::new(m)?;
        }
        if let Some(&k) = self.ks.iter().find(|&&k| k == 0) {
            return Err(ClusterError::InvalidK {
                k,
                reason: "must be at least 1",
            });
        }
        self.stop.validate()
    }
}

/// Aggregates for one algorithm at one `(m, k)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoSummary {
    pub algorithm: Algorithm,
    /// Final soft potential of every trial, in trial order.
    pub potentials: Vec<f64>,
    /// Wall time of every trial in seconds.
    pub times: Vec<f64>,
    pub avg_potential: f64,
    pub min_potential: f64,
    pub avg_time: f64,
}

impl AlgoSummary {
    fn from_trials(algorithm: Algorithm, potentials: Vec<f64>, times: Vec<f64>) -> Self {
        let n = potentials.len() as f64;
        Self {
            algorithm,
            avg_potential: potentials.iter().sum::<f64>() / n,
            min_potential: potentials.iter().copied().fold(f64::INFINITY, f64::min),
            avg_time: times.iter().sum::<f64>() / n,
            potentials,
            times,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub m: f64,
    pub k: usize,
    pub results: Vec<AlgoSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub dataset: String,
    pub trials: usize,
    pub rows: Vec<TrialRow>,
}

/// `100 · (1 − candidate / baseline)`, undefined for a zero baseline.
pub fn improvement(baseline: f64, candidate: f64) -> Option<f64> {
    if baseline == 0.0 || !baseline.is_finite() {
        None
    } else {
        Some(100.0 * (1.0 - candidate / baseline))
    }
}

/// SplitMix64 finalizer used to derive independent per-trial seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial. Algorithms in the same trial share it, so EM and EM++
/// are compared on paired random streams.
pub fn trial_seed(master: u64, m_index: usize, k_index: usize, trial: usize) -> u64 {
    [m_index as u64, k_index as u64, trial as u64]
        .iter()
        .fold(mix(master), |acc, &part| mix(acc ^ mix(part)))
}

/// One trial of one algorithm: returns the centers, the final soft potential
/// on the evaluated points and the wall time in seconds.
pub fn run_trial(
    data: &Dataset,
    algorithm: Algorithm,
    k: usize,
    params: &SoftParams,
    spec: &ExperimentSpec,
    seed: u64,
) -> Result<(CenterSet, f64, f64)> {
    let mut rng = SeededRng::new(seed);
    let start = Instant::now();
    let (centers, evaluated) = match algorithm {
        Algorithm::Em => (em_uniform(data, k, params, &spec.stop, &mut rng)?.0, None),
        Algorithm::EmPlusPlus => (em_plus_plus(data, k, params, &spec.stop, &mut rng)?.0, None),
        Algorithm::Stream => {
            let mut config = StreamConfig::new(k, spec.stream_memory);
            config.levels = spec.stream_levels;
            config.seed = rng.next_seed();
            let mut stream = StreamClusterer::new(config, data.dim())?;
            for (x, _) in data.iter() {
                stream.ingest(x)?;
            }
            (stream.finalize(&mut rng)?, None)
        }
        Algorithm::Window => {
            let length = spec.window.unwrap_or(data.len()).min(data.len());
            let mut config = WindowConfig::new(length, k, spec.window_epsilon);
            config.seed = rng.next_seed();
            let mut window = WindowClusterer::new(config, data.dim())?;
            for (x, _) in data.iter() {
                window.insert(x)?;
            }
            let mut tail = Dataset::empty(data.dim())?;
            for i in data.len() - length..data.len() {
                tail.push(data.point(i), data.weight(i))?;
            }
            (window.query(&mut rng)?, Some(tail))
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    let phi = soft_cost(evaluated.as_ref().unwrap_or(data), &centers, params)?;
    Ok((centers, phi, elapsed))
}

/// Runs every `(m, k)` cell of `spec` on an already loaded dataset.
pub fn run_on_dataset(data: &Dataset, spec: &ExperimentSpec) -> Result<TrialStats> {
    spec.validate()?;
    let mut rows = Vec::new();
    for (mi, &m) in spec.ms.iter().enumerate() {
        let params = SoftParams::new(m)?;
        for (ki, &k) in spec.ks.iter().enumerate() {
            let mut results = Vec::with_capacity(spec.algorithms.len());
            for &algorithm in &spec.algorithms {
                let mut potentials = Vec::with_capacity(spec.trials);
                let mut times = Vec::with_capacity(spec.trials);
                for trial in 0..spec.trials {
                    let seed = trial_seed(spec.seed, mi, ki, trial);
                    let (_, phi, secs) = run_trial(data, algorithm, k, &params, spec, seed)?;
                    potentials.push(phi);
                    times.push(secs);
                }
                results.push(AlgoSummary::from_trials(algorithm, potentials, times));
            }
            rows.push(TrialRow { m, k, results });
        }
    }
    Ok(TrialStats {
        dataset: spec.source.label(),
        trials: spec.trials,
        rows,
    })
}

/// Loads the dataset named by `spec` and runs the experiment on it.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<TrialStats> {
    spec.validate()?;
    let data = load_dataset(&spec.source)?;
    run_on_dataset(&data, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::synth::SynthSpec;

    fn small_spec() -> ExperimentSpec {
        let mut spec = ExperimentSpec::em_comparison(DatasetSource::Synth(SynthSpec {
            n: 300,
            d: 3,
            components: 4,
            separation: 8.0,
            seed: 2,
        }));
        spec.ks = vec![2, 4];
        spec.ms = vec![0.25];
        spec.trials = 3;
        spec.seed = 5;
        spec
    }

    #[test]
    fn algorithm_parsing() {
        assert_eq!("em".parse::<Algorithm>().unwrap(), Algorithm::Em);
        assert_eq!("EMPP".parse::<Algorithm>().unwrap(), Algorithm::EmPlusPlus);
        assert_eq!("em++".parse::<Algorithm>().unwrap(), Algorithm::EmPlusPlus);
        assert_eq!("window".parse::<Algorithm>().unwrap(), Algorithm::Window);
        assert!("kmedian".parse::<Algorithm>().is_err());
    }

    #[test]
    fn improvement_formula() {
        let v = improvement(1.665e8, 8.644e7).unwrap();
        assert!((v - 48.084_084_084).abs() < 1e-6);
        assert!(improvement(0.0, 1.0).is_none());
        assert!(improvement(2.0, 3.0).unwrap() < 0.0);
    }

    #[test]
    fn single_trial_min_equals_avg() {
        let mut spec = small_spec();
        spec.trials = 1;
        spec.algorithms = vec![Algorithm::Em];
        let stats = run_experiment(&spec).unwrap();
        for row in &stats.rows {
            let s = &row.results[0];
            assert_eq!(s.min_potential, s.avg_potential);
        }
    }

    #[test]
    fn identical_seed_gives_identical_potentials() {
        let spec = small_spec();
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            for (sa, sb) in ra.results.iter().zip(&rb.results) {
                assert_eq!(sa.potentials, sb.potentials);
            }
        }
    }

    #[test]
    fn trial_results_do_not_depend_on_siblings() {
        let data = load_dataset(&small_spec().source).unwrap();
        let mut spec = small_spec();
        let full = run_on_dataset(&data, &spec).unwrap();
        spec.trials = 1;
        let only_first = run_on_dataset(&data, &spec).unwrap();
        assert_eq!(
            full.rows[1].results[1].potentials[0],
            only_first.rows[1].results[1].potentials[0]
        );
    }

    #[test]
    fn every_algorithm_runs() {
        let mut spec = small_spec();
        spec.algorithms = vec![
            Algorithm::Em,
            Algorithm::EmPlusPlus,
            Algorithm::Stream,
            Algorithm::Window,
        ];
        spec.stream_memory = 100;
        spec.window = Some(200);
        let stats = run_experiment(&spec).unwrap();
        for row in &stats.rows {
            assert_eq!(row.results.len(), 4);
            for s in &row.results {
                assert!(s.min_potential <= s.avg_potential);
                assert!(s.potentials.iter().all(|p| p.is_finite() && *p >= 0.0));
            }
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = small_spec();
        spec.trials = 0;
        assert!(spec.validate().is_err());
        let mut spec = small_spec();
        spec.ms = vec![1.0];
        assert!(spec.validate().is_err());
        let mut spec = small_spec();
        spec.ks = vec![0];
        assert!(spec.validate().is_err());
    }
}
