//! Isotropic Gaussian mixtures used as stand-ins for the UCI datasets.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ClusterError, Result};
use crate::geometry::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub d: usize,
    pub components: usize,
    /// Minimum pairwise distance between component means (noise σ = 1).
    pub separation: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n: 1000,
            d: 2,
            components: 3,
            separation: 10.0,
            seed: 0,
        }
    }
}

impl fmt::Display for SynthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={},d={},c={},sep={},seed={}",
            self.n, self.d, self.components, self.separation, self.seed
        )
    }
}

impl FromStr for SynthSpec {
    type Err = ClusterError;

    /// Comma-separated `key=value` pairs over `n`, `d`, `c`, `sep`, `seed`;
    /// missing keys keep their defaults.
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = Self::default();
        let bad = |msg: String| ClusterError::InvalidConfig(format!("synth spec {s:?}: {msg}"));
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {pair:?}")))?;
            let int = || value.parse::<usize>().map_err(|e| bad(format!("{key}: {e}")));
            match key {
                "n" => spec.n = int()?,
                "d" => spec.d = int()?,
                "c" | "components" => spec.components = int()?,
                "sep" | "separation" => {
                    spec.separation = value.parse().map_err(|e| bad(format!("{key}: {e}")))?
                }
                "seed" => spec.seed = value.parse().map_err(|e| bad(format!("{key}: {e}")))?,
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        Ok(spec)
    }
}

/// Component means on a lattice with spacing `separation`: mean `j` has the
/// base-`b` digits of `j` as coordinates, `b` being the smallest base with
/// `b^d ≥ components`. Distinct means differ by at least one full step.
fn component_means(d: usize, components: usize, separation: f64) -> Vec<Vec<f64>> {
    let mut base = 2usize;
    while (base as f64).powi(d.min(64) as i32) < components as f64 {
        base += 1;
    }
    (0..components)
        .map(|mut j| {
            (0..d)
                .map(|_| {
                    let digit = j % base;
                    j /= base;
                    digit as f64 * separation
                })
                .collect()
        })
        .collect()
}

/// `n` points from an equal-weight isotropic Gaussian mixture in `R^d`.
/// Point `i` belongs to component `i mod components`.
pub fn synth_mixture(spec: &SynthSpec) -> Result<Dataset> {
    if spec.components == 0 {
        return Err(ClusterError::InvalidConfig("components must be >= 1".into()));
    }
    if spec.n == 0 {
        return Err(ClusterError::EmptyDataset);
    }
    if !(spec.separation.is_finite() && spec.separation >= 0.0) {
        return Err(ClusterError::InvalidConfig("separation must be finite and >= 0".into()));
    }
    let means = component_means(spec.d, spec.components, spec.separation);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut data = Dataset::empty(spec.d)?;
    let mut row = vec![0.0; spec.d];
    for i in 0..spec.n {
        let mean = &means[i % spec.components];
        for (x, mu) in row.iter_mut().zip(mean) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *x = mu + z;
        }
        data.push(&row, 1.0)?;
    }
    Ok(data)
}
