//! Sliding-window clusterer over the last `L` stream points.
//!
//! The stream is cut into spans of `S` raw points (the shift granularity).
//! Span boundaries are placed at positions `p` with `(p + L) mod S = 0`, so at
//! every checkpoint (`n` points seen, `n mod S = 0`) the window start `n − L`
//! falls on a boundary and the live blocks cover the window exactly.
//!
//! While a span is open its raw points sit in the level-1 buffer; with
//! `t ≥ 3` levels, full buffers are compressed into intermediate levels
//! `2..t−1` on the way. When the span closes, everything below level `t` is
//! compressed into one [`SummaryBlock`] of at most `k·⌈3·log₂ k⌉` weighted
//! points appended at level `t`. Blocks whose span ends before the window
//! start are dropped on insert.
//!
//! Between checkpoints the oldest block straddles the window start; queries
//! scale its weights by the fraction of its span still inside the window.
//!
//! Windows no longer than one summary (`L ≤ k·⌈3·log₂ k⌉`) are kept exactly,
//! one raw point per block.

use std::collections::VecDeque;

use crate::error::{ClusterError, Result};
use crate::geometry::{CenterSet, Dataset};
use crate::iterate::StopRule;
use crate::seeding::{sharp_batch_size, SeededRng};
use crate::stream::{compress_level, default_runs, query_centers};

#[derive(Debug, Clone, PartialEq)]
pub struct WindowConfig {
    /// Window length `L` in points.
    pub window: usize,
    pub k: usize,
    /// `ε ∈ (0, 1/2)`; the structure uses `t = round(1/ε) − 1` levels.
    pub epsilon: f64,
    pub seed: u64,
    /// k-means# repetitions per compression; defaults to `⌈log₂ S⌉`.
    pub sharp_runs: Option<usize>,
    /// Weighted k-means++ runs per query; the cheapest on the summary wins.
    pub query_runs: usize,
    /// Weighted Lloyd refinement of query centers, if set.
    pub refine: Option<StopRule>,
}

impl WindowConfig {
    pub fn new(window: usize, k: usize, epsilon: f64) -> Self {
        Self {
            window,
            k,
            epsilon,
            seed: 0,
            sharp_runs: None,
            query_runs: 1,
            refine: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(ClusterError::InvalidK {
                k: 0,
                reason: "must be at least 1",
            });
        }
        if self.window == 0 {
            return Err(ClusterError::InvalidConfig("window must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(ClusterError::InvalidConfig(format!(
                "epsilon must lie in (0, 1/2), got {}",
                self.epsilon
            )));
        }
        if self.sharp_runs == Some(0) {
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

    /// Number of levels `t = max(1, round(1/ε) − 1)`.
    pub fn levels(&self) -> usize {
        ((1.0 / self.epsilon).round() as usize).saturating_sub(1).max(1)
    }

    /// Points in one compressed summary, `k·⌈3·log₂ k⌉`.
    pub fn block_points(&self) -> usize {
        self.k * sharp_batch_size(self.k)
    }

    /// True when the window is too short to benefit from summaries.
    pub fn is_exact(&self) -> bool {
        self.window <= self.block_points()
    }

    /// Shift granularity `S = ⌈L^{1−2ε} · B^{2ε}⌉`, or 1 for exact windows.
    pub fn shift(&self) -> usize {
        if self.is_exact() {
            return 1;
        }
        let l = self.window as f64;
        let b = self.block_points() as f64;
        let e = self.epsilon;
        ((l.powf(1.0 - 2.0 * e) * b.powf(2.0 * e)).ceil() as usize).clamp(1, self.window)
    }

    /// Capacity of the raw and intermediate buffers, `⌈L^ε · B^{1−ε}⌉`.
    pub fn level_capacity(&self) -> usize {
        let l = self.window as f64;
        let b = self.block_points() as f64;
        let e = self.epsilon;
        ((l.powf(e) * b.powf(1.0 - e)).ceil() as usize).max(self.block_points() + 1)
    }

    /// Upper bound on stored weighted points at any time.
    pub fn max_live_points(&self) -> usize {
        let shift = self.shift();
        let blocks = self.window.div_ceil(shift) + 1;
        let per_block = if self.is_exact() { 1 } else { self.block_points() };
        let t = self.levels();
        let raw = if t >= 3 { self.level_capacity() } else { shift };
        blocks * per_block + t.saturating_sub(2) * self.level_capacity() + raw
    }
}

/// Compressed summary of the raw stream positions `start..end`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryBlock {
    pub points: Dataset,
    pub start: u64,
    pub end: u64,
    pub level: usize,
}

impl SummaryBlock {
    pub fn span_len(&self) -> u64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone)]
pub struct WindowClusterer {
    config: WindowConfig,
    shift: u64,
    runs: usize,
    blocks: VecDeque<SummaryBlock>,
    /// Levels `2..t−1`; empty unless `t ≥ 3`.
    intermediate: Vec<Dataset>,
    raw: Dataset,
    span_start: u64,
    seen: u64,
    rng: SeededRng,
}

impl WindowClusterer {
    pub fn new(config: WindowConfig, dim: usize) -> Result<Self> {
        config.validate()?;
        let shift = config.shift();
        let runs = config.sharp_runs.unwrap_or_else(|| default_runs(shift));
        let intermediate = (0..config.levels().saturating_sub(2))
            .map(|_| Dataset::empty(dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            shift: shift as u64,
            runs,
            blocks: VecDeque::new(),
            intermediate,
            raw: Dataset::empty(dim)?,
            span_start: 0,
            seen: 0,
            rng: SeededRng::new(config.seed),
            config,
        })
    }

    pub fn config(&self) -> &WindowConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.raw.dim()
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    /// Points inserted so far.
    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn blocks(&self) -> impl ExactSizeIterator<Item = &SummaryBlock> {
        self.blocks.iter()
    }

    /// Raw points of the open span (level 1).
    pub fn raw_buffer(&self) -> &Dataset {
        &self.raw
    }

    /// Stream position where the open span starts.
    pub fn open_span_start(&self) -> u64 {
        self.span_start
    }

    /// First stream position inside the window.
    pub fn window_start(&self) -> u64 {
        self.seen.saturating_sub(self.config.window as u64)
    }

    pub fn is_checkpoint(&self) -> bool {
        self.seen > 0 && self.seen.is_multiple_of(self.shift)
    }

    pub fn live_len(&self) -> usize {
        self.blocks.iter().map(|b| b.points.len()).sum::<usize>()
            + self.intermediate.iter().map(Dataset::len).sum::<usize>()
            + self.raw.len()
    }

    /// Unscaled weight of everything stored, including the expired part of
    /// the oldest block.
    pub fn live_weight(&self) -> f64 {
        self.blocks.iter().map(|b| b.points.total_weight()).sum::<f64>()
            + self.intermediate.iter().map(Dataset::total_weight).sum::<f64>()
            + self.raw.total_weight()
    }

    pub fn insert(&mut self, x: &[f64]) -> Result<()> {
        self.raw.push(x, 1.0)?;
        self.seen += 1;

        let capacity = self.config.level_capacity();
        if !self.intermediate.is_empty() && self.raw.len() >= capacity {
            self.push_intermediate(capacity)?;
        }

        let boundary = (self.seen + self.config.window as u64).is_multiple_of(self.shift);
        if boundary {
            self.close_span()?;
        }

        let start = self.window_start();
        while self.blocks.front().is_some_and(|b| b.end <= start) {
            self.blocks.pop_front();
        }
        Ok(())
    }

    fn compress(&mut self, data: &Dataset) -> Result<Dataset> {
        if data.len() <= self.config.block_points() {
            return Ok(data.clone());
        }
        compress_level(data, self.config.k, self.runs, &mut self.rng)
    }

    fn push_intermediate(&mut self, capacity: usize) -> Result<()> {
        let dim = self.dim();
        let raw = std::mem::replace(&mut self.raw, Dataset::empty(dim)?);
        let mut carry = self.compress(&raw)?;
        let last = self.intermediate.len() - 1;
        for level in 0..self.intermediate.len() {
            self.intermediate[level].extend_from(&carry)?;
            if self.intermediate[level].len() < capacity {
                return Ok(());
            }
            let full = std::mem::replace(&mut self.intermediate[level], Dataset::empty(dim)?);
            carry = self.compress(&full)?;
            if level == last {
                self.intermediate[level] = carry;
                return Ok(());
            }
        }
        Ok(())
    }

    fn close_span(&mut self) -> Result<()> {
        let mut pending = Dataset::empty(self.dim())?;
        for level in &mut self.intermediate {
            pending.extend_from(level)?;
            level.clear();
        }
        pending.extend_from(&self.raw)?;
        self.raw.clear();
        if pending.is_empty() {
            return Ok(());
        }
        let points = self.compress(&pending)?;
        self.blocks.push_back(SummaryBlock {
            points,
            start: self.span_start,
            end: self.seen,
            level: self.config.levels(),
        });
        self.span_start = self.seen;
        Ok(())
    }

    /// Weighted points standing in for the current window, oldest first.
    ///
    /// The block straddling the window start is down-weighted by the fraction
    /// of its span inside the window.
    pub fn window_points(&self) -> Result<Dataset> {
        if self.seen == 0 {
            return Err(ClusterError::EmptyStream);
        }
        let start = self.window_start();
        let mut out = Dataset::empty(self.dim())?;
        for block in &self.blocks {
            if block.start < start {
                let inside = (block.end - start) as f64 / block.span_len() as f64;
                out.extend_from(&block.points.scaled(inside)?)?;
            } else {
                out.extend_from(&block.points)?;
            }
        }
        for level in &self.intermediate {
            out.extend_from(level)?;
        }
        out.extend_from(&self.raw)?;
        Ok(out)
    }

    /// k centers for the current window.
    pub fn query(&self, rng: &mut SeededRng) -> Result<CenterSet> {
        query_centers(
            &self.window_points()?,
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
    use crate::seeding::kmeanspp_seed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn point(rng: &mut ChaCha8Rng, i: usize) -> Vec<f64> {
        let c = (i % 4) as f64 * 15.0;
        vec![c + rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]
    }

    #[test]
    fn derived_parameters() {
        let c = WindowConfig::new(2000, 4, 1.0 / 3.0);
        assert_eq!(c.levels(), 2);
        assert_eq!(c.block_points(), 24);
        // ⌈2000^{1/3} · 24^{2/3}⌉ = ⌈104.83⌉
        assert_eq!(c.shift(), 105);
        assert_eq!(WindowConfig::new(100, 2, 0.25).levels(), 3);
        assert_eq!(WindowConfig::new(100, 2, 0.45).levels(), 1);
        assert!(WindowConfig::new(100, 2, 0.5).validate().is_err());
        assert!(WindowConfig::new(0, 2, 0.3).validate().is_err());
    }

    #[test]
    fn no_block_before_first_boundary() {
        let config = WindowConfig::new(2000, 4, 1.0 / 3.0);
        let mut w = WindowClusterer::new(config, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // first boundary at n = 100 since (100 + 2000) % 105 == 0
        for i in 0..99 {
            w.insert(&point(&mut rng, i)).unwrap();
        }
        assert_eq!(w.blocks().len(), 0);
        assert_eq!(w.raw_buffer().len(), 99);
        w.insert(&point(&mut rng, 99)).unwrap();
        assert_eq!(w.blocks().len(), 1);
        assert_eq!(w.raw_buffer().len(), 0);
    }

    #[test]
    fn oldest_block_expires() {
        let config = WindowConfig::new(300, 2, 1.0 / 3.0);
        let shift = config.shift() as u64;
        let mut w = WindowClusterer::new(config, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..(300 + shift as usize) {
            w.insert(&point(&mut rng, i)).unwrap();
        }
        let start = w.window_start();
        assert!(w.blocks().all(|b| b.end > start));
        assert!(w.blocks().next().unwrap().start > 0);
    }

    #[test]
    fn tiny_window_is_exact_ring() {
        let config = WindowConfig::new(5, 3, 0.3);
        assert!(config.is_exact());
        let mut w = WindowClusterer::new(config, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..12).map(|i| point(&mut rng, i)).collect();
        for p in &pts {
            w.insert(p).unwrap();
        }
        assert_eq!(w.window_points().unwrap().rows(), pts[7..].to_vec());
        let got = w.query(&mut SeededRng::new(9)).unwrap();
        let batch = kmeanspp_seed(&Dataset::from_rows(&pts[7..]).unwrap(), 3, &mut SeededRng::new(9)).unwrap();
        assert_eq!(got, batch.centers);
    }

    #[test]
    fn window_before_first_block_matches_batch() {
        let config = WindowConfig::new(1000, 3, 0.25);
        let mut w = WindowClusterer::new(config, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts: Vec<Vec<f64>> = (0..20).map(|i| point(&mut rng, i)).collect();
        for p in &pts {
            w.insert(p).unwrap();
        }
        assert_eq!(w.blocks().len(), 0);
        let got = w.query(&mut SeededRng::new(5)).unwrap();
        let batch = kmeanspp_seed(&Dataset::from_rows(&pts).unwrap(), 3, &mut SeededRng::new(5)).unwrap();
        assert_eq!(got, batch.centers);
    }

    fn replay(config: WindowConfig, n: usize) {
        let window = config.window as u64;
        let bound = config.max_live_points();
        let mut w = WindowClusterer::new(config, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let shift = w.shift() as f64;
        for i in 0..n {
            w.insert(&point(&mut rng, i)).unwrap();
            let expected = w.seen().min(window) as f64;
            assert!(w.live_len() <= bound, "{} > {}", w.live_len(), bound);
            let live = w.live_weight();
            assert!(live >= expected && live < expected + shift);
            let scaled = w.window_points().unwrap().total_weight();
            assert!((scaled - expected).abs() <= 1e-9 * expected);

            let mut previous_end = None;
            for b in w.blocks() {
                assert_eq!(b.points.total_weight(), b.span_len() as f64);
                if let Some(end) = previous_end {
                    assert_eq!(b.start, end);
                }
                previous_end = Some(b.end);
            }
            if let Some(end) = previous_end {
                assert_eq!(end, w.open_span_start());
            }
            if w.is_checkpoint() {
                assert_eq!(live, expected);
                let first = w.blocks().next().map_or(w.open_span_start(), |b| b.start);
                assert_eq!(first, w.window_start());
            }
        }
    }

    #[test]
    fn replay_two_levels() {
        replay(WindowConfig::new(400, 3, 1.0 / 3.0), 2500);
    }

    #[test]
    fn replay_three_levels() {
        replay(WindowConfig::new(3000, 2, 0.25), 9000);
    }

    #[test]
    fn replay_exact_window() {
        replay(WindowConfig::new(6, 2, 0.3), 50);
    }

    #[test]
    fn empty_window_and_dim_errors() {
        let mut w = WindowClusterer::new(WindowConfig::new(50, 2, 0.3), 2).unwrap();
        assert!(matches!(
            w.query(&mut SeededRng::new(0)),
            Err(ClusterError::EmptyStream)
        ));
        assert!(w.insert(&[1.0, 2.0, 3.0]).is_err());
    }
}
