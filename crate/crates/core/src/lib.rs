//! Hard and fuzzy k-means with k-means++ / k-means# seeding, a multi-level
//! cash-register streaming clusterer and a sliding-window clusterer.
//!
//! Modules:
//! - [`geometry`]: points, weighted datasets, center sets, squared distance.
//! - [`potential`]: hard cost, fuzzy memberships, soft centroids and the soft
//!   potential (direct and closed form), plus the `k^{m/(1−m)}` factor.
//! - [`seeding`]: weighted D² sampling, oversampled k-means#, best-of-R.
//! - [`iterate`]: Lloyd and EM loops, EM / EM++ drivers.
//! - [`stream`]: cash-register multi-level clusterer.
//! - [`window`]: sliding-window clusterer.
//! - [`oracle`]: brute-force optimum and inequality checkers.
//! - [`bench`]: dataset loading, synthetic mixtures, EM vs EM++ trials, tables.

pub mod bench;
pub mod error;
pub mod geometry;
pub mod iterate;
pub mod oracle;
pub mod potential;
pub mod seeding;
pub mod stream;
pub mod window;

pub use error::{ClusterError, Result};
pub use geometry::{squared_distance, CenterSet, Dataset, Point, WeightedPoint};
pub use iterate::{em_plus_plus, em_run, em_uniform, lloyd_run, IterationReport, StopRule};
pub use oracle::{brute_force_kmeans, power_mean_check, sandwich_check, BruteForceResult, SandwichReport};
pub use potential::{
    approx_factor, hard_cost, memberships, soft_centroids, soft_cost, soft_cost_closed,
    MembershipRow, SoftParams,
};
pub use seeding::{
    best_of, kmeans_sharp, kmeanspp_seed, sharp_batch_size, uniform_seed, BestOf, SeededRng,
    Seeding, SeedingTrace,
};
pub use stream::{compress_level, LevelBuffer, StreamClusterer, StreamConfig};
pub use window::{SummaryBlock, WindowClusterer, WindowConfig};
