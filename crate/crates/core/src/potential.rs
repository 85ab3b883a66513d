//! Hard and fuzzy k-means potentials.
//!
//! Fuzzy memberships follow `u_i(x) = 1 / Σ_j (d(c_i,x) / d(c_j,x))^{2/m}` with
//! `0 < m < 1`. Every formula multiplies per-point terms by the point weight.
//!
//! Powers of distances are never formed directly: each point's squared
//! distances are divided by the smallest one first, so all raised quantities
//! lie in `(0, 1]` and nothing overflows even when `2/m` is large.

use crate::error::{ClusterError, Result};
use crate::geometry::{nearest, sq_dist, CenterSet, Dataset};

/// Fuzziness `m ∈ (0, 1)` together with the derived exponent `g = 1/m − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftParams {
    m: f64,
    g: f64,
}

impl SoftParams {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(ClusterError::InvalidFuzziness(m));
        }
        Ok(Self { m, g: 1.0 / m - 1.0 })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Exponent applied to squared-distance ratios, `1/m`.
    #[inline]
    fn inv_m(&self) -> f64 {
        1.0 / self.m
    }
}

/// Membership distribution of one point over `k` centers.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipRow(Vec<f64>);

impl MembershipRow {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// `Σ_x w(x) · min_c d(x, c)²`.
pub fn hard_cost(data: &Dataset, centers: &CenterSet) -> Result<f64> {
    data.ensure_nonempty()?;
    centers.ensure_compatible(data)?;
    Ok(data
        .iter()
        .map(|(x, w)| w * nearest(x, centers).1)
        .sum())
}

/// Fills `out` with the memberships implied by squared distances `d2`.
///
/// A point sitting on one or more centers gets its mass split evenly across
/// those centers.
#[inline]
pub(crate) fn memberships_from_sq(d2: &[f64], params: &SoftParams, out: &mut [f64]) {
    debug_assert_eq!(d2.len(), out.len());
    let zeros = d2.iter().filter(|&&d| d == 0.0).count();
    if zeros > 0 {
        let share = 1.0 / zeros as f64;
        for (u, &d) in out.iter_mut().zip(d2) {
            *u = if d == 0.0 { share } else { 0.0 };
        }
        return;
    }
    let d_min = d2.iter().copied().fold(f64::INFINITY, f64::min);
    let inv_m = params.inv_m();
    let mut total = 0.0;
    for (u, &d) in out.iter_mut().zip(d2) {
        *u = (d_min / d).powf(inv_m);
        total += *u;
    }
    for u in out.iter_mut() {
        *u /= total;
    }
}

/// Fuzzy memberships of `x` with respect to `centers`.
pub fn memberships(x: &[f64], centers: &CenterSet, params: &SoftParams) -> Result<MembershipRow> {
    if centers.is_empty() {
        return Err(ClusterError::EmptyCenters);
    }
    if x.len() != centers.dim() {
        return Err(ClusterError::DimensionMismatch {
            expected: centers.dim(),
            got: x.len(),
        });
    }
    let d2: Vec<f64> = centers.iter().map(|c| sq_dist(x, c)).collect();
    let mut row = vec![0.0; d2.len()];
    memberships_from_sq(&d2, params, &mut row);
    Ok(MembershipRow(row))
}

/// One E+M pass: returns the membership-weighted centroids and the soft
/// potential of the *input* centers, computed from the same memberships.
///
/// A center that receives zero membership mass keeps its previous position.
pub(crate) fn em_step(
    data: &Dataset,
    centers: &CenterSet,
    params: &SoftParams,
) -> (CenterSet, f64) {
    let k = centers.len();
    let dim = data.dim();
    let mut sums = vec![0.0; k * dim];
    let mut mass = vec![0.0; k];
    let mut d2 = vec![0.0; k];
    let mut u = vec![0.0; k];
    let mut phi = 0.0;

    for (x, w) in data.iter() {
        for (d, c) in d2.iter_mut().zip(centers.iter()) {
            *d = sq_dist(x, c);
        }
        memberships_from_sq(&d2, params, &mut u);
        let mut point_cost = 0.0;
        for i in 0..k {
            let wu = w * u[i];
            if wu == 0.0 {
                continue;
            }
            point_cost += u[i] * d2[i];
            mass[i] += wu;
            for (s, xj) in sums[i * dim..(i + 1) * dim].iter_mut().zip(x) {
                *s += wu * xj;
            }
        }
        phi += w * point_cost;
    }

    let mut next = centers.clone();
    for i in 0..k {
        if mass[i] > 0.0 {
            let inv = 1.0 / mass[i];
            for (c, s) in next.center_mut(i).iter_mut().zip(&sums[i * dim..(i + 1) * dim]) {
                *c = s * inv;
            }
        }
    }
    (next, phi)
}

/// Membership-weighted centroids `c_i = Σ w u_i(x) x / Σ w u_i(x)`.
pub fn soft_centroids(
    data: &Dataset,
    centers: &CenterSet,
    params: &SoftParams,
) -> Result<CenterSet> {
    data.ensure_nonempty()?;
    centers.ensure_compatible(data)?;
    Ok(em_step(data, centers, params).0)
}

/// Soft potential `Σ_x w(x) Σ_i u_i(x) d(x, c_i)²`, evaluated term by term.
pub fn soft_cost(data: &Dataset, centers: &CenterSet, params: &SoftParams) -> Result<f64> {
    data.ensure_nonempty()?;
    centers.ensure_compatible(data)?;
    let k = centers.len();
    let mut d2 = vec![0.0; k];
    let mut u = vec![0.0; k];
    let mut phi = 0.0;
    for (x, w) in data.iter() {
        for (d, c) in d2.iter_mut().zip(centers.iter()) {
            *d = sq_dist(x, c);
        }
        memberships_from_sq(&d2, params, &mut u);
        let point_cost: f64 = u.iter().zip(&d2).map(|(ui, di)| ui * di).sum();
        phi += w * point_cost;
    }
    Ok(phi)
}

/// Soft potential through the closed form
/// `Σ_x w(x) · Σ_i d_i^{−2g} / Σ_i d_i^{−2/m}`.
///
/// Writing `ρ_i = d_min² / d_i²` the per-point term is
/// `d_min² · Σ ρ_i^g / Σ ρ_i^{1/m}`; a point on a center contributes 0.
pub fn soft_cost_closed(
    data: &Dataset,
    centers: &CenterSet,
    params: &SoftParams,
) -> Result<f64> {
    data.ensure_nonempty()?;
    centers.ensure_compatible(data)?;
    let g = params.g();
    let inv_m = params.inv_m();
    let mut d2 = vec![0.0; centers.len()];
    let mut phi = 0.0;
    for (x, w) in data.iter() {
        for (d, c) in d2.iter_mut().zip(centers.iter()) {
            *d = sq_dist(x, c);
        }
        let d_min = d2.iter().copied().fold(f64::INFINITY, f64::min);
        if d_min == 0.0 {
            continue;
        }
        let (mut num, mut den) = (0.0, 0.0);
        for &d in &d2 {
            let rho = d_min / d;
            num += rho.powf(g);
            den += rho.powf(inv_m);
        }
        phi += w * d_min * num / den;
    }
    Ok(phi)
}

/// Competitive factor `k^{m/(1−m)}` of hard k-means centers for the soft
/// objective. `k` is clamped to at least 1.
pub fn approx_factor(k: usize, params: &SoftParams) -> f64 {
    (k.max(1) as f64).powf(params.m() / (1.0 - params.m()))
}
