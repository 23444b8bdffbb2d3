//! Separated and spanning sets, their weighted partition functions, and
//! exhaustive oracles on small candidate sets.
//!
//! Separation is strict (`d_n > eps`), and so is spanning (`d_n < eps`).
//! Greedy selections give a lower bound for `P_n` and an upper bound for
//! `Q_n` relative to the candidate set; the exhaustive versions are exact
//! on instances of at most [`BRUTE_FORCE_LIMIT`] points.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::log_sum_exp;
use crate::potentials::AlmostAdditiveSeq;
use crate::systems::{arc_distance, Dynamics, Point};

/// Largest instance the exhaustive oracles accept.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Largest instance a pairwise distance matrix is built for.
pub const INSTANCE_LIMIT: usize = 6000;

/// Which partition function a sample estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Estimator {
    /// `q_n`: infimum weights over a cover join.
    LowerCover = 1,
    /// `Q_n`: spanning sets.
    Spanning = 2,
    /// `P_n`: separated sets.
    Separated = 3,
    /// `p_n`: supremum weights over a cover join.
    UpperCover = 4,
}

impl Estimator {
    pub const ALL: [Estimator; 4] = [
        Estimator::LowerCover,
        Estimator::Spanning,
        Estimator::Separated,
        Estimator::UpperCover,
    ];

    pub fn index(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for Estimator {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Estimator::LowerCover),
            2 => Ok(Estimator::Spanning),
            3 => Ok(Estimator::Separated),
            4 => Ok(Estimator::UpperCover),
            _ => Err(Error::InvalidArgument(format!("estimator must be 1..=4, got {v}"))),
        }
    }
}

impl From<Estimator> for u8 {
    fn from(e: Estimator) -> u8 {
        e.index()
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// The resolution a sample was taken at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Scale {
    /// A metric scale `eps`.
    Eps(f64),
    /// The dyadic scale `2^{-k}`, deflated for strict separation.
    Dyadic(usize),
    /// The cover by cylinders of length `m`.
    Cylinder(usize),
}

impl Scale {
    /// Numeric scale; covers report their diameter on the dyadic metric.
    pub fn value(&self) -> f64 {
        match self {
            Scale::Eps(e) => *e,
            Scale::Dyadic(k) => dyadic_eps(*k),
            Scale::Cylinder(m) => 0.5f64.powi(*m as i32 - 1),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scale::Eps(e) => write!(f, "eps:{e}"),
            Scale::Dyadic(k) => write!(f, "dyadic:{k}"),
            Scale::Cylinder(m) => write!(f, "cylinder:{m}"),
        }
    }
}

/// `2^{-k} (1 - 10^{-6})`.
pub fn dyadic_eps(k: usize) -> f64 {
    0.5f64.powi(k as i32) * (1.0 - 1e-6)
}

/// One entry `n -> log Z_n` of a growth table.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthSample {
    pub estimator: Estimator,
    pub n: usize,
    pub scale: Scale,
    pub log_value: f64,
    /// Exact value (exhaustive or closed form), not a bound.
    pub exact: bool,
    /// `false` when a density precondition could not be guaranteed.
    pub certified: bool,
}

/// A weighted point set with its Bowen distances at one `(n, eps)`.
#[derive(Clone, Debug)]
pub struct SeparationInstance {
    n: usize,
    eps: f64,
    points: Vec<Point>,
    weights: Vec<f64>,
    /// Row-major upper triangle without the diagonal.
    dist: Vec<f64>,
    certified: bool,
}

impl SeparationInstance {
    /// Computes all pairwise `d_n` distances.
    pub fn new<D: Dynamics + Sync + ?Sized>(
        dynamics: &D,
        n: usize,
        eps: f64,
        points: Vec<Point>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if points.len() > INSTANCE_LIMIT {
            return Err(Error::InstanceTooLarge {
                size: points.len(),
                limit: INSTANCE_LIMIT,
            });
        }
        let orbits: Vec<Vec<Point>> = points.iter().map(|p| dynamics.orbit(p, n)).collect::<Result<_>>()?;
        let rows: Vec<Vec<f64>> = (0..points.len())
            .into_par_iter()
            .map(|i| {
                ((i + 1)..points.len())
                    .map(|j| {
                        orbits[i]
                            .iter()
                            .zip(&orbits[j])
                            .try_fold(0.0f64, |acc, (a, b)| Ok(acc.max(dynamics.distance(a, b)?)))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        Self::from_distances(n, eps, points, weights, rows.concat())
    }

    /// Weights `phi_n(x)` and distances along the sequence's own time map.
    pub fn for_potential(phi: &AlmostAdditiveSeq, n: usize, eps: f64, points: Vec<Point>) -> Result<Self> {
        let weights = points.iter().map(|x| phi.eval(n, x)).collect::<Result<Vec<_>>>()?;
        Self::new(phi.time(), n, eps, points, weights)
    }

    /// Builds an instance from a precomputed condensed distance matrix.
    pub fn from_distances(n: usize, eps: f64, points: Vec<Point>, weights: Vec<f64>, dist: Vec<f64>) -> Result<Self> {
        let m = points.len();
        if weights.len() != m {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {m} candidates",
                weights.len()
            )));
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        if dist.len() != m * m.saturating_sub(1) / 2 {
            return Err(Error::InvalidArgument("distance matrix has the wrong size".into()));
        }
        Ok(Self {
            n,
            eps,
            points,
            weights,
            dist,
            certified: true,
        })
    }

    /// Marks the candidate set as not certified dense.
    pub fn uncertified(mut self) -> Self {
        self.certified = false;
        self
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        Self { eps, ..self.clone() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let m = self.points.len();
        self.dist[a * (2 * m - a - 1) / 2 + (b - a - 1)]
    }

    fn separated(&self, i: usize, j: usize) -> bool {
        self.distance(i, j) > self.eps
    }

    fn spans(&self, i: usize, j: usize) -> bool {
        self.distance(i, j) < self.eps
    }

    fn log_weight(&self, idx: &[usize]) -> f64 {
        let w: Vec<f64> = idx.iter().map(|&i| self.weights[i]).collect();
        log_sum_exp(&w)
    }

    fn sample(&self, estimator: Estimator, log_value: f64, exact: bool) -> GrowthSample {
        GrowthSample {
            estimator,
            n: self.n,
            scale: Scale::Eps(self.eps),
            log_value,
            exact,
            certified: self.certified,
        }
    }

    fn check_oracle_size(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if self.len() > BRUTE_FORCE_LIMIT {
            return Err(Error::InstanceTooLarge {
                size: self.len(),
                limit: BRUTE_FORCE_LIMIT,
            });
        }
        Ok(())
    }

    /// Bitmasks of the pairs that may not share a separated set.
    fn conflict_masks(&self) -> Vec<u32> {
        (0..self.len())
            .map(|i| {
                (0..self.len())
                    .filter(|&j| j != i && !self.separated(i, j))
                    .fold(0u32, |m, j| m | 1 << j)
            })
            .collect()
    }

    /// Bitmasks of the candidates each point spans (itself included).
    fn ball_masks(&self) -> Vec<u32> {
        (0..self.len())
            .map(|i| {
                (0..self.len())
                    .filter(|&j| self.spans(i, j))
                    .fold(0u32, |m, j| m | 1 << j)
            })
            .collect()
    }
}

/// Visiting order for [`greedy_separated`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreedyOrder {
    ByWeightDesc,
    ByIndex,
}

/// A maximal `(n, eps)`-separated subset, as candidate indices in the
/// order they were accepted.
pub fn greedy_separated(inst: &SeparationInstance, order: GreedyOrder) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..inst.len()).collect();
    if order == GreedyOrder::ByWeightDesc {
        idx.sort_by(|&a, &b| inst.weights[b].total_cmp(&inst.weights[a]).then(a.cmp(&b)));
    }
    let mut chosen: Vec<usize> = Vec::new();
    for i in idx {
        if chosen.iter().all(|&j| inst.separated(i, j)) {
            chosen.push(i);
        }
    }
    chosen
}

/// A spanning subset by greedy domination: repeatedly take the candidate
/// spanning the most uncovered points, breaking ties by lower weight and
/// then lower index.
pub fn greedy_spanning(inst: &SeparationInstance) -> Vec<usize> {
    let m = inst.len();
    // spanning is symmetric, so one list serves both directions
    let balls: Vec<Vec<u32>> = (0..m)
        .into_par_iter()
        .map(|i| (0..m).filter(|&j| inst.spans(i, j)).map(|j| j as u32).collect())
        .collect();
    let mut gain: Vec<usize> = balls.iter().map(Vec::len).collect();
    let mut covered = vec![false; m];
    let mut remaining = m;
    let mut chosen = Vec::new();
    while remaining > 0 {
        let mut best = 0;
        for i in 1..m {
            if gain[i] > gain[best] || gain[i] == gain[best] && inst.weights[i].total_cmp(&inst.weights[best]).is_lt() {
                best = i;
            }
        }
        for &j in &balls[best] {
            let j = j as usize;
            if !covered[j] {
                covered[j] = true;
                remaining -= 1;
                for &i in &balls[j] {
                    gain[i as usize] -= 1;
                }
            }
        }
        chosen.push(best);
    }
    chosen
}

/// Greedy lower bound for `log P_n` on the candidates.
pub fn p_lower(inst: &SeparationInstance) -> Result<GrowthSample> {
    if inst.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let set = greedy_separated(inst, GreedyOrder::ByWeightDesc);
    Ok(inst.sample(Estimator::Separated, inst.log_weight(&set), false))
}

/// Greedy upper bound for `log Q_n` relative to the candidates.
pub fn q_upper(inst: &SeparationInstance) -> Result<GrowthSample> {
    if inst.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let set = greedy_spanning(inst);
    Ok(inst.sample(Estimator::Spanning, inst.log_weight(&set), false))
}

/// Weights shifted so the largest is `e^0`, with the shift.
fn linear_weights(weights: &[f64]) -> (Vec<f64>, f64) {
    let top = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (weights.iter().map(|w| (w - top).exp()).collect(), top)
}

/// Maximum total cost of a subset with no two members in conflict.
fn max_independent(conflict: &[u32], cost: &[f64]) -> f64 {
    let m = conflict.len();
    let mut best = vec![0.0f64; 1 << m];
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        let without = mask & (mask - 1);
        let take = cost[low] + best[without & !(conflict[low] as usize)];
        best[mask] = best[without].max(take);
    }
    best[(1 << m) - 1]
}

/// Minimum total cost of sets covering every element of `universe`.
///
/// `sets[i]` are bitmasks over at most [`BRUTE_FORCE_LIMIT`] elements.
/// Returns infinity when no cover exists.
pub fn min_weight_cover(sets: &[u32], cost: &[f64], universe: u32) -> f64 {
    let m = 32 - universe.leading_zeros() as usize;
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (s, &mask) in sets.iter().enumerate() {
        for (b, list) in containing.iter_mut().enumerate() {
            if mask >> b & 1 == 1 {
                list.push(s);
            }
        }
    }
    let mut best = vec![f64::INFINITY; 1 << m];
    best[0] = 0.0;
    for mask in 1usize..(1 << m) {
        if mask & !(universe as usize) != 0 {
            continue;
        }
        let low = mask.trailing_zeros() as usize;
        let mut v = f64::INFINITY;
        for &s in &containing[low] {
            let rest = mask & !(sets[s] as usize);
            v = v.min(cost[s] + best[rest]);
        }
        best[mask] = v;
    }
    best[universe as usize]
}

/// Exact `log P_n` over all separated subsets of the candidates.
pub fn brute_force_p(inst: &SeparationInstance) -> Result<GrowthSample> {
    inst.check_oracle_size()?;
    let (cost, top) = linear_weights(&inst.weights);
    let total = max_independent(&inst.conflict_masks(), &cost);
    Ok(inst.sample(Estimator::Separated, top + total.ln(), true))
}

/// Exact `log Q_n` over all subsets spanning the candidates.
pub fn brute_force_q(inst: &SeparationInstance) -> Result<GrowthSample> {
    inst.check_oracle_size()?;
    let (cost, top) = linear_weights(&inst.weights);
    let universe = ((1u64 << inst.len()) - 1) as u32;
    let total = min_weight_cover(&inst.ball_masks(), &cost, universe);
    Ok(inst.sample(Estimator::Spanning, top + total.ln(), true))
}

/// Exact `(s, r)`: the smallest spanning and largest separated subsets.
pub fn count_spanning_separated(inst: &SeparationInstance) -> Result<(usize, usize)> {
    inst.check_oracle_size()?;
    let ones = vec![1.0; inst.len()];
    let universe = ((1u64 << inst.len()) - 1) as u32;
    let s = min_weight_cover(&inst.ball_masks(), &ones, universe);
    let r = max_independent(&inst.conflict_masks(), &ones);
    Ok((s.round() as usize, r.round() as usize))
}

/// A finite open cover of a compact space.
pub trait OpenCover {
    fn len(&self) -> usize;
    fn contains(&self, element: usize, x: &Point) -> Result<bool>;
    /// Every set of diameter below this lies inside some element.
    fn lebesgue_number(&self) -> f64;
    /// Largest element diameter.
    fn diameter(&self) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `count` open arcs `(j/count - eta, (j+1)/count + eta)` of the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcCover {
    count: usize,
    eta: f64,
}

impl ArcCover {
    pub fn new(count: usize, eta: f64) -> Result<Self> {
        if count == 0 || !(eta > 0.0) {
            return Err(Error::InvalidArgument("arc cover needs count >= 1 and eta > 0".into()));
        }
        Ok(Self { count, eta })
    }

    /// The coarsest arc cover whose diameter is at most `eps`.
    pub fn with_diameter(eps: f64) -> Result<Self> {
        let eta = eps / 8.0;
        let count = (1.0 / (eps - 2.0 * eta)).ceil() as usize;
        Self::new(count, eta)
    }
}

impl OpenCover for ArcCover {
    fn len(&self) -> usize {
        self.count
    }

    fn contains(&self, element: usize, x: &Point) -> Result<bool> {
        let v = x
            .as_real()
            .ok_or_else(|| Error::InvalidPoint(format!("arc cover needs a circle point, got {x}")))?;
        let width = 1.0 / self.count as f64;
        let centre = (element as f64 + 0.5) * width;
        Ok(arc_distance(v, centre) < width / 2.0 + self.eta)
    }

    fn lebesgue_number(&self) -> f64 {
        self.eta
    }

    fn diameter(&self) -> f64 {
        (1.0 / self.count as f64 + 2.0 * self.eta).min(0.5)
    }
}

/// Exact `(log q_n, log p_n)` of a cover join, with the join elements
/// replaced by their traces on the candidate points and the infimum and
/// supremum taken over those traces.
pub fn cover_oracle<D: Dynamics + ?Sized>(
    dynamics: &D,
    phi: &AlmostAdditiveSeq,
    cover: &dyn OpenCover,
    n: usize,
    points: &[Point],
) -> Result<(GrowthSample, GrowthSample)> {
    if points.is_empty() {
        return Err(Error::EmptyInstance);
    }
    if points.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::InstanceTooLarge {
            size: points.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let weights: Vec<f64> = points.iter().map(|x| phi.eval(n, x)).collect::<Result<_>>()?;
    // membership[i][j]: candidates whose i-th iterate lies in element j
    let mut membership = vec![vec![0u32; cover.len()]; n];
    for (p, x) in points.iter().enumerate() {
        for (i, y) in dynamics.orbit(x, n)?.iter().enumerate() {
            for j in 0..cover.len() {
                if cover.contains(j, y)? {
                    membership[i][j] |= 1 << p;
                }
            }
        }
    }
    let universe = ((1u64 << points.len()) - 1) as u32;
    let mut traces: HashSet<u32> = HashSet::from([universe]);
    for level in &membership {
        let mut next = HashSet::new();
        for &t in &traces {
            for &m in level {
                if t & m != 0 {
                    next.insert(t & m);
                }
            }
        }
        traces = next;
    }
    let mut traces: Vec<u32> = traces.into_iter().collect();
    traces.sort_unstable();
    let (lin, top) = linear_weights(&weights);
    let extreme = |pick: fn(f64, f64) -> f64, init: f64| -> Vec<f64> {
        traces
            .iter()
            .map(|&t| {
                (0..points.len())
                    .filter(|&p| t >> p & 1 == 1)
                    .fold(init, |acc, p| pick(acc, lin[p]))
            })
            .collect()
    };
    let inf_cost = extreme(f64::min, f64::INFINITY);
    let sup_cost = extreme(f64::max, 0.0);
    let q = min_weight_cover(&traces, &inf_cost, universe);
    let p = min_weight_cover(&traces, &sup_cost, universe);
    let scale = Scale::Eps(cover.diameter());
    let sample = |estimator, v: f64| GrowthSample {
        estimator,
        n,
        scale,
        log_value: top + v.ln(),
        exact: true,
        certified: true,
    };
    Ok((sample(Estimator::LowerCover, q), sample(Estimator::UpperCover, p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::SystemModel;
    use proptest::prelude::*;

    fn rotation_instance(eps: f64, weights: Vec<f64>) -> SeparationInstance {
        let r = SystemModel::rotation(0.3).unwrap();
        let pts = [0.0, 0.3, 0.6, 0.9].map(Point::real).to_vec();
        SeparationInstance::new(&r, 1, eps, pts, weights).unwrap()
    }

    #[test]
    fn four_point_rotation() {
        let inst = rotation_instance(0.25, vec![0.0; 4]);
        assert_eq!(greedy_separated(&inst, GreedyOrder::ByIndex), vec![0, 1, 2]);
        let p = p_lower(&inst).unwrap();
        assert!((p.log_value - 3f64.ln()).abs() < 1e-12);
        assert!(!p.exact);
        assert!((brute_force_p(&inst).unwrap().log_value - 3f64.ln()).abs() < 1e-12);
        let (s, r) = count_spanning_separated(&inst).unwrap();
        assert!(s <= r);

        let wide = inst.with_eps(0.5);
        assert_eq!(brute_force_q(&wide).unwrap().log_value, 0.0);
        assert_eq!(q_upper(&wide).unwrap().log_value, 0.0);
    }

    #[test]
    fn degenerate_instances() {
        let one = SeparationInstance::from_distances(1, 0.1, vec![Point::real(0.2)], vec![0.7], vec![]).unwrap();
        assert_eq!(brute_force_p(&one).unwrap().log_value, 0.7);
        assert_eq!(count_spanning_separated(&one).unwrap(), (1, 1));
        let empty = SeparationInstance::from_distances(1, 0.1, vec![], vec![], vec![]).unwrap();
        assert_eq!(p_lower(&empty).unwrap_err(), Error::EmptyInstance);

        // a pair at distance 2 eps is separated
        let pair = SeparationInstance::from_distances(
            1,
            0.1,
            vec![Point::real(0.0), Point::real(0.2)],
            vec![0.5, -1.0],
            vec![0.2],
        )
        .unwrap();
        let expect = (0.5f64.exp() + (-1.0f64).exp()).ln();
        assert!((brute_force_p(&pair).unwrap().log_value - expect).abs() < 1e-12);
        // below every pairwise distance, every point must span itself
        let tight = pair.with_eps(0.05);
        assert!((brute_force_q(&tight).unwrap().log_value - expect).abs() < 1e-12);
        // ties at exactly eps neither separate nor span
        let tie = pair.with_eps(0.2);
        assert_eq!(brute_force_p(&tie).unwrap().log_value, 0.5);
        assert!((brute_force_q(&tie).unwrap().log_value - expect).abs() < 1e-12);

        let big: Vec<Point> = (0..21).map(|i| Point::real(i as f64 / 21.0)).collect();
        let r = SystemModel::rotation(0.1).unwrap();
        let inst = SeparationInstance::new(&r, 1, 0.01, big, vec![0.0; 21]).unwrap();
        assert!(matches!(brute_force_p(&inst), Err(Error::InstanceTooLarge { .. })));
    }

    #[test]
    fn wide_eps_gives_singleton() {
        let inst = rotation_instance(0.6, vec![0.0, 2.0, 1.0, 0.0]);
        assert_eq!(greedy_separated(&inst, GreedyOrder::ByWeightDesc), vec![1]);
    }

    #[test]
    fn cover_trace_sums() {
        let r = SystemModel::rotation(0.25).unwrap();
        let phi = AlmostAdditiveSeq::zero(&r);
        let pts: Vec<Point> = (0..8).map(|i| Point::real(i as f64 / 8.0)).collect();
        // four arcs of width 1/4 plus a thin collar; each odd eighth lies in
        // a single arc, so all four are needed
        let cover = ArcCover::new(4, 0.01).unwrap();
        let (q, p) = cover_oracle(&r, &phi, &cover, 1, &pts).unwrap();
        assert!((q.log_value - 4f64.ln()).abs() < 1e-12);
        assert_eq!(q.log_value, p.log_value);
        assert!(cover.diameter() <= 0.27);
    }

    #[test]
    fn arc_cover_with_diameter() {
        for eps in [0.5, 0.25, 0.1, 0.03] {
            let c = ArcCover::with_diameter(eps).unwrap();
            assert!(c.diameter() <= eps + 1e-15);
        }
    }

    fn random_instance(seed: u64, m: usize) -> SeparationInstance {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = SystemModel::Doubling;
        let pts: Vec<Point> = (0..m).map(|_| Point::real(rng.gen())).collect();
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
        SeparationInstance::new(&d, rng.gen_range(1..4), rng.gen_range(0.05..0.5), pts, w).unwrap()
    }

    proptest! {
        #[test]
        fn oracle_sandwich(seed in 0u64..10_000, m in 1usize..12) {
            let inst = random_instance(seed, m);
            let p_exact = brute_force_p(&inst).unwrap().log_value;
            let q_exact = brute_force_q(&inst).unwrap().log_value;
            prop_assert!(q_exact <= p_exact + 1e-9);
            prop_assert!(p_lower(&inst).unwrap().log_value <= p_exact + 1e-9);
            prop_assert!(q_upper(&inst).unwrap().log_value >= q_exact - 1e-9);
            let (s, r) = count_spanning_separated(&inst).unwrap();
            let (s_half, _) = count_spanning_separated(&inst.with_eps(inst.eps() / 2.0)).unwrap();
            prop_assert!(s <= r && r <= s_half);
        }

        #[test]
        fn greedy_outputs_are_valid(seed in 0u64..10_000, m in 1usize..30) {
            let inst = random_instance(seed, m);
            let sep = greedy_separated(&inst, GreedyOrder::ByWeightDesc);
            for (a, &i) in sep.iter().enumerate() {
                for &j in &sep[a + 1..] {
                    prop_assert!(inst.distance(i, j) > inst.eps());
                }
            }
            // maximal, hence spanning at the same scale with <= instead of <
            for i in 0..inst.len() {
                prop_assert!(sep.iter().any(|&j| inst.distance(i, j) <= inst.eps()));
            }
            let span = greedy_spanning(&inst);
            for i in 0..inst.len() {
                prop_assert!(span.iter().any(|&j| inst.distance(i, j) < inst.eps()));
            }
        }
    }
}
