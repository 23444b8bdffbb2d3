//! Concrete compact dynamical systems `(X, d, T)`.
//!
//! Shift spaces use the dyadic metric `rho(x, y) = sum_n [x_n != y_n] / 2^n`,
//! the doubling map and rotations use arc length on `R/Z`, and contractions
//! act on `[0, 1]` with the absolute value.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Default cap on the number of grid points a candidate set may hold.
pub const DEFAULT_CANDIDATE_BUDGET: usize = 2_000_000;

/// A finitely represented state.
///
/// A `Word` of length `L` reads `symbols[i]` at index `i < L` and `tail`
/// everywhere after.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Word { symbols: Vec<u8>, tail: u8 },
    Real(f64),
}

impl Point {
    pub fn word(symbols: impl Into<Vec<u8>>, tail: u8) -> Self {
        Point::Word {
            symbols: symbols.into(),
            tail,
        }
    }

    pub fn real(x: f64) -> Self {
        Point::Real(x)
    }

    /// Coordinate `i` of a symbolic point.
    pub fn symbol(&self, i: usize) -> Option<u8> {
        match self {
            Point::Word { symbols, tail } => Some(symbols.get(i).copied().unwrap_or(*tail)),
            Point::Real(_) => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Point::Real(x) => Some(*x),
            Point::Word { .. } => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Word { symbols, tail } => {
                for s in symbols {
                    write!(f, "{s}.")?;
                }
                write!(f, "({tail})")
            }
            Point::Real(x) => write!(f, "{x}"),
        }
    }
}

/// 0/1 transition matrix of a subshift of finite type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<u8>>,
}

impl TransitionMatrix {
    /// Validates squareness, 0/1 entries and the absence of dead states.
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 || k > u8::MAX as usize {
            return Err(Error::InvalidSystem(format!(
                "transition matrix must have 1..=255 rows, got {k}"
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidSystem(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            if row.iter().any(|&e| e > 1) {
                return Err(Error::InvalidSystem(format!("row {i} has a non 0/1 entry")));
            }
            if !row.contains(&1) {
                return Err(Error::InvalidSystem(format!("symbol {i} is a dead state")));
            }
        }
        Ok(Self { rows })
    }

    pub fn golden_mean() -> Self {
        Self {
            rows: vec![vec![1, 1], vec![1, 0]],
        }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn allowed(&self, a: u8, b: u8) -> bool {
        self.rows[a as usize][b as usize] == 1
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }
}

/// The model systems.
#[derive(Clone, Debug, PartialEq)]
pub enum SystemModel {
    FullShift { k: u8 },
    Sft(TransitionMatrix),
    Doubling,
    Rotation { theta: f64 },
    Contraction { c: f64, fixed: f64 },
}

impl SystemModel {
    pub fn full_shift(k: u8) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSystem("alphabet must be nonempty".into()));
        }
        Ok(SystemModel::FullShift { k })
    }

    pub fn sft(rows: Vec<Vec<u8>>) -> Result<Self> {
        let m = TransitionMatrix::new(rows)?;
        let sys = SystemModel::Sft(m);
        // every symbol must reach a constant tail so representatives exist
        for a in 0..sys.alphabet_size().unwrap_or(0) {
            sys.bridge_to_tail(a as u8)?;
        }
        Ok(sys)
    }

    pub fn rotation(theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidSystem(format!("rotation angle {theta} not in [0,1)")));
        }
        Ok(SystemModel::Rotation { theta })
    }

    pub fn contraction(c: f64, fixed: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidSystem(format!("contraction rate {c} not in (0,1)")));
        }
        if !(0.0..=1.0).contains(&fixed) {
            return Err(Error::InvalidSystem(format!("fixed point {fixed} not in [0,1]")));
        }
        Ok(SystemModel::Contraction { c, fixed })
    }

    /// Short stable name used in reports and CSV output.
    pub fn label(&self) -> String {
        match self {
            SystemModel::FullShift { k } => format!("fullshift({k})"),
            SystemModel::Sft(m) => {
                let rows: Vec<String> = m
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(|e| e.to_string()).collect())
                    .collect();
                format!("sft({})", rows.join("/"))
            }
            SystemModel::Doubling => "doubling".into(),
            SystemModel::Rotation { theta } => format!("rotation({theta})"),
            SystemModel::Contraction { c, fixed } => format!("contraction({c};{fixed})"),
        }
    }

    pub fn is_shift(&self) -> bool {
        matches!(self, SystemModel::FullShift { .. } | SystemModel::Sft(_))
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, SystemModel::Doubling | SystemModel::Rotation { .. })
    }

    pub fn is_invertible(&self) -> bool {
        matches!(self, SystemModel::Rotation { .. })
    }

    pub fn alphabet_size(&self) -> Option<usize> {
        match self {
            SystemModel::FullShift { k } => Some(*k as usize),
            SystemModel::Sft(m) => Some(m.size()),
            _ => None,
        }
    }

    /// Whether `b` may follow `a`.
    pub fn allowed(&self, a: u8, b: u8) -> bool {
        match self {
            SystemModel::FullShift { .. } => true,
            SystemModel::Sft(m) => m.allowed(a, b),
            _ => false,
        }
    }

    /// Lipschitz constant of `T` for the system metric.
    pub fn lipschitz(&self) -> f64 {
        match self {
            SystemModel::FullShift { .. } | SystemModel::Sft(_) | SystemModel::Doubling => 2.0,
            SystemModel::Rotation { .. } => 1.0,
            SystemModel::Contraction { c, .. } => *c,
        }
    }

    fn mismatch(&self, x: &Point) -> Error {
        Error::VariantMismatch {
            system: self.label(),
            point: x.to_string(),
        }
    }

    /// Checks that `x` is a valid state of this system.
    pub fn check_point(&self, x: &Point) -> Result<()> {
        match (self, x) {
            (SystemModel::FullShift { k }, Point::Word { symbols, tail }) => {
                if symbols.iter().chain(std::iter::once(tail)).any(|s| s >= k) {
                    return Err(Error::InvalidPoint(format!("{x} has a symbol outside 0..{k}")));
                }
                Ok(())
            }
            (SystemModel::Sft(m), Point::Word { symbols, tail }) => {
                let k = m.size() as u8;
                if symbols.iter().chain(std::iter::once(tail)).any(|&s| s >= k) {
                    return Err(Error::InvalidPoint(format!("{x} has a symbol outside 0..{k}")));
                }
                let mut prev: Option<u8> = None;
                for &s in symbols.iter().chain([*tail, *tail].iter()) {
                    if let Some(p) = prev {
                        if !m.allowed(p, s) {
                            return Err(Error::InvalidPoint(format!("{x} is not admissible")));
                        }
                    }
                    prev = Some(s);
                }
                Ok(())
            }
            (SystemModel::Doubling | SystemModel::Rotation { .. }, Point::Real(v)) => {
                if (0.0..1.0).contains(v) {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint(format!("{v} not in [0,1)")))
                }
            }
            (SystemModel::Contraction { .. }, Point::Real(v)) => {
                if (0.0..=1.0).contains(v) {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint(format!("{v} not in [0,1]")))
                }
            }
            _ => Err(self.mismatch(x)),
        }
    }

    /// Evaluates `T(x)`.
    pub fn apply(&self, x: &Point) -> Result<Point> {
        match (self, x) {
            (SystemModel::FullShift { .. } | SystemModel::Sft(_), Point::Word { symbols, tail }) => {
                let rest = if symbols.is_empty() {
                    Vec::new()
                } else {
                    symbols[1..].to_vec()
                };
                Ok(Point::Word {
                    symbols: rest,
                    tail: *tail,
                })
            }
            (SystemModel::Doubling, Point::Real(v)) => {
                let y = 2.0 * v;
                Ok(Point::Real(if y >= 1.0 { y - 1.0 } else { y }))
            }
            (SystemModel::Rotation { theta }, Point::Real(v)) => Ok(Point::Real(wrap(v + theta))),
            (SystemModel::Contraction { c, fixed }, Point::Real(v)) => Ok(Point::Real(fixed + c * (v - fixed))),
            _ => Err(self.mismatch(x)),
        }
    }

    /// Evaluates `T^{-1}(x)` for invertible systems.
    pub fn apply_inverse(&self, x: &Point) -> Result<Point> {
        match (self, x) {
            (SystemModel::Rotation { theta }, Point::Real(v)) => Ok(Point::Real(wrap(v - theta))),
            (SystemModel::Rotation { .. }, _) => Err(self.mismatch(x)),
            _ => Err(Error::NotInvertible(self.label())),
        }
    }

    /// The base metric `d(x, y)`.
    pub fn metric(&self, x: &Point, y: &Point) -> Result<f64> {
        match (self, x, y) {
            (
                SystemModel::FullShift { .. } | SystemModel::Sft(_),
                Point::Word { symbols: xs, tail: xt },
                Point::Word { symbols: ys, tail: yt },
            ) => Ok(dyadic_distance(xs, *xt, ys, *yt)),
            (SystemModel::Doubling | SystemModel::Rotation { .. }, Point::Real(a), Point::Real(b)) => {
                Ok(arc_distance(*a, *b))
            }
            (SystemModel::Contraction { .. }, Point::Real(a), Point::Real(b)) => Ok((a - b).abs()),
            (_, Point::Real(_), _) | (_, Point::Word { .. }, _) => {
                if self.check_point(x).is_err() {
                    Err(self.mismatch(x))
                } else {
                    Err(self.mismatch(y))
                }
            }
        }
    }

    /// Smallest self-looping symbol reachable from `from`, with the shortest
    /// path leading to it (excluding `from`).
    fn bridge_to_tail(&self, from: u8) -> Result<(Vec<u8>, u8)> {
        let k = self
            .alphabet_size()
            .ok_or_else(|| Error::Unsupported(format!("{} has no alphabet", self.label())))?;
        let loops: Vec<u8> = (0..k as u8).filter(|&s| self.allowed(s, s)).collect();
        if self.allowed(from, from) && loops.first() == Some(&from) {
            return Ok((Vec::new(), from));
        }
        // BFS over symbols; parents reconstruct shortest paths.
        let mut parent: Vec<Option<u8>> = vec![None; k];
        let mut seen = vec![false; k];
        let mut queue = VecDeque::new();
        for b in 0..k as u8 {
            if self.allowed(from, b) {
                seen[b as usize] = true;
                queue.push_back(b);
            }
        }
        let mut order = Vec::new();
        while let Some(a) = queue.pop_front() {
            order.push(a);
            for b in 0..k as u8 {
                if self.allowed(a, b) && !seen[b as usize] {
                    seen[b as usize] = true;
                    parent[b as usize] = Some(a);
                    queue.push_back(b);
                }
            }
        }
        let target = loops
            .iter()
            .copied()
            .find(|&s| s == from && self.allowed(from, from) || seen[s as usize])
            .ok_or_else(|| {
                Error::Unsupported(format!(
                    "no constant tail reachable from symbol {from} in {}",
                    self.label()
                ))
            })?;
        if target == from && self.allowed(from, from) {
            return Ok((Vec::new(), from));
        }
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = parent[cur as usize] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        // drop the tail symbol itself: it is carried by `tail`
        path.pop();
        Ok((path, target))
    }

    /// The canonical point of the cylinder `[word]`: the word followed by the
    /// shortest admissible bridge to the smallest reachable constant tail.
    pub fn representative(&self, word: &[u8]) -> Result<Point> {
        let k = self
            .alphabet_size()
            .ok_or_else(|| Error::Unsupported(format!("{} is not a shift", self.label())))?;
        if word.iter().any(|&s| s as usize >= k) {
            return Err(Error::InvalidPoint(format!("word {word:?} outside alphabet")));
        }
        let Some(&last) = word.last() else {
            let tail = (0..k as u8)
                .find(|&s| self.allowed(s, s))
                .ok_or_else(|| Error::Unsupported("no self-looping symbol".into()))?;
            return Ok(Point::word(Vec::new(), tail));
        };
        let (bridge, tail) = self.bridge_to_tail(last)?;
        let mut symbols = word.to_vec();
        symbols.extend(bridge);
        Ok(Point::Word { symbols, tail })
    }

    /// All admissible words of length `len`, in lexicographic order.
    pub fn admissible_words(&self, len: usize) -> Result<Vec<Vec<u8>>> {
        let k = self
            .alphabet_size()
            .ok_or_else(|| Error::Unsupported(format!("{} is not a shift", self.label())))?;
        let mut words: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(words.len() * k);
            for w in &words {
                for b in 0..k as u8 {
                    if w.last().is_none_or(|&a| self.allowed(a, b)) {
                        let mut v = w.clone();
                        v.push(b);
                        next.push(v);
                    }
                }
            }
            words = next;
        }
        Ok(words)
    }

    /// Number of admissible words of length `len` (saturating).
    pub fn count_words(&self, len: usize) -> u128 {
        let Some(k) = self.alphabet_size() else {
            return 0;
        };
        if len == 0 {
            return 1;
        }
        let mut v = vec![1u128; k];
        for _ in 1..len {
            let mut next = vec![0u128; k];
            for a in 0..k {
                for (b, slot) in next.iter_mut().enumerate() {
                    if self.allowed(a as u8, b as u8) {
                        *slot = slot.saturating_add(v[a]);
                    }
                }
            }
            v = next;
        }
        v.iter().fold(0u128, |acc, x| acc.saturating_add(*x))
    }

    /// A deterministic candidate set that is `eps/2`-dense in the Bowen
    /// metric `d_n`. Fails when the required size exceeds `budget`.
    pub fn candidate_set(&self, n: usize, eps: f64, budget: usize) -> Result<CandidateSet> {
        let plan = self.candidate_plan(n, eps)?;
        if plan.required > budget as u128 {
            return Err(Error::BudgetExceeded {
                required: plan.required,
                budget,
                achieved_mesh: self.capped_mesh(n, budget),
            });
        }
        self.build_candidates(plan, true)
    }

    /// Like [`candidate_set`](Self::candidate_set) but truncates to the
    /// budget instead of failing; the result is then marked uncertified.
    pub fn candidate_set_capped(&self, n: usize, eps: f64, budget: usize) -> Result<CandidateSet> {
        let mut plan = self.candidate_plan(n, eps)?;
        if plan.required <= budget as u128 {
            return self.build_candidates(plan, true);
        }
        match &mut plan.kind {
            PlanKind::Words { len } => {
                while *len > 0 && self.count_words(*len) > budget as u128 {
                    *len -= 1;
                }
                plan.mesh = (0.5f64).powi(len.saturating_sub(n) as i32);
            }
            PlanKind::Circle { count } | PlanKind::Interval { count } => {
                *count = budget.max(1);
                plan.mesh = 1.0 / *count as f64;
            }
        }
        self.build_candidates(plan, false)
    }

    fn capped_mesh(&self, n: usize, budget: usize) -> f64 {
        match self {
            SystemModel::FullShift { .. } | SystemModel::Sft(_) => {
                let mut len = n;
                while self.count_words(len + 1) <= budget as u128 {
                    len += 1;
                }
                (0.5f64).powi((len - n) as i32)
            }
            _ => 1.0 / budget.max(1) as f64,
        }
    }

    fn candidate_plan(&self, n: usize, eps: f64) -> Result<CandidatePlan> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        Ok(match self {
            SystemModel::FullShift { .. } | SystemModel::Sft(_) => {
                let k = shift_depth(eps);
                let len = n + k;
                CandidatePlan {
                    kind: PlanKind::Words { len },
                    required: self.count_words(len),
                    mesh: (0.5f64).powi(k as i32),
                }
            }
            SystemModel::Doubling | SystemModel::Rotation { .. } => {
                let growth = self.lipschitz().powi(n as i32 - 1);
                let mesh = eps / (2.0 * growth);
                let count = (1.0 / mesh).ceil();
                CandidatePlan {
                    kind: PlanKind::Circle {
                        count: count.min(usize::MAX as f64) as usize,
                    },
                    required: count.min(u128::MAX as f64) as u128,
                    mesh: 1.0 / count,
                }
            }
            SystemModel::Contraction { .. } => {
                let mesh = eps / 2.0;
                let count = (1.0 / mesh).floor() as usize + 1;
                let extra = usize::from((count - 1) as f64 * mesh < 1.0);
                CandidatePlan {
                    kind: PlanKind::Interval { count },
                    required: (count + extra) as u128,
                    mesh,
                }
            }
        })
    }

    fn build_candidates(&self, plan: CandidatePlan, certified: bool) -> Result<CandidateSet> {
        let points = match plan.kind {
            PlanKind::Words { len } => self
                .admissible_words(len)?
                .iter()
                .map(|w| self.representative(w))
                .collect::<Result<Vec<_>>>()?,
            PlanKind::Circle { count } => (0..count).map(|j| Point::Real(j as f64 / count as f64)).collect(),
            PlanKind::Interval { count } => {
                let mut pts: Vec<Point> = (0..count)
                    .map(|j| j as f64 * plan.mesh)
                    .filter(|&x| x <= 1.0)
                    .map(Point::Real)
                    .collect();
                if pts.last().and_then(Point::as_real).is_none_or(|x| x < 1.0) {
                    pts.push(Point::Real(1.0));
                }
                pts
            }
        };
        Ok(CandidateSet {
            points,
            mesh: plan.mesh,
            certified,
        })
    }

    /// Draws a random valid point. Symbolic points get `word_len` random
    /// admissible symbols before their tail.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, word_len: usize) -> Result<Point> {
        match self {
            SystemModel::FullShift { .. } | SystemModel::Sft(_) => {
                let k = self.alphabet_size().unwrap_or(1) as u8;
                let mut word: Vec<u8> = Vec::with_capacity(word_len);
                for _ in 0..word_len {
                    let options: Vec<u8> = (0..k)
                        .filter(|&b| word.last().is_none_or(|&a| self.allowed(a, b)))
                        .collect();
                    word.push(options[rng.gen_range(0..options.len())]);
                }
                self.representative(&word)
            }
            SystemModel::Doubling | SystemModel::Rotation { .. } => Ok(Point::Real(rng.gen::<f64>())),
            SystemModel::Contraction { .. } => Ok(Point::Real(rng.gen_range(0.0..=1.0))),
        }
    }
}

/// Word length offset `k(eps) = ceil(log2(1/eps)) + 1`, clamped at zero.
pub fn shift_depth(eps: f64) -> usize {
    let k = (1.0 / eps).log2().ceil() + 1.0;
    if k <= 0.0 {
        0
    } else {
        k as usize
    }
}

fn wrap(v: f64) -> f64 {
    let w = v - v.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Arc length distance on `R/Z`.
pub fn arc_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(1.0);
    d.min(1.0 - d)
}

fn dyadic_distance(xs: &[u8], xt: u8, ys: &[u8], yt: u8) -> f64 {
    let len = xs.len().max(ys.len());
    let mut d = 0.0;
    let mut w = 1.0;
    for i in 0..len {
        let a = xs.get(i).copied().unwrap_or(xt);
        let b = ys.get(i).copied().unwrap_or(yt);
        if a != b {
            d += w;
        }
        w *= 0.5;
    }
    if xt != yt {
        // sum_{i >= len} 2^{-i}
        d += 2.0 * w;
    }
    d
}

#[derive(Clone, Copy, Debug)]
enum PlanKind {
    Words { len: usize },
    Circle { count: usize },
    Interval { count: usize },
}

#[derive(Clone, Copy, Debug)]
struct CandidatePlan {
    kind: PlanKind,
    required: u128,
    mesh: f64,
}

/// Finite stand-in for `X` at a given `(n, eps)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet {
    pub points: Vec<Point>,
    /// Grid mesh (interval/circle) or dyadic resolution (shifts).
    pub mesh: f64,
    /// `false` when the set was truncated and density is not guaranteed.
    pub certified: bool,
}

/// A map that can be iterated and measured: `T`, `T^k` or `T^{-1}`.
pub trait Dynamics {
    fn step(&self, x: &Point) -> Result<Point>;
    fn distance(&self, x: &Point, y: &Point) -> Result<f64>;

    /// `[x, Tx, ..., T^{len-1}x]`.
    fn orbit(&self, x: &Point, len: usize) -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity(len);
        if len == 0 {
            return Ok(out);
        }
        out.push(x.clone());
        for _ in 1..len {
            let next = self.step(out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }
}

impl Dynamics for SystemModel {
    fn step(&self, x: &Point) -> Result<Point> {
        self.apply(x)
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.metric(x, y)
    }
}

/// `T^power` or `T^{-power}` over a base system.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeMap {
    system: SystemModel,
    power: usize,
    inverse: bool,
}

impl TimeMap {
    pub fn forward(system: SystemModel) -> Self {
        Self {
            system,
            power: 1,
            inverse: false,
        }
    }

    pub fn power(system: SystemModel, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("time power must be positive".into()));
        }
        Ok(Self {
            system,
            power: k,
            inverse: false,
        })
    }

    pub fn inverse(system: SystemModel) -> Result<Self> {
        if !system.is_invertible() {
            return Err(Error::NotInvertible(system.label()));
        }
        Ok(Self {
            system,
            power: 1,
            inverse: true,
        })
    }

    pub fn system(&self) -> &SystemModel {
        &self.system
    }

    pub fn exponent(&self) -> (usize, bool) {
        (self.power, self.inverse)
    }

    /// `(this map)^k`.
    pub fn iterate(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("time power must be positive".into()));
        }
        Ok(Self {
            system: self.system.clone(),
            power: self.power * k,
            inverse: self.inverse,
        })
    }

    /// `(this map)^{-1}`.
    pub fn inverted(&self) -> Result<Self> {
        if !self.system.is_invertible() {
            return Err(Error::NotInvertible(self.system.label()));
        }
        Ok(Self {
            system: self.system.clone(),
            power: self.power,
            inverse: !self.inverse,
        })
    }

    pub fn label(&self) -> String {
        match (self.power, self.inverse) {
            (1, false) => self.system.label(),
            (p, false) => format!("{}^{p}", self.system.label()),
            (p, true) => format!("{}^-{p}", self.system.label()),
        }
    }
}

impl Dynamics for TimeMap {
    fn step(&self, x: &Point) -> Result<Point> {
        let mut y = x.clone();
        for _ in 0..self.power {
            y = if self.inverse {
                self.system.apply_inverse(&y)?
            } else {
                self.system.apply(&y)?
            };
        }
        Ok(y)
    }

    fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.system.metric(x, y)
    }
}

/// Bowen metric `d_n(x, y) = max_{0 <= j < n} d(T^j x, T^j y)`.
pub fn bowen_metric<D: Dynamics + ?Sized>(dynamics: &D, n: usize, x: &Point, y: &Point) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut a = x.clone();
    let mut b = y.clone();
    let mut worst = dynamics.distance(&a, &b)?;
    for _ in 1..n {
        a = dynamics.step(&a)?;
        b = dynamics.step(&b)?;
        worst = worst.max(dynamics.distance(&a, &b)?);
    }
    Ok(worst)
}

type PointMap = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
type Modulus = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A semi-conjugacy `pi: X -> Y` with `pi . T1 = T2 . pi`, carrying a
/// uniform-continuity modulus: `d1(x, y) < modulus(eps)` implies
/// `d2(pi x, pi y) < eps`.
#[derive(Clone)]
pub struct FactorMap {
    name: String,
    source: SystemModel,
    target: SystemModel,
    map: PointMap,
    modulus: Modulus,
}

impl fmt::Debug for FactorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FactorMap")
            .field("name", &self.name)
            .field("source", &self.source)
            .field("target", &self.target)
            .finish_non_exhaustive()
    }
}

impl PartialEq for FactorMap {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.source == other.source && self.target == other.target
    }
}

impl FactorMap {
    pub fn new(
        name: impl Into<String>,
        source: SystemModel,
        target: SystemModel,
        map: impl Fn(&Point) -> Point + Send + Sync + 'static,
        modulus: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            source,
            target,
            map: Arc::new(map),
            modulus: Arc::new(modulus),
        }
    }

    /// `(x_0, x_1, ...) -> sum_i x_i 2^{-(i+1)} mod 1`, from the full 2-shift
    /// onto the doubling map. `rho(x, y) < eps` forces agreement up to the
    /// first index `i` with `2^{-i} < eps`, so the modulus is the identity.
    pub fn binary_expansion() -> Self {
        Self::new(
            "binary-expansion",
            SystemModel::FullShift { k: 2 },
            SystemModel::Doubling,
            |x| {
                let Point::Word { symbols, tail } = x else {
                    return x.clone();
                };
                let mut value = 0.0;
                let mut w = 0.5;
                for &s in symbols {
                    value += f64::from(s) * w;
                    w *= 0.5;
                }
                // constant tail of ones contributes sum_{i >= L} 2^{-(i+1)}
                value += f64::from(*tail) * 2.0 * w;
                Point::Real(if value >= 1.0 { value - 1.0 } else { value })
            },
            |eps| eps,
        )
    }

    pub fn identity(system: SystemModel) -> Self {
        Self::new("identity", system.clone(), system, Point::clone, |eps| eps)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &SystemModel {
        &self.source
    }

    pub fn target(&self) -> &SystemModel {
        &self.target
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        self.source.check_point(x)?;
        Ok((self.map)(x))
    }

    pub fn modulus(&self, eps: f64) -> f64 {
        (self.modulus)(eps)
    }

    /// `d2(pi(T1 x), T2(pi x))`; zero when the semi-conjugacy holds at `x`.
    pub fn conjugacy_defect(&self, x: &Point) -> Result<f64> {
        let left = self.apply(&self.source.apply(x)?)?;
        let right = self.target.apply(&self.apply(x)?)?;
        self.target.metric(&left, &right)
    }
}
