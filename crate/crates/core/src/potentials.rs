//! Almost additive sequences `Phi = (phi_n)` and their algebra.
//!
//! Every sequence carries a declared constant `C` with
//!
//! ```text
//! -C + phi_n(x) + phi_m(T^n x) <= phi_{n+m}(x) <= phi_n(x) + phi_m(T^n x) + C
//! ```
//!
//! Exactly additive sequences (Birkhoff sums, drifts) store `C = 0`.
//! Composite constants are conservative; [`AlmostAdditiveSeq::verify_almost_additive`]
//! is the empirical ground truth.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::systems::{Dynamics, FactorMap, Point, SystemModel, TimeMap};

type CustomFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// A continuous observable `phi: X -> R` for Birkhoff sums.
#[derive(Clone)]
pub enum PointFn {
    /// `phi(x) = x` on the circle or interval.
    Identity,
    /// `phi(x) = cos(2 pi x)`.
    Cos2Pi,
    /// Indicator of `[a, b)`.
    Indicator { a: f64, b: f64 },
    /// Function of the first `reach` symbols; `table` is indexed by the
    /// base-`alphabet` value of the window, first symbol most significant.
    SymbolWeights {
        alphabet: usize,
        reach: usize,
        table: Vec<f64>,
    },
    /// Any other function. `reach` is the number of leading symbols it
    /// reads on a shift, when known.
    Custom {
        name: String,
        f: CustomFn,
        reach: Option<usize>,
    },
}

impl fmt::Debug for PointFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl PointFn {
    pub fn symbol_weights(alphabet: usize, reach: usize, table: Vec<f64>) -> Result<Self> {
        if alphabet == 0 || reach == 0 {
            return Err(Error::InvalidArgument(
                "symbol table needs alphabet and reach >= 1".into(),
            ));
        }
        let expected = alphabet
            .checked_pow(reach as u32)
            .ok_or_else(|| Error::InvalidArgument("symbol table too large".into()))?;
        if table.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "symbol table has {} entries, expected {expected}",
                table.len()
            )));
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("symbol table has a non-finite entry".into()));
        }
        Ok(PointFn::SymbolWeights { alphabet, reach, table })
    }

    pub fn custom(
        name: impl Into<String>,
        reach: Option<usize>,
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PointFn::Custom {
            name: name.into(),
            f: Arc::new(f),
            reach,
        }
    }

    pub fn label(&self) -> String {
        match self {
            PointFn::Identity => "x".into(),
            PointFn::Cos2Pi => "cos2pi".into(),
            PointFn::Indicator { a, b } => format!("indicator[{a},{b})"),
            PointFn::SymbolWeights { reach, table, .. } => {
                let t: Vec<String> = table.iter().map(|v| v.to_string()).collect();
                format!("symbols{reach}[{}]", t.join(";"))
            }
            PointFn::Custom { name, .. } => name.clone(),
        }
    }

    /// Number of leading symbols read on a shift, if finite and known.
    pub fn reach(&self) -> Option<usize> {
        match self {
            PointFn::SymbolWeights { reach, .. } => Some(*reach),
            PointFn::Custom { reach, .. } => *reach,
            _ => None,
        }
    }

    fn check_system(&self, sys: &SystemModel) -> Result<()> {
        match self {
            PointFn::Identity | PointFn::Cos2Pi | PointFn::Indicator { .. } if sys.is_shift() => Err(
                Error::Unsupported(format!("{} needs a real-valued state space", self.label())),
            ),
            PointFn::SymbolWeights { alphabet, .. } => match sys.alphabet_size() {
                Some(k) if k == *alphabet => Ok(()),
                _ => Err(Error::Unsupported(format!(
                    "symbol table over {alphabet} symbols does not fit {}",
                    sys.label()
                ))),
            },
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &Point) -> Result<f64> {
        let real = |x: &Point| {
            x.as_real().ok_or_else(|| Error::VariantMismatch {
                system: self.label(),
                point: x.to_string(),
            })
        };
        match self {
            PointFn::Identity => real(x),
            PointFn::Cos2Pi => Ok((2.0 * std::f64::consts::PI * real(x)?).cos()),
            PointFn::Indicator { a, b } => {
                let v = real(x)?;
                Ok(if *a <= v && v < *b { 1.0 } else { 0.0 })
            }
            PointFn::SymbolWeights { .. } => self.eval_window(x, 0),
            PointFn::Custom { f, .. } => Ok(f(x)),
        }
    }

    /// Symbol-table value on the window starting at coordinate `offset`.
    fn eval_window(&self, x: &Point, offset: usize) -> Result<f64> {
        let PointFn::SymbolWeights { alphabet, reach, table } = self else {
            unreachable!("window evaluation is only used for symbol tables")
        };
        let mut idx = 0usize;
        for j in 0..*reach {
            let s = x.symbol(offset + j).ok_or_else(|| Error::VariantMismatch {
                system: self.label(),
                point: x.to_string(),
            })? as usize;
            if s >= *alphabet {
                return Err(Error::InvalidPoint(format!("symbol {s} outside table alphabet")));
            }
            idx = idx * alphabet + s;
        }
        Ok(table[idx])
    }
}

/// A strictly positive square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl PositiveMatrix {
    /// Row-major construction; every entry must be finite and `> 0`.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix must be nonempty".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::InvalidArgument("matrix must be square".into()));
            }
            for &v in row {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "cocycle matrices must be strictly positive, found {v}"
                    )));
                }
                entries.push(v);
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn scalar(v: f64) -> Result<Self> {
        Self::new(vec![vec![v]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// `v <- v A` for a row vector.
    pub fn right_mul(&self, v: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..self.dim).map(|i| v[i] * self.get(i, j)).sum();
        }
    }

    fn label(&self) -> String {
        let rows: Vec<String> = (0..self.dim)
            .map(|i| {
                let r: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
                r.join(",")
            })
            .collect();
        format!("[{}]", rows.join(";"))
    }
}

/// `drift * n + sum_{i<n} table(x_i .. x_{i+reach-1})` on a forward shift.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveForm {
    pub drift: f64,
    pub alphabet: usize,
    pub reach: usize,
    pub table: Vec<f64>,
}

impl AdditiveForm {
    fn constant(alphabet: usize, drift: f64) -> Self {
        Self {
            drift,
            alphabet,
            reach: 1,
            table: vec![0.0; alphabet],
        }
    }

    fn widen(&self, reach: usize) -> Vec<f64> {
        let extra = self.alphabet.pow((reach - self.reach) as u32);
        (0..self.alphabet.pow(reach as u32))
            .map(|idx| self.table[idx / extra])
            .collect()
    }

    fn combine(&self, other: &Self, a: f64, b: f64) -> Self {
        let reach = self.reach.max(other.reach);
        let left = self.widen(reach);
        let right = other.widen(reach);
        Self {
            drift: a * self.drift + b * other.drift,
            alphabet: self.alphabet,
            reach,
            table: left.iter().zip(&right).map(|(x, y)| a * x + b * y).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum SeqKind {
    Birkhoff(PointFn),
    ConstantDrift(f64),
    MatrixCocycle(Vec<PositiveMatrix>),
    Sum(Arc<AlmostAdditiveSeq>, Arc<AlmostAdditiveSeq>),
    Scaled(f64, Arc<AlmostAdditiveSeq>),
    Pullback(Arc<AlmostAdditiveSeq>, FactorMap),
    TimePower(Arc<AlmostAdditiveSeq>, usize),
    InverseTwist(Arc<AlmostAdditiveSeq>),
    /// `phi_n + psi_n o T - psi_n`.
    Coboundary(Arc<AlmostAdditiveSeq>, Arc<AlmostAdditiveSeq>),
}

/// An almost additive sequence over a fixed map `T`.
#[derive(Clone, Debug)]
pub struct AlmostAdditiveSeq {
    kind: SeqKind,
    constant: f64,
    time: TimeMap,
    label: String,
}

impl AlmostAdditiveSeq {
    /// Birkhoff sums `S_n phi` for `sys`.
    pub fn birkhoff(sys: &SystemModel, f: PointFn) -> Result<Self> {
        Self::birkhoff_for(TimeMap::forward(sys.clone()), f)
    }

    /// Birkhoff sums along an arbitrary time map (`T^k`, `T^{-1}`).
    pub fn birkhoff_for(time: TimeMap, f: PointFn) -> Result<Self> {
        f.check_system(time.system())?;
        Ok(Self {
            label: format!("birkhoff({})", f.label()),
            kind: SeqKind::Birkhoff(f),
            constant: 0.0,
            time,
        })
    }

    /// `phi_n = n A`.
    pub fn drift(sys: &SystemModel, a: f64) -> Self {
        Self::drift_for(TimeMap::forward(sys.clone()), a)
    }

    fn drift_for(time: TimeMap, a: f64) -> Self {
        Self {
            label: if a == 0.0 { "zero".into() } else { format!("drift({a})") },
            kind: SeqKind::ConstantDrift(a),
            constant: 0.0,
            time,
        }
    }

    /// The zero sequence.
    pub fn zero(sys: &SystemModel) -> Self {
        Self::drift(sys, 0.0)
    }

    /// `phi_n(x) = log || A(x_0) ... A(x_{n-1}) ||` with the entrywise-sum
    /// norm. For `d x d` matrices with entries in `[a, b]` the declared
    /// constant is `log(d b / a)`.
    pub fn cocycle(sys: &SystemModel, mats: Vec<PositiveMatrix>) -> Result<Self> {
        let k = sys
            .alphabet_size()
            .ok_or_else(|| Error::Unsupported("matrix cocycles live on shift spaces".into()))?;
        if mats.len() != k {
            return Err(Error::InvalidArgument(format!(
                "{} matrices given for an alphabet of {k}",
                mats.len()
            )));
        }
        let dim = mats[0].dim();
        if mats.iter().any(|m| m.dim() != dim) {
            return Err(Error::InvalidArgument("cocycle matrices differ in size".into()));
        }
        let a = mats.iter().map(PositiveMatrix::min_entry).fold(f64::INFINITY, f64::min);
        let b = mats.iter().map(PositiveMatrix::max_entry).fold(0.0, f64::max);
        let labels: Vec<String> = mats.iter().map(PositiveMatrix::label).collect();
        Ok(Self {
            label: format!("cocycle({})", labels.join(",")),
            constant: (dim as f64 * b / a).ln(),
            kind: SeqKind::MatrixCocycle(mats),
            time: TimeMap::forward(sys.clone()),
        })
    }

    pub fn kind(&self) -> &SeqKind {
        &self.kind
    }

    /// The declared almost additivity constant.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn time(&self) -> &TimeMap {
        &self.time
    }

    pub fn system(&self) -> &SystemModel {
        self.time.system()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Replaces the display label.
    pub fn named(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `Phi + Psi`, with constant `C_Phi + C_Psi`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.time != other.time {
            return Err(Error::SystemMismatch);
        }
        Ok(Self {
            label: format!("{}+{}", self.label, other.label),
            constant: self.constant + other.constant,
            time: self.time.clone(),
            kind: SeqKind::Sum(Arc::new(self.clone()), Arc::new(other.clone())),
        })
    }

    /// `lambda Phi`, with constant `|lambda| C_Phi`.
    pub fn scale(&self, lambda: f64) -> Self {
        Self {
            label: format!("{lambda}*({})", self.label),
            constant: lambda.abs() * self.constant,
            time: self.time.clone(),
            kind: SeqKind::Scaled(lambda, Arc::new(self.clone())),
        }
    }

    /// `Phi o pi` on the source of `pi`.
    pub fn pullback(&self, pi: &FactorMap) -> Result<Self> {
        if self.time != TimeMap::forward(pi.target().clone()) {
            return Err(Error::SystemMismatch);
        }
        Ok(Self {
            label: format!("({}) o {}", self.label, pi.name()),
            constant: self.constant,
            time: TimeMap::forward(pi.source().clone()),
            kind: SeqKind::Pullback(Arc::new(self.clone()), pi.clone()),
        })
    }

    /// `Phi_k = (phi_{nk})` for `T^k`, declared constant `C (k + 1)`.
    pub fn time_power(&self, k: usize) -> Result<Self> {
        let time = self.time.iterate(k)?;
        if k == 1 {
            return Ok(self.clone());
        }
        Ok(Self {
            label: format!("({})_{k}", self.label),
            constant: self.constant * (k as f64 + 1.0),
            time,
            kind: SeqKind::TimePower(Arc::new(self.clone()), k),
        })
    }

    /// `Phi' = (phi_n o T^{-(n-1)})` for `T^{-1}`.
    pub fn inverse_twist(&self) -> Result<Self> {
        let time = self.time.inverted()?;
        Ok(Self {
            label: format!("({})'", self.label),
            constant: self.constant,
            time,
            kind: SeqKind::InverseTwist(Arc::new(self.clone())),
        })
    }

    /// `Phi + Psi o T - Psi`, declared constant `C_Phi + 2 C_Psi`.
    pub fn coboundary(&self, psi: &Self) -> Result<Self> {
        if self.time != psi.time {
            return Err(Error::SystemMismatch);
        }
        Ok(Self {
            label: format!("{}+cob({})", self.label, psi.label),
            constant: self.constant + 2.0 * psi.constant,
            time: self.time.clone(),
            kind: SeqKind::Coboundary(Arc::new(self.clone()), Arc::new(psi.clone())),
        })
    }

    /// `phi_n(x)`.
    pub fn eval(&self, n: usize, x: &Point) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        match &self.kind {
            SeqKind::Birkhoff(f) => self.eval_birkhoff(f, n, x),
            SeqKind::ConstantDrift(a) => {
                self.system().check_point(x)?;
                Ok(n as f64 * a)
            }
            SeqKind::MatrixCocycle(mats) => eval_cocycle(mats, n, x),
            SeqKind::Sum(a, b) => Ok(a.eval(n, x)? + b.eval(n, x)?),
            SeqKind::Scaled(l, inner) => Ok(l * inner.eval(n, x)?),
            SeqKind::Pullback(inner, pi) => inner.eval(n, &pi.apply(x)?),
            SeqKind::TimePower(inner, k) => inner.eval(n * k, x),
            SeqKind::InverseTwist(inner) => {
                let mut y = x.clone();
                for _ in 1..n {
                    y = self.time.step(&y)?;
                }
                inner.eval(n, &y)
            }
            SeqKind::Coboundary(phi, psi) => {
                let tx = self.time.step(x)?;
                Ok(phi.eval(n, x)? + psi.eval(n, &tx)? - psi.eval(n, x)?)
            }
        }
    }

    fn eval_birkhoff(&self, f: &PointFn, n: usize, x: &Point) -> Result<f64> {
        let (power, inverse) = self.time.exponent();
        if let (PointFn::SymbolWeights { .. }, false) = (f, inverse) {
            // read windows in place rather than materialising shifted words
            self.system().check_point(x)?;
            let mut total = 0.0;
            for i in 0..n {
                total += f.eval_window(x, i * power)?;
            }
            return Ok(total);
        }
        let mut y = x.clone();
        let mut total = f.eval(&y)?;
        for _ in 1..n {
            y = self.time.step(&y)?;
            total += f.eval(&y)?;
        }
        Ok(total)
    }

    /// Number of leading coordinates `phi_n` depends on, when the sequence
    /// lives on a shift and this is known.
    pub fn locality(&self, n: usize) -> Option<usize> {
        let (power, inverse) = self.time.exponent();
        if inverse || !self.system().is_shift() {
            return None;
        }
        match &self.kind {
            SeqKind::Birkhoff(f) => f.reach().map(|r| (n - 1) * power + r),
            SeqKind::ConstantDrift(_) => Some(0),
            SeqKind::MatrixCocycle(_) => Some(n),
            SeqKind::Sum(a, b) => Some(a.locality(n)?.max(b.locality(n)?)),
            SeqKind::Scaled(l, inner) => {
                if *l == 0.0 {
                    Some(0)
                } else {
                    inner.locality(n)
                }
            }
            SeqKind::TimePower(inner, k) => inner.locality(n * k),
            SeqKind::Coboundary(phi, psi) => Some(phi.locality(n)?.max(psi.locality(n)? + power)),
            SeqKind::Pullback(..) | SeqKind::InverseTwist(_) => None,
        }
    }

    /// The sequence as a drift plus one windowed Birkhoff table over the
    /// forward shift, when it has that shape.
    pub fn additive_form(&self) -> Option<AdditiveForm> {
        if self.time.exponent() != (1, false) {
            return None;
        }
        let k = self.system().alphabet_size()?;
        match &self.kind {
            SeqKind::ConstantDrift(a) => Some(AdditiveForm::constant(k, *a)),
            SeqKind::Birkhoff(PointFn::SymbolWeights { alphabet, reach, table }) => Some(AdditiveForm {
                drift: 0.0,
                alphabet: *alphabet,
                reach: *reach,
                table: table.clone(),
            }),
            SeqKind::Sum(a, b) => Some(a.additive_form()?.combine(&b.additive_form()?, 1.0, 1.0)),
            SeqKind::Scaled(l, inner) => {
                let f = inner.additive_form()?;
                Some(f.combine(&AdditiveForm::constant(k, 0.0), *l, 0.0))
            }
            _ => None,
        }
    }

    /// The matrices of a plain forward cocycle.
    pub fn cocycle_matrices(&self) -> Option<&[PositiveMatrix]> {
        match &self.kind {
            SeqKind::MatrixCocycle(m) if self.time.exponent() == (1, false) => Some(m),
            _ => None,
        }
    }

    /// Largest violation of the almost additivity inequality with the
    /// declared constant over random `(n, m, x)`; zero when it holds.
    pub fn verify_almost_additive(&self, n_max: usize, m_max: usize, sample_count: usize, seed: u64) -> Result<f64> {
        if n_max == 0 || m_max == 0 {
            return Err(Error::InvalidArgument("n_max and m_max must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (power, _) = self.time.exponent();
        let word_len = (n_max + m_max + 4) * power;
        let mut worst = 0.0f64;
        for _ in 0..sample_count {
            let x = self.system().sample_point(&mut rng, word_len)?;
            let mut tn = x.clone();
            for n in 1..=n_max {
                tn = self.time.step(&tn)?;
                let phi_n = self.eval(n, &x)?;
                for m in 1..=m_max {
                    let split = phi_n + self.eval(m, &tn)?;
                    let joint = self.eval(n + m, &x)?;
                    let excess = (split - self.constant - joint).max(joint - split - self.constant);
                    worst = worst.max(excess);
                }
            }
        }
        Ok(worst)
    }

    /// Extremes of `phi_1` on `candidates` and an empirical modulus of
    /// continuity fitted on candidate pairs.
    pub fn sup_inf_norm(&self, candidates: &[Point]) -> Result<SupNormReport> {
        if candidates.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let values: Vec<f64> = candidates.iter().map(|x| self.eval(1, x)).collect::<Result<_>>()?;
        let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let inf = values.iter().copied().fold(f64::INFINITY, f64::min);
        let modulus = ModulusTable::fit(self.time(), candidates, &values)?;
        Ok(SupNormReport { sup, inf, modulus })
    }
}

fn eval_cocycle(mats: &[PositiveMatrix], n: usize, x: &Point) -> Result<f64> {
    let dim = mats[0].dim();
    let mut v = vec![1.0; dim];
    let mut next = vec![0.0; dim];
    let mut log_scale = 0.0;
    for i in 0..n {
        let s = x.symbol(i).ok_or_else(|| Error::VariantMismatch {
            system: "matrix cocycle".into(),
            point: x.to_string(),
        })? as usize;
        let m = mats
            .get(s)
            .ok_or_else(|| Error::InvalidPoint(format!("symbol {s} has no matrix")))?;
        m.right_mul(&v, &mut next);
        let total: f64 = next.iter().sum();
        log_scale += total.ln();
        for (a, b) in v.iter_mut().zip(&next) {
            *a = b / total;
        }
    }
    Ok(log_scale)
}

/// Running maximum of `|phi_1(x) - phi_1(y)|` over candidate pairs sorted by
/// distance.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulusTable {
    distances: Vec<f64>,
    running_max: Vec<f64>,
}

/// Above this size the pair scan uses a deterministic subsample.
const MODULUS_PAIR_LIMIT: usize = 1500;

impl ModulusTable {
    pub fn fit<D: Dynamics + ?Sized>(dynamics: &D, points: &[Point], values: &[f64]) -> Result<Self> {
        let stride = points.len().div_ceil(MODULUS_PAIR_LIMIT).max(1);
        let idx: Vec<usize> = (0..points.len()).step_by(stride).collect();
        let mut pairs = Vec::with_capacity(idx.len() * idx.len() / 2);
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                let d = dynamics.distance(&points[i], &points[j])?;
                pairs.push((d, (values[i] - values[j]).abs()));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut running = 0.0f64;
        let (distances, running_max) = pairs
            .into_iter()
            .map(|(d, v)| {
                running = running.max(v);
                (d, running)
            })
            .unzip();
        Ok(Self { distances, running_max })
    }

    /// Largest observed `|phi_1(x) - phi_1(y)|` over pairs with `d(x, y) < r`.
    /// Nondecreasing in `r`.
    pub fn delta_below(&self, r: f64) -> f64 {
        let cut = self.distances.partition_point(|&d| d < r);
        if cut == 0 {
            0.0
        } else {
            self.running_max[cut - 1]
        }
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupNormReport {
    pub sup: f64,
    pub inf: f64,
    pub modulus: ModulusTable,
}

impl SupNormReport {
    /// `sup |phi_1|`.
    pub fn norm(&self) -> f64 {
        self.sup.abs().max(self.inf.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sigma2() -> SystemModel {
        SystemModel::full_shift(2).unwrap()
    }

    #[test]
    fn drift_and_zero() {
        let d = AlmostAdditiveSeq::drift(&sigma2(), 0.5);
        assert_eq!(d.eval(4, &Point::word([1, 0], 0)).unwrap(), 2.0);
        let z = AlmostAdditiveSeq::birkhoff(&SystemModel::Doubling, PointFn::custom("0", None, |_| 0.0)).unwrap();
        assert_eq!(z.eval(7, &Point::real(0.3)).unwrap(), 0.0);
        assert_eq!(
            d.eval(0, &Point::word([], 0)),
            Err(Error::InvalidArgument("n must be positive".into()))
        );
    }

    #[test]
    fn unit_cocycle_is_zero() {
        let one = PositiveMatrix::scalar(1.0).unwrap();
        let c = AlmostAdditiveSeq::cocycle(&sigma2(), vec![one.clone(), one]).unwrap();
        for n in 1..6 {
            assert_eq!(c.eval(n, &Point::word([0, 1, 1, 0], 1)).unwrap(), 0.0);
        }
        assert_eq!(c.constant(), 0.0);
        assert!(matches!(
            c.eval(2, &Point::real(0.1)),
            Err(Error::VariantMismatch { .. })
        ));
    }

    #[test]
    fn cocycle_matches_explicit_product() {
        let a = PositiveMatrix::new(vec![vec![1.0, 2.0], vec![0.5, 3.0]]).unwrap();
        let b = PositiveMatrix::new(vec![vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let c = AlmostAdditiveSeq::cocycle(&sigma2(), vec![a.clone(), b.clone()]).unwrap();
        // A(0) A(1) A(1)
        let mul = |p: [[f64; 2]; 2], m: &PositiveMatrix| {
            let mut out = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] = (0..2).map(|l| p[i][l] * m.get(l, j)).sum();
                }
            }
            out
        };
        let mut p = [[1.0, 0.0], [0.0, 1.0]];
        for m in [&a, &b, &b] {
            p = mul(p, m);
        }
        let expect: f64 = p.iter().flatten().sum::<f64>().ln();
        let got = c.eval(3, &Point::word([0, 1, 1], 0)).unwrap();
        assert!((got - expect).abs() < 1e-12);
        assert!((c.constant() - (2.0 * 3.0 / 0.5f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn algebra_examples() {
        let s = sigma2();
        let a = AlmostAdditiveSeq::drift(&s, 0.5);
        let b = AlmostAdditiveSeq::drift(&s, 0.25);
        let x = Point::word([0, 1], 0);
        assert_eq!(a.add(&b).unwrap().eval(4, &x).unwrap(), 3.0);
        assert_eq!(a.scale(2.0).eval(3, &x).unwrap(), 3.0);
        assert_eq!(a.scale(0.0).eval(3, &x).unwrap(), 0.0);
        assert_eq!(a.time_power(3).unwrap().eval(2, &x).unwrap(), 3.0);
        let other = AlmostAdditiveSeq::zero(&SystemModel::Doubling);
        assert_eq!(a.add(&other).unwrap_err(), Error::SystemMismatch);
        assert!(matches!(a.inverse_twist(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn inverse_twist_on_rotation() {
        let r = SystemModel::rotation(0.25).unwrap();
        let f = AlmostAdditiveSeq::birkhoff(&r, PointFn::Cos2Pi).unwrap();
        let t = f.inverse_twist().unwrap();
        let x = Point::real(0.1);
        assert_eq!(t.eval(1, &x).unwrap(), f.eval(1, &x).unwrap());
        let phi = |v: f64| (2.0 * std::f64::consts::PI * v).cos();
        let expect = phi(0.85) + phi(0.1);
        assert!((t.eval(2, &x).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn coboundary_of_zero_telescopes() {
        let s = sigma2();
        let psi =
            AlmostAdditiveSeq::birkhoff(&s, PointFn::symbol_weights(2, 2, vec![0.3, -1.0, 2.0, 0.5]).unwrap()).unwrap();
        let cob = AlmostAdditiveSeq::zero(&s).coboundary(&psi).unwrap();
        let x = Point::word([1, 0, 0, 1, 1, 0, 1], 0);
        for n in 1..5 {
            let tn = s.orbit(&x, n + 1).unwrap().pop().unwrap();
            let expect = psi.eval(1, &tn).unwrap() - psi.eval(1, &x).unwrap();
            assert!((cob.eval(n, &x).unwrap() - expect).abs() < 1e-12);
        }
        assert_eq!(cob.locality(3), Some(5));
    }

    #[test]
    fn additive_form_combines_tables() {
        let s = sigma2();
        let f = AlmostAdditiveSeq::birkhoff(&s, PointFn::symbol_weights(2, 1, vec![1.0, -1.0]).unwrap()).unwrap();
        let g =
            AlmostAdditiveSeq::birkhoff(&s, PointFn::symbol_weights(2, 2, vec![0.0, 0.5, 0.25, 1.0]).unwrap()).unwrap();
        let h = f
            .scale(2.0)
            .add(&g)
            .unwrap()
            .add(&AlmostAdditiveSeq::drift(&s, 0.1))
            .unwrap();
        let form = h.additive_form().unwrap();
        assert_eq!(form.reach, 2);
        assert_eq!(form.table, vec![2.0, 2.5, -1.75, -1.0]);
        assert!((form.drift - 0.1).abs() < 1e-15);
        assert!(AlmostAdditiveSeq::birkhoff(&SystemModel::Doubling, PointFn::Identity)
            .unwrap()
            .additive_form()
            .is_none());
    }

    #[test]
    fn sup_inf_examples() {
        let d = SystemModel::Doubling;
        let grid = d.candidate_set(1, 0.02, 10_000).unwrap().points;
        let id = AlmostAdditiveSeq::birkhoff(&d, PointFn::Identity).unwrap();
        let rep = id.sup_inf_norm(&grid).unwrap();
        assert_eq!(rep.inf, 0.0);
        assert!(rep.sup > 0.98 && rep.sup < 1.0);
        let drift = AlmostAdditiveSeq::drift(&d, 0.7).sup_inf_norm(&grid).unwrap();
        assert_eq!((drift.sup, drift.inf), (0.7, 0.7));
        assert_eq!(drift.modulus.delta_below(0.5), 0.0);
        assert!(AlmostAdditiveSeq::zero(&d).sup_inf_norm(&[]).is_err());
    }

    #[test]
    fn declared_constants_hold_on_samples() {
        let s = sigma2();
        let a = PositiveMatrix::new(vec![vec![1.0, 2.0], vec![0.5, 3.0]]).unwrap();
        let b = PositiveMatrix::new(vec![vec![2.0, 1.0], vec![1.0, 4.0]]).unwrap();
        let c = AlmostAdditiveSeq::cocycle(&s, vec![a, b]).unwrap();
        let f =
            AlmostAdditiveSeq::birkhoff(&s, PointFn::symbol_weights(2, 2, vec![0.3, -1.0, 2.0, 0.5]).unwrap()).unwrap();
        let seqs = [
            c.clone(),
            f.clone(),
            c.add(&f).unwrap(),
            c.scale(-1.5),
            c.time_power(2).unwrap(),
            f.coboundary(&c).unwrap(),
        ];
        for q in &seqs {
            assert!(q.verify_almost_additive(5, 5, 20, 3).unwrap() <= 1e-9, "{}", q.label());
        }
    }

    #[test]
    fn modulus_is_nondecreasing() {
        let r = SystemModel::rotation(0.1).unwrap();
        let f = AlmostAdditiveSeq::birkhoff(&r, PointFn::Cos2Pi).unwrap();
        let pts = r.candidate_set(1, 0.05, 1000).unwrap().points;
        let rep = f.sup_inf_norm(&pts).unwrap();
        let mut prev = 0.0;
        for i in 0..60 {
            let v = rep.modulus.delta_below(i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
        assert!(rep.modulus.delta_below(0.03) < 2.0 * std::f64::consts::PI * 0.03);
    }

    proptest! {
        #[test]
        fn birkhoff_is_exactly_additive(x0 in 0.0f64..1.0, n in 1usize..8, m in 1usize..8) {
            let d = SystemModel::Doubling;
            let f = AlmostAdditiveSeq::birkhoff(&d, PointFn::Cos2Pi).unwrap();
            let x = Point::real(x0);
            let tn = d.orbit(&x, n + 1).unwrap().pop().unwrap();
            let lhs = f.eval(n + m, &x).unwrap();
            let rhs = f.eval(n, &x).unwrap() + f.eval(m, &tn).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn scaling_round_trips(lambda in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0], w in proptest::collection::vec(0u8..2, 10), n in 1usize..6) {
            let s = sigma2();
            let f = AlmostAdditiveSeq::birkhoff(&s, PointFn::symbol_weights(2, 1, vec![0.7, -0.2]).unwrap()).unwrap();
            let back = f.scale(lambda).scale(1.0 / lambda);
            let x = Point::word(w, 0);
            prop_assert!((back.eval(n, &x).unwrap() - f.eval(n, &x).unwrap()).abs() < 1e-12);
        }
    }
}
