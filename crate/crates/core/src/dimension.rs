//! From growth tables to s-pressures and critical exponents.
//!
//! The `limsup` in `PD_i(s) = limsup (1/n^s) log Z_n` is approximated by the
//! maximum over a trailing window of samples. The critical exponent is
//! estimated independently by a log-log regression of `log Z_n` against `n`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::linear_fit;
use crate::partition::{p_lower, q_upper, Estimator, GrowthSample, Scale, SeparationInstance};
use crate::potentials::AlmostAdditiveSeq;
use crate::symbolic::{exact_cover_table, exact_growth_table};
use crate::systems::SystemModel;

/// Default trailing-window fraction.
pub const DEFAULT_WINDOW: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct TableMeta {
    pub system: String,
    pub potential: String,
    pub estimator: Estimator,
    pub scale: Scale,
}

/// `n -> log Z_n` for one estimator at one scale, sorted by `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthTable {
    samples: Vec<GrowthSample>,
    meta: TableMeta,
}

impl GrowthTable {
    pub fn new(samples: Vec<GrowthSample>, meta: TableMeta) -> Result<Self> {
        if samples.windows(2).any(|w| w[0].n >= w[1].n) {
            return Err(Error::InvalidArgument(
                "growth table n must be strictly increasing".into(),
            ));
        }
        if samples.iter().any(|s| s.n == 0 || !s.log_value.is_finite()) {
            return Err(Error::InvalidArgument(
                "growth samples need n >= 1 and finite values".into(),
            ));
        }
        Ok(Self { samples, meta })
    }

    /// A table from raw `(n, log_value)` pairs.
    pub fn synthetic(points: &[(usize, f64)]) -> Result<Self> {
        let samples = points
            .iter()
            .map(|&(n, v)| GrowthSample {
                estimator: Estimator::Separated,
                n,
                scale: Scale::Eps(0.0),
                log_value: v,
                exact: true,
                certified: true,
            })
            .collect();
        Self::new(
            samples,
            TableMeta {
                system: "synthetic".into(),
                potential: "synthetic".into(),
                estimator: Estimator::Separated,
                scale: Scale::Eps(0.0),
            },
        )
    }

    pub fn samples(&self) -> &[GrowthSample] {
        &self.samples
    }

    pub fn meta(&self) -> &TableMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.samples.iter().all(|s| s.exact)
    }

    /// The last `ceil(frac * len)` samples.
    pub fn window(&self, frac: f64) -> Result<&[GrowthSample]> {
        if !(frac > 0.0 && frac <= 1.0) {
            return Err(Error::InvalidArgument(format!("window fraction {frac} not in (0, 1]")));
        }
        let take = ((self.len() as f64 * frac).ceil() as usize).min(self.len());
        if take == 0 {
            return Err(Error::TooFewSamples(0));
        }
        Ok(&self.samples[self.len() - take..])
    }
}

/// Trailing-window maximum of `log Z_n / n^s`.
pub fn s_pressure(table: &GrowthTable, s: f64, window_frac: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("s must be positive, got {s}")));
    }
    Ok(table
        .window(window_frac)?
        .iter()
        .map(|x| x.log_value / (x.n as f64).powf(s))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `s -> PD_i(s)` on a grid, with the window trend of `log|Z_n| / n^s`.
#[derive(Clone, Debug, PartialEq)]
pub struct PressureCurve {
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Fitted slope of `log |log Z_n / n^s|` against `log n` over the window.
    pub trends: Vec<f64>,
    pub estimator: Estimator,
    /// Largest window sample index `n`.
    pub n_last: usize,
    /// The window values are all negative, so the mirrored rule applies.
    pub negative: bool,
}

pub fn pressure_curve(table: &GrowthTable, s_grid: &[f64], window_frac: f64) -> Result<PressureCurve> {
    if s_grid.is_empty() || s_grid.windows(2).any(|w| w[0] >= w[1]) || s_grid[0] <= 0.0 {
        return Err(Error::InvalidArgument(
            "s grid must be positive and strictly increasing".into(),
        ));
    }
    let window = table.window(window_frac)?;
    let negative = window.iter().all(|x| x.log_value < 0.0);
    let mut values = Vec::with_capacity(s_grid.len());
    let mut trends = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        values.push(if negative {
            window
                .iter()
                .map(|x| x.log_value / (x.n as f64).powf(s))
                .fold(f64::INFINITY, f64::min)
        } else {
            s_pressure(table, s, window_frac)?
        });
        let (xs, ys): (Vec<f64>, Vec<f64>) = window
            .iter()
            .filter(|x| x.log_value != 0.0)
            .map(|x| {
                let n = x.n as f64;
                (n.ln(), (x.log_value.abs() / n.powf(s)).ln())
            })
            .unzip();
        trends.push(linear_fit(&xs, &ys).map_or(0.0, |f| f.0));
    }
    Ok(PressureCurve {
        s_grid: s_grid.to_vec(),
        values,
        trends,
        estimator: table.meta().estimator,
        n_last: window.last().map_or(1, |x| x.n),
        negative,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JumpLabel {
    Diverging,
    Vanishing,
    Indeterminate,
}

/// Thresholds for [`classify_jump`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpThresholds {
    pub big: f64,
    pub small: f64,
    /// `n` the window statistic is extrapolated to along its trend.
    pub horizon: f64,
}

impl Default for JumpThresholds {
    fn default() -> Self {
        Self {
            big: 1e3,
            small: 1e-3,
            horizon: 1e60,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpClassification {
    pub labels: Vec<JumpLabel>,
    /// Last diverging `s`, if any.
    pub s_lo: Option<f64>,
    /// First vanishing `s`, if any.
    pub s_hi: Option<f64>,
    /// Labels run diverging, then indeterminate, then vanishing.
    pub monotone: bool,
}

/// Labels each `s` by extrapolating the window statistic along its fitted
/// power-law trend to `thresholds.horizon`.
pub fn classify_jump(curve: &PressureCurve, thresholds: JumpThresholds) -> Result<JumpClassification> {
    if !(thresholds.big > thresholds.small && thresholds.small > 0.0) {
        return Err(Error::InvalidArgument("thresholds need big > small > 0".into()));
    }
    let growth = (thresholds.horizon / curve.n_last as f64).ln();
    let labels: Vec<JumpLabel> = curve
        .values
        .iter()
        .zip(&curve.trends)
        .map(|(&v, &b)| {
            let at_horizon = v.abs().ln() + b * growth;
            if at_horizon >= thresholds.big.ln() {
                JumpLabel::Diverging
            } else if at_horizon <= thresholds.small.ln() || v == 0.0 {
                JumpLabel::Vanishing
            } else {
                JumpLabel::Indeterminate
            }
        })
        .collect();
    let rank = |l: &JumpLabel| match l {
        JumpLabel::Diverging => 0,
        JumpLabel::Indeterminate => 1,
        JumpLabel::Vanishing => 2,
    };
    let monotone = labels.windows(2).all(|w| rank(&w[0]) <= rank(&w[1]));
    let s_lo = labels
        .iter()
        .zip(&curve.s_grid)
        .filter(|(l, _)| **l == JumpLabel::Diverging)
        .map(|(_, s)| *s)
        .next_back();
    let s_hi = labels
        .iter()
        .zip(&curve.s_grid)
        .find(|(l, _)| **l == JumpLabel::Vanishing)
        .map(|(_, s)| *s);
    Ok(JumpClassification {
        labels,
        s_lo,
        s_hi,
        monotone,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionEstimate {
    pub s0_hat: f64,
    pub window: (usize, usize),
    pub slope_stderr: f64,
    pub method: &'static str,
}

/// Slope of `log |log Z_n|` against `log n` over the trailing window,
/// clamped at zero. Windows whose values all satisfy `|log Z_n| <= 1` are
/// treated as bounded growth and give zero.
pub fn dimension_estimate(table: &GrowthTable, window_frac: f64) -> Result<DimensionEstimate> {
    let window = table.window(window_frac)?;
    let span = (window[0].n, window[window.len() - 1].n);
    if window.iter().all(|x| x.log_value.abs() <= 1.0) {
        return Ok(DimensionEstimate {
            s0_hat: 0.0,
            window: span,
            slope_stderr: 0.0,
            method: "bounded-growth",
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = window
        .iter()
        .filter(|x| x.log_value != 0.0)
        .map(|x| ((x.n as f64).ln(), x.log_value.abs().ln()))
        .unzip();
    if xs.len() < 4 {
        return Err(Error::TooFewSamples(xs.len()));
    }
    let (slope, _, stderr) = linear_fit(&xs, &ys).ok_or(Error::TooFewSamples(xs.len()))?;
    Ok(DimensionEstimate {
        s0_hat: slope.max(0.0),
        window: span,
        slope_stderr: stderr,
        method: "loglog-regression",
    })
}

/// Options for [`build_growth_table`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildOptions {
    pub candidate_budget: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            candidate_budget: crate::systems::DEFAULT_CANDIDATE_BUDGET,
        }
    }
}

/// Computes one growth table.
///
/// Shifts use the exact cylinder backend: `Scale::Dyadic(k)` for the
/// spanning and separated estimators, `Scale::Cylinder(m)` for the cover
/// estimators. Other systems use greedy bounds on certified candidate sets
/// at `Scale::Eps(eps)` and support the spanning and separated estimators.
pub fn build_growth_table(
    phi: &AlmostAdditiveSeq,
    estimator: Estimator,
    scale: Scale,
    ns: &[usize],
    opts: BuildOptions,
) -> Result<GrowthTable> {
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] == 0 {
        return Err(Error::InvalidArgument("n range must be positive and increasing".into()));
    }
    let sys = phi.system();
    let samples = match (sys.is_shift(), estimator, scale) {
        (true, Estimator::Spanning | Estimator::Separated, Scale::Dyadic(k)) => {
            let (span, sep) = exact_growth_table(phi, k, ns)?;
            if estimator == Estimator::Spanning {
                span
            } else {
                sep
            }
        }
        (true, Estimator::LowerCover | Estimator::UpperCover, Scale::Cylinder(m)) => {
            let (lower, upper) = exact_cover_table(phi, m, ns)?;
            if estimator == Estimator::LowerCover {
                lower
            } else {
                upper
            }
        }
        (false, Estimator::Spanning | Estimator::Separated, Scale::Eps(eps)) => ns
            .par_iter()
            .map(|&n| {
                let cands = sys.candidate_set(n, eps, opts.candidate_budget)?;
                let inst = SeparationInstance::for_potential(phi, n, eps, cands.points)?;
                if estimator == Estimator::Spanning {
                    q_upper(&inst)
                } else {
                    p_lower(&inst)
                }
            })
            .collect::<Result<Vec<_>>>()?,
        _ => {
            return Err(Error::Unsupported(format!(
                "estimator {estimator} at scale {scale} on {}",
                sys.label()
            )))
        }
    };
    let scale = samples.first().map_or(scale, |s| s.scale);
    GrowthTable::new(
        samples,
        TableMeta {
            system: phi.time().label(),
            potential: phi.label().to_string(),
            estimator,
            scale,
        },
    )
}

/// The zero-potential pipeline: `D(s, T)` and the entropy dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyDimension {
    pub curve: PressureCurve,
    pub estimate: DimensionEstimate,
    pub tables: Vec<GrowthTable>,
}

/// Builds spanning-count tables over a ladder of scales (coarse to fine),
/// takes `D(s)` as the maximum over the ladder and estimates the dimension
/// from the finest table.
pub fn entropy_dimension(
    sys: &SystemModel,
    ns: &[usize],
    scales: &[Scale],
    s_grid: &[f64],
    window_frac: f64,
) -> Result<EntropyDimension> {
    if scales.is_empty() {
        return Err(Error::InvalidArgument("scale ladder is empty".into()));
    }
    let zero = AlmostAdditiveSeq::zero(sys);
    let tables: Vec<GrowthTable> = scales
        .iter()
        .map(|&scale| build_growth_table(&zero, Estimator::Spanning, scale, ns, BuildOptions::default()))
        .collect::<Result<_>>()?;
    let curves: Vec<PressureCurve> = tables
        .iter()
        .map(|t| pressure_curve(t, s_grid, window_frac))
        .collect::<Result<_>>()?;
    let finest = tables.len() - 1;
    let mut curve = curves[finest].clone();
    for c in &curves {
        for (v, w) in curve.values.iter_mut().zip(&c.values) {
            *v = v.max(*w);
        }
    }
    let estimate = dimension_estimate(&tables[finest], window_frac)?;
    Ok(EntropyDimension {
        curve,
        estimate,
        tables,
    })
}
