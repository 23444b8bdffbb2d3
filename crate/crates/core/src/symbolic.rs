//! Exact cylinder calculus on full shifts and subshifts of finite type.
//!
//! Cylinders of a fixed length partition the shift, so the only subcover
//! of a cylinder join is the join itself and the cover sums `q_n`, `p_n`
//! reduce to sums over admissible words. Distinct `(n + k)`-cylinders are
//! `(n, eps_k)`-separated with `eps_k = 2^{-k}(1 - 10^{-6})`, and their
//! representatives are `(n, 2^{-(k-1)})`-spanning, which gives exact
//! separated-set values on canonical candidate sets.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::log_sum_exp;
use crate::partition::{Estimator, GrowthSample, Scale};
use crate::potentials::{AdditiveForm, AlmostAdditiveSeq, PositiveMatrix};
use crate::systems::SystemModel;

/// Cap on words enumerated when no transfer recursion applies.
pub const ENUMERATION_LIMIT: u128 = 1 << 22;

fn require_shift(sys: &SystemModel) -> Result<usize> {
    sys.alphabet_size()
        .ok_or_else(|| Error::Unsupported(format!("{} is not a shift space", sys.label())))
}

/// Number of admissible words of length `n`.
pub fn word_count(sys: &SystemModel, n: usize) -> Result<u128> {
    let k = require_shift(sys)?;
    if n == 0 {
        return Ok(1);
    }
    let mut v = vec![1u128; k];
    for _ in 1..n {
        let mut next = vec![0u128; k];
        for (a, &va) in v.iter().enumerate() {
            for (b, slot) in next.iter_mut().enumerate() {
                if sys.allowed(a as u8, b as u8) {
                    *slot = slot
                        .checked_add(va)
                        .ok_or_else(|| Error::InvalidArgument(format!("word count overflows at n = {n}")))?;
                }
            }
        }
        v = next;
    }
    v.iter().try_fold(0u128, |acc, x| {
        acc.checked_add(*x)
            .ok_or_else(|| Error::InvalidArgument(format!("word count overflows at n = {n}")))
    })
}

/// `log` of the number of admissible words of length `n`, for any `n`.
pub fn log_word_count(sys: &SystemModel, n: usize) -> Result<f64> {
    let k = require_shift(sys)?;
    TransferMatrix::new(sys, &vec![1.0; k])?.log_weighted_count(n)
}

/// `T_{ij} = M_{ij} w_i` for a transition matrix `M` and symbol weights `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    k: usize,
    weights: Vec<f64>,
    entries: Vec<f64>,
}

impl TransferMatrix {
    pub fn new(sys: &SystemModel, weights: &[f64]) -> Result<Self> {
        let k = require_shift(sys)?;
        if weights.len() != k {
            return Err(Error::InvalidArgument(format!(
                "{} symbol weights for an alphabet of {k}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "symbol weights must be finite and nonnegative".into(),
            ));
        }
        let mut entries = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                if sys.allowed(i as u8, j as u8) {
                    entries[i * k + j] = weights[i];
                }
            }
        }
        Ok(Self {
            k,
            weights: weights.to_vec(),
            entries,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.k + j]
    }

    /// `log sum_{|w| = n} prod_i w(w_i)` over admissible words.
    pub fn log_weighted_count(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        // u_i = weighted count of words of the current length starting at i
        let mut u = self.weights.clone();
        let mut log_scale = 0.0;
        for _ in 1..n {
            let next: Vec<f64> = (0..self.k)
                .map(|i| (0..self.k).map(|j| self.get(i, j) * u[j]).sum())
                .collect();
            let total: f64 = next.iter().sum();
            if total == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            log_scale += total.ln();
            u = next.into_iter().map(|v| v / total).collect();
        }
        Ok(log_scale + u.iter().sum::<f64>().ln())
    }
}

/// The partition of a shift into admissible cylinders of length `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderCover {
    m: usize,
    sys: SystemModel,
}

impl CylinderCover {
    pub fn new(sys: &SystemModel, m: usize) -> Result<Self> {
        require_shift(sys)?;
        if m == 0 {
            return Err(Error::InvalidArgument("cylinder length must be positive".into()));
        }
        Ok(Self { m, sys: sys.clone() })
    }

    pub fn length(&self) -> usize {
        self.m
    }

    pub fn system(&self) -> &SystemModel {
        &self.sys
    }

    pub fn len(&self) -> Result<u128> {
        word_count(&self.sys, self.m)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `alpha v T^{-1} alpha v ... v T^{-(n-1)} alpha`, which is the cover by
    /// cylinders of length `n + m - 1`.
    pub fn join(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        Self::new(&self.sys, n + self.m - 1)
    }

    pub fn elements(&self) -> Result<Vec<Vec<u8>>> {
        self.sys.admissible_words(self.m)
    }

    /// Any set of diameter below `2^{-(m-1)}` lies in one element.
    pub fn lebesgue_number(&self) -> f64 {
        0.5f64.powi(self.m as i32 - 1)
    }

    pub fn diameter(&self) -> f64 {
        0.5f64.powi(self.m as i32 - 1)
    }
}

fn check_shift_potential(phi: &AlmostAdditiveSeq) -> Result<()> {
    require_shift(phi.system())?;
    let (_, inverse) = phi.time().exponent();
    if inverse {
        return Err(Error::Unsupported("one-sided shifts are not invertible".into()));
    }
    Ok(())
}

/// `log sum_{|w| = len} e^{phi_n(w)}` over admissible words, where
/// `phi_n` must be determined by the first `len` coordinates.
pub fn weighted_word_sum(phi: &AlmostAdditiveSeq, n: usize, len: usize) -> Result<f64> {
    check_shift_potential(phi)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let required = phi.locality(n);
    if required.is_none_or(|r| r > len) {
        return Err(Error::NotLocallyConstant {
            resolution: len,
            required,
        });
    }
    if let Some(form) = phi.additive_form().filter(|f| f.reach <= len) {
        return Ok(additive_sum(phi.system(), &form, n, len));
    }
    if let Some(mats) = phi.cocycle_matrices() {
        return Ok(cocycle_sum(phi.system(), mats, n, len));
    }
    let values = enumerate_weights(phi, n, len)?;
    Ok(log_sum_exp(&values))
}

fn enumerate_weights(phi: &AlmostAdditiveSeq, n: usize, len: usize) -> Result<Vec<f64>> {
    let sys = phi.system();
    let count = word_count(sys, len)?;
    if count > ENUMERATION_LIMIT {
        return Err(Error::Unsupported(format!(
            "{count} words of length {len} exceed the enumeration limit {ENUMERATION_LIMIT}"
        )));
    }
    sys.admissible_words(len)?
        .par_iter()
        .map(|w| phi.eval(n, &sys.representative(w)?))
        .collect()
}

/// Transfer recursion over windows of length `reach`.
fn additive_sum(sys: &SystemModel, form: &AdditiveForm, n: usize, len: usize) -> f64 {
    let k = form.alphabet;
    let r = form.reach;
    let states = k.pow(r as u32);
    let admissible = |idx: usize| {
        let mut prev: Option<usize> = None;
        let mut x = idx;
        let mut digits = vec![0usize; r];
        for d in digits.iter_mut().rev() {
            *d = x % k;
            x /= k;
        }
        for &d in &digits {
            if let Some(p) = prev {
                if !sys.allowed(p as u8, d as u8) {
                    return false;
                }
            }
            prev = Some(d);
        }
        true
    };
    let valid: Vec<bool> = (0..states).map(admissible).collect();
    // window starting at position 0; it contributes since n >= 1
    let mut v: Vec<f64> = (0..states)
        .map(|s| if valid[s] { form.table[s].exp() } else { 0.0 })
        .collect();
    let mut log_scale = normalise(&mut v);
    for start in 1..=(len - r) {
        let mut next = vec![0.0; states];
        for (s, &vs) in v.iter().enumerate() {
            if vs == 0.0 {
                continue;
            }
            let last = s % k;
            let stem = (s * k) % states;
            for b in 0..k {
                if !sys.allowed(last as u8, b as u8) {
                    continue;
                }
                let t = stem + b;
                let gain = if start < n { form.table[t].exp() } else { 1.0 };
                next[t] += vs * gain;
            }
        }
        v = next;
        log_scale += normalise(&mut v);
    }
    n as f64 * form.drift + log_scale + v.iter().sum::<f64>().ln()
}

/// Scales `v` to unit sum and returns the log of the removed factor.
fn normalise(v: &mut [f64]) -> f64 {
    let total: f64 = v.iter().sum();
    if total == 0.0 || !total.is_finite() {
        return if total == 0.0 { f64::NEG_INFINITY } else { total };
    }
    for x in v.iter_mut() {
        *x /= total;
    }
    total.ln()
}

/// Row vectors `1^T A(w_0) ... A(w_{t-1})` summed by last symbol, then the
/// free continuations up to `len`.
fn cocycle_sum(sys: &SystemModel, mats: &[PositiveMatrix], n: usize, len: usize) -> f64 {
    let k = mats.len();
    let d = mats[0].dim();
    let mut rows: Vec<Vec<f64>> = (0..k)
        .map(|a| {
            let mut out = vec![0.0; d];
            mats[a].right_mul(&vec![1.0; d], &mut out);
            out
        })
        .collect();
    let mut log_scale = normalise_rows(&mut rows);
    for _ in 1..n {
        let mut next = vec![vec![0.0; d]; k];
        let mut buf = vec![0.0; d];
        for (a, row) in rows.iter().enumerate() {
            for (b, slot) in next.iter_mut().enumerate() {
                if sys.allowed(a as u8, b as u8) {
                    mats[b].right_mul(row, &mut buf);
                    for (x, y) in slot.iter_mut().zip(&buf) {
                        *x += y;
                    }
                }
            }
        }
        rows = next;
        log_scale += normalise_rows(&mut rows);
    }
    let mut ext = vec![1.0f64; k];
    let mut ext_scale = 0.0;
    for _ in n..len {
        let mut next: Vec<f64> = (0..k)
            .map(|a| (0..k).filter(|&b| sys.allowed(a as u8, b as u8)).map(|b| ext[b]).sum())
            .collect();
        ext_scale += normalise(&mut next);
        ext = next;
    }
    let total: f64 = rows.iter().zip(&ext).map(|(row, e)| row.iter().sum::<f64>() * e).sum();
    log_scale + ext_scale + total.ln()
}

fn normalise_rows(rows: &mut [Vec<f64>]) -> f64 {
    let total: f64 = rows.iter().flatten().sum();
    for x in rows.iter_mut().flatten() {
        *x /= total;
    }
    total.ln()
}

/// Exact `(log q_n, log p_n)` for the `n`-fold join of `cover`.
///
/// Both are the sum over join elements of `e^{phi_n}`, which is constant on
/// each element; potentials that are not refuse with the cylinder length
/// they would need.
pub fn q_p_exact(phi: &AlmostAdditiveSeq, cover: &CylinderCover, n: usize) -> Result<(f64, f64)> {
    if phi.system() != cover.system() {
        return Err(Error::SystemMismatch);
    }
    let joined = cover.join(n)?;
    let v = weighted_word_sum(phi, n, joined.length())?;
    Ok((v, v))
}

/// `(log q_n, log p_n)` for the join `V_{i<n} T^{-i stride} alpha_m` with
/// infimum and supremum taken over each element, by enumeration.
pub fn join_extrema(phi: &AlmostAdditiveSeq, m: usize, stride: usize, n: usize) -> Result<(f64, f64)> {
    check_shift_potential(phi)?;
    if m == 0 || stride == 0 || n == 0 {
        return Err(Error::InvalidArgument("m, stride and n must be positive".into()));
    }
    let mut determined: Vec<usize> = (0..n).flat_map(|i| (0..m).map(move |j| i * stride + j)).collect();
    determined.sort_unstable();
    determined.dedup();
    let span = determined.last().map_or(0, |l| l + 1);
    let required = phi.locality(n).ok_or(Error::NotLocallyConstant {
        resolution: span,
        required: None,
    })?;
    let len = span.max(required);
    let sys = phi.system();
    let words = sys.admissible_words(len)?;
    if words.len() as u128 > ENUMERATION_LIMIT {
        return Err(Error::Unsupported("join too large to enumerate".into()));
    }
    let values: Vec<f64> = words
        .par_iter()
        .map(|w| phi.eval(n, &sys.representative(w)?))
        .collect::<Result<_>>()?;
    let mut extrema: BTreeMap<Vec<u8>, (f64, f64)> = BTreeMap::new();
    for (w, v) in words.iter().zip(values) {
        let key: Vec<u8> = determined.iter().map(|&i| w[i]).collect();
        let e = extrema.entry(key).or_insert((f64::INFINITY, f64::NEG_INFINITY));
        e.0 = e.0.min(v);
        e.1 = e.1.max(v);
    }
    let infs: Vec<f64> = extrema.values().map(|e| e.0).collect();
    let sups: Vec<f64> = extrema.values().map(|e| e.1).collect();
    Ok((log_sum_exp(&infs), log_sum_exp(&sups)))
}

/// Exact spanning (scale `2^{-(k-1)}`) and separated (scale `eps_k`) tables:
/// both are `log sum_{|w| = n + k} e^{phi_n(w)}`.
pub fn exact_growth_table(
    phi: &AlmostAdditiveSeq,
    k: usize,
    ns: &[usize],
) -> Result<(Vec<GrowthSample>, Vec<GrowthSample>)> {
    let values: Vec<f64> = ns
        .par_iter()
        .map(|&n| weighted_word_sum(phi, n, n + k))
        .collect::<Result<_>>()?;
    let make = |estimator, scale| {
        ns.iter()
            .zip(&values)
            .map(|(&n, &v)| GrowthSample {
                estimator,
                n,
                scale,
                log_value: v,
                exact: true,
                certified: true,
            })
            .collect::<Vec<_>>()
    };
    let spanning_scale = Scale::Eps(0.5f64.powi(k as i32 - 1));
    Ok((
        make(Estimator::Spanning, spanning_scale),
        make(Estimator::Separated, Scale::Dyadic(k)),
    ))
}

/// Exact cover tables for the cylinder cover of length `m`.
pub fn exact_cover_table(
    phi: &AlmostAdditiveSeq,
    m: usize,
    ns: &[usize],
) -> Result<(Vec<GrowthSample>, Vec<GrowthSample>)> {
    let cover = CylinderCover::new(phi.system(), m)?;
    let values: Vec<(f64, f64)> = ns
        .par_iter()
        .map(|&n| q_p_exact(phi, &cover, n))
        .collect::<Result<_>>()?;
    let make = |estimator, pick: fn(&(f64, f64)) -> f64| {
        ns.iter()
            .zip(&values)
            .map(|(&n, v)| GrowthSample {
                estimator,
                n,
                scale: Scale::Cylinder(m),
                log_value: pick(v),
                exact: true,
                certified: true,
            })
            .collect::<Vec<_>>()
    };
    Ok((
        make(Estimator::LowerCover, |v| v.0),
        make(Estimator::UpperCover, |v| v.1),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PointFn;
    use crate::systems::Point;

    fn sigma2() -> SystemModel {
        SystemModel::full_shift(2).unwrap()
    }

    fn golden() -> SystemModel {
        SystemModel::sft(vec![vec![1, 1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn word_count_examples() {
        assert_eq!(word_count(&sigma2(), 3).unwrap(), 8);
        assert_eq!(word_count(&sigma2(), 1).unwrap(), 2);
        let g = golden();
        let c: Vec<u128> = (1..=3).map(|n| word_count(&g, n).unwrap()).collect();
        assert_eq!(c, vec![2, 3, 5]);
        assert!((log_word_count(&g, 3).unwrap() - 5f64.ln()).abs() < 1e-12);
        assert!(word_count(&sigma2(), 200).is_err());
        assert!((log_word_count(&sigma2(), 200).unwrap() - 200.0 * 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn joins() {
        let c = CylinderCover::new(&sigma2(), 1).unwrap();
        assert_eq!(c.join(1).unwrap(), c);
        assert_eq!(c.join(3).unwrap().len().unwrap(), 8);
        let g = CylinderCover::new(&golden(), 2).unwrap();
        assert_eq!(g.join(2).unwrap().len().unwrap(), 5);
        assert_eq!(g.join(2).unwrap().elements().unwrap().len(), 5);
    }

    #[test]
    fn q_p_examples() {
        let s = sigma2();
        let alpha = CylinderCover::new(&s, 1).unwrap();
        let (q, p) = q_p_exact(&AlmostAdditiveSeq::zero(&s), &alpha, 3).unwrap();
        assert!((q - 8f64.ln()).abs() < 1e-12 && q == p);
        let (q, _) = q_p_exact(&AlmostAdditiveSeq::drift(&s, 1.0), &alpha, 3).unwrap();
        assert!((q - (3.0 + 8f64.ln())).abs() < 1e-12);
        let mats = vec![
            PositiveMatrix::scalar(2.0).unwrap(),
            PositiveMatrix::scalar(3.0).unwrap(),
        ];
        let c = AlmostAdditiveSeq::cocycle(&s, mats).unwrap();
        let (q, _) = q_p_exact(&c, &alpha, 3).unwrap();
        assert!((q - 125f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn refuses_non_local_potentials() {
        let s = sigma2();
        let f = AlmostAdditiveSeq::birkhoff(&s, PointFn::symbol_weights(2, 3, vec![0.0; 8]).unwrap()).unwrap();
        let alpha = CylinderCover::new(&s, 1).unwrap();
        assert_eq!(
            q_p_exact(&f, &alpha, 2).unwrap_err(),
            Error::NotLocallyConstant {
                resolution: 2,
                required: Some(4)
            }
        );
        let d = AlmostAdditiveSeq::zero(&SystemModel::Doubling);
        assert!(weighted_word_sum(&d, 1, 3).is_err());
    }

    fn brute(phi: &AlmostAdditiveSeq, n: usize, len: usize) -> f64 {
        let sys = phi.system();
        let v: Vec<f64> = sys
            .admissible_words(len)
            .unwrap()
            .iter()
            .map(|w| phi.eval(n, &sys.representative(w).unwrap()).unwrap())
            .collect();
        log_sum_exp(&v)
    }

    #[test]
    fn fast_paths_match_enumeration() {
        for sys in [sigma2(), golden(), SystemModel::full_shift(3).unwrap()] {
            let k = sys.alphabet_size().unwrap();
            let table: Vec<f64> = (0..k * k).map(|i| (i as f64 * 0.37).sin()).collect();
            let f = AlmostAdditiveSeq::birkhoff(&sys, PointFn::symbol_weights(k, 2, table).unwrap())
                .unwrap()
                .add(&AlmostAdditiveSeq::drift(&sys, 0.2))
                .unwrap();
            let mats: Vec<PositiveMatrix> = (0..k)
                .map(|a| PositiveMatrix::new(vec![vec![1.0 + a as f64, 0.5], vec![0.25, 2.0]]).unwrap())
                .collect();
            let c = AlmostAdditiveSeq::cocycle(&sys, mats).unwrap();
            for n in 1..5 {
                for extra in 1..3 {
                    let len = n + extra;
                    assert!((weighted_word_sum(&f, n, len).unwrap() - brute(&f, n, len)).abs() < 1e-10);
                    assert!((weighted_word_sum(&c, n, len).unwrap() - brute(&c, n, len)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn growth_table_closed_forms() {
        let s = sigma2();
        let ns: Vec<usize> = (1..=10).collect();
        let (span, sep) = exact_growth_table(&AlmostAdditiveSeq::zero(&s), 2, &ns).unwrap();
        for (a, b) in span.iter().zip(&sep) {
            assert!((b.log_value - (b.n + 2) as f64 * 2f64.ln()).abs() < 1e-9);
            assert_eq!(a.log_value, b.log_value);
        }
        let (_, sep) = exact_growth_table(&AlmostAdditiveSeq::drift(&s, 0.5), 2, &ns).unwrap();
        for b in &sep {
            let expect = 0.5 * b.n as f64 + (b.n + 2) as f64 * 2f64.ln();
            assert!((b.log_value - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn strided_join_matches_plain_join_for_unit_stride() {
        let s = sigma2();
        let f =
            AlmostAdditiveSeq::birkhoff(&s, PointFn::symbol_weights(2, 2, vec![0.1, -0.4, 0.9, 0.3]).unwrap()).unwrap();
        for n in 1..5 {
            let (q, p) = join_extrema(&f, 2, 1, n).unwrap();
            let exact = weighted_word_sum(&f, n, n + 1).unwrap();
            assert!((q - exact).abs() < 1e-10 && (p - exact).abs() < 1e-10);
            // a coarser cover than phi_n's resolution separates inf from sup
            let (q1, p1) = join_extrema(&f, 1, 1, n).unwrap();
            assert!(q1 < p1);
        }
        let rep = s.representative(&[1, 0]).unwrap();
        assert_eq!(rep, Point::word([1, 0], 0));
    }
}
