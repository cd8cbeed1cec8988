// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Discrete power-law fits of degree sequences: exponent estimation,
//! Kolmogorov–Smirnov distance, `x_min` selection and a semi-parametric
//! bootstrap goodness-of-fit test.

mod zeta;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use zeta::hurwitz_zeta;

use crate::error::{Error, Result};

/// Minimum number of observations at or above `x_min` for a fit.
pub const MIN_TAIL: usize = 10;

const ALPHA_LO: f64 = 1.0 + 1e-9;
const ALPHA_HI: f64 = 50.0;
/// Largest value tabulated by the sampler; beyond it a continuous
/// approximation of the tail is used.
const SAMPLER_TABLE_MAX: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub x_min: u64,
    pub ks_stat: f64,
    pub p_value: Option<f64>,
    pub n_tail: usize,
}

/// How `x_min` is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum XminRule {
    /// Minimize the KS distance over observed values.
    #[default]
    Auto,
    Fixed(u64),
}

/// Sorted distinct values with counts and suffix aggregates.
#[derive(Clone, Debug)]
struct Sample {
    values: Vec<u64>,
    counts: Vec<usize>,
    /// observations with value >= values[i]
    suffix_n: Vec<usize>,
    /// Σ ln x over observations with value >= values[i]
    suffix_log: Vec<f64>,
}

impl Sample {
    fn new(data: &[u64]) -> Self {
        let mut sorted = data.to_vec();
        sorted.sort_unstable();
        let mut values = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for x in sorted {
            if values.last() == Some(&x) {
                *counts.last_mut().unwrap() += 1;
            } else {
                values.push(x);
                counts.push(1);
            }
        }
        let r = values.len();
        let mut suffix_n = vec![0; r + 1];
        let mut suffix_log = vec![0.0; r + 1];
        for i in (0..r).rev() {
            suffix_n[i] = suffix_n[i + 1] + counts[i];
            let ln = if values[i] > 0 { (values[i] as f64).ln() } else { 0.0 };
            suffix_log[i] = suffix_log[i + 1] + counts[i] as f64 * ln;
        }
        suffix_n.pop();
        suffix_log.pop();
        Sample {
            values,
            counts,
            suffix_n,
            suffix_log,
        }
    }

    /// Index of the first distinct value >= x_min.
    fn start(&self, x_min: u64) -> usize {
        self.values.partition_point(|&v| v < x_min)
    }

    fn tail_len(&self, start: usize) -> usize {
        self.suffix_n.get(start).copied().unwrap_or(0)
    }

    fn mle_alpha(&self, start: usize, x_min: u64) -> Result<f64> {
        let n = self.tail_len(start);
        if n < MIN_TAIL {
            return Err(Error::InsufficientData(format!(
                "{n} observations >= x_min = {x_min}, need at least {MIN_TAIL}"
            )));
        }
        if start + 1 == self.values.len() {
            return Err(Error::DegenerateFit(format!("every tail observation equals x_min = {x_min}")));
        }
        let mean_log = self.suffix_log[start] / n as f64;
        let q = x_min as f64;
        // per-observation log-likelihood; concave in alpha
        let loglik = |a: f64| -hurwitz_zeta(a, q).ln() - a * mean_log;
        Ok(golden_max(loglik, ALPHA_LO, ALPHA_HI, 1e-10))
    }

    fn ks(&self, start: usize, alpha: f64, x_min: u64) -> f64 {
        let n = self.tail_len(start) as f64;
        let norm = hurwitz_zeta(alpha, x_min as f64);
        let model_cdf = |x: u64| 1.0 - hurwitz_zeta(alpha, x as f64 + 1.0) / norm;
        let mut worst = 0.0f64;
        let mut below = 0usize;
        let mut prev = x_min;
        for i in start..self.values.len() {
            let v = self.values[i];
            // the empirical CDF is flat on [prev, v - 1] while the model rises,
            // so only the right end of the gap can be the sup
            if v > prev {
                worst = worst.max((below as f64 / n - model_cdf(v - 1)).abs());
            }
            below += self.counts[i];
            worst = worst.max((below as f64 / n - model_cdf(v)).abs());
            prev = v + 1;
        }
        worst.min(1.0)
    }
}

/// Maximize a unimodal function on `[lo, hi]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol * (1.0 + lo.abs()) {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}

/// Closed-form estimate `1 + n [Σ ln(x_i / (x_min - ½))]^-1` over the
/// observations `>= x_min`. Biased for small `x_min`; kept as a reference
/// and starting point.
pub fn approx_alpha(degrees: &[u64], x_min: u64) -> Result<f64> {
    if x_min < 1 {
        return Err(Error::InvalidParameter("x_min must be >= 1".into()));
    }
    let shift = x_min as f64 - 0.5;
    let (mut n, mut s, mut spread) = (0usize, 0.0, false);
    for &x in degrees.iter().filter(|&&x| x >= x_min) {
        n += 1;
        s += (x as f64 / shift).ln();
        spread |= x > x_min;
    }
    if n == 0 {
        return Err(Error::InsufficientData(format!("no observations >= x_min = {x_min}")));
    }
    if !spread {
        return Err(Error::DegenerateFit(format!("every tail observation equals x_min = {x_min}")));
    }
    Ok(1.0 + n as f64 / s)
}

/// Maximum-likelihood exponent of a discrete power law on `x >= x_min`,
/// normalized by the Hurwitz zeta function.
pub fn fit_alpha(degrees: &[u64], x_min: u64) -> Result<f64> {
    if x_min < 1 {
        return Err(Error::InvalidParameter("x_min must be >= 1".into()));
    }
    let sample = Sample::new(degrees);
    sample.mle_alpha(sample.start(x_min), x_min)
}

/// KS distance between the empirical tail CDF and the model CDF, taken
/// over every integer support point from `x_min` to the largest value.
pub fn ks_stat(degrees: &[u64], alpha: f64, x_min: u64) -> Result<f64> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be > 1, got {alpha}")));
    }
    if x_min < 1 {
        return Err(Error::InvalidParameter("x_min must be >= 1".into()));
    }
    let sample = Sample::new(degrees);
    let start = sample.start(x_min);
    if sample.tail_len(start) == 0 {
        return Err(Error::InsufficientData(format!("no observations >= x_min = {x_min}")));
    }
    Ok(sample.ks(start, alpha, x_min))
}

/// Pick `x_min` among observed values by minimizing the KS distance,
/// keeping at least [`MIN_TAIL`] tail observations. Ties go to the smaller
/// value.
pub fn select_xmin(degrees: &[u64]) -> Result<u64> {
    select_in(&Sample::new(degrees)).map(|(x, _, _)| x)
}

fn select_in(sample: &Sample) -> Result<(u64, f64, f64)> {
    let distinct_positive = sample.values.iter().filter(|&&v| v >= 1).count();
    if distinct_positive < 2 {
        return Err(Error::InsufficientData("need at least 2 distinct positive values".into()));
    }
    let mut best: Option<(u64, f64, f64)> = None;
    for (i, &x_min) in sample.values.iter().enumerate() {
        if x_min < 1 {
            continue;
        }
        if sample.tail_len(i) < MIN_TAIL {
            break;
        }
        let alpha = match sample.mle_alpha(i, x_min) {
            Ok(a) => a,
            Err(Error::DegenerateFit(_)) => break,
            Err(e) => return Err(e),
        };
        let d = sample.ks(i, alpha, x_min);
        if best.is_none_or(|(_, _, bd)| d < bd) {
            best = Some((x_min, alpha, d));
        }
    }
    best.ok_or_else(|| {
        Error::InsufficientData(format!("no x_min candidate leaves {MIN_TAIL} tail observations"))
    })
}

fn fit_sample(sample: &Sample, rule: XminRule) -> Result<PowerLawFit> {
    let (x_min, alpha, ks) = match rule {
        XminRule::Auto => select_in(sample)?,
        XminRule::Fixed(x_min) => {
            if x_min < 1 {
                return Err(Error::InvalidParameter("x_min must be >= 1".into()));
            }
            let start = sample.start(x_min);
            let alpha = sample.mle_alpha(start, x_min)?;
            (x_min, alpha, sample.ks(start, alpha, x_min))
        }
    };
    Ok(PowerLawFit {
        alpha,
        x_min,
        ks_stat: ks,
        p_value: None,
        n_tail: sample.tail_len(sample.start(x_min)),
    })
}

/// Fit `alpha` (and `x_min` unless fixed) and compute the KS distance.
/// `p_value` is left empty; see [`bootstrap_p`].
pub fn fit_power_law(degrees: &[u64], rule: XminRule) -> Result<PowerLawFit> {
    fit_sample(&Sample::new(degrees), rule)
}

/// Inverse-CDF sampler for the discrete power law on `x >= x_min`.
#[derive(Clone, Debug)]
pub struct PowerLawSampler {
    alpha: f64,
    x_min: u64,
    cdf: Vec<f64>,
}

impl PowerLawSampler {
    pub fn new(alpha: f64, x_min: u64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() || x_min < 1 {
            return Err(Error::InvalidParameter(format!(
                "sampler needs alpha > 1 and x_min >= 1, got {alpha}, {x_min}"
            )));
        }
        let norm = hurwitz_zeta(alpha, x_min as f64);
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        let mut x = x_min;
        while cdf.len() < SAMPLER_TABLE_MAX {
            acc += (x as f64).powf(-alpha) / norm;
            cdf.push(acc);
            if 1.0 - acc < 1e-13 {
                break;
            }
            x += 1;
        }
        Ok(PowerLawSampler { alpha, x_min, cdf })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u);
        if i < self.cdf.len() {
            return self.x_min + i as u64;
        }
        // continuous approximation conditioned on exceeding the table
        let edge = (self.x_min + self.cdf.len() as u64) as f64;
        let r: f64 = rng.random();
        let x = (edge - 0.5) * (1.0 - r).powf(-1.0 / (self.alpha - 1.0)) + 0.5;
        if x >= u64::MAX as f64 {
            u64::MAX
        } else {
            x.floor() as u64
        }
    }
}

/// Semi-parametric bootstrap p-value for a fitted power law.
///
/// Each replicate redraws `n` observations: with probability
/// `n_tail / n` from the fitted power law, otherwise uniformly from the
/// observed values below `x_min`. The replicate is refitted under the same
/// `x_min` rule and counts toward `p` when its KS distance is at least the
/// observed one. Replicates whose refit fails are left out of the ratio.
/// Replicate `i` uses a generator seeded from `(seed, i)` only.
pub fn bootstrap_p(degrees: &[u64], fit: &PowerLawFit, n_boot: usize, seed: u64, rule: XminRule) -> Result<f64> {
    if n_boot < 1 {
        return Err(Error::InvalidParameter("n_boot must be >= 1".into()));
    }
    let mut body: Vec<u64> = degrees.iter().copied().filter(|&x| x < fit.x_min).collect();
    body.sort_unstable();
    let n = degrees.len();
    let n_tail = n - body.len();
    if n_tail == 0 {
        return Err(Error::InsufficientData("fit has an empty tail".into()));
    }
    let p_tail = n_tail as f64 / n as f64;
    let sampler = PowerLawSampler::new(fit.alpha, fit.x_min)?;

    let outcomes: Vec<Option<bool>> = (0..n_boot)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(seed, i as u64);
            let synthetic: Vec<u64> = (0..n)
                .map(|_| {
                    if body.is_empty() || rng.random::<f64>() < p_tail {
                        sampler.sample(&mut rng)
                    } else {
                        body[rng.random_range(0..body.len())]
                    }
                })
                .collect();
            fit_sample(&Sample::new(&synthetic), rule)
                .ok()
                .map(|f| f.ks_stat >= fit.ks_stat)
        })
        .collect();
    let valid = outcomes.iter().flatten().count();
    if valid == 0 {
        return Err(Error::Numerical("every bootstrap replicate failed to fit".into()));
    }
    let hits = outcomes.iter().flatten().filter(|&&hit| hit).count();
    Ok(hits as f64 / valid as f64)
}

pub(crate) fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_hand_value() {
        // 1 + 3 / (ln 2 + ln 4 + ln 8)
        let a = approx_alpha(&[1, 2, 4], 1).unwrap();
        assert!((a - 1.721_347_5).abs() < 1e-6, "{a}");
        assert!(approx_alpha(&[3, 3, 3], 3).is_err());
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_alpha(&[2; 50], 2), Err(Error::DegenerateFit(_))));
        assert!(matches!(fit_alpha(&[1, 2, 3, 4, 5], 1), Err(Error::InsufficientData(_))));
        assert!(matches!(select_xmin(&[4; 40]), Err(Error::InsufficientData(_))));
        assert!(fit_alpha(&[1, 2], 0).is_err());
    }

    #[test]
    fn duplicating_observations_keeps_alpha() {
        let data: Vec<u64> = vec![1, 1, 1, 1, 2, 2, 3, 1, 5, 1, 2, 8, 1, 1, 3, 2, 13];
        let doubled: Vec<u64> = data.iter().chain(&data).copied().collect();
        let a = fit_alpha(&data, 1).unwrap();
        let b = fit_alpha(&doubled, 1).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }

    #[test]
    fn mle_is_a_likelihood_maximum() {
        let data: Vec<u64> = vec![1, 1, 1, 1, 2, 2, 3, 1, 5, 1, 2, 8, 1, 1, 3, 2, 13, 1, 1, 4];
        let a = fit_alpha(&data, 1).unwrap();
        let ll = |a: f64| {
            -(data.len() as f64) * hurwitz_zeta(a, 1.0).ln()
                - a * data.iter().map(|&x| (x as f64).ln()).sum::<f64>()
        };
        assert!(ll(a) >= ll(a + 1e-4) && ll(a) >= ll(a - 1e-4));
    }

    #[test]
    fn bootstrap_rejects_zero_replicates() {
        let data: Vec<u64> = (1..40).collect();
        let fit = fit_power_law(&data, XminRule::Fixed(1)).unwrap();
        assert!(bootstrap_p(&data, &fit, 0, 1, XminRule::Fixed(1)).is_err());
    }
}
