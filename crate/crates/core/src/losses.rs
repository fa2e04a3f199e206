//! Training objectives.
//!
//! Every loss comes in two forms: a value-only function and a `*_grad` variant
//! returning the value together with exact partial derivatives with respect
//! to each matrix argument. Mutual-information quantities are in nats.
//!
//! [`composite_cost`] combines the selected terms into the single scalar that
//! the optimizer minimizes:
//!
//! ```text
//! cost = w_ce·CE + w_ub·U − w_pd·D + w_p·P − F_l·w_mi·I
//! ```
//!
//! where `I` is either the WLLN estimate or the Donsker-Varadhan bound, and at
//! most one of the union-bound (`U`) and pairwise-distance (`D`) terms is active.

use ndarray::{Array2, ArrayView1, Zip};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Floor applied to probabilities before taking logarithms.
pub const PROB_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermWeight {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

impl TermWeight {
    pub const fn on(weight: f64) -> Self {
        Self {
            enabled: true,
            weight,
        }
    }

    pub const fn off() -> Self {
        Self {
            enabled: false,
            weight: 1.0,
        }
    }

    /// Weight if enabled, otherwise zero.
    pub fn effective(&self) -> f64 {
        if self.enabled {
            self.weight
        } else {
            0.0
        }
    }
}

impl Default for TermWeight {
    fn default() -> Self {
        Self::off()
    }
}

/// Which terms enter the composite cost, and how strongly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossWeights {
    #[serde(default = "ce_default")]
    pub cross_entropy: TermWeight,
    #[serde(default)]
    pub mi_wlln: TermWeight,
    #[serde(default)]
    pub dv_bound: TermWeight,
    #[serde(default)]
    pub pairwise_distance: TermWeight,
    #[serde(default)]
    pub union_bound: TermWeight,
    #[serde(default)]
    pub power_penalty: TermWeight,
    /// Secondary learning factor applied to the MI term only.
    #[serde(default = "mi_factor_default")]
    pub mi_factor: f64,
    /// Number of (z, y) samples for MI estimation; a multiple of 2^k.
    #[serde(default = "mi_samples_default")]
    pub mi_samples: usize,
}

fn ce_default() -> TermWeight {
    TermWeight::on(1.0)
}

fn mi_factor_default() -> f64 {
    100.0
}

fn mi_samples_default() -> usize {
    1600
}

impl Default for LossWeights {
    fn default() -> Self {
        Self::ce_only()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiEstimator {
    Wlln,
    DvBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceTerm {
    UnionBound,
    PairwiseDistance,
}

impl LossWeights {
    pub fn ce_only() -> Self {
        Self {
            cross_entropy: TermWeight::on(1.0),
            mi_wlln: TermWeight::off(),
            dv_bound: TermWeight::off(),
            pairwise_distance: TermWeight::off(),
            union_bound: TermWeight::off(),
            power_penalty: TermWeight::off(),
            mi_factor: mi_factor_default(),
            mi_samples: mi_samples_default(),
        }
    }

    /// Checks term exclusivity and the MI sample count for `messages = 2^k`.
    pub fn validate(&self, messages: usize) -> Result<()> {
        if self.mi_wlln.enabled && self.dv_bound.enabled {
            return Err(Error::config(
                "losses.mi_wlln and losses.dv_bound are mutually exclusive",
            ));
        }
        if self.union_bound.enabled && self.pairwise_distance.enabled {
            return Err(Error::config(
                "losses.union_bound and losses.pairwise_distance are mutually exclusive",
            ));
        }
        for (name, t) in self.terms() {
            if !t.weight.is_finite() {
                return Err(Error::config(format!("losses.{name}.weight must be finite")));
            }
        }
        if self.mi_estimator().is_some() {
            if self.mi_samples == 0 || self.mi_samples % messages != 0 {
                return Err(Error::config(format!(
                    "losses.mi_samples must be a positive multiple of {messages}, got {}",
                    self.mi_samples
                )));
            }
            if !(self.mi_factor >= 0.0) || !self.mi_factor.is_finite() {
                return Err(Error::config("losses.mi_factor must be finite and non-negative"));
            }
        }
        Ok(())
    }

    fn terms(&self) -> [(&'static str, &TermWeight); 6] {
        [
            ("cross_entropy", &self.cross_entropy),
            ("mi_wlln", &self.mi_wlln),
            ("dv_bound", &self.dv_bound),
            ("pairwise_distance", &self.pairwise_distance),
            ("union_bound", &self.union_bound),
            ("power_penalty", &self.power_penalty),
        ]
    }

    pub fn mi_estimator(&self) -> Option<MiEstimator> {
        match (self.mi_wlln.enabled, self.dv_bound.enabled) {
            (true, _) => Some(MiEstimator::Wlln),
            (_, true) => Some(MiEstimator::DvBound),
            _ => None,
        }
    }

    pub fn distance_term(&self) -> Option<DistanceTerm> {
        match (self.union_bound.enabled, self.pairwise_distance.enabled) {
            (true, _) => Some(DistanceTerm::UnionBound),
            (_, true) => Some(DistanceTerm::PairwiseDistance),
            _ => None,
        }
    }

    /// Signed multipliers of each raw term in the minimized cost.
    pub fn coefficients(&self) -> CostCoefficients {
        CostCoefficients {
            cross_entropy: self.cross_entropy.effective(),
            mi_wlln: -self.mi_factor * self.mi_wlln.effective(),
            dv_bound: -self.mi_factor * self.dv_bound.effective(),
            union_bound: self.union_bound.effective(),
            pairwise_distance: -self.pairwise_distance.effective(),
            power_penalty: self.power_penalty.effective(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostCoefficients {
    pub cross_entropy: f64,
    pub mi_wlln: f64,
    pub dv_bound: f64,
    pub union_bound: f64,
    pub pairwise_distance: f64,
    pub power_penalty: f64,
}

/// Raw term values for one evaluation of the composite cost.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CostTerms {
    pub cross_entropy: Option<f64>,
    pub mi_wlln: Option<f64>,
    pub dv_bound: Option<f64>,
    pub union_bound: Option<f64>,
    pub pairwise_distance: Option<f64>,
    pub power_penalty: Option<f64>,
}

/// Weighted sum of the enabled terms (to be minimized).
pub fn composite_cost(terms: &CostTerms, weights: &LossWeights) -> Result<f64> {
    if weights.mi_wlln.enabled && weights.dv_bound.enabled {
        return Err(Error::config("conflicting MI terms: select mi_wlln or dv_bound"));
    }
    if weights.union_bound.enabled && weights.pairwise_distance.enabled {
        return Err(Error::config(
            "conflicting distance terms: select union_bound or pairwise_distance",
        ));
    }
    let c = weights.coefficients();
    let parts = [
        ("cross_entropy", weights.cross_entropy.enabled, terms.cross_entropy, c.cross_entropy),
        ("mi_wlln", weights.mi_wlln.enabled, terms.mi_wlln, c.mi_wlln),
        ("dv_bound", weights.dv_bound.enabled, terms.dv_bound, c.dv_bound),
        ("union_bound", weights.union_bound.enabled, terms.union_bound, c.union_bound),
        (
            "pairwise_distance",
            weights.pairwise_distance.enabled,
            terms.pairwise_distance,
            c.pairwise_distance,
        ),
        ("power_penalty", weights.power_penalty.enabled, terms.power_penalty, c.power_penalty),
    ];
    let mut cost = 0.0;
    for (name, enabled, value, coeff) in parts {
        if !enabled {
            continue;
        }
        let v = value.ok_or_else(|| Error::config(format!("missing value for enabled term {name}")))?;
        cost += coeff * v;
    }
    Ok(cost)
}

fn squared_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `log Σ exp(x)` without overflow.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Softmax weights of `values` written into `out`; returns the log-sum-exp.
fn softmax_into(values: &[f64], out: &mut [f64]) -> f64 {
    let lse = log_sum_exp(values);
    for (o, v) in out.iter_mut().zip(values) {
        *o = (v - lse).exp();
    }
    lse
}

fn check_labels(probs: &Array2<f64>, labels: &[usize]) -> Result<()> {
    if probs.nrows() != labels.len() {
        return Err(Error::config(format!(
            "{} probability rows but {} labels",
            probs.nrows(),
            labels.len()
        )));
    }
    if probs.nrows() == 0 {
        return Err(Error::config("empty batch"));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= probs.ncols()) {
        return Err(Error::config(format!(
            "label {bad} out of range for {} classes",
            probs.ncols()
        )));
    }
    Ok(())
}

/// Mean categorical cross-entropy in nats.
pub fn cross_entropy(probs: &Array2<f64>, labels: &[usize]) -> Result<f64> {
    check_labels(probs, labels)?;
    let total: f64 = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| -probs[[i, l]].max(PROB_FLOOR).ln())
        .sum();
    Ok(total / labels.len() as f64)
}

/// Cross-entropy and its gradient with respect to `probs`.
pub fn cross_entropy_grad(probs: &Array2<f64>, labels: &[usize]) -> Result<(f64, Array2<f64>)> {
    let value = cross_entropy(probs, labels)?;
    let b = labels.len() as f64;
    let mut grad = Array2::zeros(probs.dim());
    for (i, &l) in labels.iter().enumerate() {
        grad[[i, l]] = -1.0 / (b * probs[[i, l]].max(PROB_FLOOR));
    }
    Ok((value, grad))
}

#[derive(Debug, Clone)]
pub struct MiGradient {
    pub value: f64,
    pub codebook: Array2<f64>,
    pub z: Array2<f64>,
    pub y: Array2<f64>,
}

fn check_mi_shapes(codebook: &Array2<f64>, z: &Array2<f64>, y: &Array2<f64>) -> Result<()> {
    if z.dim() != y.dim() || z.ncols() != codebook.ncols() {
        return Err(Error::config("mutual-information batch shapes do not agree"));
    }
    if z.nrows() == 0 || codebook.nrows() == 0 {
        return Err(Error::config("mutual-information batch is empty"));
    }
    Ok(())
}

/// WLLN estimate of I(Z;Y) for a uniform prior over `codebook` rows and the
/// Gaussian channel `N(z, σ²I)`. Gaussian normalization constants cancel.
pub fn mi_wlln(codebook: &Array2<f64>, z: &Array2<f64>, y: &Array2<f64>, sigma2: f64) -> Result<f64> {
    Ok(mi_wlln_impl(codebook, z, y, sigma2, false)?.value)
}

pub fn mi_wlln_grad(
    codebook: &Array2<f64>,
    z: &Array2<f64>,
    y: &Array2<f64>,
    sigma2: f64,
) -> Result<MiGradient> {
    mi_wlln_impl(codebook, z, y, sigma2, true)
}

fn mi_wlln_impl(
    codebook: &Array2<f64>,
    z: &Array2<f64>,
    y: &Array2<f64>,
    sigma2: f64,
    with_grad: bool,
) -> Result<MiGradient> {
    if !(sigma2 > 0.0) {
        return Err(Error::config(format!("sigma2 must be positive, got {sigma2}")));
    }
    check_mi_shapes(codebook, z, y)?;
    let samples = z.nrows();
    let count = codebook.nrows();
    let s = 1.0 / (2.0 * sigma2);
    let ln_count = (count as f64).ln();
    let inv_n = 1.0 / samples as f64;

    let mut g_code = Array2::zeros(if with_grad { codebook.dim() } else { (0, 0) });
    let mut g_z = Array2::zeros(if with_grad { z.dim() } else { (0, 0) });
    let mut g_y = Array2::zeros(if with_grad { y.dim() } else { (0, 0) });

    let mut exponents = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let mut total = 0.0;
    for i in 0..samples {
        let yi = y.row(i);
        let zi = z.row(i);
        let joint = -s * squared_distance(yi, zi);
        for (j, e) in exponents.iter_mut().enumerate() {
            *e = -s * squared_distance(yi, codebook.row(j));
        }
        let lse = softmax_into(&exponents, &mut weights);
        total += joint - lse + ln_count;

        if with_grad {
            let c = 2.0 * s * inv_n;
            for d in 0..z.ncols() {
                let diff = yi[d] - zi[d];
                g_z[[i, d]] += c * diff;
                let mut mix = 0.0;
                for (j, &w) in weights.iter().enumerate() {
                    let dj = yi[d] - codebook[[j, d]];
                    mix += w * dj;
                    g_code[[j, d]] -= c * w * dj;
                }
                g_y[[i, d]] += c * (mix - diff);
            }
        }
    }
    Ok(MiGradient {
        value: total * inv_n,
        codebook: g_code,
        z: g_z,
        y: g_y,
    })
}

#[derive(Debug, Clone)]
pub struct DvGradient {
    pub value: f64,
    pub z: Array2<f64>,
    pub y: Array2<f64>,
    pub y_shuffled: Array2<f64>,
}

/// Donsker-Varadhan lower bound with the dot-product critic `T(z, y) = z·y`.
pub fn dv_bound(z: &Array2<f64>, y: &Array2<f64>, y_shuffled: &Array2<f64>) -> Result<f64> {
    Ok(dv_bound_impl(z, y, y_shuffled, false)?.value)
}

pub fn dv_bound_grad(z: &Array2<f64>, y: &Array2<f64>, y_shuffled: &Array2<f64>) -> Result<DvGradient> {
    dv_bound_impl(z, y, y_shuffled, true)
}

fn dv_bound_impl(
    z: &Array2<f64>,
    y: &Array2<f64>,
    y_shuffled: &Array2<f64>,
    with_grad: bool,
) -> Result<DvGradient> {
    if z.dim() != y.dim() || y.dim() != y_shuffled.dim() || z.nrows() == 0 {
        return Err(Error::config("DV bound batch shapes do not agree"));
    }
    let samples = z.nrows();
    let inv_n = 1.0 / samples as f64;
    let joint: f64 = z
        .rows()
        .into_iter()
        .zip(y.rows())
        .map(|(a, b)| a.dot(&b))
        .sum::<f64>()
        * inv_n;
    let marginal: Vec<f64> = z
        .rows()
        .into_iter()
        .zip(y_shuffled.rows())
        .map(|(a, b)| a.dot(&b))
        .collect();
    let mut weights = vec![0.0; samples];
    let lse = softmax_into(&marginal, &mut weights);
    let value = joint - (lse - (samples as f64).ln());

    if !with_grad {
        return Ok(DvGradient {
            value,
            z: Array2::zeros((0, 0)),
            y: Array2::zeros((0, 0)),
            y_shuffled: Array2::zeros((0, 0)),
        });
    }
    let mut g_z = y * inv_n;
    let g_y = z * inv_n;
    let mut g_ys = Array2::zeros(z.dim());
    for i in 0..samples {
        let w = weights[i];
        for d in 0..z.ncols() {
            g_z[[i, d]] -= w * y_shuffled[[i, d]];
            g_ys[[i, d]] = -w * z[[i, d]];
        }
    }
    Ok(DvGradient {
        value,
        z: g_z,
        y: g_y,
        y_shuffled: g_ys,
    })
}

/// Uniformly random permutation of `0..n` without fixed points (`n ≥ 2`).
/// For `n == 1` the identity is returned.
pub fn random_derangement<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    if n < 2 {
        return perm;
    }
    loop {
        perm.shuffle(rng);
        if perm.iter().enumerate().all(|(i, &p)| i != p) {
            return perm;
        }
    }
}

/// Sum of squared distances over all ordered pairs.
pub fn pairwise_distance_sum(codebook: &Array2<f64>) -> f64 {
    // Σᵢⱼ‖zᵢ−zⱼ‖² = 2M·Σ‖zᵢ‖² − 2‖Σzᵢ‖²
    let m = codebook.nrows() as f64;
    let energy: f64 = codebook.iter().map(|v| v * v).sum();
    let centroid = codebook.sum_axis(ndarray::Axis(0));
    let value = 2.0 * m * energy - 2.0 * centroid.dot(&centroid);
    value.max(0.0)
}

pub fn pairwise_distance_sum_grad(codebook: &Array2<f64>) -> (f64, Array2<f64>) {
    let m = codebook.nrows() as f64;
    let centroid = codebook.sum_axis(ndarray::Axis(0));
    let mut grad = codebook * (4.0 * m);
    grad -= &(&centroid * 4.0);
    (pairwise_distance_sum(codebook), grad)
}

/// `Σ_{i≠j} exp(−‖zᵢ−zⱼ‖² / (2σ²))`.
pub fn union_bound_loss(codebook: &Array2<f64>, sigma2: f64) -> Result<f64> {
    Ok(union_bound_loss_grad(codebook, sigma2)?.0)
}

pub fn union_bound_loss_grad(codebook: &Array2<f64>, sigma2: f64) -> Result<(f64, Array2<f64>)> {
    if !(sigma2 > 0.0) {
        return Err(Error::config(format!("sigma2 must be positive, got {sigma2}")));
    }
    let m = codebook.nrows();
    let mut value = 0.0;
    let mut grad = Array2::zeros(codebook.dim());
    for i in 0..m {
        for j in (i + 1)..m {
            let d2 = squared_distance(codebook.row(i), codebook.row(j));
            let e = (-d2 / (2.0 * sigma2)).exp();
            value += 2.0 * e;
            // each unordered pair appears twice; ∂/∂zᵢ of 2e = −2e(zᵢ−zⱼ)/σ²
            let c = 2.0 * e / sigma2;
            for d in 0..codebook.ncols() {
                let diff = codebook[[i, d]] - codebook[[j, d]];
                grad[[i, d]] -= c * diff;
                grad[[j, d]] += c * diff;
            }
        }
    }
    Ok((value, grad))
}

/// `|mean‖zᵢ‖² − n|`.
pub fn power_penalty(z: &Array2<f64>, n: usize) -> f64 {
    (mean_energy(z) - n as f64).abs()
}

pub fn mean_energy(z: &Array2<f64>) -> f64 {
    if z.nrows() == 0 {
        return 0.0;
    }
    z.iter().map(|v| v * v).sum::<f64>() / z.nrows() as f64
}

/// Penalty and its (sub)gradient; the subgradient at the kink is zero.
pub fn power_penalty_grad(z: &Array2<f64>, n: usize) -> (f64, Array2<f64>) {
    let excess = mean_energy(z) - n as f64;
    let sign = if excess > 0.0 {
        1.0
    } else if excess < 0.0 {
        -1.0
    } else {
        0.0
    };
    let c = sign * 2.0 / z.nrows().max(1) as f64;
    let mut grad = z.clone();
    Zip::from(&mut grad).for_each(|g| *g *= c);
    (excess.abs(), grad)
}
