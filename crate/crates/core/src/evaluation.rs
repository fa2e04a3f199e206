//! Monte Carlo block/bit error rates and codeword geometry.
//!
//! Trials are simulated in fixed-size chunks. Chunk `c` at grid point `s`
//! draws from its own stream keyed by `(seed, s, c)`, chunks run in parallel
//! and are folded in index order, and the stop rule is checked after each
//! chunk. Results therefore do not depend on the number of worker threads.

use ndarray::{Array2, Axis};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::nearest_row;
use crate::channel::{add_scaled_noise, ebn0_to_sigma2, standard_normal};
use crate::message::bit_errors;
use crate::models::{classify, Codebook, DecoderModel};
use crate::rng::chunk_stream;
use crate::{Error, Result};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    Neural,
    Ml,
}

impl DecoderKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecoderKind::Neural => "neural",
            DecoderKind::Ml => "ml",
        }
    }
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neural" => Ok(DecoderKind::Neural),
            "ml" => Ok(DecoderKind::Ml),
            other => Err(Error::config(format!(
                "unknown decoder {other:?} (expected \"neural\" or \"ml\")"
            ))),
        }
    }
}

/// Per-SNR stopping condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_block_errors: u64,
    pub max_trials: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_block_errors: 100,
            max_trials: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub ebn0_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    pub bler_ci_lo: f64,
    pub bler_ci_hi: f64,
    pub ber: f64,
}

impl EvalPoint {
    /// Binomial standard error of the BLER estimate.
    pub fn standard_error(&self) -> f64 {
        (self.bler * (1.0 - self.bler) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub decoder: DecoderKind,
    pub seed: u64,
    pub points: Vec<EvalPoint>,
}

/// 95% Wilson score interval for `errors / trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// What decodes the received vectors.
#[derive(Debug, Clone, Copy)]
pub enum Receiver<'a> {
    Neural(&'a DecoderModel),
    Ml,
}

impl Receiver<'_> {
    pub fn kind(&self) -> DecoderKind {
        match self {
            Receiver::Neural(_) => DecoderKind::Neural,
            Receiver::Ml => DecoderKind::Ml,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    trials: u64,
    block_errors: u64,
    bit_errors: u64,
}

/// Monte Carlo settings beyond the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloSettings {
    pub stop: StopRule,
    pub seed: u64,
    /// Trials per chunk; the stop rule is evaluated at chunk boundaries.
    pub chunk_size: u64,
}

impl MonteCarloSettings {
    pub fn new(stop: StopRule, seed: u64) -> Self {
        Self {
            stop,
            seed,
            chunk_size: 1000,
        }
    }
}

fn run_chunk(
    codebook: &Codebook,
    receiver: Receiver<'_>,
    sigma2: f64,
    trials: usize,
    snr_index: usize,
    chunk_index: usize,
    seed: u64,
) -> Result<Counts> {
    let mut rng = chunk_stream(seed, snr_index, chunk_index);
    let count = codebook.len();
    let sent: Vec<usize> = (0..trials).map(|_| rng.random_range(0..count)).collect();
    let noise = standard_normal(trials, codebook.n(), &mut rng);
    let z = codebook.rows().select(Axis(0), &sent);
    let y = add_scaled_noise(&z, &noise, sigma2);
    let decided = match receiver {
        Receiver::Neural(decoder) => classify(&decoder.decode(&y)?),
        Receiver::Ml => y
            .rows()
            .into_iter()
            .map(|row| nearest_row(row, codebook.rows()))
            .collect(),
    };
    let mut counts = Counts {
        trials: trials as u64,
        ..Counts::default()
    };
    for (&s, &d) in sent.iter().zip(&decided) {
        if s != d {
            counts.block_errors += 1;
            counts.bit_errors += u64::from(bit_errors(s, d));
        }
    }
    Ok(counts)
}

/// BLER/BER at each Eb/N0 of `grid` for `codebook` sent over AWGN.
///
/// The code rate used for the noise variance is `k / n` of the codebook.
pub fn monte_carlo(
    codebook: &Codebook,
    receiver: Receiver<'_>,
    grid: &[f64],
    settings: MonteCarloSettings,
) -> Result<EvalReport> {
    if grid.is_empty() {
        return Err(Error::config("Eb/N0 grid is empty"));
    }
    let MonteCarloSettings {
        stop,
        seed,
        chunk_size,
    } = settings;
    if stop.max_trials == 0 || chunk_size == 0 {
        return Err(Error::config("stop rule allows zero trials"));
    }
    if stop.min_block_errors == 0 {
        return Err(Error::config("stop.min_block_errors must be at least 1"));
    }
    if let Receiver::Neural(decoder) = receiver {
        if decoder.stack.input_width() != codebook.n()
            || decoder.stack.output_width() != codebook.len()
        {
            return Err(Error::config("decoder shape does not match codebook"));
        }
    }
    if codebook.k() == 0 {
        return Err(Error::config("codebook must carry at least one bit"));
    }
    let rate = codebook.rate();
    let k = codebook.k() as u64;
    let wave = (rayon::current_num_threads() * 2).max(1);
    let total_chunks = stop.max_trials.div_ceil(chunk_size) as usize;

    let mut points = Vec::with_capacity(grid.len());
    for (snr_index, &ebn0_db) in grid.iter().enumerate() {
        let sigma2 = ebn0_to_sigma2(ebn0_db, rate)?;
        let mut acc = Counts::default();
        let mut next = 0usize;
        'chunks: while next < total_chunks {
            let end = (next + wave).min(total_chunks);
            let results: Vec<Result<Counts>> = (next..end)
                .into_par_iter()
                .map(|c| {
                    let start = c as u64 * chunk_size;
                    let size = chunk_size.min(stop.max_trials - start) as usize;
                    run_chunk(codebook, receiver, sigma2, size, snr_index, c, seed)
                })
                .collect();
            for r in results {
                let c = r?;
                acc.trials += c.trials;
                acc.block_errors += c.block_errors;
                acc.bit_errors += c.bit_errors;
                if acc.block_errors >= stop.min_block_errors || acc.trials >= stop.max_trials {
                    break 'chunks;
                }
            }
            next = end;
        }
        let bler = acc.block_errors as f64 / acc.trials as f64;
        let (lo, hi) = wilson_interval(acc.block_errors, acc.trials);
        points.push(EvalPoint {
            ebn0_db,
            trials: acc.trials,
            block_errors: acc.block_errors,
            bit_errors: acc.bit_errors,
            bler,
            bler_ci_lo: lo,
            bler_ci_hi: hi,
            ber: acc.bit_errors as f64 / (acc.trials * k) as f64,
        });
    }
    Ok(EvalReport {
        decoder: receiver.kind(),
        seed,
        points,
    })
}

/// `‖zᵢ − zⱼ‖` for every pair of codewords.
pub fn pairwise_distance_matrix(codebook: &Codebook) -> Array2<f64> {
    let rows = codebook.rows();
    let m = rows.nrows();
    let mut out = Array2::zeros((m, m));
    for i in 0..m {
        for j in (i + 1)..m {
            let d = rows
                .row(i)
                .iter()
                .zip(rows.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            out[[i, j]] = d;
            out[[j, i]] = d;
        }
    }
    out
}

/// Minimum, mean and maximum pairwise distance with pair multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    pub d_min: f64,
    pub n_at_min: usize,
    pub d_avg: f64,
    pub n_at_avg: usize,
    pub d_max: f64,
    pub n_at_max: usize,
    pub tolerance: f64,
}

pub const DEFAULT_DISTANCE_TOLERANCE: f64 = 0.05;

/// Statistics over the unordered pairs of distinct codewords. `n_at_*`
/// counts pairs whose distance lies within `tolerance` of the statistic.
pub fn distance_stats(codebook: &Codebook, tolerance: f64) -> Result<DistanceStats> {
    if codebook.len() < 2 {
        return Err(Error::config("distance statistics need at least two codewords"));
    }
    if !(tolerance > 0.0) {
        return Err(Error::config("distance tolerance must be positive"));
    }
    let matrix = pairwise_distance_matrix(codebook);
    let m = matrix.nrows();
    let pairs: Vec<f64> = (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
        .map(|(i, j)| matrix[[i, j]])
        .collect();
    let d_min = pairs.iter().copied().fold(f64::INFINITY, f64::min);
    let d_max = pairs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let d_avg = pairs.iter().sum::<f64>() / pairs.len() as f64;
    let near = |x: f64| pairs.iter().filter(|&&d| (d - x).abs() <= tolerance).count();
    Ok(DistanceStats {
        d_min,
        n_at_min: near(d_min),
        d_avg,
        n_at_avg: near(d_avg),
        d_max,
        n_at_max: near(d_max),
        tolerance,
    })
}
