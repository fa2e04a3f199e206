//! Training procedures.
//!
//! Every procedure takes one optimizer step per epoch on the full batch of
//! `2^k` messages:
//!
//! - [`train_ce_baseline`]: cross-entropy only at a fixed Eb/N0.
//! - [`train_composite`]: cross-entropy plus any selection of MI, distance and
//!   power terms at a fixed Eb/N0.
//! - [`train_twins`]: cross-entropy with the twin encoder.
//! - [`train_randomized`]: cross-entropy with Eb/N0 drawn uniformly from a
//!   range every epoch.
//!
//! Training is a pure function of the configuration: weight initialization,
//! channel noise for the cross-entropy batch, MI samples, shuffles and SNR
//! draws each come from their own seeded stream.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{add_scaled_noise, ebn0_to_sigma2, standard_normal};
use crate::losses::{
    self, composite_cost, cross_entropy_grad, dv_bound_grad, mi_wlln_grad,
    pairwise_distance_sum_grad, power_penalty_grad, random_derangement, union_bound_loss_grad,
    CostTerms, LossWeights, MiEstimator,
};
use crate::message::all_messages;
use crate::models::{Architecture, Autoencoder, ModelConfig, ModelGradients, PowerMode};
use crate::nn::{AdamConfig, AdamState};
use crate::rng::{stream, Stream, StreamRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Procedure {
    CeBaseline,
    Composite,
    Twins,
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EarlyStop {
    /// Off by default: under random training noise the windowed CE fluctuates
    /// more than the tolerance and the rule stops arbitrarily.
    #[serde(default)]
    pub enabled: bool,
    /// Moving-average window in epochs.
    #[serde(default = "default_window")]
    pub window: usize,
    /// Minimum improvement of the windowed mean cross-entropy.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_window() -> usize {
    500
}

fn default_tolerance() -> f64 {
    1e-5
}

impl Default for EarlyStop {
    fn default() -> Self {
        Self {
            enabled: false,
            window: default_window(),
            tolerance: default_tolerance(),
        }
    }
}

impl EarlyStop {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }

    /// True when the mean of the last window improved on the previous window
    /// by less than the tolerance. Checked only at window boundaries.
    pub fn plateaued(&self, ce_trace: &[f64]) -> bool {
        let w = self.window;
        let len = ce_trace.len();
        if !self.enabled || w == 0 || len < 2 * w || len % w != 0 {
            return false;
        }
        let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
        let previous = mean(&ce_trace[len - 2 * w..len - w]);
        let current = mean(&ce_trace[len - w..]);
        previous - current < self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(default = "default_procedure")]
    pub procedure: Procedure,
    #[serde(default = "default_max_epochs")]
    pub max_epochs: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    /// Fixed training Eb/N0 (dB) for the fixed-SNR procedures.
    #[serde(default = "default_train_ebn0")]
    pub train_ebn0_db: f64,
    /// `[lo, hi]` Eb/N0 range (dB) for randomized training.
    #[serde(default = "default_range")]
    pub ebn0_range_db: [f64; 2],
    #[serde(default)]
    pub early_stop: EarlyStop,
}

fn default_procedure() -> Procedure {
    Procedure::Randomized
}

fn default_max_epochs() -> usize {
    200_000
}

fn default_learning_rate() -> f64 {
    1e-3
}

fn default_train_ebn0() -> f64 {
    5.0
}

fn default_range() -> [f64; 2] {
    [0.0, 12.0]
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            procedure: default_procedure(),
            max_epochs: default_max_epochs(),
            learning_rate: default_learning_rate(),
            train_ebn0_db: default_train_ebn0(),
            ebn0_range_db: default_range(),
            early_stop: EarlyStop::default(),
        }
    }
}

/// Everything a training run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub seed: u64,
    pub model: ModelConfig,
    pub schedule: ScheduleConfig,
    pub losses: LossWeights,
}

impl TrainConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            seed,
            model: ModelConfig::new(k),
            schedule: ScheduleConfig::default(),
            losses: LossWeights::ce_only(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.losses.validate(self.model.messages()?)?;
        let s = &self.schedule;
        if s.max_epochs == 0 {
            return Err(Error::config("training.max_epochs must be positive"));
        }
        if !(s.learning_rate > 0.0) || !s.learning_rate.is_finite() {
            return Err(Error::config("training.learning_rate must be positive"));
        }
        let [lo, hi] = s.ebn0_range_db;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::config(format!(
                "training.ebn0_range_db must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        if s.train_ebn0_db.is_nan() || s.train_ebn0_db == f64::NEG_INFINITY {
            return Err(Error::config("training.train_ebn0_db must be a number"));
        }
        Ok(())
    }
}

/// One line of the training trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub ebn0_db: f64,
    pub cost: f64,
    pub ce: f64,
    pub power_penalty: f64,
    /// Selected MI estimate in nats, when an MI term is enabled.
    pub mi_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub seed: u64,
    pub procedure: Procedure,
    pub records: Vec<EpochRecord>,
    pub stopped_early: bool,
}

impl TrainReport {
    pub fn epochs(&self) -> usize {
        self.records.len()
    }

    pub fn ce_trace(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.ce).collect()
    }

    pub fn final_record(&self) -> Option<&EpochRecord> {
        self.records.last()
    }
}

/// Pre-drawn randomness for one objective evaluation.
#[derive(Debug, Clone)]
pub struct NoiseDraw {
    /// Standard normal noise for the `2^k × n` cross-entropy batch.
    pub ce: Array2<f64>,
    /// Standard normal noise for the `N × n` MI sample set.
    pub mi: Option<Array2<f64>>,
    /// Derangement pairing samples with foreign channel outputs (DV bound).
    pub shuffle: Option<Vec<usize>>,
}

impl NoiseDraw {
    fn draw(
        messages: usize,
        n: usize,
        weights: &LossWeights,
        ce_rng: &mut StreamRng,
        mi_rng: &mut StreamRng,
        shuffle_rng: &mut StreamRng,
    ) -> Self {
        let ce = standard_normal(messages, n, ce_rng);
        let estimator = weights.mi_estimator();
        let mi = estimator.map(|_| standard_normal(weights.mi_samples, n, mi_rng));
        let shuffle = match estimator {
            Some(MiEstimator::DvBound) => Some(random_derangement(weights.mi_samples, shuffle_rng)),
            _ => None,
        };
        Self { ce, mi, shuffle }
    }
}

/// Cost, its parts, and the gradient with respect to every parameter.
#[derive(Debug, Clone)]
pub struct ObjectiveValue {
    pub cost: f64,
    pub terms: CostTerms,
    pub ce: f64,
    pub power_penalty: f64,
    pub mi_estimate: Option<f64>,
    pub gradients: ModelGradients,
}

/// Evaluates the composite cost on the full message batch with frozen noise.
pub fn objective(
    model: &Autoencoder,
    weights: &LossWeights,
    sigma2: f64,
    draw: &NoiseDraw,
) -> Result<ObjectiveValue> {
    let coeffs = weights.coefficients();
    let messages = model.encoder.messages();
    let n = model.encoder.codeword_len();
    let labels = all_messages(messages);
    let (codebook, enc_cache) = model.encoder.forward(&labels)?;
    let mut grad_z = Array2::<f64>::zeros(codebook.dim());
    let mut terms = CostTerms::default();

    // cross-entropy on the full batch
    let y = add_scaled_noise(&codebook, &draw.ce, sigma2);
    let dec_cache = model.decoder.stack.forward(&y)?;
    let (ce, mut grad_p) = cross_entropy_grad(dec_cache.output(), &labels)?;
    grad_p *= coeffs.cross_entropy;
    let (dec_grads, grad_y) = model.decoder.stack.backward(&dec_cache, &grad_p)?;
    grad_z += &grad_y;
    terms.cross_entropy = Some(ce);

    // mutual information over N cycled samples
    let mut mi_estimate = None;
    if let Some(estimator) = weights.mi_estimator() {
        let noise = draw
            .mi
            .as_ref()
            .ok_or_else(|| Error::config("MI term enabled but no MI noise drawn"))?;
        let samples = noise.nrows();
        let source: Vec<usize> = (0..samples).map(|i| i % messages).collect();
        let z = codebook.select(ndarray::Axis(0), &source);
        let y = add_scaled_noise(&z, noise, sigma2);
        match estimator {
            MiEstimator::Wlln => {
                let g = mi_wlln_grad(&codebook, &z, &y, sigma2)?;
                let c = coeffs.mi_wlln;
                grad_z.scaled_add(c, &g.codebook);
                for (i, &m) in source.iter().enumerate() {
                    for d in 0..n {
                        grad_z[[m, d]] += c * (g.z[[i, d]] + g.y[[i, d]]);
                    }
                }
                terms.mi_wlln = Some(g.value);
                mi_estimate = Some(g.value);
            }
            MiEstimator::DvBound => {
                let perm = draw
                    .shuffle
                    .as_ref()
                    .ok_or_else(|| Error::config("DV bound enabled but no shuffle drawn"))?;
                if perm.len() != samples {
                    return Err(Error::config("shuffle length does not match MI samples"));
                }
                let y_shuffled = y.select(ndarray::Axis(0), perm);
                let g = dv_bound_grad(&z, &y, &y_shuffled)?;
                let c = coeffs.dv_bound;
                for (i, &m) in source.iter().enumerate() {
                    let foreign = source[perm[i]];
                    for d in 0..n {
                        grad_z[[m, d]] += c * (g.z[[i, d]] + g.y[[i, d]]);
                        grad_z[[foreign, d]] += c * g.y_shuffled[[i, d]];
                    }
                }
                terms.dv_bound = Some(g.value);
                mi_estimate = Some(g.value);
            }
        }
    }

    match weights.distance_term() {
        Some(losses::DistanceTerm::UnionBound) => {
            let (v, g) = union_bound_loss_grad(&codebook, sigma2)?;
            grad_z.scaled_add(coeffs.union_bound, &g);
            terms.union_bound = Some(v);
        }
        Some(losses::DistanceTerm::PairwiseDistance) => {
            let (v, g) = pairwise_distance_sum_grad(&codebook);
            grad_z.scaled_add(coeffs.pairwise_distance, &g);
            terms.pairwise_distance = Some(v);
        }
        None => {}
    }

    let (power_penalty, g) = power_penalty_grad(&codebook, n);
    if weights.power_penalty.enabled {
        grad_z.scaled_add(coeffs.power_penalty, &g);
    }
    terms.power_penalty = Some(power_penalty);

    let cost = composite_cost(&terms, weights)?;
    let enc_grads = model.encoder.backward(&enc_cache, &grad_z)?;
    Ok(ObjectiveValue {
        cost,
        terms,
        ce,
        power_penalty,
        mi_estimate,
        gradients: ModelGradients {
            encoder: enc_grads,
            decoder: dec_grads,
        },
    })
}

/// Where each epoch's noise level comes from.
#[derive(Debug, Clone, Copy)]
enum NoiseSchedule {
    Fixed { ebn0_db: f64, sigma2: f64 },
    Uniform { lo: f64, hi: f64, rate: f64 },
}

struct Run {
    model: Autoencoder,
    adam: AdamState,
    weights: LossWeights,
    ce_rng: StreamRng,
    mi_rng: StreamRng,
    shuffle_rng: StreamRng,
    snr_rng: StreamRng,
}

impl Run {
    fn new(config: &TrainConfig, model_config: &ModelConfig, weights: LossWeights) -> Result<Self> {
        let mut init = stream(config.seed, Stream::WeightInit);
        let model = Autoencoder::new(model_config, &mut init)?;
        let adam = AdamState::new(
            model.param_count(),
            AdamConfig {
                learning_rate: config.schedule.learning_rate,
                ..AdamConfig::default()
            },
        );
        Ok(Self {
            model,
            adam,
            weights,
            ce_rng: stream(config.seed, Stream::CrossEntropyNoise),
            mi_rng: stream(config.seed, Stream::MiNoise),
            shuffle_rng: stream(config.seed, Stream::Shuffle),
            snr_rng: stream(config.seed, Stream::SnrDraw),
        })
    }

    fn step(&mut self, epoch: usize, noise: NoiseSchedule) -> Result<EpochRecord> {
        let (ebn0_db, sigma2) = match noise {
            NoiseSchedule::Fixed { ebn0_db, sigma2 } => (ebn0_db, sigma2),
            NoiseSchedule::Uniform { lo, hi, rate } => {
                let e = self.snr_rng.random_range(lo..hi);
                (e, ebn0_to_sigma2(e, rate)?)
            }
        };
        let draw = NoiseDraw::draw(
            self.model.encoder.messages(),
            self.model.encoder.codeword_len(),
            &self.weights,
            &mut self.ce_rng,
            &mut self.mi_rng,
            &mut self.shuffle_rng,
        );
        let value = objective(&self.model, &self.weights, sigma2, &draw)?;
        if !value.cost.is_finite() {
            return Err(Error::Divergence {
                epoch,
                detail: format!("cost is {}", value.cost),
            });
        }
        let grads = value.gradients.flatten();
        self.adam
            .step(self.model.params_mut(), &grads)
            .map_err(|e| match e {
                Error::Divergence { detail, .. } => Error::Divergence { epoch, detail },
                other => other,
            })?;
        Ok(EpochRecord {
            epoch,
            ebn0_db,
            cost: value.cost,
            ce: value.ce,
            power_penalty: value.power_penalty,
            mi_estimate: value.mi_estimate,
        })
    }
}

fn run_training(
    config: &TrainConfig,
    procedure: Procedure,
    model_config: ModelConfig,
    weights: LossWeights,
    noise: NoiseSchedule,
) -> Result<(Autoencoder, TrainReport)> {
    let mut run = Run::new(config, &model_config, weights)?;
    let mut records = Vec::with_capacity(config.schedule.max_epochs);
    let mut ce_trace = Vec::with_capacity(config.schedule.max_epochs);
    let mut stopped_early = false;
    for epoch in 1..=config.schedule.max_epochs {
        let record = run.step(epoch, noise)?;
        ce_trace.push(record.ce);
        records.push(record);
        if config.schedule.early_stop.plateaued(&ce_trace) {
            stopped_early = true;
            break;
        }
    }
    Ok((
        run.model,
        TrainReport {
            seed: config.seed,
            procedure,
            records,
            stopped_early,
        },
    ))
}

fn fixed_noise(config: &TrainConfig) -> Result<NoiseSchedule> {
    let ebn0_db = config.schedule.train_ebn0_db;
    let sigma2 = if ebn0_db == f64::INFINITY {
        0.0
    } else {
        ebn0_to_sigma2(ebn0_db, config.model.rate)?
    };
    Ok(NoiseSchedule::Fixed { ebn0_db, sigma2 })
}

/// Cross-entropy-only training at the fixed Eb/N0 (`+inf` means noiseless).
pub fn train_ce_baseline(config: &TrainConfig) -> Result<(Autoencoder, TrainReport)> {
    config.validate()?;
    run_training(
        config,
        Procedure::CeBaseline,
        config.model.clone(),
        LossWeights::ce_only(),
        fixed_noise(config)?,
    )
}

/// Composite-loss training at the fixed Eb/N0 with `config.losses`.
pub fn train_composite(config: &TrainConfig) -> Result<(Autoencoder, TrainReport)> {
    config.validate()?;
    if config.losses.power_penalty.enabled && config.model.power_mode == PowerMode::BatchNormalize {
        return Err(Error::config(
            "losses.power_penalty requires model.power_mode = \"penalty_only\"",
        ));
    }
    let noise = fixed_noise(config)?;
    if let NoiseSchedule::Fixed { sigma2, .. } = noise {
        let needs_noise = config.losses.mi_wlln.enabled || config.losses.union_bound.enabled;
        if needs_noise && !(sigma2 > 0.0) {
            return Err(Error::config(
                "MI and union-bound terms need a finite training Eb/N0",
            ));
        }
    }
    run_training(
        config,
        Procedure::Composite,
        config.model.clone(),
        config.losses.clone(),
        noise,
    )
}

/// Cross-entropy training of the twin encoder at the fixed Eb/N0.
pub fn train_twins(config: &TrainConfig) -> Result<(Autoencoder, TrainReport)> {
    config.validate()?;
    let mut model = config.model.clone();
    model.architecture = Architecture::Twin;
    model.validate()?;
    run_training(
        config,
        Procedure::Twins,
        model,
        LossWeights::ce_only(),
        fixed_noise(config)?,
    )
}

/// Cross-entropy training with a fresh uniform Eb/N0 draw every epoch.
pub fn train_randomized(config: &TrainConfig) -> Result<(Autoencoder, TrainReport)> {
    config.validate()?;
    let [lo, hi] = config.schedule.ebn0_range_db;
    run_training(
        config,
        Procedure::Randomized,
        config.model.clone(),
        LossWeights::ce_only(),
        NoiseSchedule::Uniform {
            lo,
            hi,
            rate: config.model.rate,
        },
    )
}

/// Runs the procedure named in `config.schedule.procedure`.
pub fn train(config: &TrainConfig) -> Result<(Autoencoder, TrainReport)> {
    match config.schedule.procedure {
        Procedure::CeBaseline => train_ce_baseline(config),
        Procedure::Composite => train_composite(config),
        Procedure::Twins => train_twins(config),
        Procedure::Randomized => train_randomized(config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::TermWeight;

    fn quick(k: usize, seed: u64, epochs: usize) -> TrainConfig {
        let mut c = TrainConfig::new(k, seed);
        c.schedule.max_epochs = epochs;
        c.schedule.early_stop = EarlyStop::disabled();
        c
    }

    #[test]
    fn plateau_rule() {
        let rule = EarlyStop {
            enabled: true,
            window: 2,
            tolerance: 1e-3,
        };
        assert!(!rule.plateaued(&[3.0, 3.0, 3.0]));
        assert!(rule.plateaued(&[1.0, 1.0, 1.0, 1.0]));
        assert!(!rule.plateaued(&[2.0, 2.0, 1.0, 1.0]));
        assert!(!EarlyStop::disabled().plateaued(&[1.0; 1000]));
    }

    #[test]
    fn ce_baseline_improves() {
        let cfg = quick(4, 1, 2000);
        let (_, report) = train_ce_baseline(&cfg).unwrap();
        let first = report.records[0].ce;
        let last = report.final_record().unwrap().ce;
        assert!(last < first, "{first} → {last}");
        assert_eq!(report.epochs(), 2000);
    }

    #[test]
    fn noiseless_ce_baseline_converges() {
        let mut cfg = quick(4, 2, 3000);
        cfg.schedule.train_ebn0_db = f64::INFINITY;
        let (model, report) = train_ce_baseline(&cfg).unwrap();
        assert!(report.final_record().unwrap().ce < 1e-2);
        let codebook = model.export_codebook().unwrap();
        let probs = model.decoder.decode(codebook.rows()).unwrap();
        assert_eq!(crate::models::classify(&probs), all_messages(16));
    }

    #[test]
    fn same_seed_same_trace() {
        let cfg = quick(3, 5, 200);
        let a = train_ce_baseline(&cfg).unwrap();
        let b = train_ce_baseline(&cfg).unwrap();
        assert_eq!(a.1, b.1);
        assert_eq!(a.0, b.0);
    }

    #[test]
    fn composite_rejects_penalty_with_batch_norm() {
        let mut cfg = quick(4, 1, 10);
        cfg.losses.power_penalty = TermWeight::on(1.0);
        assert!(matches!(train_composite(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn composite_without_extra_terms_equals_baseline() {
        let cfg = quick(4, 9, 300);
        let base = train_ce_baseline(&cfg).unwrap();
        let comp = train_composite(&cfg).unwrap();
        assert_eq!(base.0, comp.0);
        assert_eq!(base.1.records, comp.1.records);
    }

    #[test]
    fn zero_mi_factor_matches_penalty_only_run() {
        let mut with_mi = quick(4, 4, 200);
        with_mi.model.power_mode = PowerMode::PenaltyOnly;
        with_mi.losses.power_penalty = TermWeight::on(1.0);
        let without = with_mi.clone();
        with_mi.losses.mi_wlln = TermWeight::on(1.0);
        with_mi.losses.mi_factor = 0.0;
        with_mi.losses.mi_samples = 160;

        let (ma, ra) = train_composite(&with_mi).unwrap();
        let (mb, rb) = train_composite(&without).unwrap();
        assert_eq!(ma, mb);
        for (a, b) in ra.records.iter().zip(&rb.records) {
            assert_eq!((a.cost, a.ce, a.power_penalty), (b.cost, b.ce, b.power_penalty));
            assert!(a.mi_estimate.is_some());
            assert!(b.mi_estimate.is_none());
        }
    }

    #[test]
    fn twins_branches_receive_gradient() {
        let mut cfg = quick(4, 3, 1);
        cfg.model.architecture = Architecture::Twin;
        let mut init = stream(cfg.seed, Stream::WeightInit);
        let model = Autoencoder::new(&cfg.model, &mut init).unwrap();
        let mut r = stream(cfg.seed, Stream::CrossEntropyNoise);
        let draw = NoiseDraw {
            ce: standard_normal(16, 8, &mut r),
            mi: None,
            shuffle: None,
        };
        let v = objective(&model, &LossWeights::ce_only(), 0.3, &draw).unwrap();
        assert_eq!(v.gradients.encoder.len(), 2);
        for g in &v.gradients.encoder {
            let norm: f64 = g.iter().map(|x| x * x).sum();
            assert!(norm > 0.0);
        }
    }

    #[test]
    fn twins_training_improves_and_is_deterministic() {
        let cfg = quick(4, 8, 1500);
        let (m1, r1) = train_twins(&cfg).unwrap();
        let (m2, r2) = train_twins(&cfg).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(m1, m2);
        assert!(matches!(m1.encoder, crate::models::Encoder::Twin(_)));
        assert!(r1.final_record().unwrap().ce < r1.records[0].ce);
    }

    #[test]
    fn randomized_snr_draws_are_uniform_and_reproducible() {
        let mut cfg = quick(2, 6, 10_000);
        cfg.model.rate = 0.5;
        let (_, a) = train_randomized(&cfg).unwrap();
        let draws: Vec<f64> = a.records.iter().map(|r| r.ebn0_db).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((mean - 6.0).abs() < 0.2, "{mean}");
        assert!(draws.iter().all(|&e| (0.0..12.0).contains(&e)));
        let (_, b) = train_randomized(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn early_stop_triggers_on_flat_trace() {
        let mut cfg = quick(2, 1, 5000);
        cfg.schedule.train_ebn0_db = f64::INFINITY;
        cfg.schedule.early_stop = EarlyStop {
            enabled: true,
            window: 100,
            tolerance: 1e-3,
        };
        let (_, report) = train_ce_baseline(&cfg).unwrap();
        assert!(report.stopped_early);
        assert!(report.epochs() < 5000);
        assert_eq!(report.epochs() % 100, 0);
    }

    #[test]
    fn invalid_range_rejected() {
        let mut cfg = quick(4, 1, 10);
        cfg.schedule.ebn0_range_db = [5.0, 5.0];
        assert!(train_randomized(&cfg).is_err());
    }
}
