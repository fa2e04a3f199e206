//! Training procedures driven through the public API.

use aecode::channel::{ebn0_to_sigma2, standard_normal};
use aecode::losses::{pairwise_distance_sum, random_derangement, LossWeights, TermWeight};
use aecode::models::{Autoencoder, ModelConfig, PowerMode};
use aecode::training::{objective, train, NoiseDraw, Procedure, TrainConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spot_check(weights: LossWeights, power: PowerMode, seed: u64) {
    let mut config = ModelConfig::new(4);
    config.power_mode = power;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = Autoencoder::new(&config, &mut rng).unwrap();
    let draw = NoiseDraw {
        ce: standard_normal(16, 8, &mut rng),
        mi: weights
            .mi_estimator()
            .map(|_| standard_normal(weights.mi_samples, 8, &mut rng)),
        shuffle: weights
            .dv_bound
            .enabled
            .then(|| random_derangement(weights.mi_samples, &mut rng)),
    };
    let sigma2 = ebn0_to_sigma2(3.0, 0.5).unwrap();
    let analytic = objective(&model, &weights, sigma2, &draw)
        .unwrap()
        .gradients
        .flatten();
    let cost = |m: &Autoencoder| objective(m, &weights, sigma2, &draw).unwrap().cost;
    let h = 1e-5;
    for i in (0..analytic.len()).step_by(7) {
        let mut plus = model.clone();
        *plus.params_mut()[i] += h;
        let mut minus = model.clone();
        *minus.params_mut()[i] -= h;
        let fd = (cost(&plus) - cost(&minus)) / (2.0 * h);
        let scale = analytic[i].abs().max(fd.abs());
        if scale < 1e-7 {
            continue;
        }
        assert!(
            (analytic[i] - fd).abs() / scale < 1e-3,
            "param {i}: analytic {} vs fd {fd}",
            analytic[i]
        );
    }
}

#[test]
fn composite_gradient_with_penalty_terms() {
    let mut w = LossWeights::ce_only();
    w.mi_wlln = TermWeight::on(1.0);
    w.union_bound = TermWeight::on(1.0);
    w.power_penalty = TermWeight::on(1.0);
    w.mi_samples = 160;
    spot_check(w, PowerMode::PenaltyOnly, 3);
}

#[test]
fn composite_gradient_with_dv_and_distance() {
    let mut w = LossWeights::ce_only();
    w.dv_bound = TermWeight::on(1.0);
    w.pairwise_distance = TermWeight::on(1.0);
    w.mi_samples = 160;
    spot_check(w, PowerMode::BatchNormalize, 4);
}

fn distance_config(epochs: usize) -> TrainConfig {
    let mut c = TrainConfig::new(4, 21);
    c.schedule.procedure = Procedure::Composite;
    c.schedule.max_epochs = epochs;
    c.losses.pairwise_distance = TermWeight::on(1.0);
    c.losses.mi_wlln = TermWeight::on(1.0);
    c.losses.mi_samples = 160;
    c
}

#[test]
fn distance_and_mi_terms_spread_the_codebook() {
    let (start, _) = train(&distance_config(1)).unwrap();
    let (end, report) = train(&distance_config(1500)).unwrap();
    let before = pairwise_distance_sum(start.export_codebook().unwrap().rows());
    let after = pairwise_distance_sum(end.export_codebook().unwrap().rows());
    assert!(after > before, "{before} -> {after}");
    assert!(report.records.iter().all(|r| r.mi_estimate.is_some()));
}

#[test]
fn penalty_settles_near_power_constraint() {
    let mut c = TrainConfig::new(4, 5);
    c.model.power_mode = PowerMode::PenaltyOnly;
    c.schedule.procedure = Procedure::Composite;
    c.schedule.train_ebn0_db = 5.0;
    c.schedule.max_epochs = 10_000;
    c.losses.union_bound = TermWeight::on(1.0);
    c.losses.mi_wlln = TermWeight::on(1.0);
    c.losses.power_penalty = TermWeight::on(10.0);
    c.losses.mi_samples = 160;
    let (model, report) = train(&c).unwrap();
    let penalty: Vec<f64> = report.records.iter().map(|r| r.power_penalty).collect();
    let tenth = penalty.len() / 10;
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let head = mean(&penalty[..tenth]);
    let tail = mean(&penalty[penalty.len() - tenth..]);
    assert!(tail <= head, "{head} -> {tail}");
    assert!(tail < 0.05, "{tail}");
    let energy = model.export_codebook().unwrap().mean_energy();
    assert!((energy - 8.0).abs() < 0.1, "{energy}");
}

#[test]
fn every_procedure_is_reproducible() {
    for procedure in [
        Procedure::CeBaseline,
        Procedure::Composite,
        Procedure::Twins,
        Procedure::Randomized,
    ] {
        let mut c = TrainConfig::new(3, 9);
        c.schedule.procedure = procedure;
        c.schedule.max_epochs = 50;
        let (a, ra) = train(&c).unwrap();
        let (b, rb) = train(&c).unwrap();
        assert_eq!(ra, rb, "{procedure:?}");
        assert_eq!(a.params(), b.params(), "{procedure:?}");
    }
}
