//! Minimal dense-network engine.
//!
//! A [`LayerStack`] is a sequence of [`DenseLayer`]s applied to row-major
//! batches (`B × fan_in`). [`LayerStack::forward`] returns a [`ForwardCache`]
//! holding every intermediate activation, which [`LayerStack::backward`] turns
//! into exact parameter and input gradients. [`AdamState`] applies
//! bias-corrected Adam updates to the flattened parameter vector.
//!
//! Parameters are flattened layer by layer, weights (row-major,
//! `fan_out × fan_in`) first and bias second. [`StackGradients::flatten`]
//! follows the same order.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Linear,
    /// Row-wise softmax. Only valid as the last layer of a stack.
    Softmax,
}

/// `activation(x · Wᵀ + b)` for each input row `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    weights: Array2<f64>,
    bias: Array1<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: Array2<f64>, bias: Array1<f64>, activation: Activation) -> Result<Self> {
        if weights.nrows() != bias.len() {
            return Err(Error::config(format!(
                "bias length {} does not match fan_out {}",
                bias.len(),
                weights.nrows()
            )));
        }
        if weights.is_empty() {
            return Err(Error::config("layer dimensions must be positive"));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    /// Glorot-uniform weights, zero bias.
    pub fn glorot<R: Rng + ?Sized>(
        fan_in: usize,
        fan_out: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        if fan_in == 0 || fan_out == 0 {
            return Err(Error::config("layer dimensions must be positive"));
        }
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit)
            .map_err(|e| Error::config(format!("init range: {e}")))?;
        let weights = Array2::from_shape_simple_fn((fan_out, fan_in), || dist.sample(rng));
        Self::new(weights, Array1::zeros(fan_out), activation)
    }

    pub fn fan_in(&self) -> usize {
        self.weights.ncols()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.nrows()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn bias(&self) -> &Array1<f64> {
        &self.bias
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    fn apply(&self, input: &Array2<f64>) -> Array2<f64> {
        let mut pre = input.dot(&self.weights.t());
        pre += &self.bias;
        match self.activation {
            Activation::Linear => pre,
            Activation::Relu => pre.mapv_into(|v| v.max(0.0)),
            Activation::Softmax => {
                softmax_rows_in_place(&mut pre);
                pre
            }
        }
    }
}

/// Numerically stable row-wise softmax (max-subtracted).
pub fn softmax_rows_in_place(x: &mut Array2<f64>) {
    for mut row in x.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

/// Ordered dense layers with consistent widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DenseLayer>", into = "Vec<DenseLayer>")]
pub struct LayerStack {
    layers: Vec<DenseLayer>,
}

impl TryFrom<Vec<DenseLayer>> for LayerStack {
    type Error = Error;

    fn try_from(layers: Vec<DenseLayer>) -> Result<Self> {
        Self::new(layers)
    }
}

impl From<LayerStack> for Vec<DenseLayer> {
    fn from(stack: LayerStack) -> Self {
        stack.layers
    }
}

impl LayerStack {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::config("layer stack must contain at least one layer"));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].fan_out() != pair[1].fan_in() {
                return Err(Error::config(format!(
                    "layer {} fan_out {} does not match layer {} fan_in {}",
                    i,
                    pair[0].fan_out(),
                    i + 1,
                    pair[1].fan_in()
                )));
            }
        }
        let last = layers.len() - 1;
        if let Some(i) = layers[..last]
            .iter()
            .position(|l| l.activation == Activation::Softmax)
        {
            return Err(Error::config(format!(
                "softmax activation on layer {i} is only allowed on the final layer"
            )));
        }
        Ok(Self { layers })
    }

    /// Glorot-initialized stack with widths `widths[0] → widths[1] → …` and
    /// one activation per layer.
    pub fn glorot<R: Rng + ?Sized>(
        widths: &[usize],
        activations: &[Activation],
        rng: &mut R,
    ) -> Result<Self> {
        if widths.len() != activations.len() + 1 {
            return Err(Error::config("need exactly one activation per layer"));
        }
        let layers = widths
            .windows(2)
            .zip(activations)
            .map(|(w, &a)| DenseLayer::glorot(w[0], w[1], a, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].fan_out()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    /// Mutable view over all parameters in flattening order.
    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()))
    }

    /// Output only, without keeping intermediates.
    pub fn predict(&self, input: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_input(input)?;
        let mut x = self.layers[0].apply(input);
        for layer in &self.layers[1..] {
            x = layer.apply(&x);
        }
        Ok(x)
    }

    pub fn forward(&self, input: &Array2<f64>) -> Result<ForwardCache> {
        self.check_input(input)?;
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(input.clone());
        for layer in &self.layers {
            let next = layer.apply(activations.last().expect("non-empty"));
            activations.push(next);
        }
        Ok(ForwardCache { activations })
    }

    /// Gradients of a scalar objective given `∂objective/∂output`.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        output_gradient: &Array2<f64>,
    ) -> Result<(StackGradients, Array2<f64>)> {
        if cache.activations.len() != self.layers.len() + 1 {
            return Err(Error::config(format!(
                "cache holds {} activations, stack needs {}",
                cache.activations.len(),
                self.layers.len() + 1
            )));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            if cache.activations[i].ncols() != layer.fan_in()
                || cache.activations[i + 1].ncols() != layer.fan_out()
            {
                return Err(Error::config(format!(
                    "cache activation widths do not match layer {i}"
                )));
            }
        }
        let out = cache.output();
        if output_gradient.dim() != out.dim() {
            return Err(Error::config(format!(
                "output gradient shape {:?} does not match output shape {:?}",
                output_gradient.dim(),
                out.dim()
            )));
        }

        let mut grads = Vec::with_capacity(self.layers.len());
        let mut upstream = output_gradient.clone();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let input = &cache.activations[i];
            let output = &cache.activations[i + 1];
            let pre_grad = match layer.activation {
                Activation::Linear => upstream,
                Activation::Relu => {
                    let mut g = upstream;
                    ndarray::Zip::from(&mut g)
                        .and(output)
                        .for_each(|g, &o| {
                            if o <= 0.0 {
                                *g = 0.0;
                            }
                        });
                    g
                }
                Activation::Softmax => {
                    // J^T g for softmax: p ∘ (g − ⟨p, g⟩)
                    let mut g = upstream;
                    for (mut g_row, p_row) in g.rows_mut().into_iter().zip(output.rows()) {
                        let inner = g_row.dot(&p_row);
                        ndarray::Zip::from(&mut g_row)
                            .and(&p_row)
                            .for_each(|g, &p| *g = p * (*g - inner));
                    }
                    g
                }
            };
            let weights = pre_grad.t().dot(input);
            let bias = pre_grad.sum_axis(Axis(0));
            upstream = pre_grad.dot(&layer.weights);
            grads.push(LayerGradient { weights, bias });
        }
        grads.reverse();
        Ok((StackGradients { layers: grads }, upstream))
    }

    fn check_input(&self, input: &Array2<f64>) -> Result<()> {
        if input.nrows() == 0 {
            return Err(Error::config("input batch is empty"));
        }
        if input.ncols() != self.input_width() {
            return Err(Error::config(format!(
                "input width {} does not match stack input width {}",
                input.ncols(),
                self.input_width()
            )));
        }
        Ok(())
    }
}

/// Activations recorded by [`LayerStack::forward`]: the input followed by
/// each layer's output.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    activations: Vec<Array2<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &Array2<f64> {
        self.activations.last().expect("cache is never empty")
    }

    pub fn into_output(mut self) -> Array2<f64> {
        self.activations.pop().expect("cache is never empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackGradients {
    pub layers: Vec<LayerGradient>,
}

impl StackGradients {
    pub fn zeros_like(stack: &LayerStack) -> Self {
        Self {
            layers: stack
                .layers
                .iter()
                .map(|l| LayerGradient {
                    weights: Array2::zeros(l.weights.dim()),
                    bias: Array1::zeros(l.bias.len()),
                })
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()))
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.iter().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment accumulators for one flattened parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    config: AdamConfig,
    first: Vec<f64>,
    second: Vec<f64>,
    steps: u64,
}

impl AdamState {
    pub fn new(param_count: usize, config: AdamConfig) -> Self {
        Self {
            config,
            first: vec![0.0; param_count],
            second: vec![0.0; param_count],
            steps: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    /// One descent step. Parameters are untouched if any gradient entry is
    /// non-finite; the divergence error carries the step index.
    pub fn step<'a>(
        &mut self,
        params: impl IntoIterator<Item = &'a mut f64>,
        grads: &[f64],
    ) -> Result<()> {
        if grads.len() != self.first.len() {
            return Err(Error::config(format!(
                "gradient length {} does not match optimizer state {}",
                grads.len(),
                self.first.len()
            )));
        }
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::Divergence {
                epoch: self.steps as usize,
                detail: format!("non-finite gradient entry {i}"),
            });
        }
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        self.steps += 1;
        let t = self.steps as i32;
        let correction1 = 1.0 - beta1.powi(t);
        let correction2 = 1.0 - beta2.powi(t);

        let mut count = 0;
        for (i, p) in params.into_iter().enumerate() {
            if i >= grads.len() {
                return Err(Error::config("more parameters than gradient entries"));
            }
            let g = grads[i];
            let m = beta1 * self.first[i] + (1.0 - beta1) * g;
            let v = beta2 * self.second[i] + (1.0 - beta2) * g * g;
            self.first[i] = m;
            self.second[i] = v;
            let m_hat = m / correction1;
            let v_hat = v / correction2;
            *p -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            count += 1;
        }
        if count != grads.len() {
            return Err(Error::config("fewer parameters than gradient entries"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        Array2::from_shape_simple_fn((rows, cols), || rng.random_range(-1.0..1.0))
    }

    #[test]
    fn identity_linear_layer_is_identity() {
        let layer = DenseLayer::new(Array2::eye(3), Array1::zeros(3), Activation::Linear).unwrap();
        let stack = LayerStack::new(vec![layer]).unwrap();
        let v = array![[0.5, -2.0, 3.0]];
        assert_eq!(stack.predict(&v).unwrap(), v);
    }

    #[test]
    fn relu_zeroes_negative_inputs() {
        let layer = DenseLayer::new(Array2::eye(3), Array1::zeros(3), Activation::Relu).unwrap();
        let stack = LayerStack::new(vec![layer]).unwrap();
        let out = stack.predict(&array![[-0.5, -2.0, -3.0]]).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn forward_matches_straight_line_reimplementation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let stack = LayerStack::glorot(
            &[5, 7, 4],
            &[Activation::Relu, Activation::Softmax],
            &mut rng,
        )
        .unwrap();
        let input = random_matrix(6, 5, &mut rng);
        let out = stack.predict(&input).unwrap();

        let l0 = &stack.layers()[0];
        let l1 = &stack.layers()[1];
        for b in 0..6 {
            let mut hidden = vec![0.0; 7];
            for (o, h) in hidden.iter_mut().enumerate() {
                let mut acc = l0.bias()[o];
                for i in 0..5 {
                    acc += l0.weights()[[o, i]] * input[[b, i]];
                }
                *h = if acc > 0.0 { acc } else { 0.0 };
            }
            let mut logits = vec![0.0; 4];
            for (o, z) in logits.iter_mut().enumerate() {
                let mut acc = l1.bias()[o];
                for (i, h) in hidden.iter().enumerate() {
                    acc += l1.weights()[[o, i]] * h;
                }
                *z = acc;
            }
            let denom: f64 = logits.iter().map(|z| z.exp()).sum();
            for o in 0..4 {
                let expected = logits[o].exp() / denom;
                assert!((out[[b, o]] - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn softmax_rows_sum_to_one_even_for_large_logits() {
        let mut x = array![[1000.0, 1001.0, -5.0], [0.0, 0.0, 0.0]];
        softmax_rows_in_place(&mut x);
        for row in x.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn softmax_only_allowed_last() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = LayerStack::glorot(
            &[2, 3, 2],
            &[Activation::Softmax, Activation::Linear],
            &mut rng,
        );
        assert!(err.is_err());
    }

    #[test]
    fn mismatched_widths_rejected() {
        let a = DenseLayer::new(Array2::zeros((3, 2)), Array1::zeros(3), Activation::Relu).unwrap();
        let b = DenseLayer::new(Array2::zeros((2, 4)), Array1::zeros(2), Activation::Linear).unwrap();
        assert!(LayerStack::new(vec![a, b]).is_err());
        assert!(DenseLayer::new(Array2::zeros((3, 2)), Array1::zeros(2), Activation::Relu).is_err());
    }

    #[test]
    fn forward_rejects_wrong_input_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let stack = LayerStack::glorot(&[3, 2], &[Activation::Linear], &mut rng).unwrap();
        assert!(matches!(
            stack.forward(&Array2::zeros((2, 4))),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn backward_rejects_foreign_cache() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = LayerStack::glorot(&[3, 2], &[Activation::Linear], &mut rng).unwrap();
        let b = LayerStack::glorot(&[3, 4, 2], &[Activation::Relu, Activation::Linear], &mut rng)
            .unwrap();
        let cache = a.forward(&Array2::ones((1, 3))).unwrap();
        assert!(b.backward(&cache, &Array2::ones((1, 2))).is_err());
    }

    #[test]
    fn zero_output_gradient_gives_zero_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let stack =
            LayerStack::glorot(&[4, 6, 3], &[Activation::Relu, Activation::Linear], &mut rng)
                .unwrap();
        let cache = stack.forward(&random_matrix(5, 4, &mut rng)).unwrap();
        let (grads, input_grad) = stack.backward(&cache, &Array2::zeros((5, 3))).unwrap();
        assert!(grads.iter().all(|&g| g == 0.0));
        assert!(input_grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn single_linear_weight_gradient_is_input() {
        let layer =
            DenseLayer::new(array![[0.3, -0.7]], Array1::zeros(1), Activation::Linear).unwrap();
        let stack = LayerStack::new(vec![layer]).unwrap();
        let x = array![[2.0, -3.0]];
        let cache = stack.forward(&x).unwrap();
        let (grads, _) = stack.backward(&cache, &array![[1.0]]).unwrap();
        assert_eq!(grads.layers[0].weights, x);
        assert_eq!(grads.layers[0].bias, array![1.0]);
    }

    /// Scalar objective `Σ c ∘ output` with fixed random weights `c`.
    fn weighted_sum(stack: &LayerStack, input: &Array2<f64>, c: &Array2<f64>) -> f64 {
        (stack.predict(input).unwrap() * c).sum()
    }

    fn check_against_finite_differences(activations: &[Activation], widths: &[usize], seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut stack = LayerStack::glorot(widths, activations, &mut rng).unwrap();
        let input = random_matrix(4, widths[0], &mut rng);
        let c = random_matrix(4, *widths.last().unwrap(), &mut rng);
        let cache = stack.forward(&input).unwrap();
        let (grads, input_grad) = stack.backward(&cache, &c).unwrap();
        let analytic = grads.flatten();

        let h = 1e-5;
        let count = stack.param_count();
        for i in 0..count {
            let orig = *stack.params_mut().nth(i).unwrap();
            *stack.params_mut().nth(i).unwrap() = orig + h;
            let plus = weighted_sum(&stack, &input, &c);
            *stack.params_mut().nth(i).unwrap() = orig - h;
            let minus = weighted_sum(&stack, &input, &c);
            *stack.params_mut().nth(i).unwrap() = orig;
            let fd = (plus - minus) / (2.0 * h);
            assert_close(analytic[i], fd, &format!("param {i}"));
        }
        for idx in ndarray::indices(input.dim()) {
            let mut shifted = input.clone();
            shifted[idx] += h;
            let plus = weighted_sum(&stack, &shifted, &c);
            shifted[idx] -= 2.0 * h;
            let minus = weighted_sum(&stack, &shifted, &c);
            let fd = (plus - minus) / (2.0 * h);
            assert_close(input_grad[idx], fd, &format!("input {idx:?}"));
        }
    }

    fn assert_close(analytic: f64, fd: f64, what: &str) {
        let scale = analytic.abs().max(fd.abs());
        if scale < 1e-7 {
            assert!((analytic - fd).abs() < 1e-9, "{what}: {analytic} vs {fd}");
        } else {
            let rel = (analytic - fd).abs() / scale;
            assert!(rel < 1e-4, "{what}: {analytic} vs {fd} (rel {rel})");
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        for seed in 0..5 {
            check_against_finite_differences(
                &[Activation::Relu, Activation::Linear],
                &[6, 8, 3],
                seed,
            );
            check_against_finite_differences(
                &[Activation::Relu, Activation::Linear, Activation::Softmax],
                &[3, 5, 5, 4],
                seed + 100,
            );
        }
    }

    #[test]
    fn forward_is_bit_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let stack =
            LayerStack::glorot(&[4, 6, 3], &[Activation::Relu, Activation::Softmax], &mut rng)
                .unwrap();
        let x = random_matrix(3, 4, &mut rng);
        let a = stack.predict(&x).unwrap();
        let b = stack.predict(&x).unwrap();
        assert!(a.iter().zip(b.iter()).all(|(p, q)| p.to_bits() == q.to_bits()));
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate_against_sign() {
        let config = AdamConfig::default();
        let mut state = AdamState::new(3, config);
        let mut params = vec![1.0, -2.0, 0.5];
        let grads = [0.3, -4.0, 1e-3];
        state.step(params.iter_mut(), &grads).unwrap();
        let expected = [1.0 - 1e-3, -2.0 + 1e-3, 0.5 - 1e-3];
        for (p, e) in params.iter().zip(expected) {
            // ε perturbation: |g|/(|g|+ε) deviates from 1 by at most ε/|g| = 1e-5
            assert!((p - e).abs() < 1e-3 * 1e-4, "{p} vs {e}");
        }
        assert_eq!(state.steps(), 1);
    }

    #[test]
    fn adam_zero_gradient_keeps_params() {
        let mut state = AdamState::new(2, AdamConfig::default());
        let mut params = vec![0.25, -1.5];
        for _ in 0..10 {
            state.step(params.iter_mut(), &[0.0, 0.0]).unwrap();
        }
        assert_eq!(params, vec![0.25, -1.5]);
        assert_eq!(state.steps(), 10);
    }

    #[test]
    fn adam_minimizes_square() {
        // Reference: textbook Adam on f(x) = x² from x = 1, lr = 0.1.
        let mut x = 1.0f64;
        let (mut m, mut v) = (0.0f64, 0.0f64);
        for t in 1..=100 {
            let g = 2.0 * x;
            m = 0.9 * m + 0.1 * g;
            v = 0.999 * v + 0.001 * g * g;
            let mh = m / (1.0 - 0.9f64.powi(t));
            let vh = v / (1.0 - 0.999f64.powi(t));
            x -= 0.1 * mh / (vh.sqrt() + 1e-8);
        }
        let reference = x;
        assert!(reference.abs() < 0.1);

        let mut state = AdamState::new(
            1,
            AdamConfig {
                learning_rate: 0.1,
                ..AdamConfig::default()
            },
        );
        let mut p = vec![1.0];
        for _ in 0..100 {
            let g = [2.0 * p[0]];
            state.step(p.iter_mut(), &g).unwrap();
        }
        assert!(p[0].abs() < 1.0 && p[0].abs() < 0.1);
        assert!((p[0] - reference).abs() < 1e-12);
    }

    #[test]
    fn adam_rejects_non_finite_gradient() {
        let mut state = AdamState::new(2, AdamConfig::default());
        let mut params = vec![1.0, 1.0];
        let err = state.step(params.iter_mut(), &[0.1, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
        assert_eq!(params, vec![1.0, 1.0]);
        assert_eq!(state.steps(), 0);
    }
}
