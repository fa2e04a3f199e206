//! Encoder and decoder assemblies.
//!
//! The encoder maps a one-hot message (width `2^k`) through a ReLU hidden
//! layer and a linear output layer to `n` real symbols. The twin encoder runs
//! two parameter-disjoint encoders of output width `n/2` side by side and
//! concatenates their outputs. The decoder maps `n` received symbols through a
//! ReLU hidden layer to a softmax over the `2^k` messages.
//!
//! Under [`PowerMode::BatchNormalize`] the encoded batch is scaled so its mean
//! squared row norm equals `n`. Exporting a codebook always encodes all `2^k`
//! messages in one batch, so training and inference see the same scaling.

use ndarray::{Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{normalize_power, normalize_power_backward, Normalized};
use crate::message::{all_messages, message_count, one_hot};
use crate::nn::{Activation, ForwardCache, LayerStack, StackGradients};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMode {
    BatchNormalize,
    PenaltyOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    Single,
    Twin,
}

/// Shape of an autoencoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub k: usize,
    #[serde(default = "default_rate")]
    pub rate: f64,
    #[serde(default = "default_architecture")]
    pub architecture: Architecture,
    /// Encoder hidden width (per branch for the twin). Defaults to `2^k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoder_hidden: Option<usize>,
    /// Decoder hidden width. Defaults to `2^k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoder_hidden: Option<usize>,
    /// Adds a linear hidden→hidden layer after the ReLU layer in both stacks.
    #[serde(default)]
    pub extra_linear: bool,
    #[serde(default = "default_power_mode")]
    pub power_mode: PowerMode,
}

fn default_rate() -> f64 {
    0.5
}

fn default_architecture() -> Architecture {
    Architecture::Single
}

fn default_power_mode() -> PowerMode {
    PowerMode::BatchNormalize
}

impl ModelConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            rate: default_rate(),
            architecture: default_architecture(),
            encoder_hidden: None,
            decoder_hidden: None,
            extra_linear: false,
            power_mode: default_power_mode(),
        }
    }

    pub fn messages(&self) -> Result<usize> {
        message_count(self.k)
    }

    /// Codeword length `n = k / r`, which must be an integer.
    pub fn n(&self) -> Result<usize> {
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(Error::config(format!(
                "model.rate must be in (0, 1], got {}",
                self.rate
            )));
        }
        let n = self.k as f64 / self.rate;
        let rounded = n.round();
        if (n - rounded).abs() > 1e-9 || rounded < 1.0 {
            return Err(Error::config(format!(
                "model.k / model.rate must be an integer, got {n}"
            )));
        }
        Ok(rounded as usize)
    }

    pub fn encoder_hidden(&self) -> Result<usize> {
        Ok(self.encoder_hidden.unwrap_or(self.messages()?))
    }

    pub fn decoder_hidden(&self) -> Result<usize> {
        Ok(self.decoder_hidden.unwrap_or(self.messages()?))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n()?;
        if self.encoder_hidden == Some(0) || self.decoder_hidden == Some(0) {
            return Err(Error::config("hidden widths must be positive"));
        }
        if self.architecture == Architecture::Twin && n % 2 != 0 {
            return Err(Error::config(format!(
                "twin encoder needs an even codeword length, got n = {n}"
            )));
        }
        Ok(())
    }
}

fn encoder_stack<R: Rng + ?Sized>(
    inputs: usize,
    hidden: usize,
    outputs: usize,
    extra_linear: bool,
    rng: &mut R,
) -> Result<LayerStack> {
    if extra_linear {
        LayerStack::glorot(
            &[inputs, hidden, hidden, outputs],
            &[Activation::Relu, Activation::Linear, Activation::Linear],
            rng,
        )
    } else {
        LayerStack::glorot(
            &[inputs, hidden, outputs],
            &[Activation::Relu, Activation::Linear],
            rng,
        )
    }
}

/// Single encoder `one-hot(2^k) → ReLU hidden → linear n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderModel {
    pub stack: LayerStack,
    pub power_mode: PowerMode,
}

/// Two parameter-disjoint encoders whose outputs are concatenated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwinEncoderModel {
    pub first: LayerStack,
    pub second: LayerStack,
    pub power_mode: PowerMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoder {
    Single(EncoderModel),
    Twin(TwinEncoderModel),
}

/// Intermediates of one encoder forward pass.
#[derive(Debug, Clone)]
pub struct EncodeCache {
    branches: Vec<ForwardCache>,
    raw: Array2<f64>,
    norm: Option<Normalized>,
}

impl EncoderModel {
    pub fn new<R: Rng + ?Sized>(config: &ModelConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            stack: encoder_stack(
                config.messages()?,
                config.encoder_hidden()?,
                config.n()?,
                config.extra_linear,
                rng,
            )?,
            power_mode: config.power_mode,
        })
    }

    pub fn encode(&self, messages: &[usize]) -> Result<Array2<f64>> {
        let x = one_hot(messages, self.stack.input_width())?;
        apply_power(self.stack.predict(&x)?, self.power_mode)
    }
}

impl TwinEncoderModel {
    pub fn new<R: Rng + ?Sized>(config: &ModelConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let half = config.n()? / 2;
        let messages = config.messages()?;
        let hidden = config.encoder_hidden()?;
        let first = encoder_stack(messages, hidden, half, config.extra_linear, rng)?;
        let second = encoder_stack(messages, hidden, half, config.extra_linear, rng)?;
        Ok(Self {
            first,
            second,
            power_mode: config.power_mode,
        })
    }

    pub fn twin_encode(&self, messages: &[usize]) -> Result<Array2<f64>> {
        let x = one_hot(messages, self.first.input_width())?;
        let a = self.first.predict(&x)?;
        let b = self.second.predict(&x)?;
        apply_power(concat(&a, &b), self.power_mode)
    }
}

fn concat(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    ndarray::concatenate(Axis(1), &[a.view(), b.view()]).expect("branch rows agree")
}

fn apply_power(raw: Array2<f64>, mode: PowerMode) -> Result<Array2<f64>> {
    match mode {
        PowerMode::BatchNormalize => Ok(normalize_power(&raw)?.output),
        PowerMode::PenaltyOnly => Ok(raw),
    }
}

impl Encoder {
    pub fn new<R: Rng + ?Sized>(config: &ModelConfig, rng: &mut R) -> Result<Self> {
        Ok(match config.architecture {
            Architecture::Single => Encoder::Single(EncoderModel::new(config, rng)?),
            Architecture::Twin => Encoder::Twin(TwinEncoderModel::new(config, rng)?),
        })
    }

    pub fn power_mode(&self) -> PowerMode {
        match self {
            Encoder::Single(e) => e.power_mode,
            Encoder::Twin(t) => t.power_mode,
        }
    }

    pub fn messages(&self) -> usize {
        self.stacks()[0].input_width()
    }

    pub fn codeword_len(&self) -> usize {
        self.stacks().iter().map(|s| s.output_width()).sum()
    }

    pub fn stacks(&self) -> Vec<&LayerStack> {
        match self {
            Encoder::Single(e) => vec![&e.stack],
            Encoder::Twin(t) => vec![&t.first, &t.second],
        }
    }

    fn stacks_mut(&mut self) -> Vec<&mut LayerStack> {
        match self {
            Encoder::Single(e) => vec![&mut e.stack],
            Encoder::Twin(t) => vec![&mut t.first, &mut t.second],
        }
    }

    pub fn param_count(&self) -> usize {
        self.stacks().iter().map(|s| s.param_count()).sum()
    }

    pub fn encode(&self, messages: &[usize]) -> Result<Array2<f64>> {
        match self {
            Encoder::Single(e) => e.encode(messages),
            Encoder::Twin(t) => t.twin_encode(messages),
        }
    }

    pub fn forward(&self, messages: &[usize]) -> Result<(Array2<f64>, EncodeCache)> {
        let x = one_hot(messages, self.messages())?;
        let branches = self
            .stacks()
            .iter()
            .map(|s| s.forward(&x))
            .collect::<Result<Vec<_>>>()?;
        let raw = match branches.as_slice() {
            [one] => one.output().clone(),
            [a, b] => concat(a.output(), b.output()),
            _ => unreachable!("one or two branches"),
        };
        let (out, norm) = match self.power_mode() {
            PowerMode::BatchNormalize => {
                let norm = normalize_power(&raw)?;
                (norm.output.clone(), Some(norm))
            }
            PowerMode::PenaltyOnly => (raw.clone(), None),
        };
        Ok((
            out,
            EncodeCache {
                branches,
                raw,
                norm,
            },
        ))
    }

    /// Per-branch gradients given `∂L/∂codewords`.
    pub fn backward(&self, cache: &EncodeCache, grad: &Array2<f64>) -> Result<Vec<StackGradients>> {
        let raw_grad = match &cache.norm {
            Some(norm) => normalize_power_backward(&cache.raw, norm, grad),
            None => grad.clone(),
        };
        let stacks = self.stacks();
        if stacks.len() != cache.branches.len() {
            return Err(Error::config("encoder cache does not match encoder"));
        }
        let mut offset = 0;
        let mut out = Vec::with_capacity(stacks.len());
        for (stack, branch) in stacks.iter().zip(&cache.branches) {
            let width = stack.output_width();
            let slice = raw_grad
                .slice(ndarray::s![.., offset..offset + width])
                .to_owned();
            offset += width;
            out.push(stack.backward(branch, &slice)?.0);
        }
        Ok(out)
    }
}

/// Decoder `n → ReLU hidden → softmax 2^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderModel {
    pub stack: LayerStack,
}

impl DecoderModel {
    pub fn new<R: Rng + ?Sized>(config: &ModelConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let n = config.n()?;
        let hidden = config.decoder_hidden()?;
        let messages = config.messages()?;
        let stack = if config.extra_linear {
            LayerStack::glorot(
                &[n, hidden, hidden, messages],
                &[Activation::Relu, Activation::Linear, Activation::Softmax],
                rng,
            )?
        } else {
            LayerStack::glorot(
                &[n, hidden, messages],
                &[Activation::Relu, Activation::Softmax],
                rng,
            )?
        };
        Ok(Self { stack })
    }

    pub fn decode(&self, y: &Array2<f64>) -> Result<Array2<f64>> {
        self.stack.predict(y)
    }
}

/// Row-wise argmax with ties resolved to the lowest index.
pub fn classify(probs: &Array2<f64>) -> Vec<usize> {
    probs
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (j, &p) in row.iter().enumerate().skip(1) {
                if p > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// The `2^k × n` matrix of transmitted codewords, row `m` for message `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    k: usize,
    rows: Array2<f64>,
}

impl Codebook {
    /// `k = 0` (a single codeword) is allowed here, unlike for models.
    pub fn new(k: usize, rows: Array2<f64>) -> Result<Self> {
        if k > 20 {
            return Err(Error::config(format!("k must be at most 20, got {k}")));
        }
        let count = 1usize << k;
        if rows.nrows() != count {
            return Err(Error::config(format!(
                "codebook for k = {k} needs {count} rows, got {}",
                rows.nrows()
            )));
        }
        if rows.ncols() == 0 {
            return Err(Error::config("codebook rows must be non-empty"));
        }
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("codebook contains non-finite entries"));
        }
        Ok(Self { k, rows })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.rows.ncols()
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n() as f64
    }

    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }

    pub fn mean_energy(&self) -> f64 {
        crate::losses::mean_energy(&self.rows)
    }
}

/// Encodes every message in one batch.
pub fn export_codebook(encoder: &Encoder) -> Result<Codebook> {
    let messages = encoder.messages();
    let k = messages.trailing_zeros() as usize;
    let rows = encoder.encode(&all_messages(messages))?;
    Codebook::new(k, rows)
}

/// A complete encoder/decoder pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Autoencoder {
    pub config: ModelConfig,
    pub encoder: Encoder,
    pub decoder: DecoderModel,
}

/// Gradients for every parameter of an [`Autoencoder`].
#[derive(Debug, Clone)]
pub struct ModelGradients {
    pub encoder: Vec<StackGradients>,
    pub decoder: StackGradients,
}

impl ModelGradients {
    /// Flattened in the order of [`Autoencoder::params_mut`].
    pub fn flatten(&self) -> Vec<f64> {
        self.encoder
            .iter()
            .flat_map(|g| g.iter().copied())
            .chain(self.decoder.iter().copied())
            .collect()
    }

    pub fn zeros_like(model: &Autoencoder) -> Self {
        Self {
            encoder: model
                .encoder
                .stacks()
                .iter()
                .map(|s| StackGradients::zeros_like(s))
                .collect(),
            decoder: StackGradients::zeros_like(&model.decoder.stack),
        }
    }
}

impl Autoencoder {
    pub fn new<R: Rng + ?Sized>(config: &ModelConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let encoder = Encoder::new(config, rng)?;
        let decoder = DecoderModel::new(config, rng)?;
        Ok(Self {
            config: config.clone(),
            encoder,
            decoder,
        })
    }

    pub fn param_count(&self) -> usize {
        self.encoder.param_count() + self.decoder.stack.param_count()
    }

    /// All parameters: encoder branches in order, then the decoder.
    pub fn params_mut(&mut self) -> Vec<&mut f64> {
        let mut out: Vec<&mut f64> = Vec::with_capacity(self.param_count());
        for stack in self.encoder.stacks_mut() {
            out.extend(stack.params_mut());
        }
        out.extend(self.decoder.stack.params_mut());
        out
    }

    pub fn params(&self) -> Vec<f64> {
        self.encoder
            .stacks()
            .iter()
            .flat_map(|s| s.params().copied().collect::<Vec<_>>())
            .chain(self.decoder.stack.params().copied())
            .collect()
    }

    pub fn export_codebook(&self) -> Result<Codebook> {
        export_codebook(&self.encoder)
    }
}
