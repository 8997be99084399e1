//! Fully-connected network: ReLU hidden layers and a 10-way output layer
//! read through per-class logistic sigmoids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::NUM_CLASSES;
use crate::scalar::{sigmoid, Scalar};

/// Output nonlinearity and the loss trained against it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Independent sigmoid per class, mean binary cross-entropy against one-hot targets.
    #[default]
    SigmoidBce,
    /// Softmax over classes with categorical cross-entropy.
    SoftmaxCe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpConfig {
    pub input_dim: usize,
    pub hidden_layers: Vec<usize>,
    pub output_dim: usize,
    pub dropout_prob: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub rng_seed: u64,
    pub loss: LossKind,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            input_dim: 800,
            hidden_layers: vec![512, 512],
            output_dim: NUM_CLASSES,
            dropout_prob: 0.0,
            learning_rate: 1e-3,
            batch_size: 32,
            epochs: 10,
            rng_seed: 1,
            loss: LossKind::SigmoidBce,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.output_dim != NUM_CLASSES {
            return Err(Error::Config(format!("output_dim must be {NUM_CLASSES}")));
        }
        if self.input_dim == 0 || self.hidden_layers.contains(&0) {
            return Err(Error::Config("layer widths must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.dropout_prob) {
            return Err(Error::Config("dropout_prob must be in [0, 1)".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        Ok(())
    }

    /// Layer widths from input to output.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden_layers.len() + 2);
        w.push(self.input_dim);
        w.extend(&self.hidden_layers);
        w.push(self.output_dim);
        w
    }
}

/// Affine layer; `weights` is row-major `outputs x inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![T::zero(); inputs * outputs],
            bias: vec![T::zero(); outputs],
        }
    }

    fn affine(&self, x: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend(
            self.weights
                .chunks_exact(self.inputs)
                .zip(&self.bias)
                .map(|(row, &b)| row.iter().zip(x).fold(b, |acc, (&w, &xi)| acc + w * xi)),
        );
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel<T> {
    pub config: MlpConfig,
    pub layers: Vec<Dense<T>>,
}

/// Whether dropout is active. Training mode draws masks from the given RNG.
pub enum Mode<'a> {
    Eval,
    Train(&'a mut ChaCha8Rng),
}

/// Per-layer activations kept for backpropagation. `activations[0]` is the
/// input, `activations[i]` the (post-dropout) output of hidden layer `i`,
/// and `logits` the pre-sigmoid output.
pub struct Trace<T> {
    pub activations: Vec<Vec<T>>,
    pub logits: Vec<T>,
    /// Inverted-dropout scale applied to surviving hidden units.
    pub keep_scale: T,
}

/// Parameter-shaped gradient buffer.
pub type Gradients<T> = Vec<Dense<T>>;

impl<T: Scalar> MlpModel<T> {
    /// Glorot-uniform weights, `U(-a, a)` with `a = sqrt(6 / (fan_in + fan_out))`,
    /// drawn in layer order from `rng_seed`; zero biases.
    pub fn init(config: MlpConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let widths = config.widths();
        let layers = widths
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let mut layer = Dense::zeros(fan_in, fan_out);
                for x in &mut layer.weights {
                    *x = T::of(rng.gen_range(-a..a));
                }
                layer
            })
            .collect();
        Ok(Self { config, layers })
    }

    /// A model with every weight and bias set to zero.
    pub fn zeros(config: MlpConfig) -> Result<Self> {
        config.validate()?;
        let layers = config.widths().windows(2).map(|w| Dense::zeros(w[0], w[1])).collect();
        Ok(Self { config, layers })
    }

    pub fn input_dim(&self) -> usize {
        self.config.input_dim
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.bias).all(|x| x.is_finite()))
    }

    pub fn zero_gradients(&self) -> Gradients<T> {
        self.layers.iter().map(|l| Dense::zeros(l.inputs, l.outputs)).collect()
    }

    pub fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    pub fn forward_trace(&self, x: &[T], mode: Mode<'_>) -> Result<Trace<T>> {
        self.check_input(x)?;
        let p = self.config.dropout_prob;
        let (mut rng, keep_scale) = match mode {
            Mode::Train(rng) if p > 0.0 => (Some(rng), T::of(1.0 / (1.0 - p))),
            _ => (None, T::one()),
        };
        let mut activations = Vec::with_capacity(self.layers.len());
        activations.push(x.to_vec());
        let (hidden, output) = self.layers.split_at(self.layers.len() - 1);
        for layer in hidden {
            let mut z = Vec::with_capacity(layer.outputs);
            layer.affine(activations.last().unwrap(), &mut z);
            for h in &mut z {
                *h = h.max(T::zero());
                if let Some(rng) = rng.as_mut() {
                    *h = if rng.gen::<f64>() < p {
                        T::zero()
                    } else {
                        *h * keep_scale
                    };
                }
            }
            activations.push(z);
        }
        let mut logits = Vec::with_capacity(NUM_CLASSES);
        output[0].affine(activations.last().unwrap(), &mut logits);
        Ok(Trace {
            activations,
            logits,
            keep_scale,
        })
    }

    /// Class scores in (0, 1): per-class sigmoids, or softmax probabilities
    /// for models trained with [`LossKind::SoftmaxCe`].
    pub fn forward(&self, x: &[T], mode: Mode<'_>) -> Result<Vec<T>> {
        let trace = self.forward_trace(x, mode)?;
        Ok(self.output_scores(&trace.logits))
    }

    pub fn output_scores(&self, logits: &[T]) -> Vec<T> {
        match self.config.loss {
            LossKind::SigmoidBce => logits.iter().map(|&z| sigmoid(z)).collect(),
            LossKind::SoftmaxCe => softmax(logits),
        }
    }

    /// Loss of one sample given its logits.
    pub fn loss(&self, logits: &[T], label: usize) -> T {
        match self.config.loss {
            LossKind::SigmoidBce => {
                let total: T = logits
                    .iter()
                    .enumerate()
                    .map(|(k, &z)| if k == label { softplus(-z) } else { softplus(z) })
                    .sum();
                total / T::of(logits.len() as f64)
            }
            LossKind::SoftmaxCe => log_sum_exp(logits) - logits[label],
        }
    }

    /// Derivative of [`Self::loss`] with respect to the logits.
    pub fn loss_gradient(&self, logits: &[T], label: usize) -> Vec<T> {
        let target = |k: usize| if k == label { T::one() } else { T::zero() };
        match self.config.loss {
            LossKind::SigmoidBce => {
                let c = T::of(logits.len() as f64);
                logits
                    .iter()
                    .enumerate()
                    .map(|(k, &z)| (sigmoid(z) - target(k)) / c)
                    .collect()
            }
            LossKind::SoftmaxCe => softmax(logits)
                .into_iter()
                .enumerate()
                .map(|(k, p)| p - target(k))
                .collect(),
        }
    }

    /// Accumulates `scale * dL/dθ` for one sample into `grads` and returns the loss.
    pub fn backward(&self, trace: &Trace<T>, label: usize, scale: T, grads: &mut Gradients<T>) -> T {
        let mut delta: Vec<T> = self
            .loss_gradient(&trace.logits, label)
            .into_iter()
            .map(|d| d * scale)
            .collect();
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let input = &trace.activations[l];
            let g = &mut grads[l];
            for (o, &d) in delta.iter().enumerate() {
                if d == T::zero() {
                    continue;
                }
                g.bias[o] += d;
                let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (gw, &a) in row.iter_mut().zip(input) {
                    *gw += d * a;
                }
            }
            if l == 0 {
                break;
            }
            // back through the previous hidden layer's ReLU and dropout
            let mut prev = vec![T::zero(); layer.inputs];
            for (o, &d) in delta.iter().enumerate() {
                if d == T::zero() {
                    continue;
                }
                let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (p, &w) in prev.iter_mut().zip(row) {
                    *p += w * d;
                }
            }
            for (p, &h) in prev.iter_mut().zip(input) {
                *p = if h > T::zero() {
                    *p * trace.keep_scale
                } else {
                    T::zero()
                };
            }
            delta = prev;
        }
        self.loss(&trace.logits, label)
    }

    /// Loss of one sample in evaluation mode.
    pub fn sample_loss(&self, x: &[T], label: usize) -> Result<T> {
        let trace = self.forward_trace(x, Mode::Eval)?;
        Ok(self.loss(&trace.logits, label))
    }

    /// Mutable views of every parameter block, weights before bias, in layer order.
    pub fn param_blocks_mut(&mut self) -> impl Iterator<Item = &mut Vec<T>> {
        self.layers.iter_mut().flat_map(|l| [&mut l.weights, &mut l.bias])
    }
}

fn softplus<T: Scalar>(z: T) -> T {
    // log(1 + e^z)
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

fn log_sum_exp<T: Scalar>(z: &[T]) -> T {
    let m = z.iter().copied().fold(T::neg_infinity(), T::max);
    m + z.iter().map(|&x| (x - m).exp()).sum::<T>().ln()
}

fn softmax<T: Scalar>(z: &[T]) -> Vec<T> {
    let m = z.iter().copied().fold(T::neg_infinity(), T::max);
    let e: Vec<T> = z.iter().map(|&x| (x - m).exp()).collect();
    let s: T = e.iter().copied().sum();
    e.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(input_dim: usize, hidden: Vec<usize>) -> MlpConfig {
        MlpConfig {
            input_dim,
            hidden_layers: hidden,
            ..Default::default()
        }
    }

    #[test]
    fn same_seed_same_parameters() {
        let a = MlpModel::<f64>::init(cfg(12, vec![8])).unwrap();
        let b = MlpModel::<f64>::init(cfg(12, vec![8])).unwrap();
        assert_eq!(a, b);
        let mut other = cfg(12, vec![8]);
        other.rng_seed = 2;
        assert_ne!(a, MlpModel::<f64>::init(other).unwrap());
        assert!(a.layers.iter().all(|l| l.bias.iter().all(|&b| b == 0.0)));
    }

    #[test]
    fn no_hidden_layers_is_linear() {
        let m = MlpModel::<f32>::init(cfg(5, vec![])).unwrap();
        assert_eq!(m.layers.len(), 1);
        assert_eq!((m.layers[0].inputs, m.layers[0].outputs), (5, 10));
    }

    #[test]
    fn parameter_count_for_default_head() {
        let m = MlpModel::<f32>::zeros(cfg(800, vec![512, 512])).unwrap();
        assert_eq!(m.param_count(), 800 * 512 + 512 + 512 * 512 + 512 + 512 * 10 + 10);
    }

    #[test]
    fn zero_model_scores_one_half() {
        let m = MlpModel::<f64>::zeros(cfg(4, vec![3])).unwrap();
        let s = m.forward(&[1.0, -2.0, 3.0, 0.5], Mode::Eval).unwrap();
        assert_eq!(s, vec![0.5; 10]);
    }

    #[test]
    fn scores_in_open_interval() {
        let m = MlpModel::<f64>::init(cfg(6, vec![5, 4])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-3.0..3.0)).collect();
            for s in m.forward(&x, Mode::Eval).unwrap() {
                assert!(s > 0.0 && s < 1.0);
            }
        }
    }

    #[test]
    fn eval_mode_ignores_dropout() {
        let mut c = cfg(6, vec![16]);
        c.dropout_prob = 0.5;
        let m = MlpModel::<f64>::init(c).unwrap();
        let x = [0.3, -0.1, 0.8, 1.0, -2.0, 0.0];
        assert_eq!(m.forward(&x, Mode::Eval).unwrap(), m.forward(&x, Mode::Eval).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let trained = m.forward_trace(&x, Mode::Train(&mut rng)).unwrap();
        assert!(trained.activations[1].contains(&0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let m = MlpModel::<f64>::init(cfg(3, vec![])).unwrap();
        assert!(matches!(
            m.forward(&[1.0], Mode::Eval),
            Err(Error::DimensionMismatch { expected: 3, actual: 1 })
        ));
    }

    #[test]
    fn invalid_configs() {
        let mut c = cfg(3, vec![]);
        c.output_dim = 9;
        assert!(MlpModel::<f64>::init(c).is_err());
        assert!(MlpModel::<f64>::init(cfg(3, vec![0])).is_err());
        let mut c = cfg(3, vec![]);
        c.dropout_prob = 1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn stable_loss_helpers() {
        assert!((softplus(0.0f64) - 2f64.ln()).abs() < 1e-15);
        assert!((softplus(800.0f64) - 800.0).abs() < 1e-9);
        assert!(softplus(-800.0f64) >= 0.0);
        let p = softmax(&[1000.0f64, 1000.0]);
        assert_eq!(p, vec![0.5, 0.5]);
    }
}
