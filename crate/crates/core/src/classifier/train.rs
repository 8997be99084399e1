use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mlp::{Gradients, MlpModel, Mode};
use crate::error::{Error, Result};
use crate::relation::RelationClass;
use crate::scalar::Scalar;

/// Adam with the usual defaults (beta1 0.9, beta2 0.999, eps 1e-8).
#[derive(Debug, Clone)]
pub struct Adam<T> {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: i32,
    first: Vec<Vec<T>>,
    second: Vec<Vec<T>>,
}

impl<T: Scalar> Adam<T> {
    pub fn new(model: &MlpModel<T>, learning_rate: f64) -> Self {
        let shapes: Vec<usize> = model
            .layers
            .iter()
            .flat_map(|l| [l.weights.len(), l.bias.len()])
            .collect();
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            first: shapes.iter().map(|&n| vec![T::zero(); n]).collect(),
            second: shapes.iter().map(|&n| vec![T::zero(); n]).collect(),
        }
    }

    pub fn step(&mut self, model: &mut MlpModel<T>, grads: &Gradients<T>) {
        self.step += 1;
        let (b1, b2) = (T::of(self.beta1), T::of(self.beta2));
        let c1 = T::one() - T::of(self.beta1.powi(self.step));
        let c2 = T::one() - T::of(self.beta2.powi(self.step));
        let lr = T::of(self.learning_rate);
        let eps = T::of(self.epsilon);
        let grad_blocks = grads.iter().flat_map(|g| [&g.weights, &g.bias]);
        for (((params, g), m), v) in model
            .param_blocks_mut()
            .zip(grad_blocks)
            .zip(&mut self.first)
            .zip(&mut self.second)
        {
            for i in 0..params.len() {
                m[i] = b1 * m[i] + (T::one() - b1) * g[i];
                v[i] = b2 * v[i] + (T::one() - b2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

/// Mini-batch Adam on the model's configured loss. Sample order is
/// reshuffled every epoch from the config's `rng_seed`, which also drives
/// dropout. Returns the mean training loss of every epoch.
pub fn train<T: Scalar>(
    mut model: MlpModel<T>,
    samples: &[(Vec<T>, RelationClass)],
) -> Result<(MlpModel<T>, Vec<f64>)> {
    let cfg = model.config.clone();
    if cfg.epochs == 0 {
        return Ok((model, Vec::new()));
    }
    if samples.is_empty() {
        return Err(Error::Invalid("training set is empty".into()));
    }
    let classes: BTreeSet<_> = samples.iter().map(|(_, c)| *c).collect();
    if classes.len() < 2 {
        return Err(Error::Invalid("training labels must span at least two classes".into()));
    }
    for (x, _) in samples {
        model.check_input(x)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ 0x5e_ed0f_7a1e);
    let mut adam = Adam::new(&model, cfg.learning_rate);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut grads = model.zero_gradients();
    let mut trace = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            for g in &mut grads {
                g.weights.iter_mut().for_each(|x| *x = T::zero());
                g.bias.iter_mut().for_each(|x| *x = T::zero());
            }
            let scale = T::one() / T::of(batch.len() as f64);
            for &i in batch {
                let (x, label) = &samples[i];
                let t = model.forward_trace(x, Mode::Train(&mut rng))?;
                loss_sum += model.backward(&t, label.index(), scale, &mut grads).as_f64();
            }
            adam.step(&mut model, &grads);
        }
        let mean = loss_sum / samples.len() as f64;
        if !mean.is_finite() || !model.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, loss: mean });
        }
        log::trace!("epoch {epoch}: loss {mean:.6}");
        trace.push(mean);
    }
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::mlp::MlpConfig;
    use crate::classifier::predict;
    use rand::Rng;

    fn separable(n: usize, seed: u64) -> Vec<(Vec<f64>, RelationClass)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let pos = i % 2 == 0;
                let x0: f64 = rng.gen_range(0.2..1.0) * if pos { 1.0 } else { -1.0 };
                let x1: f64 = rng.gen_range(-1.0..1.0);
                let label = if pos {
                    RelationClass::Employer
                } else {
                    RelationClass::None
                };
                (vec![x0, x1], label)
            })
            .collect()
    }

    #[test]
    fn separable_points_reach_full_accuracy() {
        let data = separable(50, 1);
        let cfg = MlpConfig {
            input_dim: 2,
            hidden_layers: vec![8],
            learning_rate: 0.01,
            batch_size: 10,
            epochs: 200,
            ..Default::default()
        };
        let (model, trace) = train(MlpModel::init(cfg).unwrap(), &data).unwrap();
        assert_eq!(trace.len(), 200);
        let correct = data
            .iter()
            .filter(|(x, y)| predict(&model, x).unwrap().label() == *y)
            .count();
        assert_eq!(correct, 50);
    }

    #[test]
    fn convex_single_layer_loss_does_not_increase() {
        let data = separable(60, 2);
        let cfg = MlpConfig {
            input_dim: 2,
            hidden_layers: vec![],
            learning_rate: 1e-3,
            batch_size: 60,
            epochs: 100,
            ..Default::default()
        };
        let (_, trace) = train(MlpModel::init(cfg).unwrap(), &data).unwrap();
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn zero_epochs_leaves_model_unchanged() {
        let cfg = MlpConfig {
            input_dim: 2,
            hidden_layers: vec![4],
            epochs: 0,
            ..Default::default()
        };
        let m = MlpModel::<f64>::init(cfg).unwrap();
        let (trained, trace) = train(m.clone(), &separable(10, 0)).unwrap();
        assert_eq!(trained, m);
        assert!(trace.is_empty());
    }

    #[test]
    fn preconditions() {
        let cfg = MlpConfig {
            input_dim: 2,
            hidden_layers: vec![],
            epochs: 1,
            ..Default::default()
        };
        let m = MlpModel::<f64>::init(cfg).unwrap();
        assert!(train(m.clone(), &[]).is_err());
        let one_class = vec![(vec![0.0, 1.0], RelationClass::Employer); 3];
        assert!(train(m.clone(), &one_class).is_err());
        let wrong_dim = vec![(vec![0.0], RelationClass::Employer), (vec![1.0], RelationClass::None)];
        assert!(matches!(train(m, &wrong_dim), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn divergence_is_reported() {
        let cfg = MlpConfig {
            input_dim: 2,
            hidden_layers: vec![4],
            learning_rate: 1e300,
            epochs: 3,
            ..Default::default()
        };
        let data: Vec<_> = separable(20, 3)
            .into_iter()
            .map(|(x, y)| (vec![x[0] * 1e300, x[1]], y))
            .collect();
        let err = train(MlpModel::<f64>::init(cfg).unwrap(), &data).unwrap_err();
        assert!(matches!(err, Error::NonFiniteLoss { .. }), "{err}");
    }

    #[test]
    fn training_is_deterministic() {
        let data = separable(30, 4);
        let cfg = MlpConfig {
            input_dim: 2,
            hidden_layers: vec![6],
            dropout_prob: 0.2,
            epochs: 5,
            batch_size: 4,
            ..Default::default()
        };
        let a = train(MlpModel::init(cfg.clone()).unwrap(), &data).unwrap();
        let b = train(MlpModel::init(cfg).unwrap(), &data).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }
}
