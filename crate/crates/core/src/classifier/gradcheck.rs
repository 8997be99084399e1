//! Finite-difference verification of the analytic gradients.

use super::mlp::{MlpModel, Mode};
use crate::error::Result;
use crate::relation::RelationClass;
use crate::scalar::Scalar;

/// Floor on the relative-error denominator, so parameters whose gradient is
/// zero on both routes compare as equal instead of dividing by zero.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-8;

/// Relative error `|a - b| / max(|a|, |b|, floor)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(RELATIVE_ERROR_FLOOR)
}

/// Maximum relative error, over every parameter, between the backpropagated
/// gradient of the single-sample loss and its central finite difference
/// with step `epsilon`. Dropout is disabled.
pub fn gradient_check<T: Scalar>(model: &MlpModel<T>, x: &[T], label: RelationClass, epsilon: f64) -> Result<f64> {
    let trace = model.forward_trace(x, Mode::Eval)?;
    let mut grads = model.zero_gradients();
    model.backward(&trace, label.index(), T::one(), &mut grads);

    let analytic: Vec<T> = grads
        .iter()
        .flat_map(|g| g.weights.iter().chain(&g.bias).copied())
        .collect();
    let mut probe = model.clone();
    let eps = T::of(epsilon);
    let mut worst = 0.0f64;
    let mut k = 0;
    for block in 0..probe.layers.len() * 2 {
        let len = block_mut(&mut probe, block).len();
        for i in 0..len {
            let original = block_mut(&mut probe, block)[i];
            block_mut(&mut probe, block)[i] = original + eps;
            let plus = probe.sample_loss(x, label.index())?;
            block_mut(&mut probe, block)[i] = original - eps;
            let minus = probe.sample_loss(x, label.index())?;
            block_mut(&mut probe, block)[i] = original;
            let numeric = (plus - minus).as_f64() / (2.0 * epsilon);
            worst = worst.max(relative_error(analytic[k].as_f64(), numeric));
            k += 1;
        }
    }
    Ok(worst)
}

fn block_mut<T: Scalar>(model: &mut MlpModel<T>, block: usize) -> &mut Vec<T> {
    let layer = &mut model.layers[block / 2];
    if block.is_multiple_of(2) {
        &mut layer.weights
    } else {
        &mut layer.bias
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::mlp::{LossKind, MlpConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_input(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn small_random_model() {
        let cfg = MlpConfig {
            input_dim: 6,
            hidden_layers: vec![5, 4],
            rng_seed: 11,
            ..Default::default()
        };
        let m = MlpModel::<f64>::init(cfg).unwrap();
        let err = gradient_check(&m, &random_input(6, 1), RelationClass::FacetOf, 1e-5).unwrap();
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn linear_model_is_near_exact() {
        let cfg = MlpConfig {
            input_dim: 4,
            hidden_layers: vec![],
            ..Default::default()
        };
        let m = MlpModel::<f64>::init(cfg).unwrap();
        let err = gradient_check(&m, &random_input(4, 2), RelationClass::None, 1e-5).unwrap();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn softmax_loss_gradients() {
        let cfg = MlpConfig {
            input_dim: 5,
            hidden_layers: vec![7],
            loss: LossKind::SoftmaxCe,
            ..Default::default()
        };
        let m = MlpModel::<f64>::init(cfg).unwrap();
        let err = gradient_check(&m, &random_input(5, 3), RelationClass::Symptoms, 1e-5).unwrap();
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn zero_gradient_point_is_finite() {
        let cfg = MlpConfig {
            input_dim: 3,
            hidden_layers: vec![4],
            ..Default::default()
        };
        let m = MlpModel::<f64>::zeros(cfg).unwrap();
        let err = gradient_check(&m, &[0.0, 0.0, 0.0], RelationClass::Employer, 1e-5).unwrap();
        assert!(err.is_finite());
        assert!(err < 1e-4, "{err}");
        assert_eq!(relative_error(0.0, 0.0), 0.0);
    }
}
