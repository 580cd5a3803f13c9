//! The regularized softmax objective, its exact gradient, and the
//! line-search gradient descent trainer.

use super::{softmax, EncodedDataset, LearnError, LogRegModel, TrainMeta, TrainOptions};

/// Value and exact analytic gradient of
/// `sum_i [logsumexp(z_i) - z_i[y_i]] + lambda/2 * ||W||^2` with
/// `z_i = W x_i + b`. Biases are unregularized.
///
/// Returns `(objective, grad_w, grad_b)`.
pub fn nll_and_gradient(
    weights: &[f64],
    bias: &[f64],
    data: &EncodedDataset,
    lambda: f64,
) -> Result<(f64, Vec<f64>, Vec<f64>), LearnError> {
    let n_classes = data.classes.len();
    let n_features = data.n_features;
    if weights.len() != n_classes * n_features {
        return Err(LearnError::DimensionMismatch {
            what: "weight matrix",
            expected: n_classes * n_features,
            found: weights.len(),
        });
    }
    if bias.len() != n_classes {
        return Err(LearnError::DimensionMismatch {
            what: "bias vector",
            expected: n_classes,
            found: bias.len(),
        });
    }

    let mut objective = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = vec![0.0; n_classes];
    let mut scores = vec![0.0; n_classes];

    for (vector, gold) in &data.rows {
        if *gold >= n_classes {
            return Err(LearnError::DimensionMismatch {
                what: "class index",
                expected: n_classes,
                found: *gold,
            });
        }
        for (c, score) in scores.iter_mut().enumerate() {
            let mut z = bias[c];
            for (j, count) in vector.iter() {
                if j >= n_features {
                    return Err(LearnError::DimensionMismatch {
                        what: "feature index",
                        expected: n_features,
                        found: j,
                    });
                }
                z += weights[c * n_features + j] * count as f64;
            }
            *score = z;
        }
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_sum = max + scores.iter().map(|&s| (s - max).exp()).sum::<f64>().ln();
        objective += log_sum - scores[*gold];

        let proba = softmax(&scores);
        for (c, &p) in proba.iter().enumerate() {
            let residual = p - f64::from(c == *gold);
            grad_b[c] += residual;
            for (j, count) in vector.iter() {
                grad_w[c * n_features + j] += residual * count as f64;
            }
        }
    }

    for (g, w) in grad_w.iter_mut().zip(weights) {
        objective += 0.5 * lambda * w * w;
        *g += lambda * w;
    }
    Ok((objective, grad_w, grad_b))
}

fn inf_norm(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Minimize the convex objective by gradient descent with Armijo
/// backtracking, starting from zero weights. Stops when the gradient
/// infinity norm drops below `tol` or after `max_iter` accepted steps.
/// Deterministic given the options; the seed is recorded as metadata.
///
/// Single-class data yields a constant predictor rather than an error.
pub fn train_logreg(
    data: &EncodedDataset,
    opts: &TrainOptions,
) -> Result<LogRegModel, LearnError> {
    if data.rows.is_empty() || data.classes.is_empty() {
        return Err(LearnError::EmptyData);
    }
    let n_classes = data.classes.len();
    let n_features = data.n_features;
    let mut weights = vec![0.0; n_classes * n_features];
    let mut bias = vec![0.0; n_classes];

    let (mut objective, mut grad_w, mut grad_b) =
        nll_and_gradient(&weights, &bias, data, opts.lambda)?;
    let mut trace = vec![objective];
    let mut step = 1.0f64;
    let mut iterations = 0usize;

    while iterations < opts.max_iter {
        if inf_norm(&grad_w).max(inf_norm(&grad_b)) < opts.tol {
            break;
        }
        let grad_sq: f64 = grad_w.iter().map(|g| g * g).sum::<f64>()
            + grad_b.iter().map(|g| g * g).sum::<f64>();

        let mut accepted = false;
        while step >= 1e-20 {
            let w_next: Vec<f64> = weights
                .iter()
                .zip(&grad_w)
                .map(|(w, g)| w - step * g)
                .collect();
            let b_next: Vec<f64> = bias
                .iter()
                .zip(&grad_b)
                .map(|(b, g)| b - step * g)
                .collect();
            let (obj_next, gw_next, gb_next) =
                nll_and_gradient(&w_next, &b_next, data, opts.lambda)?;
            if obj_next <= objective - 1e-4 * step * grad_sq {
                weights = w_next;
                bias = b_next;
                objective = obj_next;
                grad_w = gw_next;
                grad_b = gb_next;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        iterations += 1;
        trace.push(objective);
        step = (step * 2.0).min(1e4);
    }

    Ok(LogRegModel {
        classes: data.classes.clone(),
        n_features,
        weights,
        bias,
        lambda: opts.lambda,
        meta: TrainMeta {
            seed: opts.seed,
            iterations,
            final_objective: objective,
            objective_trace: trace,
        },
    })
}
