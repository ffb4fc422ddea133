//! Training objectives over encoder output distributions, with analytic
//! gradients with respect to both distributions.

/// Added inside every logarithm.
pub const LOG_EPS: f64 = 1e-9;
pub const DEFAULT_HUBER_DELTA: f64 = 1.0;

/// `(alpha, alpha^2, ..., alpha^n) . y`
pub fn phi(y: &[f64], alpha: f64) -> f64 {
    let mut w = 1.0;
    y.iter()
        .map(|&v| {
            w *= alpha;
            w * v
        })
        .sum()
}

fn phi_weights(n: usize, alpha: f64) -> Vec<f64> {
    let mut w = 1.0;
    (0..n)
        .map(|_| {
            w *= alpha;
            w
        })
        .collect()
}

pub fn huber(r: f64, delta: f64) -> f64 {
    let a = r.abs();
    if a <= delta {
        0.5 * r * r
    } else {
        delta * (a - 0.5 * delta)
    }
}

fn huber_slope(r: f64, delta: f64) -> f64 {
    r.clamp(-delta, delta)
}

/// A loss over two distributions and its partial derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PairLoss {
    pub value: f64,
    pub d_first: Vec<f64>,
    pub d_second: Vec<f64>,
}

/// Huber penalty on `phi(y_shift) - alpha^k * phi(y)`.
pub fn loss_equivariance(y: &[f64], y_shift: &[f64], k_bins: i64, alpha: f64) -> f64 {
    let r = phi(y_shift, alpha) - alpha.powi(k_bins as i32) * phi(y, alpha);
    huber(r, DEFAULT_HUBER_DELTA)
}

pub fn equivariance_grad(y: &[f64], y_shift: &[f64], k_bins: i64, alpha: f64, delta: f64) -> PairLoss {
    let scale = alpha.powi(k_bins as i32);
    let r = phi(y_shift, alpha) - scale * phi(y, alpha);
    let slope = huber_slope(r, delta);
    let w = phi_weights(y.len(), alpha);
    PairLoss {
        value: huber(r, delta),
        d_first: w.iter().map(|wi| -slope * scale * wi).collect(),
        d_second: w.iter().map(|wi| slope * wi).collect(),
    }
}

/// `-sum_i y_i log(y_shift[i + k] + eps)` over indices with `i + k` in range.
pub fn loss_sce(y: &[f64], y_shift: &[f64], k_bins: i64) -> f64 {
    sce_grad(y, y_shift, k_bins).value
}

pub fn sce_grad(y: &[f64], y_shift: &[f64], k_bins: i64) -> PairLoss {
    let n = y.len();
    let mut value = 0.0;
    let mut d_first = vec![0.0; n];
    let mut d_second = vec![0.0; y_shift.len()];
    for (i, &p) in y.iter().enumerate() {
        let j = i as i64 + k_bins;
        if j < 0 || j as usize >= y_shift.len() {
            continue;
        }
        let q = y_shift[j as usize] + LOG_EPS;
        value -= p * q.ln();
        d_first[i] = -q.ln();
        d_second[j as usize] = -p / q;
    }
    PairLoss {
        value,
        d_first,
        d_second,
    }
}

/// Cross-entropy of an augmented view against the clean output.
pub fn loss_invariance(y: &[f64], y_aug: &[f64]) -> f64 {
    loss_sce(y, y_aug, 0)
}

/// `-sum_i target_i log(y_i + eps)`.
pub fn cross_entropy(target: &[f64], y: &[f64]) -> f64 {
    loss_sce(target, y, 0)
}

/// Gradient of [`cross_entropy`] with respect to `y`.
pub fn cross_entropy_grad(target: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    let g = sce_grad(target, y, 0);
    (g.value, g.d_second)
}

/// Shannon entropy in nats.
pub fn entropy(y: &[f64]) -> f64 {
    -y.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Voiced iff the output entropy is below `threshold_nats`.
pub fn voicing_from_entropy(y: &[f64], threshold_nats: f64) -> bool {
    entropy(y) < threshold_nats
}

/// Gaussian over bins centered at fractional bin `center`, summing to one.
/// `sigma_bins == 0` gives a one-hot at the nearest bin.
pub fn gaussian_target(center: f64, n_bins: usize, sigma_bins: f64) -> Vec<f64> {
    let mut t = vec![0.0; n_bins];
    if n_bins == 0 {
        return t;
    }
    if sigma_bins <= 0.0 {
        let i = center.round().clamp(0.0, (n_bins - 1) as f64) as usize;
        t[i] = 1.0;
        return t;
    }
    for (i, v) in t.iter_mut().enumerate() {
        let d = (i as f64 - center) / sigma_bins;
        *v = (-0.5 * d * d).exp();
    }
    let total: f64 = t.iter().sum();
    if total > 0.0 {
        t.iter_mut().for_each(|v| *v /= total);
    } else {
        let i = center.round().clamp(0.0, (n_bins - 1) as f64) as usize;
        t[i] = 1.0;
    }
    t
}
