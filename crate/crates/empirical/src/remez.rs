//! Monte Carlo check of the level-set measure bound for square-free
//! quadratic forms `q(x) = Σ_{k<l} a_kl x_k x_l` on the unit ball.

use crate::error::EmpiricalError;
use crate::exec::{map_chunks, Exec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, PartialEq)]
pub struct RemezEstimate {
    /// Estimated Lebesgue measure of `{x in the unit ball : |q(x)| ≤ ε}`.
    pub measure: f64,
    /// Monte Carlo standard error of the measure.
    pub std_error: f64,
    /// The closed-form bound `2^{d+1}ε/max|a| · (1 + log⁺(√d·max|a|/ε))`.
    pub bound: f64,
    pub n_inside: u64,
    pub n_total: u64,
}

/// Volume of the d-dimensional Euclidean unit ball, by the two-step
/// recursion `V_d = 2π V_{d-2}/d`.
pub fn ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI * ball_volume(d - 2) / d as f64,
    }
}

/// The level-set bound of the square-free quadratic form lemma.
pub fn remez_bound(d: usize, max_coeff: f64, eps: f64) -> f64 {
    let ratio = (d as f64).sqrt() * max_coeff / eps;
    2f64.powi(d as i32 + 1) * eps / max_coeff * (1.0 + ratio.ln().max(0.0))
}

const CHUNK: u64 = 1 << 14;

/// Monte Carlo estimate of `μ{x ∈ B_d : |q(x)| ≤ ε}` for
/// `q = Σ_{k<l} a_kl x_k x_l`, sampling uniformly from the ball.
pub fn quadratic_level_measure(
    d: usize,
    coeffs: &[(usize, usize, f64)],
    eps: f64,
    n_mc: u64,
    seed: u64,
    exec: Exec,
) -> Result<RemezEstimate, EmpiricalError> {
    if d < 2 {
        return Err(EmpiricalError::DegenerateInput("need dimension ≥ 2".into()));
    }
    if coeffs.is_empty() || coeffs.iter().all(|&(_, _, a)| a == 0.0) {
        return Err(EmpiricalError::DegenerateInput("coefficients must not all vanish".into()));
    }
    for &(k, l, _) in coeffs {
        if k >= l || l >= d {
            return Err(EmpiricalError::DegenerateInput(format!(
                "coefficient index ({k},{l}) out of range for square-free form in dim {d}"
            )));
        }
    }
    if !(eps > 0.0) || n_mc == 0 {
        return Err(EmpiricalError::DegenerateInput("need ε > 0 and n_mc ≥ 1".into()));
    }
    let max_coeff = coeffs.iter().map(|&(_, _, a)| a.abs()).fold(0.0, f64::max);

    let n_chunks = n_mc.div_ceil(CHUNK) as usize;
    let counts = map_chunks(n_chunks, exec, |chunk| {
        // A fixed stream per chunk keeps the estimate independent of the
        // thread count.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk as u64 + 1);
        let lo = chunk as u64 * CHUNK;
        let hi = (lo + CHUNK).min(n_mc);
        let mut inside = 0u64;
        let mut x = vec![0.0f64; d];
        for _ in lo..hi {
            // Uniform in the ball: normalized Gaussian direction, radius
            // U^{1/d}.
            let mut norm2 = 0.0;
            for xi in x.iter_mut() {
                let g: f64 = StandardNormal.sample(&mut rng);
                *xi = g;
                norm2 += g * g;
            }
            let r: f64 = rng.random::<f64>().powf(1.0 / d as f64) / norm2.sqrt();
            let mut q = 0.0;
            for &(k, l, a) in coeffs {
                q += a * (x[k] * r) * (x[l] * r);
            }
            if q.abs() <= eps {
                inside += 1;
            }
        }
        inside
    });
    let n_inside: u64 = counts.iter().sum();
    let frac = n_inside as f64 / n_mc as f64;
    let vol = ball_volume(d);
    Ok(RemezEstimate {
        measure: vol * frac,
        std_error: vol * (frac * (1.0 - frac) / n_mc as f64).sqrt(),
        bound: remez_bound(d, max_coeff, eps),
        n_inside,
        n_total: n_mc,
    })
}
