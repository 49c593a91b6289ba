//! Log-log slope estimation of the diophantine exponent.

use crate::enumerate::{min_image_qnorm_seeded, MinResult};
use crate::error::EmpiricalError;
use crate::exec::Exec;
use crate::norms::{MatF, QuasiNormF};

/// An ordinary-least-squares fit of `-log min` against `log Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub q_schedule: Vec<f64>,
    /// `(log Q, -log min)` for every radius that produced a nonzero minimum.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Radii excluded because the minimum was exactly zero (rational kernel).
    pub excluded: Vec<f64>,
    pub flags: Vec<String>,
}

/// Geometric radius schedule `q0, q0·ratio, …` of length `n`.
pub fn geometric_schedule(q0: f64, ratio: f64, n: usize) -> Vec<f64> {
    let mut q = q0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(q);
        q *= ratio;
    }
    out
}

/// The default desk schedule: ratio 2, ten points from Q = 16.
pub fn default_schedule() -> Vec<f64> {
    geometric_schedule(16.0, 2.0, 10)
}

pub fn ols(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 =
        points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, intercept, r2)
}

/// Slope estimate of the exponent of one matrix over an increasing radius
/// schedule of at least six points. Radii whose minimum is exactly zero are
/// excluded and flagged rather than clamped.
pub fn estimate_beta(
    x: &MatF,
    qv: &QuasiNormF,
    qe: &QuasiNormF,
    schedule: &[f64],
    exec: Exec,
) -> Result<SlopeFit, EmpiricalError> {
    if schedule.len() < 6 {
        return Err(EmpiricalError::BadSchedule("need at least 6 radii".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EmpiricalError::BadSchedule("schedule must be strictly increasing".into()));
    }
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    let mut flags = Vec::new();
    let mut prev: Option<MinResult> = None;
    for &q in schedule {
        // The previous minimizer lives inside the larger box and seeds the
        // pruning thresholds.
        let r = min_image_qnorm_seeded(x, qv, qe, q, prev.as_ref(), exec)?;
        if r.exact_zero {
            excluded.push(q);
            prev = Some(r);
            continue;
        }
        points.push((q.ln(), -r.value.ln()));
        prev = Some(r);
    }
    if !excluded.is_empty() {
        flags.push("exact-zero-minimum".to_string());
    }
    if points.len() < 2 {
        return Err(EmpiricalError::DegenerateInput(
            "fewer than two usable radii (rational kernel everywhere?)".into(),
        ));
    }
    let (slope, intercept, r2) = ols(&points);
    Ok(SlopeFit { q_schedule: schedule.to_vec(), points, slope, intercept, r2, excluded, flags })
}

/// CSV rows `(Q, min_norm, log_Q, neg_log_min)`.
pub fn slope_csv(fit: &SlopeFit) -> String {
    let mut out = String::from("Q,min_norm,log_Q,neg_log_min\n");
    let mut at = 0;
    for &q in &fit.q_schedule {
        if fit.excluded.contains(&q) {
            out.push_str(&format!("{q},0,{:.12e},\n", q.ln()));
            continue;
        }
        let (lq, nlm) = fit.points[at];
        at += 1;
        out.push_str(&format!("{q},{:.12e},{lq:.12e},{nlm:.12e}\n", (-nlm).exp()));
    }
    out
}
