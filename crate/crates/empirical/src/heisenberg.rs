//! The Heisenberg word-map experiment.
//!
//! Every word map on `k` letters reduces to `g_1^{n_1} ⋯ g_k^{n_k} ·
//! Π [g_i,g_j]^{n_ij}` with the length comparable to
//! `max(|n_l|, |n_ij|^{1/2})`, so enumerating the exponent boxes measures
//! how close nontrivial words get to the identity. The group is `R³` with
//! `(x,y,z)·(x',y',z') = (x+x', y+y', z+z'+xy')`; commutators land in the
//! center, so for a fixed generator part the distance to minimize is an
//! affine expression in the commutator exponents.

use crate::error::EmpiricalError;
use crate::exec::{map_chunks, Exec};
use crate::slope::{ols, SlopeFit};
use std::sync::atomic::{AtomicU64, Ordering};

pub type HPoint = (f64, f64, f64);

pub fn hmul(a: HPoint, b: HPoint) -> HPoint {
    (a.0 + b.0, a.1 + b.1, a.2 + b.2 + a.0 * b.1)
}

/// Integer power, exact in the group law: `g^n = (nx, ny, nz + C(n,2)xy)`.
pub fn hpow(g: HPoint, n: i64) -> HPoint {
    let nf = n as f64;
    let binom = nf * (nf - 1.0) / 2.0;
    (nf * g.0, nf * g.1, nf * g.2 + binom * g.0 * g.1)
}

fn commutator_coefficients(tuple: &[HPoint]) -> Vec<f64> {
    let k = tuple.len();
    let mut c = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            c.push(tuple[i].0 * tuple[j].1 - tuple[i].1 * tuple[j].0);
        }
    }
    c
}

/// `min_{n ∈ [-L,L]^P} |z0 + Σ n_p c_p|`, with the all-zero vector excluded
/// when `exclude_zero` is set. The last-but-best coefficient is solved by
/// rounding; the rest are scanned.
fn min_affine_over_box(
    z0: f64,
    c: &[f64],
    limit: i64,
    exclude_zero: bool,
) -> Result<f64, EmpiricalError> {
    let p = c.len();
    let inner = (0..p).max_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs())).unwrap();
    let outer: Vec<usize> = (0..p).filter(|&i| i != inner).collect();
    let fibers = (2.0 * limit as f64 + 1.0).powi(outer.len() as i32);
    if fibers > crate::enumerate::BOX_GUARD {
        return Err(EmpiricalError::BoxGuard(format!(
            "commutator box has {fibers:.3e} fibers"
        )));
    }
    let ci = c[inner];
    let mut n = vec![0i64; p];
    let mut best = f64::INFINITY;
    let mut level = 0usize;
    // Odometer over the outer exponents.
    loop {
        let partial = z0 + outer.iter().map(|&i| n[i] as f64 * c[i]).sum::<f64>();
        let center = if ci != 0.0 { (-partial / ci).round() as i64 } else { 0 };
        for t in [center - 1, center, center + 1] {
            let t = t.clamp(-limit, limit);
            if exclude_zero && t == 0 && outer.iter().all(|&i| n[i] == 0) {
                continue;
            }
            best = best.min((partial + t as f64 * ci).abs());
        }
        // Advance the odometer.
        loop {
            if level == outer.len() {
                return Ok(best);
            }
            let i = outer[level];
            n[i] += 1;
            if n[i] <= limit {
                level = 0;
                break;
            }
            n[i] = -limit;
            level += 1;
        }
    }
}

/// Shells 4, 8, 16, … capped at `bound`.
fn shell_schedule(bound: u64) -> Vec<u64> {
    let mut shells = Vec::new();
    let mut l = 4u64.min(bound);
    while l < bound {
        shells.push(l);
        l *= 2;
    }
    shells.push(bound);
    shells
}

/// Minimum distance to the identity over nontrivial word maps per length
/// shell, with the OLS slope of `-log min` against `log ℓ`.
pub fn heisenberg_word_min(
    tuple: &[HPoint],
    bound: u64,
    exec: Exec,
) -> Result<SlopeFit, EmpiricalError> {
    let k = tuple.len();
    if k < 2 {
        return Err(EmpiricalError::DegenerateInput("need at least two generators".into()));
    }
    if bound < 8 {
        return Err(EmpiricalError::BadSchedule("need bound ≥ 8 for a slope fit".into()));
    }
    let c = commutator_coefficients(tuple);
    let cmax = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut flags = Vec::new();
    if cmax == 0.0 {
        return Err(EmpiricalError::DegenerateInput("all commutators vanish".into()));
    }
    if c.iter().any(|x| x.abs() < 1e-9 * cmax) {
        flags.push("degenerate-commutators".to_string());
    }

    let shells = shell_schedule(bound);
    let mut points = Vec::new();
    let mut carried = f64::INFINITY;
    for &shell in &shells {
        let limit = (shell * shell) as i64;

        // Central words: generator exponents all zero.
        let central = min_affine_over_box(0.0, &c, limit, true)?;
        carried = carried.min(central);

        // Words with a nontrivial generator part. The abelianized distance
        // max(|X|, |Y|) already filters almost everything, and only fibers
        // that beat the running minimum pay for the commutator search.
        let shell_i = shell as i64;
        let side = (2 * shell_i + 1) as usize;
        let best_bits = AtomicU64::new(carried.to_bits());
        let chunk_results = map_chunks(side, exec, |chunk| {
            let mut local = f64::INFINITY;
            let mut n = vec![-shell_i; k];
            n[0] = chunk as i64 - shell_i;
            loop {
                if n.iter().any(|&x| x != 0) {
                    let mut g = hpow(tuple[0], n[0]);
                    for i in 1..k {
                        g = hmul(g, hpow(tuple[i], n[i]));
                    }
                    let xy = g.0.abs().max(g.1.abs());
                    let shared = f64::from_bits(best_bits.load(Ordering::Relaxed));
                    if xy < shared.min(local) {
                        let z = min_affine_over_box(g.2, &c, limit, false).unwrap_or(g.2.abs());
                        let d = xy.max(z);
                        if d < local {
                            local = d;
                            let mut cur = best_bits.load(Ordering::Relaxed);
                            while d < f64::from_bits(cur) {
                                match best_bits.compare_exchange(
                                    cur,
                                    d.to_bits(),
                                    Ordering::Relaxed,
                                    Ordering::Relaxed,
                                ) {
                                    Ok(_) => break,
                                    Err(now) => cur = now,
                                }
                            }
                        }
                    }
                }
                // Advance the exponents n[1..]; n[0] is fixed per chunk.
                let mut i = 1usize;
                loop {
                    if i == k {
                        return local;
                    }
                    n[i] += 1;
                    if n[i] <= shell_i {
                        break;
                    }
                    n[i] = -shell_i;
                    i += 1;
                }
            }
        });
        for local in chunk_results {
            carried = carried.min(local);
        }
        if carried > 0.0 {
            points.push(((shell as f64).ln(), -carried.ln()));
        } else {
            flags.push("exact-zero-word".to_string());
        }
    }
    if points.len() < 2 {
        return Err(EmpiricalError::DegenerateInput("not enough usable shells".into()));
    }
    let (slope, intercept, r2) = ols(&points);
    Ok(SlopeFit {
        q_schedule: shells.iter().map(|&s| s as f64).collect(),
        points,
        slope,
        intercept,
        r2,
        excluded: Vec::new(),
        flags,
    })
}
