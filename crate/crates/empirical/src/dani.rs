//! Diagonal-flow reformulation: the exponent of `x` is read off from
//! whether the flow `a_t^{(β)} x'` applied to the integer lattice stays
//! away from short vectors.
//!
//! The row rearrangement `x'` interleaves standard basis rows (for the
//! kernel flag) with rows of `x` (for the image flag); which rows enter is
//! decided by numeric ranks with a relative tolerance, so the construction
//! records the conditioning and flags ambiguous cases.

use crate::error::EmpiricalError;
use crate::exec::{map_chunks, Exec};
use crate::norms::{MatF, QuasiNormF};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

/// Default relative rank tolerance.
pub const RANK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DaniFlow {
    /// Invertible `d×d` row rearrangement.
    pub x_prime: MatF,
    /// The exponent `a_i` attached to each row of `x_prime`.
    pub exponents: Vec<f64>,
    /// Rows `0..kernel_dim` contract, the rest expand with the β factor.
    pub kernel_dim: usize,
    /// Indices (0-based) where the ascending flag meets the kernel.
    pub i_set: Vec<usize>,
    /// Indices (0-based) where the image flag drops, ascending.
    pub j_set: Vec<usize>,
    /// Frobenius condition estimate of `x_prime`.
    pub cond: f64,
    /// Set when a rank decision fell near the tolerance or the
    /// rearrangement is badly conditioned.
    pub cond_flag: bool,
}

struct RankTracker {
    ortho: Vec<Vec<f64>>,
    threshold: f64,
    nearest_call: f64,
}

impl RankTracker {
    fn new(threshold: f64) -> RankTracker {
        RankTracker { ortho: Vec::new(), threshold, nearest_call: f64::INFINITY }
    }

    /// Gram–Schmidt residual test; returns whether the vector added rank.
    fn add(&mut self, v: &[f64]) -> bool {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for b in &self.ortho {
                let dot: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= dot * bi;
                }
            }
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
        let ratio = norm / (self.threshold * scale);
        let call_distance = if ratio > 0.0 { ratio.log10().abs() } else { f64::INFINITY };
        self.nearest_call = self.nearest_call.min(call_distance);
        if norm > self.threshold * scale {
            for x in r.iter_mut() {
                *x /= norm;
            }
            self.ortho.push(r);
            true
        } else {
            false
        }
    }
}

/// Build the flow data for one matrix: the sets `J(xV)` and `I(ker x)`
/// from numeric ranks, the rearrangement `x'`, and the row exponents.
pub fn dani_flow(
    x: &MatF,
    qv: &QuasiNormF,
    qe: &QuasiNormF,
    tol: f64,
) -> Result<DaniFlow, EmpiricalError> {
    let d = x.cols();
    let e = x.rows();
    if qv.dim() != d || qe.dim() != e {
        return Err(EmpiricalError::DegenerateInput("norm dimensions do not match the matrix".into()));
    }
    let mut tracker = RankTracker::new(tol);

    // J(xV): the first row index reaching each image rank.
    let mut j_set = Vec::new();
    for i in 0..e {
        if tracker.add(&x.row(i)) {
            j_set.push(i);
        }
    }
    let m = j_set.len();

    // I(ker x): standard basis rows that extend the selected image rows.
    let mut i_set = Vec::new();
    for i in 0..d {
        let mut u = vec![0.0; d];
        u[i] = 1.0;
        if tracker.add(&u) {
            i_set.push(i);
        }
    }
    let n = i_set.len();
    if n + m != d {
        return Err(EmpiricalError::RankAmbiguous(format!(
            "flag sizes {n} + {m} do not fill dimension {d}"
        )));
    }

    let mut rows = Vec::with_capacity(d);
    let mut exponents = Vec::with_capacity(d);
    for &i in &i_set {
        let mut u = vec![0.0; d];
        u[i] = 1.0;
        rows.push(u);
        exponents.push(qv.weights()[i]);
    }
    for &j in j_set.iter().rev() {
        rows.push(x.row(j));
        exponents.push(qe.weights()[j]);
    }
    let x_prime = MatF::from_rows(rows);
    let cond = frobenius_condition(&x_prime);
    let cond_flag = cond > 1e12 || tracker.nearest_call < 2.0;
    Ok(DaniFlow { x_prime, exponents, kernel_dim: n, i_set, j_set, cond, cond_flag })
}

fn frobenius_condition(a: &MatF) -> f64 {
    let d = a.cols();
    let mut m: Vec<Vec<f64>> = (0..d).map(|i| a.row(i)).collect();
    let mut inv: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs()))
            .unwrap();
        if m[piv][col] == 0.0 {
            return f64::INFINITY;
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col];
        for j in 0..d {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..d {
            if r != col && m[r][col] != 0.0 {
                let f = m[r][col];
                for j in 0..d {
                    m[r][j] -= f * m[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    let frob = |rows: &[Vec<f64>]| rows.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let a_rows: Vec<Vec<f64>> = (0..d).map(|i| a.row(i)).collect();
    frob(&a_rows) * frob(&inv)
}

/// The matrix `a_t^{(β)} x'` at one time.
pub fn flow_matrix(flow: &DaniFlow, beta: f64, t: f64) -> MatF {
    let d = flow.x_prime.cols();
    let rows = (0..d)
        .map(|i| {
            let factor = if i < flow.kernel_dim {
                (-flow.exponents[i] * t).exp()
            } else {
                (beta * flow.exponents[i] * t).exp()
            };
            flow.x_prime.row(i).iter().map(|&x| factor * x).collect()
        })
        .collect();
    MatF::from_rows(rows)
}

/// Shortest nonzero vector of `A·Z^d` within the cube `|v_i| ≤ radius`,
/// Euclidean norm, exact over the searched cube.
pub fn shortest_vector(a: &MatF, radius: i64, exec: Exec) -> Result<(f64, Vec<i64>), EmpiricalError> {
    let d = a.cols();
    let outer_points = (2.0 * radius as f64 + 1.0).powi(d as i32 - 1);
    if outer_points > crate::enumerate::BOX_GUARD {
        return Err(EmpiricalError::BoxGuard(format!(
            "systole cube has {outer_points:.3e} fibers"
        )));
    }
    let norm2 = |w: &[f64]| w.iter().map(|x| x * x).sum::<f64>();
    let inner = (0..d)
        .max_by(|&i, &j| norm2(a.col(i)).total_cmp(&norm2(a.col(j))))
        .unwrap();
    let outer: Vec<usize> = (0..d).filter(|&j| j != inner).collect();

    let mut seed = f64::INFINITY;
    let mut seed_arg = vec![0i64; d];
    for j in 0..d {
        let v = norm2(a.col(j)).sqrt();
        if v < seed {
            seed = v;
            seed_arg = vec![0; d];
            seed_arg[j] = 1;
        }
    }
    let bits = AtomicU64::new(seed.to_bits());
    let state = Mutex::new((seed, seed_arg));

    let (slab_coord, slab_lo, slab_count) = match outer.first() {
        Some(&j) => (Some(j), -radius, (2 * radius + 1) as usize),
        None => (None, 0, 1),
    };
    let n_chunks = slab_count.min(256).max(1);
    let chunk_size = slab_count.div_ceil(n_chunks);

    map_chunks(n_chunks, exec, |chunk| {
        let mut v = vec![0i64; d];
        let from = slab_lo + (chunk * chunk_size) as i64;
        let to = (slab_lo + ((chunk + 1) * chunk_size) as i64).min(slab_lo + slab_count as i64);
        let scan = |v: &mut Vec<i64>| {
            scan_euclidean_fiber(a, radius, inner, v, &bits, &state);
        };
        match slab_coord {
            None => {
                scan(&mut v);
            }
            Some(j) => {
                for t in from..to {
                    v[j] = t;
                    euclidean_outer(a, radius, &outer, 1, inner, &mut v, &bits, &state);
                }
            }
        }
    });

    let (value, argmin) = state.into_inner().unwrap();
    Ok((value, argmin))
}

#[allow(clippy::too_many_arguments)]
fn euclidean_outer(
    a: &MatF,
    radius: i64,
    outer: &[usize],
    level: usize,
    inner: usize,
    v: &mut Vec<i64>,
    bits: &AtomicU64,
    state: &Mutex<(f64, Vec<i64>)>,
) {
    if level == outer.len() {
        scan_euclidean_fiber(a, radius, inner, v, bits, state);
        return;
    }
    let j = outer[level];
    for t in -radius..=radius {
        v[j] = t;
        euclidean_outer(a, radius, outer, level + 1, inner, v, bits, state);
    }
    v[j] = 0;
}

fn scan_euclidean_fiber(
    a: &MatF,
    radius: i64,
    inner: usize,
    v: &mut Vec<i64>,
    bits: &AtomicU64,
    state: &Mutex<(f64, Vec<i64>)>,
) {
    let best = f64::from_bits(bits.load(Ordering::Relaxed));
    v[inner] = 0;
    let partial = a.mul_ints(v);
    let c = a.col(inner);
    // ‖P + t·c‖² < best²  ⟺  aa·t² + bb·t + cc < 0.
    let aa: f64 = c.iter().map(|x| x * x).sum();
    let bb: f64 = 2.0 * partial.iter().zip(c).map(|(p, x)| p * x).sum::<f64>();
    let cc: f64 = partial.iter().map(|x| x * x).sum::<f64>() - best * best;
    if aa == 0.0 {
        return;
    }
    let disc = bb * bb - 4.0 * aa * cc;
    if disc <= 0.0 {
        return;
    }
    let sq = disc.sqrt();
    let lo = ((-bb - sq) / (2.0 * aa)).max(-(radius as f64));
    let hi = ((-bb + sq) / (2.0 * aa)).min(radius as f64);
    let outer_all_zero = v.iter().enumerate().all(|(j, &t)| j == inner || t == 0);
    for t in (lo.ceil() as i64)..=(hi.floor() as i64) {
        if outer_all_zero && t == 0 {
            continue;
        }
        let tf = t as f64;
        let norm = partial
            .iter()
            .zip(c)
            .map(|(p, x)| {
                let w = p + tf * x;
                w * w
            })
            .sum::<f64>()
            .sqrt();
        if norm < f64::from_bits(bits.load(Ordering::Relaxed)) {
            let mut guard = state.lock().unwrap();
            if norm < guard.0 {
                v[inner] = t;
                *guard = (norm, v.clone());
                bits.store(norm.to_bits(), Ordering::Relaxed);
            }
        }
    }
    v[inner] = 0;
}

/// Systole of the flowed lattice along a time grid.
#[derive(Debug, Clone)]
pub struct SystoleTrace {
    pub beta: f64,
    pub times: Vec<f64>,
    pub systole: Vec<f64>,
    /// Enumeration cube half-width, recorded so truncation is auditable.
    pub radius: i64,
    pub cond: f64,
    pub cond_flag: bool,
}

impl SystoleTrace {
    pub fn csv(&self) -> String {
        let mut out = String::from("t,systole\n");
        for (t, s) in self.times.iter().zip(&self.systole) {
            out.push_str(&format!("{t},{s:.12e}\n"));
        }
        out
    }
}

/// Trace `t ↦ min_{v≠0, |v|_∞ ≤ radius} ‖a_t^{(β)} x' v‖` over the grid.
pub fn dani_systole(
    x: &MatF,
    qv: &QuasiNormF,
    qe: &QuasiNormF,
    beta: f64,
    t_grid: &[f64],
    radius: i64,
    tol: f64,
    exec: Exec,
) -> Result<SystoleTrace, EmpiricalError> {
    if t_grid.is_empty() {
        return Err(EmpiricalError::BadSchedule("empty time grid".into()));
    }
    let flow = dani_flow(x, qv, qe, tol)?;
    let mut systole = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let a = flow_matrix(&flow, beta, t);
        let (value, _) = shortest_vector(&a, radius, exec)?;
        systole.push(value);
    }
    Ok(SystoleTrace {
        beta,
        times: t_grid.to_vec(),
        systole,
        radius,
        cond: flow.cond,
        cond_flag: flow.cond_flag,
    })
}
