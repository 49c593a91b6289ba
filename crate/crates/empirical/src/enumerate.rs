//! Exact minimum of the target quasi-norm over an integer box.
//!
//! Three scan shapes share the running-minimum machinery:
//!
//! - one target row: per fiber the best inner coordinate is the nearest
//!   integer to `-partial/c`, no interval logic at all;
//! - fewer rows than columns: `e` pivot coordinates are solved per fiber
//!   through the inverse of a well-conditioned `e×e` column submatrix, so
//!   each fiber checks the handful of integer points inside the preimage
//!   of the current sublevel box;
//! - otherwise: one coordinate is scanned over the interval of values
//!   that could still beat the minimum (the sublevel preimage on a line).
//!
//! Every candidate is re-evaluated exactly before it replaces the minimum,
//! so pruning boxes only ever err on the generous side and the result is
//! the exact minimum over the box regardless of slab order or thread
//! count. A previous minimum over a smaller radius can seed the scan;
//! schedules exploit that by chaining their points.

use crate::error::EmpiricalError;
use crate::exec::{map_chunks, Exec};
use crate::norms::{MatF, QuasiNormF, SearchBox};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

/// Work guard: the scanned (outer) box may not exceed this many fibers.
pub const BOX_GUARD: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct MinResult {
    /// `min |xv|'` over nonzero `v` in the box.
    pub value: f64,
    /// One minimizer (ties resolved arbitrarily).
    pub argmin: Vec<i64>,
    /// True when the minimum is exactly zero (a kernel vector was hit).
    pub exact_zero: bool,
}

struct Best {
    bits: AtomicU64,
    state: Mutex<(f64, Vec<i64>)>,
}

impl Best {
    fn new(value: f64, argmin: &[i64]) -> Best {
        Best { bits: AtomicU64::new(value.to_bits()), state: Mutex::new((value, argmin.to_vec())) }
    }

    fn read(&self) -> f64 {
        f64::from_bits(self.bits.load(Ordering::Relaxed))
    }

    fn offer(&self, value: f64, argmin: &[i64]) {
        let mut guard = self.state.lock().unwrap();
        if value < guard.0 {
            *guard = (value, argmin.to_vec());
            self.bits.store(value.to_bits(), Ordering::Relaxed);
        }
    }
}

/// `min_{0 ≠ v ∈ Z^d, |v| ≤ q} |xv|'` by box enumeration.
pub fn min_image_qnorm(
    x: &MatF,
    qv: &QuasiNormF,
    qe: &QuasiNormF,
    q: f64,
    exec: Exec,
) -> Result<MinResult, EmpiricalError> {
    min_image_qnorm_seeded(x, qv, qe, q, None, exec)
}

/// Same, seeded with a known admissible point (for example the minimizer
/// found at a smaller radius).
pub fn min_image_qnorm_seeded(
    x: &MatF,
    qv: &QuasiNormF,
    qe: &QuasiNormF,
    q: f64,
    seed: Option<&MinResult>,
    exec: Exec,
) -> Result<MinResult, EmpiricalError> {
    if x.cols() != qv.dim() || x.rows() != qe.dim() {
        return Err(EmpiricalError::DegenerateInput(format!(
            "matrix is {}×{} but norms have dims {}/{}",
            x.rows(),
            x.cols(),
            qv.dim(),
            qe.dim()
        )));
    }
    let sbox = SearchBox::new(qv, q)?;
    let bounds = sbox.bounds().to_vec();
    let d = x.cols();
    let e = x.rows();

    let col_height = |j: usize| x.col(j).iter().fold(0.0f64, |m, &c| m.max(c.abs()));
    if (0..d).all(|j| col_height(j) == 0.0) {
        let mut v = vec![0i64; d];
        v[0] = 1;
        return Ok(MinResult { value: 0.0, argmin: v, exact_zero: true });
    }

    // Seed with the coordinate vectors (inside the box for q ≥ 1) and any
    // caller-provided admissible point.
    let mut seed_value = f64::INFINITY;
    let mut seed_arg = vec![0i64; d];
    for j in 0..d {
        let value = qe.eval(x.col(j));
        if value < seed_value {
            seed_value = value;
            seed_arg = vec![0; d];
            seed_arg[j] = 1;
        }
    }
    if let Some(prev) = seed {
        if sbox.contains(&prev.argmin) && prev.argmin.iter().any(|&t| t != 0) {
            let value = qe.eval(&x.mul_ints(&prev.argmin));
            if value < seed_value {
                seed_value = value;
                seed_arg = prev.argmin.clone();
            }
        }
    }
    let best = Best::new(seed_value, &seed_arg);

    if e == 1 {
        scan_single_row(x, qe, &bounds, &best, exec)?;
    } else if e < d {
        match PivotData::build(x, &bounds) {
            Some(pivots) => scan_pivot_solve(x, qe, &bounds, &pivots, &best, exec)?,
            None => scan_interval(x, qe, &bounds, &best, exec)?,
        }
    } else {
        scan_interval(x, qe, &bounds, &best, exec)?;
    }

    let (value, argmin) = best.state.into_inner().unwrap();
    Ok(MinResult { value, argmin, exact_zero: value == 0.0 })
}

fn guard_fibers(count: f64) -> Result<(), EmpiricalError> {
    if count > BOX_GUARD {
        return Err(EmpiricalError::BoxGuard(format!(
            "scan box has {count:.3e} fibers (limit {BOX_GUARD:.0e})"
        )));
    }
    Ok(())
}

fn slabs(outer: &[usize], bounds: &[i64]) -> (Option<usize>, i64, usize) {
    match outer.first() {
        Some(&j) => (Some(j), -bounds[j], (2 * bounds[j] + 1) as usize),
        None => (None, 0, 1),
    }
}

// -- single target row -------------------------------------------------------

fn scan_single_row(
    x: &MatF,
    qe: &QuasiNormF,
    bounds: &[i64],
    best: &Best,
    exec: Exec,
) -> Result<(), EmpiricalError> {
    let d = x.cols();
    let col_height = |j: usize| x.col(j)[0].abs();
    let inner = (0..d).max_by(|&a, &b| col_height(a).total_cmp(&col_height(b))).unwrap();
    let outer: Vec<usize> = (0..d).filter(|&j| j != inner).collect();
    guard_fibers(outer.iter().map(|&j| 2.0 * bounds[j] as f64 + 1.0).product())?;

    let c0 = x.col(inner)[0];
    let inv_c0 = 1.0 / c0;
    let alpha = qe.weights()[0];
    let b_in = bounds[inner];
    let outer_cols: Vec<f64> = outer.iter().map(|&j| x.col(j)[0]).collect();

    let (slab_coord, slab_lo, slab_count) = slabs(&outer, bounds);
    let n_chunks = slab_count.min(256).max(1);
    let chunk_size = slab_count.div_ceil(n_chunks);

    map_chunks(n_chunks, exec, |chunk| {
        let from = slab_lo + (chunk * chunk_size) as i64;
        let to = (slab_lo + ((chunk + 1) * chunk_size) as i64).min(slab_lo + slab_count as i64);
        let mut w = vec![0i64; outer.len()];
        let mut best_raw = f64::INFINITY;
        let mut best_u = 0i64;
        let mut best_w: Vec<i64> = w.clone();
        let mut slab_vals = from..to;
        let mut next_slab = match slab_coord {
            Some(_) => slab_vals.next(),
            None => Some(0),
        };
        while let Some(v0) = next_slab {
            if !outer.is_empty() {
                w[0] = v0;
                for (idx, &j) in outer.iter().enumerate().skip(1) {
                    w[idx] = -bounds[j];
                }
            }
            loop {
                let mut p = 0.0;
                for (idx, &cj) in outer_cols.iter().enumerate() {
                    p += w[idx] as f64 * cj;
                }
                let mut u = (-p * inv_c0).round() as i64;
                u = u.clamp(-b_in, b_in);
                if u == 0 && w.iter().all(|&t| t == 0) {
                    let plus = (p + c0).abs();
                    let minus = (p - c0).abs();
                    u = if plus <= minus { 1 } else { -1 };
                }
                let val = (p + u as f64 * c0).abs();
                if val < best_raw {
                    best_raw = val;
                    best_u = u;
                    best_w.clone_from(&w);
                }
                // Advance all outer coordinates except the slab one.
                let mut idx = 1;
                loop {
                    if idx >= outer.len() {
                        break;
                    }
                    let j = outer[idx];
                    w[idx] += 1;
                    if w[idx] <= bounds[j] {
                        break;
                    }
                    w[idx] = -bounds[j];
                    idx += 1;
                }
                if idx >= outer.len() {
                    break;
                }
            }
            next_slab = match slab_coord {
                Some(_) => slab_vals.next(),
                None => None,
            };
        }
        if best_raw.is_finite() {
            let mut arg = vec![0i64; x.cols()];
            for (idx, &j) in outer.iter().enumerate() {
                arg[j] = best_w[idx];
            }
            arg[inner] = best_u;
            let value = if alpha == 1.0 { best_raw } else { best_raw.powf(1.0 / alpha) };
            best.offer(value, &arg);
        }
    });
    Ok(())
}

// -- pivot solve (e < d) ------------------------------------------------------

struct PivotData {
    pivot_cols: Vec<usize>,
    free_cols: Vec<usize>,
    /// Inverse of the pivot submatrix, rows of M^{-1}.
    inv: Vec<Vec<f64>>,
    /// |M^{-1}| entrywise, for the candidate radii.
    inv_abs: Vec<Vec<f64>>,
}

impl PivotData {
    /// Greedy max-residual choice of `e` well-conditioned columns.
    fn build(x: &MatF, bounds: &[i64]) -> Option<PivotData> {
        let d = x.cols();
        let e = x.rows();
        let mut chosen: Vec<usize> = Vec::new();
        let mut ortho: Vec<Vec<f64>> = Vec::new();
        let scale = (0..d)
            .map(|j| x.col(j).iter().map(|c| c * c).sum::<f64>().sqrt())
            .fold(0.0f64, f64::max);
        for _ in 0..e {
            let mut best_j = None;
            let mut best_norm = 0.0;
            for j in 0..d {
                if chosen.contains(&j) {
                    continue;
                }
                let mut r = x.col(j).to_vec();
                for b in &ortho {
                    let dot: f64 = r.iter().zip(b).map(|(p, q)| p * q).sum();
                    for (ri, bi) in r.iter_mut().zip(b) {
                        *ri -= dot * bi;
                    }
                }
                let norm = r.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm > best_norm {
                    best_norm = norm;
                    best_j = Some(j);
                }
            }
            let j = best_j?;
            if best_norm <= 1e-10 * scale {
                return None;
            }
            let mut r = x.col(j).to_vec();
            for b in &ortho {
                let dot: f64 = r.iter().zip(b).map(|(p, q)| p * q).sum();
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= dot * bi;
                }
            }
            let norm = r.iter().map(|c| c * c).sum::<f64>().sqrt();
            for ri in r.iter_mut() {
                *ri /= norm;
            }
            ortho.push(r);
            chosen.push(j);
        }
        chosen.sort_unstable();
        let m_inv = invert(&chosen.iter().map(|&j| x.col(j).to_vec()).collect::<Vec<_>>())?;
        let inv_abs = m_inv.iter().map(|row| row.iter().map(|v| v.abs()).collect()).collect();
        let free_cols = (0..d).filter(|j| !chosen.contains(j)).collect();
        let _ = bounds;
        Some(PivotData { pivot_cols: chosen, free_cols, inv: m_inv, inv_abs })
    }
}

/// Inverse of a small matrix given by columns; None if singular.
fn invert(cols: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = cols.len();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
    let mut inv: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs()))?;
        if m[piv][col] == 0.0 {
            return None;
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col];
        for j in 0..n {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && m[r][col] != 0.0 {
                let f = m[r][col];
                for j in 0..n {
                    m[r][j] -= f * m[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

fn scan_pivot_solve(
    x: &MatF,
    qe: &QuasiNormF,
    bounds: &[i64],
    pivots: &PivotData,
    best: &Best,
    exec: Exec,
) -> Result<(), EmpiricalError> {
    let d = x.cols();
    let e = x.rows();
    let free = &pivots.free_cols;
    guard_fibers(free.iter().map(|&j| 2.0 * bounds[j] as f64 + 1.0).product())?;

    let (slab_coord, slab_lo, slab_count) = slabs(free, bounds);
    let n_chunks = slab_count.min(256).max(1);
    let chunk_size = slab_count.div_ceil(n_chunks);

    map_chunks(n_chunks, exec, |chunk| {
        let from = slab_lo + (chunk * chunk_size) as i64;
        let to = (slab_lo + ((chunk + 1) * chunk_size) as i64).min(slab_lo + slab_count as i64);
        let mut w = vec![0i64; free.len()];
        let mut partial = vec![0.0; e];
        let mut image = vec![0.0; e];
        let mut center = vec![0.0; e];
        let mut radius = vec![0.0; e];
        let mut cand = vec![0i64; e];
        let mut vbuf = vec![0i64; d];
        let mut thresh = Thresholds::new(qe);
        let mut slab_vals = from..to;
        let mut next_slab = match slab_coord {
            Some(_) => slab_vals.next(),
            None => Some(0),
        };
        while let Some(v0) = next_slab {
            if !free.is_empty() {
                w[0] = v0;
                for (idx, &j) in free.iter().enumerate().skip(1) {
                    w[idx] = -bounds[j];
                }
            }
            loop {
                let current = best.read();
                if current == 0.0 {
                    return;
                }
                let m = thresh.refresh(current);
                // Partial image of the free coordinates.
                partial.fill(0.0);
                for (idx, &j) in free.iter().enumerate() {
                    if w[idx] != 0 {
                        let t = w[idx] as f64;
                        for (p, c) in partial.iter_mut().zip(x.col(j)) {
                            *p += t * c;
                        }
                    }
                }
                // Preimage of the sublevel box around the exact solution.
                let mut feasible = true;
                for i in 0..e {
                    let mut z = 0.0;
                    let mut r = 0.0;
                    for jj in 0..e {
                        z -= pivots.inv[i][jj] * partial[jj];
                        r += pivots.inv_abs[i][jj] * m[jj];
                    }
                    center[i] = z;
                    radius[i] = r * (1.0 + 1e-12) + 1e-12;
                    let b = bounds[pivots.pivot_cols[i]] as f64;
                    if (center[i] - radius[i]).ceil() > (center[i] + radius[i]).floor().min(b)
                        || (center[i] - radius[i]).ceil().max(-b) > (center[i] + radius[i]).floor()
                    {
                        feasible = false;
                        break;
                    }
                }
                if feasible {
                    // Walk the candidate box (usually a single point).
                    let lo_hi: Vec<(i64, i64)> = (0..e)
                        .map(|i| {
                            let b = bounds[pivots.pivot_cols[i]];
                            (
                                ((center[i] - radius[i]).ceil() as i64).max(-b),
                                ((center[i] + radius[i]).floor() as i64).min(b),
                            )
                        })
                        .collect();
                    for (i, &(lo, _)) in lo_hi.iter().enumerate() {
                        cand[i] = lo;
                    }
                    let free_all_zero = w.iter().all(|&t| t == 0);
                    'candidates: loop {
                        if !(free_all_zero && cand.iter().all(|&t| t == 0)) {
                            for i in 0..e {
                                let mut s = partial[i];
                                for (jj, &cj) in cand.iter().enumerate() {
                                    s += cj as f64 * x.col(pivots.pivot_cols[jj])[i];
                                }
                                image[i] = s;
                            }
                            let value = qe.eval(&image);
                            if value < best.read() {
                                for (idx, &j) in free.iter().enumerate() {
                                    vbuf[j] = w[idx];
                                }
                                for (jj, &j) in pivots.pivot_cols.iter().enumerate() {
                                    vbuf[j] = cand[jj];
                                }
                                best.offer(value, &vbuf);
                            }
                        }
                        let mut i = 0;
                        loop {
                            if i >= e {
                                break 'candidates;
                            }
                            cand[i] += 1;
                            if cand[i] <= lo_hi[i].1 {
                                break;
                            }
                            cand[i] = lo_hi[i].0;
                            i += 1;
                        }
                    }
                }
                // Advance the free coordinates (index 0 is the slab).
                let mut idx = 1;
                loop {
                    if idx >= free.len() {
                        break;
                    }
                    let j = free[idx];
                    w[idx] += 1;
                    if w[idx] <= bounds[j] {
                        break;
                    }
                    w[idx] = -bounds[j];
                    idx += 1;
                }
                if idx >= free.len() {
                    break;
                }
            }
            next_slab = match slab_coord {
                Some(_) => slab_vals.next(),
                None => None,
            };
        }
    });
    Ok(())
}

// -- interval scan (e ≥ d or degenerate pivots) -------------------------------

fn scan_interval(
    x: &MatF,
    qe: &QuasiNormF,
    bounds: &[i64],
    best: &Best,
    exec: Exec,
) -> Result<(), EmpiricalError> {
    let d = x.cols();
    let col_height = |j: usize| x.col(j).iter().fold(0.0f64, |m, &c| m.max(c.abs()));
    let inner = (0..d).max_by(|&a, &b| col_height(a).total_cmp(&col_height(b))).unwrap();
    let outer: Vec<usize> = (0..d).filter(|&j| j != inner).collect();
    guard_fibers(outer.iter().map(|&j| 2.0 * bounds[j] as f64 + 1.0).product())?;

    let (slab_coord, slab_lo, slab_count) = slabs(&outer, bounds);
    let n_chunks = slab_count.min(256).max(1);
    let chunk_size = slab_count.div_ceil(n_chunks);

    map_chunks(n_chunks, exec, |chunk| {
        let from = slab_lo + (chunk * chunk_size) as i64;
        let to = (slab_lo + ((chunk + 1) * chunk_size) as i64).min(slab_lo + slab_count as i64);
        let mut v = vec![0i64; d];
        let mut buffers = (vec![0.0; x.rows()], vec![0.0; x.rows()]);
        let mut thresholds = Thresholds::new(qe);
        match slab_coord {
            None => scan_fiber(x, qe, bounds, inner, best, &mut v, &mut buffers, &mut thresholds),
            Some(j) => {
                for t in from..to {
                    v[j] = t;
                    scan_outer(x, qe, bounds, &outer, 1, inner, best, &mut v, &mut buffers, &mut thresholds);
                }
            }
        }
    });
    Ok(())
}

/// Cached per-row sublevel thresholds `best^{α'_i}`, refreshed when the
/// shared minimum moves.
struct Thresholds<'a> {
    qe: &'a QuasiNormF,
    cached_for: f64,
    m: Vec<f64>,
}

impl<'a> Thresholds<'a> {
    fn new(qe: &'a QuasiNormF) -> Thresholds<'a> {
        Thresholds { qe, cached_for: f64::NAN, m: vec![0.0; qe.dim()] }
    }

    fn refresh(&mut self, best: f64) -> &[f64] {
        if self.cached_for.to_bits() != best.to_bits() {
            for (m, &a) in self.m.iter_mut().zip(self.qe.weights()) {
                *m = if a == 1.0 { best } else { best.powf(a) };
            }
            self.cached_for = best;
        }
        &self.m
    }
}

#[allow(clippy::too_many_arguments)]
fn scan_outer(
    x: &MatF,
    qe: &QuasiNormF,
    bounds: &[i64],
    outer: &[usize],
    level: usize,
    inner: usize,
    best: &Best,
    v: &mut Vec<i64>,
    buffers: &mut (Vec<f64>, Vec<f64>),
    thresholds: &mut Thresholds,
) {
    if level == outer.len() {
        scan_fiber(x, qe, bounds, inner, best, v, buffers, thresholds);
        return;
    }
    let j = outer[level];
    for t in -bounds[j]..=bounds[j] {
        v[j] = t;
        scan_outer(x, qe, bounds, outer, level + 1, inner, best, v, buffers, thresholds);
    }
    v[j] = 0;
}

#[allow(clippy::too_many_arguments)]
fn scan_fiber(
    x: &MatF,
    qe: &QuasiNormF,
    bounds: &[i64],
    inner: usize,
    best: &Best,
    v: &mut Vec<i64>,
    buffers: &mut (Vec<f64>, Vec<f64>),
    thresholds: &mut Thresholds,
) {
    let e = x.rows();
    let current = best.read();
    if current == 0.0 {
        return;
    }
    let m = thresholds.refresh(current);
    let (partial, image) = (&mut buffers.0, &mut buffers.1);

    // Partial image over the outer coordinates, computed fresh per fiber so
    // no rounding drift accumulates along the walk.
    v[inner] = 0;
    x.mul_ints_into(v, partial);

    // Values of the inner coordinate that could still beat the minimum:
    // |P_i + c_i·t| < m_i for every row.
    let c = x.col(inner);
    let mut lo = -(bounds[inner] as f64);
    let mut hi = bounds[inner] as f64;
    for i in 0..e {
        if c[i] == 0.0 {
            if partial[i].abs() >= m[i] {
                return;
            }
        } else {
            let a = (-m[i] - partial[i]) / c[i];
            let b = (m[i] - partial[i]) / c[i];
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            lo = lo.max(a);
            hi = hi.min(b);
            if lo > hi {
                return;
            }
        }
    }
    let t_lo = lo.ceil() as i64;
    let t_hi = hi.floor() as i64;
    if t_lo > t_hi {
        return;
    }
    let outer_all_zero = v.iter().enumerate().all(|(j, &t)| j == inner || t == 0);
    for t in t_lo..=t_hi {
        if outer_all_zero && t == 0 {
            continue;
        }
        let tf = t as f64;
        for i in 0..e {
            image[i] = partial[i] + tf * c[i];
        }
        let value = qe.eval(image);
        if value < best.read() {
            v[inner] = t;
            best.offer(value, v);
        }
    }
    v[inner] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unweighted(d: usize) -> QuasiNormF {
        QuasiNormF::unweighted(d)
    }

    #[test]
    fn identity_block_minimum_is_one() {
        let x = MatF::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        for q in [1.0, 4.0, 100.0] {
            let r = min_image_qnorm(&x, &unweighted(2), &unweighted(2), q, Exec::Auto).unwrap();
            assert_eq!(r.value, 1.0);
        }
    }

    #[test]
    fn rational_row_reaches_exact_zero() {
        // [1, 1/2]: v = (1, -2) is in the kernel once q ≥ 2.
        let x = MatF::from_rows(vec![vec![1.0, 0.5]]);
        let r = min_image_qnorm(&x, &unweighted(2), &unweighted(1), 4.0, Exec::Auto).unwrap();
        assert!(r.exact_zero);
        assert_eq!(r.value, 0.0);
        let zero = MatF::from_rows(vec![vec![0.0, 0.0]]);
        let r = min_image_qnorm(&zero, &unweighted(2), &unweighted(1), 2.0, Exec::Auto).unwrap();
        assert!(r.exact_zero);
    }

    fn brute_force(x: &MatF, qv: &QuasiNormF, qe: &QuasiNormF, q: f64) -> f64 {
        let b = SearchBox::new(qv, q).unwrap();
        let bounds = b.bounds().to_vec();
        let d = x.cols();
        let mut best = f64::INFINITY;
        let mut v = vec![-bounds[0]; d];
        for (i, bi) in bounds.iter().enumerate() {
            v[i] = -bi;
        }
        'outer: loop {
            if v.iter().any(|&t| t != 0) {
                best = best.min(qe.eval(&x.mul_ints(&v)));
            }
            for i in 0..d {
                v[i] += 1;
                if v[i] <= bounds[i] {
                    continue 'outer;
                }
                v[i] = -bounds[i];
            }
            break;
        }
        best
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(44);
        for round in 0..60 {
            let e = rng.random_range(1..=3);
            let d = rng.random_range(1..=4);
            let x = MatF::from_rows(
                (0..e).map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect()).collect(),
            );
            let q = rng.random_range(1.0..6.0);
            let qv = unweighted(d);
            let qe = unweighted(e);
            let fast = min_image_qnorm(&x, &qv, &qe, q, Exec::Auto).unwrap();
            let brute = brute_force(&x, &qv, &qe, q);
            assert!(
                (fast.value - brute).abs() <= 1e-12 * (1.0 + brute),
                "round {round}: fast {} vs brute {brute}",
                fast.value,
            );
            let check = qe.eval(&x.mul_ints(&fast.argmin));
            assert!((check - fast.value).abs() <= 1e-12 * (1.0 + check));
            assert!(SearchBox::new(&qv, q).unwrap().contains(&fast.argmin));
        }
    }

    #[test]
    fn seeded_scan_agrees_with_unseeded() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(46);
        for _ in 0..20 {
            let x = MatF::from_rows(
                (0..2).map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect()).collect(),
            );
            let qv = unweighted(4);
            let qe = unweighted(2);
            let small = min_image_qnorm(&x, &qv, &qe, 3.0, Exec::Auto).unwrap();
            let seeded =
                min_image_qnorm_seeded(&x, &qv, &qe, 7.0, Some(&small), Exec::Auto).unwrap();
            let plain = min_image_qnorm(&x, &qv, &qe, 7.0, Exec::Auto).unwrap();
            assert_eq!(seeded.value.to_bits(), plain.value.to_bits());
        }
    }

    #[test]
    fn weighted_box_brute_force_agreement() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(45);
        let qv = QuasiNormF::new(vec![2.0, 1.0]).unwrap();
        let qe = QuasiNormF::new(vec![1.5, 1.0]).unwrap();
        for _ in 0..20 {
            let x = MatF::from_rows(
                (0..2).map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect()).collect(),
            );
            let q = rng.random_range(1.0..5.0);
            let fast = min_image_qnorm(&x, &qv, &qe, q, Exec::Auto).unwrap();
            let brute = brute_force(&x, &qv, &qe, q);
            assert!((fast.value - brute).abs() <= 1e-12 * (1.0 + brute));
        }
    }

    #[test]
    fn wedge_shape_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        // 3×6 wedge-type matrices exercise the pivot-solve path.
        for _ in 0..10 {
            let u: Vec<[f64; 3]> = (0..4)
                .map(|_| {
                    [
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    ]
                })
                .collect();
            let cross = |a: [f64; 3], b: [f64; 3]| {
                [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ]
            };
            let mut cols = Vec::new();
            for i in 0..4 {
                for j in (i + 1)..4 {
                    cols.push(cross(u[i], u[j]));
                }
            }
            let rows: Vec<Vec<f64>> =
                (0..3).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
            let x = MatF::from_rows(rows);
            let qv = unweighted(6);
            let qe = unweighted(3);
            let fast = min_image_qnorm(&x, &qv, &qe, 2.0, Exec::Auto).unwrap();
            let brute = brute_force(&x, &qv, &qe, 2.0);
            assert!(
                (fast.value - brute).abs() <= 1e-12 * (1.0 + brute),
                "fast {} vs brute {brute}",
                fast.value
            );
        }
    }

    #[test]
    fn sequential_matches_parallel() {
        let x = MatF::from_rows(vec![vec![1.0, 0.7548776662, 0.5698402911]]);
        let qv = unweighted(3);
        let qe = unweighted(1);
        for q in [13.0, 64.0, 255.0] {
            let a = min_image_qnorm(&x, &qv, &qe, q, Exec::Auto).unwrap();
            let b = min_image_qnorm(&x, &qv, &qe, q, Exec::Sequential).unwrap();
            assert_eq!(a.value.to_bits(), b.value.to_bits());
        }
    }

    #[test]
    fn monotone_non_increasing_in_q() {
        let x = MatF::from_rows(vec![vec![1.0, std::f64::consts::SQRT_2, 0.3183098861]]);
        let qv = unweighted(3);
        let qe = unweighted(1);
        let mut last = f64::INFINITY;
        for q in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0] {
            let r = min_image_qnorm(&x, &qv, &qe, q, Exec::Auto).unwrap();
            assert!(r.value <= last + 1e-15);
            last = r.value;
        }
    }

    #[test]
    fn guard_rejects_oversized_boxes() {
        // A square matrix keeps the interval scan and its d-1 dimensional
        // outer box.
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..6).map(|j| if i == j { 1.0 } else { 0.3 }).collect())
            .collect();
        let x = MatF::from_rows(rows);
        let qv = unweighted(6);
        let qe = unweighted(6);
        assert!(matches!(
            min_image_qnorm(&x, &qv, &qe, 100.0, Exec::Auto),
            Err(EmpiricalError::BoxGuard(_))
        ));
    }

    #[test]
    fn golden_ratio_minima_match_convergents() {
        // Convergents of the golden ratio are the Fibonacci ratios; the best
        // box-constrained minimum of |v0 + φ v1| must agree with the best
        // rounding over v1 inside the same box.
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let x = MatF::from_rows(vec![vec![1.0, phi]]);
        let qv = unweighted(2);
        let qe = unweighted(1);
        for q in [8.0, 21.0, 55.0, 144.0, 377.0] {
            let r = min_image_qnorm(&x, &qv, &qe, q, Exec::Auto).unwrap();
            let mut oracle = f64::INFINITY;
            let qi = q as i64;
            for v1 in 1..=qi {
                let v0 = (-phi * v1 as f64).round() as i64;
                if v0.abs() <= qi {
                    oracle = oracle.min((v0 as f64 + phi * v1 as f64).abs());
                }
            }
            assert!((r.value - oracle).abs() <= 1e-12, "q = {q}");
            // Near 1/√5 scaling of the best approximation error.
            let c = r.value * q;
            assert!(c > 0.2 && c < 1.2, "q = {q}, c = {c}");
        }
    }
}
