//! Floating-point quasi-norms, matrices, and the weighted enumeration box.

use crate::error::EmpiricalError;
use dioph_core::pencil::QuasiNorm;
use num::ToPrimitive;

/// Weighted sup quasi-norm `|v| = max |v_i|^{1/α_i}` with f64 weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiNormF {
    weights: Vec<f64>,
}

impl QuasiNormF {
    pub fn new(weights: Vec<f64>) -> Result<QuasiNormF, EmpiricalError> {
        if weights.is_empty() || weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(EmpiricalError::DegenerateInput("weights must be positive and finite".into()));
        }
        Ok(QuasiNormF { weights })
    }

    pub fn unweighted(dim: usize) -> QuasiNormF {
        QuasiNormF { weights: vec![1.0; dim] }
    }

    pub fn from_exact(q: &QuasiNorm) -> QuasiNormF {
        QuasiNormF {
            weights: q.weights().iter().map(|w| w.to_f64().expect("finite weight")).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// `max |v_i|^{1/α_i}`.
    pub fn eval(&self, v: &[f64]) -> f64 {
        assert_eq!(v.len(), self.weights.len());
        let mut m: f64 = 0.0;
        for (x, &a) in v.iter().zip(&self.weights) {
            let t = if a == 1.0 { x.abs() } else { x.abs().powf(1.0 / a) };
            m = m.max(t);
        }
        m
    }

    pub fn eval_ints(&self, v: &[i64]) -> f64 {
        let vf: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        self.eval(&vf)
    }
}

/// Dense matrix stored by columns (enumeration walks columns).
#[derive(Debug, Clone, PartialEq)]
pub struct MatF {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<f64>>,
}

impl MatF {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> MatF {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let columns = (0..c).map(|j| rows.iter().map(|row| row[j]).collect()).collect();
        MatF { rows: r, cols: c, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self.columns[j][i]).collect()
    }

    pub fn mul_ints(&self, v: &[i64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_ints_into(v, &mut out);
        out
    }

    pub fn mul_ints_into(&self, v: &[i64], out: &mut [f64]) {
        assert_eq!(v.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        out.fill(0.0);
        for (j, &x) in v.iter().enumerate() {
            if x != 0 {
                let xf = x as f64;
                for (o, c) in out.iter_mut().zip(&self.columns[j]) {
                    *o += xf * c;
                }
            }
        }
    }
}

/// Integer box `{v : |v| ≤ Q}` for a weighted quasi-norm: per-coordinate
/// bounds `⌊Q^{α_i}⌋`, nudged so exact integer powers land inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBox {
    bounds: Vec<i64>,
}

impl SearchBox {
    pub fn new(qv: &QuasiNormF, q: f64) -> Result<SearchBox, EmpiricalError> {
        if !(q >= 1.0) {
            return Err(EmpiricalError::BadSchedule(format!("radius must be ≥ 1, got {q}")));
        }
        let bounds = qv
            .weights()
            .iter()
            .map(|&a| {
                let raw = q.powf(a);
                (raw * (1.0 + 1e-12) + 1e-9).floor() as i64
            })
            .collect();
        Ok(SearchBox { bounds })
    }

    pub fn bounds(&self) -> &[i64] {
        &self.bounds
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.iter().zip(&self.bounds) .all(|(x, b)| x.abs() <= *b)
    }

    /// Number of lattice points in the box.
    pub fn point_count(&self) -> f64 {
        self.bounds.iter().map(|&b| 2.0 * b as f64 + 1.0).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_matches_direct_filter_exhaustively() {
        // Direct filtering of a cube by |v| ≤ Q must equal the box test,
        // with membership decided by exact integer power comparison:
        // |v_i|^{1/(p/r)} ≤ Q  ⟺  |v_i|^r ≤ Q^p.
        let weight_sets: &[&[(i64, i64)]] = &[
            &[(1, 1), (1, 1)],
            &[(2, 1), (1, 1)],
            &[(3, 2), (1, 1), (1, 2)],
            &[(2, 1), (2, 1), (1, 1), (1, 1)],
        ];
        for ws in weight_sets {
            let qf = QuasiNormF::new(ws.iter().map(|&(p, r)| p as f64 / r as f64).collect()).unwrap();
            for q in 1..=20i64 {
                let sb = SearchBox::new(&qf, q as f64).unwrap();
                for (j, &(p, r)) in ws.iter().enumerate() {
                    // Exact bound: the largest n ≥ 0 with n^r ≤ q^p.
                    let mut n = 0i64;
                    while (n + 1).checked_pow(r as u32).map(|lhs| {
                        lhs as i128 <= (q as i128).pow(p as u32)
                    }) == Some(true)
                    {
                        n += 1;
                    }
                    assert_eq!(sb.bounds()[j], n, "weights {ws:?}, q = {q}, coord {j}");
                }
            }
        }
    }

    #[test]
    fn quasi_norm_eval() {
        let q = QuasiNormF::new(vec![2.0, 1.0]).unwrap();
        assert!((q.eval(&[4.0, 3.0]) - 3.0).abs() < 1e-12);
        assert!((q.eval(&[9.0, 1.0]) - 3.0).abs() < 1e-12);
        assert_eq!(QuasiNormF::unweighted(3).eval(&[0.0, 0.0, 0.0]), 0.0);
        assert!(QuasiNormF::new(vec![0.0]).is_err());
    }

    #[test]
    fn search_box_rejects_small_radius() {
        let q = QuasiNormF::unweighted(2);
        assert!(SearchBox::new(&q, 0.5).is_err());
    }
}
