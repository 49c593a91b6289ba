//! Concrete rational nilpotent Lie algebras given by structure constants.
//!
//! Construction validates antisymmetry and the Jacobi identity exactly and
//! computes the lower central series; non-nilpotent tables are rejected.
//! On top of that sit the evaluation maps from the free Lie algebra, the
//! randomized computation of the laws ideal with a stabilization rule and a
//! sample certificate, the Bass–Guivarc'h growth exponent, truncated BCH
//! products, and the quasi-norm weights induced by a generating flag.

use crate::error::Error;
use crate::freelie::{self, FreeLieBasis, LieElement, LyndonWord};
use crate::qlinalg::{rat_parse, rat_string, QMatrix, Rational, Subspace};
use crate::sampler::RationalSampler;
use num::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// A finite-dimensional nilpotent Lie algebra over the rationals.
///
/// Structure constants are stored sparsely for `i < j`; the `(j, i)` values
/// are the negations. The lower central series is computed on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    names: Vec<String>,
    brackets: BTreeMap<(usize, usize), Vec<(usize, Rational)>>,
    lcs: Vec<Subspace>,
}

/// One bracket relation `[e_i, e_j] = Σ c·e_k` (0-based indices, `i < j`).
pub type BracketRelation = ((usize, usize), Vec<(usize, Rational)>);

impl LieAlgebra {
    /// Validates antisymmetry-by-construction (indices must satisfy `i < j`),
    /// the Jacobi identity on all basis triples, and nilpotency.
    pub fn new(
        name: &str,
        dim: usize,
        names: Vec<String>,
        relations: Vec<BracketRelation>,
    ) -> Result<LieAlgebra, Error> {
        if names.len() != dim {
            return Err(Error::InvalidStructure("basis label count must equal dim".into()));
        }
        let mut brackets: BTreeMap<(usize, usize), Vec<(usize, Rational)>> = BTreeMap::new();
        for ((i, j), out) in relations {
            if i >= j || j >= dim {
                return Err(Error::InvalidStructure(format!(
                    "bracket indices must satisfy i < j < dim, got ({i},{j})"
                )));
            }
            for &(k, _) in &out {
                if k >= dim {
                    return Err(Error::InvalidStructure(format!("output index {k} out of range")));
                }
            }
            let mut dense: BTreeMap<usize, Rational> = BTreeMap::new();
            for (k, c) in out {
                *dense.entry(k).or_insert_with(Rational::zero) += c;
            }
            let cleaned: Vec<_> = dense.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            if !cleaned.is_empty() {
                if brackets.insert((i, j), cleaned).is_some() {
                    return Err(Error::InvalidStructure(format!("duplicate relation for ({i},{j})")));
                }
            }
        }
        let mut g = LieAlgebra { name: name.into(), dim, names, brackets, lcs: Vec::new() };
        g.check_jacobi()?;
        g.lcs = g.compute_lcs()?;
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> &[String] {
        &self.names
    }

    /// Nilpotency step: the length of the lower central series minus one.
    pub fn step(&self) -> usize {
        self.lcs.len() - 1
    }

    /// `g = g^(1) ⊇ g^(2) ⊇ … ⊇ 0` with `g^(i+1) = [g, g^(i)]`.
    pub fn lower_central_series(&self) -> &[Subspace] {
        &self.lcs
    }

    fn check_jacobi(&self) -> Result<(), Error> {
        for a in 0..self.dim {
            for b in (a + 1)..self.dim {
                for c in (b + 1)..self.dim {
                    let ea = self.basis_vector(a);
                    let eb = self.basis_vector(b);
                    let ec = self.basis_vector(c);
                    let mut sum = self.bracket(&self.bracket(&ea, &eb), &ec);
                    add_into(&mut sum, &self.bracket(&self.bracket(&eb, &ec), &ea));
                    add_into(&mut sum, &self.bracket(&self.bracket(&ec, &ea), &eb));
                    if sum.iter().any(|v| !v.is_zero()) {
                        return Err(Error::InvalidStructure(format!(
                            "Jacobi identity fails on basis triple ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim];
        v[i] = Rational::one();
        v
    }

    /// Bracket of basis elements as a sparse coefficient list.
    fn bracket_basis(&self, i: usize, j: usize) -> Vec<(usize, Rational)> {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => Vec::new(),
            Ordering::Less => self.brackets.get(&(i, j)).cloned().unwrap_or_default(),
            Ordering::Greater => self
                .brackets
                .get(&(j, i))
                .map(|out| out.iter().map(|(k, c)| (*k, -c.clone())).collect())
                .unwrap_or_default(),
        }
    }

    /// Bracket of two coordinate vectors, exact.
    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut out = vec![Rational::zero(); self.dim];
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if y[j].is_zero() {
                    continue;
                }
                for (k, c) in self.bracket_basis(i, j) {
                    out[k] += &x[i] * &y[j] * c;
                }
            }
        }
        out
    }

    fn compute_lcs(&self) -> Result<Vec<Subspace>, Error> {
        let mut series = vec![Subspace::full(self.dim)];
        loop {
            let current = series.last().unwrap();
            if current.is_zero() {
                break;
            }
            let mut rows = Vec::new();
            for a in 0..self.dim {
                for r in 0..current.dim() {
                    let v = self.bracket(&self.basis_vector(a), current.basis().row(r));
                    if v.iter().any(|x| !x.is_zero()) {
                        rows.push(v);
                    }
                }
            }
            let next = Subspace::from_rows(self.dim, rows);
            if next.dim() == current.dim() {
                return Err(Error::NotNilpotent);
            }
            series.push(next);
        }
        Ok(series)
    }

    /// Evaluate a bracketed Lyndon word at a tuple of vectors, through its
    /// standard factorization. Words deeper than the nilpotency step vanish
    /// automatically.
    pub fn evaluate_word(&self, w: &LyndonWord, tuple: &[Vec<Rational>]) -> Vec<Rational> {
        match w.standard_factorization() {
            None => tuple[(w.letters()[0] - 1) as usize].clone(),
            Some((u, v)) => {
                self.bracket(&self.evaluate_word(&u, tuple), &self.evaluate_word(&v, tuple))
            }
        }
    }

    /// The evaluation map `r ↦ r(X_1, …, X_k)`.
    pub fn evaluate(&self, elem: &LieElement, tuple: &[Vec<Rational>]) -> Result<Vec<Rational>, Error> {
        if tuple.len() != elem.k() {
            return Err(Error::DimensionMismatch {
                expected: elem.k(),
                found: tuple.len(),
                context: "evaluate tuple length",
            });
        }
        for v in tuple {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: v.len(),
                    context: "evaluate tuple vector",
                });
            }
        }
        let mut acc = vec![Rational::zero(); self.dim];
        for (w, c) in elem.terms() {
            let v = self.evaluate_word(w, tuple);
            for (a, x) in acc.iter_mut().zip(v) {
                *a += c * x;
            }
        }
        Ok(acc)
    }

    /// Evaluations of every basis word at one tuple, computed bottom-up:
    /// both standard-factorization children of a Lyndon word are earlier
    /// basis words, so each column is one bracket of two known columns.
    pub fn eval_columns(
        &self,
        basis: &FreeLieBasis,
        tuple: &[Vec<Rational>],
    ) -> Result<Vec<Vec<Rational>>, Error> {
        if tuple.len() != basis.k() as usize {
            return Err(Error::DimensionMismatch {
                expected: basis.k() as usize,
                found: tuple.len(),
                context: "eval_columns tuple length",
            });
        }
        for v in tuple {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: v.len(),
                    context: "eval_columns tuple vector",
                });
            }
        }
        let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(basis.dim());
        for w in basis.words() {
            let col = match w.standard_factorization() {
                None => tuple[(w.letters()[0] - 1) as usize].clone(),
                Some((u, v)) => {
                    let iu = basis.index_of(&u).expect("left factor is a basis word");
                    let iv = basis.index_of(&v).expect("right factor is a basis word");
                    self.bracket(&cols[iu], &cols[iv])
                }
            };
            cols.push(col);
        }
        Ok(cols)
    }

    /// Matrix of the evaluation map `F_{k,s} → g` at one tuple, in the
    /// Lyndon basis: one column per basis word.
    pub fn eval_matrix(
        &self,
        basis: &FreeLieBasis,
        tuple: &[Vec<Rational>],
    ) -> Result<QMatrix, Error> {
        let cols = self.eval_columns(basis, tuple)?;
        let mut m = QMatrix::zero(self.dim, basis.dim());
        for (col, v) in cols.into_iter().enumerate() {
            for (row, x) in v.into_iter().enumerate() {
                if !x.is_zero() {
                    m.set(row, col, x);
                }
            }
        }
        Ok(m)
    }

    /// `log(exp x · exp y)` in coordinates, by the truncated BCH series of
    /// the algebra's own step. Exact for rational inputs; step ≤ 6.
    pub fn bch_product(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>, Error> {
        let series = freelie::bch_series(self.step().max(1))?;
        self.evaluate(&series, &[x.to_vec(), y.to_vec()])
    }

    /// Quasi-norm weights induced by a generating subspace: the flag
    /// `V^{i+1} = V^i + [V^1, V^i]` and, per basis direction, the smallest
    /// `i` with the direction inside `V^i`.
    pub fn metric_weights(&self, v1: &Subspace) -> Result<MetricWeights, Error> {
        if v1.ambient_dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v1.ambient_dim(),
                context: "metric_weights generating space",
            });
        }
        let mut flag = vec![v1.clone()];
        loop {
            let current = flag.last().unwrap();
            if current.dim() == self.dim {
                break;
            }
            let mut rows = current.basis_rows();
            for a in 0..v1.dim() {
                for b in 0..current.dim() {
                    rows.push(self.bracket(v1.basis().row(a), current.basis().row(b)));
                }
            }
            let next = Subspace::from_rows(self.dim, rows);
            if next.dim() == current.dim() {
                return Err(Error::DoesNotGenerate);
            }
            flag.push(next);
        }
        let weights = (0..self.dim)
            .map(|j| {
                let e = self.basis_vector(j);
                1 + flag.iter().position(|v| v.contains_vector(&e)).unwrap_or(flag.len() - 1)
            })
            .collect();
        Ok(MetricWeights { flag, weights })
    }

    /// The Riemannian metric: trivial flag, all weights 1.
    pub fn riemannian_weights(&self) -> MetricWeights {
        MetricWeights { flag: vec![Subspace::full(self.dim)], weights: vec![1; self.dim] }
    }

    /// JSON form per the external interface; `metric` is carried separately.
    pub fn to_json(&self, metric: &MetricSpec) -> Value {
        let brackets: Vec<Value> = self
            .brackets
            .iter()
            .map(|((i, j), out)| {
                json!({
                    "i": i + 1,
                    "j": j + 1,
                    "out": out.iter().map(|(k, c)| json!({"k": k + 1, "c": rat_string(c)})).collect::<Vec<_>>(),
                })
            })
            .collect();
        let metric_json = match metric {
            MetricSpec::Riemannian => json!({"riemannian": true}),
            MetricSpec::GeneratedBy(ix) => {
                json!({"v1": ix.iter().map(|i| i + 1).collect::<Vec<_>>()})
            }
        };
        json!({
            "name": self.name,
            "dim": self.dim,
            "basis": self.names,
            "brackets": brackets,
            "metric": metric_json,
        })
    }

    pub fn from_json(v: &Value) -> Result<(LieAlgebra, MetricSpec), Error> {
        let name = v["name"].as_str().unwrap_or("unnamed");
        let dim = v["dim"].as_u64().ok_or_else(|| Error::Parse("missing dim".into()))? as usize;
        let names = match v["basis"].as_array() {
            Some(arr) => arr
                .iter()
                .map(|x| x.as_str().map(String::from).ok_or_else(|| Error::Parse("bad basis label".into())))
                .collect::<Result<Vec<_>, _>>()?,
            None => (1..=dim).map(|i| format!("e{i}")).collect(),
        };
        let mut relations = Vec::new();
        for b in v["brackets"].as_array().ok_or_else(|| Error::Parse("missing brackets".into()))? {
            let i = b["i"].as_u64().ok_or_else(|| Error::Parse("bracket missing i".into()))? as usize;
            let j = b["j"].as_u64().ok_or_else(|| Error::Parse("bracket missing j".into()))? as usize;
            if i == 0 || j == 0 {
                return Err(Error::Parse("bracket indices are 1-based".into()));
            }
            let mut out = Vec::new();
            for t in b["out"].as_array().ok_or_else(|| Error::Parse("bracket missing out".into()))? {
                let k = t["k"].as_u64().ok_or_else(|| Error::Parse("out missing k".into()))? as usize;
                if k == 0 {
                    return Err(Error::Parse("output indices are 1-based".into()));
                }
                out.push((k - 1, rat_parse(t["c"].as_str().ok_or_else(|| Error::Parse("out missing c".into()))?)?));
            }
            relations.push(((i - 1, j - 1), out));
        }
        let g = LieAlgebra::new(name, dim, names, relations)?;
        let metric = if v["metric"]["riemannian"].as_bool() == Some(true) {
            MetricSpec::Riemannian
        } else if let Some(ix) = v["metric"]["v1"].as_array() {
            let ix = ix
                .iter()
                .map(|x| {
                    x.as_u64()
                        .filter(|&n| n >= 1)
                        .map(|n| n as usize - 1)
                        .ok_or_else(|| Error::Parse("bad v1 index".into()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            MetricSpec::GeneratedBy(ix)
        } else {
            MetricSpec::Riemannian
        };
        Ok((g, metric))
    }
}

fn add_into(acc: &mut [Rational], v: &[Rational]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x;
    }
}

/// How the left-invariant geodesic metric is specified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricSpec {
    Riemannian,
    /// Carnot–Carathéodory metric generated by the span of these basis
    /// directions (0-based).
    GeneratedBy(Vec<usize>),
}

/// Weighted flag induced by a geodesic metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricWeights {
    /// Increasing flag `V^1 ⊆ V^2 ⊆ … ⊆ V^s = g`.
    pub flag: Vec<Subspace>,
    /// Per basis direction, the smallest layer containing it.
    pub weights: Vec<usize>,
}

/// The relatively free Lie algebra data of `g` on `k` letters at step `s`:
/// the stabilized laws ideal, the quotient dimensions per degree, and the
/// tuples used, kept as a certificate.
#[derive(Debug, Clone)]
pub struct RelativelyFree {
    pub k: usize,
    pub s: usize,
    /// Subspace of `F_{k,s}` in the Lyndon coordinate order.
    pub laws: Subspace,
    /// `dim F^{[i]}_{k,g}` for `i = 1..=s`.
    pub quotient_dims: Vec<usize>,
    /// Sampled tuples; each is `k` coordinate vectors in `g`.
    pub sample_log: Vec<Vec<Vec<Rational>>>,
    /// Set when the stabilized kernel has entries of unusually large height,
    /// the symptom of a laws ideal that is not defined over the rationals.
    pub irrational_flag: bool,
}

/// Height threshold above which a stabilized kernel is flagged as a
/// possible symptom of irrational laws. Random integer tuples of height 10
/// produce kernels of tiny height in every rational case exercised here.
const IRRATIONAL_HEIGHT_LIMIT: u64 = 1_000_000;

/// Randomized computation of the ideal of rational laws of `g` on `k`
/// letters in degrees ≤ `s`.
///
/// The laws ideal is graded, so each degree slice is the intersection of
/// the kernels of the degree-`i` blocks of the evaluation matrix over
/// generic tuples. Constraint rows accumulate per degree; rank growth is
/// tracked modulo a large prime (which can only under-count, keeping the
/// result an over-approximation of the laws, the direction the contract
/// documents), and sampling stops when three consecutive fresh tuples
/// leave every slice unchanged. A slice whose residual rank saturates has
/// exactly zero kernel; otherwise the kernel is computed exactly over the
/// rationals from the independent constraint rows. The sampled tuples are
/// returned as the certificate.
pub fn laws_ideal(
    g: &LieAlgebra,
    k: usize,
    s: usize,
    sampler: &mut RationalSampler,
) -> Result<RelativelyFree, Error> {
    let basis = freelie::lyndon_basis(k, s);
    let ranges: Vec<_> = (1..=s).map(|i| basis.degree_range(i)).collect();
    let mut trackers: Vec<crate::qlinalg::ModRankAccumulator> =
        ranges.iter().map(|r| crate::qlinalg::ModRankAccumulator::new(r.len())).collect();
    let mut kept_rows: Vec<Vec<Vec<Rational>>> = vec![Vec::new(); ranges.len()];
    let mut sample_log = Vec::new();
    let mut stable = 0;
    // Enough samples to cut every slice to zero plus the stability margin;
    // generous upper bound so a degenerate stream cannot loop forever.
    let max_samples = 10 + 3 * basis.dim();
    while stable < 3 && sample_log.len() < max_samples {
        let tuple = sampler.sample_tuple(k, g.dim());
        let columns = g.eval_columns(&basis, &tuple)?;
        let mut changed = false;
        for ((tracker, kept), range) in trackers.iter_mut().zip(&mut kept_rows).zip(&ranges) {
            // A saturated slice has kernel zero already; nothing to add.
            if tracker.rank() == range.len() {
                continue;
            }
            for row in 0..g.dim() {
                let slice: Vec<Rational> =
                    range.clone().map(|c| columns[c][row].clone()).collect();
                if tracker.add_rational_row(&slice) {
                    kept.push(slice);
                    changed = true;
                }
            }
        }
        sample_log.push(tuple);
        stable = if changed { 0 } else { stable + 1 };
    }

    // Per-degree kernels, embedded back into the full coordinate order.
    let mut rows = Vec::new();
    let mut quotient_dims = Vec::new();
    for ((tracker, kept), range) in trackers.iter().zip(&kept_rows).zip(&ranges) {
        let kernel = if tracker.rank() == range.len() {
            Subspace::zero(range.len())
        } else if kept.is_empty() {
            Subspace::full(range.len())
        } else {
            QMatrix::from_rows(kept.clone()).kernel()
        };
        quotient_dims.push(range.len() - kernel.dim());
        for r in 0..kernel.dim() {
            let mut full = vec![Rational::zero(); basis.dim()];
            for (offset, c) in range.clone().enumerate() {
                full[c] = kernel.basis().get(r, offset).clone();
            }
            rows.push(full);
        }
    }
    let laws = Subspace::from_rows(basis.dim(), rows);
    let irrational_flag = laws
        .basis_rows()
        .iter()
        .flatten()
        .any(|c| c.numer().magnitude().bits() > 64 || c.denom().magnitude().bits() > 64)
        || laws.basis_rows().iter().flatten().any(|c| {
            c.denom().clone().try_into().map(|d: u64| d > IRRATIONAL_HEIGHT_LIMIT).unwrap_or(true)
        });
    Ok(RelativelyFree { k, s, laws, quotient_dims, sample_log, irrational_flag })
}

/// Bass–Guivarc'h homogeneous dimension `Σ i · dim F^{[i]}_{k,g}`.
pub fn growth_exponent(rf: &RelativelyFree) -> u64 {
    rf.quotient_dims.iter().enumerate().map(|(i, &d)| (i as u64 + 1) * d as u64).sum()
}

// -- built-in algebras ------------------------------------------------------

/// The 3-dimensional Heisenberg algebra: `[e1, e2] = e3`.
pub fn heisenberg() -> LieAlgebra {
    LieAlgebra::new(
        "heisenberg",
        3,
        vec!["e1".into(), "e2".into(), "e3".into()],
        vec![((0, 1), vec![(2, Rational::one())])],
    )
    .expect("Heisenberg table is valid")
}

/// Strictly upper triangular `(s+1)×(s+1)` matrices. The basis is the
/// matrix units `E_{a,b}` ordered by superdiagonal depth `b - a`, then by
/// row, so the first `s` directions are the superdiagonal generators.
pub fn unipotent(s: usize) -> LieAlgebra {
    assert!(s >= 1);
    let mut units = Vec::new();
    for gap in 1..=s {
        for a in 1..=(s + 1 - gap) {
            units.push((a, a + gap));
        }
    }
    let index: BTreeMap<(usize, usize), usize> =
        units.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let names = units.iter().map(|(a, b)| format!("E{a}{b}")).collect();
    let mut relations = Vec::new();
    for i in 0..units.len() {
        for j in (i + 1)..units.len() {
            let (a, b) = units[i];
            let (c, d) = units[j];
            let mut out: Vec<(usize, Rational)> = Vec::new();
            if b == c {
                out.push((index[&(a, d)], Rational::one()));
            }
            if d == a {
                out.push((index[&(c, b)], -Rational::one()));
            }
            if !out.is_empty() {
                relations.push(((i, j), out));
            }
        }
    }
    LieAlgebra::new(&format!("u({s})"), units.len(), names, relations)
        .expect("unipotent table is valid")
}

/// The free step-`s` nilpotent algebra on `d` generators, realized through
/// its own Lyndon structure constants.
pub fn free_nilpotent(d: usize, s: usize) -> LieAlgebra {
    let basis = freelie::lyndon_basis(d, s);
    let names = basis.words().iter().map(|w| w.to_string()).collect();
    let mut relations = Vec::new();
    for i in 0..basis.dim() {
        for j in (i + 1)..basis.dim() {
            let a = LieElement::from_terms(d, s, vec![(basis.word(i).clone(), Rational::one())])
                .unwrap();
            let b = LieElement::from_terms(d, s, vec![(basis.word(j).clone(), Rational::one())])
                .unwrap();
            let prod = a.bracket(&b).unwrap();
            let out: Vec<(usize, Rational)> = prod
                .terms()
                .map(|(w, c)| (basis.index_of(w).unwrap(), c.clone()))
                .collect();
            if !out.is_empty() {
                relations.push(((i, j), out));
            }
        }
    }
    LieAlgebra::new(&format!("free({d},{s})"), basis.dim(), names, relations)
        .expect("free nilpotent table is valid")
}

/// The abelian algebra of the given dimension.
pub fn abelian(d: usize) -> LieAlgebra {
    LieAlgebra::new(&format!("abelian({d})"), d, (1..=d).map(|i| format!("e{i}")).collect(), vec![])
        .expect("abelian table is valid")
}

/// Parse a built-in constructor name: `heisenberg`, `u(s)`, `free(d,s)`,
/// `abelian(d)`.
pub fn builtin(name: &str) -> Result<LieAlgebra, Error> {
    let name = name.trim();
    if name == "heisenberg" {
        return Ok(heisenberg());
    }
    let parse_args = |inner: &str| -> Result<Vec<usize>, Error> {
        inner
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad argument {t:?}: {e}"))))
            .collect()
    };
    if let Some(inner) = name.strip_prefix("u(").and_then(|r| r.strip_suffix(')')) {
        let args = parse_args(inner)?;
        if args.len() == 1 && args[0] >= 1 {
            return Ok(unipotent(args[0]));
        }
    }
    if let Some(inner) = name.strip_prefix("free(").and_then(|r| r.strip_suffix(')')) {
        let args = parse_args(inner)?;
        if args.len() == 2 && args[0] >= 1 && args[1] >= 1 {
            return Ok(free_nilpotent(args[0], args[1]));
        }
    }
    if let Some(inner) = name.strip_prefix("abelian(").and_then(|r| r.strip_suffix(')')) {
        let args = parse_args(inner)?;
        if args.len() == 1 && args[0] >= 1 {
            return Ok(abelian(args[0]));
        }
    }
    Err(Error::Parse(format!("unknown built-in algebra {name:?}")))
}
