//! Weighted volume functions, pencils, and the ratio maximum τ.
//!
//! A quasi-norm on a space with ordered basis and non-increasing positive
//! weights α determines the volume exponents ψ (growth of large balls
//! inside a subspace, through the ascending coordinate flag) and φ (decay
//! of small balls, through the descending flag). A pencil `P_{W,a,b}` is
//! the set of linear maps `x` with `ψ(ker x ∩ W) ≥ a` and `φ(xW) ≤ b`;
//! the almost-sure diophantine exponent of a rationally-defined manifold
//! is the maximum of `a/b` over pencils containing it, which is computed
//! here as `max ψ_M(W)/φ_M(W)` over a finite candidate family, with
//! ψ_M / φ_M evaluated at stabilized generic rational samples.
//!
//! Coordinate conventions, normative for all serialized data: source bases
//! are ordered by non-increasing weight (for relatively free Lie algebras,
//! highest bracket degree first), and target bases are ordered so that the
//! descending flag exhausts the deepest central layers last.

use crate::error::Error;
use crate::liealg::{self, LieAlgebra, MetricSpec};
use crate::qlinalg::{rat_parse, rat_string, QMatrix, Rational, RrefAccumulator, Subspace};
use crate::sampler::RationalSampler;
use num::{One, Zero};
use serde_json::{json, Value};

/// Which side of `Hom(V, E)` a quasi-norm lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

/// A weighted sup quasi-norm `|v| = max |v_i|^{1/α_i}` with
/// `α_1 ≥ … ≥ α_d > 0`, together with the side it applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiNorm {
    side: Side,
    weights: Vec<Rational>,
}

impl QuasiNorm {
    pub fn new(side: Side, weights: Vec<Rational>) -> Result<QuasiNorm, Error> {
        if weights.is_empty() {
            return Err(Error::Precondition("quasi-norm needs at least one weight".into()));
        }
        if weights.iter().any(|w| *w <= Rational::zero()) {
            return Err(Error::Precondition("quasi-norm weights must be positive".into()));
        }
        if weights.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition("quasi-norm weights must be non-increasing".into()));
        }
        Ok(QuasiNorm { side, weights })
    }

    pub fn unweighted(side: Side, dim: usize) -> QuasiNorm {
        QuasiNorm { side, weights: vec![Rational::one(); dim] }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// `Σ α_i`, the exponent of the whole space.
    pub fn total(&self) -> Rational {
        self.weights.iter().sum()
    }

    fn check(&self, w: &Subspace, side: Side, context: &'static str) -> Result<(), Error> {
        if self.side != side {
            return Err(Error::Precondition(format!("{context}: quasi-norm is on the wrong side")));
        }
        if w.ambient_dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: w.ambient_dim(),
                context,
            });
        }
        Ok(())
    }
}

/// Ball-growth exponent of a subspace: `ψ(W) = Σ_{i ∈ I(W)} α_i` where
/// `I(W)` collects the indices where the ascending coordinate flag gains a
/// dimension inside `W`. Computed from the right-echelon profile of `W`.
pub fn psi(w: &Subspace, q: &QuasiNorm) -> Result<Rational, Error> {
    q.check(w, Side::Source, "psi")?;
    Ok(w.trailing_profile().iter().map(|&l| q.weights[l].clone()).sum())
}

/// Small-ball exponent of a subspace of the target: `φ(F) = Σ_{i ∈ J(F)} α'_i`
/// where `J(F)` collects the indices where the descending coordinate flag
/// loses a dimension inside `F`. Computed from the echelon pivots of `F`.
pub fn phi(f: &Subspace, q: &QuasiNorm) -> Result<Rational, Error> {
    q.check(f, Side::Target, "phi")?;
    Ok(f.leading_profile().iter().map(|&p| q.weights[p].clone()).sum())
}

/// Multivariate polynomial with rational coefficients, stored as a sorted
/// list of (coefficient, exponent vector) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    n_params: usize,
    terms: Vec<(Rational, Vec<u32>)>,
}

impl Poly {
    pub fn zero(n_params: usize) -> Poly {
        Poly { n_params, terms: Vec::new() }
    }

    pub fn constant(n_params: usize, c: Rational) -> Poly {
        let mut p = Poly::zero(n_params);
        if !c.is_zero() {
            p.terms.push((c, vec![0; n_params]));
        }
        p
    }

    pub fn var(n_params: usize, i: usize) -> Poly {
        assert!(i < n_params);
        let mut e = vec![0; n_params];
        e[i] = 1;
        Poly { n_params, terms: vec![(Rational::one(), e)] }
    }

    pub fn from_terms(n_params: usize, terms: Vec<(Rational, Vec<u32>)>) -> Result<Poly, Error> {
        for (_, e) in &terms {
            if e.len() != n_params {
                return Err(Error::Parse("exponent vector length mismatch".into()));
            }
        }
        let mut p = Poly::zero(n_params);
        for (c, e) in terms {
            p.add_term(c, e);
        }
        Ok(p)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Rational, Vec<u32>)] {
        &self.terms
    }

    fn add_term(&mut self, c: Rational, e: Vec<u32>) {
        if c.is_zero() {
            return;
        }
        match self.terms.binary_search_by(|(_, te)| te.cmp(&e)) {
            Ok(i) => {
                self.terms[i].0 += c;
                if self.terms[i].0.is_zero() {
                    self.terms.remove(i);
                }
            }
            Err(i) => self.terms.insert(i, (c, e)),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (c, e) in &other.terms {
            out.add_term(c.clone(), e.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n_params);
        }
        Poly { n_params: self.n_params, terms: self.terms.iter().map(|(v, e)| (v * c, e.clone())).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.n_params);
        for (ca, ea) in &self.terms {
            for (cb, eb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(ca * cb, e);
            }
        }
        out
    }

    pub fn eval(&self, params: &[Rational]) -> Rational {
        assert_eq!(params.len(), self.n_params);
        let mut acc = Rational::zero();
        for (c, e) in &self.terms {
            let mut t = c.clone();
            for (p, &k) in params.iter().zip(e) {
                for _ in 0..k {
                    t *= p;
                }
            }
            acc += t;
        }
        acc
    }

    fn to_json(&self) -> Value {
        json!({
            "terms": self.terms.iter().map(|(c, e)| json!({
                "coeff": rat_string(c),
                "powers": e,
            })).collect::<Vec<_>>(),
        })
    }

    fn from_json(v: &Value, n_params: usize) -> Result<Poly, Error> {
        let mut terms = Vec::new();
        for t in v["terms"].as_array().ok_or_else(|| Error::Parse("poly without terms".into()))? {
            let c = rat_parse(t["coeff"].as_str().ok_or_else(|| Error::Parse("term without coeff".into()))?)?;
            let e = t["powers"]
                .as_array()
                .ok_or_else(|| Error::Parse("term without powers".into()))?
                .iter()
                .map(|x| x.as_u64().map(|n| n as u32).ok_or_else(|| Error::Parse("bad power".into())))
                .collect::<Result<Vec<_>, _>>()?;
            terms.push((c, e));
        }
        Poly::from_terms(n_params, terms)
    }
}

/// Polynomial family of linear maps `V → E`: a `dim_e × dim_v` matrix of
/// polynomials in the parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    n_params: usize,
    dim_v: usize,
    dim_e: usize,
    entries: Vec<Poly>,
}

impl PolyMap {
    pub fn new(n_params: usize, dim_v: usize, dim_e: usize, entries: Vec<Poly>) -> Result<PolyMap, Error> {
        if entries.len() != dim_v * dim_e {
            return Err(Error::Parse("entry count must be dim_e × dim_v".into()));
        }
        Ok(PolyMap { n_params, dim_v, dim_e, entries })
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn entry(&self, row: usize, col: usize) -> &Poly {
        &self.entries[row * self.dim_v + col]
    }

    /// The matrix of the family member at one parameter point.
    pub fn eval(&self, params: &[Rational]) -> QMatrix {
        let mut m = QMatrix::zero(self.dim_e, self.dim_v);
        for r in 0..self.dim_e {
            for c in 0..self.dim_v {
                let v = self.entry(r, c).eval(params);
                if !v.is_zero() {
                    m.set(r, c, v);
                }
            }
        }
        m
    }
}

/// A pencil `P_{W,a,b}`: linear maps with `ψ(ker x ∩ W) ≥ a` and
/// `φ(xW) ≤ b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pencil {
    pub w: Subspace,
    pub a: Rational,
    pub b: Rational,
}

impl Pencil {
    pub fn new(w: Subspace, a: Rational, b: Rational, qv: &QuasiNorm) -> Result<Pencil, Error> {
        if a < Rational::zero() || b < Rational::zero() {
            return Err(Error::Precondition("pencil thresholds must be non-negative".into()));
        }
        if a > psi(&w, qv)? {
            return Err(Error::Precondition("pencil requires a ≤ ψ(W)".into()));
        }
        Ok(Pencil { w, a, b })
    }
}

/// How many samples are drawn before the stabilization run begins.
const INITIAL_SAMPLES: usize = 5;
/// Consecutive non-improving fresh samples required to accept a value.
const STABLE_RUN: usize = 3;

/// A stabilized generic value plus the parameter points that produced it.
#[derive(Debug, Clone)]
pub struct SampledValue {
    pub value: Rational,
    pub samples: Vec<Vec<Rational>>,
}

/// `ψ_M(W) = min_x ψ(W ∩ ker Φ(x))` over stabilized generic samples.
/// One-sided: a non-generic run can only over-estimate the true value.
pub fn psi_m(
    w: &Subspace,
    map: &PolyMap,
    qv: &QuasiNorm,
    sampler: &mut RationalSampler,
) -> Result<SampledValue, Error> {
    qv.check(w, Side::Source, "psi_m")?;
    if w.is_zero() {
        return Ok(SampledValue { value: Rational::zero(), samples: Vec::new() });
    }
    stabilized_extremum(map, sampler, true, |x| {
        let ker = x.kernel();
        psi(&w.intersect(&ker)?, qv)
    })
}

/// `φ_M(W) = max_x φ(Φ(x)·W)` over stabilized generic samples.
/// One-sided: a non-generic run can only under-estimate the true value.
pub fn phi_m(
    w: &Subspace,
    map: &PolyMap,
    qe: &QuasiNorm,
    sampler: &mut RationalSampler,
) -> Result<SampledValue, Error> {
    if w.ambient_dim() != map.dim_v() {
        return Err(Error::DimensionMismatch {
            expected: map.dim_v(),
            found: w.ambient_dim(),
            context: "phi_m",
        });
    }
    if w.is_zero() {
        return Ok(SampledValue { value: Rational::zero(), samples: Vec::new() });
    }
    stabilized_extremum(map, sampler, false, |x| phi(&image(w, x), qe))
}

/// Image `x·W` as a subspace of the target.
pub fn image(w: &Subspace, x: &QMatrix) -> Subspace {
    let rows = (0..w.dim()).map(|r| x.mul_vec(w.basis().row(r))).collect();
    Subspace::from_rows(x.rows(), rows)
}

fn stabilized_extremum(
    map: &PolyMap,
    sampler: &mut RationalSampler,
    minimize: bool,
    mut value_at: impl FnMut(&QMatrix) -> Result<Rational, Error>,
) -> Result<SampledValue, Error> {
    let mut samples = Vec::new();
    let mut best: Option<Rational> = None;
    let mut stable = 0;
    while samples.len() < INITIAL_SAMPLES || stable < STABLE_RUN {
        let params = sampler.sample_vec(map.n_params());
        let x = map.eval(&params);
        let v = value_at(&x)?;
        samples.push(params);
        let improved = match &best {
            None => true,
            Some(b) => {
                if minimize {
                    v < *b
                } else {
                    v > *b
                }
            }
        };
        if improved {
            best = Some(v);
            stable = 0;
        } else {
            stable += 1;
        }
    }
    Ok(SampledValue { value: best.expect("at least one sample drawn"), samples })
}

/// Certificate returned by [`pencil_contains`].
#[derive(Debug, Clone)]
pub struct PencilCertificate {
    pub contains: bool,
    pub psi_m: Rational,
    pub phi_m: Rational,
    pub samples: Vec<Vec<Rational>>,
}

/// Whether the whole family lies in the pencil: `ψ_M(W) ≥ a` and
/// `φ_M(W) ≤ b` at the stabilized generic samples.
pub fn pencil_contains(
    map: &PolyMap,
    p: &Pencil,
    qv: &QuasiNorm,
    qe: &QuasiNorm,
    sampler: &mut RationalSampler,
) -> Result<PencilCertificate, Error> {
    let a = psi_m(&p.w, map, qv, sampler)?;
    let b = phi_m(&p.w, map, qe, sampler)?;
    let contains = a.value >= p.a && b.value <= p.b;
    let mut samples = a.samples;
    samples.extend(b.samples);
    Ok(PencilCertificate { contains, psi_m: a.value, phi_m: b.value, samples })
}

/// An exact value that may be the flagged infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactValue {
    Finite(Rational),
    Infinite,
}

impl ExactValue {
    pub fn as_string(&self) -> String {
        match self {
            ExactValue::Finite(r) => rat_string(r),
            ExactValue::Infinite => "inf".into(),
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExactValue::Finite(r) => Some(r),
            ExactValue::Infinite => None,
        }
    }
}

impl PartialOrd for ExactValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use ExactValue::*;
        match (self, other) {
            (Infinite, Infinite) => std::cmp::Ordering::Equal,
            (Infinite, Finite(_)) => std::cmp::Ordering::Greater,
            (Finite(_), Infinite) => std::cmp::Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

/// Dirichlet pigeonhole lower bound `ψ(W ∩ ker x) / φ(xW)` for one matrix.
/// Zero subspaces give 0; `φ(xW) = 0` with `ψ > 0` is the flagged infinity.
pub fn dirichlet_bound(
    x: &QMatrix,
    w: &Subspace,
    qv: &QuasiNorm,
    qe: &QuasiNorm,
) -> Result<ExactValue, Error> {
    if w.is_zero() {
        return Ok(ExactValue::Finite(Rational::zero()));
    }
    let a = psi(&w.intersect(&x.kernel())?, qv)?;
    let b = phi(&image(w, x), qe)?;
    if a.is_zero() {
        return Ok(ExactValue::Finite(Rational::zero()));
    }
    if b.is_zero() {
        return Ok(ExactValue::Infinite);
    }
    Ok(ExactValue::Finite(a / b))
}

/// Exact exponent certificate: the ratio maximum, its witness subspace, the
/// pencil thresholds of the witness, and the generic samples used.
#[derive(Debug, Clone)]
pub struct TauResult {
    pub value: ExactValue,
    pub witness: Subspace,
    pub a: Rational,
    pub b: Rational,
    pub samples_used: Vec<Vec<Rational>>,
    pub flags: Vec<String>,
}

impl TauResult {
    pub fn to_json(&self) -> Value {
        json!({
            "tau": self.value.as_string(),
            "a": rat_string(&self.a),
            "b": rat_string(&self.b),
            "witness": subspace_json(&self.witness),
            "samples": self.samples_used.iter().map(|s| rationals_json(s)).collect::<Vec<_>>(),
            "flags": self.flags,
        })
    }
}

pub fn subspace_json(w: &Subspace) -> Value {
    json!({
        "ambient_dim": w.ambient_dim(),
        "basis": w.basis_rows().iter().map(|r| rationals_json(r)).collect::<Vec<_>>(),
    })
}

pub fn subspace_from_json(v: &Value) -> Result<Subspace, Error> {
    let ambient = v["ambient_dim"].as_u64().ok_or_else(|| Error::Parse("subspace missing ambient_dim".into()))? as usize;
    let rows = v["basis"]
        .as_array()
        .ok_or_else(|| Error::Parse("subspace missing basis".into()))?
        .iter()
        .map(|r| rationals_from_json(r))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &rows {
        if r.len() != ambient {
            return Err(Error::Parse("basis row length mismatch".into()));
        }
    }
    Ok(Subspace::from_rows(ambient, rows))
}

pub fn rationals_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(rat_string(r))).collect())
}

pub fn rationals_from_json(v: &Value) -> Result<Vec<Rational>, Error> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array of rationals".into()))?
        .iter()
        .map(|x| rat_parse(x.as_str().ok_or_else(|| Error::Parse("expected rational string".into()))?))
        .collect()
}

/// The ratio maximum `max ψ_M(W)/φ_M(W)` over a finite candidate family.
///
/// Convention: a candidate with `ψ_M = 0` contributes 0 (this covers the
/// zero subspace); `φ_M = 0 < ψ_M` is the flagged infinite outcome (the
/// symptom of a non-diophantine direction). Among the argmaxes the witness
/// is the one of maximal dimension, and a tie at that dimension is a hard
/// error rather than a silent pick.
pub fn tau_candidates(
    map: &PolyMap,
    qv: &QuasiNorm,
    qe: &QuasiNorm,
    candidates: &[Subspace],
    sampler: &mut RationalSampler,
) -> Result<TauResult, Error> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut evaluated = Vec::new();
    let mut samples_used = Vec::new();
    for w in candidates {
        let a = psi_m(w, map, qv, sampler)?;
        let b = phi_m(w, map, qe, sampler)?;
        samples_used.extend(a.samples.iter().cloned());
        samples_used.extend(b.samples.iter().cloned());
        let ratio = if a.value.is_zero() {
            ExactValue::Finite(Rational::zero())
        } else if b.value.is_zero() {
            ExactValue::Infinite
        } else {
            ExactValue::Finite(&a.value / &b.value)
        };
        evaluated.push((w, a.value, b.value, ratio));
    }
    let best = evaluated.iter().map(|(_, _, _, r)| r.clone()).max().expect("nonempty");
    let max_dim =
        evaluated.iter().filter(|(_, _, _, r)| *r == best).map(|(w, _, _, _)| w.dim()).max().unwrap();
    let argmax: Vec<_> =
        evaluated.iter().filter(|(w, _, _, r)| *r == best && w.dim() == max_dim).collect();
    if argmax.len() > 1 && !argmax.iter().all(|(w, _, _, _)| **w == *argmax[0].0) {
        return Err(Error::DuplicateArgmax { dim: max_dim });
    }
    let (w, a, b, _) = argmax[0];
    let mut flags = Vec::new();
    if best == ExactValue::Infinite {
        flags.push("infinite".to_string());
    }
    Ok(TauResult {
        value: best,
        witness: (*w).clone(),
        a: a.clone(),
        b: b.clone(),
        samples_used,
        flags,
    })
}

/// The two submodularity inequalities for the sampled manifold functions:
/// `φ_M(U+W) + φ_M(U∩W) ≤ φ_M(U) + φ_M(W)` and
/// `ψ_M(U+W) + ψ_M(U∩W) ≥ ψ_M(U) + ψ_M(W)`.
pub fn submodularity_check(
    map: &PolyMap,
    qv: &QuasiNorm,
    qe: &QuasiNorm,
    w1: &Subspace,
    w2: &Subspace,
    sampler: &mut RationalSampler,
) -> Result<bool, Error> {
    let sum = w1.sum(w2)?;
    let inter = w1.intersect(w2)?;
    let phi_of = |w: &Subspace, s: &mut RationalSampler| -> Result<Rational, Error> {
        Ok(phi_m(w, map, qe, s)?.value)
    };
    let psi_of = |w: &Subspace, s: &mut RationalSampler| -> Result<Rational, Error> {
        Ok(psi_m(w, map, qv, s)?.value)
    };
    let phi_ok = phi_of(&sum, sampler)? + phi_of(&inter, sampler)?
        <= phi_of(w1, sampler)? + phi_of(w2, sampler)?;
    let psi_ok = psi_of(&sum, sampler)? + psi_of(&inter, sampler)?
        >= psi_of(w1, sampler)? + psi_of(w2, sampler)?;
    Ok(phi_ok && psi_ok)
}

/// Dimension of the rational span of the minor vectors θ(Φ(x)) over at
/// least `n_samples` generic samples, stabilized.
pub fn pluecker_span(
    map: &PolyMap,
    n_samples: usize,
    sampler: &mut RationalSampler,
) -> Result<usize, Error> {
    if n_samples == 0 {
        return Err(Error::Precondition("pluecker_span needs n_samples ≥ 1".into()));
    }
    let n_minors = minor_count(map.dim_v(), map.dim_e());
    let mut acc = RrefAccumulator::new(n_minors);
    let mut drawn = 0;
    let mut stable = 0;
    while drawn < n_samples || stable < STABLE_RUN {
        let params = sampler.sample_vec(map.n_params());
        let theta = minor_vector(&map.eval(&params));
        drawn += 1;
        if acc.add_row(theta) {
            stable = 0;
        } else {
            stable += 1;
        }
    }
    Ok(acc.rank())
}

fn minor_count(d: usize, e: usize) -> usize {
    (1..=d.min(e)).map(|k| binom_usize(d, k) * binom_usize(e, k)).sum()
}

fn binom_usize(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All minors of sizes `1..=min(d,e)`, ordered by size, then row subset,
/// then column subset, lexicographically.
fn minor_vector(x: &QMatrix) -> Vec<Rational> {
    let mut out = Vec::new();
    for k in 1..=x.rows().min(x.cols()) {
        for rows in subsets(x.rows(), k) {
            for cols in subsets(x.cols(), k) {
                out.push(determinant(x, &rows, &cols));
            }
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn determinant(x: &QMatrix, rows: &[usize], cols: &[usize]) -> Rational {
    let k = rows.len();
    let mut m: Vec<Vec<Rational>> =
        rows.iter().map(|&r| cols.iter().map(|&c| x.get(r, c).clone()).collect()).collect();
    let mut det = Rational::one();
    for col in 0..k {
        let Some(p) = (col..k).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= &m[col][col];
        let inv = m[col][col].recip();
        for r in (col + 1)..k {
            if !m[r][col].is_zero() {
                let f = &m[r][col] * &inv;
                for c in col..k {
                    let v = &m[r][c] - &f * &m[col][c];
                    m[r][c] = v;
                }
            }
        }
    }
    det
}

// -- candidate families and built-in manifolds ------------------------------

/// How the candidate subspaces of a manifold are generated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateStrategy {
    /// Consecutive coordinate blocks (graded slices, in coordinate order);
    /// candidates are all unions of blocks, including the zero subspace.
    Graded { slices: Vec<usize> },
    /// All coordinate-prefix spans `0 ⊆ V_1 ⊆ … ⊆ V_d` (a degree flag).
    Flag,
    /// An explicit list.
    Explicit { subspaces: Vec<Subspace> },
}

impl CandidateStrategy {
    pub fn candidates(&self, dim: usize) -> Result<Vec<Subspace>, Error> {
        match self {
            CandidateStrategy::Graded { slices } => {
                if slices.iter().sum::<usize>() != dim {
                    return Err(Error::Precondition("graded slices must sum to the dimension".into()));
                }
                let mut starts = vec![0usize];
                for s in slices {
                    starts.push(starts.last().unwrap() + s);
                }
                let m = slices.len();
                let mut out = Vec::new();
                for mask in 0..(1usize << m) {
                    let mut coords = Vec::new();
                    for (b, s) in slices.iter().enumerate() {
                        if mask & (1 << b) != 0 {
                            coords.extend(starts[b]..starts[b] + s);
                        }
                    }
                    out.push(Subspace::coordinate_span(dim, &coords));
                }
                Ok(out)
            }
            CandidateStrategy::Flag => Ok((0..=dim)
                .map(|i| Subspace::coordinate_span(dim, &(0..i).collect::<Vec<_>>()))
                .collect()),
            CandidateStrategy::Explicit { subspaces } => {
                for w in subspaces {
                    if w.ambient_dim() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: w.ambient_dim(),
                            context: "explicit candidate",
                        });
                    }
                }
                Ok(subspaces.clone())
            }
        }
    }
}

/// A polynomial family together with its quasi-norms and candidate family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifold {
    pub name: String,
    pub map: PolyMap,
    pub qv: QuasiNorm,
    pub qe: QuasiNorm,
    pub strategy: CandidateStrategy,
}

impl Manifold {
    pub fn candidates(&self) -> Result<Vec<Subspace>, Error> {
        self.strategy.candidates(self.map.dim_v())
    }

    pub fn tau(&self, sampler: &mut RationalSampler) -> Result<TauResult, Error> {
        let candidates = self.candidates()?;
        tau_candidates(&self.map, &self.qv, &self.qe, &candidates, sampler)
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = (0..self.map.dim_e())
            .map(|r| {
                Value::Array((0..self.map.dim_v()).map(|c| self.map.entry(r, c).to_json()).collect())
            })
            .collect();
        let candidates = match &self.strategy {
            CandidateStrategy::Graded { slices } => json!({"strategy": "graded", "slices": slices}),
            CandidateStrategy::Flag => json!({"strategy": "flag"}),
            CandidateStrategy::Explicit { subspaces } => json!({
                "strategy": "explicit",
                "subspaces": subspaces.iter().map(subspace_json).collect::<Vec<_>>(),
            }),
        };
        json!({
            "name": self.name,
            "n_params": self.map.n_params(),
            "dim_v": self.map.dim_v(),
            "dim_e": self.map.dim_e(),
            "weights_v": self.qv.weights().iter().map(rat_string).collect::<Vec<_>>(),
            "weights_e": self.qe.weights().iter().map(rat_string).collect::<Vec<_>>(),
            "entries": entries,
            "candidates": candidates,
        })
    }

    pub fn from_json(v: &Value) -> Result<Manifold, Error> {
        let name = v["name"].as_str().unwrap_or("manifold").to_string();
        let n_params = v["n_params"].as_u64().ok_or_else(|| Error::Parse("missing n_params".into()))? as usize;
        let dim_v = v["dim_v"].as_u64().ok_or_else(|| Error::Parse("missing dim_v".into()))? as usize;
        let dim_e = v["dim_e"].as_u64().ok_or_else(|| Error::Parse("missing dim_e".into()))? as usize;
        let weights_v = v["weights_v"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing weights_v".into()))?
            .iter()
            .map(|x| rat_parse(x.as_str().ok_or_else(|| Error::Parse("bad weight".into()))?))
            .collect::<Result<Vec<_>, _>>()?;
        let weights_e = v["weights_e"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing weights_e".into()))?
            .iter()
            .map(|x| rat_parse(x.as_str().ok_or_else(|| Error::Parse("bad weight".into()))?))
            .collect::<Result<Vec<_>, _>>()?;
        if weights_v.len() != dim_v || weights_e.len() != dim_e {
            return Err(Error::Parse("weight count must match dimensions".into()));
        }
        let rows = v["entries"].as_array().ok_or_else(|| Error::Parse("missing entries".into()))?;
        if rows.len() != dim_e {
            return Err(Error::Parse("entries must have dim_e rows".into()));
        }
        let mut entries = Vec::with_capacity(dim_e * dim_v);
        for row in rows {
            let cols = row.as_array().ok_or_else(|| Error::Parse("entries row must be an array".into()))?;
            if cols.len() != dim_v {
                return Err(Error::Parse("entries row must have dim_v columns".into()));
            }
            for cell in cols {
                entries.push(Poly::from_json(cell, n_params)?);
            }
        }
        let strategy = match v["candidates"]["strategy"].as_str() {
            Some("graded") => {
                let slices = v["candidates"]["slices"]
                    .as_array()
                    .ok_or_else(|| Error::Parse("graded strategy needs slices".into()))?
                    .iter()
                    .map(|x| x.as_u64().map(|n| n as usize).ok_or_else(|| Error::Parse("bad slice".into())))
                    .collect::<Result<Vec<_>, _>>()?;
                CandidateStrategy::Graded { slices }
            }
            Some("flag") => CandidateStrategy::Flag,
            Some("explicit") => {
                let subspaces = v["candidates"]["subspaces"]
                    .as_array()
                    .ok_or_else(|| Error::Parse("explicit strategy needs subspaces".into()))?
                    .iter()
                    .map(subspace_from_json)
                    .collect::<Result<Vec<_>, _>>()?;
                CandidateStrategy::Explicit { subspaces }
            }
            _ => return Err(Error::Parse("candidates.strategy must be graded|flag|explicit".into())),
        };
        Ok(Manifold {
            name,
            map: PolyMap::new(n_params, dim_v, dim_e, entries)?,
            qv: QuasiNorm::new(Side::Source, weights_v)?,
            qe: QuasiNorm::new(Side::Target, weights_e)?,
            strategy,
        })
    }
}

/// The evaluation-map manifold of a nilpotent Lie algebra on `k` letters:
/// parameters are a `k`-tuple in `g`, the source is the relatively free
/// algebra in quotient coordinates (complements of the computed laws),
/// ordered by descending bracket degree with weights equal to the degree,
/// and the target is `g` with the metric-induced weights.
pub fn evaluation_manifold(
    g: &LieAlgebra,
    k: usize,
    metric: &MetricSpec,
    sampler: &mut RationalSampler,
) -> Result<Manifold, Error> {
    let s = g.step().max(1);
    let basis = crate::freelie::lyndon_basis(k, s);
    let rf = liealg::laws_ideal(g, k, s, sampler)?;
    let law_pivots: std::collections::BTreeSet<usize> =
        rf.laws.leading_profile().into_iter().collect();

    // Quotient coordinates: the non-pivot Lyndon words, highest degree first.
    let mut source_words: Vec<usize> =
        (0..basis.dim()).filter(|i| !law_pivots.contains(i)).collect();
    source_words.sort_by(|&a, &b| {
        let (wa, wb) = (basis.word(a), basis.word(b));
        wb.degree().cmp(&wa.degree()).then_with(|| wa.letters().cmp(wb.letters()))
    });
    let weights_v: Vec<Rational> = source_words
        .iter()
        .map(|&i| Rational::from_integer((basis.word(i).degree() as i64).into()))
        .collect();
    let slices: Vec<usize> = {
        let mut out = Vec::new();
        for degree in (1..=s).rev() {
            let n = source_words.iter().filter(|&&i| basis.word(i).degree() == degree).count();
            out.push(n);
        }
        out
    };

    // Target ordering: non-increasing metric weight, deepest layers first.
    let mw = match metric {
        MetricSpec::Riemannian => g.riemannian_weights(),
        MetricSpec::GeneratedBy(ix) => {
            let v1 = Subspace::coordinate_span(g.dim(), ix);
            g.metric_weights(&v1)?
        }
    };
    let mut target_order: Vec<usize> = (0..g.dim()).collect();
    target_order.sort_by(|&a, &b| mw.weights[b].cmp(&mw.weights[a]).then(a.cmp(&b)));
    let weights_e: Vec<Rational> = target_order
        .iter()
        .map(|&i| Rational::from_integer((mw.weights[i] as i64).into()))
        .collect();

    // Symbolic evaluation: X_i has polynomial coordinates, one parameter per
    // (letter, basis direction); brackets expand through the structure
    // constants.
    let n_params = k * g.dim();
    let dim_v = source_words.len();
    let dim_e = g.dim();
    let mut columns: Vec<Vec<Poly>> = Vec::with_capacity(dim_v);
    for &wi in &source_words {
        columns.push(eval_word_poly(g, basis.word(wi), k, n_params));
    }
    let mut entries = vec![Poly::zero(n_params); dim_e * dim_v];
    for (c, col) in columns.iter().enumerate() {
        for (r, &orig) in target_order.iter().enumerate() {
            entries[r * dim_v + c] = col[orig].clone();
        }
    }
    Ok(Manifold {
        name: format!("eval({},k={k})", g.name()),
        map: PolyMap::new(n_params, dim_v, dim_e, entries)?,
        qv: QuasiNorm::new(Side::Source, weights_v)?,
        qe: QuasiNorm::new(Side::Target, weights_e)?,
        strategy: CandidateStrategy::Graded { slices },
    })
}

fn eval_word_poly(
    g: &LieAlgebra,
    w: &crate::freelie::LyndonWord,
    k: usize,
    n_params: usize,
) -> Vec<Poly> {
    match w.standard_factorization() {
        None => {
            let letter = (w.letters()[0] - 1) as usize;
            assert!(letter < k);
            (0..g.dim()).map(|j| Poly::var(n_params, letter * g.dim() + j)).collect()
        }
        Some((u, v)) => {
            let a = eval_word_poly(g, &u, k, n_params);
            let b = eval_word_poly(g, &v, k, n_params);
            bracket_poly(g, &a, &b, n_params)
        }
    }
}

fn bracket_poly(g: &LieAlgebra, a: &[Poly], b: &[Poly], n_params: usize) -> Vec<Poly> {
    let mut out = vec![Poly::zero(n_params); g.dim()];
    for i in 0..g.dim() {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..g.dim() {
            if b[j].is_zero() {
                continue;
            }
            let prod = a[i].mul(&b[j]);
            let ei = g.basis_vector(i);
            let ej = g.basis_vector(j);
            let sc = g.bracket(&ei, &ej);
            for (t, c) in sc.iter().enumerate() {
                if !c.is_zero() {
                    out[t] = out[t].add(&prod.scale(c));
                }
            }
        }
    }
    out
}

/// Which algebra hosts the Veronese powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraKind {
    /// Full matrix algebra `M_s`; one-generator subalgebras reach dimension `s`.
    Matrix(usize),
    /// The split algebra `Q^m` with componentwise product; one-generator
    /// subalgebras reach dimension `m`. This is classical simultaneous
    /// approximation of `(x, x², …)` at `m` places.
    Split(usize),
}

impl AlgebraKind {
    pub fn dim(&self) -> usize {
        match *self {
            AlgebraKind::Matrix(s) => s * s,
            AlgebraKind::Split(m) => m,
        }
    }

    /// Maximal dimension of a one-generator subalgebra.
    pub fn max_cyclic_dim(&self) -> usize {
        match *self {
            AlgebraKind::Matrix(s) => s,
            AlgebraKind::Split(m) => m,
        }
    }

    fn unit(&self) -> Vec<Rational> {
        match *self {
            AlgebraKind::Matrix(s) => {
                let mut u = vec![Rational::zero(); s * s];
                for i in 0..s {
                    u[i * s + i] = Rational::one();
                }
                u
            }
            AlgebraKind::Split(m) => vec![Rational::one(); m],
        }
    }

    fn mul_polys(&self, a: &[Poly], b: &[Poly], n_params: usize) -> Vec<Poly> {
        match *self {
            AlgebraKind::Matrix(s) => {
                let mut out = vec![Poly::zero(n_params); s * s];
                for i in 0..s {
                    for j in 0..s {
                        for k in 0..s {
                            out[i * s + j] = out[i * s + j].add(&a[i * s + k].mul(&b[k * s + j]));
                        }
                    }
                }
                out
            }
            AlgebraKind::Split(m) => (0..m).map(|i| a[i].mul(&b[i])).collect(),
        }
    }
}

/// The Veronese family `P ↦ P(x)` for polynomials of degree ≤ `p` with
/// values in the chosen algebra; degree-flag candidates, unweighted norms.
pub fn veronese_manifold(p: usize, algebra: AlgebraKind) -> Result<Manifold, Error> {
    if p == 0 {
        return Err(Error::Precondition("veronese needs p ≥ 1".into()));
    }
    let e = algebra.dim();
    let n_params = e;
    let x: Vec<Poly> = (0..e).map(|i| Poly::var(n_params, i)).collect();
    let mut power: Vec<Poly> =
        algebra.unit().into_iter().map(|c| Poly::constant(n_params, c)).collect();
    let mut columns = vec![power.clone()];
    for _ in 0..p {
        power = algebra.mul_polys(&power, &x, n_params);
        columns.push(power.clone());
    }
    let dim_v = p + 1;
    let mut entries = vec![Poly::zero(n_params); e * dim_v];
    for (c, col) in columns.iter().enumerate() {
        for r in 0..e {
            entries[r * dim_v + c] = col[r].clone();
        }
    }
    let label = match algebra {
        AlgebraKind::Matrix(s) => format!("veronese(p={p},M{s})"),
        AlgebraKind::Split(m) => format!("veronese(p={p},split{m})"),
    };
    Ok(Manifold {
        name: label,
        map: PolyMap::new(n_params, dim_v, e, entries)?,
        qv: QuasiNorm::unweighted(Side::Source, dim_v),
        qe: QuasiNorm::unweighted(Side::Target, e),
        strategy: CandidateStrategy::Flag,
    })
}

/// The wedge family on `k ≥ 2` vectors in `Q³`: coefficients `a_{ij}` map
/// to `Σ a_{ij} u_i ∧ u_j`. Source coordinates are the pairs `(i,j)`,
/// `i < j`, in lexicographic order; the only candidate is the full space.
pub fn wedge_manifold(k: usize) -> Result<Manifold, Error> {
    if k < 2 {
        return Err(Error::Precondition("wedge needs k ≥ 2".into()));
    }
    let n_params = 3 * k;
    let u = |i: usize, c: usize| Poly::var(n_params, 3 * i + c);
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            pairs.push((i, j));
        }
    }
    let dim_v = pairs.len();
    let mut entries = vec![Poly::zero(n_params); 3 * dim_v];
    for (col, &(i, j)) in pairs.iter().enumerate() {
        // u_i ∧ u_j in coordinates is the cross product.
        let cross = [
            u(i, 1).mul(&u(j, 2)).add(&u(i, 2).mul(&u(j, 1)).scale(&-Rational::one())),
            u(i, 2).mul(&u(j, 0)).add(&u(i, 0).mul(&u(j, 2)).scale(&-Rational::one())),
            u(i, 0).mul(&u(j, 1)).add(&u(i, 1).mul(&u(j, 0)).scale(&-Rational::one())),
        ];
        for (r, poly) in cross.into_iter().enumerate() {
            entries[r * dim_v + col] = poly;
        }
    }
    Ok(Manifold {
        name: format!("wedge(k={k})"),
        map: PolyMap::new(n_params, dim_v, 3, entries)?,
        qv: QuasiNorm::unweighted(Side::Source, dim_v),
        qe: QuasiNorm::unweighted(Side::Target, 3),
        strategy: CandidateStrategy::Explicit { subspaces: vec![Subspace::full(dim_v)] },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{heisenberg, unipotent};
    use crate::qlinalg::{rat, rat_int, QMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unweighted_pair(d: usize, e: usize) -> (QuasiNorm, QuasiNorm) {
        (QuasiNorm::unweighted(Side::Source, d), QuasiNorm::unweighted(Side::Target, e))
    }

    fn random_subspace(rng: &mut ChaCha8Rng, ambient: usize) -> Subspace {
        let rows = rng.random_range(0..=ambient);
        Subspace::from_rows(
            ambient,
            (0..rows)
                .map(|_| (0..ambient).map(|_| rat_int(rng.random_range(-5..=5))).collect())
                .collect(),
        )
    }

    #[test]
    fn psi_phi_basics() {
        let q = QuasiNorm::new(Side::Source, vec![rat_int(2), rat_int(1), rat_int(1)]).unwrap();
        assert_eq!(psi(&Subspace::full(3), &q).unwrap(), rat_int(4));
        assert_eq!(psi(&Subspace::zero(3), &q).unwrap(), rat_int(0));
        // Degree-2-first coordinates with weights (2,1,1): the first axis
        // carries weight 2.
        assert_eq!(psi(&Subspace::coordinate_span(3, &[0]), &q).unwrap(), rat_int(2));

        let qe = QuasiNorm::new(Side::Target, vec![rat_int(2), rat_int(1), rat_int(1)]).unwrap();
        assert_eq!(phi(&Subspace::full(3), &qe).unwrap(), rat_int(4));
        assert_eq!(phi(&Subspace::coordinate_span(3, &[0]), &qe).unwrap(), rat_int(2));
        assert_eq!(phi(&Subspace::coordinate_span(3, &[2]), &qe).unwrap(), rat_int(1));

        // Side and dimension violations are errors.
        assert!(psi(&Subspace::full(3), &qe).is_err());
        assert!(phi(&Subspace::full(2), &qe).is_err());
    }

    #[test]
    fn unweighted_collapse_to_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let d = rng.random_range(1..=7);
            let w = random_subspace(&mut rng, d);
            let (qv, qe) = unweighted_pair(d, d);
            assert_eq!(psi(&w, &qv).unwrap(), rat_int(w.dim() as i64));
            assert_eq!(phi(&w, &qe).unwrap(), rat_int(w.dim() as i64));
        }
    }

    #[test]
    fn psi_phi_monotone_under_inclusion() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..100 {
            let d = rng.random_range(2..=7);
            let weights: Vec<Rational> = {
                let mut w: Vec<i64> = (0..d).map(|_| rng.random_range(1..=4)).collect();
                w.sort_unstable_by(|a, b| b.cmp(a));
                w.into_iter().map(rat_int).collect()
            };
            let qv = QuasiNorm::new(Side::Source, weights.clone()).unwrap();
            let qe = QuasiNorm::new(Side::Target, weights).unwrap();
            let small = random_subspace(&mut rng, d);
            let big = small.sum(&random_subspace(&mut rng, d)).unwrap();
            assert!(psi(&small, &qv).unwrap() <= psi(&big, &qv).unwrap());
            assert!(phi(&small, &qe).unwrap() <= phi(&big, &qe).unwrap());
        }
    }

    #[test]
    fn psi_neg_and_phi_are_submodular_as_flag_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..200 {
            let d = rng.random_range(2..=6);
            let mut w: Vec<i64> = (0..d).map(|_| rng.random_range(1..=4)).collect();
            w.sort_unstable_by(|a, b| b.cmp(a));
            let weights: Vec<Rational> = w.into_iter().map(rat_int).collect();
            let qv = QuasiNorm::new(Side::Source, weights.clone()).unwrap();
            let qe = QuasiNorm::new(Side::Target, weights).unwrap();
            let u = random_subspace(&mut rng, d);
            let v = random_subspace(&mut rng, d);
            let s = u.sum(&v).unwrap();
            let i = u.intersect(&v).unwrap();
            // -ψ submodular: ψ(U+W) + ψ(U∩W) ≥ ψ(U) + ψ(W).
            assert!(
                psi(&s, &qv).unwrap() + psi(&i, &qv).unwrap()
                    >= psi(&u, &qv).unwrap() + psi(&v, &qv).unwrap()
            );
            // φ submodular.
            assert!(
                phi(&s, &qe).unwrap() + phi(&i, &qe).unwrap()
                    <= phi(&u, &qe).unwrap() + phi(&v, &qe).unwrap()
            );
        }
    }

    #[test]
    fn psi_matches_flag_dims_route() {
        // Dual route for ψ: the telescoped weighted sum over the coordinate
        // flag, computed with flag_dims, must agree with the profile form.
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..50 {
            let d = rng.random_range(1..=6);
            let mut wts: Vec<i64> = (0..d).map(|_| rng.random_range(1..=4)).collect();
            wts.sort_unstable_by(|a, b| b.cmp(a));
            let q = QuasiNorm::new(Side::Source, wts.iter().map(|&x| rat_int(x)).collect()).unwrap();
            let w = random_subspace(&mut rng, d);
            let flag: Vec<Subspace> = (0..=d)
                .map(|i| Subspace::coordinate_span(d, &(0..i).collect::<Vec<_>>()))
                .collect();
            let dims = w.flag_dims(&flag).unwrap();
            // Σ (α_i - α_{i+1})·dim(V_{i+1} ∩ W) with α_{d+1} = 0.
            let mut total = Rational::zero();
            for i in 0..d {
                let alpha_i = rat_int(wts[i]);
                let alpha_next = if i + 1 < d { rat_int(wts[i + 1]) } else { Rational::zero() };
                total += (alpha_i - alpha_next) * rat_int(dims[i + 1] as i64);
            }
            assert_eq!(psi(&w, &q).unwrap(), total);
        }
    }

    #[test]
    fn poly_eval_and_map() {
        // f(t) = 1 - 2t + t² at t = 3 is 4.
        let p = Poly::from_terms(
            1,
            vec![(rat_int(1), vec![0]), (rat_int(-2), vec![1]), (rat_int(1), vec![2])],
        )
        .unwrap();
        assert_eq!(p.eval(&[rat_int(3)]), rat_int(4));
        let q = p.mul(&p);
        assert_eq!(q.eval(&[rat_int(3)]), rat_int(16));
    }

    #[test]
    fn heisenberg_eval_manifold_shapes_and_values() {
        let g = heisenberg();
        let mut s = RationalSampler::new(7);
        let m = evaluation_manifold(&g, 3, &MetricSpec::Riemannian, &mut s).unwrap();
        assert_eq!(m.map.dim_v(), 6);
        assert_eq!(m.map.dim_e(), 3);
        assert_eq!(m.qv.weights()[..3], [rat_int(2), rat_int(2), rat_int(2)]);
        assert_eq!(m.qv.weights()[3..], [rat_int(1), rat_int(1), rat_int(1)]);

        // ψ_M of the degree-2 slice: generic commutator map has rank 1,
        // so the kernel meets the slice in dimension 2 and ψ_M = 4.
        let w = Subspace::coordinate_span(6, &[0, 1, 2]);
        let v = psi_m(&w, &m.map, &m.qv, &mut s).unwrap();
        assert_eq!(v.value, rat_int(4));
        assert!(!v.samples.is_empty());

        let f = phi_m(&w, &m.map, &m.qe, &mut s).unwrap();
        assert_eq!(f.value, rat_int(1));
    }

    #[test]
    fn psi_m_degenerate_cases() {
        let g = heisenberg();
        let mut s = RationalSampler::new(77);
        let m = evaluation_manifold(&g, 2, &MetricSpec::Riemannian, &mut s).unwrap();
        let zero = Subspace::zero(m.map.dim_v());
        assert_eq!(psi_m(&zero, &m.map, &m.qv, &mut s).unwrap().value, Rational::zero());
        assert_eq!(phi_m(&zero, &m.map, &m.qe, &mut s).unwrap().value, Rational::zero());

        // A constant-zero family: the kernel is everything, ψ_M(W) = ψ(W).
        let zmap = PolyMap::new(1, 3, 2, vec![Poly::zero(1); 6]).unwrap();
        let (qv, qe) = unweighted_pair(3, 2);
        let w = Subspace::coordinate_span(3, &[0, 2]);
        assert_eq!(psi_m(&w, &zmap, &qv, &mut s).unwrap().value, rat_int(2));
        assert_eq!(phi_m(&w, &zmap, &qe, &mut s).unwrap().value, rat_int(0));
    }

    #[test]
    fn heisenberg_tau_closed_loop() {
        // τ over the graded family equals k² - k - 2 with the degree-2
        // slice as witness (k ≥ 3); at k = 2 everything is extremal and the
        // witness is the whole space.
        for k in [2usize, 3, 4] {
            let g = heisenberg();
            let mut s = RationalSampler::new(100 + k as u64);
            let m = evaluation_manifold(&g, k, &MetricSpec::Riemannian, &mut s).unwrap();
            let tau = m.tau(&mut s).unwrap();
            let expected = rat_int((k * k) as i64 - k as i64 - 2);
            assert_eq!(tau.value, ExactValue::Finite(expected.clone()), "k = {k}");
            let d2 = k * (k - 1) / 2;
            if k == 2 {
                assert_eq!(tau.witness, Subspace::full(m.map.dim_v()));
            } else {
                assert_eq!(tau.witness, Subspace::coordinate_span(m.map.dim_v(), &(0..d2).collect::<Vec<_>>()));
                assert_eq!(tau.a, expected);
                assert_eq!(tau.b, rat_int(1));
            }
            assert!(tau.flags.is_empty());
        }
    }

    #[test]
    fn tau_deterministic_across_seeds() {
        let g = heisenberg();
        let mut results = Vec::new();
        for seed in [1u64, 2, 3, 4, 5] {
            let mut s = RationalSampler::new(seed);
            let m = evaluation_manifold(&g, 3, &MetricSpec::Riemannian, &mut s).unwrap();
            let tau = m.tau(&mut s).unwrap();
            results.push((tau.value, tau.witness, tau.a, tau.b));
        }
        for r in &results[1..] {
            assert_eq!(r, &results[0]);
        }
    }

    #[test]
    fn veronese_tau_and_extremality() {
        // p = 3 over M₂: the degree flag peaks at the full space with τ = 1.
        let m = veronese_manifold(3, AlgebraKind::Matrix(2)).unwrap();
        let mut s = RationalSampler::new(5);
        let tau = m.tau(&mut s).unwrap();
        assert_eq!(tau.value, ExactValue::Finite(rat_int(1)));
        assert_eq!(tau.witness, Subspace::full(4));
        assert_eq!(tau.a, rat_int(2));
        assert_eq!(tau.b, rat_int(2));

        // Extremal cases m ≥ p+1 through split algebras.
        for p in 1..=3usize {
            let m = veronese_manifold(p, AlgebraKind::Split(p + 1)).unwrap();
            let mut s = RationalSampler::new(6);
            let tau = m.tau(&mut s).unwrap();
            assert_eq!(tau.value, ExactValue::Finite(rat_int(0)), "p = {p}");
        }

        // The intro example: degree-flag ratios (i+1-m)/m for i ≥ m, so
        // p = 2 over M₂ lands strictly between extremal and the p = 3 value.
        let m2 = veronese_manifold(2, AlgebraKind::Matrix(2)).unwrap();
        let mut s = RationalSampler::new(7);
        assert_eq!(m2.tau(&mut s).unwrap().value, ExactValue::Finite(rat(1, 2)));
    }

    #[test]
    fn veronese_matches_closed_formula() {
        for (p, algebra) in [
            (2usize, AlgebraKind::Split(1)),
            (3, AlgebraKind::Split(1)),
            (3, AlgebraKind::Matrix(2)),
            (2, AlgebraKind::Split(2)),
            (3, AlgebraKind::Split(3)),
        ] {
            let m = veronese_manifold(p, algebra).unwrap();
            let mut s = RationalSampler::new(11);
            let tau = m.tau(&mut s).unwrap();
            let expect =
                crate::repthy::veronese_beta(p as u64, algebra.max_cyclic_dim() as u64).unwrap();
            assert_eq!(tau.value, ExactValue::Finite(expect), "p = {p}, algebra = {algebra:?}");
        }
    }

    #[test]
    fn wedge_pencil_and_tau() {
        let m = wedge_manifold(4).unwrap();
        let mut s = RationalSampler::new(3);
        // W = span{u1∧uj} is sent into the orthogonal of u1: the image has
        // dimension 2, so M sits in the pencil with a = 1, b = 2.
        let w = Subspace::coordinate_span(6, &[0, 1, 2]);
        let p = Pencil::new(w, rat_int(1), rat_int(2), &m.qv).unwrap();
        let cert = pencil_contains(&m.map, &p, &m.qv, &m.qe, &mut s).unwrap();
        assert!(cert.contains);
        assert_eq!(cert.psi_m, rat_int(1));
        assert_eq!(cert.phi_m, rat_int(2));

        // The trivial pencil contains every family.
        let trivial = Pencil::new(Subspace::full(6), rat_int(0), m.qe.total(), &m.qv).unwrap();
        assert!(pencil_contains(&m.map, &trivial, &m.qv, &m.qe, &mut s).unwrap().contains);

        // τ with the full-space candidate: (6-3)/3 = 1.
        let tau = m.tau(&mut s).unwrap();
        assert_eq!(tau.value, ExactValue::Finite(rat_int(1)));
    }

    #[test]
    fn dirichlet_bound_examples() {
        let (qv, qe) = unweighted_pair(3, 3);
        // Invertible square map: kernel 0, bound 0.
        let x = QMatrix::identity(3);
        assert_eq!(
            dirichlet_bound(&x, &Subspace::full(3), &qv, &qe).unwrap(),
            ExactValue::Finite(rat_int(0))
        );
        // Zero map: everything in the kernel, image 0: flagged infinite.
        let z = QMatrix::zero(3, 3);
        assert_eq!(
            dirichlet_bound(&z, &Subspace::full(3), &qv, &qe).unwrap(),
            ExactValue::Infinite
        );
        // Zero subspace gives 0 by convention.
        assert_eq!(
            dirichlet_bound(&z, &Subspace::zero(3), &qv, &qe).unwrap(),
            ExactValue::Finite(rat_int(0))
        );
        // Generic single row on Q^{n+1}: bound n/1.
        let (qv1, qe1) = unweighted_pair(4, 1);
        let row = QMatrix::from_int_rows(&[&[1, 2, 3, 5]]);
        assert_eq!(
            dirichlet_bound(&row, &Subspace::full(4), &qv1, &qe1).unwrap(),
            ExactValue::Finite(rat_int(3))
        );
    }

    #[test]
    fn dirichlet_bound_never_exceeds_tau() {
        let g = heisenberg();
        let mut s = RationalSampler::new(41);
        let m = evaluation_manifold(&g, 3, &MetricSpec::Riemannian, &mut s).unwrap();
        let candidates = m.candidates().unwrap();
        let tau = m.tau(&mut s).unwrap();
        let tau_value = tau.value.finite().unwrap().clone();
        for _ in 0..10 {
            let params = s.sample_vec(m.map.n_params());
            let x = m.map.eval(&params);
            for w in &candidates {
                match dirichlet_bound(&x, w, &m.qv, &m.qe).unwrap() {
                    ExactValue::Finite(b) => assert!(b <= tau_value),
                    ExactValue::Infinite => panic!("unexpected infinite bound"),
                }
            }
        }
    }

    #[test]
    fn submodularity_on_sampled_families() {
        let g = heisenberg();
        let mut s = RationalSampler::new(50);
        let m = evaluation_manifold(&g, 3, &MetricSpec::Riemannian, &mut s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..30 {
            let w1 = random_subspace(&mut rng, 6);
            let w2 = random_subspace(&mut rng, 6);
            assert!(submodularity_check(&m.map, &m.qv, &m.qe, &w1, &w2, &mut s).unwrap());
        }
        // Degenerate nesting and equality.
        let w = random_subspace(&mut rng, 6);
        assert!(submodularity_check(&m.map, &m.qv, &m.qe, &w, &w, &mut s).unwrap());
    }

    #[test]
    fn tau_rejects_empty_candidates() {
        let m = veronese_manifold(2, AlgebraKind::Split(1)).unwrap();
        let mut s = RationalSampler::new(1);
        assert_eq!(
            tau_candidates(&m.map, &m.qv, &m.qe, &[], &mut s).err(),
            Some(Error::EmptyCandidates)
        );
    }

    #[test]
    fn tau_duplicate_argmax_is_an_error() {
        // Two distinct axes of a diagonal family tie with ratio 0 at the
        // same dimension; the maximal-dimension rule cannot break the tie.
        let entries = vec![
            Poly::var(1, 0),
            Poly::zero(1),
            Poly::zero(1),
            Poly::var(1, 0),
        ];
        let map = PolyMap::new(1, 2, 2, entries).unwrap();
        let (qv, qe) = unweighted_pair(2, 2);
        let cands =
            vec![Subspace::coordinate_span(2, &[0]), Subspace::coordinate_span(2, &[1])];
        let mut s = RationalSampler::new(9);
        assert!(matches!(
            tau_candidates(&map, &qv, &qe, &cands, &mut s),
            Err(Error::DuplicateArgmax { dim: 1 })
        ));
    }

    #[test]
    fn infinite_tau_is_flagged() {
        // A family that kills the second coordinate: φ_M = 0 < ψ_M there.
        let entries = vec![Poly::var(1, 0), Poly::zero(1)];
        let map = PolyMap::new(1, 2, 1, entries).unwrap();
        let (qv, qe) = unweighted_pair(2, 1);
        let cands = vec![Subspace::coordinate_span(2, &[1])];
        let mut s = RationalSampler::new(10);
        let tau = tau_candidates(&map, &qv, &qe, &cands, &mut s).unwrap();
        assert_eq!(tau.value, ExactValue::Infinite);
        assert_eq!(tau.flags, vec!["infinite".to_string()]);
    }

    #[test]
    fn pluecker_span_examples() {
        // Constant nonzero map: one point, span 1.
        let one = PolyMap::new(1, 2, 1, vec![Poly::constant(1, rat_int(1)), Poly::constant(1, rat_int(2))])
            .unwrap();
        let mut s = RationalSampler::new(12);
        assert_eq!(pluecker_span(&one, 1, &mut s).unwrap(), 1);
        // Zero map: all minors vanish.
        let zero = PolyMap::new(1, 2, 1, vec![Poly::zero(1), Poly::zero(1)]).unwrap();
        assert_eq!(pluecker_span(&zero, 1, &mut s).unwrap(), 0);
        // The family [1, t]: the two 1×1 minors span a plane.
        let line =
            PolyMap::new(1, 2, 1, vec![Poly::constant(1, rat_int(1)), Poly::var(1, 0)]).unwrap();
        assert_eq!(pluecker_span(&line, 2, &mut s).unwrap(), 2);
        assert!(pluecker_span(&line, 0, &mut s).is_err());
    }

    #[test]
    fn manifold_json_round_trip() {
        let g = heisenberg();
        let mut s = RationalSampler::new(13);
        for m in [
            evaluation_manifold(&g, 3, &MetricSpec::Riemannian, &mut s).unwrap(),
            veronese_manifold(3, AlgebraKind::Matrix(2)).unwrap(),
            wedge_manifold(4).unwrap(),
        ] {
            let j = m.to_json();
            let back = Manifold::from_json(&j).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn cc_metric_weights_flow_into_target_norm() {
        // Heisenberg with the Carnot-Carathéodory metric generated by
        // span{e1,e2}: the center has weight 2 and is ordered first.
        let g = heisenberg();
        let mut s = RationalSampler::new(14);
        let m =
            evaluation_manifold(&g, 2, &MetricSpec::GeneratedBy(vec![0, 1]), &mut s).unwrap();
        assert_eq!(m.qe.weights(), &[rat_int(2), rat_int(1), rat_int(1)]);
        // φ of the reordered center axis picks up the deep weight.
        assert_eq!(phi(&Subspace::coordinate_span(3, &[0]), &m.qe).unwrap(), rat_int(2));
    }

    #[test]
    fn pencil_invariants() {
        let (qv, _) = unweighted_pair(3, 2);
        assert!(Pencil::new(Subspace::full(3), rat_int(2), rat_int(1), &qv).is_ok());
        assert!(Pencil::new(Subspace::full(3), rat_int(4), rat_int(1), &qv).is_err());
        assert!(Pencil::new(Subspace::full(3), rat_int(-1), rat_int(1), &qv).is_err());
    }

    #[test]
    fn unipotent_eval_manifold_tau_matches_formula_small() {
        // u(2) = Heisenberg: k = 3 must reproduce 4; free(2,2) likewise via
        // the step-2 closed form with d2 = 1.
        let g = unipotent(2);
        let mut s = RationalSampler::new(15);
        let m = evaluation_manifold(&g, 3, &MetricSpec::Riemannian, &mut s).unwrap();
        let tau = m.tau(&mut s).unwrap();
        assert_eq!(tau.value, ExactValue::Finite(rat_int(4)));
        let alpha = crate::repthy::us_beta(2, 3).unwrap().alpha;
        assert_eq!(tau.value, ExactValue::Finite(alpha));
    }

    #[test]
    fn quotient_coordinates_drop_laws() {
        // The abelian algebra on 2 letters at implied step 1: the manifold
        // keeps only the degree-1 coordinates.
        let g = crate::liealg::abelian(3);
        let mut s = RationalSampler::new(16);
        let m = evaluation_manifold(&g, 2, &MetricSpec::Riemannian, &mut s).unwrap();
        assert_eq!(m.map.dim_v(), 2);
        assert_eq!(m.qv.weights(), &[rat_int(1), rat_int(1)]);
    }
}
