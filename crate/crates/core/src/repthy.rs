//! Closed-form number theory and representation theory.
//!
//! Everything here is an independent oracle for the pencil machinery: Witt
//! dimensions through the Möbius function, irreducible `GL_k`-module
//! dimensions through both the Weyl product and the hook-content formula,
//! the box-moving dominance inequality, and the explicit exponent formulas
//! for the built-in families (Heisenberg, step-2, metabelian, unipotent
//! upper-triangular, free nilpotent, Veronese).

use crate::error::Error;
use crate::qlinalg::{rat_string, Rational};
use num::{BigInt, BigUint, One, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Möbius function. `n = 0` is an error.
pub fn mobius(n: u64) -> Result<i64, Error> {
    if n == 0 {
        return Err(Error::Precondition("mobius(0) is undefined".into()));
    }
    let mut n = n;
    let mut primes = 0u32;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Ok(0);
            }
            primes += 1;
        }
        p += 1;
    }
    if n > 1 {
        primes += 1;
    }
    Ok(if primes % 2 == 0 { 1 } else { -1 })
}

/// Mertens function `M(x) = Σ_{n ≤ x} μ(n)`.
pub fn mertens(x: u64) -> Result<i64, Error> {
    if x == 0 {
        return Err(Error::Precondition("mertens(0) is undefined".into()));
    }
    let mut m = 0;
    for n in 1..=x {
        m += mobius(n)?;
    }
    Ok(m)
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k.min(n - k) {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// Partition with non-increasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YoungDiagram {
    rows: Vec<u32>,
}

impl YoungDiagram {
    pub fn new(rows: Vec<u32>) -> Result<YoungDiagram, Error> {
        if rows.is_empty() || rows.iter().any(|&r| r == 0) || rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Precondition(format!(
                "not a Young diagram (need non-increasing positive parts): {rows:?}"
            )));
        }
        Ok(YoungDiagram { rows })
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn boxes(&self) -> u64 {
        self.rows.iter().map(|&r| r as u64).sum()
    }

    /// Hook column diagram λ' (conjugate partition).
    pub fn conjugate(&self) -> YoungDiagram {
        let cols = self.rows[0] as usize;
        let rows = (1..=cols)
            .map(|j| self.rows.iter().filter(|&&r| r as usize >= j).count() as u32)
            .collect();
        YoungDiagram { rows }
    }

    /// λ dominates μ: equal box count and partial sums of λ ≥ those of μ.
    /// Equivalent to μ being reachable from λ by moving boxes downwards.
    pub fn dominates(&self, other: &YoungDiagram) -> bool {
        if self.boxes() != other.boxes() {
            return false;
        }
        let mut sa = 0i64;
        let mut sb = 0i64;
        for i in 0..self.rows.len().max(other.rows.len()) {
            sa += *self.rows.get(i).unwrap_or(&0) as i64;
            sb += *other.rows.get(i).unwrap_or(&0) as i64;
            if sa < sb {
                return false;
            }
        }
        true
    }

    pub fn label(&self) -> String {
        format!("({})", self.rows.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
    }
}

/// All partitions of `n` with at most `max_rows` rows.
pub fn partitions(n: u32, max_rows: usize) -> Vec<YoungDiagram> {
    fn go(rest: u32, cap: u32, rows_left: usize, cur: &mut Vec<u32>, out: &mut Vec<YoungDiagram>) {
        if rest == 0 {
            out.push(YoungDiagram { rows: cur.clone() });
            return;
        }
        if rows_left == 0 {
            return;
        }
        for part in (1..=rest.min(cap)).rev() {
            cur.push(part);
            go(rest - part, part, rows_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    go(n, n, max_rows, &mut cur, &mut out);
    out
}

/// Dimension of the irreducible `GL_k`-module with diagram λ via the Weyl
/// product `Π_{1≤i<j≤k} (λ_i - λ_j + j - i)/(j - i)`; zero if λ has more
/// than `k` rows.
pub fn weyl_dim(lam: &YoungDiagram, k: u64) -> BigUint {
    if lam.num_rows() as u64 > k {
        return BigUint::zero();
    }
    let part = |i: u64| -> i64 {
        if (i as usize) < lam.rows.len() {
            lam.rows[i as usize] as i64
        } else {
            0
        }
    };
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        for j in (i + 1)..k {
            num *= BigInt::from(part(i) - part(j) + j as i64 - i as i64);
            den *= BigInt::from(j - i);
        }
    }
    let q = num / den;
    q.to_biguint().expect("Weyl dimension is a non-negative integer")
}

/// Same value through the hook content formula `Π_cells (k + content)/hook`.
/// An independent algorithm kept deliberately separate from [`weyl_dim`].
pub fn hook_content_dim(lam: &YoungDiagram, k: u64) -> BigUint {
    let conj = lam.conjugate();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (i, &len) in lam.rows.iter().enumerate() {
        for j in 0..len as usize {
            let content = j as i64 - i as i64;
            let hook = (len as i64 - 1 - j as i64) + (conj.rows[j] as i64 - 1 - i as i64) + 1;
            num *= BigInt::from(k as i64 + content);
            den *= BigInt::from(hook);
        }
    }
    let q = num / den;
    q.to_biguint().expect("hook content dimension is a non-negative integer")
}

/// Verification of the box-moving inequality: if μ is reachable from λ by
/// moving boxes downwards, then `d_μ(k)/d_μ(d) ≥ d_λ(k)/d_λ(d)` for `k ≥ d`.
/// Returns the truth of the inequality after checking the preconditions.
pub fn dominance_check(
    lam: &YoungDiagram,
    mu: &YoungDiagram,
    k: u64,
    d: u64,
) -> Result<bool, Error> {
    if lam.boxes() != mu.boxes() {
        return Err(Error::Precondition("diagrams must have the same number of boxes".into()));
    }
    if !lam.dominates(mu) {
        return Err(Error::Precondition("μ must be obtainable from λ by downward box moves".into()));
    }
    if k < d || (d as usize) < lam.num_rows().max(mu.num_rows()) {
        return Err(Error::Precondition("need k ≥ d ≥ rows of both diagrams".into()));
    }
    // d_μ(k)·d_λ(d) ≥ d_λ(k)·d_μ(d), exactly.
    let lhs = weyl_dim(mu, k) * weyl_dim(lam, d);
    let rhs = weyl_dim(lam, k) * weyl_dim(mu, d);
    Ok(lhs >= rhs)
}

/// Diagrams with `s` boxes and at most `d` rows that occur in the top
/// graded piece of the free step-`s` algebra on `d` generators: all of
/// them except `(s)`, `(1^s)`, plus `(2,2)` at `s = 4` and `(2,2,2)` at
/// `s = 6`.
pub fn klyachko_diagrams(d: usize, s: u32) -> Vec<YoungDiagram> {
    partitions(s, d)
        .into_iter()
        .filter(|lam| {
            let r = lam.rows();
            let row = r.len() == 1;
            let column = r.iter().all(|&x| x == 1);
            let two_two = s == 4 && r == [2, 2];
            let two_cubed = s == 6 && r == [2, 2, 2];
            !(row || column || two_two || two_cubed)
        })
        .collect()
}

/// One computed exponent: the word-length exponent α, the growth exponent
/// η, and β = α/η, together with the family label, its parameters, the
/// large-`k` limit when the family has one, and the smallest `k` from which
/// the closed form is known to win the internal candidate comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentValue {
    pub family: String,
    pub parameters: BTreeMap<String, String>,
    pub alpha: Rational,
    pub eta: u128,
    pub beta: Rational,
    pub limit: Option<Rational>,
    pub stable_from: Option<u64>,
}

impl ExponentValue {
    fn new(
        family: &str,
        parameters: BTreeMap<String, String>,
        alpha: Rational,
        eta: u128,
        limit: Option<Rational>,
        stable_from: Option<u64>,
    ) -> ExponentValue {
        assert!(eta > 0, "growth exponent must be positive");
        let beta = &alpha / Rational::from_integer(BigInt::from(eta));
        ExponentValue { family: family.into(), parameters, alpha, eta, beta, limit, stable_from }
    }
}

fn big_to_rat(b: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(b.clone()))
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Witt dimension `(1/i) Σ_{d|i} μ(d) k^{i/d}` of the degree-`i` part of
/// the free Lie algebra on `k` generators, via the Möbius formula. The
/// enumerative route lives in `freelie::lyndon_basis`.
pub fn witt_formula(k: u64, i: u64) -> Result<BigUint, Error> {
    if k == 0 || i == 0 {
        return Err(Error::Precondition("witt_formula needs k ≥ 1, i ≥ 1".into()));
    }
    let mut sum = BigInt::zero();
    for d in 1..=i {
        if i % d == 0 {
            sum += BigInt::from(mobius(d)?) * BigInt::from(k).pow((i / d) as u32);
        }
    }
    let q = sum / BigInt::from(i);
    q.to_biguint().ok_or_else(|| Error::Precondition("negative Witt dimension".into()))
}

/// Growth polynomial `Σ_{i ≤ s} M(s/i) k^i` of the relatively free group of
/// the unipotent group `U_s`; equals `Σ_{i ≤ s} i·witt(k, i)`.
pub fn us_growth(s: u64, k: u64) -> Result<u128, Error> {
    let mut eta = 0i128;
    for i in 1..=s {
        eta += mertens(s / i)? as i128 * (k as i128).pow(i as u32);
    }
    u128::try_from(eta).map_err(|_| Error::Precondition("growth exponent became negative".into()))
}

/// Exponent of the 3-dimensional Heisenberg group on `k` letters:
/// `β = 1 - 1/k - 2/k²` with `α = k² - k - 2` and `η = k²`.
pub fn heisenberg_beta(k: u64) -> Result<ExponentValue, Error> {
    if k < 2 {
        return Err(Error::Precondition("heisenberg_beta needs k ≥ 2".into()));
    }
    let alpha = Rational::from_integer(BigInt::from(k * k - k - 2));
    Ok(ExponentValue::new(
        "heisenberg",
        params(&[("k", k.to_string())]),
        alpha,
        (k as u128) * (k as u128),
        Some(rat_of(1, 1)),
        Some(2),
    ))
}

fn rat_of(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Step-2 groups with abelianization dimension `d1` and derived dimension
/// `d2`: `β = 1/d2 - 1/(d2 k) - 2/k²`, valid for `k ≥ d1`.
pub fn step2_beta(d1: u64, d2: u64, k: u64) -> Result<ExponentValue, Error> {
    if d2 == 0 || 2 * d2 > d1 * (d1 - 1) {
        return Err(Error::Precondition(format!(
            "need 1 ≤ d2 ≤ d1(d1-1)/2, got d1 = {d1}, d2 = {d2}"
        )));
    }
    if k < d1 {
        return Err(Error::Precondition(format!("step2_beta needs k ≥ d1 = {d1}, got k = {k}")));
    }
    let alpha = rat_of((k * (k - 1)) as i64, d2 as i64) - rat_of(2, 1);
    Ok(ExponentValue::new(
        "step2",
        params(&[("d1", d1.to_string()), ("d2", d2.to_string()), ("k", k.to_string())]),
        alpha,
        (k as u128) * (k as u128),
        Some(rat_of(1, d2 as i64)),
        Some(d1),
    ))
}

/// Metabelian nilpotent groups of step `s` with `dim G^{(s)} = dim_last`:
/// `α = s·dim E^{(s-1,1)}(k)/dim_last - s`, `η = k + Σ i·dim E^{(i-1,1)}(k)`
/// with `dim E^{(i-1,1)}(k) = (i-1)·C(i+k-2, i)`.
pub fn metabelian_beta(s: u64, dim_last: u64, k: u64) -> Result<ExponentValue, Error> {
    if s < 2 || dim_last == 0 || k == 0 {
        return Err(Error::Precondition("metabelian_beta needs s ≥ 2, dim_last ≥ 1, k ≥ 1".into()));
    }
    let module_dim = |i: u64, k: u64| -> BigUint { binomial(i + k - 2, i) * BigUint::from(i - 1) };
    let alpha = big_to_rat(&module_dim(s, k)) * rat_of(s as i64, dim_last as i64) - rat_of(s as i64, 1);
    let mut eta = BigUint::from(k);
    for i in 2..=s {
        eta += module_dim(i, k) * BigUint::from(i);
    }
    let eta = eta.to_u128().ok_or_else(|| Error::Precondition("growth exponent overflow".into()))?;

    // Smallest k from which the last-step module beats every lower-degree
    // candidate even when the lower layers of g are as small as possible
    // (dimension 1); a conservative, directly-compared surrogate for the
    // unspecified "k large enough" constant.
    let stable_from = (2..10_000).find(|&kk| {
        let last = big_to_rat(&module_dim(s, kk)) * rat_of(s as i64, dim_last as i64) - rat_of(s as i64, 1);
        let deg1 = rat_of(kk as i64 - 1, 1);
        if last < deg1 {
            return false;
        }
        (2..s).all(|i| {
            let other = (big_to_rat(&module_dim(i, kk)) - rat_of(1, 1)) * rat_of(i as i64, 1);
            last >= other
        })
    });

    Ok(ExponentValue::new(
        "metabelian",
        params(&[("s", s.to_string()), ("dim_last", dim_last.to_string()), ("k", k.to_string())]),
        alpha,
        eta,
        Some(rat_of(1, dim_last as i64)),
        stable_from,
    ))
}

/// Unipotent upper-triangular group `U_s` on `k` letters:
/// `β = (Σ_{d|s} μ(d) k^{s/d} - s) / (Σ_{i ≤ s} M(s/i) k^i)`, limit 1.
pub fn us_beta(s: u64, k: u64) -> Result<ExponentValue, Error> {
    if s < 2 || k < s {
        return Err(Error::Precondition(format!("us_beta needs s ≥ 2 and k ≥ s, got ({s},{k})")));
    }
    let alpha = (big_to_rat(&witt_formula(k, s)?) - rat_of(1, 1)) * rat_of(s as i64, 1);
    let eta = us_growth(s, k)?;

    // Layer i of u_s has dimension (s+1-i)(s+2-i)/2; the degree-i slice of
    // the free algebra generically maps onto min(witt, layer) dimensions.
    let layer = |i: u64| (s + 1 - i) * (s + 2 - i) / 2;
    let ratio = |i: u64, kk: u64| -> Result<Rational, Error> {
        let w = big_to_rat(&witt_formula(kk, i)?);
        let img = big_to_rat(&BigUint::from(layer(i))).min(w.clone());
        if img.is_zero() {
            return Ok(Rational::zero());
        }
        Ok((w - &img) / img * rat_of(i as i64, 1))
    };
    let mut stable_from = None;
    for kk in s..10_000 {
        let last = ratio(s, kk)?;
        if (1..s).map(|i| ratio(i, kk)).collect::<Result<Vec<_>, _>>()?.iter().all(|r| last >= *r) {
            stable_from = Some(kk);
            break;
        }
    }

    Ok(ExponentValue::new(
        "us",
        params(&[("s", s.to_string()), ("k", k.to_string())]),
        alpha,
        eta,
        Some(rat_of(1, 1)),
        stable_from,
    ))
}

/// Free step-`s` nilpotent group on `d ≥ s ≥ 3` generators, on `k` letters:
/// `α = s·(d_{λ0}(k) - d_{λ0}(d))/d_{λ0}(d)` for `λ0 = (2,1^{s-2})` and
/// `η = Σ M(s/i) k^i`; the limit is `1/((s-1)!·C(d+1,s))`.
///
/// At `s = 2` the diagram `λ0` degenerates to `(2)`, which the diagram
/// enumerator excludes, so the call dispatches to the step-2 formula with
/// `d2 = d(d-1)/2`.
pub fn free_beta(d: u64, s: u64, k: u64) -> Result<ExponentValue, Error> {
    if s < 2 || d < s {
        return Err(Error::Precondition(format!("free_beta needs d ≥ s ≥ 2, got (d,s) = ({d},{s})")));
    }
    if s == 2 {
        let mut v = step2_beta(d, d * (d - 1) / 2, k)?;
        v.family = "free".into();
        v.parameters.insert("d".into(), d.to_string());
        v.parameters.insert("s".into(), s.to_string());
        v.parameters.insert("dispatched".into(), "step2".to_string());
        return Ok(v);
    }
    let lam0 = YoungDiagram::new(
        std::iter::once(2).chain(std::iter::repeat(1).take(s as usize - 2)).collect(),
    )?;
    let dk = big_to_rat(&weyl_dim(&lam0, k));
    let dd = big_to_rat(&weyl_dim(&lam0, d));
    if dd.is_zero() {
        return Err(Error::Precondition("λ0 does not fit in d rows".into()));
    }
    let alpha = (dk - &dd) / dd * rat_of(s as i64, 1);
    let eta = us_growth(s, k)?;
    let limit_den = factorial(s - 1) * binomial(d + 1, s);
    let limit = rat_of(1, 1) / big_to_rat(&limit_den);

    // Smallest k ≥ d from which λ0 attains the maximum of d_λ(k)/d_λ(d)
    // over the admissible diagrams, compared exactly.
    let diagrams = klyachko_diagrams(d as usize, s as u32);
    let stable_from = (d..10_000).find(|&kk| {
        let r0 = big_to_rat(&weyl_dim(&lam0, kk)) / big_to_rat(&weyl_dim(&lam0, d));
        diagrams.iter().all(|lam| {
            let den = big_to_rat(&weyl_dim(lam, d));
            if den.is_zero() {
                return true;
            }
            r0 >= big_to_rat(&weyl_dim(lam, kk)) / den
        })
    });

    Ok(ExponentValue::new(
        "free",
        params(&[("d", d.to_string()), ("s", s.to_string()), ("k", k.to_string())]),
        alpha,
        eta,
        Some(limit),
        stable_from,
    ))
}

/// Veronese family of degree `p` powers in an algebra whose maximal
/// one-generator subalgebra has dimension `m`: `β = max{0, (p+1-m)/m}`.
pub fn veronese_beta(p: u64, m: u64) -> Result<Rational, Error> {
    if p == 0 || m == 0 {
        return Err(Error::Precondition("veronese_beta needs p ≥ 1 and m ≥ 1".into()));
    }
    let v = rat_of(p as i64 + 1 - m as i64, m as i64);
    Ok(v.max(Rational::zero()))
}

/// CSV rows `k, alpha, eta, beta, beta_decimal` for a formula family over a
/// range of `k`.
pub fn formula_csv(values: &[ExponentValue]) -> String {
    let mut out = String::from("k,alpha,eta,beta,beta_decimal\n");
    for v in values {
        let k = v.parameters.get("k").cloned().unwrap_or_default();
        let dec = v.beta.to_f64().map(|x| format!("{x:.12e}")).unwrap_or_default();
        out.push_str(&format!(
            "{k},{},{},{},{dec}\n",
            rat_string(&v.alpha),
            v.eta,
            rat_string(&v.beta)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::rat;

    fn dia(rows: &[u32]) -> YoungDiagram {
        YoungDiagram::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn mobius_and_mertens_small_values() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(mertens(1).unwrap(), 1);
        assert_eq!(mertens(3).unwrap(), -1);
        assert!(mobius(0).is_err());
        assert!(mertens(0).is_err());
    }

    #[test]
    fn weyl_dim_known_values() {
        assert_eq!(weyl_dim(&dia(&[1, 1]), 3), BigUint::from(3u32));
        // Symmetric powers: d_(s)(k) = C(k+s-1, s).
        for s in 1..=4u32 {
            for k in 1..=6u64 {
                assert_eq!(weyl_dim(&dia(&[s]), k), binomial(k + s as u64 - 1, s as u64));
            }
        }
        // (2,1^{s-2}) has dimension (s-1)·C(k+1, s).
        for s in 2..=6u64 {
            let lam = YoungDiagram::new(
                std::iter::once(2).chain(std::iter::repeat(1).take(s as usize - 2)).collect(),
            )
            .unwrap();
            for k in 1..=8u64 {
                assert_eq!(weyl_dim(&lam, k), binomial(k + 1, s) * BigUint::from(s - 1));
            }
        }
    }

    #[test]
    fn hook_content_known_values() {
        assert_eq!(hook_content_dim(&dia(&[1, 1]), 3), BigUint::from(3u32));
        // Hooks 3,1,1 and contents 0,1,-1 give (3·4·2)/3 = 8.
        assert_eq!(hook_content_dim(&dia(&[2, 1]), 3), BigUint::from(8u32));
        // Determinant-squared line for GL_2.
        assert_eq!(hook_content_dim(&dia(&[2, 2]), 2), BigUint::from(1u32));
    }

    #[test]
    fn weyl_equals_hook_content_exhaustively() {
        // All diagrams with at most 6 boxes, k ≤ 8.
        for boxes in 1..=6u32 {
            for lam in partitions(boxes, boxes as usize) {
                for k in 1..=8u64 {
                    assert_eq!(weyl_dim(&lam, k), hook_content_dim(&lam, k), "λ = {lam:?}, k = {k}");
                }
            }
        }
    }

    #[test]
    fn free_lie_module_decomposition_matches_witt() {
        // Degree 2 of the free Lie algebra is E^(1,1); degree 3 is E^(2,1).
        for k in 1..=6u64 {
            assert_eq!(weyl_dim(&dia(&[1, 1]), k), witt_formula(k, 2).unwrap());
            assert_eq!(weyl_dim(&dia(&[2, 1]), k), witt_formula(k, 3).unwrap());
        }
    }

    #[test]
    fn dominance_examples_and_exhaustive_small_range() {
        assert!(dominance_check(&dia(&[3]), &dia(&[2, 1]), 5, 3).unwrap());
        assert!(dominance_check(&dia(&[2, 1]), &dia(&[1, 1, 1]), 6, 3).unwrap());
        assert!(dominance_check(&dia(&[2, 2]), &dia(&[2, 2]), 4, 2).unwrap());
        assert!(dominance_check(&dia(&[3]), &dia(&[1, 1, 1]), 9, 3).unwrap());
        // Exhaustive over boxes ≤ 5, d ≤ 5, k ≤ 12.
        for boxes in 1..=5u32 {
            for lam in partitions(boxes, 5) {
                for mu in partitions(boxes, 5) {
                    if !lam.dominates(&mu) {
                        continue;
                    }
                    let rows = lam.num_rows().max(mu.num_rows()) as u64;
                    for d in rows..=5 {
                        for k in d..=12 {
                            assert!(
                                dominance_check(&lam, &mu, k, d).unwrap(),
                                "λ={lam:?} μ={mu:?} k={k} d={d}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dominance_rejects_bad_preconditions() {
        assert!(dominance_check(&dia(&[2, 1]), &dia(&[3]), 5, 3).is_err());
        assert!(dominance_check(&dia(&[3]), &dia(&[2, 2]), 5, 3).is_err());
        assert!(dominance_check(&dia(&[3]), &dia(&[2, 1]), 2, 3).is_err());
    }

    #[test]
    fn klyachko_exclusions_are_structural() {
        for s in 2..=6u32 {
            let d = 6usize;
            let all = partitions(s, d);
            let kept = klyachko_diagrams(d, s);
            let excluded: Vec<_> =
                all.iter().filter(|lam| !kept.contains(lam)).map(|l| l.rows().to_vec()).collect();
            let mut expected = vec![vec![s], vec![1; s as usize]];
            if s == 4 {
                expected.push(vec![2, 2]);
            }
            if s == 6 {
                expected.push(vec![2, 2, 2]);
            }
            expected.sort();
            let mut got = excluded;
            got.sort();
            assert_eq!(got, expected, "s = {s}");
        }
    }

    #[test]
    fn heisenberg_formula_values() {
        let v2 = heisenberg_beta(2).unwrap();
        assert!(v2.beta.is_zero());
        let v3 = heisenberg_beta(3).unwrap();
        assert_eq!(v3.beta, rat(4, 9));
        assert_eq!(v3.alpha, rat(4, 1));
        assert_eq!(v3.eta, 9);
        assert!(heisenberg_beta(1).is_err());
    }

    #[test]
    fn step2_reduces_to_heisenberg_and_identity_holds() {
        for k in 2..=20u64 {
            let h = heisenberg_beta(k).unwrap();
            let s = step2_beta(2, 1, k).unwrap();
            assert_eq!(h.beta, s.beta);
            assert_eq!(h.alpha, s.alpha);
        }
        let v = step2_beta(4, 3, 6).unwrap();
        assert_eq!(v.beta, rat(2, 9));
        // alpha = beta * eta exactly, for a spread of parameters.
        for (d1, d2, k) in [(3, 2, 5), (4, 6, 7), (5, 10, 11)] {
            let v = step2_beta(d1, d2, k).unwrap();
            assert_eq!(v.alpha, &v.beta * Rational::from_integer(BigInt::from(v.eta)));
        }
        assert!(step2_beta(3, 9, 5).is_err());
        assert!(step2_beta(4, 3, 3).is_err());
    }

    #[test]
    fn metabelian_values() {
        // s=2 agrees with step2 for every admissible d2.
        for k in 4..=10u64 {
            for d2 in 1..=3u64 {
                let m = metabelian_beta(2, d2, k).unwrap();
                let s = step2_beta(3, d2, k).unwrap();
                assert_eq!(m.beta, s.beta);
            }
        }
        // s=3, dim_last=1, k=4: dim E^(2,1)(4) = 20, alpha = 57, eta = 76.
        let v = metabelian_beta(3, 1, 4).unwrap();
        assert_eq!(v.alpha, rat(57, 1));
        assert_eq!(v.eta, 76);
        assert_eq!(v.beta, rat(57, 76));
        assert_eq!(v.limit, Some(rat(1, 1)));
    }

    #[test]
    fn us_beta_values() {
        // s=2 is the Heisenberg formula for all k.
        for k in 2..=20u64 {
            assert_eq!(us_beta(2, k).unwrap().beta, heisenberg_beta(k).unwrap().beta);
        }
        let v = us_beta(3, 3).unwrap();
        assert_eq!(v.alpha, rat(21, 1));
        assert_eq!(v.eta, 33);
        assert_eq!(v.beta, rat(7, 11));
        assert_eq!(v.limit, Some(rat(1, 1)));
        assert!(us_beta(3, 2).is_err());
    }

    #[test]
    fn free_beta_values() {
        // d=s=3, k=4: (3/4)·(C(5,3) - C(4,3))/(4³+4²-4) = 9/152.
        let v = free_beta(3, 3, 4).unwrap();
        assert_eq!(v.beta, rat(9, 152));
        assert_eq!(v.limit, Some(rat(1, 8)));
        // s=2 dispatches to the step-2 formula with d2 = d(d-1)/2.
        let f = free_beta(3, 2, 5).unwrap();
        let s = step2_beta(3, 3, 5).unwrap();
        assert_eq!(f.beta, s.beta);
        assert_eq!(f.parameters.get("dispatched").map(String::as_str), Some("step2"));
        assert!(free_beta(2, 3, 5).is_err());
    }

    #[test]
    fn free_beta_matches_paper_expression_symbolically() {
        // Independent route: (s/C(d+1,s))·(C(k+1,s) - C(d+1,s))/Σ M(s/i)k^i.
        let (d, s) = (3u64, 3u64);
        for k in 3..=12u64 {
            let v = free_beta(d, s, k).unwrap();
            let num = big_to_rat(&binomial(k + 1, s)) - big_to_rat(&binomial(d + 1, s));
            let expect = rat(s as i64, 1) / big_to_rat(&binomial(d + 1, s)) * num
                / Rational::from_integer(BigInt::from(us_growth(s, k).unwrap()));
            assert_eq!(v.beta, expect, "k = {k}");
        }
    }

    #[test]
    fn veronese_values() {
        assert_eq!(veronese_beta(3, 2).unwrap(), rat(1, 1));
        assert_eq!(veronese_beta(3, 4).unwrap(), rat(0, 1));
        assert_eq!(veronese_beta(2, 1).unwrap(), rat(2, 1));
        for p in 1..=3u64 {
            for m in (p + 1)..=(p + 3) {
                assert!(veronese_beta(p, m).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn every_exponent_value_satisfies_beta_eta_alpha() {
        let mut all = vec![heisenberg_beta(5).unwrap(), us_beta(4, 5).unwrap()];
        all.push(metabelian_beta(4, 2, 6).unwrap());
        all.push(free_beta(4, 3, 7).unwrap());
        for v in all {
            assert_eq!(v.alpha, &v.beta * Rational::from_integer(BigInt::from(v.eta)));
        }
    }

    #[test]
    fn csv_emission_shape() {
        let rows = vec![heisenberg_beta(3).unwrap()];
        let csv = formula_csv(&rows);
        assert!(csv.starts_with("k,alpha,eta,beta,beta_decimal\n"));
        assert!(csv.contains("3,4,9,4/9,"));
    }
}
