//! The free nilpotent Lie algebra on `k` generators of step `s`.
//!
//! Basis elements are Lyndon words with their standard-factorization
//! bracketing; elements are finite rational combinations of basis words.
//! Normal forms are computed through the embedding into the (truncated)
//! free associative algebra: the bracket polynomial of a Lyndon word `w`
//! is `w` plus lexicographically larger monomials of the same degree, so a
//! Lie polynomial rewrites onto the basis by repeatedly stripping its
//! smallest monomial. Products of degree above `s` are truncated to zero,
//! which is exactly the step-`s` quotient.
//!
//! Basis order is degree-major, lexicographic within a degree; this order
//! is what all downstream flags and serialized coordinates use.

use crate::error::Error;
use crate::qlinalg::{rat_parse, rat_string, Rational};
use crate::repthy;
use num::{One, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

/// Largest step for which the BCH series is generated.
pub const MAX_BCH_STEP: usize = 6;

/// A Lyndon word over the alphabet `{1, …, k}`: strictly smaller than every
/// proper cyclic rotation, equivalently than every proper suffix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LyndonWord {
    letters: Vec<u8>,
}

impl LyndonWord {
    pub fn new(letters: Vec<u8>) -> Result<LyndonWord, Error> {
        if letters.is_empty() || letters.iter().any(|&c| c == 0) {
            return Err(Error::Parse("letters must be a nonempty sequence over 1..=k".into()));
        }
        if !is_lyndon(&letters) {
            return Err(Error::Parse(format!("{letters:?} is not a Lyndon word")));
        }
        Ok(LyndonWord { letters })
    }

    pub fn letter(i: u8) -> LyndonWord {
        LyndonWord { letters: vec![i] }
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    /// Standard factorization `w = (u, v)` with `v` the lexicographically
    /// least proper suffix; both factors are Lyndon and the recursive
    /// bracketing `[b_u, b_v]` is the basis element for `w`.
    pub fn standard_factorization(&self) -> Option<(LyndonWord, LyndonWord)> {
        if self.degree() < 2 {
            return None;
        }
        let w = &self.letters;
        let mut best = 1;
        for i in 2..w.len() {
            if w[i..] < w[best..] {
                best = i;
            }
        }
        Some((LyndonWord { letters: w[..best].to_vec() }, LyndonWord { letters: w[best..].to_vec() }))
    }
}

impl PartialOrd for LyndonWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LyndonWord {
    /// Degree-major, lexicographic within a degree.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.letters.cmp(&other.letters))
    }
}

impl fmt::Display for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x[")?;
        for (i, c) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

fn is_lyndon(w: &[u8]) -> bool {
    (1..w.len()).all(|i| w < &w[i..])
}

/// All Lyndon words of length ≤ `s` over `{1..=k}` by Duval's algorithm,
/// returned in degree-major, lexicographic-minor order.
fn lyndon_words(k: u8, s: usize) -> Vec<LyndonWord> {
    let mut out: Vec<Vec<u8>> = Vec::new();
    let mut w = vec![1u8];
    loop {
        out.push(w.clone());
        let mut t: Vec<u8> = (0..s).map(|i| w[i % w.len()]).collect();
        while let Some(&last) = t.last() {
            if last == k {
                t.pop();
            } else {
                break;
            }
        }
        if t.is_empty() {
            break;
        }
        *t.last_mut().unwrap() += 1;
        w = t;
    }
    let mut words: Vec<LyndonWord> = out.into_iter().map(|letters| LyndonWord { letters }).collect();
    words.sort();
    words
}

/// Witt dimension of the degree-`i` homogeneous part of the free Lie
/// algebra on `k` generators, `(1/i) Σ_{d|i} μ(d) k^{i/d}`.
pub fn witt_dim(k: usize, i: usize) -> usize {
    repthy::witt_formula(k as u64, i as u64)
        .expect("witt_dim needs k ≥ 1, i ≥ 1")
        .to_usize()
        .expect("witt dimension fits a machine word at supported sizes")
}

/// The Lyndon basis of `F_{k,s}`, with the standard-factorization bracketing
/// of each word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeLieBasis {
    k: u8,
    s: usize,
    words: Vec<LyndonWord>,
    index: BTreeMap<LyndonWord, usize>,
}

impl FreeLieBasis {
    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn step(&self) -> usize {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[LyndonWord] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &LyndonWord {
        &self.words[i]
    }

    pub fn index_of(&self, w: &LyndonWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Indices of the degree-`i` slice (contiguous by the basis order).
    pub fn degree_range(&self, i: usize) -> std::ops::Range<usize> {
        let start = self.words.partition_point(|w| w.degree() < i);
        let end = self.words.partition_point(|w| w.degree() <= i);
        start..end
    }
}

/// Lyndon basis of the free step-`s` nilpotent Lie algebra on `k` generators.
pub fn lyndon_basis(k: usize, s: usize) -> FreeLieBasis {
    assert!(k >= 1 && s >= 1, "lyndon_basis needs k ≥ 1 and s ≥ 1");
    assert!(k <= u8::MAX as usize, "alphabet too large");
    let words = lyndon_words(k as u8, s);
    let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    FreeLieBasis { k: k as u8, s, words, index }
}

/// Element of `F_{k,s}` in the Lyndon basis; zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    k: u8,
    s: usize,
    terms: BTreeMap<LyndonWord, Rational>,
}

impl LieElement {
    pub fn zero(k: usize, s: usize) -> LieElement {
        LieElement { k: k as u8, s, terms: BTreeMap::new() }
    }

    pub fn generator(k: usize, s: usize, i: u8) -> LieElement {
        assert!(i >= 1 && i as usize <= k);
        let mut terms = BTreeMap::new();
        terms.insert(LyndonWord::letter(i), Rational::one());
        LieElement { k: k as u8, s, terms }
    }

    pub fn from_terms(
        k: usize,
        s: usize,
        terms: Vec<(LyndonWord, Rational)>,
    ) -> Result<LieElement, Error> {
        let mut e = LieElement::zero(k, s);
        for (w, c) in terms {
            if w.degree() > s {
                return Err(Error::Precondition(format!("word {w} exceeds step {s}")));
            }
            if w.letters().iter().any(|&l| l as usize > k) {
                return Err(Error::Precondition(format!("word {w} uses letters above {k}")));
            }
            e.add_term(&w, &c);
        }
        Ok(e)
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn step(&self) -> usize {
        self.s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LyndonWord, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &LyndonWord) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest degree of a stored word, 0 for the zero element.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(LyndonWord::degree).max().unwrap_or(0)
    }

    /// The degree-`i` homogeneous component.
    pub fn component(&self, i: usize) -> LieElement {
        LieElement {
            k: self.k,
            s: self.s,
            terms: self.terms.iter().filter(|(w, _)| w.degree() == i).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    fn add_term(&mut self, w: &LyndonWord, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(w);
        }
    }

    pub fn add(&self, other: &LieElement) -> Result<LieElement, Error> {
        self.check_basis(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w, c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> LieElement {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &LieElement) -> Result<LieElement, Error> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> LieElement {
        if c.is_zero() {
            return LieElement::zero(self.k as usize, self.s);
        }
        LieElement {
            k: self.k,
            s: self.s,
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    /// Lie bracket in normal form, with degrees above the step truncated.
    pub fn bracket(&self, other: &LieElement) -> Result<LieElement, Error> {
        self.check_basis(other)?;
        let a = self.to_assoc();
        let b = other.to_assoc();
        let mut p = assoc_mul(&a, &b, self.s);
        assoc_sub(&mut p, &assoc_mul(&b, &a, self.s));
        Ok(lie_decompose(p, self.k as usize, self.s))
    }

    /// Expansion in the truncated free associative algebra.
    fn to_assoc(&self) -> Assoc {
        let mut out = Assoc::new();
        for (w, c) in &self.terms {
            for (m, v) in assoc_of_word(w) {
                add_monomial(&mut out, m, v * c);
            }
        }
        out
    }

    fn check_basis(&self, other: &LieElement) -> Result<(), Error> {
        if self.k != other.k || self.s != other.s {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    /// JSON form `{"k":…, "s":…, "terms":[{"word":[1,2], "coeff":"1/2"}]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "s": self.s,
            "terms": self.terms.iter().map(|(w, c)| json!({
                "word": w.letters(),
                "coeff": rat_string(c),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<LieElement, Error> {
        let k = v["k"].as_u64().ok_or_else(|| Error::Parse("missing k".into()))? as usize;
        let s = v["s"].as_u64().ok_or_else(|| Error::Parse("missing s".into()))? as usize;
        let mut terms = Vec::new();
        for t in v["terms"].as_array().ok_or_else(|| Error::Parse("missing terms".into()))? {
            let letters = t["word"]
                .as_array()
                .ok_or_else(|| Error::Parse("term without word".into()))?
                .iter()
                .map(|x| x.as_u64().map(|n| n as u8).ok_or_else(|| Error::Parse("bad letter".into())))
                .collect::<Result<Vec<_>, _>>()?;
            let coeff = rat_parse(
                t["coeff"].as_str().ok_or_else(|| Error::Parse("term without coeff".into()))?,
            )?;
            terms.push((LyndonWord::new(letters)?, coeff));
        }
        LieElement::from_terms(k, s, terms)
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·{w}", rat_string(c))?;
        }
        Ok(())
    }
}

// -- truncated free associative algebra -----------------------------------

type Assoc = BTreeMap<Vec<u8>, Rational>;

fn add_monomial(p: &mut Assoc, m: Vec<u8>, c: Rational) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(m).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        let key = p.iter().find(|(_, v)| v.is_zero()).map(|(k, _)| k.clone());
        if let Some(key) = key {
            p.remove(&key);
        }
    }
}

fn assoc_sub(p: &mut Assoc, q: &Assoc) {
    for (m, c) in q {
        add_monomial(p, m.clone(), -c.clone());
    }
}

fn assoc_mul(a: &Assoc, b: &Assoc, s: usize) -> Assoc {
    let mut out = Assoc::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            if ma.len() + mb.len() > s {
                continue;
            }
            let mut m = ma.clone();
            m.extend_from_slice(mb);
            add_monomial(&mut out, m, ca * cb);
        }
    }
    out
}

/// Associative expansion of the bracketed Lyndon word, via its standard
/// factorization.
fn assoc_of_word(w: &LyndonWord) -> Assoc {
    match w.standard_factorization() {
        None => {
            let mut p = Assoc::new();
            p.insert(w.letters().to_vec(), Rational::one());
            p
        }
        Some((u, v)) => {
            let a = assoc_of_word(&u);
            let b = assoc_of_word(&v);
            let deg = w.degree();
            let mut p = assoc_mul(&a, &b, deg);
            assoc_sub(&mut p, &assoc_mul(&b, &a, deg));
            p
        }
    }
}

/// Rewrite a Lie polynomial given in the associative algebra onto the
/// Lyndon basis. The smallest monomial of a Lie element is a Lyndon word
/// and carries the basis coefficient, so stripping smallest monomials
/// terminates with the normal form.
fn lie_decompose(mut p: Assoc, k: usize, s: usize) -> LieElement {
    let mut out = LieElement::zero(k, s);
    while let Some((m, _)) = p.iter().next() {
        let m = m.clone();
        let c = p[&m].clone();
        let w = LyndonWord::new(m.clone()).unwrap_or_else(|_| {
            panic!("leading monomial {m:?} of a Lie polynomial must be Lyndon")
        });
        out.add_term(&w, &c);
        for (mm, v) in assoc_of_word(&w) {
            add_monomial(&mut p, mm, -v * &c);
        }
    }
    out
}

/// Coefficients of `log(exp x · exp y)` in the Lyndon basis of `F_{2,s}`,
/// computed in the truncated associative algebra. Supported for `s ≤ 6`.
pub fn bch_series(s: usize) -> Result<LieElement, Error> {
    if s == 0 || s > MAX_BCH_STEP {
        return Err(Error::StepTooLarge { step: s, max: MAX_BCH_STEP });
    }
    // exp(x)·exp(y) - 1, all monomials x^i y^j / (i! j!) of degree 1..=s.
    let mut u = Assoc::new();
    for i in 0..=s {
        for j in 0..=s - i {
            if i + j == 0 {
                continue;
            }
            let mut m = vec![1u8; i];
            m.extend(std::iter::repeat(2u8).take(j));
            let denom = repthy::factorial(i as u64) * repthy::factorial(j as u64);
            add_monomial(&mut u, m, Rational::new(1.into(), num::BigInt::from(denom)));
        }
    }
    // log(1 + u) = Σ (-1)^{n+1} u^n / n, truncated at degree s.
    let mut log = Assoc::new();
    let mut power = u.clone();
    for n in 1..=s {
        let sign = if n % 2 == 1 { Rational::one() } else { -Rational::one() };
        let c = sign / Rational::from_integer(n.into());
        for (m, v) in &power {
            add_monomial(&mut log, m.clone(), v * &c);
        }
        if n < s {
            power = assoc_mul(&power, &u, s);
        }
    }
    Ok(lie_decompose(log, 2, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{rat, rat_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn word(letters: &[u8]) -> LyndonWord {
        LyndonWord::new(letters.to_vec()).unwrap()
    }

    fn random_element(rng: &mut ChaCha8Rng, basis: &FreeLieBasis) -> LieElement {
        let terms = basis
            .words()
            .iter()
            .map(|w| (w.clone(), rat_int(rng.random_range(-5..=5))))
            .collect();
        LieElement::from_terms(basis.k() as usize, basis.step(), terms).unwrap()
    }

    #[test]
    fn lyndon_basis_smallest_cases() {
        let b = lyndon_basis(2, 1);
        assert_eq!(b.words(), &[word(&[1]), word(&[2])]);
        let b = lyndon_basis(2, 2);
        assert_eq!(b.degree_range(2).len(), 1);
        assert_eq!(b.word(b.degree_range(2).start), &word(&[1, 2]));
        let b = lyndon_basis(3, 3);
        assert_eq!(b.degree_range(3).len(), 8);
    }

    #[test]
    fn lyndon_counts_match_witt_formula() {
        // Enumerative route vs Möbius route, k ≤ 5, i ≤ s ≤ 6.
        for k in 1..=5usize {
            let b = lyndon_basis(k, 6);
            for i in 1..=6usize {
                assert_eq!(b.degree_range(i).len(), witt_dim(k, i), "k = {k}, i = {i}");
            }
        }
    }

    #[test]
    fn standard_factorization_splits_into_lyndon_pairs() {
        for w in lyndon_basis(3, 6).words() {
            if let Some((u, v)) = w.standard_factorization() {
                assert!(is_lyndon(u.letters()));
                assert!(is_lyndon(v.letters()));
                assert!(u.letters() < v.letters());
                let mut cat = u.letters().to_vec();
                cat.extend_from_slice(v.letters());
                assert_eq!(cat, w.letters());
            }
        }
    }

    #[test]
    fn bracket_antisymmetry_and_self_annihilation() {
        let x1 = LieElement::generator(2, 3, 1);
        let x2 = LieElement::generator(2, 3, 2);
        assert!(x1.bracket(&x1).unwrap().is_zero());
        let ab = x1.bracket(&x2).unwrap();
        let ba = x2.bracket(&x1).unwrap();
        assert!(ab.add(&ba).unwrap().is_zero());
        assert_eq!(ab.coeff(&word(&[1, 2])), rat_int(1));
    }

    #[test]
    fn jacobi_identity_on_generators() {
        let b = lyndon_basis(3, 3);
        let x = |i| LieElement::generator(b.k() as usize, b.step(), i);
        let j = x(1)
            .bracket(&x(2))
            .unwrap()
            .bracket(&x(3))
            .unwrap()
            .add(&x(2).bracket(&x(3)).unwrap().bracket(&x(1)).unwrap())
            .unwrap()
            .add(&x(3).bracket(&x(1)).unwrap().bracket(&x(2)).unwrap())
            .unwrap();
        assert!(j.is_zero());
    }

    #[test]
    fn bracket_is_bilinear_antisymmetric_jacobi_on_random_triples() {
        let basis = lyndon_basis(2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = random_element(&mut rng, &basis);
            let b = random_element(&mut rng, &basis);
            let c = random_element(&mut rng, &basis);
            // bilinearity in the first slot
            let lhs = a.add(&b).unwrap().bracket(&c).unwrap();
            let rhs = a.bracket(&c).unwrap().add(&b.bracket(&c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            // antisymmetry
            assert!(a.bracket(&b).unwrap().add(&b.bracket(&a).unwrap()).unwrap().is_zero());
            // Jacobi
            let j = a
                .bracket(&b)
                .unwrap()
                .bracket(&c)
                .unwrap()
                .add(&b.bracket(&c).unwrap().bracket(&a).unwrap())
                .unwrap()
                .add(&c.bracket(&a).unwrap().bracket(&b).unwrap())
                .unwrap();
            assert!(j.is_zero(), "Jacobi failed");
        }
    }

    #[test]
    fn brackets_beyond_the_step_truncate_to_zero() {
        let x1 = LieElement::generator(2, 2, 1);
        let x2 = LieElement::generator(2, 2, 2);
        let c = x1.bracket(&x2).unwrap();
        assert!(c.bracket(&x1).unwrap().is_zero());
    }

    #[test]
    fn basis_mismatch_is_an_error() {
        let a = LieElement::generator(2, 2, 1);
        let b = LieElement::generator(2, 3, 1);
        assert_eq!(a.bracket(&b), Err(Error::BasisMismatch));
    }

    #[test]
    fn bch_series_low_degrees() {
        let z = bch_series(2).unwrap();
        assert_eq!(z.coeff(&word(&[1])), rat_int(1));
        assert_eq!(z.coeff(&word(&[2])), rat_int(1));
        assert_eq!(z.coeff(&word(&[1, 2])), rat(1, 2));
        let z3 = bch_series(3).unwrap();
        // Degree-3 terms: [x,[x,y]]/12 and [[x,y],y]/12 in the Lyndon basis
        // b_112 = [x,[x,y]] and b_122 = [x,[x,y]...]; fixed coefficients.
        assert_eq!(z3.coeff(&word(&[1, 1, 2])), rat(1, 12));
        assert_eq!(z3.coeff(&word(&[1, 2, 2])), rat(1, 12));
        assert!(bch_series(7).is_err());
    }

    #[test]
    fn lie_element_json_round_trip() {
        let basis = lyndon_basis(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let e = random_element(&mut rng, &basis);
            assert_eq!(LieElement::from_json(&e.to_json()).unwrap(), e);
        }
    }
}
