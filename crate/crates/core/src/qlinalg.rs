//! Exact rational linear algebra.
//!
//! Matrices are dense and row-major over arbitrary-precision rationals.
//! A [`Subspace`] always stores the reduced row-echelon basis of its row
//! space, so subspace equality is plain structural equality and the lattice
//! operations (sum, intersection) land back in canonical form.
//!
//! Serialized rationals are the strings `"p/q"`, or `"p"` when `q = 1`;
//! matrices serialize as row-major arrays of such strings.

use crate::error::Error;
use num::{BigRational, One, Zero};

/// Exact scalar: arbitrary-precision rational, always in lowest terms with a
/// positive denominator (maintained by the underlying representation).
pub type Rational = BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Parse `"p/q"` or `"p"`.
pub fn rat_parse(s: &str) -> Result<Rational, Error> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

/// Canonical string form `"p/q"`, or `"p"` when the denominator is 1.
pub fn rat_string(r: &Rational) -> String {
    r.to_string()
}

/// Dense rational matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Build from row vectors. All rows must share a length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    /// Build from integer rows, for tests and fixtures.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&n| rat_int(n)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<Rational> {
        self.row(i).to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let mut out = QMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j).clone();
                        out.set(i, j, cur + a * b);
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Stack `below` underneath `self`.
    pub fn stack(&self, below: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, below.cols, "column count mismatch");
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&below.entries);
        QMatrix { rows: self.rows + below.rows, cols: self.cols, entries }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// In-place reduction to reduced row echelon form; returns pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self.get(r, c).recip();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.get(i, c).is_zero() {
                    let f = self.get(i, c).clone();
                    for j in c..self.cols {
                        let v = self.get(i, j) - &f * self.get(r, j);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Row rank over the rationals, computed exactly.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Canonical basis of the right kernel `{v : self * v = 0}`.
    pub fn kernel(&self) -> Subspace {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let pivot_set: Vec<Option<usize>> = {
            let mut ps = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                ps[c] = Some(r);
            }
            ps
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -m.get(r, free).clone();
            }
            basis.push(v);
        }
        Subspace::from_rows(self.cols, basis)
    }
}

/// A linear subspace of `Q^ambient`, stored as the reduced row-echelon basis
/// of its row space. Equal subspaces have identical representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: QMatrix,
}

impl Subspace {
    /// Canonicalize arbitrary spanning rows.
    pub fn from_rows(ambient: usize, rows: Vec<Vec<Rational>>) -> Subspace {
        for row in &rows {
            assert_eq!(row.len(), ambient, "row length must equal ambient dimension");
        }
        let mut m = QMatrix::from_rows(rows);
        if m.rows == 0 {
            m = QMatrix::zero(0, ambient);
        }
        let pivots = m.rref_in_place();
        let rank = pivots.len();
        let mut basis = QMatrix::zero(rank, ambient);
        for i in 0..rank {
            for j in 0..ambient {
                basis.set(i, j, m.get(i, j).clone());
            }
        }
        Subspace { ambient, basis }
    }

    pub fn from_matrix(m: &QMatrix) -> Subspace {
        Subspace::from_rows(m.cols, (0..m.rows).map(|i| m.row_vec(i)).collect())
    }

    pub fn zero(ambient: usize) -> Subspace {
        Subspace { ambient, basis: QMatrix::zero(0, ambient) }
    }

    pub fn full(ambient: usize) -> Subspace {
        Subspace { ambient, basis: QMatrix::identity(ambient) }
    }

    /// Span of a set of coordinate axes.
    pub fn coordinate_span(ambient: usize, coords: &[usize]) -> Subspace {
        let rows = coords
            .iter()
            .map(|&c| {
                let mut v = vec![Rational::zero(); ambient];
                v[c] = Rational::one();
                v
            })
            .collect();
        Subspace::from_rows(ambient, rows)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.dim()).map(|i| self.basis.row_vec(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Membership test by reduction against the echelon basis.
    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut w = v.to_vec();
        for i in 0..self.dim() {
            let pivot = (0..self.ambient)
                .find(|&j| !self.basis.get(i, j).is_zero())
                .expect("echelon basis has no zero rows");
            if !w[pivot].is_zero() {
                let f = w[pivot].clone();
                for j in pivot..self.ambient {
                    w[j] = &w[j] - &f * self.basis.get(i, j);
                }
            }
        }
        w.iter().all(Zero::is_zero)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient);
        (0..other.dim()).all(|i| self.contains_vector(other.basis.row(i)))
    }

    /// Sum of subspaces: echelonize the stacked bases.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, Error> {
        self.check_ambient(other, "sum")?;
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Ok(Subspace::from_rows(self.ambient, rows))
    }

    /// Intersection, computed through the kernel of the stacked dual system:
    /// coefficients `(a, b)` with `aᵀA = bᵀB` are the kernel of `[Aᵀ | -Bᵀ]`,
    /// and each solution re-expands to a vector in both spaces.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, Error> {
        self.check_ambient(other, "intersect")?;
        let (ra, rb) = (self.dim(), other.dim());
        if ra == 0 || rb == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        let mut system = QMatrix::zero(self.ambient, ra + rb);
        for j in 0..self.ambient {
            for i in 0..ra {
                system.set(j, i, self.basis.get(i, j).clone());
            }
            for i in 0..rb {
                system.set(j, ra + i, -other.basis.get(i, j).clone());
            }
        }
        let coeffs = system.kernel();
        let rows = (0..coeffs.dim())
            .map(|r| {
                let c = coeffs.basis().row(r);
                (0..self.ambient)
                    .map(|j| {
                        let mut acc = Rational::zero();
                        for i in 0..ra {
                            if !c[i].is_zero() {
                                acc += &c[i] * self.basis.get(i, j);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(Subspace::from_rows(self.ambient, rows))
    }

    /// Intersection dimensions `dim(self ∩ V_i)` along an increasing flag
    /// whose last member is the full ambient space.
    pub fn flag_dims(&self, flag: &[Subspace]) -> Result<Vec<usize>, Error> {
        let last = flag.last().ok_or(Error::FlagNotNested)?;
        if last.dim() != self.ambient || last.ambient != self.ambient {
            return Err(Error::FlagNotNested);
        }
        for w in flag.windows(2) {
            if w[0].ambient != self.ambient || !w[1].contains(&w[0]) {
                return Err(Error::FlagNotNested);
            }
        }
        let mut dims = Vec::with_capacity(flag.len());
        for v in flag {
            dims.push(self.intersect(v)?.dim());
        }
        Ok(dims)
    }

    /// Pivot columns of the echelon basis. Row `j` of the basis has its
    /// first nonzero entry in column `pivots[j]`, so
    /// `dim(self ∩ span{e_{i+1},…,e_d}) = #{j : pivots[j] > i}` (0-based `i`).
    pub fn leading_profile(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| {
                (0..self.ambient)
                    .find(|&j| !self.basis.get(i, j).is_zero())
                    .expect("echelon basis has no zero rows")
            })
            .collect()
    }

    /// Last-nonzero columns after echelonizing from the right; sorted. Row
    /// `j` of that reversed echelon basis is supported on columns
    /// `0..=profile[j]`, so `dim(self ∩ span{e_1,…,e_i}) = #{j : profile[j] < i}`
    /// (1-based `i`).
    pub fn trailing_profile(&self) -> Vec<usize> {
        let d = self.ambient;
        let mut rev = QMatrix::zero(self.dim(), d);
        for i in 0..self.dim() {
            for j in 0..d {
                rev.set(i, j, self.basis.get(i, d - 1 - j).clone());
            }
        }
        let pivots = rev.rref_in_place();
        let mut profile: Vec<usize> = pivots.into_iter().map(|p| d - 1 - p).collect();
        profile.sort_unstable();
        profile
    }

    fn check_ambient(&self, other: &Subspace, context: &'static str) -> Result<(), Error> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: other.ambient,
                context,
            });
        }
        Ok(())
    }
}

/// Rank tracking modulo a large prime.
///
/// Dependence mod p can only over-report: a row independent over the
/// rationals is dependent mod p with probability on the order of 1/p, and
/// a row dependent over the rationals is always dependent mod p. Rank mod
/// p therefore never exceeds the rational rank, and saturation mod p
/// (rank = column count) certifies a zero rational kernel exactly.
#[derive(Debug, Clone)]
pub struct ModRankAccumulator {
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

/// 2^61 - 1, a Mersenne prime comfortably above every height that occurs.
pub const RANK_PRIME: u64 = 2_305_843_009_213_693_951;

fn mod_mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % RANK_PRIME as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base);
        }
        base = mod_mul(base, base);
        exp >>= 1;
    }
    acc
}

fn mod_inv(a: u64) -> u64 {
    mod_pow(a, RANK_PRIME - 2)
}

/// Residue of a rational, reduced into `[0, p)`.
pub fn rat_mod_p(r: &Rational) -> u64 {
    use num::BigInt;
    let p = BigInt::from(RANK_PRIME);
    let numer = ((r.numer() % &p) + &p) % &p;
    let denom = ((r.denom() % &p) + &p) % &p;
    let n: u64 = numer.try_into().expect("residue fits u64");
    let d: u64 = denom.try_into().expect("residue fits u64");
    assert!(d != 0, "denominator divisible by the rank prime");
    mod_mul(n, mod_inv(d))
}

impl ModRankAccumulator {
    pub fn new(cols: usize) -> Self {
        ModRankAccumulator { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce and insert one residue row; returns whether the rank grew.
    pub fn add_row(&mut self, mut row: Vec<u64>) -> bool {
        assert_eq!(row.len(), self.cols);
        for (r, &p) in self.pivots.iter().enumerate() {
            if row[p] != 0 {
                let f = row[p];
                for j in 0..self.cols {
                    let sub = mod_mul(f, self.rows[r][j]);
                    row[j] = (row[j] + RANK_PRIME - sub) % RANK_PRIME;
                }
            }
        }
        let Some(pivot) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_inv(row[pivot]);
        for x in row.iter_mut() {
            *x = mod_mul(*x, inv);
        }
        self.pivots.push(pivot);
        self.rows.push(row);
        true
    }

    pub fn add_rational_row(&mut self, row: &[Rational]) -> bool {
        self.add_row(row.iter().map(rat_mod_p).collect())
    }
}

/// Incremental reduced-row-echelon accumulator for constraint rows.
///
/// Rows arrive one at a time; the matrix is kept fully reduced so the rank
/// and the kernel are available at any point. Used where many samples each
/// contribute a few constraints and most arrive already dependent.
#[derive(Debug, Clone)]
pub struct RrefAccumulator {
    cols: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl RrefAccumulator {
    pub fn new(cols: usize) -> Self {
        RrefAccumulator { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduce and insert one row; returns whether the rank grew.
    pub fn add_row(&mut self, mut row: Vec<Rational>) -> bool {
        assert_eq!(row.len(), self.cols);
        for (r, &p) in self.pivots.iter().enumerate() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for j in 0..self.cols {
                    let v = &row[j] - &f * &self.rows[r][j];
                    row[j] = v;
                }
            }
        }
        let Some(pivot) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[pivot].recip();
        for x in row.iter_mut() {
            *x *= &inv;
        }
        // Back-substitute into the existing rows, then keep rows ordered by
        // pivot column.
        for (r, _) in self.pivots.clone().iter().enumerate() {
            if !self.rows[r][pivot].is_zero() {
                let f = self.rows[r][pivot].clone();
                for j in 0..self.cols {
                    let v = &self.rows[r][j] - &f * &row[j];
                    self.rows[r][j] = v;
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.pivots.insert(at, pivot);
        self.rows.insert(at, row);
        true
    }

    /// The accumulated independent rows, fully reduced.
    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Canonical basis of `{v : Rv = 0}` for the accumulated rows.
    pub fn kernel(&self) -> Subspace {
        if self.rows.is_empty() {
            return Subspace::full(self.cols);
        }
        QMatrix::from_rows(self.rows.clone()).kernel()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> QMatrix {
        QMatrix::from_rows(
            (0..rows)
                .map(|_| (0..cols).map(|_| rat_int(rng.random_range(-10..=10))).collect())
                .collect(),
        )
    }

    fn random_subspace(rng: &mut ChaCha8Rng, ambient: usize) -> Subspace {
        let rows = rng.random_range(0..=ambient);
        Subspace::from_rows(
            ambient,
            (0..rows)
                .map(|_| (0..ambient).map(|_| rat_int(rng.random_range(-10..=10))).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_identity_and_zero() {
        assert_eq!(QMatrix::identity(3).rank(), 3);
        assert_eq!(QMatrix::zero(2, 3).rank(), 0);
    }

    #[test]
    fn rank_dependent_rows() {
        let m = QMatrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_identity_is_zero_subspace() {
        assert_eq!(QMatrix::identity(4).kernel(), Subspace::zero(4));
    }

    #[test]
    fn kernel_of_single_row() {
        let m = QMatrix::from_int_rows(&[&[1, 1]]);
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        assert!(k.contains_vector(&[rat_int(1), rat_int(-1)]));
    }

    #[test]
    fn kernel_of_zero_map_is_everything() {
        assert_eq!(QMatrix::zero(2, 3).kernel(), Subspace::full(3));
    }

    #[test]
    fn intersect_idempotent_and_axes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = random_subspace(&mut rng, 5);
        assert_eq!(w.intersect(&w).unwrap(), w);
        let e1 = Subspace::coordinate_span(2, &[0]);
        let e2 = Subspace::coordinate_span(2, &[1]);
        assert_eq!(e1.intersect(&e2).unwrap(), Subspace::zero(2));
    }

    #[test]
    fn intersect_by_hand() {
        // span{e1+e2, e3} ∩ span{e2, e3} = span{e3} in Q^3
        let a = Subspace::from_matrix(&QMatrix::from_int_rows(&[&[1, 1, 0], &[0, 0, 1]]));
        let b = Subspace::from_matrix(&QMatrix::from_int_rows(&[&[0, 1, 0], &[0, 0, 1]]));
        assert_eq!(a.intersect(&b).unwrap(), Subspace::coordinate_span(3, &[2]));
    }

    #[test]
    fn sum_by_hand() {
        let a = Subspace::from_matrix(&QMatrix::from_int_rows(&[&[1, 1]]));
        let b = Subspace::from_matrix(&QMatrix::from_int_rows(&[&[1, -1]]));
        assert_eq!(a.sum(&b).unwrap(), Subspace::full(2));
        let w = Subspace::from_matrix(&QMatrix::from_int_rows(&[&[1, 2]]));
        assert_eq!(w.sum(&Subspace::zero(2)).unwrap(), w);
        let e1 = Subspace::coordinate_span(3, &[0]);
        let e2 = Subspace::coordinate_span(3, &[1]);
        assert_eq!(e1.sum(&e2).unwrap(), Subspace::coordinate_span(3, &[0, 1]));
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Subspace::full(2);
        let b = Subspace::full(3);
        assert!(a.sum(&b).is_err());
        assert!(a.intersect(&b).is_err());
    }

    #[test]
    fn modular_law_on_random_pairs() {
        // dim(U+W) + dim(U∩W) = dim U + dim W, 200 random pairs, ambient ≤ 8.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let ambient = rng.random_range(1..=8);
            let u = random_subspace(&mut rng, ambient);
            let w = random_subspace(&mut rng, ambient);
            let s = u.sum(&w).unwrap();
            let i = u.intersect(&w).unwrap();
            assert_eq!(s.dim() + i.dim(), u.dim() + w.dim());
            assert_eq!(s, w.sum(&u).unwrap());
            assert_eq!(i, w.intersect(&u).unwrap());
            assert!(s.contains(&u) && s.contains(&w));
            assert!(u.contains(&i) && w.contains(&i));
        }
    }

    #[test]
    fn rank_kernel_duality_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let rows = rng.random_range(1..=6);
            let cols = rng.random_range(1..=6);
            let m = random_matrix(&mut rng, rows, cols);
            assert_eq!(m.rank() + m.kernel().dim(), cols);
        }
    }

    #[test]
    fn exact_arithmetic_with_huge_numerators() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let digits: String =
                (0..200).map(|_| char::from(b'0' + rng.random_range(0..10) as u8)).collect();
            let n = format!("1{digits}");
            let d = format!("9{digits}");
            let a = rat_parse(&format!("{n}/{d}")).unwrap();
            let b = rat_parse(&format!("{d}/{n}")).unwrap();
            assert!((a * b).is_one());
        }
    }

    #[test]
    fn flag_dims_examples() {
        // Full coordinate flag against the whole space: (0, 1, 2, ..., d).
        let d = 4;
        let flag: Vec<Subspace> = (0..=d)
            .map(|i| Subspace::coordinate_span(d, &(0..i).collect::<Vec<_>>()))
            .collect();
        let dims = Subspace::full(d).flag_dims(&flag).unwrap();
        assert_eq!(dims, vec![0, 1, 2, 3, 4]);
        let zeros = Subspace::zero(d).flag_dims(&flag).unwrap();
        assert_eq!(zeros, vec![0; d + 1]);

        // Q^3 with flag <e1> ⊂ <e1,e2> ⊂ Q^3 against span{e2, e3}.
        let flag3 = vec![
            Subspace::coordinate_span(3, &[0]),
            Subspace::coordinate_span(3, &[0, 1]),
            Subspace::full(3),
        ];
        let w = Subspace::coordinate_span(3, &[1, 2]);
        assert_eq!(w.flag_dims(&flag3).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn flag_dims_rejects_non_nested() {
        let flag = vec![Subspace::coordinate_span(2, &[0]), Subspace::coordinate_span(2, &[1])];
        assert_eq!(Subspace::full(2).flag_dims(&flag), Err(Error::FlagNotNested));
    }

    #[test]
    fn profiles_match_intersection_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let d = rng.random_range(1..=7);
            let w = random_subspace(&mut rng, d);
            let trailing = w.trailing_profile();
            let leading = w.leading_profile();
            for i in 0..=d {
                let prefix = Subspace::coordinate_span(d, &(0..i).collect::<Vec<_>>());
                let suffix = Subspace::coordinate_span(d, &(i..d).collect::<Vec<_>>());
                let by_profile = trailing.iter().filter(|&&l| l < i).count();
                assert_eq!(by_profile, w.intersect(&prefix).unwrap().dim());
                let by_leading = leading.iter().filter(|&&p| p >= i).count();
                assert_eq!(by_leading, w.intersect(&suffix).unwrap().dim());
            }
        }
    }

    #[test]
    fn mod_rank_matches_exact_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let rows = rng.random_range(1..=7);
            let cols = rng.random_range(1..=7);
            let m = QMatrix::from_rows(
                (0..rows)
                    .map(|_| {
                        (0..cols)
                            .map(|_| rat(rng.random_range(-30..=30), rng.random_range(1..=7)))
                            .collect()
                    })
                    .collect(),
            );
            let mut acc = ModRankAccumulator::new(cols);
            for i in 0..rows {
                acc.add_rational_row(m.row(i));
            }
            assert_eq!(acc.rank(), m.rank());
        }
    }

    #[test]
    fn accumulator_matches_batch_rref() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let cols = rng.random_range(1..=6);
            let n = rng.random_range(0..=8);
            let rows: Vec<Vec<Rational>> = (0..n)
                .map(|_| (0..cols).map(|_| rat_int(rng.random_range(-5..=5))).collect())
                .collect();
            let mut acc = RrefAccumulator::new(cols);
            for row in rows.clone() {
                acc.add_row(row);
            }
            let batch = if n == 0 {
                Subspace::full(cols)
            } else {
                QMatrix::from_rows(rows).kernel()
            };
            assert_eq!(acc.kernel(), batch);
        }
    }

    #[test]
    fn rational_string_round_trip() {
        assert_eq!(rat_string(&rat(3, 4)), "3/4");
        assert_eq!(rat_string(&rat_int(-7)), "-7");
        assert_eq!(rat_parse("3/4").unwrap(), rat(3, 4));
        assert_eq!(rat_parse("-7").unwrap(), rat_int(-7));
        assert_eq!(rat_parse("6/8").unwrap(), rat(3, 4));
        assert!(rat_parse("abc").is_err());
    }
}
