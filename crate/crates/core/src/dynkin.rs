//! Dynkin diagram catalog and the exact linear algebra needed to assemble
//! the quadruple `(C(X)⊗C(Y)^{-1}, 0, -c/24, D(X)⊗D(Y))` of a pair.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::nahm::NahmQuadruple;
use crate::rational::{fmt_rational, int, rat, serde_pair, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    T,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
            Family::T => 'T',
        }
    }

    fn from_letter(c: char) -> Option<Family> {
        Some(match c.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            'T' => Family::T,
            _ => return None,
        })
    }
}

/// A diagram `X_r`, e.g. `E8` or `T2`. Parsing accepts `E8`, `e8`, `E_8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiagramKind {
    pub family: Family,
    pub rank: u32,
}

impl DiagramKind {
    pub const fn new(family: Family, rank: u32) -> Self {
        DiagramKind { family, rank }
    }

    /// Checks the rank range, mapping `B2 -> C2` and `D3 -> A3`.
    pub fn resolve(self) -> Result<(DiagramKind, bool)> {
        let r = self.rank;
        let bad = Err(Error::InvalidRank { family: self.family.letter(), rank: r });
        match (self.family, r) {
            (Family::B, 2) => Ok((DiagramKind::new(Family::C, 2), true)),
            (Family::D, 3) => Ok((DiagramKind::new(Family::A, 3), true)),
            (Family::A | Family::T, r) if r >= 1 => Ok((self, false)),
            (Family::B, r) if r >= 3 => Ok((self, false)),
            (Family::C, r) if r >= 2 => Ok((self, false)),
            (Family::D, r) if r >= 4 => Ok((self, false)),
            (Family::E, 6..=8) | (Family::F, 4) | (Family::G, 2) => Ok((self, false)),
            _ => bad,
        }
    }
}

impl fmt::Display for DiagramKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for DiagramKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let fam = chars
            .next()
            .and_then(Family::from_letter)
            .ok_or_else(|| Error::Parse(format!("unknown diagram family in {s:?}")))?;
        let rest = chars.as_str().trim_start_matches('_');
        let rank: u32 =
            rest.parse().map_err(|_| Error::Parse(format!("bad rank in diagram {s:?}")))?;
        Ok(DiagramKind::new(fam, rank))
    }
}

impl Serialize for DiagramKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DiagramKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanData {
    pub kind: DiagramKind,
    pub cartan: Vec<Vec<i64>>,
    pub dvec: Vec<u64>,
    pub coxeter: u64,
    /// Set when the requested kind was an alias (`B2`, `D3`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aliased_from: Option<DiagramKind>,
}

impl CartanData {
    pub fn rank(&self) -> usize {
        self.dvec.len()
    }

    pub fn matrix(&self) -> RationalMatrix {
        RationalMatrix::from_i64(&self.cartan)
    }

    pub fn d_trace(&self) -> u64 {
        self.dvec.iter().sum()
    }
}

fn chain(r: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; r]; r];
    for i in 0..r {
        m[i][i] = 2;
        if i + 1 < r {
            m[i][i + 1] = -1;
            m[i + 1][i] = -1;
        }
    }
    m
}

fn e_series(r: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; r]; r];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize| {
        m[i][j] = -1;
        m[j][i] = -1;
    };
    link(0, 2);
    link(1, 3);
    for i in 2..r - 1 {
        link(i, i + 1);
    }
    m
}

/// Cartan matrix, root-length diagonal and Coxeter number of a diagram.
pub fn cartan_data(kind: DiagramKind) -> Result<CartanData> {
    let (k, aliased) = kind.resolve()?;
    let r = k.rank as usize;
    let ones = vec![1u64; r];
    let (cartan, dvec, coxeter) = match k.family {
        Family::A => (chain(r), ones, r as u64 + 1),
        Family::B => {
            let mut m = chain(r);
            m[r - 2][r - 1] = -2;
            let mut d = vec![2u64; r];
            d[r - 1] = 1;
            (m, d, 2 * r as u64)
        }
        Family::C => {
            let mut m = chain(r);
            m[r - 1][r - 2] = -2;
            let mut d = ones;
            d[r - 1] = 2;
            (m, d, 2 * r as u64)
        }
        Family::D => {
            // node r-2 branches to r-1 and r
            let mut m = chain(r);
            m[r - 2][r - 1] = 0;
            m[r - 1][r - 2] = 0;
            m[r - 3][r - 1] = -1;
            m[r - 1][r - 3] = -1;
            (m, ones, 2 * r as u64 - 2)
        }
        Family::E => (e_series(r), ones, [12, 18, 30][r - 6]),
        Family::F => (
            vec![vec![2, -1, 0, 0], vec![-1, 2, -2, 0], vec![0, -1, 2, -1], vec![0, 0, -1, 2]],
            vec![2, 2, 1, 1],
            12,
        ),
        Family::G => (vec![vec![2, -1], vec![-3, 2]], vec![1, 3], 6),
        Family::T => {
            let mut m = chain(r);
            m[r - 1][r - 1] = 1;
            (m, ones, 2 * r as u64 + 1)
        }
    };
    Ok(CartanData { kind: k, cartan, dvec, coxeter, aliased_from: aliased.then_some(kind) })
}

/// Dense exact rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(RationalMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .expect("integer matrix rows")
    }

    /// Builds from `(num, den)` pairs; handy in tests and fixtures.
    pub fn from_fracs(rows: &[&[(i64, i64)]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect()).collect())
            .expect("fraction matrix rows")
    }

    pub fn diagonal(d: &[Rational]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `self · diag(d)`.
    pub fn mul_diag(&self, d: &[u64]) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            for (j, &dj) in d.iter().enumerate() {
                out[(i, j)] *= Rational::from_integer(BigInt::from(dj));
            }
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    /// Leading principal minors all positive (exact). Requires a square
    /// matrix; symmetry is not checked.
    pub fn leading_minors_positive(&self) -> bool {
        // Gaussian elimination without pivoting: the k-th pivot is the ratio
        // of consecutive leading minors
        let n = self.rows;
        let mut m = self.to_rows();
        for k in 0..n {
            if !m[k][k].is_positive() {
                return false;
            }
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let f = &m[i][k] / &m[k][k];
                for j in k..n {
                    let t = &f * &m[k][j];
                    m[i][j] -= t;
                }
            }
        }
        true
    }

    /// Permutes rows and columns: `out[i][j] = self[p[i]][p[j]]`.
    pub fn permuted(&self, p: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(p[i], p[j])].clone();
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(fmt_rational).collect()).collect();
        let w = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for (i, row) in cells.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{c:>w$}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<_>> =
            (0..self.rows).map(|i| self.row(i).iter().map(serde_pair::to_pair).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Row(#[serde(with = "serde_pair::vec")] Vec<Rational>);
        let rows = Vec::<Row>::deserialize(d)?;
        RationalMatrix::from_rows(rows.into_iter().map(|r| r.0).collect()).map_err(D::Error::custom)
    }
}

/// Exact inverse by fraction-free Gauss-Jordan elimination.
///
/// Each row is first cleared of denominators (`M' = L·M`), the integer
/// system `[M' | I]` is reduced with Bareiss updates so every division is
/// exact, and the result is rescaled by `L` on the right.
pub fn rational_inverse(m: &RationalMatrix) -> Result<RationalMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", m.rows, m.cols)));
    }
    let n = m.rows;
    let mut scale = Vec::with_capacity(n);
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let l = m.row(i).iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut row: Vec<BigInt> =
            m.row(i).iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
        row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
        a.push(row);
        scale.push(l);
    }
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(Error::Singular)?;
        a.swap(k, p);
        let pivot_row = a[k].clone();
        let pk = &pivot_row[k];
        for (i, row) in a.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let rik = row[k].clone();
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                let v = pk * &row[j] - &rik * &pivot_row[j];
                debug_assert!((&v % &prev).is_zero());
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = pk.clone();
    }
    // every diagonal entry now equals ±det(M'), and the right block is
    // det(M')·M'^{-1}
    let mut out = RationalMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] =
                Rational::new(&a[i][n + j] * &scale[j], a[i][i].clone());
        }
    }
    Ok(out)
}

/// Block matrix `(a_ij · b)`.
pub fn kronecker(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let mut out = RationalMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = x * &b[(k, l)];
                }
            }
        }
    }
    out
}

/// `tr(D(X)⊗D(Y)) · h(X)/(h(X)+h(Y))`.
pub fn central_charge(x: DiagramKind, y: DiagramKind) -> Result<Rational> {
    let cx = cartan_data(x)?;
    let cy = cartan_data(y)?;
    let tr = cx.d_trace() * cy.d_trace();
    Ok(Rational::new(BigInt::from(tr * cx.coxeter), BigInt::from(cx.coxeter + cy.coxeter)))
}

/// The quadruple attached to the pair `(X, Y)`.
pub fn build_quadruple(x: DiagramKind, y: DiagramKind) -> Result<NahmQuadruple> {
    let cx = cartan_data(x)?;
    let cy = cartan_data(y)?;
    let a = kronecker(&cx.matrix(), &rational_inverse(&cy.matrix())?);
    let d: Vec<u64> =
        cx.dvec.iter().flat_map(|&dx| cy.dvec.iter().map(move |&dy| dx * dy)).collect();
    let c = -central_charge(x, y)? / int(24);
    let r = d.len();
    NahmQuadruple::new(a, vec![Rational::zero(); r], c, d)
}

/// `(A^{-1}, A^{-1}B, ½Bᵗ(AD)^{-1}B - tr(D)/24 - C, D)`.
pub fn dual_quadruple(q: &NahmQuadruple) -> Result<NahmQuadruple> {
    let a_inv = rational_inverse(&q.a)?;
    let b = a_inv.mul_vec(&q.b)?;
    let ad_inv = rational_inverse(&q.a.mul_diag(&q.d))?;
    let quad_form: Rational =
        q.b.iter().zip(ad_inv.mul_vec(&q.b)?).map(|(x, y)| x * y).sum::<Rational>() / int(2);
    let tr: u64 = q.d.iter().sum();
    let c = quad_form - Rational::new(BigInt::from(tr), BigInt::from(24)) - &q.c;
    NahmQuadruple::new(a_inv, b, c, q.d.clone())
}

/// Whether `Pᵗ a P = b` for some permutation matrix `P`.
pub fn permutation_equivalent(a: &RationalMatrix, b: &RationalMatrix) -> bool {
    if !a.is_square() || a.rows != b.rows || a.cols != b.cols {
        return false;
    }
    let n = a.rows;
    // invariant per index: diagonal entry and sorted off-diagonal row and
    // column entries; an index of b may only map to an index of a with the
    // same signature
    let sig = |m: &RationalMatrix, i: usize| {
        let mut r: Vec<&Rational> = (0..n).filter(|&j| j != i).map(|j| &m[(i, j)]).collect();
        let mut c: Vec<&Rational> = (0..n).filter(|&j| j != i).map(|j| &m[(j, i)]).collect();
        r.sort();
        c.sort();
        (m[(i, i)].clone(), r.into_iter().cloned().collect::<Vec<_>>(), c.into_iter().cloned().collect::<Vec<_>>())
    };
    let sa: Vec<_> = (0..n).map(|i| sig(a, i)).collect();
    let sb: Vec<_> = (0..n).map(|i| sig(b, i)).collect();
    let mut ms_a = sa.clone();
    let mut ms_b = sb.clone();
    ms_a.sort();
    ms_b.sort();
    if ms_a != ms_b {
        return false;
    }
    let candidates: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| sa[j] == sb[i]).collect()).collect();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn search(
        i: usize,
        a: &RationalMatrix,
        b: &RationalMatrix,
        cand: &[Vec<usize>],
        perm: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if i == perm.len() {
            return true;
        }
        for &j in &cand[i] {
            if used[j] {
                continue;
            }
            let consistent = (0..i).all(|k| {
                b[(i, k)] == a[(j, perm[k])] && b[(k, i)] == a[(perm[k], j)]
            });
            if !consistent {
                continue;
            }
            perm[i] = j;
            used[j] = true;
            if search(i + 1, a, b, cand, perm, used) {
                return true;
            }
            used[j] = false;
        }
        false
    }
    search(0, a, b, &candidates, &mut perm, &mut used)
}
