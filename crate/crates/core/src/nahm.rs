//! Generalized Nahm sums
//! `f_{A,B,C,D} = Σ_{n∈N^r} q^{½nᵗADn + nᵗB + C} / Π_i (q^{d_i}; q^{d_i})_{n_i}`
//! by pruned depth-first enumeration of the positive orthant.
//!
//! The exponent `F(n) = ½nᵗADn + nᵗB` is rewritten once, exactly, as
//! `κ + Σ_i p_i (n_i + Σ_{j<i} l_ij n_j + c_i)²` by eliminating the last
//! variable first. Truncating the sum after `i` terms gives the minimum of
//! `F` over all real completions of the prefix `n_1..n_i`, which is a valid
//! and monotone pruning bound. The enumerator evaluates it in scaled `i128`
//! integers and carries the denominator product down the tree, one factor
//! `1/(1-q^{d_i n_i})` per step.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynkin::RationalMatrix;
use crate::error::{Error, Result};
use crate::qseries::QSeries;
use crate::rational::{denom_u64, lcm_u64, serde_pair, to_units, Rational};

/// `(A, B, C, D)` with `A·D` symmetric positive definite.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NahmQuadruple {
    #[serde(rename = "A")]
    pub a: RationalMatrix,
    #[serde(rename = "B", with = "serde_pair::vec")]
    pub b: Vec<Rational>,
    #[serde(rename = "C", with = "serde_pair")]
    pub c: Rational,
    #[serde(rename = "D")]
    pub d: Vec<u64>,
}

impl NahmQuadruple {
    pub fn new(a: RationalMatrix, b: Vec<Rational>, c: Rational, d: Vec<u64>) -> Result<Self> {
        let q = NahmQuadruple { a, b, c, d };
        q.validate()?;
        Ok(q)
    }

    /// Ordinary Nahm sum data (`D = Id`).
    pub fn ordinary(a: RationalMatrix, b: Vec<Rational>, c: Rational) -> Result<Self> {
        let r = a.rows();
        Self::new(a, b, c, vec![1; r])
    }

    pub fn rank(&self) -> usize {
        self.d.len()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.d.len();
        if r == 0 {
            return Err(Error::DimensionMismatch("rank must be at least 1".into()));
        }
        if self.a.rows() != r || self.a.cols() != r || self.b.len() != r {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, B has {} entries, D has {r}",
                self.a.rows(),
                self.a.cols(),
                self.b.len()
            )));
        }
        if self.d.contains(&0) {
            return Err(Error::InvalidArgument("entries of D must be positive".into()));
        }
        let ad = self.ad();
        if !ad.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if !ad.leading_minors_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(())
    }

    /// The symmetric matrix `A·D`.
    pub fn ad(&self) -> RationalMatrix {
        self.a.mul_diag(&self.d)
    }

    pub fn with_b(mut self, b: Vec<Rational>) -> Result<Self> {
        self.b = b;
        self.validate()?;
        Ok(self)
    }

    pub fn with_c(mut self, c: Rational) -> Self {
        self.c = c;
        self
    }

    /// `½nᵗADn + nᵗB + C` at an integer point.
    pub fn exponent(&self, n: &[u64]) -> Rational {
        let ad = self.ad();
        let nr: Vec<Rational> = n.iter().map(|&x| Rational::from_integer(x.into())).collect();
        let quad: Rational = ad.mul_vec(&nr).expect("rank").iter().zip(&nr).map(|(x, y)| x * y).sum();
        let lin: Rational = self.b.iter().zip(&nr).map(|(x, y)| x * y).sum();
        quad / Rational::from_integer(2.into()) + lin + &self.c
    }
}

/// Restriction `weights·n ≡ residue (mod modulus)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeConstraint {
    pub weights: Vec<i64>,
    pub modulus: u64,
    pub residue: u64,
}

impl LatticeConstraint {
    pub fn new(weights: Vec<i64>, modulus: u64, residue: u64) -> Result<Self> {
        if modulus == 0 || residue >= modulus {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= residue < modulus, got {residue} mod {modulus}"
            )));
        }
        Ok(LatticeConstraint { weights, modulus, residue })
    }

    pub fn admits(&self, n: &[u64]) -> bool {
        let m = self.modulus as i128;
        let s: i128 = self.weights.iter().zip(n).map(|(&w, &x)| w as i128 * x as i128).sum();
        s.rem_euclid(m) == self.residue as i128
    }
}

/// Exact completion of squares of `F(n) = ½nᵗMn + Bᵗn`.
#[derive(Clone, Debug)]
struct SquareForm {
    kappa: Rational,
    p: Vec<Rational>,
    /// `l[i][j]` for `j < i`
    l: Vec<Vec<Rational>>,
    c: Vec<Rational>,
}

impl SquareForm {
    fn new(quad: &NahmQuadruple) -> Self {
        let r = quad.rank();
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let ad = quad.ad();
        // F = Σ_ij G_ij n_i n_j + Σ h_i n_i + κ with G = M/2
        let mut g: Vec<Vec<Rational>> =
            (0..r).map(|i| (0..r).map(|j| &ad[(i, j)] * &half).collect()).collect();
        let mut h = quad.b.clone();
        let mut kappa = Rational::zero();
        let mut p = vec![Rational::zero(); r];
        let mut l = vec![Vec::new(); r];
        let mut c = vec![Rational::zero(); r];
        for k in (0..r).rev() {
            // G_kk n_k² + n_k(2Σ_{j<k} G_kj n_j + h_k)
            //   = G_kk (n_k + Σ_j (G_kj/G_kk) n_j + h_k/(2G_kk))² - G_kk(...)²
            let gkk = g[k][k].clone();
            let lk: Vec<Rational> = (0..k).map(|j| &g[k][j] / &gkk).collect();
            let ck = &h[k] / (&gkk * Rational::from_integer(2.into()));
            for i in 0..k {
                for j in 0..k {
                    let t = &g[i][k] * &g[k][j] / &gkk;
                    g[i][j] -= t;
                }
                let t = &g[i][k] * &h[k] / &gkk;
                h[i] -= t;
            }
            kappa -= &gkk * &ck * &ck;
            p[k] = gkk;
            l[k] = lk;
            c[k] = ck;
        }
        SquareForm { kappa, p, l, c }
    }

    /// `κ + Σ_{i<k} p_i (n_i + Σ_{j<i} l_ij n_j + c_i)²` for a prefix of
    /// length `k`.
    fn prefix_bound(&self, prefix: &[i64]) -> Rational {
        let mut acc = self.kappa.clone();
        for (i, &ni) in prefix.iter().enumerate() {
            let mut u = Rational::from_integer(ni.into()) + &self.c[i];
            for (j, &nj) in prefix[..i].iter().enumerate() {
                u += &self.l[i][j] * Rational::from_integer(nj.into());
            }
            acc += &self.p[i] * &u * &u;
        }
        acc
    }
}

/// Exact lower bound for `½nᵗADn + nᵗB` over all completions of `prefix`
/// (the positivity of the free coordinates is not used). With a full-length
/// prefix it is the exact value.
pub fn min_exponent_tail(quad: &NahmQuadruple, prefix: &[i64]) -> Rational {
    SquareForm::new(quad).prefix_bound(&prefix[..prefix.len().min(quad.rank())])
}

fn big_to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or(Error::Overflow)
}

fn rat_scaled(x: &Rational, s: &BigInt) -> Result<i128> {
    let v = x * Rational::from_integer(s.clone());
    debug_assert!(v.is_integer());
    big_to_i128(&v.to_integer())
}

/// Integer form of the enumeration problem.
#[derive(Clone, Debug)]
struct Plan {
    r: usize,
    /// exponent grain of the result
    g: i64,
    /// scale making every bound an integer
    s: i128,
    k0: i128,
    w: Vec<i128>,
    e: Vec<i128>,
    lin: Vec<Vec<i128>>,
    c: Vec<i128>,
    d: Vec<usize>,
    /// `S·(order - C)`; a node with bound `>= lim` has no contributing point
    lim: i128,
    /// `g·C`
    gc: i64,
    order_units: i64,
    /// lowest exponent (grain units) that can occur
    lo: i64,
    constraint: Option<LatticeConstraint>,
}

impl Plan {
    fn new(quad: &NahmQuadruple, order: &Rational, constraint: Option<&LatticeConstraint>) -> Result<Self> {
        quad.validate()?;
        let r = quad.rank();
        if let Some(c) = constraint {
            if c.weights.len() != r {
                return Err(Error::DimensionMismatch(format!(
                    "constraint has {} weights for rank {r}",
                    c.weights.len()
                )));
            }
        }
        let ad = quad.ad();
        let mut den = 1u64;
        for i in 0..r {
            for j in 0..r {
                den = lcm_u64(den, denom_u64(&ad[(i, j)]));
            }
            den = lcm_u64(den, denom_u64(&quad.b[i]));
        }
        den = lcm_u64(den, denom_u64(&quad.c));
        den = lcm_u64(den, denom_u64(order));
        let g = 2 * den;

        let sf = SquareForm::new(quad);
        let mut e = Vec::with_capacity(r);
        let mut s_big = BigInt::from(g);
        s_big = s_big.lcm(sf.kappa.denom());
        for i in 0..r {
            let ei = sf.l[i].iter().chain(std::iter::once(&sf.c[i])).fold(BigInt::one(), |a, x| a.lcm(x.denom()));
            let wi = &sf.p[i] / Rational::from_integer(&ei * &ei);
            s_big = s_big.lcm(wi.denom());
            e.push(ei);
        }
        s_big = s_big.lcm(quad.c.denom()).lcm(order.denom());
        let s = big_to_i128(&s_big)?;
        let mut w = Vec::with_capacity(r);
        let mut lin = Vec::with_capacity(r);
        let mut cc = Vec::with_capacity(r);
        for i in 0..r {
            let ei = Rational::from_integer(e[i].clone());
            w.push(rat_scaled(&(&sf.p[i] / (&ei * &ei)), &s_big)?);
            lin.push(
                sf.l[i].iter().map(|x| big_to_i128(&(x * &ei).to_integer())).collect::<Result<Vec<_>>>()?,
            );
            cc.push(big_to_i128(&(&sf.c[i] * &ei).to_integer())?);
        }
        let k0 = rat_scaled(&sf.kappa, &s_big)?;
        let lim = rat_scaled(&(order - &quad.c), &s_big)?;
        let gc = to_units(&quad.c, g).ok_or(Error::Overflow)?;
        let order_units = to_units(order, g).ok_or(Error::Overflow)?;
        // lowest exponent: g·κ rounded up, plus g·C
        let lo = Integer::div_ceil(&(k0 * g as i128), &s) as i64 + gc;
        Ok(Plan {
            r,
            g: g as i64,
            s,
            k0,
            w,
            e: e.iter().map(big_to_i128).collect::<Result<Vec<_>>>()?,
            lin,
            c: cc,
            d: quad.d.iter().map(|&x| x as usize).collect(),
            lim,
            gc,
            order_units,
            lo,
            constraint: constraint.cloned(),
        })
    }

    /// Number of integer-exponent denominator coefficients still needed
    /// below a node whose scaled bound is `b`.
    fn needed_len(&self, b: i128) -> usize {
        if b >= self.lim {
            0
        } else {
            Integer::div_ceil(&(self.lim - b), &self.s) as usize
        }
    }

    fn base(&self, i: usize, n: &[u64]) -> Option<i128> {
        let mut acc = self.c[i];
        for (j, &nj) in n[..i].iter().enumerate() {
            acc = acc.checked_add(self.lin[i][j].checked_mul(nj as i128)?)?;
        }
        Some(acc)
    }

    /// Scaled bound after fixing `n_i = ni`, and the square's argument `u`.
    fn bound(&self, prev: i128, i: usize, ni: u64, base: i128) -> Option<(i128, i128)> {
        let u = self.e[i].checked_mul(ni as i128)?.checked_add(base)?;
        let t = self.w[i].checked_mul(u.checked_mul(u)?)?;
        Some((prev.checked_add(t)?, u))
    }

    fn acc_len(&self) -> usize {
        (self.order_units - self.lo).max(0) as usize
    }
}

#[derive(Debug)]
enum Fail {
    Bound,
    Coef,
}

/// Coefficient ring of the kernel: `i128` first, `BigInt` when that
/// overflows.
trait Coef: Clone + Send + Sync {
    fn zero_c() -> Self;
    fn one_c() -> Self;
    #[must_use]
    fn add_from(&mut self, x: &Self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl Coef for i128 {
    fn zero_c() -> Self {
        0
    }
    fn one_c() -> Self {
        1
    }
    fn add_from(&mut self, x: &Self) -> bool {
        match self.checked_add(*x) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coef for BigInt {
    fn zero_c() -> Self {
        Zero::zero()
    }
    fn one_c() -> Self {
        One::one()
    }
    fn add_from(&mut self, x: &Self) -> bool {
        *self += x;
        true
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// `buf /= (1 - q^e)`.
fn div_one_minus<T: Coef>(buf: &mut [T], e: usize) -> std::result::Result<(), Fail> {
    if e == 0 {
        return Ok(());
    }
    for j in e..buf.len() {
        let (lo, hi) = buf.split_at_mut(j);
        if !hi[0].add_from(&lo[j - e]) {
            return Err(Fail::Coef);
        }
    }
    Ok(())
}

struct Walker<'a, T> {
    plan: &'a Plan,
    bufs: Vec<Vec<T>>,
    n: Vec<u64>,
    acc: Vec<T>,
}

impl<T: Coef> Walker<'_, T> {
    fn emit(&mut self, b: i128) -> std::result::Result<(), Fail> {
        let plan = self.plan;
        if let Some(c) = &plan.constraint {
            if !c.admits(&self.n) {
                return Ok(());
            }
        }
        let gf = b.checked_mul(plan.g as i128).ok_or(Fail::Bound)? / plan.s;
        let e = gf as i64 + plan.gc;
        let buf = &self.bufs[plan.r - 1];
        let mut idx = e;
        for x in buf {
            if idx >= plan.order_units {
                break;
            }
            if !self.acc[(idx - plan.lo) as usize].add_from(x) {
                return Err(Fail::Coef);
            }
            idx += plan.g;
        }
        Ok(())
    }

    /// Enumerates coordinate `i >= 1` below a node with scaled bound `prev`.
    fn walk(&mut self, i: usize, prev: i128) -> std::result::Result<(), Fail> {
        let plan = self.plan;
        let base = plan.base(i, &self.n).ok_or(Fail::Bound)?;
        let len0 = plan.needed_len(prev);
        {
            let (lo, hi) = self.bufs.split_at_mut(i);
            let parent = &lo[i - 1];
            hi[0].clear();
            hi[0].extend_from_slice(&parent[..len0.min(parent.len())]);
        }
        let d = plan.d[i];
        let mut ni = 0u64;
        loop {
            if ni > 0 {
                div_one_minus(&mut self.bufs[i], d * ni as usize)?;
            }
            let (b, u) = plan.bound(prev, i, ni, base).ok_or(Fail::Bound)?;
            if b < plan.lim {
                if u >= 0 {
                    // every later n_i has a larger bound
                    let l = plan.needed_len(b);
                    self.bufs[i].truncate(l);
                }
                self.n[i] = ni;
                if i + 1 == plan.r {
                    self.emit(b)?;
                } else {
                    self.walk(i + 1, b)?;
                }
            } else if u >= 0 {
                break;
            }
            ni += 1;
        }
        self.n[i] = 0;
        Ok(())
    }
}

/// Top-level slices: admissible values of `n_1` with their bounds.
fn first_slices(plan: &Plan) -> Result<Vec<(u64, i128)>> {
    let base = plan.base(0, &[]).ok_or(Error::Overflow)?;
    let mut out = Vec::new();
    let mut n0 = 0u64;
    loop {
        let (b, u) = plan.bound(plan.k0, 0, n0, base).ok_or(Error::Overflow)?;
        if b < plan.lim {
            out.push((n0, b));
        } else if u >= 0 {
            break;
        }
        n0 += 1;
    }
    Ok(out)
}

fn run_slice<T: Coef>(plan: &Plan, n0: u64, b0: i128) -> std::result::Result<Vec<T>, Fail> {
    let len = plan.needed_len(b0);
    let mut first = vec![T::zero_c(); len];
    if len > 0 {
        first[0] = T::one_c();
    }
    for k in 1..=n0 as usize {
        div_one_minus(&mut first, plan.d[0] * k)?;
    }
    let mut bufs = vec![Vec::new(); plan.r];
    bufs[0] = first;
    let mut n = vec![0u64; plan.r];
    n[0] = n0;
    let mut w = Walker { plan, bufs, n, acc: vec![T::zero_c(); plan.acc_len()] };
    if plan.r == 1 {
        w.emit(b0)?;
    } else {
        w.walk(1, b0)?;
    }
    Ok(w.acc)
}

fn run_all<T: Coef>(plan: &Plan, slices: &[(u64, i128)]) -> std::result::Result<Vec<BigInt>, Fail> {
    let parts: Vec<std::result::Result<Vec<T>, Fail>> =
        slices.par_iter().map(|&(n0, b0)| run_slice::<T>(plan, n0, b0)).collect();
    let mut total = vec![BigInt::zero(); plan.acc_len()];
    for part in parts {
        for (t, x) in total.iter_mut().zip(part?) {
            *t += x.to_big();
        }
    }
    Ok(total)
}

/// Expands `f_{A,B,C,D}` (optionally restricted to a congruence class of
/// lattice points) strictly below `q^order`.
///
/// Slices over the first coordinate run on the rayon pool; the result does
/// not depend on the number of threads.
pub fn nahm_sum(
    quad: &NahmQuadruple,
    order: &Rational,
    constraint: Option<&LatticeConstraint>,
) -> Result<QSeries> {
    let plan = Plan::new(quad, order, constraint)?;
    if plan.acc_len() == 0 {
        return Ok(QSeries::zero(order));
    }
    let slices = first_slices(&plan)?;
    let coeffs = match run_all::<i128>(&plan, &slices) {
        Ok(c) => c,
        Err(Fail::Coef) => match run_all::<BigInt>(&plan, &slices) {
            Ok(c) => c,
            Err(_) => return Err(Error::Overflow),
        },
        Err(Fail::Bound) => return Err(Error::Overflow),
    };
    QSeries::from_parts(plan.g as u64, plan.lo, coeffs, plan.order_units)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynkin::{build_quadruple, DiagramKind};
    use crate::qseries::{congruence_product, equal_to_order, pochhammer, Length};
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn quad1(a: i64, b: Rational, c: Rational) -> NahmQuadruple {
        NahmQuadruple::ordinary(RationalMatrix::from_i64(&[vec![a]]), vec![b], c).unwrap()
    }

    /// Box enumeration with an independent radius estimate:
    /// `F(n) >= ½λ|n|² - |B||n|` and `λ >= 1/tr((AD)^{-1})`.
    fn naive(quad: &NahmQuadruple, order: i64, cons: Option<&LatticeConstraint>) -> QSeries {
        let r = quad.rank();
        let ad = quad.ad();
        let inv = crate::dynkin::rational_inverse(&ad).unwrap();
        let lambda = 1.0 / crate::rational::to_f64(&inv.trace());
        let bnorm: f64 = quad.b.iter().map(|x| crate::rational::to_f64(x).powi(2)).sum::<f64>().sqrt();
        let room = order as f64 - crate::rational::to_f64(&quad.c);
        let radius = (bnorm + (bnorm * bnorm + 2.0 * lambda * room.max(0.0)).sqrt()) / lambda;
        let nmax = (2.0 * radius).ceil() as u64 + 1;
        let ord = int(order);
        let mut total = QSeries::zero(&ord);
        let mut n = vec![0u64; r];
        loop {
            let e = quad.exponent(&n);
            if e < ord && cons.is_none_or(|c| c.admits(&n)) {
                let room = &ord - &e;
                let mut term = QSeries::one(&room);
                for (i, &ni) in n.iter().enumerate() {
                    let di = int(quad.d[i] as i64);
                    let p = pochhammer(&di, &di, Length::Finite(ni), &room).unwrap();
                    term = term.mul(&p.inverse(&room).unwrap());
                }
                total = total.add(&term.shift(&e));
            }
            let mut k = 0;
            loop {
                if k == r {
                    return total;
                }
                n[k] += 1;
                if n[k] <= nmax {
                    break;
                }
                n[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn rogers_ramanujan_g() {
        let s = nahm_sum(&quad1(2, int(0), int(0)), &int(10), None).unwrap();
        assert_eq!(s, QSeries::from_coeffs(&[1, 1, 1, 1, 2, 2, 3, 3, 4, 5], 10).unwrap());
        let g = congruence_product(1, 5, &[1, 4], -1, &int(200)).unwrap();
        let s = nahm_sum(&quad1(2, int(0), int(0)), &int(200), None).unwrap();
        assert!(equal_to_order(&s, &g, &int(200)).unwrap().equal);
    }

    #[test]
    fn free_fermion_rank_one() {
        let s = nahm_sum(&quad1(1, int(0), int(0)), &int(5), None).unwrap();
        let p = pochhammer(&rat(1, 2), &int(1), Length::Infinite, &int(5)).unwrap();
        let minus_q_half = crate::qseries::Pochhammer::new(rat(1, 2), int(1), Length::Infinite).negated();
        assert_ne!(s, p);
        assert_eq!(s, minus_q_half.expand(&int(5)).unwrap());
    }

    #[test]
    fn e8_t1_coefficients() {
        let q = build_quadruple("E8".parse().unwrap(), "T1".parse().unwrap()).unwrap().with_c(int(0));
        let s = nahm_sum(&q, &int(5), None).unwrap();
        assert_eq!(s, QSeries::from_coeffs(&[1, 120, 1660, 12320, 68210], 5).unwrap());
    }

    #[test]
    fn tail_bound_examples() {
        let q = quad1(2, int(0), int(0));
        assert!(min_exponent_tail(&q, &[]) <= int(0));
        assert_eq!(min_exponent_tail(&q, &[3]), int(9));
        let q = build_quadruple("T1".parse().unwrap(), "C2".parse().unwrap()).unwrap();
        let q = q.with_b(vec![rat(1, 2), rat(-1, 1)]).unwrap();
        let full = min_exponent_tail(&q, &[2, 5]);
        assert_eq!(full + &q.c, q.exponent(&[2, 5]));
    }

    #[test]
    fn negative_b_entries() {
        let q = build_quadruple(DiagramKind::new(crate::dynkin::Family::A, 1), DiagramKind::new(crate::dynkin::Family::B, 3))
            .unwrap()
            .with_b(vec![int(0), int(-1), int(-1)])
            .unwrap();
        assert_eq!(nahm_sum(&q, &int(12), None).unwrap(), naive(&q, 12, None));
    }

    #[test]
    fn zero_series_when_order_below_minimum() {
        let q = quad1(2, int(0), int(1));
        let s = nahm_sum(&q, &rat(1, 2), None).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.order(), rat(1, 2));
    }

    #[test]
    fn splitting_by_parity() {
        let q = build_quadruple("A1".parse().unwrap(), "D4".parse().unwrap()).unwrap();
        let full = nahm_sum(&q, &int(30), None).unwrap();
        let w = vec![0, 0, 1, 1];
        let even = nahm_sum(&q, &int(30), Some(&LatticeConstraint::new(w.clone(), 2, 0).unwrap())).unwrap();
        let odd = nahm_sum(&q, &int(30), Some(&LatticeConstraint::new(w, 2, 1).unwrap())).unwrap();
        assert_eq!(even.add(&odd), full);
    }

    #[test]
    fn matches_naive_oracle() {
        let pairs = [("A1", "T1"), ("T1", "C2"), ("A1", "G2"), ("T2", "A1"), ("A1", "A3"), ("G2", "T1"), ("T1", "A2")];
        for (x, y) in pairs {
            let q = build_quadruple(x.parse().unwrap(), y.parse().unwrap()).unwrap();
            assert_eq!(nahm_sum(&q, &int(14), None).unwrap(), naive(&q, 14, None), "{x} {y}");
        }
    }

    #[test]
    fn rejects_indefinite() {
        let a = RationalMatrix::from_i64(&[vec![1, 2], vec![2, 1]]);
        assert_eq!(
            NahmQuadruple::ordinary(a, vec![int(0), int(0)], int(0)),
            Err(Error::NotPositiveDefinite)
        );
        let a = RationalMatrix::from_i64(&[vec![1, 2], vec![0, 1]]);
        assert_eq!(NahmQuadruple::ordinary(a, vec![int(0), int(0)], int(0)), Err(Error::NotSymmetric));
    }

    #[test]
    fn bigint_fallback_agrees() {
        let q = build_quadruple("A1".parse().unwrap(), "A2".parse().unwrap()).unwrap();
        let plan = Plan::new(&q, &int(40), None).unwrap();
        let slices = first_slices(&plan).unwrap();
        let a = run_all::<i128>(&plan, &slices).unwrap();
        let b = run_all::<BigInt>(&plan, &slices).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let q = build_quadruple("T1".parse().unwrap(), "D4".parse().unwrap()).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| nahm_sum(&q, &int(25), None).unwrap());
        let b = four.install(|| nahm_sum(&q, &int(25), None).unwrap());
        assert_eq!(a, b);
    }

    fn small_quad() -> impl Strategy<Value = (NahmQuadruple, Vec<usize>)> {
        (1usize..=3)
            .prop_flat_map(|r| {
                (
                    proptest::collection::vec(-2i64..=2, r * r),
                    proptest::collection::vec(-1i64..=2, r),
                    proptest::collection::vec(1u64..=2, r),
                    Just(r),
                )
            })
            .prop_filter_map("positive definite", |(m, b, d, r)| {
                // A·D = L Lᵗ + Id style: symmetrize and add a diagonal shift
                let mut s = vec![vec![0i64; r]; r];
                for i in 0..r {
                    for j in 0..r {
                        s[i][j] = m[i * r + j] + m[j * r + i];
                    }
                }
                for (i, row) in s.iter_mut().enumerate() {
                    row[i] = row[i].abs() + 3 + 2 * r as i64;
                }
                // A = S·D^{-1}
                let rows: Vec<Vec<Rational>> = (0..r)
                    .map(|i| (0..r).map(|j| rat(s[i][j], 2 * d[j] as i64)).collect())
                    .collect();
                let a = RationalMatrix::from_rows(rows).ok()?;
                let b = b.iter().map(|&x| rat(x, 2)).collect();
                let q = NahmQuadruple::new(a, b, rat(-1, 24), d).ok()?;
                Some((q, (0..r).collect::<Vec<_>>()))
            })
            .prop_flat_map(|(q, idx)| (Just(q), Just(idx).prop_shuffle()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn enumerator_equals_naive((q, _) in small_quad()) {
            prop_assert_eq!(nahm_sum(&q, &int(8), None).unwrap(), naive(&q, 8, None));
        }

        #[test]
        fn permutation_invariance((q, p) in small_quad()) {
            let qp = NahmQuadruple::new(
                q.a.permuted(&p),
                p.iter().map(|&i| q.b[i].clone()).collect(),
                q.c.clone(),
                p.iter().map(|&i| q.d[i]).collect(),
            ).unwrap();
            prop_assert_eq!(nahm_sum(&q, &int(12), None).unwrap(), nahm_sum(&qp, &int(12), None).unwrap());
        }

        #[test]
        fn prefix_bound_is_monotone((q, _) in small_quad(), n in proptest::collection::vec(0i64..6, 3)) {
            let r = q.rank();
            let n = &n[..r];
            for k in 0..r {
                prop_assert!(min_exponent_tail(&q, &n[..k]) <= min_exponent_tail(&q, &n[..k + 1]));
            }
            prop_assert_eq!(min_exponent_tail(&q, n) + &q.c, q.exponent(&n.iter().map(|&x| x as u64).collect::<Vec<_>>()));
        }

        #[test]
        fn nonnegative_b_gives_nonnegative_coefficients((q, _) in small_quad()) {
            let q = q.clone().with_b(q.b.iter().map(|x| if *x < Rational::zero() { -x } else { x.clone() }).collect()).unwrap();
            let s = nahm_sum(&q, &int(15), None).unwrap();
            prop_assert!(s.coeffs().iter().all(|c| *c >= BigInt::zero()));
        }
    }
}
