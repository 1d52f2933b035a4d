//! Truncated q-series on the exponent grid `(1/g)·Z` with big-integer
//! coefficients.
//!
//! A [`QSeries`] stores `Σ c_i q^((min_exp + i)/grain)` for
//! `min_exp <= min_exp + i < order`; everything at or above `q^(order/grain)`
//! is unknown. Every operation tracks the order it can justify, so a result
//! never claims more precision than its inputs.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{denom_u64, fmt_rational, from_units, lcm_u64, to_units, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    grain: u64,
    min_exp: i64,
    coeffs: Vec<BigInt>,
    order: i64,
}

/// Result of [`equal_to_order`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub equal: bool,
    pub first_mismatch: Option<Rational>,
}

/// Length of a q-Pochhammer product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Length {
    Finite(u64),
    Infinite,
}

/// On-disk series record. Coefficients are decimal strings so that no
/// reader needs big-integer JSON support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub grain: u64,
    pub min_exp: i64,
    pub order: i64,
    pub coeffs: Vec<String>,
}

fn units_or_offgrain(x: &Rational, grain: u64) -> Result<i64> {
    to_units(x, grain).ok_or_else(|| Error::OffGrain { exp: fmt_rational(x), grain })
}

impl QSeries {
    /// Builds a series from raw parts and canonicalizes it.
    pub fn from_parts(grain: u64, min_exp: i64, coeffs: Vec<BigInt>, order: i64) -> Result<Self> {
        if grain == 0 {
            return Err(Error::InvalidSeries("grain must be >= 1".into()));
        }
        if order < min_exp || (order - min_exp) as usize != coeffs.len() {
            return Err(Error::InvalidSeries(format!(
                "expected {} coefficients between min_exp {min_exp} and order {order}, got {}",
                order.saturating_sub(min_exp),
                coeffs.len()
            )));
        }
        let mut s = QSeries { grain, min_exp, coeffs, order };
        s.canonicalize();
        Ok(s)
    }

    pub fn from_i64s(grain: u64, min_exp: i64, coeffs: &[i64], order: i64) -> Result<Self> {
        let len = (order - min_exp).max(0) as usize;
        if coeffs.len() > len {
            return Err(Error::InvalidSeries(format!(
                "{} coefficients do not fit below order {order}",
                coeffs.len()
            )));
        }
        let mut v: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        v.resize(len, BigInt::zero());
        Self::from_parts(grain, min_exp, v, order)
    }

    /// Integer-exponent polynomial `Σ coeffs[i] q^i + O(q^order)`.
    pub fn from_coeffs(coeffs: &[i64], order: i64) -> Result<Self> {
        Self::from_i64s(1, 0, coeffs, order)
    }

    pub fn zero(order: &Rational) -> Self {
        let grain = denom_u64(order);
        let o = to_units(order, grain).expect("order on its own grain");
        QSeries { grain, min_exp: o, coeffs: Vec::new(), order: o }
    }

    pub fn one(order: &Rational) -> Self {
        Self::monomial(&Rational::zero(), BigInt::one(), order)
    }

    /// `coeff · q^exp + O(q^order)`.
    pub fn monomial(exp: &Rational, coeff: BigInt, order: &Rational) -> Self {
        let grain = lcm_u64(denom_u64(exp), denom_u64(order));
        let e = to_units(exp, grain).unwrap();
        let o = to_units(order, grain).unwrap();
        if e >= o {
            return QSeries { grain, min_exp: o, coeffs: Vec::new(), order: o };
        }
        let mut coeffs = vec![BigInt::zero(); (o - e) as usize];
        coeffs[0] = coeff;
        let mut s = QSeries { grain, min_exp: e, coeffs, order: o };
        s.canonicalize();
        s
    }

    pub fn grain(&self) -> u64 {
        self.grain
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    /// Truncation bound in units of `1/grain`.
    pub fn order_units(&self) -> i64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Truncation bound as an exponent.
    pub fn order(&self) -> Rational {
        from_units(self.order, self.grain)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn leading_exponent(&self) -> Option<Rational> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| from_units(self.min_exp + i as i64, self.grain))
    }

    pub fn leading_coefficient(&self) -> Option<&BigInt> {
        self.coeffs.iter().find(|c| !c.is_zero())
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (Rational, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (from_units(self.min_exp + i as i64, self.grain), c))
    }

    /// Drops leading zeros and reduces the grain as far as the support and
    /// the order allow.
    fn canonicalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.min_exp = self.order;
            }
            Some(k) if k > 0 => {
                self.coeffs.drain(..k);
                self.min_exp += k as i64;
            }
            _ => {}
        }
        let mut d = (self.grain as i64).gcd(&self.order);
        if !self.coeffs.is_empty() {
            d = d.gcd(&self.min_exp);
            for (i, c) in self.coeffs.iter().enumerate() {
                if d == 1 {
                    break;
                }
                if !c.is_zero() {
                    d = d.gcd(&(i as i64));
                }
            }
        }
        if d > 1 {
            let d_usize = d as usize;
            self.coeffs = self.coeffs.iter().step_by(d_usize).cloned().collect();
            self.grain /= d as u64;
            self.min_exp /= d;
            self.order /= d;
            // step_by keeps ceil(len/d) entries; the exact length is (order-min)
            self.coeffs.truncate((self.order - self.min_exp) as usize);
        }
    }

    /// Same series on grain `grain * k` (not canonical).
    fn rescaled(&self, k: u64) -> QSeries {
        if k == 1 {
            return self.clone();
        }
        let ki = k as i64;
        let min_exp = self.min_exp * ki;
        let order = self.order * ki;
        let mut coeffs = vec![BigInt::zero(); (order - min_exp) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c.clone();
        }
        QSeries { grain: self.grain * k, min_exp, coeffs, order }
    }

    fn on_grain(&self, grain: u64) -> QSeries {
        debug_assert_eq!(grain % self.grain, 0);
        self.rescaled(grain / self.grain)
    }

    fn coeff_units(&self, e: i64) -> Option<&BigInt> {
        if e < self.min_exp || e >= self.order {
            None
        } else {
            Some(&self.coeffs[(e - self.min_exp) as usize])
        }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.combine(other, true)
    }

    fn combine(&self, other: &QSeries, subtract: bool) -> QSeries {
        let g = lcm_u64(self.grain, other.grain);
        let a = self.on_grain(g);
        let b = other.on_grain(g);
        let order = a.order.min(b.order);
        let min_exp = a.min_exp.min(b.min_exp).min(order);
        let mut coeffs = vec![BigInt::zero(); (order - min_exp) as usize];
        for (i, c) in a.coeffs.iter().enumerate() {
            let e = a.min_exp + i as i64;
            if e < order {
                coeffs[(e - min_exp) as usize] += c;
            }
        }
        for (i, c) in b.coeffs.iter().enumerate() {
            let e = b.min_exp + i as i64;
            if e < order {
                if subtract {
                    coeffs[(e - min_exp) as usize] -= c;
                } else {
                    coeffs[(e - min_exp) as usize] += c;
                }
            }
        }
        let mut s = QSeries { grain: g, min_exp, coeffs, order };
        s.canonicalize();
        s
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            grain: self.grain,
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            order: self.order,
        }
    }

    pub fn scale(&self, k: &BigInt) -> QSeries {
        let mut s = QSeries {
            grain: self.grain,
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            order: self.order,
        };
        s.canonicalize();
        s
    }

    /// Multiplies by `q^exp`; the order shifts along.
    pub fn shift(&self, exp: &Rational) -> QSeries {
        let g = lcm_u64(self.grain, denom_u64(exp));
        let mut s = self.on_grain(g);
        let e = to_units(exp, g).unwrap();
        s.min_exp += e;
        s.order += e;
        s.canonicalize();
        s
    }

    /// Forgets everything at or above `q^order`. Orders above the current one
    /// are clamped.
    pub fn truncate(&self, order: &Rational) -> QSeries {
        let g = lcm_u64(self.grain, denom_u64(order));
        let mut s = self.on_grain(g);
        let o = to_units(order, g).unwrap().min(s.order);
        if o <= s.min_exp {
            s.min_exp = o;
            s.coeffs.clear();
        } else {
            s.coeffs.truncate((o - s.min_exp) as usize);
        }
        s.order = o;
        s.canonicalize();
        s
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let g = lcm_u64(self.grain, other.grain);
        let a = self.on_grain(g);
        let b = other.on_grain(g);
        let order = (a.order + b.min_exp).min(b.order + a.min_exp);
        let min_exp = (a.min_exp + b.min_exp).min(order);
        let len = (order - min_exp) as usize;
        let mut coeffs = vec![BigInt::zero(); len];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() || i >= len {
                continue;
            }
            for (j, y) in b.coeffs.iter().take(len - i).enumerate() {
                if !y.is_zero() {
                    coeffs[i + j] += x * y;
                }
            }
        }
        let mut s = QSeries { grain: g, min_exp, coeffs, order };
        s.canonicalize();
        s
    }

    /// `b` with `self · b = 1 + O(q^order)`. The leading coefficient must be
    /// `±1`.
    pub fn inverse(&self, order: &Rational) -> Result<QSeries> {
        let lead = self.leading_coefficient().ok_or(Error::NonUnitLeading)?;
        let sign = if lead.is_one() {
            BigInt::one()
        } else if (-lead).is_one() {
            -BigInt::one()
        } else {
            return Err(Error::NonUnitLeading);
        };
        let g = lcm_u64(self.grain, denom_u64(order));
        let a = self.on_grain(g);
        let n = to_units(order, g).unwrap();
        let m = a.min_exp;
        if n > a.order - m {
            return Err(Error::InsufficientOrder {
                requested: fmt_rational(order),
                available: fmt_rational(&from_units(a.order - m, g)),
            });
        }
        // b = q^{-m} Σ b_k q^k with Σ_{i<=k} a_{m+i} b_{k-i} = δ_k0
        let len = n.max(0) as usize;
        let mut b: Vec<BigInt> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = if k == 0 { BigInt::one() } else { BigInt::zero() };
            for i in 1..=k.min(a.coeffs.len().saturating_sub(1)) {
                let ai = &a.coeffs[i];
                if !ai.is_zero() {
                    acc -= ai * &b[k - i];
                }
            }
            b.push(&acc * &sign);
        }
        let mut s = QSeries { grain: g, min_exp: -m, coeffs: b, order: n - m };
        if len == 0 {
            s.min_exp = s.order;
        }
        s.canonicalize();
        Ok(s)
    }

    /// Coefficient of `q^exp`. Exponents below the stored range are zero by
    /// canonicity.
    pub fn coefficient(&self, exp: &Rational) -> Result<BigInt> {
        let e = units_or_offgrain(exp, self.grain)?;
        if e >= self.order {
            return Err(Error::OutOfRange(fmt_rational(exp)));
        }
        Ok(self.coeff_units(e).cloned().unwrap_or_default())
    }

    pub fn to_record(&self) -> SeriesRecord {
        SeriesRecord {
            grain: self.grain,
            min_exp: self.min_exp,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_record(rec: &SeriesRecord) -> Result<Self> {
        let coeffs = rec
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(|e| Error::Parse(format!("{s}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(rec.grain, rec.min_exp, coeffs, rec.order)
    }

    /// Coefficients on the integer grid `q^k`, `k` from `from` (inclusive) up
    /// to the order. Entries off the grid are skipped.
    pub fn integer_coefficients(&self, from: i64) -> Vec<BigInt> {
        let g = self.grain as i64;
        let end = Integer::div_ceil(&self.order, &g);
        (from..end)
            .filter(|k| k * g < self.order)
            .map(|k| self.coeff_units(k * g).cloned().unwrap_or_default())
            .collect()
    }

    // -- in-place kernels on series with nonnegative support --------------

    /// Multiplies by `(1 + sign·q^e)`, `e` in grain units, `e > 0`.
    pub(crate) fn mul_binomial_in_place(coeffs: &mut [BigInt], e: usize, sign: i8) {
        if e == 0 || e >= coeffs.len() {
            return;
        }
        for i in (e..coeffs.len()).rev() {
            let (lo, hi) = coeffs.split_at_mut(i);
            let src = &lo[i - e];
            if src.is_zero() {
                continue;
            }
            if sign < 0 {
                hi[0] -= src;
            } else {
                hi[0] += src;
            }
        }
    }

    /// Divides by `(1 + sign·q^e)`, `e > 0`.
    pub(crate) fn div_binomial_in_place(coeffs: &mut [BigInt], e: usize, sign: i8) {
        if e == 0 || e >= coeffs.len() {
            return;
        }
        for i in e..coeffs.len() {
            let (lo, hi) = coeffs.split_at_mut(i);
            let src = &lo[i - e];
            if src.is_zero() {
                continue;
            }
            // 1/(1-x) = Σ x^k ; 1/(1+x) = Σ (-x)^k
            if sign < 0 {
                hi[0] += src;
            } else {
                hi[0] -= src;
            }
        }
    }

    /// Power series with nonnegative support and an explicit buffer.
    pub(crate) fn from_buffer(grain: u64, coeffs: Vec<BigInt>) -> QSeries {
        let order = coeffs.len() as i64;
        let mut s = QSeries { grain, min_exp: 0, coeffs, order };
        s.canonicalize();
        s
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = if e.is_zero() {
                String::new()
            } else if e.is_one() {
                "q".to_string()
            } else if e.is_integer() && !e.is_negative() {
                format!("q^{}", fmt_rational(&e))
            } else {
                format!("q^({})", fmt_rational(&e))
            };
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        let o = self.order();
        if o.is_integer() {
            write!(f, " + O(q^{})", fmt_rational(&o))
        } else {
            write!(f, " + O(q^({}))", fmt_rational(&o))
        }
    }
}

impl std::ops::Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add(self, rhs)
    }
}

impl std::ops::Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::sub(self, rhs)
    }
}

impl std::ops::Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl std::ops::Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::neg(self)
    }
}

/// Compares `a` and `b` strictly below `q^order`.
pub fn equal_to_order(a: &QSeries, b: &QSeries, order: &Rational) -> Result<Comparison> {
    for s in [a, b] {
        if &s.order() < order {
            return Err(Error::InsufficientOrder {
                requested: fmt_rational(order),
                available: fmt_rational(&s.order()),
            });
        }
    }
    let diff = a.truncate(order).sub(&b.truncate(order));
    Ok(Comparison { equal: diff.is_zero(), first_mismatch: diff.leading_exponent() })
}

/// Product of `n` factors known below `q^order`, where `eval(i, o)` expands
/// factor `i` below `q^o`. Factors with negative leading exponents force the
/// others to be expanded further; lower bounds only grow, so this settles.
pub fn product_to_order<F>(n: usize, order: &Rational, eval: F) -> Result<QSeries>
where
    F: Fn(usize, &Rational) -> Result<QSeries>,
{
    if n == 0 {
        return Ok(QSeries::one(order));
    }
    let mut parts: Vec<QSeries> = (0..n).map(|i| eval(i, order)).collect::<Result<_>>()?;
    let lower = |s: &QSeries| s.leading_exponent().unwrap_or_else(|| s.order());
    for _ in 0..=n {
        let bounds: Vec<Rational> = parts.iter().map(lower).collect();
        let total: Rational = bounds.iter().sum();
        let mut changed = false;
        for i in 0..n {
            let need = order - (&total - &bounds[i]);
            if need > parts[i].order() {
                parts[i] = eval(i, &need)?;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut acc = parts[0].clone();
    for p in &parts[1..] {
        acc = acc.mul(p);
    }
    Ok(acc.truncate(order))
}

fn grain_of(xs: &[&Rational]) -> u64 {
    xs.iter().fold(1, |g, x| lcm_u64(g, denom_u64(x)))
}

/// A q-Pochhammer symbol `(±q^start; q^step)_n`, optionally inverted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pochhammer {
    pub start: Rational,
    pub step: Rational,
    pub len: Length,
    /// `(-x; q)_n` instead of `(x; q)_n`.
    pub negated: bool,
}

impl Pochhammer {
    pub fn new(start: Rational, step: Rational, len: Length) -> Self {
        Pochhammer { start, step, len, negated: false }
    }

    pub fn negated(mut self) -> Self {
        self.negated = !self.negated;
        self
    }

    fn sign(&self) -> i8 {
        if self.negated {
            1
        } else {
            -1
        }
    }

    fn check(&self) -> Result<()> {
        if self.len == Length::Infinite {
            if !self.step.is_positive() {
                return Err(Error::DivergentProduct(format!(
                    "step {} must be positive",
                    fmt_rational(&self.step)
                )));
            }
            if !self.start.is_positive() {
                return Err(Error::DivergentProduct(format!(
                    "start {} must be positive for an infinite product",
                    fmt_rational(&self.start)
                )));
            }
        }
        Ok(())
    }

    /// Factor exponents below `order` (all of them for finite products).
    fn factor_exponents(&self, order: &Rational) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut e = self.start.clone();
        let mut j = 0u64;
        loop {
            match self.len {
                Length::Finite(n) if j >= n => break,
                Length::Infinite if &e >= order => break,
                _ => {}
            }
            // finite products with positive step stop contributing past the order
            if self.step.is_positive() && self.start.is_positive() && &e >= order {
                break;
            }
            out.push(e.clone());
            e += &self.step;
            j += 1;
        }
        out
    }

    fn expand_with(&self, order: &Rational, invert: bool) -> Result<QSeries> {
        self.check()?;
        let sign = self.sign();
        let exps = self.factor_exponents(order);
        if exps.iter().all(|e| e.is_positive()) {
            let mut refs: Vec<&Rational> = exps.iter().collect();
            refs.push(order);
            let g = grain_of(&refs);
            let n = to_units(order, g).unwrap();
            if n <= 0 {
                return Ok(QSeries::zero(order));
            }
            let mut buf = vec![BigInt::zero(); n as usize];
            buf[0] = BigInt::one();
            for e in &exps {
                let u = to_units(e, g).unwrap() as usize;
                if invert {
                    QSeries::div_binomial_in_place(&mut buf, u, sign);
                } else {
                    QSeries::mul_binomial_in_place(&mut buf, u, sign);
                }
            }
            return Ok(QSeries::from_buffer(g, buf));
        }
        // general finite product with nonpositive exponents
        let big = exps.iter().fold(order.clone(), |acc, e| if e < &acc { acc } else { e.clone() });
        let lowest = exps.iter().filter(|e| e.is_negative()).fold(Rational::zero(), |a, e| a + e);
        let work = &big - &lowest + Rational::one();
        let mut acc = QSeries::one(&(order - &lowest + &work));
        for e in &exps {
            let factor = QSeries::one(&(order - &lowest + &work)).add(&QSeries::monomial(
                e,
                BigInt::from(sign),
                &(order - &lowest + &work + e.abs()),
            ));
            acc = acc.mul(&factor);
        }
        let acc = acc.truncate(&(order - &lowest));
        if invert {
            acc.inverse(order)
        } else {
            Ok(acc.truncate(order))
        }
    }

    pub fn expand(&self, order: &Rational) -> Result<QSeries> {
        self.expand_with(order, false)
    }

    pub fn expand_inverse(&self, order: &Rational) -> Result<QSeries> {
        self.expand_with(order, true)
    }
}

/// `(q^start; q^step)_n` truncated below `q^order`.
pub fn pochhammer(start: &Rational, step: &Rational, n: Length, order: &Rational) -> Result<QSeries> {
    Pochhammer::new(start.clone(), step.clone(), n).expand(order)
}

/// `∏_{n>=1, n mod m ∈ residues} (1 - q^{n/s})^{exponent}` below `q^order`.
pub fn congruence_product(
    scale_den: u64,
    modulus: u64,
    residues: &[u64],
    exponent: i32,
    order: &Rational,
) -> Result<QSeries> {
    if scale_den == 0 || modulus == 0 {
        return Err(Error::InvalidArgument("scale and modulus must be positive".into()));
    }
    if residues.is_empty() || residues.iter().any(|&r| r >= modulus) {
        return Err(Error::InvalidArgument(format!(
            "residues must be a nonempty subset of 0..{modulus}"
        )));
    }
    if exponent != 1 && exponent != -1 {
        return Err(Error::InvalidArgument("exponent must be +1 or -1".into()));
    }
    let g = lcm_u64(scale_den, denom_u64(order));
    let n = to_units(order, g).unwrap();
    if n <= 0 {
        return Ok(QSeries::zero(order));
    }
    let mut buf = vec![BigInt::zero(); n as usize];
    buf[0] = BigInt::one();
    let step = g / scale_den;
    let mut k = 1u64;
    while (k * step) < n as u64 {
        if residues.contains(&(k % modulus)) {
            let u = (k * step) as usize;
            if exponent > 0 {
                QSeries::mul_binomial_in_place(&mut buf, u, -1);
            } else {
                QSeries::div_binomial_in_place(&mut buf, u, -1);
            }
        }
        k += 1;
    }
    Ok(QSeries::from_buffer(g, buf))
}

/// `Σ_{k∈Z} q^{a k² + b k + c}` below `q^order`.
pub fn theta_series(a: &Rational, b: &Rational, c: &Rational, order: &Rational) -> Result<QSeries> {
    theta_series_signed(a, b, c, false, order)
}

/// Theta series with an optional `(-1)^k` sign.
pub fn theta_series_signed(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    alternating: bool,
    order: &Rational,
) -> Result<QSeries> {
    if !a.is_positive() {
        return Err(Error::IndefiniteTheta(fmt_rational(a)));
    }
    let g = grain_of(&[a, b, c, order]);
    let o = to_units(order, g).unwrap();
    // vertex of the parabola; scan outward in both directions until the
    // exponent reaches the order
    let center = (-b / (a * Rational::from_integer(2.into()))).floor().to_integer();
    let center = center.to_i64().ok_or(Error::Overflow)?;
    let exp_units = |k: i64| -> i64 {
        let k = Rational::from_integer(k.into());
        to_units(&(a * &k * &k + b * &k + c), g).unwrap()
    };
    let mut terms: Vec<(i64, i64)> = Vec::new();
    for dir in [1i64, -1] {
        let mut k = if dir == 1 { center } else { center - 1 };
        loop {
            let e = exp_units(k);
            let moving_away = if dir == 1 { k > center } else { k <= center - 2 };
            if e >= o {
                if moving_away {
                    break;
                }
            } else {
                terms.push((e, if alternating && k.rem_euclid(2) == 1 { -1 } else { 1 }));
            }
            k += dir;
        }
    }
    let min_exp = terms.iter().map(|t| t.0).min().unwrap_or(o).min(o);
    let mut coeffs = vec![BigInt::zero(); (o - min_exp) as usize];
    for (e, s) in terms {
        coeffs[(e - min_exp) as usize] += s;
    }
    QSeries::from_parts(g, min_exp, coeffs, o)
}
