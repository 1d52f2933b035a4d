//! Characters of the rational 2d CFTs that appear on the right-hand sides of
//! the Nahm sum identities, as truncated q-series.
//!
//! Normalizations:
//! - `M(p,p')`: `q^{-1/24} (q)_∞^{-1} Σ_k (q^{(2pp'k+pr-p's)²/4pp'} - q^{(2pp'k+pr+p's)²/4pp'})`
//! - `SM(p,p')`: same numerator over `8pp'`, with `q^{-1/16} (-q^{1/2};q)_∞/(q)_∞`
//!   in the NS sector and `(-q;q)_∞/(q)_∞` in the R sector (no `1/√2`)
//! - `U(1)_K`: `q^{-1/24} (q)_∞^{-1} Σ_n q^{K(n+m/2K)²}`, weight `m²/4K`
//! - free fermion: `q^{-1/48}(-q^{1/2};q)_∞` and `q^{1/24}(-q;q)_∞`
//!
//! "Effective" models reuse the same characters ordered by leading exponent.
//! A weight label always means the effective weight: leading exponent minus
//! the smallest leading exponent of the model (both sectors for `SM`). For
//! unitary models this is the conformal weight.

use std::collections::{BTreeMap, HashMap};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::{congruence_product, product_to_order, theta_series, Length, Pochhammer, QSeries};
use crate::rational::{fmt_rational, rat, serde_pair, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sector {
    NS,
    R,
}

impl std::fmt::Display for Sector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sector::NS => "NS",
            Sector::R => "R",
        })
    }
}

/// Selects one character of a minimal model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    /// Kac label, `1 <= r < p'`, `1 <= s < p`.
    Kac { r: u64, s: u64 },
    /// 1-based position in ascending order of leading exponent.
    Index { j: usize },
    /// Effective conformal weight.
    Weight {
        #[serde(with = "serde_pair")]
        h: Rational,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Composite {
    /// Three-state Potts combination of `M(6,5)`.
    MSub65,
    /// Non-diagonal invariant of Ising ⊗ `M(5,4)`.
    D2A,
}

impl Composite {
    pub fn weights(self) -> Vec<Rational> {
        match self {
            Composite::MSub65 => vec![rat(0, 1), rat(2, 5), rat(2, 3), rat(1, 15)],
            Composite::D2A => vec![rat(0, 1), rat(1, 2), rat(1, 10), rat(3, 5)],
        }
    }

    /// The characters summed into `χ_weight`.
    pub fn parts(self, weight: &Rational) -> Result<Vec<CharacterSpec>> {
        let w = |n, d| Label::Weight { h: rat(n, d) };
        let vir = |p, pp, label| CharacterSpec::Virasoro { p, pp, label };
        let key = (weight.numer().clone(), weight.denom().clone());
        let pair = |n: i64, d: i64| (BigInt::from(n), BigInt::from(d));
        let parts = match self {
            Composite::MSub65 => {
                if key == pair(0, 1) {
                    vec![vir(6, 5, w(0, 1)), vir(6, 5, w(3, 1))]
                } else if key == pair(2, 5) {
                    vec![vir(6, 5, w(2, 5)), vir(6, 5, w(7, 5))]
                } else if key == pair(2, 3) {
                    vec![vir(6, 5, w(2, 3))]
                } else if key == pair(1, 15) {
                    vec![vir(6, 5, w(1, 15))]
                } else {
                    vec![]
                }
            }
            Composite::D2A => {
                // h = h_Ising + h_{M(5,4)}, pairing the Ising vacuum module
                // with one tricritical weight and the energy module with the
                // weight shifted by a half-integer
                let t = |a: (i64, i64), b: (i64, i64)| CharacterSpec::Tensor {
                    factors: vec![vir(4, 3, w(a.0, a.1)), vir(5, 4, w(b.0, b.1))],
                };
                if key == pair(0, 1) {
                    vec![t((0, 1), (0, 1)), t((1, 2), (3, 2))]
                } else if key == pair(1, 2) {
                    vec![t((1, 2), (0, 1)), t((0, 1), (3, 2))]
                } else if key == pair(1, 10) {
                    vec![t((0, 1), (1, 10)), t((1, 2), (3, 5))]
                } else if key == pair(3, 5) {
                    vec![t((0, 1), (3, 5)), t((1, 2), (1, 10))]
                } else {
                    vec![]
                }
            }
        };
        if parts.is_empty() {
            return Err(Error::InvalidLabel(format!(
                "{:?} has no character of weight {}",
                self,
                fmt_rational(weight)
            )));
        }
        Ok(parts)
    }
}

/// Symbolic reference to one character.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CharacterSpec {
    Virasoro {
        p: u64,
        pp: u64,
        label: Label,
    },
    SuperVirasoro {
        p: u64,
        pp: u64,
        sector: Sector,
        label: Label,
    },
    U1 {
        k: u64,
        m: u64,
    },
    FreeFermion {
        sector: Sector,
    },
    Parafermion {
        k: u64,
        l: u64,
        m: i64,
    },
    Composite {
        name: Composite,
        #[serde(with = "serde_pair")]
        weight: Rational,
    },
    Tensor {
        factors: Vec<CharacterSpec>,
    },
}

/// One character of a minimal model in its canonical Kac label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterInfo {
    pub r: u64,
    pub s: u64,
    pub sector: Option<Sector>,
    pub leading_exponent: Rational,
    /// Leading exponent minus the model minimum.
    pub weight: Rational,
}

impl CharacterSpec {
    /// Checks the family invariants and that the label resolves.
    pub fn validate(&self) -> Result<()> {
        match self {
            CharacterSpec::Virasoro { p, pp, label } => {
                resolve_label(*p, *pp, None, label).map(|_| ())
            }
            CharacterSpec::SuperVirasoro { p, pp, sector, label } => {
                resolve_label(*p, *pp, Some(*sector), label).map(|_| ())
            }
            CharacterSpec::U1 { k, m } => check_u1(*k, *m),
            CharacterSpec::FreeFermion { .. } => Ok(()),
            CharacterSpec::Parafermion { k, l, m } => reduce_parafermion(*k, *l, *m).map(|_| ()),
            CharacterSpec::Composite { name, weight } => {
                name.parts(weight)?.iter().try_for_each(|c| c.validate())
            }
            CharacterSpec::Tensor { factors } => factors.iter().try_for_each(|c| c.validate()),
        }
    }

    /// Expansion below `q^order`, served from the shared memo when possible.
    pub fn expand(&self, order: &Rational) -> Result<QSeries> {
        let key = serde_json::to_string(self).expect("spec serializes");
        let memo = memo();
        if let Some(s) = memo.read().expect("memo lock").get(&key) {
            if &s.order() >= order {
                return Ok(s.truncate(order));
            }
        }
        let s = self.expand_uncached(order)?;
        let mut w = memo.write().expect("memo lock");
        let keep = w.get(&key).is_none_or(|old| old.order() < s.order());
        if keep {
            w.insert(key, s.clone());
        }
        Ok(s)
    }

    /// Expansion without touching the memo.
    pub fn expand_uncached(&self, order: &Rational) -> Result<QSeries> {
        match self {
            CharacterSpec::Virasoro { p, pp, label } => {
                let (r, s) = resolve_label(*p, *pp, None, label)?;
                virasoro_character(*p, *pp, r, s, order)
            }
            CharacterSpec::SuperVirasoro { p, pp, sector, label } => {
                let (r, s) = resolve_label(*p, *pp, Some(*sector), label)?;
                super_virasoro_character(*p, *pp, *sector, r, s, order)
            }
            CharacterSpec::U1 { k, m } => u1_character(*k, *m, order),
            CharacterSpec::FreeFermion { sector } => free_fermion_character(*sector, order),
            CharacterSpec::Parafermion { k, l, m } => parafermion_character(*k, *l, *m, order),
            CharacterSpec::Composite { name, weight } => composite_character(*name, weight, order),
            CharacterSpec::Tensor { factors } => {
                product_to_order(factors.len(), order, |i, o| factors[i].expand(o))
            }
        }
    }
}

type Memo = RwLock<HashMap<String, QSeries>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn check_virasoro(p: u64, pp: u64) -> Result<()> {
    if pp < 2 || p <= pp || p.gcd(&pp) != 1 {
        return Err(Error::InvalidLabel(format!("M({p},{pp}) needs coprime p > p' >= 2")));
    }
    Ok(())
}

fn check_super(p: u64, pp: u64) -> Result<()> {
    if pp < 2 || p <= pp || !(p - pp).is_multiple_of(2) || p.gcd(&((p - pp) / 2)) != 1 {
        return Err(Error::InvalidLabel(format!(
            "SM({p},{pp}) needs p > p' >= 2, p-p' even, gcd(p,(p-p')/2) = 1"
        )));
    }
    Ok(())
}

fn check_kac(p: u64, pp: u64, r: u64, s: u64) -> Result<()> {
    if r == 0 || r >= pp || s == 0 || s >= p {
        return Err(Error::InvalidLabel(format!("(r,s) = ({r},{s}) outside 1..{pp} x 1..{p}")));
    }
    Ok(())
}

fn check_parity(sector: Sector, r: u64, s: u64) -> Result<()> {
    let even = (r + s).is_multiple_of(2);
    if even != (sector == Sector::NS) {
        return Err(Error::SectorParityMismatch(format!("{sector} with (r,s) = ({r},{s})")));
    }
    Ok(())
}

/// `min(x mod m, -x mod m)`: the class of `±x` modulo `m`.
fn fold(x: i64, m: i64) -> i64 {
    let r = x.rem_euclid(m);
    r.min(m - r)
}

/// Leading-exponent offset of a sector (`0` for Virasoro and R).
fn sector_offset(sector: Option<Sector>) -> Rational {
    match sector {
        None => rat(-1, 24),
        Some(Sector::NS) => rat(-1, 16),
        Some(Sector::R) => Rational::zero(),
    }
}

/// Theta-difference classes `(x̂, ŷ)` of one sector, each with its first
/// Kac label. Distinct classes give distinct characters: the two theta
/// sums have disjoint supports, and `x̂ < ŷ` always.
fn classes(p: u64, pp: u64, sector: Option<Sector>) -> BTreeMap<(i64, i64), (u64, u64)> {
    let m = 2 * (p * pp) as i64;
    let mut out = BTreeMap::new();
    for r in 1..pp {
        for s in 1..p {
            if let Some(sec) = sector {
                if check_parity(sec, r, s).is_err() {
                    continue;
                }
            }
            let x = (p * r) as i64 - (pp * s) as i64;
            let y = (p * r + pp * s) as i64;
            out.entry((fold(x, m), fold(y, m))).or_insert((r, s));
        }
    }
    out
}

/// All distinct characters of `M(p,p')` (`sector = None`) or one sector of
/// `SM(p,p')`, sorted by leading exponent.
pub fn model_characters(p: u64, pp: u64, sector: Option<Sector>) -> Result<Vec<CharacterInfo>> {
    let den = match sector {
        None => {
            check_virasoro(p, pp)?;
            4 * p * pp
        }
        Some(_) => {
            check_super(p, pp)?;
            8 * p * pp
        }
    };
    let lead = |xh: i64, sec: Option<Sector>| {
        Rational::new(BigInt::from(xh * xh), BigInt::from(den)) + sector_offset(sec)
    };
    let floor = match sector {
        None => classes(p, pp, None).keys().map(|k| lead(k.0, None)).min(),
        Some(_) => [Sector::NS, Sector::R]
            .iter()
            .flat_map(|&sec| classes(p, pp, Some(sec)).into_keys().map(move |k| lead(k.0, Some(sec))))
            .min(),
    }
    .expect("every model has a character");
    Ok(classes(p, pp, sector)
        .into_iter()
        .map(|((xh, _), (r, s))| {
            let e = lead(xh, sector);
            CharacterInfo { r, s, sector, weight: &e - &floor, leading_exponent: e }
        })
        .collect())
}

fn resolve_label(p: u64, pp: u64, sector: Option<Sector>, label: &Label) -> Result<(u64, u64)> {
    let list = model_characters(p, pp, sector)?;
    match label {
        Label::Kac { r, s } => {
            check_kac(p, pp, *r, *s)?;
            if let Some(sec) = sector {
                check_parity(sec, *r, *s)?;
            }
            Ok((*r, *s))
        }
        Label::Index { j } => {
            if *j == 0 || *j > list.len() {
                return Err(Error::IndexOutOfRange { index: *j, len: list.len() });
            }
            Ok((list[j - 1].r, list[j - 1].s))
        }
        Label::Weight { h } => {
            let hits: Vec<&CharacterInfo> = list.iter().filter(|c| &c.weight == h).collect();
            match hits.as_slice() {
                [one] => Ok((one.r, one.s)),
                [] => Err(Error::InvalidLabel(format!("no character of weight {}", fmt_rational(h)))),
                _ => Err(Error::InvalidLabel(format!(
                    "weight {} is shared by {} characters",
                    fmt_rational(h),
                    hits.len()
                ))),
            }
        }
    }
}

fn inv_euler(order: &Rational) -> Result<QSeries> {
    congruence_product(1, 1, &[0], -1, order)
}

/// `Σ_k q^{(Mk+x)²/den} - q^{(Mk+y)²/den}` with `M = 2pp'`.
fn theta_difference(m: i64, x: i64, y: i64, den: i64, order: &Rational) -> Result<QSeries> {
    let t = |z: i64| {
        theta_series(
            &Rational::new(BigInt::from(m * m), BigInt::from(den)),
            &Rational::new(BigInt::from(2 * m * z), BigInt::from(den)),
            &Rational::new(BigInt::from(z * z), BigInt::from(den)),
            order,
        )
    };
    Ok(t(x)?.sub(&t(y)?))
}

/// Virasoro minimal model character `χ_{r,s}` of `M(p,p')` below `q^order`.
pub fn virasoro_character(p: u64, pp: u64, r: u64, s: u64, order: &Rational) -> Result<QSeries> {
    check_virasoro(p, pp)?;
    check_kac(p, pp, r, s)?;
    let shift = rat(-1, 24);
    let o = order - &shift;
    let (p, pp, r, s) = (p as i64, pp as i64, r as i64, s as i64);
    let num = theta_difference(2 * p * pp, p * r - pp * s, p * r + pp * s, 4 * p * pp, &o)?;
    Ok(num.mul(&inv_euler(&o)?).shift(&shift).truncate(order))
}

/// N=1 minimal model character of `SM(p,p')` in the given sector.
pub fn super_virasoro_character(
    p: u64,
    pp: u64,
    sector: Sector,
    r: u64,
    s: u64,
    order: &Rational,
) -> Result<QSeries> {
    check_super(p, pp)?;
    check_kac(p, pp, r, s)?;
    check_parity(sector, r, s)?;
    let shift = sector_offset(Some(sector));
    let o = order - &shift;
    let (p, pp, r, s) = (p as i64, pp as i64, r as i64, s as i64);
    let num = theta_difference(2 * p * pp, p * r - pp * s, p * r + pp * s, 8 * p * pp, &o)?;
    let start = match sector {
        Sector::NS => rat(1, 2),
        Sector::R => rat(1, 1),
    };
    let fermions = Pochhammer::new(start, rat(1, 1), Length::Infinite).negated().expand(&o)?;
    Ok(num.mul(&fermions).mul(&inv_euler(&o)?).shift(&shift).truncate(order))
}

/// The `j`-th character (1-based, ascending leading exponent) of
/// `M(p,p')` or of one sector of `SM(p,p')`.
pub fn effective_character(
    p: u64,
    pp: u64,
    sector: Option<Sector>,
    j: usize,
    order: &Rational,
) -> Result<QSeries> {
    let (r, s) = resolve_label(p, pp, sector, &Label::Index { j })?;
    match sector {
        None => virasoro_character(p, pp, r, s, order),
        Some(sec) => super_virasoro_character(p, pp, sec, r, s, order),
    }
}

fn check_u1(k: u64, m: u64) -> Result<()> {
    if k == 0 || m > k {
        return Err(Error::InvalidLabel(format!("U(1)_{k} needs 0 <= m <= K, got m = {m}")));
    }
    Ok(())
}

/// `U(1)_K` character of weight `m²/4K`.
pub fn u1_character(k: u64, m: u64, order: &Rational) -> Result<QSeries> {
    check_u1(k, m)?;
    let shift = rat(-1, 24);
    let o = order - &shift;
    let (k, m) = (k as i64, m as i64);
    let theta = theta_series(&rat(k, 1), &rat(m, 1), &rat(m * m, 4 * k), &o)?;
    Ok(theta.mul(&inv_euler(&o)?).shift(&shift).truncate(order))
}

pub fn free_fermion_character(sector: Sector, order: &Rational) -> Result<QSeries> {
    let (start, shift) = match sector {
        Sector::NS => (rat(1, 2), rat(-1, 48)),
        Sector::R => (rat(1, 1), rat(1, 24)),
    };
    let o = order - &shift;
    let prod = Pochhammer::new(start, rat(1, 1), Length::Infinite).negated().expand(&o)?;
    Ok(prod.shift(&shift).truncate(order))
}

/// Brings `(l, m)` into `0 <= |m| <= l <= k`, `l ≡ m (mod 2)` using
/// `(l,m) ~ (l,m+2k) ~ (k-l,m+k)` and `m -> -m`.
fn reduce_parafermion(k: u64, l: u64, m: i64) -> Result<(i64, i64)> {
    if k == 0 || l > k || (l as i64 - m).rem_euclid(2) != 0 {
        return Err(Error::InvalidLabel(format!("parafermion (k,l,m) = ({k},{l},{m})")));
    }
    let (k, mut l) = (k as i64, l as i64);
    let mut m = m.rem_euclid(2 * k);
    if m > k {
        m -= 2 * k;
    }
    if m.abs() > l {
        l = k - l;
        m -= k * m.signum();
    }
    Ok((l, m.abs()))
}

/// `Z_k` parafermion character `η·c^l_m` with its conformal weight
/// `l(l+2)/4(k+2) - m²/4k` as leading exponent shift.
///
/// The string function comes from the `[z^m]` coefficient of the level-`k`
/// A₁ character `A_{λ+ρ}/A_ρ`. After cancelling `(q)_∞` against `η`, the
/// needed series is `[z^m] A_{λ+ρ}/((z-z⁻¹) Π_n (1-z²qⁿ)(1-z⁻²qⁿ))`.
/// At `q^e` every factor carries `|z-degree| <= 2e` beyond the numerator's
/// own finite degree, so a z-window of `±2·order` around the numerator terms
/// is exact, not a truncation.
pub fn parafermion_character(k: u64, l: u64, m: i64, order: &Rational) -> Result<QSeries> {
    let (l, m) = reduce_parafermion(k, l, m)?;
    let k = k as i64;
    let c_k = rat(3 * k, k + 2);
    let shift = rat(l * (l + 2), 4 * (k + 2)) - rat(m * m, 4 * k) - c_k / rat(24, 1) + rat(1, 24);
    let need = order - &shift;
    let n = need.ceil().to_integer();
    let n: i64 = if n.is_positive() { i64::try_from(n).map_err(|_| Error::Overflow)? } else { 0 };
    if n == 0 {
        return Ok(QSeries::zero(order));
    }
    let coeffs = string_numerator(k, l, m, n as usize)?;
    let series = QSeries::from_parts(1, 0, coeffs, n)?;
    Ok(series.shift(&shift).truncate(order))
}

fn string_numerator(k: i64, l: i64, m: i64, n: usize) -> Result<Vec<BigInt>> {
    let zmax = 2 * n as i64 + 2;
    let width = (2 * zmax + 1) as usize;
    let idx = |b: i64| (b + zmax) as usize;
    // g[e][b]: coefficient of q^e z^b in 1/Π(1-z²qⁿ)(1-z⁻²qⁿ)
    let mut g = vec![vec![0i128; width]; n];
    g[0][idx(0)] = 1;
    for step in 1..n {
        for dz in [2i64, -2] {
            for e in step..n {
                let (lo, hi) = g.split_at_mut(e);
                let src = &lo[e - step];
                let dst = &mut hi[0];
                for b in -zmax..=zmax {
                    let from = b - dz;
                    if from.abs() > zmax {
                        continue;
                    }
                    let v = src[idx(from)];
                    if v != 0 {
                        dst[idx(b)] = dst[idx(b)].checked_add(v).ok_or(Error::Overflow)?;
                    }
                }
            }
        }
    }
    let mut out = vec![0i128; n];
    // e1 >= nn² for every nn, since k + 2 > l + 1
    let reach = (n as f64).sqrt() as i64 + 2;
    for nn in -reach..=reach {
        let e1 = (k + 2) * nn * nn + (l + 1) * nn;
        if e1 < 0 || e1 as usize >= n {
            continue;
        }
        let e1 = e1 as usize;
        let a = l + 1 + 2 * (k + 2) * nn;
        // (z^a - z^-a)/(z - 1/z) = sign(a) Σ_{t<|a|} z^{|a|-1-2t}
        let sign: i128 = if a > 0 { 1 } else { -1 };
        for t in 0..a.abs() {
            let b = m - (a.abs() - 1 - 2 * t);
            if b.abs() > zmax {
                continue;
            }
            for e in e1..n {
                let v = g[e - e1][idx(b)];
                if v != 0 {
                    out[e] = out[e].checked_add(sign * v).ok_or(Error::Overflow)?;
                }
            }
        }
    }
    Ok(out.into_iter().map(BigInt::from).collect())
}

/// `χ_weight` of a named non-diagonal combination.
pub fn composite_character(name: Composite, weight: &Rational, order: &Rational) -> Result<QSeries> {
    let mut acc = QSeries::zero(order);
    for part in name.parts(weight)? {
        acc = acc.add(&part.expand(order)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nahm::{nahm_sum, NahmQuadruple};
    use crate::dynkin::RationalMatrix;
    use crate::qseries::{equal_to_order, theta_series_signed};
    use crate::rational::int;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn w(n: i64, d: i64) -> Label {
        Label::Weight { h: rat(n, d) }
    }

    fn assert_eq_to(a: &QSeries, b: &QSeries, order: &Rational) {
        let cmp = equal_to_order(a, b, order).unwrap();
        assert!(cmp.equal, "first mismatch at {:?}\n{a}\n{b}", cmp.first_mismatch);
    }

    fn ints(s: &QSeries, n: usize) -> Vec<i64> {
        s.integer_coefficients(0).iter().take(n).map(|c| c.to_i64().unwrap()).collect()
    }

    /// Partitions of `n` (in units of 1/2) into distinct parts from `parts`,
    /// split by the parity of the number of parts. Plain subset DP.
    fn distinct_counts(parts: &[usize], n: usize) -> (Vec<i64>, Vec<i64>) {
        let mut even = vec![0i64; n];
        let mut odd = vec![0i64; n];
        even[0] = 1;
        for &p in parts {
            for t in (p..n).rev() {
                let (e, o) = (even[t - p], odd[t - p]);
                even[t] += o;
                odd[t] += e;
            }
        }
        (even, odd)
    }

    #[test]
    fn lee_yang_characters_are_rogers_ramanujan() {
        let o = int(50);
        let g = congruence_product(1, 5, &[1, 4], -1, &o).unwrap();
        let h = congruence_product(1, 5, &[2, 3], -1, &o).unwrap();
        let c1 = effective_character(5, 2, None, 1, &o).unwrap();
        let c2 = effective_character(5, 2, None, 2, &o).unwrap();
        assert_eq!(c1.leading_exponent(), Some(rat(-1, 60)));
        assert_eq!(c2.leading_exponent(), Some(rat(11, 60)));
        assert_eq_to(&c1, &g.shift(&rat(-1, 60)), &int(49));
        assert_eq_to(&c2, &h.shift(&rat(11, 60)), &int(49));
    }

    #[test]
    fn ising_vacuum_against_fermion_oracle() {
        let o = int(30);
        let chi = virasoro_character(4, 3, 1, 1, &o).unwrap();
        assert_eq!(chi.leading_exponent(), Some(rat(-1, 48)));
        // q^{1/48} χ_0 counts partitions into distinct half-odd parts with an
        // even number of parts, in units of 1/2
        let parts: Vec<usize> = (0..60).map(|i| 2 * i + 1).collect();
        let (even, _) = distinct_counts(&parts, 60);
        let bare = chi.shift(&rat(1, 48));
        for (t, &c) in even.iter().enumerate() {
            assert_eq!(bare.coefficient(&rat(t as i64, 2)).unwrap(), BigInt::from(c), "q^{t}/2");
        }
        assert_eq!(ints(&bare, 6), vec![1, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn andrews_gordon_family() {
        for r in 1..=3u64 {
            let p = 2 * r + 3;
            let o = int(40);
            for j in 1..=(r as usize + 1) {
                let s = r as i64 + 2 - j as i64;
                let residues: Vec<u64> =
                    (1..p).filter(|&n| n as i64 != s && n as i64 != p as i64 - s).collect();
                let prod = congruence_product(1, p, &residues, -1, &o).unwrap();
                let chi = effective_character(p, 2, None, j, &o).unwrap();
                let lead = chi.leading_exponent().unwrap();
                assert_eq_to(&chi.shift(&-&lead), &prod, &int(39));
            }
        }
    }

    #[test]
    fn virasoro_counts_and_leading_exponents() {
        for (p, pp) in [(4, 3), (5, 2), (5, 3), (5, 4), (6, 5), (7, 6), (11, 2), (7, 4)] {
            let list = model_characters(p, pp, None).unwrap();
            assert_eq!(list.len() as u64, (p - 1) * (pp - 1) / 2, "M({p},{pp})");
        }
        let weights: Vec<Rational> =
            model_characters(5, 3, None).unwrap().into_iter().map(|c| c.weight).collect();
        assert_eq!(weights, vec![rat(0, 1), rat(1, 20), rat(1, 4), rat(4, 5)]);
    }

    #[test]
    fn super_weight_lists() {
        let set = |sec| {
            let mut v: Vec<Rational> =
                model_characters(8, 6, Some(sec)).unwrap().into_iter().map(|c| c.weight).collect();
            v.sort();
            v
        };
        let ns: Vec<Rational> = [(0, 1), (1, 32), (1, 12), (5, 32), (1, 4), (5, 6), (33, 32), (5, 4), (3, 1)]
            .iter()
            .map(|&(a, b)| rat(a, b))
            .collect();
        let r: Vec<Rational> =
            [(5, 96), (1, 16), (3, 32), (5, 16), (41, 96), (9, 16), (23, 32), (29, 16), (67, 32)]
                .iter()
                .map(|&(a, b)| rat(a, b))
                .collect();
        assert_eq!(set(Sector::NS), ns);
        assert_eq!(set(Sector::R), r);

        let eff: Vec<Rational> =
            model_characters(14, 4, Some(Sector::NS)).unwrap().into_iter().map(|c| c.weight).collect();
        let want: Vec<Rational> = [
            (0, 1),
            (3, 112),
            (1, 14),
            (3, 14),
            (5, 16),
            (3, 7),
            (99, 112),
            (15, 14),
            (2, 1),
            (45, 14),
        ]
        .iter()
        .map(|&(a, b)| rat(a, b))
        .collect();
        assert_eq!(eff, want);

        assert_eq!(model_characters(84, 2, Some(Sector::NS)).unwrap().len(), 21);
        assert_eq!(model_characters(84, 2, Some(Sector::R)).unwrap().len(), 21);
    }

    #[test]
    fn ramond_lowest_exponent_by_scan() {
        let (p, pp) = (8i64, 2i64);
        let mut best: Option<Rational> = None;
        for r in 1..pp {
            for s in 1..p {
                if (r - s) % 2 == 0 {
                    continue;
                }
                let e = rat((p * r - pp * s).pow(2), 8 * p * pp);
                best = Some(best.map_or(e.clone(), |b: Rational| b.min(e)));
            }
        }
        let first = effective_character(8, 2, Some(Sector::R), 1, &int(5)).unwrap();
        assert_eq!(first.leading_exponent(), best);
    }

    #[test]
    fn melzer_vacuums_are_ns_characters() {
        // the B = 0 rank-2r sum is the NS vacuum of SM(4r+4,2) alone; the
        // second NS character sits a quarter-integer higher
        for r in 1..=3i64 {
            let m = 4 * (r + 1);
            let o = int(30);
            let a = effective_character(m as u64, 2, Some(Sector::NS), 1, &o).unwrap();
            let lead = a.leading_exponent().unwrap();
            let residues: Vec<u64> =
                (1..m).filter(|j| j % 4 != 2 && *j != 2 * r + 1 && *j != 2 * r + 3).map(|j| j as u64).collect();
            let prod = congruence_product(2, m as u64, &residues, -1, &o).unwrap();
            assert_eq_to(&a.shift(&-&lead), &prod, &int(29));
        }
        let b = effective_character(8, 2, Some(Sector::NS), 2, &int(5)).unwrap();
        assert_eq!(b.leading_exponent(), Some(rat(-1, 32) + rat(1, 4)));
    }

    #[test]
    fn t1_d3_triple_product() {
        let r = 3i64;
        let p = (8 * r + 4) as u64;
        let o = int(40);
        let ns = |j| effective_character(p, 2, Some(Sector::NS), j, &o).unwrap();
        let rr = effective_character(p, 2, Some(Sector::R), r as usize + 1, &o).unwrap();
        let chars = ns(1).add(&ns(2 * r as usize + 1)).add(&rr.scale(&BigInt::from(2)));
        let m = (8 * r + 4) as u64;
        let res1: Vec<u64> =
            (1..m).filter(|n| n % 4 != 2 && *n != (4 * r + 1) as u64 && *n != (4 * r + 3) as u64).collect();
        let res2: Vec<u64> = (1..m).filter(|n| n % 4 != 2 && *n != 1 && *n != m - 1).collect();
        let m3 = (4 * r + 2) as u64;
        let res3: Vec<u64> = (1..m3).filter(|n| *n != (r + 1) as u64 && *n != m3 - (r + 1) as u64).collect();
        let t1 = congruence_product(2, m, &res1, -1, &o).unwrap();
        let t2 = congruence_product(2, m, &res2, -1, &o).unwrap().shift(&rat(r, 2));
        let t3 = congruence_product(1, 2, &[1], -1, &o)
            .unwrap()
            .mul(&congruence_product(1, m3, &res3, -1, &o).unwrap())
            .shift(&rat(r, 8))
            .scale(&BigInt::from(2));
        let prod = t1.add(&t2).add(&t3);
        assert_eq_to(&chars.shift(&rat(r, 8 * (2 * r + 1))), &prod, &int(35));
    }

    #[test]
    fn u1_examples() {
        let chi = u1_character(3, 0, &int(10)).unwrap();
        assert_eq!(chi.leading_exponent(), Some(rat(-1, 24)));
        assert_eq!(ints(&chi.shift(&rat(1, 24)), 4), vec![1, 1, 2, 5]);
        let chi = u1_character(3, 3, &int(10)).unwrap();
        assert_eq!(chi.leading_exponent(), Some(rat(3, 4) - rat(1, 24)));
        assert!(u1_character(3, 4, &int(10)).is_err());
    }

    #[test]
    fn u1_difference_is_signed_theta() {
        for k in [3u64, 8, 12, 36] {
            let o = int(40);
            let d = u1_character(k, 0, &o).unwrap().sub(&u1_character(k, k, &o).unwrap());
            let num = d.shift(&rat(1, 24)).mul(&congruence_product(1, 1, &[0], 1, &o).unwrap());
            let want = theta_series_signed(&rat(k as i64, 4), &int(0), &int(0), true, &o).unwrap();
            assert_eq_to(&num, &want, &int(39));
        }
    }

    #[test]
    fn free_fermion_matches_rank_one_sum() {
        let o = int(30);
        let quad = NahmQuadruple::ordinary(RationalMatrix::from_i64(&[vec![1]]), vec![int(0)], rat(-1, 48))
            .unwrap();
        let f = nahm_sum(&quad, &o, None).unwrap();
        let ns = free_fermion_character(Sector::NS, &o).unwrap();
        assert_eq_to(&f, &ns, &int(29));
        let parts: Vec<usize> = (0..60).map(|i| 2 * i + 1).collect();
        let (e, od) = distinct_counts(&parts, 60);
        let bare = ns.shift(&rat(1, 48));
        for t in 0..60 {
            assert_eq!(bare.coefficient(&rat(t as i64, 2)).unwrap(), BigInt::from(e[t] + od[t]));
        }
        let r = free_fermion_character(Sector::R, &o).unwrap();
        assert_eq!(r.leading_exponent(), Some(rat(1, 24)));
        let parts: Vec<usize> = (1..30).collect();
        let (e, od) = distinct_counts(&parts, 30);
        let bare = r.shift(&rat(-1, 24));
        let want: Vec<i64> = (0..29).map(|t| e[t] + od[t]).collect();
        assert_eq!(ints(&bare, 29), want);
        assert_eq!(&want[..4], &[1, 1, 1, 2]);
    }

    #[test]
    fn parafermion_k2_is_ising() {
        let o = int(40);
        for ((l, m), (r, s)) in [((0, 0), (1, 1)), ((2, 0), (1, 3)), ((1, 1), (1, 2))] {
            let pf = parafermion_character(2, l, m, &o).unwrap();
            let is = virasoro_character(4, 3, r, s, &o).unwrap();
            assert_eq_to(&pf, &is, &int(39));
        }
    }

    #[test]
    fn parafermion_weights_and_identifications() {
        let lead = |k, l, m| parafermion_character(k, l, m, &int(5)).unwrap().leading_exponent().unwrap();
        // c(Z_k) = 2(k-1)/(k+2); weight 1 for (4,0), 3/4 for (4,2)
        let c = |k: i64| rat(2 * (k - 1), k + 2) / int(24);
        assert_eq!(lead(4, 4, 0), rat(1, 1) - c(4));
        assert_eq!(lead(4, 4, 2), rat(3, 4) - c(4));
        assert_eq!(lead(6, 6, 0), rat(3, 2) - c(6));
        assert_eq!(lead(6, 6, 4), rat(5, 6) - c(6));
        assert_eq!(lead(6, 6, 2), rat(4, 3) - c(6));
        let o = int(20);
        let a = parafermion_character(4, 1, 1, &o).unwrap();
        let b = parafermion_character(4, 3, -3, &o).unwrap();
        let b2 = parafermion_character(4, 1, 9, &o).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, b2);
        assert!(parafermion_character(4, 1, 0, &o).is_err());
    }

    #[test]
    fn tensor_leading_exponents_add() {
        let a = CharacterSpec::Virasoro { p: 5, pp: 2, label: w(0, 1) };
        let b = CharacterSpec::Virasoro { p: 6, pp: 5, label: w(2, 3) };
        let t = CharacterSpec::Tensor { factors: vec![a.clone(), b.clone()] };
        let o = int(20);
        let (sa, sb, st) = (a.expand(&o).unwrap(), b.expand(&o).unwrap(), t.expand(&o).unwrap());
        assert_eq!(
            st.leading_exponent().unwrap(),
            sa.leading_exponent().unwrap() + sb.leading_exponent().unwrap()
        );
        assert_eq_to(&st, &sa.mul(&sb), &(o.clone() + sa.leading_exponent().unwrap().min(sb.leading_exponent().unwrap())));
    }

    #[test]
    fn composites_have_expected_leading_terms() {
        let o = int(10);
        for name in [Composite::MSub65, Composite::D2A] {
            let mut leads = Vec::new();
            for h in name.weights() {
                let s = composite_character(name, &h, &o).unwrap();
                assert!(s.leading_coefficient().unwrap().is_positive());
                leads.push(s.leading_exponent().unwrap() - h);
            }
            assert!(leads.windows(2).all(|p| p[0] == p[1]), "{name:?}: {leads:?}");
        }
        assert!(composite_character(Composite::D2A, &rat(1, 3), &o).is_err());
    }

    #[test]
    fn labels_and_errors() {
        let o = int(5);
        assert!(matches!(
            super_virasoro_character(8, 6, Sector::NS, 1, 2, &o),
            Err(Error::SectorParityMismatch(_))
        ));
        assert!(matches!(virasoro_character(6, 4, 1, 1, &o), Err(Error::InvalidLabel(_))));
        assert!(matches!(
            effective_character(5, 2, None, 3, &o),
            Err(Error::IndexOutOfRange { index: 3, len: 2 })
        ));
        let spec = CharacterSpec::SuperVirasoro { p: 8, pp: 6, sector: Sector::NS, label: w(33, 32) };
        spec.validate().unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: CharacterSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn memo_is_transparent_across_threads() {
        let spec = CharacterSpec::SuperVirasoro { p: 28, pp: 2, sector: Sector::R, label: w(3, 8) };
        let direct = spec.expand_uncached(&int(40)).unwrap();
        let results: Vec<QSeries> = std::thread::scope(|sc| {
            let hs: Vec<_> = (0..4)
                .map(|i| {
                    let spec = &spec;
                    sc.spawn(move || spec.expand(&int(20 + 10 * (i % 3))).unwrap())
                })
                .collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for r in results {
            assert_eq!(r, direct.truncate(&r.order()));
        }
        assert_eq!(spec.expand(&int(40)).unwrap(), direct);
    }

    proptest! {
        #[test]
        fn virasoro_leading_exponent_formula(pp in 2u64..11, delta in 1u64..8, r0 in 0u64..100, s0 in 0u64..100) {
            let p = pp + delta;
            prop_assume!(p.gcd(&pp) == 1);
            let (r, s) = (1 + r0 % (pp - 1), 1 + s0 % (p - 1));
            let (pi, ppi, ri, si) = (p as i64, pp as i64, r as i64, s as i64);
            let c = int(1) - rat(6 * (pi - ppi).pow(2), pi * ppi);
            let h = rat((pi * ri - ppi * si).pow(2) - (pi - ppi).pow(2), 4 * pi * ppi);
            let chi = virasoro_character(p, pp, r, s, &(h.floor() + int(6))).unwrap();
            prop_assert_eq!(chi.leading_exponent().unwrap(), h - c / int(24));
            prop_assert!(chi.coeffs().iter().all(|x| !x.is_negative()));
        }

        #[test]
        fn super_characters_nonnegative(pp in 2u64..10, half in 1u64..6, r in 1u64..10, s in 1u64..21) {
            let p = pp + 2 * half;
            prop_assume!(p.gcd(&half) == 1 && r < pp && s < p);
            let sector = if (r + s) % 2 == 0 { Sector::NS } else { Sector::R };
            let x = (p * r) as i64 - (pp * s) as i64;
            let lead = rat(x * x, (8 * p * pp) as i64);
            let chi = super_virasoro_character(p, pp, sector, r, s, &(lead.floor() + int(5))).unwrap();
            prop_assert_eq!(chi.leading_coefficient(), Some(&BigInt::from(1)));
            prop_assert!(chi.coeffs().iter().all(|x| !x.is_negative()));
        }
    }
}
