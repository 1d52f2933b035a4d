//! Numerical side of the central-charge formula: the Nahm equation
//! `1 - x_i = Π_j x_j^{a_ij}` on `(0,1)^r`, the Rogers dilogarithm, the
//! saddle-point value `c = (6/π²) Σ_i L(1-x_i)/d_i`, and a Cardy-type fit of
//! coefficient growth.
//!
//! `B` and `C` only move subleading asymptotics, so they never enter here.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::dynkin::RationalMatrix;
use crate::error::{Error, Result};
use crate::qseries::QSeries;
use crate::rational::{to_f64, Rational};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct NahmSolution {
    pub x: Vec<f64>,
    /// `max_i |1 - x_i - Π_j x_j^{a_ij}|`.
    pub residual: f64,
    pub iterations: usize,
}

fn to_f64_matrix(a: &RationalMatrix) -> Result<Vec<Vec<f64>>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", a.rows(), a.cols())));
    }
    Ok((0..a.rows()).map(|i| a.row(i).iter().map(to_f64).collect()).collect())
}

/// `Π_j x_j^{a_ij}` for each row.
fn products(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    a.iter().map(|row| row.iter().zip(&logs).map(|(c, l)| c * l).sum::<f64>().exp()).collect()
}

fn residual(a: &[Vec<f64>], x: &[f64]) -> f64 {
    products(a, x).iter().zip(x).map(|(p, v)| (1.0 - v - p).abs()).fold(0.0, f64::max)
}

fn inside(x: &[f64]) -> bool {
    x.iter().all(|v| *v > 0.0 && *v < 1.0)
}

/// Solves the Nahm equation of `A` by damped fixed-point iteration from
/// `x = (1/2, ..., 1/2)`: `x ← x + ω(1 - Πx^a - x)`, halving `ω` whenever a
/// step would leave `(0,1)^r` or increase the residual. Stiff systems that
/// stall are finished by Newton's method in `log x`.
pub fn solve_nahm_equation(a: &RationalMatrix, tol: f64) -> Result<NahmSolution> {
    solve_with_limit(a, tol, DEFAULT_MAX_ITER)
}

pub fn solve_with_limit(a: &RationalMatrix, tol: f64, max_iter: usize) -> Result<NahmSolution> {
    let m = to_f64_matrix(a)?;
    let r = m.len();
    let mut x = vec![0.5; r];
    let mut res = residual(&m, &x);
    let mut omega = 1.0f64;
    let mut it = 0;
    let mut since_newton = 0;
    while res >= tol && it < max_iter {
        it += 1;
        since_newton += 1;
        let p = products(&m, &x);
        let cand: Vec<f64> = x.iter().zip(&p).map(|(v, pv)| v + omega * (1.0 - pv - v)).collect();
        let cres = if inside(&cand) { residual(&m, &cand) } else { f64::INFINITY };
        if cres < res {
            x = cand;
            res = cres;
            omega = (omega * 1.5).min(1.0);
        } else {
            omega *= 0.5;
        }
        if omega < 1e-6 || since_newton >= 500 {
            since_newton = 0;
            omega = omega.max(1e-3);
            if let Some((nx, nres, used)) = newton(&m, &x, tol, max_iter - it) {
                it += used;
                if nres < res {
                    x = nx;
                    res = nres;
                }
            }
        }
    }
    if res >= tol {
        return Err(Error::NoConvergence { iterations: it, residual: res });
    }
    Ok(NahmSolution { x, residual: res, iterations: it })
}

/// Newton on `G_i(y) = ln(1 - e^{y_i}) - Σ_j a_ij y_j` with `y = ln x`,
/// backtracking so that `y < 0` and `|G|` decreases.
fn newton(a: &[Vec<f64>], x0: &[f64], tol: f64, budget: usize) -> Option<(Vec<f64>, f64, usize)> {
    let r = x0.len();
    let mut y: Vec<f64> = x0.iter().map(|v| v.ln()).collect();
    let g_of = |y: &[f64]| -> Vec<f64> {
        (0..r)
            .map(|i| (-y[i].exp()).ln_1p() - a[i].iter().zip(y).map(|(c, v)| c * v).sum::<f64>())
            .collect()
    };
    let norm = |g: &[f64]| g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut g = g_of(&y);
    let mut used = 0;
    for _ in 0..budget.min(200) {
        used += 1;
        let x: Vec<f64> = y.iter().map(|v| v.exp()).collect();
        if residual(a, &x) < tol {
            break;
        }
        let mut jac: Vec<Vec<f64>> = a.iter().map(|row| row.iter().map(|c| -c).collect()).collect();
        for i in 0..r {
            jac[i][i] -= x[i] / (1.0 - x[i]);
        }
        let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
        let step = solve_linear(jac, rhs)?;
        let mut t = 1.0;
        let current = norm(&g);
        loop {
            let cand: Vec<f64> = y.iter().zip(&step).map(|(v, s)| v + t * s).collect();
            if cand.iter().all(|v| *v < 0.0) {
                let cg = g_of(&cand);
                if norm(&cg) < current {
                    y = cand;
                    g = cg;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return None;
            }
        }
    }
    let x: Vec<f64> = y.iter().map(|v| v.exp()).collect();
    let res = residual(a, &x);
    inside(&x).then_some((x, res, used))
}

/// Gaussian elimination with partial pivoting.
fn solve_linear(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[piv][k].abs() < 1e-300 {
            return None;
        }
        m.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / m[k][k];
    }
    Some(x)
}

/// `Li₂(x)` for `0 <= x <= 1/2` by its power series.
fn li2_small(x: f64) -> f64 {
    let mut term = x;
    let mut sum = 0.0f64;
    let mut k = 1.0f64;
    while term > 1e-18 * sum.max(1e-300) || k < 2.0 {
        sum += term / (k * k);
        term *= x;
        k += 1.0;
        if k > 200.0 {
            break;
        }
    }
    sum
}

/// Rogers dilogarithm `L(x) = Li₂(x) + ½ ln x ln(1-x)` on `(0,1)`, using
/// `L(x) + L(1-x) = π²/6` to keep the series argument at most `1/2`.
pub fn rogers_dilogarithm(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::DomainError(format!("L(x) needs 0 < x < 1, got {x}")));
    }
    let small = |t: f64| li2_small(t) + 0.5 * t.ln() * (-t).ln_1p();
    Ok(if x <= 0.5 { small(x) } else { PI * PI / 6.0 - small(1.0 - x) })
}

fn check_rank(a: &RationalMatrix, d: &[u64]) -> Result<()> {
    if d.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!("A has rank {}, D has {}", a.rows(), d.len())));
    }
    if d.contains(&0) {
        return Err(Error::InvalidArgument("D entries must be positive".into()));
    }
    Ok(())
}

/// Central charge from the dilogarithm: `(6/π²) Σ_i d_i L(1-x_i)` where
/// `1 - x_i = Π_j x_j^{a_ji}` (the Nahm equation of `Aᵗ = D⁻¹AD`).
///
/// For `D = 1` this is the usual `(6/π²) Σ L(1-x_i)`. For nontrivial `D`
/// it is the growth of the S-dual side, which is what the central charge of
/// a Dynkin pair measures; the growth of `f` itself along `q → 1⁻` is
/// [`saddle_growth`] and can be smaller.
pub fn saddle_central_charge(a: &RationalMatrix, d: &[u64]) -> Result<f64> {
    check_rank(a, d)?;
    let sol = solve_nahm_equation(&a.transpose(), DEFAULT_TOL)?;
    let mut total = 0.0;
    for (xi, di) in sol.x.iter().zip(d) {
        total += rogers_dilogarithm(1.0 - xi)? * *di as f64;
    }
    Ok(6.0 / (PI * PI) * total)
}

/// `(6/π²) Σ_i L(1-x_i)/d_i` with `1 - x_i = Π_j x_j^{a_ij}`: the exponential
/// growth rate of `f_{A,B,C,D}(e^{-ε})`, i.e. what [`cardy_estimate`] sees.
pub fn saddle_growth(a: &RationalMatrix, d: &[u64]) -> Result<f64> {
    check_rank(a, d)?;
    let sol = solve_nahm_equation(a, DEFAULT_TOL)?;
    let mut total = 0.0;
    for (xi, di) in sol.x.iter().zip(d) {
        total += rogers_dilogarithm(1.0 - xi)? / *di as f64;
    }
    Ok(6.0 / (PI * PI) * total)
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift as usize;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Effective central charge from the growth of the integer-exponent
/// coefficients `a_n`, `lo <= n <= hi`: least squares for
/// `ln a_n ≈ α√n + β ln n + γ`, then `c = 6α²/4π²`. A coarse cross-check only.
pub fn cardy_estimate(series: &QSeries, window: (i64, i64)) -> Result<f64> {
    let (lo, hi) = window;
    if hi < 50 || lo < 1 || hi - lo < 10 {
        return Err(Error::InsufficientData(format!("window [{lo},{hi}] too small")));
    }
    if Rational::from_integer((hi + 1).into()) > series.order() {
        return Err(Error::InsufficientData(format!("series known only below q^{}", series.order())));
    }
    let mut rows = Vec::new();
    for n in lo..=hi {
        let c = series.coefficient(&Rational::from_integer(n.into()))?;
        if !c.is_positive() {
            return Err(Error::InsufficientData(format!("coefficient of q^{n} is not positive")));
        }
        let nf = n as f64;
        rows.push(([nf.sqrt(), nf.ln(), 1.0], ln_big(&c)));
    }
    let mut ata = vec![vec![0.0; 3]; 3];
    let mut atb = vec![0.0; 3];
    for (f, y) in &rows {
        for i in 0..3 {
            atb[i] += f[i] * y;
            for j in 0..3 {
                ata[i][j] += f[i] * f[j];
            }
        }
    }
    let coef = solve_linear(ata, atb).ok_or_else(|| Error::InsufficientData("degenerate fit".into()))?;
    let alpha = coef[0];
    Ok(6.0 * alpha * alpha / (4.0 * PI * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynkin::{build_quadruple, central_charge, DiagramKind};
    use crate::qseries::congruence_product;
    use crate::rational::int;
    use proptest::prelude::*;

    fn m1(a: i64) -> RationalMatrix {
        RationalMatrix::from_i64(&[vec![a]])
    }

    #[test]
    fn rank_one_solutions() {
        let s = solve_nahm_equation(&m1(1), DEFAULT_TOL).unwrap();
        assert!((s.x[0] - 0.5).abs() < 1e-12);
        let s = solve_nahm_equation(&m1(2), DEFAULT_TOL).unwrap();
        assert!((s.x[0] - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-10);
        assert!(s.residual < 1e-12);
    }

    #[test]
    fn t1_c2_interior_solution() {
        let a = RationalMatrix::from_fracs(&[&[(1, 1), (1, 2)], &[(1, 1), (1, 1)]]);
        let s = solve_nahm_equation(&a, DEFAULT_TOL).unwrap();
        assert!(s.residual < 1e-12);
        assert!(s.x.iter().all(|v| *v > 0.0 && *v < 1.0));
    }

    #[test]
    fn dilogarithm_values() {
        assert!((rogers_dilogarithm(0.5).unwrap() - PI * PI / 12.0).abs() < 1e-15);
        // L((3-√5)/2) = π²/15 and L((√5-1)/2) = π²/10
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert!((rogers_dilogarithm(g).unwrap() - PI * PI / 10.0).abs() < 1e-14);
        assert!((rogers_dilogarithm(1.0 - g).unwrap() - PI * PI / 15.0).abs() < 1e-14);
        assert!(matches!(rogers_dilogarithm(1.0), Err(Error::DomainError(_))));
        assert!(matches!(rogers_dilogarithm(0.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn saddle_examples() {
        assert!((saddle_central_charge(&m1(2), &[1]).unwrap() - 0.4).abs() < 1e-10);
        assert!((saddle_central_charge(&m1(1), &[1]).unwrap() - 0.5).abs() < 1e-10);
        let t1: DiagramKind = "T1".parse().unwrap();
        let e8: DiagramKind = "E8".parse().unwrap();
        let q = build_quadruple(t1, e8).unwrap();
        let c = saddle_central_charge(&q.a, &q.d).unwrap();
        assert!((c - 8.0 / 11.0).abs() < 1e-8, "{c}");
    }

    #[test]
    fn saddle_matches_formula_on_small_pairs() {
        let kinds = ["A1", "T1", "A2", "T2", "C2", "G2", "B3", "A3"];
        for x in kinds {
            for y in kinds {
                let (x, y): (DiagramKind, DiagramKind) = (x.parse().unwrap(), y.parse().unwrap());
                let q = build_quadruple(x, y).unwrap();
                let c = saddle_central_charge(&q.a, &q.d).unwrap();
                let want = to_f64(&central_charge(x, y).unwrap());
                assert!((c - want).abs() < 1e-6, "({x},{y}): {c} vs {want}");
            }
        }
    }

    #[test]
    fn growth_matches_coefficients() {
        // (A1,C2): f = θ/(q)_∞ grows like c = 1/2 although c(A1,C2) = 1
        let x: DiagramKind = "A1".parse().unwrap();
        let y: DiagramKind = "C2".parse().unwrap();
        let q = build_quadruple(x, y).unwrap();
        let g = saddle_growth(&q.a, &q.d).unwrap();
        assert!((g - 0.5).abs() < 1e-10);
        let f = crate::nahm::nahm_sum(&q.clone().with_c(int(0)), &int(161), None).unwrap();
        let fit = cardy_estimate(&f, (60, 160)).unwrap();
        assert!((fit - g).abs() < 0.02, "{fit}");
        assert!((saddle_central_charge(&q.a, &q.d).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cardy_partition_function() {
        let p = congruence_product(1, 1, &[0], -1, &int(201)).unwrap();
        let c = cardy_estimate(&p, (100, 200)).unwrap();
        assert!((c - 1.0).abs() < 0.1, "{c}");
        let g = congruence_product(1, 5, &[1, 4], -1, &int(201)).unwrap();
        let c = cardy_estimate(&g, (100, 200)).unwrap();
        assert!((c - 0.4).abs() < 0.06, "{c}");
    }

    #[test]
    fn cardy_rejects_thin_data() {
        let one = QSeries::one(&int(300));
        assert!(matches!(cardy_estimate(&one, (100, 200)), Err(Error::InsufficientData(_))));
        let p = congruence_product(1, 1, &[0], -1, &int(60)).unwrap();
        assert!(matches!(cardy_estimate(&p, (100, 200)), Err(Error::InsufficientData(_))));
        assert!(matches!(cardy_estimate(&p, (1, 20)), Err(Error::InsufficientData(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn dilogarithm_reflection(x in 1e-6f64..(1.0 - 1e-6)) {
            let s = rogers_dilogarithm(x).unwrap() + rogers_dilogarithm(1.0 - x).unwrap();
            prop_assert!((s - PI * PI / 6.0).abs() < 1e-13);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn saddle_permutation_invariant(a in 1i64..4, b in 0i64..2, c in 1i64..4, swap in any::<bool>()) {
            // symmetric positive definite 2x2 with identity D
            prop_assume!(a * c > b * b);
            let m = RationalMatrix::from_i64(&[vec![a, b], vec![b, c]]);
            let p = if swap { m.permuted(&[1, 0]) } else { m.clone() };
            let c1 = saddle_central_charge(&m, &[1, 1]).unwrap();
            let c2 = saddle_central_charge(&p, &[1, 1]).unwrap();
            prop_assert!((c1 - c2).abs() < 1e-9);
        }
    }
}
