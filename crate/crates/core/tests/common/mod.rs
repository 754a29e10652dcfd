//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Determinant by cofactor expansion.
fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut acc = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][j] * det(&minor);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors: `d_k = D_k / D_{k-1}` with `D_k`
/// the gcd of all `k × k` minors.
pub fn invariant_factors(m: &[Vec<BigInt>], cols: usize) -> Vec<BigInt> {
    let rows = m.len();
    let mut prev = BigInt::from(1);
    let mut out = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<BigInt>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c].clone()).collect()).collect();
                g = g.gcd(&det(&sub));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push((&g / &prev).abs());
        prev = g;
    }
    out
}

/// `Σ ε_i ∧ x_i` read off the antisymmetric matrix `Σ (ε_i x_iᵀ − x_i ε_iᵀ)`.
pub fn wedge_sum(pairs: &[(Vec<BigRational>, Vec<BigRational>)], dim: usize) -> Vec<((usize, usize), BigRational)> {
    let mut m = vec![vec![BigRational::zero(); dim]; dim];
    for (e, x) in pairs {
        for i in 0..dim {
            for j in 0..dim {
                m[i][j] += &e[i] * &x[j] - &x[i] * &e[j];
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..dim {
        for j in (i + 1)..dim {
            if !m[i][j].is_zero() {
                out.push(((i, j), m[i][j].clone()));
            }
        }
    }
    out
}

/// Piecewise translation evaluated from raw breakpoint and translation lists,
/// with reals given as `f64`-free rational pairs `q₀ + q₁√2` compared exactly.
pub fn eval_pieces(
    breakpoints: &[(BigRational, BigRational)],
    translations: &[(BigRational, BigRational)],
    p: &(BigRational, BigRational),
) -> Option<(BigRational, BigRational)> {
    for k in 0..translations.len() {
        if !less(p, &breakpoints[k]) && less(p, &breakpoints[k + 1]) {
            return Some((&p.0 + &translations[k].0, &p.1 + &translations[k].1));
        }
    }
    None
}

/// `a < b` for `a₀ + a₁√2` and `b₀ + b₁√2`, by squaring.
pub fn less(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> bool {
    // Sign of u + v√2 with u = b₀ − a₀, v = b₁ − a₁.
    let u = &b.0 - &a.0;
    let v = &b.1 - &a.1;
    let two = BigRational::from_integer(BigInt::from(2));
    match (u.is_negative(), v.is_negative()) {
        _ if u.is_zero() && v.is_zero() => false,
        (false, false) => true,
        (true, true) => false,
        (false, true) => &u * &u > &two * &v * &v,
        (true, false) => &two * &v * &v > &u * &u,
    }
}
