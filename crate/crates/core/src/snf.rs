//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn mul(a: &Matrix, b: &Matrix, inner: usize, cols: usize) -> Matrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// `u · m · v = d` with `d` diagonal, `d_1 | d_2 | …`, nonnegative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub rows: usize,
    pub cols: usize,
    pub u: Matrix,
    pub v: Matrix,
    pub d: Matrix,
    /// Nonzero diagonal entries.
    pub diagonal: Vec<BigInt>,
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// `row[dst] += k · row[src]`
fn add_row(m: &mut Matrix, dst: usize, src: usize, k: &BigInt) {
    let src_row = m[src].clone();
    for (x, y) in m[dst].iter_mut().zip(src_row) {
        *x += k * y;
    }
}

fn add_col(m: &mut Matrix, dst: usize, src: usize, k: &BigInt) {
    for row in m.iter_mut() {
        let y = row[src].clone();
        row[dst] += k * y;
    }
}

fn negate_row(m: &mut Matrix, r: usize) {
    for x in m[r].iter_mut() {
        *x = -x.clone();
    }
}

pub fn smith(m: &Matrix, cols: usize) -> Smith {
    let rows = m.len();
    let mut d = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero entry of the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero() && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        let mut clean = true;
        for i in (t + 1)..rows {
            if !d[i][t].is_zero() {
                let q = -d[i][t].div_floor(&d[t][t]);
                add_row(&mut d, i, t, &q);
                add_row(&mut u, i, t, &q);
                clean &= d[i][t].is_zero();
            }
        }
        for j in (t + 1)..cols {
            if !d[t][j].is_zero() {
                let q = -d[t][j].div_floor(&d[t][t]);
                add_col(&mut d, j, t, &q);
                add_col(&mut v, j, t, &q);
                clean &= d[t][j].is_zero();
            }
        }
        if !clean {
            continue;
        }
        // Divisibility: fold any entry not divisible by the pivot into row t.
        let mut fixed = true;
        'outer: for i in (t + 1)..rows {
            for j in (t + 1)..cols {
                if !d[i][j].is_multiple_of(&d[t][t]) {
                    let one = BigInt::one();
                    add_row(&mut d, t, i, &one);
                    add_row(&mut u, t, i, &one);
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        if d[t][t].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
        t += 1;
    }
    let diagonal = (0..rows.min(cols)).map(|i| d[i][i].clone()).filter(|x| !x.is_zero()).collect();
    Smith { rows, cols, u, v, d, diagonal }
}

/// Inverse of a unimodular matrix, by exact Gauss–Jordan over the integers.
pub fn unimodular_inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let s = smith(m, n);
    if s.diagonal.len() != n || s.diagonal.iter().any(|x| !x.is_one()) {
        return None;
    }
    // u m v = 1, so m⁻¹ = v u.
    Some(mul(&s.v, &s.u, n, n))
}

/// A finitely generated abelian group given by its invariant factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    pub rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// The cokernel of the relation matrix (rows are relations in `cols` generators).
pub fn cokernel(s: &Smith) -> AbelianGroup {
    AbelianGroup {
        rank: s.cols - s.diagonal.len(),
        torsion: s.diagonal.iter().filter(|x| !x.is_one()).cloned().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn halfsplit_relation() {
        let s = smith(&m(&[&[0, 0, 0], &[-1, -1, 1]]), 3);
        assert_eq!(s.diagonal, vec![BigInt::one()]);
        assert_eq!(cokernel(&s).to_string(), "Z^2");
    }

    #[test]
    fn factors_divide() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&a, 3);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        assert_eq!(mul(&mul(&s.u, &a, 3, 3), &s.v, 3, 3), s.d);
        assert_eq!(cokernel(&s).to_string(), "Z/2 ⊕ Z/6 ⊕ Z/12");
    }

    #[test]
    fn zero_matrix() {
        let s = smith(&m(&[&[0, 0]]), 2);
        assert!(s.diagonal.is_empty());
        assert_eq!(cokernel(&s).rank, 2);
        assert_eq!(cokernel(&smith(&m(&[&[1]]), 1)).to_string(), "0");
    }
}
