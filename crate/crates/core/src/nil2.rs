//! The free nilpotent group of class two on finitely many generators.
//!
//! Elements are kept in the normal form `s_0^{e_0} ⋯ s_{n-1}^{e_{n-1}} ∏_{i<j} [s_i, s_j]^{c_ij}`
//! with `[x, y] = x⁻¹y⁻¹xy`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Nil2 {
    pub exponents: BTreeMap<usize, i64>,
    pub commutators: BTreeMap<(usize, usize), i64>,
}

fn bump<K: Ord>(map: &mut BTreeMap<K, i64>, k: K, by: i64) {
    let e = map.entry(k).or_insert(0);
    *e += by;
    if *e == 0 {
        // Keep the normal form free of zero entries.
        map.retain(|_, v| *v != 0);
    }
}

impl Nil2 {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(k: usize) -> Self {
        let mut g = Self::default();
        g.push(k, 1);
        g
    }

    pub fn is_identity(&self) -> bool {
        self.exponents.is_empty() && self.commutators.is_empty()
    }

    /// Right-multiplies by `s_k^e`.
    pub fn push(&mut self, k: usize, e: i64) {
        if e == 0 {
            return;
        }
        let later: Vec<(usize, i64)> = self.exponents.range(k + 1..).map(|(&i, &x)| (i, x)).collect();
        for (i, x) in later {
            bump(&mut self.commutators, (k, i), -x * e);
        }
        bump(&mut self.exponents, k, e);
    }

    /// Right-multiplies by the commutator `[s_i, s_j]^e`.
    pub fn push_commutator(&mut self, i: usize, j: usize, e: i64) {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => bump(&mut self.commutators, (i, j), e),
            std::cmp::Ordering::Greater => bump(&mut self.commutators, (j, i), -e),
            std::cmp::Ordering::Equal => {}
        }
    }

    pub fn mul(&self, other: &Nil2) -> Nil2 {
        let mut out = self.clone();
        for (&k, &e) in &other.exponents {
            out.push(k, e);
        }
        for (&(i, j), &c) in &other.commutators {
            bump(&mut out.commutators, (i, j), c);
        }
        out
    }

    pub fn inverse(&self) -> Nil2 {
        let mut out = Nil2::identity();
        for (&k, &e) in self.exponents.iter().rev() {
            out.push(k, -e);
        }
        for (&(i, j), &c) in &self.commutators {
            bump(&mut out.commutators, (i, j), -c);
        }
        out
    }

    /// `[x, y] = x⁻¹y⁻¹xy`.
    pub fn commutator(x: &Nil2, y: &Nil2) -> Nil2 {
        x.inverse().mul(&y.inverse()).mul(x).mul(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_of_generators() {
        let (a, b) = (Nil2::generator(0), Nil2::generator(1));
        let c = Nil2::commutator(&a, &b);
        assert!(c.exponents.is_empty());
        assert_eq!(c.commutators.get(&(0, 1)), Some(&1));
        let ba = b.mul(&a);
        assert_eq!(ba, a.mul(&b).mul(&Nil2::commutator(&b, &a)));
    }

    #[test]
    fn inverse_cancels() {
        let mut x = Nil2::generator(2);
        x.push(0, 3);
        x.push(1, -2);
        assert!(x.mul(&x.inverse()).is_identity());
        assert!(x.inverse().mul(&x).is_identity());
    }
}
