//! Exact multivariate Laurent polynomials in formal parameters v_0, ..., v_{k-1}.

use crate::intlin::Int;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Finitely supported map from exponent vectors to integer coefficients.
/// All arithmetic keeps the zero coefficient pruned, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    pub nparams: usize,
    terms: BTreeMap<Vec<i64>, Int>,
}

impl Laurent {
    pub fn zero(nparams: usize) -> Self {
        Laurent { nparams, terms: BTreeMap::new() }
    }

    pub fn one(nparams: usize) -> Self {
        Laurent::from_int(nparams, Int::one())
    }

    pub fn from_int(nparams: usize, c: Int) -> Self {
        let mut l = Laurent::zero(nparams);
        if !c.is_zero() {
            l.terms.insert(vec![0; nparams], c);
        }
        l
    }

    pub fn from_i64(nparams: usize, c: i64) -> Self {
        Laurent::from_int(nparams, Int::from(c))
    }

    /// The monomial c * prod v_j^{exps[j]}.
    pub fn monomial(nparams: usize, exps: Vec<i64>, c: Int) -> Self {
        assert_eq!(exps.len(), nparams);
        let mut l = Laurent::zero(nparams);
        if !c.is_zero() {
            l.terms.insert(exps, c);
        }
        l
    }

    /// v_j^e
    pub fn v_pow(nparams: usize, j: usize, e: i64) -> Self {
        let mut exps = vec![0i64; nparams];
        exps[j] = e;
        Laurent::monomial(nparams, exps, Int::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&vec![0; self.nparams])
                .map_or(false, |c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Int)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, exps: Vec<i64>, c: &Int) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps.clone()).or_insert_with(Int::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        assert_eq!(self.nparams, other.nparams);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Laurent {
        let mut out = Laurent::zero(self.nparams);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        assert_eq!(self.nparams, other.nparams);
        let mut out = Laurent::zero(self.nparams);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Int) -> Laurent {
        let mut out = Laurent::zero(self.nparams);
        for (e, k) in &self.terms {
            let p = k * c;
            if !p.is_zero() {
                out.terms.insert(e.clone(), p);
            }
        }
        out
    }

    /// Substitute v_j = 1 for every parameter.
    pub fn specialize_one(&self) -> Int {
        let mut s = Int::zero();
        for c in self.terms.values() {
            s += c;
        }
        s
    }

    /// The bar involution v_j -> v_j^{-1}.
    pub fn bar(&self) -> Laurent {
        let mut out = Laurent::zero(self.nparams);
        for (e, c) in &self.terms {
            out.terms.insert(e.iter().map(|x| -x).collect(), c.clone());
        }
        out
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k != 0)
                .map(|(j, k)| {
                    if *k == 1 {
                        format!("v{}", j)
                    } else {
                        format!("v{}^{}", j, k)
                    }
                })
                .collect();
            let mono = mono.join("*");
            if !first {
                write!(f, " {} ", if c >= &Int::zero() { "+" } else { "-" })?;
            } else if c < &Int::zero() {
                write!(f, "-")?;
            }
            let a = c.magnitude();
            if mono.is_empty() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}*{}", a, mono)?;
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_basics() {
        let v = Laurent::v_pow(1, 0, 1);
        let vinv = Laurent::v_pow(1, 0, -1);
        assert!(v.mul(&vinv).is_one());
        let s = v.sub(&vinv);
        assert_eq!(s.mul(&s), v.mul(&v).add(&vinv.mul(&vinv)).sub(&Laurent::from_i64(1, 2)));
        assert!(s.sub(&s).is_zero());
        assert_eq!(s.specialize_one(), Int::zero());
        assert_eq!(s.bar(), s.neg());
    }

    #[test]
    fn two_params() {
        let a = Laurent::v_pow(2, 0, 2);
        let b = Laurent::v_pow(2, 1, -3);
        let p = a.mul(&b);
        assert_eq!(p, Laurent::monomial(2, vec![2, -3], Int::one()));
        assert_eq!(format!("{}", p), "v0^2*v1^-3");
    }

    #[test]
    fn display() {
        let v = Laurent::v_pow(1, 0, 1);
        let e = v.sub(&Laurent::v_pow(1, 0, -1));
        assert_eq!(format!("{}", e), "-v0^-1 + v0");
    }
}
