use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::poly::{Complex, Polynomial, ZERO};

/// Sparse-keyed polynomial in a fixed number of variables. Keys are exponent
/// vectors; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Complex>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex) -> Self {
        let mut p = MultiPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// `c * x_var`.
    pub fn variable(nvars: usize, var: usize, c: Complex) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        let mut p = MultiPoly::zero(nvars);
        p.add_term(e, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, exps: &[u32]) -> Complex {
        self.terms.get(exps).copied().unwrap_or(ZERO)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Complex) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c == ZERO {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if *slot.get() == ZERO {
                    slot.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &MultiPoly, c: Complex) {
        for (e, &v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    pub fn scale(&self, c: Complex) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        out.add_scaled(self, c);
        out
    }

    /// `self * (c0 + c1 x_var)`.
    pub fn mul_linear(&self, c0: Complex, var: usize, c1: Complex) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, &v) in &self.terms {
            out.add_term(e.clone(), v * c0);
            let mut up = e.clone();
            up[var] += 1;
            out.add_term(up, v * c1);
        }
        out
    }

    /// `max_t sum_j w_j e_j` over the stored terms; `None` for zero.
    pub fn weighted_degree(&self, weights: &[u32]) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| e.iter().zip(weights).map(|(a, b)| a * b).sum())
            .max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn norm_max(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: &[Complex]) -> Complex {
        self.terms
            .iter()
            .map(|(e, &c)| e.iter().zip(x).fold(c, |acc, (&k, &xi)| acc * xi.powu(k)))
            .sum()
    }

    /// Substitutes values for every variable except `keep`, leaving a
    /// univariate polynomial in `x_keep`. Entries of `x` at `keep` are ignored.
    pub fn restrict(&self, keep: usize, x: &[Complex]) -> Polynomial {
        let deg = self.degree_in(keep).unwrap_or(0) as usize;
        let mut coeffs = vec![ZERO; deg + 1];
        for (e, &c) in &self.terms {
            let mut v = c;
            for (j, (&k, &xj)) in e.iter().zip(x).enumerate() {
                if j != keep {
                    v *= xj.powu(k);
                }
            }
            coeffs[e[keep] as usize] += v;
        }
        Polynomial::new(coeffs)
    }

    /// Drops terms with modulus at most `tol`.
    pub fn chop(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() > tol);
    }

    /// Univariate view of a one-variable polynomial.
    pub fn to_univariate(&self) -> Polynomial {
        assert_eq!(self.nvars, 1);
        self.restrict(0, &[ZERO])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ONE;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn linear_products_and_evaluation() {
        // (1 + 2x)(3 - y) in variables (x, y)
        let p = MultiPoly::constant(2, ONE).mul_linear(ONE, 0, c(2.0));
        let q = p.mul_linear(c(3.0), 1, c(-1.0));
        assert_eq!(q.len(), 4);
        assert_eq!(q.coeff(&[1, 1]), c(-2.0));
        let x = [c(0.5), c(-2.0)];
        assert_eq!(q.eval(&x), c(2.0 * 5.0));
        assert_eq!(q.weighted_degree(&[1, 2]), Some(3));
        assert_eq!(q.degree_in(1), Some(1));
    }

    #[test]
    fn cancellation_removes_terms() {
        let mut p = MultiPoly::variable(1, 0, ONE);
        p.add_scaled(&MultiPoly::variable(1, 0, ONE), c(-1.0));
        assert!(p.is_empty());
        assert_eq!(p.weighted_degree(&[1]), None);
    }

    #[test]
    fn restriction_to_one_variable() {
        // x^2 y + 3 y^2 at x = 2 -> 4 y + 3 y^2
        let mut p = MultiPoly::zero(2);
        p.add_term(vec![2, 1], ONE);
        p.add_term(vec![0, 2], c(3.0));
        let r = p.restrict(1, &[c(2.0), ZERO]);
        assert_eq!(r, Polynomial::from_real(&[0.0, 4.0, 3.0]));
        let mut q = MultiPoly::constant(1, c(1e-20));
        q.add_term(vec![3], c(2.0));
        q.chop(1e-15);
        assert_eq!(q.to_univariate(), Polynomial::monomial(c(2.0), 3));
    }
}
