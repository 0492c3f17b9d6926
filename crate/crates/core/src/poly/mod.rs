//! Dense complex polynomials in ascending coefficient order, together with
//! root finding and the planar geometry used for root localization.

mod hull;
mod roots;

pub use hull::{convex_hull, hull_distance, ConvexRegion};
pub use roots::{
    default_cluster_tol, default_imag_tol, is_hyperbolic, roots, roots_with_tol, RootSet,
};
pub(crate) use roots::{linkage_by, raw_roots, single_linkage};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Shorthand used throughout the crate for a complex scalar.
pub type Complex = Complex64;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);

/// A univariate polynomial `c[0] + c[1] z + ... + c[d] z^d`.
///
/// Trailing zero coefficients are stripped on construction, so the zero
/// polynomial has an empty coefficient vector and every nonzero polynomial
/// has a nonzero leading coefficient.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Complex>", into = "Vec<Complex>")]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl From<Vec<Complex>> for Polynomial {
    fn from(coeffs: Vec<Complex>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<Complex> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex>) -> Self {
        debug_assert!(
            coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
            "non-finite polynomial coefficient"
        );
        while coeffs.last().is_some_and(|c| *c == ZERO) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex) -> Self {
        Polynomial::new(vec![c])
    }

    /// `c * z^d`
    pub fn monomial(c: Complex, d: usize) -> Self {
        let mut coeffs = vec![ZERO; d + 1];
        coeffs[d] = c;
        Polynomial::new(coeffs)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    /// The monic polynomial `prod (z - root)`.
    pub fn from_roots(roots: &[Complex]) -> Self {
        let mut coeffs = vec![ONE];
        for &root in roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * root;
            }
            coeffs = next;
        }
        Polynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// Coefficient of `z^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Complex {
        self.coeffs.get(i).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Complex> {
        self.coeffs.last().copied()
    }

    /// Largest coefficient modulus; zero for the zero polynomial.
    pub fn norm_max(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |c_i| |z|^i`, the natural scale for the rounding error of `eval`.
    pub fn eval_abs(&self, z: Complex) -> f64 {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// The `order`-th derivative.
    pub fn derivative(&self, order: usize) -> Polynomial {
        if order == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(order)
            .map(|(j, &c)| c * falling_factorial_f64(j as u64, order as u64))
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, c: Complex) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Divides by the leading coefficient. The zero polynomial stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            Some(lead) => self.scale(ONE / lead),
            None => Polynomial::zero(),
        }
    }

    /// `p(c z)`, i.e. coefficient `i` multiplied by `c^i`.
    pub fn rescale_argument(&self, c: Complex) -> Polynomial {
        let mut pow = ONE;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for &a in &self.coeffs {
            coeffs.push(a * pow);
            pow *= c;
        }
        Polynomial::new(coeffs)
    }

    /// `p(z + c)` by repeated synthetic division.
    pub fn translated(&self, c: Complex) -> Polynomial {
        let mut a = self.coeffs.clone();
        let d = a.len();
        for i in 0..d {
            for j in (i..d.saturating_sub(1)).rev() {
                let hi = a[j + 1];
                a[j] += c * hi;
            }
        }
        Polynomial::new(a)
    }

    /// Coefficients reversed with respect to a formal degree `d >= deg`:
    /// `z^d p(1/z)`.
    pub fn reversed(&self, d: usize) -> Polynomial {
        assert!(
            self.coeffs.len() <= d + 1,
            "formal degree below actual degree"
        );
        let mut coeffs = vec![ZERO; d + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[d - i] = c;
        }
        Polynomial::new(coeffs)
    }

    /// Maximum coefficient distance; both sides zero-padded.
    pub fn distance_max(&self, other: &Polynomial) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

/// `(j)_i = j (j-1) ... (j-i+1)`, with `(j)_0 = 1` and `(j)_i = 0` for `j < i`.
pub fn falling_factorial(j: u64, i: u64) -> BigUint {
    if j < i {
        return BigUint::ZERO;
    }
    ((j - i + 1)..=j).fold(BigUint::from(1u32), |acc, f| acc * f)
}

/// Floating point `(j)_i`; exact while the product stays below 2^53.
pub fn falling_factorial_f64(j: u64, i: u64) -> f64 {
    if j < i {
        return 0.0;
    }
    ((j - i + 1)..=j).fold(1.0, |acc, f| acc * f as f64)
}

/// `binom(n, k)`; panics on overflow of `u128`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128).expect("binomial overflow") / (i as u128 + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn figure_q() -> Polynomial {
        // (z^2+1)(z-3i-2)(z+2i-3)
        &(&Polynomial::from_real(&[1.0, 0.0, 1.0]) * &Polynomial::new(vec![c(-2.0, -3.0), ONE]))
            * &Polynomial::new(vec![c(-3.0, 2.0), ONE])
    }

    #[test]
    fn eval_examples() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        assert_eq!(p.eval(c(2.0, 0.0)), c(3.0, 0.0));
        assert_eq!(Polynomial::zero().eval(c(5.0, 1.0)), ZERO);
        assert!(figure_q().eval(c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn figure_expansion_matches_file_coefficients() {
        let expected = [
            c(12.0, 5.0),
            c(-5.0, -1.0),
            c(13.0, 5.0),
            c(-5.0, -1.0),
            c(1.0, 0.0),
        ];
        assert_eq!(figure_q().coeffs(), &expected);
    }

    #[test]
    fn derivative_examples() {
        let z3 = Polynomial::monomial(ONE, 3);
        assert_eq!(z3.derivative(2), Polynomial::monomial(c(6.0, 0.0), 1));
        let z5 = Polynomial::monomial(ONE, 5);
        assert_eq!(z5.derivative(3), Polynomial::monomial(c(60.0, 0.0), 2));
        let p = figure_q();
        assert_eq!(p.derivative(0), p);
        assert!(p.derivative(5).is_zero());
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(5, 2), BigUint::from(20u32));
        assert_eq!(falling_factorial(3, 3), BigUint::from(6u32));
        assert_eq!(falling_factorial(2, 4), BigUint::ZERO);
        assert_eq!(falling_factorial_f64(24, 3), 12144.0);
    }

    #[test]
    fn falling_factorial_recurrence() {
        for j in 1..=40u64 {
            for i in 1..=j {
                assert_eq!(
                    falling_factorial(j, i),
                    BigUint::from(j) * falling_factorial(j - 1, i - 1)
                );
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(26, 2), 325);
        assert_eq!(binomial(4, 3), 4);
        assert_eq!(binomial(5, 7), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    #[test]
    fn canonical_zero() {
        let p = Polynomial::new(vec![ZERO, ZERO]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
        let q = &Polynomial::from_real(&[1.0, 2.0]) - &Polynomial::from_real(&[1.0, 2.0]);
        assert!(q.is_zero());
    }

    #[test]
    fn translation_matches_evaluation() {
        let p = figure_q();
        let shift = c(1.25, 0.25);
        let t = p.translated(shift);
        for z in [c(0.0, 0.0), c(0.3, -1.0), c(-2.0, 0.7)] {
            assert!((t.eval(z) - p.eval(z + shift)).norm() < 1e-11);
        }
        assert_eq!(p.translated(ZERO), p);
    }

    #[test]
    fn from_roots_and_reversal() {
        let p = Polynomial::from_roots(&[c(1.0, 0.0), c(-2.0, 0.0)]);
        assert_eq!(p, Polynomial::from_real(&[-2.0, 1.0, 1.0]));
        assert_eq!(p.reversed(3), Polynomial::from_real(&[0.0, 1.0, 1.0, -2.0]));
        assert_eq!(
            p.rescale_argument(c(2.0, 0.0)),
            Polynomial::from_real(&[-2.0, 2.0, 4.0])
        );
    }
}
