//! Higher Lamé operators `sum_{i=1}^k Q_i(z) d^i/dz^i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{falling_factorial_f64, Complex, Polynomial, ONE, ZERO};

/// The operator `Q_1 d/dz + ... + Q_k d^k/dz^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LameOperator {
    /// `q[i - 1]` is `Q_i`.
    q: Vec<Polynomial>,
}

/// Outcome of the `n`-th nonresonance test.
#[derive(Clone, Debug, PartialEq)]
pub struct Nonresonance {
    pub holds: bool,
    /// Indices `j < n` with `L_j` numerically equal to `L_n`.
    pub witnesses: Vec<usize>,
}

impl LameOperator {
    /// `q[i - 1]` is the coefficient of `d^i/dz^i`; `Q_k` (the last entry)
    /// must be nonzero.
    pub fn new(q: Vec<Polynomial>) -> Result<Self> {
        match q.last() {
            Some(lead) if !lead.is_zero() => Ok(LameOperator { q }),
            _ => Err(Error::ZeroLeadingCoefficient),
        }
    }

    pub fn order(&self) -> usize {
        self.q.len()
    }

    /// `Q_i` for `1 <= i <= k`.
    pub fn q(&self, i: usize) -> &Polynomial {
        &self.q[i - 1]
    }

    pub fn coefficients(&self) -> &[Polynomial] {
        &self.q
    }

    pub fn leading(&self) -> &Polynomial {
        self.q.last().unwrap()
    }

    /// `r = max (deg Q_i - i)` over the nonzero `Q_i`.
    pub fn fuchs_index(&self) -> i64 {
        self.q
            .iter()
            .enumerate()
            .filter_map(|(idx, p)| p.degree().map(|d| d as i64 - (idx as i64 + 1)))
            .max()
            .expect("Q_k is nonzero")
    }

    /// `r >= 0` and `deg Q_k = k + r`.
    pub fn is_nondegenerate(&self) -> bool {
        let r = self.fuchs_index();
        r >= 0 && self.leading().degree() == Some(self.order() + r as usize)
    }

    pub fn check_nondegenerate(&self) -> Result<()> {
        let r = self.fuchs_index();
        if r < 0 {
            return Err(Error::NegativeFuchsIndex(r));
        }
        let d = self.leading().degree().unwrap();
        if d as i64 != self.order() as i64 + r {
            return Err(Error::Degenerate {
                leading_degree: d,
                expected: self.order() as i64 + r,
            });
        }
        Ok(())
    }

    /// Coefficient of `z^d` in `Q_i`; zero outside `1..=k` or beyond the degree.
    pub fn coefficient(&self, i: usize, d: i64) -> Complex {
        if i == 0 || i > self.order() || d < 0 {
            return ZERO;
        }
        self.q[i - 1].coeff(d as usize)
    }

    /// `A_i`, the coefficient of `z^{i+r}` in `Q_i`.
    pub fn top_coefficient(&self, i: usize) -> Complex {
        self.coefficient(i, i as i64 + self.fuchs_index())
    }

    /// `L_{p,q} = sum_i (p)_i A_{i, q-p+i}`: the coefficient of `z^q` in the
    /// image of `z^p`.
    pub fn action_coefficient(&self, p: usize, q: usize) -> Complex {
        (1..=self.order().min(p))
            .map(|i| {
                let d = q as i64 - p as i64 + i as i64;
                self.coefficient(i, d) * falling_factorial_f64(p as u64, i as u64)
            })
            .sum()
    }

    /// The diagonal coefficient `L_n = sum_i (n)_i A_i`.
    pub fn diagonal_coefficient(&self, n: usize) -> Complex {
        (1..=self.order())
            .map(|i| self.top_coefficient(i) * falling_factorial_f64(n as u64, i as u64))
            .sum()
    }

    /// Checks `|L_n - L_j| > tol (1 + |L_n|)` for every `j < n`.
    pub fn nonresonance(&self, n: usize, tol: f64) -> Nonresonance {
        let ln = self.diagonal_coefficient(n);
        let thresh = tol * (1.0 + ln.norm());
        let witnesses: Vec<usize> = (0..n)
            .filter(|&j| (ln - self.diagonal_coefficient(j)).norm() <= thresh)
            .collect();
        Nonresonance {
            holds: witnesses.is_empty(),
            witnesses,
        }
    }

    /// `sum Q_i S^{(i)}`.
    pub fn apply(&self, s: &Polynomial) -> Polynomial {
        self.q
            .iter()
            .enumerate()
            .fold(Polynomial::zero(), |acc, (idx, qi)| {
                &acc + &(qi * &s.derivative(idx + 1))
            })
    }

    /// Every `Q_i` multiplied by `c`.
    pub fn scaled(&self, c: Complex) -> LameOperator {
        LameOperator {
            q: self.q.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// The operator divided by the leading coefficient of `Q_k`, together
    /// with that coefficient. Van Vleck polynomials of the original operator
    /// are those of the normalized one times the factor.
    pub fn normalized(&self) -> (LameOperator, Complex) {
        let lead = self.leading().leading().unwrap();
        (self.scaled(ONE / lead), lead)
    }

    /// The same operator in the variable `w` with `z = center + radius w`:
    /// `Q_i(center + radius w) / radius^i`. Solutions map as
    /// `S(z) = S~((z - center) / radius)` and `V(z) = V~((z - center) / radius)`.
    pub fn affine_pullback(&self, center: Complex, radius: f64) -> LameOperator {
        let r = Complex::new(radius, 0.0);
        LameOperator {
            q: self
                .q
                .iter()
                .enumerate()
                .map(|(idx, p)| {
                    p.translated(center)
                        .rescale_argument(r)
                        .scale(ONE / r.powi(idx as i32 + 1))
                })
                .collect(),
        }
    }

    pub fn is_monic(&self) -> bool {
        self.leading().leading() == Some(ONE)
    }

    /// Largest coefficient modulus over all `Q_i`.
    pub fn norm_max(&self) -> f64 {
        self.q.iter().map(Polynomial::norm_max).fold(0.0, f64::max)
    }

    /// True when only `Q_k` and `Q_{k-1}` may be nonzero.
    pub fn is_classical_form(&self) -> bool {
        let k = self.order();
        k >= 2 && self.q[..k - 2].iter().all(Polynomial::is_zero)
    }
}

/// Data for `prod (z - alpha_i) d^k + sum_j beta_j prod_{i != j} (z - alpha_i) d^{k-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalSpec {
    pub alphas: Vec<Complex>,
    pub betas: Vec<f64>,
    pub k: usize,
}

impl ClassicalSpec {
    pub fn new(alphas: Vec<Complex>, betas: Vec<f64>, k: usize) -> Self {
        ClassicalSpec { alphas, betas, k }
    }

    pub fn real(alphas: &[f64], betas: &[f64], k: usize) -> Self {
        ClassicalSpec {
            alphas: alphas.iter().map(|&a| Complex::new(a, 0.0)).collect(),
            betas: betas.to_vec(),
            k,
        }
    }
}

pub fn build_classical(spec: &ClassicalSpec) -> Result<LameOperator> {
    if spec.alphas.len() != spec.betas.len() {
        return Err(Error::LengthMismatch(spec.alphas.len(), spec.betas.len()));
    }
    if spec.alphas.is_empty() {
        return Err(Error::EmptyInput);
    }
    if spec.k < 2 {
        return Err(Error::InvalidOrder(spec.k));
    }
    let leading = Polynomial::from_roots(&spec.alphas);
    let mut sub = Polynomial::zero();
    for (j, &beta) in spec.betas.iter().enumerate() {
        let others: Vec<Complex> = spec
            .alphas
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, &a)| a)
            .collect();
        sub = &sub + &Polynomial::from_roots(&others).scale(Complex::new(beta, 0.0));
    }
    let mut q = vec![Polynomial::zero(); spec.k];
    q[spec.k - 2] = sub;
    q[spec.k - 1] = leading;
    LameOperator::new(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn op(q: &[&[f64]]) -> LameOperator {
        LameOperator::new(q.iter().map(|c| Polynomial::from_real(c)).collect()).unwrap()
    }

    fn legendre() -> LameOperator {
        op(&[&[0.0, 2.0], &[-1.0, 0.0, 1.0]])
    }

    fn figure() -> LameOperator {
        let q = &(&Polynomial::from_real(&[1.0, 0.0, 1.0])
            * &Polynomial::new(vec![c(-2.0, -3.0), ONE]))
            * &Polynomial::new(vec![c(-3.0, 2.0), ONE]);
        LameOperator::new(vec![Polynomial::zero(), Polynomial::zero(), q]).unwrap()
    }

    #[test]
    fn affine_pullback_conjugates_action() {
        let o = figure();
        let (center, radius) = (c(1.25, 0.25), 2.5);
        let t = o.affine_pullback(center, radius);
        let s = Polynomial::new(vec![c(0.5, 1.0), c(-1.0, 0.0), c(0.0, 2.0), ONE]);
        // S~(w) = S(center + radius w)
        let st = s.translated(center).rescale_argument(c(radius, 0.0));
        let lhs = t.apply(&st);
        let rhs = o
            .apply(&s)
            .translated(center)
            .rescale_argument(c(radius, 0.0));
        assert!(lhs.distance_max(&rhs) < 1e-9 * rhs.norm_max());
        assert_eq!(o.affine_pullback(ZERO, 1.0), o);
        assert_eq!(t.fuchs_index(), 1);
    }

    #[test]
    fn fuchs_index_examples() {
        assert_eq!(figure().fuchs_index(), 1);
        assert_eq!(op(&[&[], &[0.0, 0.0, 1.0]]).fuchs_index(), 0);
        assert_eq!(
            op(&[&[-0.5, 0.0, 1.5], &[0.0, -1.0, 0.0, 1.0]]).fuchs_index(),
            1
        );
    }

    #[test]
    fn nondegeneracy_examples() {
        assert!(figure().is_nondegenerate());
        let bad = op(&[&[0.0, 0.0, 0.0, 1.0], &[0.0, 1.0]]);
        assert_eq!(bad.fuchs_index(), 2);
        assert!(!bad.is_nondegenerate());
        assert!(op(&[&[0.0, 0.0, 1.0]]).is_nondegenerate());
        assert_eq!(
            LameOperator::new(vec![Polynomial::from_real(&[1.0]), Polynomial::zero()]),
            Err(Error::ZeroLeadingCoefficient)
        );
    }

    #[test]
    fn diagonal_coefficients() {
        assert_eq!(legendre().diagonal_coefficient(3), c(12.0, 0.0));
        for l in 2..6 {
            let mut z = vec![0.0; l + 1];
            z[l] = 1.0;
            let zl = op(&[&[], &z]);
            for n in 0usize..10 {
                let expected = (n * n.saturating_sub(1)) as f64;
                assert_eq!(zl.diagonal_coefficient(n), c(expected, 0.0));
            }
        }
        assert_eq!(figure().diagonal_coefficient(0), ZERO);
    }

    #[test]
    fn nonresonance_examples() {
        // Q_2 = z^3 - z, Q_1 = -Q_2' gives L_n = n^2 - 4n.
        let neg = op(&[&[1.0, 0.0, -3.0], &[0.0, -1.0, 0.0, 1.0]]);
        let res = neg.nonresonance(4, 1e-12);
        assert!(!res.holds);
        assert_eq!(res.witnesses, vec![0]);
        assert!(neg.nonresonance(5, 1e-12).holds);
        let z3 = op(&[&[], &[0.0, 0.0, 0.0, 1.0]]);
        assert!(z3.nonresonance(5, 1e-12).holds);
        assert!(!z3.nonresonance(1, 1e-12).holds);
    }

    #[test]
    fn apply_examples() {
        let z2 = op(&[&[], &[0.0, 0.0, 1.0]]);
        let z5 = Polynomial::monomial(ONE, 5);
        assert_eq!(z2.apply(&z5), Polynomial::monomial(c(20.0, 0.0), 5));
        assert!(figure().apply(&Polynomial::constant(c(3.0, 1.0))).is_zero());
        let p3 = Polynomial::from_real(&[0.0, -3.0, 0.0, 5.0]);
        assert_eq!(legendre().apply(&p3), p3.scale(c(12.0, 0.0)));
    }

    #[test]
    fn diagonal_identity_on_monomials() {
        let f = figure();
        let r = f.fuchs_index() as usize;
        for n in 0..=30 {
            let image = f.apply(&Polynomial::monomial(ONE, n));
            assert_eq!(image.coeff(n + r), f.diagonal_coefficient(n));
        }
    }

    #[test]
    fn classical_builder() {
        let spec = ClassicalSpec::real(&[-1.0, 0.0, 1.0], &[1.0, 1.0, 1.0], 2);
        let o = build_classical(&spec).unwrap();
        assert_eq!(o.q(2), &Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]));
        assert_eq!(o.q(1), &Polynomial::from_real(&[-1.0, 0.0, 3.0]));
        assert_eq!(o.fuchs_index(), 1);

        let spec = ClassicalSpec::real(&[-1.0, 1.0], &[0.5, 0.5], 2);
        let o = build_classical(&spec).unwrap();
        assert_eq!(o.q(2), &Polynomial::from_real(&[-1.0, 0.0, 1.0]));
        assert_eq!(o.q(1), &Polynomial::from_real(&[0.0, 1.0]));
        assert_eq!(o.fuchs_index(), 0);

        let o = build_classical(&ClassicalSpec::real(&[0.0, 1.0], &[1.0, 2.0], 2)).unwrap();
        assert_eq!(o.fuchs_index(), 0);

        assert_eq!(
            build_classical(&ClassicalSpec::real(&[0.0, 1.0], &[1.0], 2)),
            Err(Error::LengthMismatch(2, 1))
        );
    }

    #[test]
    fn normalization_scales_leading_to_one() {
        let o = legendre().scaled(c(2.0, -1.0));
        let (n, f) = o.normalized();
        assert!(n.is_monic() || (n.leading().leading().unwrap() - ONE).norm() < 1e-15);
        assert_eq!(f, c(2.0, -1.0));
    }
}
