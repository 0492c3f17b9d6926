//! Triangular elimination of the Stieltjes coefficients.
//!
//! Write `S = sum s_p z^p`, `V = sum v_j z^j`. Equation `j` is the vanishing
//! of the coefficient of `z^{n+r-j}` in `d S + V S`. Equation 0 forces
//! `v_r = -L_n`; equations `1..=n` determine `s_{n-1}, ..., s_0` one at a time
//! because the coefficient of `s_{n-j}` in equation `j` is `L_{n-j} - L_n`;
//! the last `r` equations are left over and involve `v_{r-1}, ..., v_0` only.

use crate::error::{Error, Result};
use crate::operator::LameOperator;
use crate::poly::{Complex, Polynomial, ONE, ZERO};

use super::multipoly::MultiPoly;

/// Relative threshold below which `L_{n-j} - L_n` counts as zero.
pub const DEFAULT_RESONANCE_TOL: f64 = 1e-10;

/// Default cap on the number of stored terms during symbolic elimination.
pub const DEFAULT_TERM_BOUND: usize = 1_000_000;

/// The `r` equations left after eliminating `s_{n-1}, ..., s_0`.
///
/// Variable `t` of each equation is `v_{r-1-t} / scale`, so for `r = 2` the
/// variables are `(v_1, v_0)` in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSystem {
    pub n: usize,
    pub r: usize,
    /// `v_r = -L_n`.
    pub fixed_vr: Complex,
    pub scale: f64,
    pub equations: Vec<MultiPoly>,
    /// `n + 1, ..., n + r`.
    pub weighted_degrees: Vec<u32>,
}

impl ReducedSystem {
    /// `w(v_j) = r - j`, listed in variable order.
    pub fn weights(&self) -> Vec<u32> {
        (1..=self.r as u32).collect()
    }

    /// Converts unscaled `(v_{r-1}, ..., v_0)` to variable values.
    pub fn to_variables(&self, tail: &[Complex]) -> Vec<Complex> {
        tail.iter().map(|&v| v / self.scale).collect()
    }

    /// Values of the equations at unscaled `(v_{r-1}, ..., v_0)`.
    pub fn eval(&self, tail: &[Complex]) -> Vec<Complex> {
        let x = self.to_variables(tail);
        self.equations.iter().map(|e| e.eval(&x)).collect()
    }
}

pub(crate) fn resonance_check(op: &LameOperator, n: usize, tol: f64) -> Result<()> {
    let check = op.nonresonance(n, tol);
    match check.witnesses.first() {
        None => Ok(()),
        Some(&index) => Err(Error::Resonance { level: n, index }),
    }
}

/// Constant part of the coefficient of `s_p` at `z^q`, with `v_r = -L_n`
/// already added.
fn constant_part(op: &LameOperator, r: usize, ln: Complex, p: usize, q: usize) -> Complex {
    let mut c = op.action_coefficient(p, q);
    if q == p + r {
        c -= ln;
    }
    c
}

/// Numeric back-substitution: `s_n = 1` and `s_{n-1}, ..., s_0` from
/// equations `1..=n` for the given `(v_{r-1}, ..., v_0)`.
pub fn back_substitute(op: &LameOperator, n: usize, tail: &[Complex]) -> Result<Polynomial> {
    back_substitute_tol(op, n, tail, DEFAULT_RESONANCE_TOL)
}

pub(crate) fn back_substitute_tol(
    op: &LameOperator,
    n: usize,
    tail: &[Complex],
    tol: f64,
) -> Result<Polynomial> {
    let r = checked_r(op)?;
    if tail.len() != r {
        return Err(Error::LengthMismatch(tail.len(), r));
    }
    resonance_check(op, n, tol)?;
    let ln = op.diagonal_coefficient(n);
    let v = |d: usize| if d < r { tail[r - 1 - d] } else { ZERO };
    let mut s = vec![ZERO; n + 1];
    s[n] = ONE;
    for j in 1..=n {
        let q = n + r - j;
        let mut acc = ZERO;
        for i in 0..j {
            let p = n - i;
            if q + op.order() < p {
                continue;
            }
            let mut c = constant_part(op, r, ln, p, q);
            if q >= p {
                c += v(q - p);
            }
            acc += s[p] * c;
        }
        let den = op.diagonal_coefficient(n - j) - ln;
        s[n - j] = -acc / den;
    }
    Ok(Polynomial::new(s))
}

/// The last `r` equations evaluated numerically after back-substitution.
pub fn reduced_residuals(op: &LameOperator, n: usize, tail: &[Complex]) -> Result<Vec<Complex>> {
    let r = checked_r(op)?;
    let s = back_substitute(op, n, tail)?;
    let ln = op.diagonal_coefficient(n);
    Ok((n + 1..=n + r)
        .map(|j| {
            let q = n + r - j;
            (0..=n)
                .map(|p| {
                    let mut c = constant_part(op, r, ln, p, q);
                    if q >= p && q - p < r {
                        c += tail[r - 1 - (q - p)];
                    }
                    s.coeff(p) * c
                })
                .sum()
        })
        .collect())
}

fn checked_r(op: &LameOperator) -> Result<usize> {
    let r = op.fuchs_index();
    if r < 0 {
        return Err(Error::NegativeFuchsIndex(r));
    }
    Ok(r as usize)
}

/// Coefficient of `s_p` at `z^q` as a polynomial in the scaled variables.
fn coefficient_poly(
    op: &LameOperator,
    r: usize,
    ln: Complex,
    scale: f64,
    p: usize,
    q: usize,
) -> MultiPoly {
    let mut c = MultiPoly::constant(r, constant_part(op, r, ln, p, q));
    if q >= p && q - p < r {
        c.add_scaled(
            &MultiPoly::variable(r, r - 1 - (q - p), Complex::new(scale, 0.0)),
            ONE,
        );
    }
    c
}

/// Symbolic back-substitution: `s_p` for `p = 0..=n` as polynomials in the
/// scaled variables `v_{r-1-t} / scale`. The constant denominators
/// `L_{n-j} - L_n` are divided out rather than cleared, so `s_n = 1`.
pub fn back_substitute_symbolic(
    op: &LameOperator,
    n: usize,
    scale: f64,
    term_bound: usize,
) -> Result<Vec<MultiPoly>> {
    let r = checked_r(op)?;
    resonance_check(op, n, DEFAULT_RESONANCE_TOL)?;
    let ln = op.diagonal_coefficient(n);
    let mut s: Vec<MultiPoly> = vec![MultiPoly::zero(r); n + 1];
    s[n] = MultiPoly::constant(r, ONE);
    let mut stored = 1usize;
    for j in 1..=n {
        let q = n + r - j;
        let mut acc = MultiPoly::zero(r);
        for i in 0..j {
            let p = n - i;
            if q + op.order() < p || s[p].is_empty() {
                continue;
            }
            let c = coefficient_poly(op, r, ln, scale, p, q);
            for (e, cv) in c.terms() {
                if e.iter().all(|&k| k == 0) {
                    acc.add_scaled(&s[p], cv);
                } else {
                    let var = e.iter().position(|&k| k == 1).unwrap();
                    acc.add_scaled(&s[p].mul_linear(ZERO, var, cv), ONE);
                }
            }
        }
        let den = op.diagonal_coefficient(n - j) - ln;
        s[n - j] = acc.scale(-ONE / den);
        stored += s[n - j].len();
        if stored > term_bound {
            return Err(Error::EliminationTooLarge {
                needed: stored,
                bound: term_bound,
            });
        }
    }
    Ok(s)
}

/// Heine's elimination with unscaled variables.
pub fn eliminate(op: &LameOperator, n: usize) -> Result<ReducedSystem> {
    eliminate_scaled(op, n, 1.0, DEFAULT_TERM_BOUND)
}

pub fn eliminate_scaled(
    op: &LameOperator,
    n: usize,
    scale: f64,
    term_bound: usize,
) -> Result<ReducedSystem> {
    let r = checked_r(op)?;
    let s = back_substitute_symbolic(op, n, scale, term_bound)?;
    let ln = op.diagonal_coefficient(n);
    let mut equations = Vec::with_capacity(r);
    for j in n + 1..=n + r {
        let q = n + r - j;
        let mut eq = MultiPoly::zero(r);
        for (p, sp) in s.iter().enumerate() {
            if sp.is_empty() || q + op.order() < p {
                continue;
            }
            let c = coefficient_poly(op, r, ln, scale, p, q);
            for (e, cv) in c.terms() {
                if e.iter().all(|&k| k == 0) {
                    eq.add_scaled(sp, cv);
                } else {
                    let var = e.iter().position(|&k| k == 1).unwrap();
                    eq.add_scaled(&sp.mul_linear(ZERO, var, cv), ONE);
                }
            }
        }
        equations.push(eq);
    }
    Ok(ReducedSystem {
        n,
        r,
        fixed_vr: -ln,
        scale,
        equations,
        weighted_degrees: (n as u32 + 1..=(n + r) as u32).collect(),
    })
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

    fn lame() -> LameOperator {
        op(&[&[-0.5, 0.0, 1.5], &[0.0, -1.0, 0.0, 1.0]])
    }

    #[test]
    fn classical_lame_degree_one() {
        let o = lame();
        // s_0 = (2/3) v_0 by hand.
        let s = back_substitute(&o, 1, &[c(0.9, 0.0)]).unwrap();
        assert!((s.coeff(0) - c(0.6, 0.0)).norm() < 1e-15);
        assert_eq!(s.coeff(1), ONE);
        let sys = eliminate(&o, 1).unwrap();
        let f = sys.equations[0].to_univariate();
        assert_eq!(f.degree(), Some(2));
        // -1/2 + (2/3) v_0^2 = 0
        let root = 0.75f64.sqrt();
        for v0 in [root, -root] {
            assert!(f.eval(c(v0, 0.0)).norm() < 1e-14);
        }
        assert!((f.coeff(2) - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn z_power_degree_five_is_monomial() {
        let o = op(&[&[], &[0.0, 0.0, 0.0, 1.0]]);
        let s = back_substitute(&o, 5, &[ZERO]).unwrap();
        assert_eq!(s, Polynomial::monomial(ONE, 5));
        let f = eliminate(&o, 5).unwrap().equations[0].to_univariate();
        assert_eq!(f.degree(), Some(6));
        assert!(f.coeffs()[..6].iter().all(|&c| c == ZERO));
    }

    #[test]
    fn reduced_system_two_by_four() {
        // k = 1, r = 2, n = 1. With s_1 = 1 and s_0 from equation 1, the two
        // leftover equations times (L_1 - L_0) read
        //   (L_1 - L_0)(v_0 + L_{1,1}) + (v_1 + L_{0,1})(v_1 + L_{1,2}) = 0
        //   (v_0 + L_{0,0})(v_1 + L_{1,2}) + (L_1 - L_0) L_{1,0} = 0.
        let o = op(&[&[0.7, -1.1, 0.4, 1.0]]);
        let l = |p, q| o.action_coefficient(p, q);
        let d = o.diagonal_coefficient(1) - o.diagonal_coefficient(0);
        let s = back_substitute(&o, 1, &[c(0.3, 0.2), c(-0.4, 1.0)]).unwrap();
        assert!((s.coeff(0) - (l(1, 2) + c(0.3, 0.2)) / d).norm() < 1e-15);

        let sys = eliminate(&o, 1).unwrap();
        assert_eq!(sys.weighted_degrees, vec![2, 3]);
        assert_eq!(sys.fixed_vr, -o.diagonal_coefficient(1));
        for (v1, v0) in [(c(0.3, 0.2), c(-0.4, 1.0)), (c(-2.0, 0.0), c(1.5, -0.5))] {
            let e1 = d * (v0 + l(1, 1)) + (v1 + l(0, 1)) * (v1 + l(1, 2));
            let e2 = (v0 + l(0, 0)) * (v1 + l(1, 2)) + d * l(1, 0);
            let got = sys.eval(&[v1, v0]);
            assert!((got[0] * d - e1).norm() < 1e-13);
            assert!((got[1] * d - e2).norm() < 1e-13);
        }
    }

    #[test]
    fn weighted_degrees_bounded() {
        let o = op(&[
            &[0.2, 0.0, 1.0],
            &[1.0, -0.3, 0.5, 0.1],
            &[0.4, 0.0, 1.0, 0.0, 1.0],
        ]);
        for n in 0..6 {
            let sys = eliminate(&o, n).unwrap();
            for (eq, &w) in sys.equations.iter().zip(&sys.weighted_degrees) {
                assert!(eq.weighted_degree(&sys.weights()).unwrap() <= w);
            }
        }
    }

    #[test]
    fn symbolic_matches_numeric() {
        let o = op(&[
            &[0.2, 0.0, 1.0],
            &[1.0, -0.3, 0.5, 0.1],
            &[0.4, 0.0, 1.0, 0.0, 1.0, 0.5],
        ]);
        let tail = [c(0.3, -0.1), c(-1.2, 0.4)];
        let s = back_substitute(&o, 4, &tail).unwrap();
        let sym = back_substitute_symbolic(&o, 4, 2.0, DEFAULT_TERM_BOUND).unwrap();
        let x = [tail[0] / 2.0, tail[1] / 2.0];
        for (p, sp) in sym.iter().enumerate() {
            assert!((sp.eval(&x) - s.coeff(p)).norm() < 1e-12);
        }
        let sys = eliminate_scaled(&o, 4, 2.0, DEFAULT_TERM_BOUND).unwrap();
        let direct = reduced_residuals(&o, 4, &tail).unwrap();
        for (a, b) in sys.eval(&tail).iter().zip(&direct) {
            assert!((a - b).norm() < 1e-11 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn resonance_and_size_bound() {
        let o = op(&[&[1.0, 0.0, -3.0], &[0.0, -1.0, 0.0, 1.0]]);
        assert_eq!(
            back_substitute(&o, 4, &[ZERO]),
            Err(Error::Resonance { level: 4, index: 0 })
        );
        let g = op(&[
            &[0.2, 0.0, 1.0],
            &[1.0, -0.3, 0.5, 0.1],
            &[0.4, 0.0, 1.0, 0.0, 1.0],
        ]);
        assert!(matches!(
            eliminate_scaled(&g, 12, 1.0, 50),
            Err(Error::EliminationTooLarge { bound: 50, .. })
        ));
    }
}
