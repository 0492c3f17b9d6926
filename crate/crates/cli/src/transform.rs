//! The substitution `y = 1/z`, which turns a negative Fuchs index into a
//! non-negative one.

use vanvleck_core::{Complex, LameOperator, Polynomial};

/// Coefficients `[a_0, ..., a_i]` of `(-y^2 d/dy)^i = sum a_j d^j/dy^j`.
fn inverted_powers(k: usize) -> Vec<Vec<Polynomial>> {
    let minus_y2 = Polynomial::monomial(Complex::new(-1.0, 0.0), 2);
    let mut out = vec![vec![Polynomial::constant(Complex::new(1.0, 0.0))]];
    for i in 0..k {
        let prev = &out[i];
        let mut next = vec![Polynomial::zero(); i + 2];
        for (j, a) in prev.iter().enumerate() {
            next[j] = &next[j] + &(&minus_y2 * &a.derivative(1));
            next[j + 1] = &next[j + 1] + &(&minus_y2 * a);
        }
        out.push(next);
    }
    out
}

/// `y^M sum_i Q_i(1/y) (-y^2 d/dy)^i` with `M = max deg Q_i`: the operator
/// in `y = 1/z`, cleared of negative powers.
pub fn invert_variable(op: &LameOperator) -> LameOperator {
    let k = op.order();
    let m = (1..=k).filter_map(|i| op.q(i).degree()).max().unwrap_or(0);
    let powers = inverted_powers(k);
    let mut q = vec![Polynomial::zero(); k];
    for i in 1..=k {
        if op.q(i).is_zero() {
            continue;
        }
        let rev = op.q(i).reversed(m);
        for j in 1..=i {
            q[j - 1] = &q[j - 1] + &(&rev * &powers[i][j]);
        }
    }
    LameOperator::new(q).expect("(-y^2 d/dy)^k has a nonzero top term")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    #[test]
    fn second_power() {
        // (-y^2 d)^2 = y^4 d^2 + 2 y^3 d.
        let p = &inverted_powers(2)[2];
        assert!(p[0].is_zero());
        assert_eq!(p[1], Polynomial::monomial(c(2.0), 3));
        assert_eq!(p[2], Polynomial::monomial(c(1.0), 4));
    }

    #[test]
    fn first_order_constant() {
        let op = LameOperator::new(vec![Polynomial::constant(c(1.0))]).unwrap();
        assert_eq!(op.fuchs_index(), -1);
        let t = invert_variable(&op);
        assert_eq!(t.q(1), &Polynomial::monomial(c(-1.0), 2));
        assert_eq!(t.fuchs_index(), 1);
        assert!(t.is_nondegenerate());
    }

    #[test]
    fn second_order_linear_top() {
        let op =
            LameOperator::new(vec![Polynomial::zero(), Polynomial::monomial(c(1.0), 1)]).unwrap();
        assert_eq!(op.fuchs_index(), -1);
        let t = invert_variable(&op);
        assert!(t.fuchs_index() >= 0);
        assert!(t.is_nondegenerate());
    }

    #[test]
    fn applying_twice_multiplies_by_a_power() {
        let op = LameOperator::new(vec![
            Polynomial::from_real(&[0.5, -1.0]),
            Polynomial::from_real(&[2.0, 0.0, 0.3]),
            Polynomial::from_real(&[1.0, 1.0]),
        ])
        .unwrap();
        let m = 2;
        let once = invert_variable(&op);
        let m2 = (1..=3).filter_map(|i| once.q(i).degree()).max().unwrap();
        let twice = invert_variable(&once);
        let shift = Polynomial::monomial(c(1.0), m2 - m);
        for i in 1..=3 {
            let want = &shift * op.q(i);
            assert!(twice.q(i).distance_max(&want) < 1e-12, "order {i}");
        }
    }
}
