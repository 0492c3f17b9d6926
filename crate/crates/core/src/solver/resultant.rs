use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::poly::{Complex, Polynomial, ONE, ZERO};

use super::eliminate::ReducedSystem;

fn determinant(m: DMatrix<Complex>) -> Complex {
    if m.nrows() == 0 {
        return ONE;
    }
    m.lu().determinant()
}

/// Sylvester matrix of `a` and `b` taken with formal degrees `da`, `db`.
fn sylvester(a: &Polynomial, da: usize, b: &Polynomial, db: usize) -> DMatrix<Complex> {
    let size = da + db;
    let mut m = DMatrix::<Complex>::zeros(size, size);
    for row in 0..db {
        for i in 0..=da {
            m[(row, row + i)] = a.coeff(da - i);
        }
    }
    for row in 0..da {
        for i in 0..=db {
            m[(db + row, row + i)] = b.coeff(db - i);
        }
    }
    m
}

/// Resultant of the two reduced equations of a Fuchs index 2 level with
/// respect to `v_0`, as a polynomial in the scaled `v_1`. Values on the unit
/// circle are interpolated by a discrete Fourier transform. The monomial
/// basis makes this ill-conditioned beyond small `n`; the solver tracks
/// paths instead and uses this only as an independent check.
pub fn resultant_first_variable(sys: &ReducedSystem) -> Polynomial {
    let (f1, f2) = (&sys.equations[0], &sys.equations[1]);
    let da = f1.degree_in(1).unwrap_or(0) as usize;
    let db = f2.degree_in(1).unwrap_or(0) as usize;
    let n = sys.n;
    let bound = (n + 1) * (n + 2) / 2;
    let samples = bound + 8;
    let values: Vec<Complex> = (0..samples)
        .map(|k| {
            let t = Complex::from_polar(1.0, TAU * k as f64 / samples as f64);
            let a = f1.restrict(1, &[t, ZERO]);
            let b = f2.restrict(1, &[t, ZERO]);
            determinant(sylvester(&a, da, &b, db))
        })
        .collect();
    let mut coeffs: Vec<Complex> = (0..samples)
        .map(|m| {
            values
                .iter()
                .enumerate()
                .map(|(k, &val)| {
                    let angle = -TAU * ((k * m) % samples) as f64 / samples as f64;
                    val * Complex::from_polar(1.0, angle)
                })
                .sum::<Complex>()
                / samples as f64
        })
        .collect();
    let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    // Interpolation noise sits near machine precision times the largest value.
    let chop = 1e-11 * top;
    for c in coeffs.iter_mut() {
        if c.norm() <= chop {
            *c = ZERO;
        }
    }
    Polynomial::new(coeffs)
}
