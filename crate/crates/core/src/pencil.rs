//! The action of an operator on `Pol_n` as a rectangular band matrix, the
//! shift matrices spanning the Van Vleck directions, and numerical rank and
//! left-kernel computations on the resulting pencil.
//!
//! Orientation: row position `n - p` holds the image of `z^p` (coefficient
//! `s_p`), column position `n + r - q` holds the power `z^q`. The top-left
//! entry is therefore `L_{n, n+r}`, the matrix is upper "triangular" and the
//! main diagonal carries `L_n, L_{n-1}, ..., L_0`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::LameOperator;
use crate::poly::{binomial, Complex, Polynomial, ONE, ZERO};

/// Default relative singular-value threshold for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// `A_{d,n}`: `(n+1) x (n+r+1)`, row `p` is the coefficient vector of `d(z^p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionMatrix {
    n: usize,
    r: usize,
    data: DMatrix<Complex>,
}

impl ActionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn rows(&self) -> usize {
        self.n + 1
    }

    pub fn cols(&self) -> usize {
        self.n + self.r + 1
    }

    /// Entry for coefficient `s_p` at power `z^q`; zero out of range.
    pub fn entry(&self, p: usize, q: usize) -> Complex {
        if p > self.n || q > self.n + self.r {
            return ZERO;
        }
        self.data[(self.n - p, self.n + self.r - q)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex> {
        &self.data
    }
}

/// `I_s`: ones where `q - p = r - s`. It multiplies `v_{r-s}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftMatrix {
    pub s: usize,
    pub n: usize,
    pub r: usize,
}

impl ShiftMatrix {
    pub fn entry(&self, p: usize, q: usize) -> Complex {
        if p <= self.n && q <= self.n + self.r && q as i64 - p as i64 == (self.r - self.s) as i64 {
            ONE
        } else {
            ZERO
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex> {
        let (n, r) = (self.n, self.r);
        DMatrix::from_fn(n + 1, n + r + 1, |i, j| self.entry(n - i, n + r - j))
    }
}

/// The pencil `A_{d,n} + v_r I_0 + ... + v_0 I_r` evaluated at a given `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct PencilPoint {
    pub v: Polynomial,
    pub n: usize,
    pub r: usize,
    pub matrix: DMatrix<Complex>,
}

impl PencilPoint {
    pub fn entry(&self, p: usize, q: usize) -> Complex {
        if p > self.n || q > self.n + self.r {
            return ZERO;
        }
        self.matrix[(self.n - p, self.n + self.r - q)]
    }

    /// The same pencil point in the variable `z = rho w`: entry `(p, q)` is
    /// multiplied by `rho^{q-p}`, so that left-kernel vectors become
    /// `s_p rho^p`. Used to balance polynomials whose roots are far from the
    /// unit circle.
    pub fn balanced(&self, rho: f64) -> PencilPoint {
        let (n, r) = (self.n, self.r);
        let matrix = DMatrix::from_fn(n + 1, n + r + 1, |i, j| {
            let (p, q) = (n - i, n + r - j);
            self.matrix[(i, j)] * rho.powi(q as i32 - p as i32)
        });
        PencilPoint {
            v: self.v.clone(),
            n,
            r,
            matrix,
        }
    }
}

pub fn build_action_matrix(op: &LameOperator, n: usize) -> Result<ActionMatrix> {
    let r = op.fuchs_index();
    if r < 0 {
        return Err(Error::NegativeFuchsIndex(r));
    }
    let r = r as usize;
    let data = DMatrix::from_fn(n + 1, n + r + 1, |i, j| {
        let (p, q) = (n - i, n + r - j);
        if q > p + r {
            ZERO
        } else {
            op.action_coefficient(p, q)
        }
    });
    Ok(ActionMatrix { n, r, data })
}

pub fn pencil_at(base: &ActionMatrix, v: &Polynomial) -> Result<PencilPoint> {
    let (n, r) = (base.n, base.r);
    if let Some(d) = v.degree() {
        if d > r {
            return Err(Error::DegreeTooHigh { degree: d, max: r });
        }
    }
    let mut matrix = base.data.clone();
    // v_j multiplies positions with q - p = j.
    for j in 0..=r {
        let vj = v.coeff(j);
        if vj == ZERO {
            continue;
        }
        for p in 0..=n {
            matrix[(n - p, n + r - (p + j))] += vj;
        }
    }
    Ok(PencilPoint {
        v: v.clone(),
        n,
        r,
        matrix,
    })
}

/// Singular values in decreasing order.
pub fn singular_values(point: &PencilPoint) -> Vec<f64> {
    let mut sv: Vec<f64> = point
        .matrix
        .clone()
        .singular_values()
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Dimension of the numerical left kernel: singular values at or below
/// `tol * sigma_max`.
pub fn corank(point: &PencilPoint, tol: f64) -> usize {
    let sv = singular_values(point);
    let top = sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s <= tol * top).count()
}

/// Orthonormal basis of the numerical left kernel; vector entry for row
/// `n - p` becomes the coefficient `s_p`.
pub fn left_kernel(point: &PencilPoint, tol: f64) -> Result<Vec<Polynomial>> {
    let n = point.n;
    // Left kernel of M is the conjugate of the null space of M^H; take the
    // SVD of M^H so the null space appears among the right singular vectors.
    let mh = point.matrix.adjoint();
    let svd = mh.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut basis = Vec::new();
    for (idx, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol * top {
            // Row idx of V^H is conj(v); M^H v = 0 means v^H M = 0, so s = conj(v).
            let row = v_t.row(idx);
            let coeffs: Vec<Complex> = (0..=n).map(|p| row[n - p]).collect();
            basis.push(Polynomial::new(coeffs));
        }
    }
    if basis.is_empty() {
        Err(Error::FullRank)
    } else {
        Ok(basis)
    }
}

/// `binom(n + r + 1, r + 1)`: Van Vleck polynomials with a Stieltjes
/// polynomial of degree at most `n`, counted with multiplicity.
pub fn total_count(n: usize, r: usize) -> u128 {
    binomial((n + r + 1) as u64, (r + 1) as u64)
}

/// [`total_count`] for the Fuchs index of `op`.
pub fn total_count_pencil(op: &LameOperator, n: usize) -> Result<u128> {
    op.check_nondegenerate()?;
    Ok(total_count(n, op.fuchs_index() as usize))
}

/// `binom(n + r, r)`: the count at a single nonresonant level.
pub fn level_count(n: usize, r: usize) -> u128 {
    binomial((n + r) as u64, r as u64)
}
