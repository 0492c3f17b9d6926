//! Path tracking for the two reduced equations of a Fuchs index 2 level.
//!
//! The reduced equations are evaluated through the back-substitution
//! recurrence (with forward derivatives) rather than from expanded
//! coefficients, which keeps them accurate for larger `n`. Paths start from a
//! weighted total-degree system with the same weights `w(v_1) = 1`,
//! `w(v_0) = 2` and end with a Cauchy loop around `s = 1`, so paths that run
//! into multiple solutions still produce accurate endpoints.

use std::f64::consts::TAU;

use nalgebra::{Matrix2, Vector2};

use crate::operator::LameOperator;
use crate::poly::{Complex, ONE, ZERO};

/// The reduced system of a nonresonant level in scaled variables
/// `x_t = v_{r-1-t} / scales[t]`, divided by `norm`.
pub(crate) struct Reduced {
    n: usize,
    r: usize,
    k: usize,
    /// `base[p][q]`: constant part of the coefficient of `s_p` at `z^q`.
    base: Vec<Vec<Complex>>,
    /// `L_{n-j} - L_n` for `j = 0..=n`.
    den: Vec<Complex>,
    scales: Vec<f64>,
    norm: f64,
}

impl Reduced {
    pub(crate) fn new(op: &LameOperator, n: usize, scales: Vec<f64>) -> Reduced {
        let r = op.fuchs_index() as usize;
        let ln = op.diagonal_coefficient(n);
        let base = (0..=n)
            .map(|p| {
                (0..=n + r)
                    .map(|q| {
                        let mut c = op.action_coefficient(p, q);
                        if q == p + r {
                            c -= ln;
                        }
                        c
                    })
                    .collect()
            })
            .collect();
        let den = (0..=n)
            .map(|j| op.diagonal_coefficient(n - j) - ln)
            .collect();
        let norm = if ln.norm() > 0.0 { ln.norm() } else { 1.0 };
        Reduced {
            n,
            r,
            k: op.order(),
            base,
            den,
            scales,
            norm,
        }
    }

    pub(crate) fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Values and Jacobian of the `r` leftover equations.
    pub(crate) fn eval(&self, x: &[Complex]) -> (Vec<Complex>, Vec<Vec<Complex>>) {
        let (n, r) = (self.n, self.r);
        let mut s = vec![ZERO; n + 1];
        let mut ds = vec![vec![ZERO; r]; n + 1];
        s[n] = ONE;
        // Coefficient of s_p at z^q and its partial derivatives.
        let coef = |p: usize, q: usize| -> (Complex, Option<(usize, Complex)>) {
            let mut c = self.base[p][q];
            let mut d = None;
            if q >= p && q - p < r {
                let var = r - 1 - (q - p);
                c += self.scales[var] * x[var];
                d = Some((var, Complex::new(self.scales[var], 0.0)));
            }
            (c, d)
        };
        let combine =
            |q: usize, ps: std::ops::RangeInclusive<usize>, s: &[Complex], ds: &[Vec<Complex>]| {
                let mut acc = ZERO;
                let mut dacc = vec![ZERO; r];
                for p in ps {
                    if q + self.k < p {
                        continue;
                    }
                    let (c, d) = coef(p, q);
                    acc += s[p] * c;
                    for v in 0..r {
                        dacc[v] += ds[p][v] * c;
                    }
                    if let Some((var, dc)) = d {
                        dacc[var] += s[p] * dc;
                    }
                }
                (acc, dacc)
            };
        for j in 1..=n {
            let q = n + r - j;
            let (acc, dacc) = combine(q, n - j + 1..=n, &s, &ds);
            let inv = -ONE / self.den[j];
            s[n - j] = acc * inv;
            for v in 0..r {
                ds[n - j][v] = dacc[v] * inv;
            }
        }
        let mut values = Vec::with_capacity(r);
        let mut jac = Vec::with_capacity(r);
        for j in n + 1..=n + r {
            let q = n + r - j;
            let (f, df) = combine(q, 0..=n, &s, &ds);
            values.push(f / self.norm);
            jac.push(df.into_iter().map(|d| d / self.norm).collect());
        }
        (values, jac)
    }
}

/// Weighted total-degree start system for degrees `(n+1, n+2)`.
struct Start {
    /// `(exponent of t in G_1, exponent of u in G_1)` etc.
    g1: (u32, u32),
    g2: (u32, u32),
}

impl Start {
    fn new(n: usize) -> Start {
        let (d1, d2) = (n as u32 + 1, n as u32 + 2);
        if d1 % 2 == 0 {
            Start {
                g1: (0, d1 / 2),
                g2: (d2, 0),
            }
        } else {
            Start {
                g1: (d1, 0),
                g2: (0, d2 / 2),
            }
        }
    }

    fn solutions(&self) -> Vec<[Complex; 2]> {
        let roots = |m: u32| -> Vec<Complex> {
            (0..m)
                .map(|i| Complex::from_polar(1.0, TAU * i as f64 / m as f64))
                .collect()
        };
        // Each G is a pure power of one variable minus 1.
        let (t_deg, u_deg) = if self.g1.0 > 0 {
            (self.g1.0, self.g2.1)
        } else {
            (self.g2.0, self.g1.1)
        };
        let mut out = Vec::new();
        for t in roots(t_deg) {
            for &u in &roots(u_deg) {
                out.push([t, u]);
            }
        }
        out
    }

    fn eval(&self, x: &[Complex; 2]) -> (Vector2<Complex>, Matrix2<Complex>) {
        let term = |(a, b): (u32, u32)| -> (Complex, Complex, Complex) {
            let v = x[0].powu(a) * x[1].powu(b);
            let dt = if a > 0 {
                x[0].powu(a - 1) * x[1].powu(b) * a as f64
            } else {
                ZERO
            };
            let du = if b > 0 {
                x[0].powu(a) * x[1].powu(b - 1) * b as f64
            } else {
                ZERO
            };
            (v - ONE, dt, du)
        };
        let (v1, a, b) = term(self.g1);
        let (v2, c, d) = term(self.g2);
        (Vector2::new(v1, v2), Matrix2::new(a, b, c, d))
    }
}

struct Homotopy<'a> {
    target: &'a Reduced,
    start: Start,
    gamma: Complex,
}

impl Homotopy<'_> {
    /// `H`, `dH/dx`, `dH/ds` at `(x, s)`.
    fn eval(
        &self,
        x: &[Complex; 2],
        s: Complex,
    ) -> (Vector2<Complex>, Matrix2<Complex>, Vector2<Complex>) {
        let (g, gx) = self.start.eval(x);
        let (f, fx) = self.target.eval(x);
        let f = Vector2::new(f[0], f[1]);
        let fx = Matrix2::new(fx[0][0], fx[0][1], fx[1][0], fx[1][1]);
        let a = (ONE - s) * self.gamma;
        (g * a + f * s, gx * a + fx * s, f - g * self.gamma)
    }

    fn tangent(&self, x: &[Complex; 2], s: Complex) -> Option<Vector2<Complex>> {
        let (_, hx, hs) = self.eval(x, s);
        hx.lu().solve(&(-hs))
    }

    /// Newton until the step is below `tol`, or until it stalls below
    /// `STALL_TOL`: near a tight cluster of solutions the Jacobian is so
    /// ill-conditioned that rounding alone keeps the step above `tol`.
    fn correct(&self, mut x: [Complex; 2], s: Complex, tol: f64) -> Option<[Complex; 2]> {
        const STALL_TOL: f64 = 1e-8;
        let mut last = f64::INFINITY;
        for _ in 0..5 {
            let (h, hx, _) = self.eval(&x, s);
            let dx = hx.lu().solve(&(-h))?;
            x[0] += dx[0];
            x[1] += dx[1];
            let size = 1.0 + x[0].norm() + x[1].norm();
            if !(x[0].re.is_finite() && x[1].re.is_finite()) {
                return None;
            }
            let step = dx.norm();
            if step <= tol * size || (step <= STALL_TOL * size && step >= 0.5 * last) {
                return Some(x);
            }
            last = step;
        }
        None
    }

    /// One RK4 predictor plus Newton corrector from `s0` to `s1`.
    fn step(&self, x: &[Complex; 2], s0: Complex, s1: Complex, tol: f64) -> Option<[Complex; 2]> {
        let h = s1 - s0;
        let add =
            |x: &[Complex; 2], d: &Vector2<Complex>, c: Complex| [x[0] + d[0] * c, x[1] + d[1] * c];
        let k1 = self.tangent(x, s0)?;
        let k2 = self.tangent(&add(x, &k1, h * 0.5), s0 + h * 0.5)?;
        let k3 = self.tangent(&add(x, &k2, h * 0.5), s0 + h * 0.5)?;
        let k4 = self.tangent(&add(x, &k3, h), s1)?;
        let two = Complex::new(2.0, 0.0);
        let pred = add(x, &(k1 + k2 * two + k3 * two + k4), h / 6.0);
        let corrected = self.correct(pred, s1, tol)?;
        // Reject steps whose prediction was far off; they risk path jumping.
        let jump = ((corrected[0] - pred[0]).norm() + (corrected[1] - pred[1]).norm())
            / (1.0 + x[0].norm() + x[1].norm());
        if jump > 1e-3 {
            return None;
        }
        Some(corrected)
    }

    fn track_real(
        &self,
        mut x: [Complex; 2],
        mut s: f64,
        s_end: f64,
        max_step: f64,
    ) -> Option<[Complex; 2]> {
        let mut h: f64 = max_step.min(0.01).min(s_end - s);
        let mut streak = 0;
        while s < s_end {
            let s1 = (s + h).min(s_end);
            match self.step(&x, Complex::new(s, 0.0), Complex::new(s1, 0.0), 1e-10) {
                Some(next) => {
                    x = next;
                    s = s1;
                    streak += 1;
                    if streak >= 3 {
                        h = (h * 2.0).min(max_step);
                        streak = 0;
                    }
                }
                None => {
                    h *= 0.5;
                    streak = 0;
                    if h < 1e-15 {
                        return None;
                    }
                }
            }
        }
        Some(x)
    }

    /// Loops around `s = 1` on the circle of radius `eps` until the path
    /// closes; returns the mean over the loops (the Cauchy integral for the
    /// value at `s = 1`) and the number of loops.
    fn cauchy_endgame(&self, x0: [Complex; 2], eps: f64) -> Option<([Complex; 2], usize)> {
        const SAMPLES: usize = 32;
        const MAX_LOOPS: usize = 40;
        let at = |theta: f64| ONE - Complex::from_polar(eps, theta);
        let mut x = x0;
        let mut sum = [ZERO, ZERO];
        let mut count = 0usize;
        for lp in 1..=MAX_LOOPS {
            for i in 0..SAMPLES {
                sum[0] += x[0];
                sum[1] += x[1];
                count += 1;
                let th0 = TAU * ((lp - 1) * SAMPLES + i) as f64 / SAMPLES as f64;
                let th1 = th0 + TAU / SAMPLES as f64;
                x = self.arc(x, th0, th1, &at)?;
            }
            let size = 1.0 + x0[0].norm() + x0[1].norm();
            if (x[0] - x0[0]).norm() + (x[1] - x0[1]).norm() <= 1e-7 * size {
                let c = count as f64;
                return Some(([sum[0] / c, sum[1] / c], lp));
            }
        }
        None
    }

    fn arc(
        &self,
        mut x: [Complex; 2],
        th0: f64,
        th1: f64,
        at: &dyn Fn(f64) -> Complex,
    ) -> Option<[Complex; 2]> {
        let mut th = th0;
        let mut h = th1 - th0;
        while th < th1 {
            let t1 = (th + h).min(th1);
            match self.step(&x, at(th), at(t1), 1e-12) {
                Some(next) => {
                    x = next;
                    th = t1;
                }
                None => {
                    h *= 0.5;
                    if h < 1e-10 {
                        return None;
                    }
                }
            }
        }
        Some(x)
    }
}

/// Newton on the target system while the residual decreases.
pub(crate) fn polish(target: &Reduced, mut x: [Complex; 2]) -> [Complex; 2] {
    let resid = |x: &[Complex; 2]| {
        let (f, _) = target.eval(x);
        f[0].norm() + f[1].norm()
    };
    let mut best = resid(&x);
    for _ in 0..8 {
        if best == 0.0 {
            break;
        }
        let (f, j) = target.eval(&x);
        let jac = Matrix2::new(j[0][0], j[0][1], j[1][0], j[1][1]);
        let Some(dx) = jac.lu().solve(&Vector2::new(-f[0], -f[1])) else {
            break;
        };
        let cand = [x[0] + dx[0], x[1] + dx[1]];
        let r = resid(&cand);
        if r < best {
            x = cand;
            best = r;
        } else {
            break;
        }
    }
    x
}

/// `sigma_min / (1 + sigma_max)` of the target Jacobian at `x`, up to a
/// factor 2; small values flag singular solutions.
pub(crate) fn conditioning(target: &Reduced, x: &[Complex; 2]) -> f64 {
    let (_, j) = target.eval(x);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let size = j.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    if size == 0.0 {
        0.0
    } else {
        det.norm() / size / (1.0 + size)
    }
}

/// Where a path ended: a solution of the target, or the last point seen
/// before tracking or the endgame gave up.
#[derive(Clone, Copy, Debug)]
pub(crate) enum PathEnd {
    Solution([Complex; 2]),
    Lost([Complex; 2]),
}

/// Endpoints of all `binom(n+2, 2)` paths.
pub(crate) fn track_all(target: &Reduced, gamma: Complex, max_step: f64) -> Vec<PathEnd> {
    let h = Homotopy {
        target,
        start: Start::new(target.n),
        gamma,
    };
    // Cauchy estimates on shrinking circles. Two consecutive estimates must
    // agree and solve the target: the mean over a cycle that still encloses
    // nearby branch points is stable in the radius but is generally not a
    // solution, and when it happens to be one it is a regular one.
    let radii = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10];
    h.start
        .solutions()
        .into_iter()
        .map(|x0| {
            let mut x = x0;
            let mut s = 0.0;
            let mut prev: Option<([Complex; 2], usize)> = None;
            for eps in radii {
                let Some(next) = h.track_real(x, s, 1.0 - eps, max_step) else {
                    break;
                };
                x = next;
                s = 1.0 - eps;
                let Some((est, c)) = h.cauchy_endgame(x, eps) else {
                    break;
                };
                if let Some((p, pc)) = prev {
                    let size = 1.0 + est[0].norm() + est[1].norm();
                    let agree =
                        pc == c && (p[0] - est[0]).norm() + (p[1] - est[1]).norm() <= 1e-9 * size;
                    let (f, _) = target.eval(&est);
                    // Only singular solutions can end a cycle of several loops.
                    let singular_if_cycled = c == 1 || conditioning(target, &est) <= 1e-6;
                    if agree && singular_if_cycled && f[0].norm() + f[1].norm() <= 1e-8 * size {
                        return PathEnd::Solution(est);
                    }
                }
                prev = Some((est, c));
            }
            PathEnd::Lost(x)
        })
        .collect()
}

/// Fixed generic direction for the deflation factors `1 / a.(x - x_i)`.
const DEFLATION_DIRECTION: [Complex; 2] =
    [Complex::new(0.8157, 0.2731), Complex::new(-0.3514, 0.9083)];

/// Newton on `F(x) / prod_i a.(x - x_i)`, whose zeros are those of `F`
/// other than the known `x_i`. The factor is holomorphic, so the step
/// solves `(F' + F g^T) dx = -F` with `g = -sum_i a / a.(x - x_i)`.
pub(crate) fn deflated_newton(
    target: &Reduced,
    mut x: [Complex; 2],
    known: &[[Complex; 2]],
) -> Option<[Complex; 2]> {
    let a = DEFLATION_DIRECTION;
    for _ in 0..60 {
        let (f, j) = target.eval(&x);
        let size = 1.0 + x[0].norm() + x[1].norm();
        if f[0].norm() + f[1].norm() <= 1e-13 * size {
            break;
        }
        let mut g = [ZERO, ZERO];
        for k in known {
            let d = a[0] * (x[0] - k[0]) + a[1] * (x[1] - k[1]);
            g[0] -= a[0] / d;
            g[1] -= a[1] / d;
        }
        let m = Matrix2::new(
            j[0][0] + f[0] * g[0],
            j[0][1] + f[0] * g[1],
            j[1][0] + f[1] * g[0],
            j[1][1] + f[1] * g[1],
        );
        let dx = m.lu().solve(&Vector2::new(-f[0], -f[1]))?;
        // Damped: deflation poles can fling the iterate far away.
        let damp = (0.25 * size / dx.norm()).min(1.0);
        x[0] += dx[0] * damp;
        x[1] += dx[1] * damp;
        if !(x[0].re.is_finite() && x[1].re.is_finite()) {
            return None;
        }
    }
    let x = polish(target, x);
    let (f, _) = target.eval(&x);
    let size = 1.0 + x[0].norm() + x[1].norm();
    (f[0].norm() + f[1].norm() <= 1e-8 * size).then_some(x)
}
