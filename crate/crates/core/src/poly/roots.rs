use nalgebra::DMatrix;

use super::{Complex, Polynomial, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 600;

/// Roots of a polynomial grouped into clusters.
///
/// `roots[i]` is the centroid of a cluster of `multiplicities[i]` computed
/// roots lying within `cluster_tol` of each other (single linkage).
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex>,
    pub multiplicities: Vec<usize>,
    pub cluster_tol: f64,
    /// Largest relative backward error `|P(z)| / sum |c_i| |z|^i` over the
    /// raw (unclustered) roots.
    pub backward_error: f64,
}

impl RootSet {
    /// Roots repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex> {
        self.roots
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&z, &m)| std::iter::repeat_n(z, m))
            .collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// `1e-6 * (1 + max |root|)`.
pub fn default_cluster_tol(raw: &[Complex]) -> f64 {
    1e-6 * (1.0 + raw.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `1e-8 * (1 + max |coeff|)`.
pub fn default_imag_tol(p: &Polynomial) -> f64 {
    1e-8 * (1.0 + p.norm_max())
}

/// All roots of `p`, clustered with the default tolerance.
pub fn roots(p: &Polynomial) -> Result<RootSet> {
    let raw = raw_roots(p)?;
    let tol = default_cluster_tol(&raw);
    Ok(cluster(p, raw, tol))
}

pub fn roots_with_tol(p: &Polynomial, cluster_tol: f64) -> Result<RootSet> {
    let raw = raw_roots(p)?;
    Ok(cluster(p, raw, cluster_tol))
}

/// Unclustered roots with repetition.
pub(crate) fn raw_roots(p: &Polynomial) -> Result<Vec<Complex>> {
    let degree = match p.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(Error::DegreeZero),
        Some(d) => d,
    };
    // Exact zero roots are split off so that z^m factors stay exact.
    let zeros = p.coeffs().iter().take_while(|c| **c == ZERO).count();
    let mut out = vec![ZERO; zeros];
    let q = Polynomial::new(p.coeffs()[zeros..].to_vec());
    let d = degree - zeros;
    match d {
        0 => {}
        1 => out.push(-q.coeff(0) / q.coeff(1)),
        _ => {
            let found = match aberth(&q) {
                Some(found) => found,
                None => companion_roots(&q)
                    .map(|guess| polish_newton(&q, guess))
                    .ok_or_else(|| Error::RootFindingFailure {
                        degree: d,
                        coeffs: q.coeffs().to_vec(),
                    })?,
            };
            out.extend(found);
        }
    }
    Ok(out)
}

fn relative_backward_error(p: &Polynomial, z: Complex) -> f64 {
    let scale = p.eval_abs(z);
    if scale == 0.0 {
        0.0
    } else {
        p.eval(z).norm() / scale
    }
}

/// Starting points on circles whose radii come from the upper convex hull of
/// `(i, log|c_i|)`.
fn initial_guesses(p: &Polynomial) -> Vec<Complex> {
    let d = p.degree().unwrap();
    let pts: Vec<(f64, f64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != ZERO)
        .map(|(i, c)| (i as f64, c.norm().ln()))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut guesses = Vec::with_capacity(d);
    let tau = std::f64::consts::TAU;
    for w in hull.windows(2) {
        let (i, j) = (w[0].0 as usize, w[1].0 as usize);
        let count = j - i;
        let radius = ((w[0].1 - w[1].1) / count as f64).exp();
        let offset = 0.4 + 0.7 * i as f64 / d as f64;
        for m in 0..count {
            let angle = tau * m as f64 / count as f64 + offset;
            guesses.push(Complex::from_polar(radius, angle));
        }
    }
    guesses
}

/// Newton correction `p(z) / p'(z)`, evaluated through the reversed
/// polynomial when `|z| > 1` to avoid overflow.
fn newton_ratio(p: &Polynomial, rev: &Polynomial, d: usize, z: Complex) -> Complex {
    if z.norm() <= 1.0 {
        let (v, dv) = p.eval_with_derivative(z);
        if v == ZERO {
            ZERO
        } else {
            v / dv
        }
    } else {
        let y = ONE / z;
        let (v, dv) = rev.eval_with_derivative(y);
        if v == ZERO {
            return ZERO;
        }
        z / (Complex::new(d as f64, 0.0) - y * dv / v)
    }
}

fn aberth(p: &Polynomial) -> Option<Vec<Complex>> {
    let d = p.degree().unwrap();
    let rev = p.reversed(d);
    let mut z = initial_guesses(p);
    let mut done = vec![false; d];
    let eps = f64::EPSILON;
    for _ in 0..MAX_ITERATIONS {
        for i in 0..d {
            if done[i] {
                continue;
            }
            let ratio = newton_ratio(p, &rev, d, z[i]);
            if !ratio.re.is_finite() || !ratio.im.is_finite() {
                return None;
            }
            let mut sum = ZERO;
            for j in 0..d {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff != ZERO {
                        sum += ONE / diff;
                    }
                }
            }
            let step = ratio / (ONE - ratio * sum);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * eps * z[i].norm()
                || relative_backward_error(p, z[i]) <= 4.0 * eps
            {
                done[i] = true;
            }
        }
        if done.iter().all(|&x| x) {
            return Some(z);
        }
    }
    // Stagnation: accept only if every root is backward stable anyway.
    if z.iter().all(|&zi| relative_backward_error(p, zi) <= 1e-10) {
        Some(z)
    } else {
        None
    }
}

/// Eigenvalues of the companion matrix via complex Schur form.
fn companion_roots(p: &Polynomial) -> Option<Vec<Complex>> {
    let d = p.degree().unwrap();
    let lead = p.leading().unwrap();
    let mut m = DMatrix::<Complex>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..d {
        m[(i, d - 1)] = -p.coeff(i) / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)?;
    let (_, t) = schur.unpack();
    Some((0..d).map(|i| t[(i, i)]).collect())
}

fn polish_newton(p: &Polynomial, guesses: Vec<Complex>) -> Vec<Complex> {
    let d = p.degree().unwrap();
    let rev = p.reversed(d);
    guesses
        .into_iter()
        .map(|mut z| {
            for _ in 0..8 {
                let before = relative_backward_error(p, z);
                let cand = z - newton_ratio(p, &rev, d, z);
                if relative_backward_error(p, cand) < before {
                    z = cand;
                } else {
                    break;
                }
            }
            z
        })
        .collect()
}

fn cluster(p: &Polynomial, raw: Vec<Complex>, tol: f64) -> RootSet {
    let backward_error = raw
        .iter()
        .map(|&z| relative_backward_error(p, z))
        .fold(0.0, f64::max);
    let groups = single_linkage(&raw, tol);
    let mut roots = Vec::with_capacity(groups.len());
    let mut multiplicities = Vec::with_capacity(groups.len());
    for g in groups {
        let sum: Complex = g.iter().map(|&i| raw[i]).sum();
        roots.push(sum / g.len() as f64);
        multiplicities.push(g.len());
    }
    RootSet {
        roots,
        multiplicities,
        cluster_tol: tol,
        backward_error,
    }
}

/// Connected components of the graph joining points at distance `<= tol`.
pub(crate) fn single_linkage(points: &[Complex], tol: f64) -> Vec<Vec<usize>> {
    linkage_by(points.len(), |i, j| (points[i] - points[j]).norm() <= tol)
}

/// Connected components of the graph on `0..n` with edges where `close`.
pub(crate) fn linkage_by(n: usize, close: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if close(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// True iff every root is real within `imag_tol` and the real parts are
/// pairwise more than `sep_tol` apart. Constants count as hyperbolic.
pub fn is_hyperbolic(p: &Polynomial, imag_tol: f64, sep_tol: f64) -> bool {
    if p.degree().unwrap_or(0) == 0 {
        return true;
    }
    let Ok(raw) = raw_roots(p) else {
        return false;
    };
    if raw.iter().any(|z| z.im.abs() > imag_tol) {
        return false;
    }
    let mut re: Vec<f64> = raw.iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    re.windows(2).all(|w| w[1] - w[0] > sep_tol)
}
