//! Numerical checks of the root-location statements: hull containment, the
//! disk bound for large degrees, Cauchy transform estimates, reality and
//! interlacing in the classical case, coprimality and hyperbolicity
//! preservation.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operator::{build_classical, ClassicalSpec, LameOperator};
use crate::poly::{
    binomial, convex_hull, hull_distance, is_hyperbolic, roots, Complex, Polynomial,
};
use crate::solver::{SolveReport, SpectralPair};

/// Roots of a polynomial with repetition, each carrying mass `1/m`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCountingMeasure {
    points: Vec<Complex>,
}

impl RootCountingMeasure {
    pub fn new(points: Vec<Complex>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(RootCountingMeasure { points })
    }

    pub fn from_polynomial(p: &Polynomial) -> Result<Self> {
        Self::new(roots(p)?.expanded())
    }

    pub fn points(&self) -> &[Complex] {
        &self.points
    }

    /// `sum 1 / (m (z - z_j))` by direct summation.
    pub fn cauchy_transform(&self, z: Complex) -> Result<Complex> {
        let m = self.points.len() as f64;
        let mut sum = Complex::new(0.0, 0.0);
        for &p in &self.points {
            if z == p {
                return Err(Error::PoleAtPoint);
            }
            sum += Complex::new(1.0, 0.0) / (z - p);
        }
        Ok(sum / m)
    }
}

/// `P'(z) / (m P(z))` with `m = deg P`.
pub fn cauchy_transform(p: &Polynomial, z: Complex) -> Result<Complex> {
    let m = match p.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(Error::DegreeZero),
        Some(m) => m,
    };
    let (value, slope) = p.eval_with_derivative(z);
    if value.norm() <= 1e-14 * p.eval_abs(z) {
        return Err(Error::PoleAtPoint);
    }
    Ok(slope / (value * m as f64))
}

/// Both-sided estimate for a measure supported in the closed disk of radius
/// `r0` about `z0`: `1/(|z-z0|-r0) >= |C(z)| >= 1/(2|z-z0|)`.
pub fn cauchy_bounds_check(
    measure: &RootCountingMeasure,
    z0: Complex,
    r0: f64,
    z: Complex,
) -> Result<bool> {
    let slack = 1e-12 * (1.0 + r0);
    if measure.points.iter().any(|p| (p - z0).norm() > r0 + slack) {
        return Err(Error::SupportViolation { radius: r0 });
    }
    let d = (z - z0).norm();
    if d <= r0 {
        return Err(Error::InsideDisk);
    }
    let c = measure.cauchy_transform(z)?.norm();
    let upper = 1.0 / (d - r0);
    let lower = 1.0 / (2.0 * d);
    // Rounding slack only: for a point mass at z0 both sides are equalities.
    Ok(c <= upper * (1.0 + 1e-12) && c >= lower * (1.0 - 1e-12))
}

/// Quantities from the large-degree localization argument.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationBound {
    /// `|Q_k(z)| >= |z|^(k+r) / 2` for `|z| >= r`.
    pub r: f64,
    /// `|Q_i(z)| <= K |z|^(i+r)` for `|z| >= r`, `i < k`.
    pub k: f64,
    /// Degrees `n >= n0` satisfy every term bound.
    pub n0: usize,
    /// Roots of `V` and `S` lie in `|z| <= r0` once `n >= n0`.
    pub r0: f64,
}

const RING_SAMPLES: usize = 256;
const RING_SAFETY: f64 = 1.2;
const RING_RATIO: f64 = 1.05;

fn ring(radius: f64) -> impl Iterator<Item = Complex> {
    (0..RING_SAMPLES).map(move |j| {
        Complex::from_polar(
            radius,
            std::f64::consts::TAU * j as f64 / RING_SAMPLES as f64,
        )
    })
}

/// Smallest radius past which `|p(z)| >= |z|^m / 2` follows from the
/// triangle inequality alone (`p` monic of degree `m`).
fn tail_radius(p: &Polynomial, m: usize) -> f64 {
    let excess = |r: f64| {
        (0..m)
            .map(|i| p.coeff(i).norm() * r.powi(i as i32 - m as i32))
            .sum::<f64>()
    };
    let mut hi = 1.0;
    while excess(hi) > 0.5 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid > 0.0 && excess(mid) <= 0.5 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Radius `R`, growth constant `K`, degree threshold `N0` and disk radius
/// `R0` for a monic operator.
///
/// `R` is the smallest radius on a geometric grid from which every sampled
/// ring out to the triangle-inequality radius satisfies the leading-term
/// bound, times a safety factor. `K` is the sampled maximum on the ring of
/// radius `R`, which bounds the exterior by the maximum principle.
pub fn localization_bound(op: &LameOperator) -> Result<LocalizationBound> {
    op.check_nondegenerate()?;
    if !op.is_monic() {
        return Err(Error::NotMonic);
    }
    let k = op.order();
    let r = op.fuchs_index() as usize;
    let m = k + r;
    let lead = op.leading();
    let tail = tail_radius(lead, m).max(1.0);
    let holds =
        |radius: f64| ring(radius).all(|z| lead.eval(z).norm() >= 0.5 * radius.powi(m as i32));
    let mut grid = vec![tail];
    while *grid.last().unwrap() > 1.0 {
        let next = grid.last().unwrap() / RING_RATIO;
        grid.push(next.max(1.0));
        if next <= 1.0 {
            break;
        }
    }
    // Walk inward from the tail radius while every ring passes.
    let mut found = tail;
    for &radius in &grid {
        if !holds(radius) {
            break;
        }
        found = radius;
    }
    let big_r = RING_SAFETY * found;
    let mut big_k: f64 = 0.0;
    for i in 1..k {
        let q = op.q(i);
        let denom = big_r.powi((i + r) as i32);
        for z in ring(big_r) {
            big_k = big_k.max(q.eval(z).norm() / denom);
        }
    }
    let n0 = degree_threshold(big_k, k);
    Ok(LocalizationBound {
        r: big_r,
        k: big_k,
        n0,
        r0: big_r,
    })
}

/// True iff `K 2^(k-i+1) / ((n-i)...(n-k+1)) < 1/(k-1)` for all `1 <= i < k`.
pub fn term_bounds_hold(big_k: f64, k: usize, n: usize) -> bool {
    if k < 2 {
        return true;
    }
    (1..k).all(|i| {
        let falling: f64 = (i..k).map(|j| n as f64 - j as f64).product();
        falling > 0.0 && big_k * 2f64.powi((k - i + 1) as i32) / falling < 1.0 / (k - 1) as f64
    })
}

fn degree_threshold(big_k: f64, k: usize) -> usize {
    let mut n = k.max(1);
    while !term_bounds_hold(big_k, k, n) {
        n += 1;
    }
    n
}

/// Distances of the roots of one pair to `Conv(Q_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairHullDistances {
    pub v: Vec<f64>,
    pub s: Vec<f64>,
}

impl PairHullDistances {
    pub fn max(&self) -> f64 {
        self.v.iter().chain(&self.s).copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HullReport {
    pub pairs: Vec<PairHullDistances>,
    pub max_distance: f64,
    /// Number of roots farther than `eps` from the hull.
    pub beyond_eps: usize,
    /// Pairs whose roots of `S` come straight from its coefficients because
    /// root-form polishing failed; their distances are only as good as
    /// those coefficients.
    pub unpolished: usize,
}

fn roots_or_none(p: &Polynomial) -> Result<Vec<Complex>> {
    match p.degree() {
        None | Some(0) => Ok(Vec::new()),
        Some(_) => Ok(roots(p)?.expanded()),
    }
}

/// Elementary symmetric functions `e_0..=e_top` of `ws`.
fn elementary(ws: impl Iterator<Item = Complex>, top: usize) -> Vec<Complex> {
    let mut e = vec![Complex::new(0.0, 0.0); top + 1];
    e[0] = Complex::new(1.0, 0.0);
    for w in ws {
        for p in (1..=top).rev() {
            let below = e[p - 1];
            e[p] += w * below;
        }
    }
    e
}

/// `c_m = m! Q_m`, so that `d S / S' = sum c_m e_(m-1)(1/(z_i - z_j))` at
/// a root `z_i` of `S`.
fn root_weights(op: &LameOperator) -> Vec<Polynomial> {
    let mut fact = 1.0;
    (1..=op.order())
        .map(|m| {
            fact *= m as f64;
            op.q(m).scale(Complex::new(fact, 0.0))
        })
        .collect()
}

/// Newton's method on the root form of `d S + V S = 0`: at every root,
/// `sum_m m! Q_m(z_i) e_(m-1)(1/(z_i - z_j), j != i) = 0`. `V` drops out,
/// and the roots are far better conditioned here than as functions of the
/// coefficients of `S`.
fn refine_roots(op: &LameOperator, start: &[Complex]) -> Option<Vec<Complex>> {
    let n = start.len();
    let k = op.order();
    let c = root_weights(op);
    let dc: Vec<Polynomial> = c.iter().map(|p| p.derivative(1)).collect();
    let scale = 1.0 + start.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut z = start.to_vec();
    let mut last = f64::INFINITY;
    for _ in 0..50 {
        let mut f = nalgebra::DVector::<Complex>::zeros(n);
        let mut jac = nalgebra::DMatrix::<Complex>::zeros(n, n);
        for i in 0..n {
            let ws: Vec<Complex> = (0..n)
                .map(|j| {
                    if j == i {
                        Complex::new(0.0, 0.0)
                    } else {
                        Complex::new(1.0, 0.0) / (z[i] - z[j])
                    }
                })
                .collect();
            if ws.iter().any(|w| !w.is_finite()) {
                return None;
            }
            let e = elementary(ws.iter().copied(), k - 1);
            let cz: Vec<Complex> = c.iter().map(|p| p.eval(z[i])).collect();
            f[i] = (0..k).map(|m| cz[m] * e[m]).sum();
            let mut diag: Complex = (0..k).map(|m| dc[m].eval(z[i]) * e[m]).sum();
            for j in (0..n).filter(|&j| j != i) {
                let w = ws[j];
                // d e_p / d w_j = e_(p-1) of the others.
                let mut without = vec![Complex::new(0.0, 0.0); k];
                for p in 1..k {
                    without[p] = e[p - 1] - w * without[p - 1];
                }
                let df: Complex = (1..k).map(|m| cz[m] * without[m]).sum::<Complex>() * w * w;
                jac[(i, j)] = df;
                diag -= df;
            }
            jac[(i, i)] = diag;
        }
        let step = jac.lu().solve(&(-f))?;
        let size = step.iter().map(|d| d.norm()).fold(0.0, f64::max);
        if !size.is_finite() {
            return None;
        }
        // No root may move more than a third of the way to its neighbour.
        let mut damp: f64 = 1.0;
        for i in 0..n {
            let gap = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).norm())
                .fold(f64::INFINITY, f64::min);
            if step[i].norm() > gap / 3.0 {
                damp = damp.min(gap / (3.0 * step[i].norm()));
            }
        }
        for (zi, d) in z.iter_mut().zip(step.iter()) {
            *zi += d * damp;
        }
        let size = size * damp;
        // Quadratic convergence has stalled at rounding level.
        if size <= 1e-15 * scale || (size <= 1e-10 * scale && size >= 0.5 * last) {
            return Some(z);
        }
        last = size;
    }
    None
}

/// True iff `-d S / S`, evaluated through the roots away from them, agrees
/// with `V`.
fn roots_match_v(op: &LameOperator, v: &Polynomial, zs: &[Complex]) -> bool {
    let c = root_weights(op);
    let k = op.order();
    let radius = 2.0 * (1.0 + zs.iter().map(|z| z.norm()).fold(0.0, f64::max));
    (0..8).all(|t| {
        let at = Complex::from_polar(radius, 0.7 + std::f64::consts::TAU * t as f64 / 8.0);
        let e = elementary(zs.iter().map(|&w| Complex::new(1.0, 0.0) / (at - w)), k);
        let terms: Vec<Complex> = (0..k).map(|m| c[m].eval(at) * e[m + 1]).collect();
        let size = terms.iter().map(|t| t.norm()).sum::<f64>() + v.eval_abs(at);
        (terms.iter().sum::<Complex>() + v.eval(at)).norm() <= 1e-8 * size
    })
}

/// Roots of `S` with repetition and whether they were polished in root
/// form. Polished roots must still reproduce `V`; otherwise the plain roots
/// of the coefficients are returned.
pub fn stieltjes_roots(op: &LameOperator, pair: &SpectralPair) -> Result<(Vec<Complex>, bool)> {
    let plain = roots_or_none(&pair.s)?;
    if plain.is_empty() {
        return Ok((plain, true));
    }
    match refine_roots(op, &plain) {
        Some(z) if roots_match_v(op, &pair.v, &z) => Ok((z, true)),
        _ => Ok((plain, false)),
    }
}

pub fn hull_report(op: &LameOperator, pairs: &[SpectralPair], eps: f64) -> Result<HullReport> {
    let hull = convex_hull(&roots(op.leading())?.expanded())?;
    let mut out = Vec::with_capacity(pairs.len());
    let mut unpolished = 0;
    for pair in pairs {
        let dist = |zs: Vec<Complex>| {
            zs.into_iter()
                .map(|z| hull_distance(&hull, z))
                .collect::<Vec<_>>()
        };
        let (ss, polished) = stieltjes_roots(op, pair)?;
        unpolished += usize::from(!polished);
        out.push(PairHullDistances {
            v: dist(roots_or_none(&pair.v)?),
            s: dist(ss),
        });
    }
    let max_distance = out.iter().map(PairHullDistances::max).fold(0.0, f64::max);
    let beyond_eps = out
        .iter()
        .flat_map(|p| p.v.iter().chain(&p.s))
        .filter(|&&d| d > eps)
        .count();
    Ok(HullReport {
        pairs: out,
        max_distance,
        beyond_eps,
        unpolished,
    })
}

/// At every root `z_i` of `S`, `sum m_s/(z_i - xi_s) + sum beta_j/(z_i - alpha_j)`
/// with `xi_s` the roots of `S^(k-1)`; true iff each value is at most `tol`
/// relative to the sum of the moduli of its terms.
pub fn polya_identity_check(spec: &ClassicalSpec, pair: &SpectralPair, tol: f64) -> Result<bool> {
    let k = spec.k;
    let inner = pair.s.derivative(k - 1);
    if inner.is_zero() {
        return Err(Error::CoincidentRoots);
    }
    let xi = roots_or_none(&inner)?;
    // Newton steps on S itself: the identity is about S as given.
    let zs: Vec<Complex> = roots_or_none(&pair.s)?
        .into_iter()
        .map(|mut z| {
            for _ in 0..3 {
                let (f, d) = pair.s.eval_with_derivative(z);
                if d.norm() == 0.0 {
                    break;
                }
                z -= f / d;
            }
            z
        })
        .collect();
    let scale = 1.0
        + spec
            .alphas
            .iter()
            .chain(&zs)
            .map(|z| z.norm())
            .fold(0.0, f64::max);
    let near = 1e-10 * scale;
    for &z in &zs {
        let mut sum = Complex::new(0.0, 0.0);
        let mut size = 0.0;
        let terms = xi
            .iter()
            .map(|&x| (1.0, x))
            .chain(spec.betas.iter().copied().zip(spec.alphas.iter().copied()));
        for (w, a) in terms {
            if (z - a).norm() <= near {
                return Err(Error::CoincidentRoots);
            }
            let t = Complex::new(w, 0.0) / (z - a);
            sum += t;
            size += t.norm();
        }
        if sum.norm() > tol * size.max(f64::MIN_POSITIVE) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff no root of `V` lies within `tol` of a root of `S`.
pub fn coprimality_check(pair: &SpectralPair, tol: f64) -> bool {
    let (Ok(vs), Ok(ss)) = (roots_or_none(&pair.v), roots_or_none(&pair.s)) else {
        return false;
    };
    vs.iter().all(|v| ss.iter().all(|s| (v - s).norm() > tol))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalVerdict {
    /// Roots of `V` and `S` real within tolerance.
    pub all_real: bool,
    pub all_simple: bool,
    /// Every root of `S` in the open interval `(alpha_1, alpha_l)`.
    pub in_interval: bool,
    pub coprime: bool,
    /// Roots of `S` per interval `(alpha_i, alpha_{i+1})`.
    pub distribution: Vec<usize>,
    /// Roots of `S` per gap between consecutive roots of `V` (`l - k + 1`
    /// entries).
    pub arrangement: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalReport {
    pub verdicts: Vec<ClassicalVerdict>,
    /// Pairs realize pairwise distinct arrangements, `binom(n + l - k, n)`
    /// of them; for `k = 2` the interval distributions must be distinct too.
    pub bijective: bool,
    /// `k = 2` only: each distribution equals its arrangement.
    pub interval_match: Option<bool>,
}

impl ClassicalReport {
    pub fn all_pass(&self) -> bool {
        self.bijective
            && self.interval_match != Some(false)
            && self
                .verdicts
                .iter()
                .all(|v| v.all_real && v.all_simple && v.in_interval && v.coprime)
    }
}

fn check_classical(spec: &ClassicalSpec) -> Result<Vec<f64>> {
    if spec.k < 2 {
        return Err(Error::SpecViolation(format!("order {} below 2", spec.k)));
    }
    if spec.alphas.len() != spec.betas.len() {
        return Err(Error::LengthMismatch(spec.alphas.len(), spec.betas.len()));
    }
    if spec.alphas.len() < spec.k {
        return Err(Error::SpecViolation(format!(
            "{} points for order {}",
            spec.alphas.len(),
            spec.k
        )));
    }
    if spec.alphas.iter().any(|a| a.im != 0.0) {
        return Err(Error::SpecViolation("alpha not real".into()));
    }
    let alphas: Vec<f64> = spec.alphas.iter().map(|a| a.re).collect();
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::SpecViolation("alpha not strictly increasing".into()));
    }
    if let Some(b) = spec.betas.iter().find(|&&b| !(b > 0.0)) {
        return Err(Error::SpecViolation(format!("beta {b} not positive")));
    }
    Ok(alphas)
}

/// Occupancy of the gaps cut by sorted `cuts`; `inner` restricts to the
/// bounded gaps.
fn occupancy(xs: &[f64], cuts: &[f64], inner: bool) -> Vec<usize> {
    let mut counts = vec![0; cuts.len() + 1];
    for &x in xs {
        counts[cuts.partition_point(|&c| c < x)] += 1;
    }
    if inner {
        counts[1..cuts.len()].to_vec()
    } else {
        counts
    }
}

pub fn classical_verdict(spec: &ClassicalSpec, report: &SolveReport) -> Result<ClassicalReport> {
    let alphas = check_classical(spec)?;
    let (l, k, n) = (alphas.len(), spec.k, report.n);
    let width = alphas[l - 1] - alphas[0];
    let tol = 1e-6 * (1.0 + alphas.iter().map(|a| a.abs()).fold(width, f64::max));
    let mut verdicts = Vec::with_capacity(report.pairs.len());
    for pair in &report.pairs {
        let vs = roots_or_none(&pair.v)?;
        let op = build_classical(spec)?;
        let (s_expanded, _) = stieltjes_roots(&op, pair)?;
        let all_real = vs.iter().chain(&s_expanded).all(|z| z.im.abs() <= tol);
        let mut s_re: Vec<f64> = s_expanded.iter().map(|z| z.re).collect();
        s_re.sort_by(f64::total_cmp);
        let mut v_re: Vec<f64> = vs.iter().map(|z| z.re).collect();
        v_re.sort_by(f64::total_cmp);
        let separated = s_expanded
            .iter()
            .enumerate()
            .all(|(i, a)| s_expanded[..i].iter().all(|b| (a - b).norm() > tol));
        let all_simple = pair.multiplicity == 1 && separated;
        let in_interval = s_expanded
            .iter()
            .all(|z| z.re > alphas[0] && z.re < alphas[l - 1]);
        verdicts.push(ClassicalVerdict {
            all_real,
            all_simple,
            in_interval,
            coprime: coprimality_check(pair, tol),
            distribution: occupancy(&s_re, &alphas, true),
            arrangement: if s_re.is_empty() {
                vec![0; l - k + 1]
            } else {
                occupancy(&s_re, &v_re, false)
            },
        });
    }
    let distinct = |key: &dyn Fn(&ClassicalVerdict) -> &Vec<usize>| {
        let mut seen: Vec<&Vec<usize>> = verdicts.iter().map(key).collect();
        seen.sort();
        seen.dedup();
        seen.len() == verdicts.len()
    };
    let expected = binomial((n + l - k) as u64, n as u64);
    let mut bijective = verdicts.len() as u128 == expected
        && verdicts.iter().all(|v| v.arrangement.len() == l - k + 1)
        && distinct(&|v| &v.arrangement);
    if k == 2 {
        bijective &= distinct(&|v| &v.distribution);
    }
    let interval_match = (k == 2).then(|| verdicts.iter().all(|v| v.distribution == v.arrangement));
    Ok(ClassicalReport {
        verdicts,
        bijective,
        interval_match,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum HyperbolicityVerdict {
    NoCounterexampleFound(usize),
    Counterexample {
        trial: usize,
        input: Polynomial,
        image: Polynomial,
    },
}

/// Window for the random real roots.
pub const SAMPLE_WINDOW: f64 = 4.0;
const MIN_GAP: f64 = 1e-2;

fn random_real_rooted(rng: &mut ChaCha8Rng, degree: usize) -> Polynomial {
    loop {
        let mut xs: Vec<f64> = (0..degree)
            .map(|_| rng.random_range(-SAMPLE_WINDOW..SAMPLE_WINDOW))
            .collect();
        xs.sort_by(f64::total_cmp);
        if xs.windows(2).all(|w| w[1] - w[0] > MIN_GAP) {
            let zs: Vec<Complex> = xs.into_iter().map(|x| Complex::new(x, 0.0)).collect();
            return Polynomial::from_roots(&zs);
        }
    }
}

/// Applies `op` to random monic polynomials with simple real roots in
/// `[-SAMPLE_WINDOW, SAMPLE_WINDOW]` and reports the first image that is
/// not real-rooted with simple roots.
pub fn hyperbolicity_preserver_sample(
    op: &LameOperator,
    trials: usize,
    degrees: RangeInclusive<usize>,
    seed: u64,
) -> HyperbolicityVerdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let degree = rng.random_range(degrees.clone());
        let input = random_real_rooted(&mut rng, degree);
        let image = op.apply(&input);
        if image.is_zero() {
            continue;
        }
        if !is_hyperbolic(&image, 1e-7 * (1.0 + SAMPLE_WINDOW), 1e-9) {
            return HyperbolicityVerdict::Counterexample {
                trial,
                input,
                image,
            };
        }
    }
    HyperbolicityVerdict::NoCounterexampleFound(trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::build_classical;
    use crate::solver::solve;
    use crate::SolveOptions;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn pair(v: &[f64], s: &[f64]) -> SpectralPair {
        SpectralPair {
            v: Polynomial::from_real(v),
            s: Polynomial::from_real(s),
            residual: 0.0,
            multiplicity: 1,
            degree: s.len() - 1,
            family_dim: 1,
        }
    }

    #[test]
    fn transform_of_power_and_difference_of_squares() {
        for m in 1..8 {
            let p = Polynomial::monomial(c(1.0, 0.0), m);
            assert!((cauchy_transform(&p, c(2.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        }
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        assert!((cauchy_transform(&p, c(3.0, 0.0)).unwrap() - c(0.375, 0.0)).norm() < 1e-15);
        assert_eq!(cauchy_transform(&p, c(1.0, 0.0)), Err(Error::PoleAtPoint));
    }

    #[test]
    fn point_mass_bounds_are_equalities_on_top() {
        let mu = RootCountingMeasure::new(vec![c(0.5, 0.5)]).unwrap();
        assert!(cauchy_bounds_check(&mu, c(0.5, 0.5), 0.0, c(3.0, -1.0)).unwrap());
        assert!(cauchy_bounds_check(&mu, c(0.5, 0.5), 0.1, c(3.0, -1.0)).unwrap());
    }

    #[test]
    fn bounds_check_contracts() {
        let mu = RootCountingMeasure::new(vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(
            cauchy_bounds_check(&mu, c(0.0, 0.0), 0.5, c(3.0, 0.0)),
            Err(Error::SupportViolation { radius: 0.5 })
        );
        assert_eq!(
            cauchy_bounds_check(&mu, c(0.0, 0.0), 1.0, c(0.5, 0.0)),
            Err(Error::InsideDisk)
        );
    }

    #[test]
    fn localization_of_pure_power_uses_floor() {
        let op = LameOperator::new(vec![Polynomial::monomial(c(1.0, 0.0), 2)]).unwrap();
        let b = localization_bound(&op).unwrap();
        assert_eq!(b.k, 0.0);
        assert_eq!(b.n0, 1);
        assert!((b.r0 - RING_SAFETY).abs() < 1e-12);
    }

    #[test]
    fn localization_requires_monic() {
        let op = LameOperator::new(vec![Polynomial::from_real(&[0.0, 0.0, 2.0])]).unwrap();
        assert_eq!(localization_bound(&op), Err(Error::NotMonic));
    }

    #[test]
    fn radius_encloses_leading_roots() {
        let lead = Polynomial::from_roots(&[c(0.0, 1.0), c(0.0, -1.0), c(2.0, 3.0), c(3.0, -2.0)]);
        let op = LameOperator::new(vec![Polynomial::zero(), Polynomial::zero(), lead]).unwrap();
        let b = localization_bound(&op).unwrap();
        assert!(b.r0 > 13f64.sqrt());
        assert!(term_bounds_hold(b.k, 3, b.n0));
    }

    #[test]
    fn threshold_is_minimal() {
        for (big_k, k) in [(0.3, 2), (5.0, 3), (40.0, 4)] {
            let n0 = degree_threshold(big_k, k);
            assert!(term_bounds_hold(big_k, k, n0));
            assert!(n0 == k || !term_bounds_hold(big_k, k, n0 - 1));
        }
    }

    fn hand_spec() -> ClassicalSpec {
        ClassicalSpec::real(&[-1.0, 0.0, 1.0], &[0.5, 0.5, 0.5], 2)
    }

    #[test]
    fn hand_example_identity_and_coprimality() {
        let s0 = 1.0 / 3f64.sqrt();
        let good = pair(&[1.5 * s0, -1.5], &[s0, 1.0]);
        assert!(polya_identity_check(&hand_spec(), &good, 1e-12).unwrap());
        assert!(coprimality_check(&good, 1e-8));
        let wrong = pair(&[1.5 * s0, -1.5], &[0.2, 1.0]);
        assert!(!polya_identity_check(&hand_spec(), &wrong, 1e-6).unwrap());
        let shared = pair(&[-0.3, 1.0], &[-0.3, 1.0]);
        assert!(!coprimality_check(&shared, 1e-8));
    }

    #[test]
    fn identity_rejects_root_on_pole() {
        let at_alpha = pair(&[0.0, 1.0], &[0.0, 1.0]);
        assert_eq!(
            polya_identity_check(&hand_spec(), &at_alpha, 1e-6),
            Err(Error::CoincidentRoots)
        );
    }

    #[test]
    fn three_point_verdicts() {
        let spec = ClassicalSpec::real(&[-1.0, 0.0, 1.0], &[1.0, 1.0, 1.0], 2);
        let op = build_classical(&spec).unwrap();
        for (n, mut want) in [
            (1, vec![vec![0, 1], vec![1, 0]]),
            (2, vec![vec![0, 2], vec![1, 1], vec![2, 0]]),
        ] {
            let rep = solve(&op, n, &SolveOptions::default()).unwrap();
            let out = classical_verdict(&spec, &rep).unwrap();
            assert!(out.all_pass(), "{out:?}");
            let mut got: Vec<_> = out
                .verdicts
                .iter()
                .map(|v| v.distribution.clone())
                .collect();
            got.sort();
            want.sort();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn verdict_contracts() {
        let rep = SolveReport {
            n: 0,
            r: 1,
            nonresonant: true,
            witnesses: vec![],
            pairs: vec![],
            count_with_multiplicity: 0,
            expected_count: 1,
        };
        let zero_beta = ClassicalSpec::real(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0], 2);
        assert!(matches!(
            classical_verdict(&zero_beta, &rep),
            Err(Error::SpecViolation(_))
        ));
        let unsorted = ClassicalSpec::real(&[0.0, -1.0, 1.0], &[1.0, 1.0, 1.0], 2);
        assert!(matches!(
            classical_verdict(&unsorted, &rep),
            Err(Error::SpecViolation(_))
        ));
    }

    #[test]
    fn occupancy_counts() {
        assert_eq!(
            occupancy(&[-0.5, 0.2, 0.7], &[-1.0, 0.0, 1.0], true),
            vec![1, 2]
        );
        assert_eq!(occupancy(&[-0.5, 0.2, 0.7], &[0.5], false), vec![2, 1]);
    }

    #[test]
    fn derivative_preserves_hyperbolicity() {
        let d = LameOperator::new(vec![Polynomial::constant(c(1.0, 0.0))]).unwrap();
        assert_eq!(
            hyperbolicity_preserver_sample(&d, 2000, 1..=8, 7),
            HyperbolicityVerdict::NoCounterexampleFound(2000)
        );
    }

    #[test]
    fn shifted_operator_breaks_hyperbolicity() {
        let op = LameOperator::new(vec![
            Polynomial::from_real(&[1.0]),
            Polynomial::from_real(&[0.0, 1.0, 1.0]),
        ])
        .unwrap();
        match hyperbolicity_preserver_sample(&op, 10_000, 1..=6, 1) {
            HyperbolicityVerdict::Counterexample { input, image, .. } => {
                assert!(is_hyperbolic(&input, 1e-9, 1e-3));
                assert!(!is_hyperbolic(&image, 1e-6, 1e-9));
            }
            v => panic!("{v:?}"),
        }
    }
}
