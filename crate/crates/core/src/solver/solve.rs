use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::LameOperator;
use crate::pencil::{build_action_matrix, left_kernel, level_count, pencil_at, DEFAULT_RANK_TOL};
use crate::poly::{
    default_cluster_tol, linkage_by, raw_roots, single_linkage, Complex, Polynomial, ZERO,
};

use super::eliminate::{
    back_substitute_tol, eliminate_scaled, resonance_check, ReducedSystem, DEFAULT_RESONANCE_TOL,
    DEFAULT_TERM_BOUND,
};
use super::homotopy::{conditioning, deflated_newton, polish, track_all, PathEnd, Reduced};

/// Tolerances and limits for [`solve`].
#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Bound on `|d S + V S| / (|op| |S|)` (max-coefficient norms).
    pub residual_tol: f64,
    /// Cluster radius in the scaled reduced variables; `None` picks
    /// `1e-6 (1 + max |root|)`.
    pub cluster_tol: Option<f64>,
    pub resonance_tol: f64,
    pub rank_tol: f64,
    /// A kernel vector has degree `n` when `|s_n| >= degree_tol * max |s_p|`.
    pub degree_tol: f64,
    pub term_bound: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            residual_tol: 1e-8,
            cluster_tol: None,
            resonance_tol: DEFAULT_RESONANCE_TOL,
            rank_tol: DEFAULT_RANK_TOL,
            degree_tol: 1e-8,
            term_bound: DEFAULT_TERM_BOUND,
        }
    }
}

/// A Van Vleck polynomial `V` with its Stieltjes polynomial `S` (monic, of
/// degree exactly `degree`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPair {
    pub v: Polynomial,
    pub s: Polynomial,
    pub residual: f64,
    pub multiplicity: usize,
    pub degree: usize,
    /// Dimension of the left kernel at `V`; above 1 the pair is one member
    /// of a linear family of Stieltjes polynomials.
    pub family_dim: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub n: usize,
    pub r: usize,
    pub nonresonant: bool,
    pub witnesses: Vec<usize>,
    pub pairs: Vec<SpectralPair>,
    pub count_with_multiplicity: usize,
    pub expected_count: u128,
}

/// `|d S + V S|_max / (|op|_max |S|_max)`.
pub fn relative_residual(op: &LameOperator, v: &Polynomial, s: &Polynomial) -> f64 {
    let res = &op.apply(s) + &(v * s);
    let scale = op.norm_max() * s.norm_max();
    if scale == 0.0 {
        return f64::INFINITY;
    }
    res.norm_max() / scale
}

/// Coordinates `z = center + radius w` in which the roots of `Q_k` fill the
/// unit disk. Solving there keeps the monomial basis well conditioned.
#[derive(Clone, Debug)]
struct Frame {
    center: Complex,
    radius: f64,
    op: LameOperator,
}

impl Frame {
    fn new(op: &LameOperator) -> Result<Frame> {
        let roots = raw_roots(op.leading())?;
        let center = roots.iter().sum::<Complex>() / roots.len() as f64;
        let mut radius = roots
            .iter()
            .map(|z| (z - center).norm())
            .fold(0.0, f64::max);
        if radius < 1e-3 * (1.0 + center.norm()) {
            radius = 1.0;
        }
        Ok(Frame {
            center,
            radius,
            op: op.affine_pullback(center, radius),
        })
    }

    /// `p((z - center) / radius)`.
    fn push_forward(&self, p: &Polynomial) -> Polynomial {
        p.rescale_argument(Complex::new(1.0 / self.radius, 0.0))
            .translated(-self.center)
    }
}

/// `V` from `v_r` and the tail `(v_{r-1}, ..., v_0)`.
fn assemble_v(vr: Complex, tail: &[Complex]) -> Polynomial {
    let r = tail.len();
    let mut c = vec![ZERO; r + 1];
    c[r] = vr;
    for (i, &t) in tail.iter().enumerate() {
        c[r - 1 - i] = t;
    }
    Polynomial::new(c)
}

/// Newton's method on the square system in `(s_0..s_{n-1}, v_0..v_{r-1})`
/// with `s_n = 1` and `v_r` held fixed. Steps are kept only while the
/// relative residual decreases.
pub(crate) fn newton_polish(
    op: &LameOperator,
    n: usize,
    r: usize,
    v: &Polynomial,
    s: &Polynomial,
    iterations: usize,
) -> (Polynomial, Polynomial, f64) {
    let mut v = v.clone();
    let mut s = s.clone();
    let mut res = relative_residual(op, &v, &s);
    let m = n + r;
    if m == 0 {
        return (v, s, res);
    }
    let table: Vec<Vec<Complex>> = (0..n)
        .map(|p| (0..m).map(|q| op.action_coefficient(p, q)).collect())
        .collect();
    for _ in 0..iterations {
        if res <= 1e-15 {
            break;
        }
        let f = &op.apply(&s) + &(&v * &s);
        let mut jac = DMatrix::<Complex>::zeros(m, m);
        for p in 0..n {
            for q in 0..m {
                let mut e = table[p][q];
                if q >= p && q - p <= r {
                    e += v.coeff(q - p);
                }
                jac[(q, p)] = e;
            }
        }
        for j in 0..r {
            for q in j..m.min(j + n + 1) {
                jac[(q, n + j)] = s.coeff(q - j);
            }
        }
        let rhs = nalgebra::DVector::from_fn(m, |q, _| -f.coeff(q));
        let Some(delta) = jac.lu().solve(&rhs) else {
            break;
        };
        if delta.iter().any(|d| !d.re.is_finite() || !d.im.is_finite()) {
            break;
        }
        let mut sc: Vec<Complex> = (0..=n).map(|p| s.coeff(p)).collect();
        for p in 0..n {
            sc[p] += delta[p];
        }
        let mut vc: Vec<Complex> = (0..=r).map(|j| v.coeff(j)).collect();
        for j in 0..r {
            vc[j] += delta[n + j];
        }
        let (v2, s2) = (Polynomial::new(vc), Polynomial::new(sc));
        let res2 = relative_residual(op, &v2, &s2);
        if res2 < res {
            v = v2;
            s = s2;
            res = res2;
        } else {
            break;
        }
    }
    (v, s, res)
}

fn checked_r(op: &LameOperator) -> Result<usize> {
    op.check_nondegenerate()?;
    let r = op.fuchs_index();
    Ok(r as usize)
}

/// Largest modulus of a root of `Q_k`, at least 1; used to balance pencils.
fn balance_radius(op: &LameOperator) -> f64 {
    raw_roots(op.leading())
        .map(|rts| rts.iter().map(|z| z.norm()).fold(1.0, f64::max))
        .unwrap_or(1.0)
}

/// Checks a candidate Van Vleck polynomial through the pencil: the left
/// kernel must be nontrivial and contain a member of degree exactly `n`.
pub fn validate_pair(
    op: &LameOperator,
    v: &Polynomial,
    n: usize,
    opts: &SolveOptions,
) -> Result<SpectralPair> {
    let r = checked_r(op)?;
    let base = build_action_matrix(op, n)?;
    let point = pencil_at(&base, v)?;
    let rho = balance_radius(op);
    let kernel = left_kernel(&point.balanced(rho), opts.rank_tol)?;
    // The unit combination with the largest top coefficient.
    let mut best = vec![ZERO; n + 1];
    for k in &kernel {
        let w = k.coeff(n).conj();
        for (p, b) in best.iter_mut().enumerate() {
            *b += w * k.coeff(p);
        }
    }
    let balanced = Polynomial::new(best);
    let top = balanced.coeff(n).norm();
    if balanced.is_zero() || top < opts.degree_tol * balanced.norm_max() {
        let deg = kernel
            .iter()
            .filter_map(|k| {
                let tol = opts.degree_tol * k.norm_max();
                (0..=n).rev().find(|&p| k.coeff(p).norm() >= tol)
            })
            .max()
            .unwrap_or(0);
        return Err(Error::DegreeDeficient(deg));
    }
    let s = balanced
        .rescale_argument(Complex::new(1.0 / rho, 0.0))
        .monic();
    let family_dim = kernel.len();
    let mut pair_v = v.clone();
    let mut pair_s = s;
    let mut residual = relative_residual(op, &pair_v, &pair_s);
    if residual > opts.residual_tol && family_dim == 1 {
        let (pv, ps, pr) = newton_polish(op, n, r, &pair_v, &pair_s, 6);
        pair_v = pv;
        pair_s = ps;
        residual = pr;
    }
    if residual > opts.residual_tol {
        return Err(Error::SpuriousRoot {
            root: v.coeff(0),
            residual,
        });
    }
    Ok(SpectralPair {
        v: pair_v,
        s: pair_s,
        residual,
        multiplicity: 1,
        degree: n,
        family_dim,
    })
}

/// A candidate in frame coordinates: the tail `(v_{r-1}, ..., v_0)` and the
/// cluster size it stands for.
struct Candidate {
    tail: Vec<Complex>,
    multiplicity: usize,
}

fn cluster_candidates(raw: &[Complex], tol: Option<f64>) -> Vec<(Complex, usize)> {
    let tol = tol.unwrap_or_else(|| default_cluster_tol(raw));
    single_linkage(raw, tol)
        .into_iter()
        .map(|g| {
            let centroid = g.iter().map(|&i| raw[i]).sum::<Complex>() / g.len() as f64;
            (centroid, g.len())
        })
        .collect()
}

/// Scale of the reduced variables: `|L_n|` in frame coordinates.
fn variable_scale(op: &LameOperator, n: usize) -> f64 {
    let l = op.diagonal_coefficient(n).norm();
    if l > 0.0 {
        l
    } else {
        1.0
    }
}

fn candidates_r1(sys: &ReducedSystem, cluster_tol: Option<f64>) -> Result<Vec<Candidate>> {
    let f = sys.equations[0].to_univariate();
    let raw = raw_roots(&f)?;
    Ok(cluster_candidates(&raw, cluster_tol)
        .into_iter()
        .map(|(x, m)| Candidate {
            tail: vec![x * sys.scale],
            multiplicity: m,
        })
        .collect())
}

/// One new solution per lost path, by deflated Newton from the lost
/// paths' last points and small offsets around them. Lost paths usually
/// belong to a tight cluster of regular solutions that the endgame could
/// not separate; `None` if any of them stays missing.
fn recover_lost(
    red: &Reduced,
    known: &[[Complex; 2]],
    lost: &[[Complex; 2]],
    tol: f64,
) -> Option<Vec<[Complex; 2]>> {
    let mut starts = Vec::new();
    for &p in lost {
        starts.push(p);
        let size = 1.0 + p[0].norm() + p[1].norm();
        for rho in [1e-3, 1e-2] {
            for i in 0..6 {
                let w = Complex::from_polar(rho * size, std::f64::consts::TAU * i as f64 / 6.0);
                starts.push([p[0] + w, p[1] - w * Complex::new(0.6, 0.8)]);
            }
        }
    }
    let mut all = known.to_vec();
    let mut extra = Vec::new();
    let mut progress = true;
    while extra.len() < lost.len() && progress {
        progress = false;
        for &start in &starts {
            if extra.len() == lost.len() {
                break;
            }
            let Some(x) = deflated_newton(red, start, &all) else {
                continue;
            };
            let fresh = all
                .iter()
                .all(|k| (k[0] - x[0]).norm().max((k[1] - x[1]).norm()) > tol);
            if fresh {
                all.push(x);
                extra.push(x);
                progress = true;
            }
        }
    }
    (extra.len() == lost.len()).then_some(extra)
}

fn candidates_r2(
    fop: &LameOperator,
    n: usize,
    scale: f64,
    cluster_tol: Option<f64>,
) -> Result<Vec<Candidate>> {
    let red = Reduced::new(fop, n, vec![scale, scale]);
    // Retry with another gamma and shorter steps if paths fail or jump.
    let attempts = [(0.93, 0.05), (2.41, 0.02), (4.07, 0.005)];
    for (angle, max_step) in attempts {
        let paths = track_all(&red, Complex::from_polar(1.0, angle), max_step);
        let mut ends = Vec::with_capacity(paths.len());
        let mut lost = Vec::new();
        for p in paths {
            match p {
                PathEnd::Solution(x) if conditioning(&red, &x) > 1e-6 => ends.push(polish(&red, x)),
                PathEnd::Solution(x) => ends.push(x),
                PathEnd::Lost(x) => lost.push(x),
            }
        }
        let size = ends
            .iter()
            .map(|x| x[0].norm().max(x[1].norm()))
            .fold(0.0, f64::max);
        let tol = cluster_tol.unwrap_or(1e-6 * (1.0 + size));
        let groups = linkage_by(ends.len(), |i, j| {
            (ends[i][0] - ends[j][0])
                .norm()
                .max((ends[i][1] - ends[j][1]).norm())
                <= tol
        });
        let mut points = Vec::with_capacity(groups.len() + lost.len());
        let mut mults = Vec::with_capacity(groups.len() + lost.len());
        let mut jumped = false;
        for g in groups {
            let m = g.len() as f64;
            let x = [
                g.iter().map(|&i| ends[i][0]).sum::<Complex>() / m,
                g.iter().map(|&i| ends[i][1]).sum::<Complex>() / m,
            ];
            // Several paths on a regular solution means a path jumped.
            if g.len() > 1 && conditioning(&red, &x) > 1e-6 {
                jumped = true;
                break;
            }
            points.push(x);
            mults.push(g.len());
        }
        if jumped {
            continue;
        }
        if !lost.is_empty() {
            let Some(extra) = recover_lost(&red, &points, &lost, tol) else {
                continue;
            };
            mults.extend(std::iter::repeat_n(1, extra.len()));
            points.extend(extra);
        }
        return Ok(points
            .into_iter()
            .zip(mults)
            .map(|(x, m)| Candidate {
                tail: vec![x[0] * red.scales()[0], x[1] * red.scales()[1]],
                multiplicity: m,
            })
            .collect());
    }
    Err(Error::RootFindingFailure {
        degree: level_count(n, 2) as usize,
        coeffs: Vec::new(),
    })
}

/// Turns a frame candidate into a pair for the original operator.
fn finish_candidate(
    original: &LameOperator,
    frame: &Frame,
    n: usize,
    r: usize,
    cand: &Candidate,
    opts: &SolveOptions,
) -> Result<SpectralPair> {
    let fop = &frame.op;
    let ln_frame = fop.diagonal_coefficient(n);
    let mut fv = assemble_v(-ln_frame, &cand.tail);
    let mut fs = back_substitute_tol(fop, n, &cand.tail, opts.resonance_tol)?;
    if cand.multiplicity == 1 {
        let (pv, ps, _) = newton_polish(fop, n, r, &fv, &fs, 8);
        fv = pv;
        fs = ps;
    }
    let mut v = frame.push_forward(&fv);
    let mut vc: Vec<Complex> = (0..=r).map(|j| v.coeff(j)).collect();
    vc[r] = -original.diagonal_coefficient(n);
    v = Polynomial::new(vc);
    let s = frame.push_forward(&fs).monic();
    let (v, s, residual) = if cand.multiplicity == 1 {
        newton_polish(original, n, r, &v, &s, 8)
    } else {
        let res = relative_residual(original, &v, &s);
        (v, s, res)
    };
    if residual > opts.residual_tol {
        return Err(Error::SpuriousRoot {
            root: cand.tail.last().copied().unwrap_or(ZERO),
            residual,
        });
    }
    Ok(SpectralPair {
        v,
        s,
        residual,
        multiplicity: cand.multiplicity,
        degree: n,
        family_dim: 1,
    })
}

fn sort_pairs(pairs: &mut [SpectralPair]) {
    pairs.sort_by(|a, b| {
        let r = a.v.coeffs().len().max(b.v.coeffs().len());
        for j in 0..r {
            let (x, y) = (a.v.coeff(j), b.v.coeff(j));
            let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
            if o != std::cmp::Ordering::Equal {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    });
}

/// Distinct simple pairs must not have converged onto each other.
fn check_distinct(pairs: &[SpectralPair], scale: f64, tol: f64) -> Result<()> {
    for (i, a) in pairs.iter().enumerate() {
        for b in &pairs[i + 1..] {
            if a.v.distance_max(&b.v) <= tol * scale {
                return Err(Error::CountMismatch {
                    expected: pairs.len(),
                    found: pairs.len() - 1,
                });
            }
        }
    }
    Ok(())
}

fn report(n: usize, r: usize, witnesses: Vec<usize>, mut pairs: Vec<SpectralPair>) -> SolveReport {
    sort_pairs(&mut pairs);
    SolveReport {
        n,
        r,
        nonresonant: witnesses.is_empty(),
        witnesses,
        count_with_multiplicity: pairs.iter().map(|p| p.multiplicity).sum(),
        pairs,
        expected_count: level_count(n, r),
    }
}

fn solve_nonresonant(
    op: &LameOperator,
    n: usize,
    r: usize,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let frame = Frame::new(op)?;
    let scale = variable_scale(&frame.op, n);
    let cands = match r {
        0 => vec![Candidate {
            tail: Vec::new(),
            multiplicity: 1,
        }],
        1 => {
            let sys = eliminate_scaled(&frame.op, n, scale, opts.term_bound)?;
            candidates_r1(&sys, opts.cluster_tol)?
        }
        2 => {
            resonance_check(&frame.op, n, opts.resonance_tol)?;
            candidates_r2(&frame.op, n, scale, opts.cluster_tol)?
        }
        _ => return Err(Error::UnsupportedFuchsIndex(r as i64)),
    };
    let pairs = cands
        .iter()
        .map(|c| finish_candidate(op, &frame, n, r, c, opts))
        .collect::<Result<Vec<_>>>()?;
    let expected = level_count(n, r) as usize;
    let found: usize = pairs.iter().map(|p| p.multiplicity).sum();
    if found != expected {
        return Err(Error::CountMismatch { expected, found });
    }
    let v_scale = 1.0 + op.diagonal_coefficient(n).norm();
    let tol = opts.cluster_tol.unwrap_or(1e-6);
    check_distinct(&pairs, v_scale, tol.min(1e-6))?;
    Ok(report(n, r, Vec::new(), pairs))
}

/// Resonant levels: `v_r = -L_n` is still forced, the remaining unknowns are
/// scanned (`r = 0`: none; `r = 1`: eigenvalues of the square part of the
/// pencil) and every candidate goes through [`validate_pair`].
fn solve_resonant(
    op: &LameOperator,
    n: usize,
    r: usize,
    witnesses: Vec<usize>,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let ln = op.diagonal_coefficient(n);
    let cands: Vec<(Polynomial, usize)> = match r {
        0 => vec![(Polynomial::constant(-ln), 1)],
        1 => {
            let frame = Frame::new(op)?;
            let fop = &frame.op;
            let fln = fop.diagonal_coefficient(n);
            let scale = variable_scale(fop, n);
            // Column z^{n+1} vanishes once v_1 = -L_n; what is left is
            // s^T B = -v_0 s^T.
            let b = DMatrix::from_fn(n + 1, n + 1, |p, q| {
                let mut e = fop.action_coefficient(p, q);
                if q == p + 1 {
                    e -= fln;
                }
                e / scale
            });
            let schur = nalgebra::linalg::Schur::try_new(b, f64::EPSILON, 10_000).ok_or(
                Error::RootFindingFailure {
                    degree: n + 1,
                    coeffs: Vec::new(),
                },
            )?;
            let t = schur.unpack().1;
            let eig: Vec<Complex> = (0..=n).map(|i| -t[(i, i)]).collect();
            cluster_candidates(&eig, opts.cluster_tol)
                .into_iter()
                .map(|(x, m)| {
                    let fv = assemble_v(-fln, &[x * scale]);
                    let mut v = frame.push_forward(&fv);
                    let mut vc: Vec<Complex> = (0..=1).map(|j| v.coeff(j)).collect();
                    vc[1] = -ln;
                    v = Polynomial::new(vc);
                    (v, m)
                })
                .collect()
        }
        _ => {
            return Err(Error::Resonance {
                level: n,
                index: witnesses[0],
            })
        }
    };
    let mut pairs = Vec::new();
    for (v, m) in cands {
        match validate_pair(op, &v, n, opts) {
            Ok(mut pair) => {
                pair.multiplicity = m;
                pairs.push(pair);
            }
            Err(Error::FullRank | Error::DegreeDeficient(_) | Error::SpuriousRoot { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(report(n, r, witnesses, pairs))
}

/// All pairs `(V, S)` with `deg S = n` exactly.
///
/// Nonresonant levels go through elimination (`r <= 2`); resonant levels
/// with `r <= 1` fall back to a pencil scan, which reports what it finds
/// without a count guarantee.
pub fn solve(op: &LameOperator, n: usize, opts: &SolveOptions) -> Result<SolveReport> {
    let r = checked_r(op)?;
    if r > 2 {
        return Err(Error::UnsupportedFuchsIndex(r as i64));
    }
    let check = op.nonresonance(n, opts.resonance_tol);
    if check.holds {
        solve_nonresonant(op, n, r, opts)
    } else {
        solve_resonant(op, n, r, check.witnesses, opts)
    }
}

fn require_r(op: &LameOperator, r: usize) -> Result<()> {
    let actual = checked_r(op)?;
    if actual != r {
        return Err(Error::UnsupportedFuchsIndex(actual as i64));
    }
    Ok(())
}

/// `r = 0`: a single constant `V = -L_n`.
pub fn solve_r0(op: &LameOperator, n: usize, opts: &SolveOptions) -> Result<SolveReport> {
    require_r(op, 0)?;
    solve(op, n, opts)
}

/// `r = 1`: `n + 1` pairs counted with multiplicity.
pub fn solve_r1(op: &LameOperator, n: usize, opts: &SolveOptions) -> Result<SolveReport> {
    require_r(op, 1)?;
    solve(op, n, opts)
}

/// `r = 2`: `binom(n + 2, 2)` pairs counted with multiplicity.
pub fn solve_r2(op: &LameOperator, n: usize, opts: &SolveOptions) -> Result<SolveReport> {
    require_r(op, 2)?;
    solve(op, n, opts)
}

/// Per-level counts from a sweep over `0..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub r: usize,
    pub levels: Vec<SolveReport>,
    pub total: usize,
    /// `binom(n_max + r + 1, r + 1)`.
    pub expected_total: u128,
}

/// Solves every level and sums the counts. Fails on the first resonant or
/// unsolvable level.
pub fn sweep_total(op: &LameOperator, n_max: usize, opts: &SolveOptions) -> Result<Sweep> {
    let r = checked_r(op)?;
    let mut levels = Vec::with_capacity(n_max + 1);
    for m in 0..=n_max {
        let check = op.nonresonance(m, opts.resonance_tol);
        if let Some(&index) = check.witnesses.first() {
            return Err(Error::Level {
                level: m,
                source: Box::new(Error::Resonance { level: m, index }),
            });
        }
        let rep = solve(op, m, opts).map_err(|e| Error::Level {
            level: m,
            source: Box::new(e),
        })?;
        levels.push(rep);
    }
    let total = levels.iter().map(|l| l.count_with_multiplicity).sum();
    Ok(Sweep {
        r,
        levels,
        total,
        expected_total: crate::pencil::total_count(n_max, r),
    })
}

/// Like [`sweep_total`] but keeps going past failing levels.
pub fn sweep_levels(
    op: &LameOperator,
    n_max: usize,
    opts: &SolveOptions,
) -> Vec<Result<SolveReport>> {
    (0..=n_max).map(|m| solve(op, m, opts)).collect()
}

/// Sum of the multiplicities with which `v` shows up on levels `0..=n_max`.
pub fn natural_multiplicity(
    op: &LameOperator,
    v: &Polynomial,
    n_max: usize,
    opts: &SolveOptions,
) -> usize {
    let tol = 1e-8 * (1.0 + v.norm_max());
    sweep_levels(op, n_max, opts)
        .into_iter()
        .flatten()
        .flat_map(|rep| rep.pairs)
        .filter(|p| p.v.distance_max(v) <= tol)
        .map(|p| p.multiplicity)
        .sum()
}
