//! The `solve`, `verify`, `emit-roots`, `count` and `transform-infinity`
//! commands, separated from argument parsing so tests can drive them.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use vanvleck_core::analysis::{
    classical_verdict, coprimality_check, hull_report, localization_bound, polya_identity_check,
    stieltjes_roots,
};
use vanvleck_core::poly::{binomial, roots};
use vanvleck_core::solver::{relative_residual, sweep_levels};
use vanvleck_core::{
    build_classical, solve, ClassicalSpec, Complex, Error as CoreError, LameOperator, Polynomial,
    SolveOptions, SolveReport, SpectralPair,
};

use crate::error::{CliError, Result};
use crate::files::{
    coeff_list, from_pair, num, parse_operator, polynomial, read_json, to_json, to_pair,
    write_text, Header, OperatorFile, PairRecord, PairsFile, ParsedOperator, Tolerances, C,
};
use crate::transform::invert_variable;

pub const SOLVER_VERSION: &str = concat!("vanvleck ", env!("CARGO_PKG_VERSION"));

fn cmp_c(a: &Complex, b: &Complex) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn cmp_coeffs(a: &[C], b: &[C]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| cmp_c(&from_pair(*x), &from_pair(*y)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

fn sorted_pairs(mut zs: Vec<Complex>) -> Vec<C> {
    zs.sort_by(cmp_c);
    zs.into_iter().map(to_pair).collect()
}

fn plain_roots(p: &Polynomial) -> Result<Vec<Complex>> {
    match p.degree() {
        Some(d) if d > 0 => Ok(roots(p)?.expanded()),
        _ => Ok(Vec::new()),
    }
}

/// Solves level `n` on the monic operator and writes `V` back in the
/// caller's scale, so `op S + V S = 0` holds for the operator as given.
pub fn solve_pairs(parsed: &ParsedOperator, n: usize, opts: &SolveOptions) -> Result<PairsFile> {
    let report = solve(&parsed.monic, n, opts)?;
    let mut pairs = Vec::with_capacity(report.pairs.len());
    for p in &report.pairs {
        let v = p.v.scale(parsed.lead);
        let (s_roots, _) = stieltjes_roots(&parsed.monic, p)?;
        pairs.push(PairRecord {
            residual: relative_residual(&parsed.op, &v, &p.s),
            v_roots: sorted_pairs(plain_roots(&v)?),
            s_roots: sorted_pairs(s_roots),
            v: coeff_list(&v),
            s: coeff_list(&p.s),
            multiplicity: p.multiplicity,
            family_dim: p.family_dim,
        });
    }
    pairs.sort_by(|a, b| cmp_coeffs(&a.v, &b.v).then_with(|| cmp_coeffs(&a.s, &b.s)));
    Ok(PairsFile {
        header: Header {
            operator_digest: parsed.digest.clone(),
            operator: parsed.file.clone(),
            n: report.n,
            r: report.r,
            normalization: to_pair(parsed.lead),
            nonresonant: report.nonresonant,
            witnesses: report.witnesses.clone(),
            count_with_multiplicity: report.count_with_multiplicity,
            expected_count: report.expected_count as u64,
            tolerances: Tolerances {
                residual: opts.residual_tol,
                cluster: opts.cluster_tol,
                resonance: opts.resonance_tol,
                rank: opts.rank_tol,
                degree: opts.degree_tol,
            },
            solver_version: SOLVER_VERSION.to_string(),
        },
        pairs,
    })
}

/// Writes the pairs file. A resonant level is still written, then reported
/// as an error so the exit status says the count is not guaranteed.
pub fn cmd_solve(operator: &Path, n: usize, opts: &SolveOptions, out: &Path) -> Result<PairsFile> {
    let parsed = parse_operator(operator)?;
    let file = solve_pairs(&parsed, n, opts)?;
    write_text(out, &to_json(&file))?;
    if let Some(&index) = file.header.witnesses.first() {
        return Err(CliError::Core(CoreError::Resonance { level: n, index }));
    }
    Ok(file)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Count,
    Residual,
    Hull,
    Disk,
    Classical,
    Coprime,
    Polya,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Count,
        Check::Residual,
        Check::Hull,
        Check::Disk,
        Check::Classical,
        Check::Coprime,
        Check::Polya,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Count => "count",
            Check::Residual => "residual",
            Check::Hull => "hull",
            Check::Disk => "disk",
            Check::Classical => "classical",
            Check::Coprime => "coprime",
            Check::Polya => "polya",
        }
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown check `{s}`"))
    }
}

/// `all` or a comma-separated list of check names.
pub fn parse_checks(list: &str) -> std::result::Result<Vec<Check>, String> {
    if list.trim() == "all" {
        return Ok(Check::ALL.to_vec());
    }
    list.split(',').map(|s| s.trim().parse()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: Check,
    pub outcome: Outcome,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skipped => "SKIP",
        };
        write!(f, "{tag} {:<9} {}", self.check.name(), self.detail)
    }
}

fn result(check: Check, ok: bool, detail: String) -> CheckResult {
    let outcome = if ok { Outcome::Pass } else { Outcome::Fail };
    CheckResult {
        check,
        outcome,
        detail,
    }
}

fn skipped(check: Check, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        check,
        outcome: Outcome::Skipped,
        detail: detail.into(),
    }
}

/// The classical data behind a monic operator, if it has the form
/// `prod (z - alpha_j) d^k + sum beta_j prod_{i != j} (z - alpha_i) d^(k-1)`
/// with distinct `alpha_j` and positive `beta_j`.
pub fn classical_spec(monic: &LameOperator) -> Option<ClassicalSpec> {
    if !monic.is_classical_form() {
        return None;
    }
    let k = monic.order();
    let top = monic.leading();
    let rs = roots(top).ok()?;
    if rs.total_multiplicity() != rs.len() {
        return None;
    }
    let mut alphas = rs.expanded();
    alphas.sort_by(cmp_c);
    let scale = 1.0 + alphas.iter().map(|a| a.norm()).fold(0.0, f64::max);
    for a in &mut alphas {
        if a.im.abs() <= 1e-12 * scale {
            a.im = 0.0;
        }
    }
    let dtop = top.derivative(1);
    let mut betas = Vec::with_capacity(alphas.len());
    for &a in &alphas {
        let b = monic.q(k - 1).eval(a) / dtop.eval(a);
        if b.re <= 0.0 || b.im.abs() > 1e-9 * b.norm() {
            return None;
        }
        betas.push(b.re);
    }
    let spec = ClassicalSpec::new(alphas, betas, k);
    let rebuilt = build_classical(&spec).ok()?;
    let close = (1..=k)
        .all(|i| rebuilt.q(i).distance_max(monic.q(i)) <= 1e-9 * (1.0 + monic.q(i).norm_max()));
    close.then_some(spec)
}

fn monic_pairs(file: &PairsFile, lead: Complex) -> Vec<SpectralPair> {
    file.pairs
        .iter()
        .map(|p| SpectralPair {
            v: polynomial(&p.v).scale(Complex::new(1.0, 0.0) / lead),
            s: polynomial(&p.s),
            residual: p.residual,
            multiplicity: p.multiplicity,
            degree: file.header.n,
            family_dim: p.family_dim,
        })
        .collect()
}

fn check_count(file: &PairsFile) -> CheckResult {
    let h = &file.header;
    let n = h.n;
    let total: usize = file.pairs.iter().map(|p| p.multiplicity).sum();
    let degrees_ok = file
        .pairs
        .iter()
        .all(|p| polynomial(&p.s).degree() == Some(n));
    let expected = binomial((n + h.r) as u64, h.r as u64);
    if !degrees_ok {
        return result(Check::Count, false, format!("a record has deg S != {n}"));
    }
    if total != h.count_with_multiplicity {
        return result(
            Check::Count,
            false,
            format!(
                "records sum to {total}, header says {}",
                h.count_with_multiplicity
            ),
        );
    }
    if !h.nonresonant {
        return skipped(
            Check::Count,
            format!(
                "level {n} is resonant (witnesses {:?}); found {total}",
                h.witnesses
            ),
        );
    }
    result(
        Check::Count,
        total as u128 == expected,
        format!(
            "{total} with multiplicity, expected binom({}, {}) = {expected}",
            n + h.r,
            h.r
        ),
    )
}

fn check_residual(parsed: &ParsedOperator, file: &PairsFile) -> CheckResult {
    let tol = file.header.tolerances.residual;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (i, p) in file.pairs.iter().enumerate() {
        let got = relative_residual(&parsed.op, &polynomial(&p.v), &polynomial(&p.s));
        worst = worst.max(got);
        if !(got <= tol && got <= 2.0 * p.residual.max(1e-15)) {
            bad.push(i);
        }
    }
    result(
        Check::Residual,
        bad.is_empty(),
        format!(
            "max recomputed {} (tol {}); failing records {bad:?}",
            num(worst),
            num(tol)
        ),
    )
}

fn check_hull(parsed: &ParsedOperator, pairs: &[SpectralPair]) -> Result<CheckResult> {
    const EPS: f64 = 1e-6;
    let rep = hull_report(&parsed.monic, pairs, EPS)?;
    Ok(result(
        Check::Hull,
        rep.beyond_eps == 0,
        format!(
            "max distance to Conv(Q_k) {}; {} roots beyond {EPS:e}",
            num(rep.max_distance),
            rep.beyond_eps
        ),
    ))
}

fn check_disk(parsed: &ParsedOperator, file: &PairsFile) -> Result<CheckResult> {
    let bound = match localization_bound(&parsed.monic) {
        Ok(b) => b,
        Err(e) => return Ok(skipped(Check::Disk, e.to_string())),
    };
    let n = file.header.n;
    if n < bound.n0 {
        return Ok(skipped(
            Check::Disk,
            format!("n = {n} is below the threshold {}", bound.n0),
        ));
    }
    let max = file
        .pairs
        .iter()
        .flat_map(|p| p.v_roots.iter().chain(&p.s_roots))
        .map(|&z| from_pair(z).norm())
        .fold(0.0, f64::max);
    Ok(result(
        Check::Disk,
        max <= bound.r0,
        format!("max |root| {} against R0 = {}", num(max), num(bound.r0)),
    ))
}

fn solve_report(file: &PairsFile, pairs: Vec<SpectralPair>) -> SolveReport {
    let h = &file.header;
    SolveReport {
        n: h.n,
        r: h.r,
        nonresonant: h.nonresonant,
        witnesses: h.witnesses.clone(),
        pairs,
        count_with_multiplicity: h.count_with_multiplicity,
        expected_count: h.expected_count as u128,
    }
}

fn check_classical(
    spec: Option<&ClassicalSpec>,
    file: &PairsFile,
    pairs: &[SpectralPair],
) -> Result<CheckResult> {
    let Some(spec) = spec else {
        return Ok(skipped(
            Check::Classical,
            "operator is not of classical form",
        ));
    };
    if spec.alphas.iter().any(|a| a.im != 0.0) || spec.alphas.len() < spec.k {
        return Ok(skipped(
            Check::Classical,
            "needs real singular points, at least k of them",
        ));
    }
    let rep = classical_verdict(spec, &solve_report(file, pairs.to_vec()))?;
    let failing: Vec<usize> = rep
        .verdicts
        .iter()
        .enumerate()
        .filter(|(_, v)| !(v.all_real && v.all_simple && v.in_interval && v.coprime))
        .map(|(i, _)| i)
        .collect();
    Ok(result(
        Check::Classical,
        rep.all_pass(),
        format!(
            "{} pairs; failing records {failing:?}; arrangements exhaustive: {}",
            rep.verdicts.len(),
            rep.bijective
        ),
    ))
}

fn check_coprime(spec: Option<&ClassicalSpec>, pairs: &[SpectralPair]) -> CheckResult {
    if spec.is_none() {
        return skipped(Check::Coprime, "operator is not of classical form");
    }
    let bad: Vec<usize> = (0..pairs.len())
        .filter(|&i| !coprimality_check(&pairs[i], 1e-8))
        .collect();
    result(
        Check::Coprime,
        bad.is_empty(),
        format!("{} pairs; sharing a root: {bad:?}", pairs.len()),
    )
}

fn check_polya(spec: Option<&ClassicalSpec>, pairs: &[SpectralPair]) -> Result<CheckResult> {
    const TOL: f64 = 1e-6;
    let Some(spec) = spec else {
        return Ok(skipped(Check::Polya, "operator is not of classical form"));
    };
    let mut bad = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        match polya_identity_check(spec, p, TOL) {
            Ok(true) => {}
            Ok(false) | Err(CoreError::CoincidentRoots) => bad.push(i),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(result(
        Check::Polya,
        bad.is_empty(),
        format!(
            "{} pairs at relative tolerance {TOL:e}; failing records {bad:?}",
            pairs.len()
        ),
    ))
}

/// Runs the requested checks against a pairs file computed for `parsed`.
pub fn verify(
    parsed: &ParsedOperator,
    file: &PairsFile,
    checks: &[Check],
) -> Result<Vec<CheckResult>> {
    if file.header.operator_digest != parsed.digest {
        return Err(CliError::DigestMismatch {
            expected: parsed.digest.clone(),
            found: file.header.operator_digest.clone(),
        });
    }
    let pairs = monic_pairs(file, parsed.lead);
    let spec = classical_spec(&parsed.monic);
    let mut out = Vec::with_capacity(checks.len());
    for &check in checks {
        out.push(match check {
            Check::Count => check_count(file),
            Check::Residual => check_residual(parsed, file),
            Check::Hull => check_hull(parsed, &pairs)?,
            Check::Disk => check_disk(parsed, file)?,
            Check::Classical => check_classical(spec.as_ref(), file, &pairs)?,
            Check::Coprime => check_coprime(spec.as_ref(), &pairs),
            Check::Polya => check_polya(spec.as_ref(), &pairs)?,
        });
    }
    Ok(out)
}

pub fn cmd_verify(operator: &Path, pairs: &Path, checks: &[Check]) -> Result<Vec<CheckResult>> {
    let parsed = parse_operator(operator)?;
    let file: PairsFile = read_json(pairs)?;
    verify(&parsed, &file, checks)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RootKind {
    Q,
    V,
    S,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootRow {
    pub pair_index: i64,
    pub kind: RootKind,
    pub re: f64,
    pub im: f64,
}

/// Roots of `Q_k` once (only when there are pairs), then `V` and `S` roots
/// of each record in file order.
pub fn root_rows(file: &PairsFile) -> Result<Vec<RootRow>> {
    let mut rows = Vec::new();
    if file.pairs.is_empty() {
        return Ok(rows);
    }
    let k = file.header.operator.k;
    let top = file
        .header
        .operator
        .coefficients
        .get(&k)
        .map(|c| polynomial(c))
        .ok_or_else(|| CliError::DegenerateOperator(format!("Q_{k} is missing")))?;
    let row = |pair_index: i64, kind: RootKind, z: C| RootRow {
        pair_index,
        kind,
        re: z[0],
        im: z[1],
    };
    for z in sorted_pairs(plain_roots(&top)?) {
        rows.push(row(-1, RootKind::Q, z));
    }
    for (i, p) in file.pairs.iter().enumerate() {
        rows.extend(p.v_roots.iter().map(|&z| row(i as i64, RootKind::V, z)));
        rows.extend(p.s_roots.iter().map(|&z| row(i as i64, RootKind::S, z)));
    }
    Ok(rows)
}

pub fn roots_csv(rows: &[RootRow]) -> String {
    let mut out = String::from("pair_index,kind,re,im\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:?},{},{}\n",
            r.pair_index,
            r.kind,
            num(r.re),
            num(r.im)
        ));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootFormat {
    Csv,
    Json,
}

impl FromStr for RootFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(RootFormat::Csv),
            "json" => Ok(RootFormat::Json),
            _ => Err(format!("unknown format `{s}` (csv or json)")),
        }
    }
}

pub fn cmd_emit_roots(pairs: &Path, format: RootFormat, out: &Path) -> Result<usize> {
    let file: PairsFile = read_json(pairs)?;
    let rows = root_rows(&file)?;
    let text = match format {
        RootFormat::Csv => roots_csv(&rows),
        RootFormat::Json => to_json(&rows),
    };
    write_text(out, &text)?;
    Ok(rows.len())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCount {
    pub level: usize,
    pub nonresonant: bool,
    pub witnesses: Vec<usize>,
    pub distinct: usize,
    pub with_multiplicity: usize,
    pub expected: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountTable {
    pub r: usize,
    pub n_max: usize,
    pub levels: Vec<LevelCount>,
    pub total: usize,
    pub expected_total: u64,
}

impl CountTable {
    /// Every level solved without resonance and the total matches.
    pub fn matches(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.nonresonant && l.error.is_none())
            && self.total as u64 == self.expected_total
    }
}

impl fmt::Display for CountTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "level  distinct  with-multiplicity  expected  note")?;
        for l in &self.levels {
            let note = match (&l.error, l.nonresonant) {
                (Some(e), _) => e.clone(),
                (None, false) => "resonant".to_string(),
                (None, true) => String::new(),
            };
            writeln!(
                f,
                "{:>5}  {:>8}  {:>17}  {:>8}  {note}",
                l.level, l.distinct, l.with_multiplicity, l.expected
            )?;
        }
        let r = self.r;
        write!(
            f,
            "total {} against binom({}, {}) = {}",
            self.total,
            self.n_max + r + 1,
            r + 1,
            self.expected_total
        )
    }
}

/// Solves every level `0..=n_max`, keeping resonant and failed levels in
/// the table instead of stopping at the first one.
pub fn count_levels(
    parsed: &ParsedOperator,
    n_max: usize,
    opts: &SolveOptions,
) -> Result<(CountTable, Option<CoreError>)> {
    let r = parsed.op.fuchs_index();
    if r > 2 {
        return Err(CoreError::UnsupportedFuchsIndex(r).into());
    }
    let r = r as usize;
    let mut first_error = None;
    let mut levels = Vec::with_capacity(n_max + 1);
    for (m, rep) in sweep_levels(&parsed.monic, n_max, opts)
        .into_iter()
        .enumerate()
    {
        let expected = binomial((m + r) as u64, r as u64) as u64;
        levels.push(match rep {
            Ok(rep) => LevelCount {
                level: m,
                nonresonant: rep.nonresonant,
                witnesses: rep.witnesses.clone(),
                distinct: rep.pairs.len(),
                with_multiplicity: rep.count_with_multiplicity,
                expected,
                error: None,
            },
            Err(e) => {
                let row = LevelCount {
                    level: m,
                    nonresonant: !matches!(e, CoreError::Resonance { .. }),
                    witnesses: match &e {
                        CoreError::Resonance { index, .. } => vec![*index],
                        _ => Vec::new(),
                    },
                    distinct: 0,
                    with_multiplicity: 0,
                    expected,
                    error: Some(e.to_string()),
                };
                first_error.get_or_insert(CoreError::Level {
                    level: m,
                    source: Box::new(e),
                });
                row
            }
        });
    }
    let table = CountTable {
        r,
        n_max,
        total: levels.iter().map(|l| l.with_multiplicity).sum(),
        expected_total: binomial((n_max + r + 1) as u64, (r + 1) as u64) as u64,
        levels,
    };
    Ok((table, first_error))
}

pub fn cmd_count(
    operator: &Path,
    n_max: usize,
    opts: &SolveOptions,
) -> Result<(CountTable, Option<CoreError>)> {
    count_levels(&parse_operator(operator)?, n_max, opts)
}

/// Rewrites an operator with negative Fuchs index in `y = 1/z`.
pub fn transform_file(file: &OperatorFile) -> Result<OperatorFile> {
    let op = file.raw_operator().map_err(CliError::DegenerateOperator)?;
    let r = op.fuchs_index();
    if r >= 0 {
        return Err(CliError::AlreadyNonNegative(r));
    }
    let label = Some(match &file.label {
        Some(l) => format!("{l} (y = 1/z)"),
        None => "y = 1/z".to_string(),
    });
    Ok(OperatorFile::from_operator(&invert_variable(&op), label))
}

pub fn cmd_transform_infinity(operator: &Path, out: &Path) -> Result<OperatorFile> {
    let file: OperatorFile = read_json(operator)?;
    let t = transform_file(&file)?;
    write_text(out, &to_json(&t))?;
    Ok(t)
}
