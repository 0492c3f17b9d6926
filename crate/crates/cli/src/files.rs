//! Operator and pairs files, and their deterministic JSON form.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};
use vanvleck_core::{Complex, Error as CoreError, LameOperator, Polynomial};

use crate::error::{io_err, CliError, Result};

/// A complex number as `[re, im]`.
pub type C = [f64; 2];

pub fn to_pair(z: Complex) -> C {
    [z.re, z.im]
}

pub fn from_pair(c: C) -> Complex {
    Complex::new(c[0], c[1])
}

pub fn coeff_list(p: &Polynomial) -> Vec<C> {
    p.coeffs().iter().map(|&z| to_pair(z)).collect()
}

pub fn polynomial(c: &[C]) -> Polynomial {
    Polynomial::new(c.iter().map(|&z| from_pair(z)).collect())
}

/// Seventeen significant digits: enough to round-trip every `f64`.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Pretty JSON with every float written by [`num`].
struct Fixed<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(num(value).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Fixed(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// `{"k": 2, "coefficients": {"1": [[re, im], ...], "2": [...]}, "label": ...}`
/// with ascending coefficient lists; omitted orders are zero.
#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub k: usize,
    pub coefficients: BTreeMap<usize, Vec<C>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl OperatorFile {
    pub fn from_operator(op: &LameOperator, label: Option<String>) -> Self {
        let coefficients = (1..=op.order())
            .filter(|&i| !op.q(i).is_zero())
            .map(|i| (i, coeff_list(op.q(i))))
            .collect();
        OperatorFile {
            k: op.order(),
            coefficients,
            label,
        }
    }

    /// The operator as written, without the Fuchs index checks.
    pub fn raw_operator(&self) -> std::result::Result<LameOperator, String> {
        if self.k == 0 {
            return Err("k must be at least 1".into());
        }
        if let Some(bad) = self.coefficients.keys().find(|&&i| i == 0 || i > self.k) {
            return Err(format!("derivative order {bad} outside 1..={}", self.k));
        }
        let q: Vec<Polynomial> = (1..=self.k)
            .map(|i| {
                self.coefficients
                    .get(&i)
                    .map_or_else(Polynomial::zero, |c| polynomial(c))
            })
            .collect();
        if q[self.k - 1].is_zero() {
            return Err(format!("Q_{} is missing or zero", self.k));
        }
        if q.iter().flat_map(|p| p.coeffs()).any(|z| !z.is_finite()) {
            return Err("non-finite coefficient".into());
        }
        LameOperator::new(q).map_err(|e| e.to_string())
    }

    /// Hex SHA-256 of the canonical coefficient text, so equal operators
    /// get equal digests however their files are spelled.
    pub fn digest(op: &LameOperator) -> String {
        let mut text = format!("k={}", op.order());
        for i in 1..=op.order() {
            text.push_str(&format!(";{i}:"));
            let parts: Vec<String> = op
                .q(i)
                .coeffs()
                .iter()
                .map(|z| format!("[{},{}]", num(z.re), num(z.im)))
                .collect();
            text.push_str(&parts.join(","));
        }
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// A parsed, non-degenerate operator and its monic normalization
/// `op = lead * monic`.
#[derive(Clone, Debug)]
pub struct ParsedOperator {
    pub file: OperatorFile,
    pub op: LameOperator,
    pub monic: LameOperator,
    pub lead: Complex,
    pub digest: String,
}

impl ParsedOperator {
    pub fn from_file(file: OperatorFile, path: &str) -> Result<Self> {
        let op = file
            .raw_operator()
            .map_err(|message| match message.starts_with('Q') {
                true => CliError::DegenerateOperator(message),
                false => CliError::Parse {
                    path: path.to_string(),
                    message,
                },
            })?;
        op.check_nondegenerate().map_err(|e| match e {
            CoreError::NegativeFuchsIndex(r) => CliError::NegativeFuchsIndex(r),
            CoreError::Degenerate {
                leading_degree,
                expected,
            } => CliError::DegenerateOperator(format!(
                "deg Q_{} = {leading_degree} but the Fuchs index {} needs {expected}",
                op.order(),
                op.fuchs_index()
            )),
            other => CliError::Core(other),
        })?;
        let (monic, lead) = op.normalized();
        let digest = OperatorFile::digest(&op);
        Ok(ParsedOperator {
            file,
            op,
            monic,
            lead,
            digest,
        })
    }
}

pub fn parse_operator(path: &Path) -> Result<ParsedOperator> {
    let file: OperatorFile = read_json(path)?;
    ParsedOperator::from_file(file, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct Tolerances {
    pub residual: f64,
    pub cluster: Option<f64>,
    pub resonance: f64,
    pub rank: f64,
    pub degree: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct Header {
    pub operator_digest: String,
    pub operator: OperatorFile,
    pub n: usize,
    pub r: usize,
    /// Leading coefficient of `Q_k`; the solve ran on the monic operator.
    pub normalization: C,
    pub nonresonant: bool,
    pub witnesses: Vec<usize>,
    pub count_with_multiplicity: usize,
    pub expected_count: u64,
    pub tolerances: Tolerances,
    pub solver_version: String,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct PairRecord {
    pub v: Vec<C>,
    pub s: Vec<C>,
    pub v_roots: Vec<C>,
    pub s_roots: Vec<C>,
    pub residual: f64,
    pub multiplicity: usize,
    pub family_dim: usize,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct PairsFile {
    pub header: Header,
    pub pairs: Vec<PairRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [
            0.1,
            -1.0 / 3.0,
            1e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            -0.0,
        ] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(-0.0), "0.0000000000000000e0");
    }

    #[test]
    fn floats_use_fixed_digits() {
        let text = to_json(&vec![[0.5, -2.0]]);
        assert!(text.contains("5.0000000000000000e-1"));
        assert!(text.contains("-2.0000000000000000e0"));
        let back: Vec<C> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![[0.5, -2.0]]);
    }
}
