//! Parameter files and tabular output.
//!
//! A parameter file is a JSON object with a `"form"` key and the fields of
//! that form:
//!
//! ```text
//! {"form": "canonical",   "gamma_L", "gamma_R", "alpha_L", "alpha_R", "b"}
//! {"form": "lienard",     "T_L", "D_L", "a_L", "T_R", "D_R", "a_R", "b"}
//! {"form": "equilibrium", "gamma_L", "gamma_R", "x_L", "x_R", "b", ["y_L", "y_R"]}
//! ```
//!
//! Values are JSON numbers or strings holding a decimal or a rational `"p/q"`.
//! The textual form of every value is kept for provenance.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;
use crate::params::{
    canonicalize, from_equilibrium, to_equilibrium, EquilibriumSpec, LienardSpec, SystemSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputForm {
    Canonical,
    Lienard,
    Equilibrium,
}

impl InputForm {
    fn fields(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            InputForm::Canonical => (&["gamma_L", "gamma_R", "alpha_L", "alpha_R", "b"], &[]),
            InputForm::Lienard => (&["T_L", "D_L", "a_L", "T_R", "D_R", "a_R", "b"], &[]),
            InputForm::Equilibrium => (&["gamma_L", "gamma_R", "x_L", "x_R", "b"], &["y_L", "y_R"]),
        }
    }
}

/// A parsed value together with its source text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Echoed {
    pub text: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParsedInput {
    pub form: InputForm,
    /// Field values exactly as written in the file.
    pub verbatim: BTreeMap<String, Echoed>,
    pub canonical: SystemSpec,
    /// Liénard form with unit frequencies unless that was the input form.
    pub lienard: LienardSpec,
    pub equilibrium: EquilibriumSpec,
    /// `y` translation applied to center the sliding segment (equilibrium input only).
    pub y_shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: ")?,
            (Some(l), None) => write!(f, "line {l}: ")?,
            _ => {}
        }
        if let Some(field) = &self.field {
            write!(f, "field `{field}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for InputError {}

fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines()
        .position(|l| l.contains(&needle))
        .map(|i| i + 1)
}

/// Parses a decimal or `p/q` string.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            if q == 0.0 {
                return None;
            }
            p / q
        }
        None => s.parse().ok()?,
    };
    v.is_finite().then_some(v)
}

pub fn parse_spec(text: &str) -> Result<ParsedInput, InputError> {
    let err = |field: Option<&str>, message: String| InputError {
        line: field.and_then(|f| line_of(text, f)),
        column: None,
        field: field.map(str::to_owned),
        message,
    };
    let root: Value = serde_json::from_str(text).map_err(|e| InputError {
        line: Some(e.line()),
        column: Some(e.column()),
        field: None,
        message: e.to_string(),
    })?;
    let Value::Object(obj) = root else {
        return Err(err(None, "expected a JSON object".into()));
    };
    let form = match obj.get("form") {
        Some(Value::String(s)) => match s.as_str() {
            "canonical" => InputForm::Canonical,
            "lienard" => InputForm::Lienard,
            "equilibrium" => InputForm::Equilibrium,
            other => {
                return Err(err(
                    Some("form"),
                    format!("unknown form `{other}` (expected canonical, lienard or equilibrium)"),
                ))
            }
        },
        Some(_) => return Err(err(Some("form"), "must be a string".into())),
        None => return Err(err(None, "missing `form`".into())),
    };
    let (required, optional) = form.fields();
    for key in obj.keys() {
        if key != "form" && !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
            return Err(err(Some(key), format!("not a field of the {form:?} form")));
        }
    }
    let mut verbatim = BTreeMap::new();
    for &key in required.iter().chain(optional) {
        let Some(v) = obj.get(key) else {
            if required.contains(&key) {
                return Err(err(None, format!("missing field `{key}`")));
            }
            continue;
        };
        let (text_form, value) = match v {
            Value::Number(n) => (n.to_string(), n.as_f64()),
            Value::String(s) => (s.clone(), parse_number(s)),
            _ => (v.to_string(), None),
        };
        let Some(value) = value.filter(|x| x.is_finite()) else {
            return Err(err(
                Some(key),
                format!("`{text_form}` is not a finite number or p/q rational"),
            ));
        };
        verbatim.insert(
            key.to_owned(),
            Echoed {
                text: text_form,
                value,
            },
        );
    }
    let get = |k: &str| verbatim.get(k).map(|e| e.value);
    let num = |k: &str| get(k).expect("required field present");

    let spec_err = |e: Error| err(None, e.to_string());
    let (canonical, lienard, equilibrium, y_shift) = match form {
        InputForm::Canonical => {
            let s = SystemSpec::new(
                num("gamma_L"),
                num("gamma_R"),
                num("alpha_L"),
                num("alpha_R"),
                num("b"),
            );
            (s, s.to_lienard(1.0, 1.0), to_equilibrium(&s), 0.0)
        }
        InputForm::Lienard => {
            let l = LienardSpec {
                t_l: num("T_L"),
                d_l: num("D_L"),
                a_l: num("a_L"),
                t_r: num("T_R"),
                d_r: num("D_R"),
                a_r: num("a_R"),
                b: num("b"),
            };
            let s = canonicalize(&l).map_err(spec_err)?;
            (s, l, to_equilibrium(&s), 0.0)
        }
        InputForm::Equilibrium => {
            let mut e = EquilibriumSpec::from_abscissas(
                num("gamma_L"),
                num("gamma_R"),
                num("x_L"),
                num("x_R"),
                num("b"),
            );
            if let Some(y) = get("y_L") {
                e.y_l = y;
            }
            if let Some(y) = get("y_R") {
                e.y_r = y;
            }
            let r = from_equilibrium(&e);
            (r.spec, r.spec.to_lienard(1.0, 1.0), e, r.shift)
        }
    };
    Ok(ParsedInput {
        form,
        verbatim,
        canonical,
        lienard,
        equilibrium,
        y_shift,
    })
}

pub fn read_spec(path: &Path) -> Result<ParsedInput, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError {
        line: None,
        column: None,
        field: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_spec(&text)
}

/// Writes `rows` under `header` as CSV. Floats use 17 significant digits.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<CsvCell>]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_io)?;
    for row in rows {
        w.write_record(row.iter().map(CsvCell::render))
            .map_err(csv_io)?;
    }
    w.flush()
}

/// Keeps the kind of underlying I/O errors (a closed pipe stays `BrokenPipe`).
fn csv_io(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::new(std::io::ErrorKind::Other, format!("{other:?}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CsvCell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl CsvCell {
    fn render(&self) -> String {
        match self {
            CsvCell::Num(v) => format!("{v:.16e}"),
            CsvCell::Int(v) => v.to_string(),
            CsvCell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for CsvCell {
    fn from(v: f64) -> Self {
        CsvCell::Num(v)
    }
}

impl From<&str> for CsvCell {
    fn from(v: &str) -> Self {
        CsvCell::Text(v.to_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_and_decimals() {
        assert_eq!(parse_number("1/8"), Some(0.125));
        assert_eq!(parse_number(" -65 / 64 "), Some(-65.0 / 64.0));
        assert_eq!(parse_number("0.25"), Some(0.25));
        assert_eq!(parse_number("1/0"), None);
        assert_eq!(parse_number("abc"), None);
    }

    #[test]
    fn canonical_form_with_rationals() {
        let p = parse_spec(
            r#"{"form": "canonical", "gamma_L": "-1/8", "gamma_R": "1/8",
                "alpha_L": "65/64", "alpha_R": 1.015625, "b": -0.25}"#,
        )
        .unwrap();
        assert_eq!(
            p.canonical,
            SystemSpec::new(-0.125, 0.125, 65.0 / 64.0, 65.0 / 64.0, -0.25)
        );
        assert_eq!(p.verbatim["gamma_L"].text, "-1/8");
    }

    #[test]
    fn equilibrium_form_derives_ordinates() {
        let p = parse_spec(
            r#"{"form": "equilibrium", "gamma_L": -0.125, "gamma_R": 0.125, "x_L": 1, "x_R": 1, "b": -0.25}"#,
        )
        .unwrap();
        assert_eq!(p.y_shift, 0.0);
        assert!((p.canonical.alpha_l - 65.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let e = parse_spec("{\"form\": \"canonical\",\n \"gamma_L\": \"x\",\n \"gamma_R\": 0, \"alpha_L\": 0, \"alpha_R\": 0, \"b\": 0}")
            .unwrap_err();
        assert_eq!(e.line, Some(2));
        assert_eq!(e.field.as_deref(), Some("gamma_L"));

        let e = parse_spec("{\"form\": \"canonical\",\n ").unwrap_err();
        assert!(e.line.is_some() && e.column.is_some());

        let e = parse_spec(r#"{"form": "canonical", "gamma_L": 0}"#).unwrap_err();
        assert!(e.message.contains("missing"));

        let e = parse_spec(r#"{"form": "lienard", "T_L": 3, "D_L": 1, "a_L": 0, "T_R": 0, "D_R": 1, "a_R": 0, "b": 0}"#)
            .unwrap_err();
        assert!(e.message.contains("focus"));
    }
}
