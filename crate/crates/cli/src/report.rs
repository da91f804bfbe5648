//! Command reports and their text, CSV and JSON renderings.

use std::fmt::Write as _;

use imkit_core::Tolerances;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::files::{Entry, KrausFile, MatrixRows};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<Output>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub kind: String,
    pub dims: Vec<usize>,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(path: &str, kind: &str, dims: Vec<usize>, bytes: &[u8]) -> Self {
        InputDigest {
            path: path.into(),
            kind: kind.into(),
            dims,
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Output {
    pub name: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Scalar(f64),
    Flag(bool),
    Text(String),
    Matrix(MatrixRows),
    Curve(Curve),
    Members(Vec<Member>),
    KrausSet(KrausFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub weight: f64,
    pub imaginarity: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conjugate_product: Option<f64>,
    pub amplitudes: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub library: String,
    pub version: String,
    pub tolerances: ToleranceRecord,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solver_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceRecord {
    pub herm: f64,
    pub trace: f64,
    pub norm: f64,
    pub psd: f64,
    pub rec: f64,
}

impl From<&Tolerances> for ToleranceRecord {
    fn from(t: &Tolerances) -> Self {
        ToleranceRecord {
            herm: t.herm,
            trace: t.trace,
            norm: t.norm,
            psd: t.psd,
            rec: t.rec,
        }
    }
}

impl Provenance {
    pub fn new(tol: &Tolerances, solver_gap: Option<f64>) -> Self {
        Provenance {
            library: "imkit-core".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            tolerances: tol.into(),
            solver_gap,
        }
    }
}

impl Report {
    pub fn new(command: &str, inputs: Vec<InputDigest>, provenance: Provenance) -> Self {
        Report {
            command: command.into(),
            inputs,
            outputs: Vec::new(),
            provenance,
        }
    }

    pub fn push(&mut self, name: &str, value: Value) {
        self.outputs.push(Output { name: name.into(), value });
    }

    pub fn scalar(&mut self, name: &str, x: f64) {
        self.push(name, Value::Scalar(x));
    }

    /// Name of the first output holding a non-finite number.
    pub fn first_non_finite(&self) -> Option<&str> {
        self.outputs.iter().find(|o| !value_finite(&o.value)).map(|o| o.name.as_str())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "command: {}", self.command).unwrap();
        for i in &self.inputs {
            writeln!(s, "input: {} ({}, dims {:?}, sha256 {})", i.path, i.kind, i.dims, &i.sha256[..16]).unwrap();
        }
        for o in &self.outputs {
            match &o.value {
                Value::Scalar(x) => writeln!(s, "{}: {}", o.name, format_scalar(*x)).unwrap(),
                Value::Flag(b) => writeln!(s, "{}: {}", o.name, b).unwrap(),
                Value::Text(t) => writeln!(s, "{}: {}", o.name, t).unwrap(),
                Value::Matrix(m) => {
                    writeln!(s, "{}:", o.name).unwrap();
                    write_rows(&mut s, m);
                }
                Value::Curve(c) => {
                    writeln!(s, "{}:", o.name).unwrap();
                    writeln!(s, "  {}", c.columns.iter().map(|h| format!("{h:>14}")).collect::<String>()).unwrap();
                    for r in &c.rows {
                        writeln!(s, "  {}", r.iter().map(|x| format!("{x:>14.9}")).collect::<String>()).unwrap();
                    }
                }
                Value::Members(ms) => {
                    writeln!(s, "{}: {} member(s)", o.name, ms.len()).unwrap();
                    for (k, m) in ms.iter().enumerate() {
                        write!(s, "  [{k}] weight {:.12}  imaginarity {:.12}", m.weight, m.imaginarity).unwrap();
                        if let Some(d) = m.conjugate_product {
                            write!(s, "  D {d:.12}").unwrap();
                        }
                        writeln!(s).unwrap();
                        writeln!(s, "      {}", format_entries(&m.amplitudes)).unwrap();
                    }
                }
                Value::KrausSet(k) => {
                    writeln!(s, "{}: {} operator(s), {}x{}, trace preserving {}", o.name, k.operators.len(), k.dims[0], k.dims[1], k.trace_preserving)
                        .unwrap();
                    for (j, op) in k.operators.iter().enumerate() {
                        writeln!(s, "  K{j}:").unwrap();
                        write_rows(&mut s, op);
                    }
                }
            }
        }
        let t = &self.provenance.tolerances;
        write!(
            s,
            "provenance: {} {} (tol herm {:e}, trace {:e}, norm {:e}, psd {:e}, rec {:e}",
            self.provenance.library, self.provenance.version, t.herm, t.trace, t.norm, t.psd, t.rec
        )
        .unwrap();
        if let Some(g) = self.provenance.solver_gap {
            write!(s, ", solver gap {g:e}").unwrap();
        }
        writeln!(s, ")").unwrap();
        s
    }

    /// Scalars as `name,value` rows, then each curve as a CSV table with a
    /// header row, separated by blank lines.
    pub fn to_csv(&self) -> String {
        let mut blocks = Vec::new();
        let scalars: Vec<String> = self
            .outputs
            .iter()
            .filter_map(|o| match &o.value {
                Value::Scalar(x) => Some(format!("{},{}", o.name, x)),
                Value::Flag(b) => Some(format!("{},{}", o.name, b)),
                Value::Text(t) => Some(format!("{},\"{}\"", o.name, t.replace('"', "\"\""))),
                _ => None,
            })
            .collect();
        if !scalars.is_empty() {
            blocks.push(format!("name,value\n{}\n", scalars.join("\n")));
        }
        for o in &self.outputs {
            match &o.value {
                Value::Curve(c) => {
                    let mut b = c.columns.join(",");
                    b.push('\n');
                    for r in &c.rows {
                        b.push_str(&r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
                        b.push('\n');
                    }
                    blocks.push(b);
                }
                Value::Members(ms) => {
                    let mut b = String::from("member,weight,imaginarity,conjugate_product\n");
                    for (k, m) in ms.iter().enumerate() {
                        let d = m.conjugate_product.map(|d| d.to_string()).unwrap_or_default();
                        writeln!(b, "{k},{},{},{d}", m.weight, m.imaginarity).unwrap();
                    }
                    blocks.push(b);
                }
                _ => {}
            }
        }
        blocks.join("\n")
    }
}

fn format_scalar(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e8) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn all_finite<'a>(xs: impl IntoIterator<Item = &'a f64>) -> bool {
    xs.into_iter().all(|x| x.is_finite())
}

fn entries_finite(rows: &MatrixRows) -> bool {
    all_finite(rows.iter().flatten().flatten())
}

fn value_finite(v: &Value) -> bool {
    match v {
        Value::Scalar(x) => x.is_finite(),
        Value::Matrix(m) => entries_finite(m),
        Value::Curve(c) => all_finite(c.rows.iter().flatten()),
        Value::Members(ms) => ms.iter().all(|m| {
            m.weight.is_finite()
                && m.imaginarity.is_finite()
                && m.conjugate_product.is_none_or(f64::is_finite)
                && all_finite(m.amplitudes.iter().flatten())
        }),
        Value::KrausSet(k) => k.operators.iter().all(entries_finite),
        Value::Flag(_) | Value::Text(_) => true,
    }
}

fn format_entry(e: &Entry) -> String {
    if e[1] >= 0.0 {
        format!("{:.9}+{:.9}i", e[0], e[1])
    } else {
        format!("{:.9}-{:.9}i", e[0], -e[1])
    }
}

fn format_entries(es: &[Entry]) -> String {
    es.iter().map(format_entry).collect::<Vec<_>>().join("  ")
}

fn write_rows(s: &mut String, rows: &MatrixRows) {
    for r in rows {
        writeln!(s, "    {}", format_entries(r)).unwrap();
    }
}
