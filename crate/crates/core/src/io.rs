//! File formats: point-set JSON, simplex JSON and CSV distance matrices.
//!
//! Point sets:
//! `{"weights": ["1/8", …], "points": [{"id": "w0", "values": ["0", "1", …]}, …]}`,
//! with `weights` optional (counting measure). Simplices:
//! `{"point_set": <path or inline point set>, "left": [{"point": "id", "weight": "3/2"}, …], "right": […]}`.
//! Rationals are written as strings; bare JSON integers are accepted on input.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, DistanceMatrix, Exponent, FunctionSet};
use crate::numerics::rational::{format_rational, parse_rational, pow, small_integer, Rational, RationalText};
use crate::numerics::SymmetricMatrix;
use crate::simplex::{Simplex, Vertex};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetDoc {
    #[serde(default)]
    weights: Option<Vec<RationalText>>,
    points: Vec<PointDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    id: String,
    values: Vec<RationalText>,
}

#[derive(Serialize)]
struct PointSetOut<'a> {
    weights: Vec<String>,
    points: Vec<PointOut<'a>>,
}

#[derive(Serialize)]
struct PointOut<'a> {
    id: &'a str,
    values: Vec<String>,
}

fn parse_at(text: &RationalText, context: impl FnOnce() -> String) -> Result<Rational> {
    text.parse().map_err(|e| Error::format(context(), e))
}

impl PointSetDoc {
    pub fn into_point_set(self, source: &str) -> Result<FunctionSet> {
        if self.points.is_empty() {
            return Err(Error::format(source, "points: list is empty"));
        }
        let atoms = self.points[0].values.len();
        let measure = match &self.weights {
            Some(ws) => {
                let weights = ws
                    .iter()
                    .enumerate()
                    .map(|(i, w)| parse_at(w, || format!("{source}: weights[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                AtomicMeasure::new(weights).map_err(|e| Error::format(format!("{source}: weights"), e))?
            }
            None => AtomicMeasure::counting(atoms).map_err(|e| Error::format(format!("{source}: points[0].values"), e))?,
        };
        let mut labels = Vec::with_capacity(self.points.len());
        let mut values = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            if p.values.len() != measure.atoms() {
                return Err(Error::format(
                    format!("{source}: points[{i}].values"),
                    format!("{} values, expected {} (one per atom)", p.values.len(), measure.atoms()),
                ));
            }
            let row = p
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| parse_at(v, || format!("{source}: points[{i}].values[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            labels.push(p.id.clone());
            values.push(row);
        }
        FunctionSet::new(measure, labels, values).map_err(|e| Error::format(source, e))
    }
}

pub fn point_set_from_str(text: &str, source: &str) -> Result<FunctionSet> {
    let doc: PointSetDoc = serde_json::from_str(text).map_err(|e| Error::format(source, e))?;
    doc.into_point_set(source)
}

pub fn read_point_set(path: &Path) -> Result<FunctionSet> {
    point_set_from_str(&read_text(path)?, &path.display().to_string())
}

/// Canonical JSON: weights always present, rationals in lowest terms,
/// two-space indentation and a trailing newline.
pub fn point_set_to_json(set: &FunctionSet) -> String {
    let out = PointSetOut {
        weights: set.measure().weights().iter().map(format_rational).collect(),
        points: set
            .labels()
            .iter()
            .zip(set.values())
            .map(|(id, row)| PointOut {
                id,
                values: row.iter().map(format_rational).collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&out).expect("plain data serializes");
    text.push('\n');
    text
}

pub fn write_point_set(set: &FunctionSet, path: &Path) -> Result<()> {
    write_text(path, &point_set_to_json(set))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PointSetRef {
    Path(String),
    Inline(PointSetDoc),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimplexDoc {
    point_set: PointSetRef,
    left: Vec<VertexDoc>,
    right: Vec<VertexDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    point: String,
    weight: RationalText,
}

/// Parses a simplex document. A `point_set` given as a path is resolved
/// against `base_dir`.
pub fn simplex_from_str(text: &str, source: &str, base_dir: &Path) -> Result<Simplex> {
    let doc: SimplexDoc = serde_json::from_str(text).map_err(|e| Error::format(source, e))?;
    let set = match doc.point_set {
        PointSetRef::Path(p) => {
            let path = base_dir.join(p);
            read_point_set(&path)?
        }
        PointSetRef::Inline(inline) => inline.into_point_set(&format!("{source}: point_set"))?,
    };
    let set = Arc::new(set);
    let side = |name: &str, vs: &[VertexDoc]| -> Result<Vec<Vertex>> {
        vs.iter()
            .enumerate()
            .map(|(i, v)| {
                let point = set
                    .index_of(&v.point)
                    .ok_or_else(|| Error::format(format!("{source}: {name}[{i}].point"), Error::UnknownPoint(v.point.clone())))?;
                let weight = parse_at(&v.weight, || format!("{source}: {name}[{i}].weight"))?;
                Ok(Vertex::new(point, weight))
            })
            .collect()
    };
    let left = side("left", &doc.left)?;
    let right = side("right", &doc.right)?;
    Simplex::new(set, left, right)
}

pub fn read_simplex(path: &Path) -> Result<Simplex> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    simplex_from_str(&read_text(path)?, &path.display().to_string(), &base)
}

/// Simplex as JSON with the point set inlined.
pub fn simplex_to_value(d: &Simplex) -> serde_json::Value {
    let set = d.points();
    let side = |vs: &[Vertex]| -> serde_json::Value {
        vs.iter()
            .map(|v| serde_json::json!({ "point": set.labels()[v.point], "weight": format_rational(&v.weight) }))
            .collect()
    };
    let point_set: serde_json::Value = serde_json::from_str(&point_set_to_json(set)).expect("own output parses");
    serde_json::json!({
        "point_set": point_set,
        "left": side(d.left()),
        "right": side(d.right()),
    })
}

/// Metadata stored next to a CSV matrix as `<file>.json`.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MatrixSidecar {
    /// Exponent already applied to the entries.
    #[serde(default)]
    pub p: Option<f64>,
    /// `false` when the entries are plain distances `d` rather than `d^p`.
    #[serde(default = "yes")]
    pub powered: bool,
}

fn yes() -> bool {
    true
}

/// A distance matrix as read from CSV, before an exponent is attached.
#[derive(Clone, Debug)]
pub struct MatrixFile {
    pub labels: Vec<String>,
    /// Rational entries, when every cell parsed as one.
    pub exact: Option<Vec<Vec<Rational>>>,
    pub floats: Vec<Vec<f64>>,
    pub sidecar: Option<MatrixSidecar>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn matrix_from_csv_str(text: &str, source: &str) -> Result<MatrixFile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let labels: Vec<String> = reader
        .headers()
        .map_err(|e| Error::format(source, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut exact = Some(Vec::new());
    let mut floats = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // header is line 1
        let record = record.map_err(|e| Error::format(format!("{source}: line {}", i + 2), e))?;
        let mut exact_row = Vec::with_capacity(record.len());
        let mut float_row = Vec::with_capacity(record.len());
        for (j, cell) in record.iter().enumerate() {
            let at = || format!("{source}: line {}, column {}", i + 2, j + 1);
            match parse_rational(cell) {
                Ok(r) => {
                    float_row.push(crate::numerics::rational::to_f64(&r));
                    exact_row.push(r);
                }
                Err(_) => {
                    let x: f64 = cell.parse().map_err(|_| Error::format(at(), format!("not a number: {cell:?}")))?;
                    if !x.is_finite() {
                        return Err(Error::format(at(), format!("not a finite number: {cell:?}")));
                    }
                    float_row.push(x);
                    exact = None;
                }
            }
        }
        if let Some(rows) = exact.as_mut() {
            rows.push(exact_row);
        }
        floats.push(float_row);
    }
    if floats.len() != labels.len() {
        return Err(Error::format(
            source,
            format!("{} labels in the header but {} rows", labels.len(), floats.len()),
        ));
    }
    Ok(MatrixFile {
        labels,
        exact,
        floats,
        sidecar: None,
    })
}

pub fn read_matrix_csv(path: &Path) -> Result<MatrixFile> {
    let source = path.display().to_string();
    let mut file = matrix_from_csv_str(&read_text(path)?, &source)?;
    let side = sidecar_path(path);
    if side.exists() {
        let text = read_text(&side)?;
        let meta: MatrixSidecar =
            serde_json::from_str(&text).map_err(|e| Error::format(side.display().to_string(), e))?;
        file.sidecar = Some(meta);
    }
    Ok(file)
}

impl MatrixFile {
    pub fn is_powered(&self) -> bool {
        self.sidecar.as_ref().is_none_or(|s| s.powered)
    }

    /// The matrix of powered distances at `p`. A powered file must have
    /// been powered at `p` (when its sidecar says so); an unpowered file is
    /// raised to `p` here.
    pub fn powered_at(&self, p: f64) -> Result<DistanceMatrix> {
        let exponent = Exponent::new(p)?;
        let labels = self.labels.clone();
        if self.is_powered() {
            if let Some(q) = self.sidecar.as_ref().and_then(|s| s.p) {
                if q != p {
                    return Err(Error::Consistency(format!(
                        "matrix entries are powered at p = {q}, but p = {p} was requested"
                    )));
                }
            }
            return match &self.exact {
                Some(rows) => DistanceMatrix::from_exact_rows(exponent, labels, rows),
                None => DistanceMatrix::from_float_rows(exponent, labels, &self.floats),
            };
        }
        if let (Some(rows), Some(k)) = (&self.exact, small_integer(p)) {
            let powered: Vec<Vec<Rational>> = rows
                .iter()
                .map(|r| r.iter().map(|d| pow(d, k).expect("positive exponent")).collect())
                .collect();
            return DistanceMatrix::from_exact_rows(exponent, labels, &powered);
        }
        let powered: Vec<Vec<f64>> = self
            .floats
            .iter()
            .map(|r| r.iter().map(|d| if *d == 0.0 { 0.0 } else { d.powf(p) }).collect())
            .collect();
        DistanceMatrix::from_float_rows(exponent, labels, &powered)
    }

    /// The plain distances, when the file holds them.
    pub fn unpowered(&self) -> Result<Option<SymmetricMatrix>> {
        if self.is_powered() {
            return Ok(None);
        }
        // validate shape and sign through the powered constructor at p = 1
        self.powered_at(1.0)?;
        SymmetricMatrix::from_rows(&self.floats).map(Some)
    }
}

/// Writes `m` as CSV with a sidecar recording its exponent.
pub fn write_matrix_csv(m: &DistanceMatrix, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::format(path.display().to_string(), e);
    writer.write_record(m.labels()).map_err(io)?;
    for i in 0..m.order() {
        let row: Vec<String> = (0..m.order())
            .map(|j| match m.exact(i, j) {
                Some(r) => format_rational(r),
                None => format!("{:?}", m.get_f64(i, j)),
            })
            .collect();
        writer.write_record(&row).map_err(io)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::format(path.display().to_string(), e))?;
    write_text(path, &String::from_utf8(bytes).expect("csv of utf-8 input"))?;
    let meta = MatrixSidecar {
        p: Some(m.p().value()),
        powered: true,
    };
    write_text(&sidecar_path(path), &serde_json::to_string(&meta).expect("plain data"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::walsh_system;
    use crate::numerics::rational::{integer, rational};

    #[test]
    fn point_set_round_trip() {
        let w = walsh_system(2).unwrap();
        let text = point_set_to_json(&w);
        assert!(text.contains("\"1/4\""));
        let back = point_set_from_str(&text, "mem").unwrap();
        assert_eq!(back, w);
        assert_eq!(point_set_to_json(&back), text);
    }

    #[test]
    fn counting_measure_by_default_and_integers_accepted() {
        let s = point_set_from_str(r#"{"points":[{"id":"a","values":[0,"1/2"]},{"id":"b","values":["3","-1"]}]}"#, "mem").unwrap();
        assert!(s.measure().is_counting());
        assert_eq!(s.point(0), &[integer(0), rational(1, 2)]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = point_set_from_str(r#"{"points":[{"id":"a","values":["1"]},{"id":"b","values":["x"]}]}"#, "f.json")
            .unwrap_err()
            .to_string();
        assert!(e.contains("points[1].values[0]"), "{e}");
        let e = point_set_from_str(r#"{"points":[{"id":"a","values":["1"]},{"id":"b","values":["1","2"]}]}"#, "f.json")
            .unwrap_err()
            .to_string();
        assert!(e.contains("points[1].values"), "{e}");
        let e = point_set_from_str("{\"points\": [", "f.json").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
    }

    #[test]
    fn simplex_inline_and_unequal_sums() {
        let doc = r#"{"point_set":{"points":[{"id":"a","values":["0","0"]},{"id":"b","values":["1","1"]}]},
                      "left":[{"point":"a","weight":"1"}],"right":[{"point":"b","weight":1}]}"#;
        let d = simplex_from_str(doc, "mem", Path::new(".")).unwrap();
        assert_eq!(d.left()[0].point, 0);
        let v = simplex_to_value(&d);
        assert_eq!(v["right"][0]["point"], "b");
        let bad = doc.replace(r#""weight":1"#, r#""weight":"2""#);
        let e = simplex_from_str(&bad, "mem", Path::new(".")).unwrap_err().to_string();
        assert!(e.contains("left sums to 1") && e.contains("right sums to 2"), "{e}");
        let unknown = doc.replace(r#""point":"b""#, r#""point":"zz""#);
        assert!(simplex_from_str(&unknown, "mem", Path::new(".")).is_err());
    }

    #[test]
    fn csv_exact_and_float() {
        let m = matrix_from_csv_str("a,b\n0,1/2\n1/2,0\n", "m.csv").unwrap();
        assert!(m.exact.is_some());
        let d = m.powered_at(1.5).unwrap();
        assert!(d.is_exact());
        let f = matrix_from_csv_str("a,b\n0,0.25\n0.25,0\n", "m.csv").unwrap();
        assert!(f.exact.is_none());
        assert_eq!(f.powered_at(1.0).unwrap().get_f64(0, 1), 0.25);
        let e = matrix_from_csv_str("a,b\n0,x\n1,0\n", "m.csv").unwrap_err().to_string();
        assert!(e.contains("line 2, column 2"), "{e}");
        assert!(matrix_from_csv_str("a,b\n0,1\n2,0\n", "m.csv").unwrap().powered_at(1.0).is_err());
    }

    #[test]
    fn unpowered_files_are_raised() {
        let mut m = matrix_from_csv_str("a,b,c\n0,1,2\n1,0,1\n2,1,0\n", "m.csv").unwrap();
        assert!(m.unpowered().unwrap().is_none());
        m.sidecar = Some(MatrixSidecar { p: None, powered: false });
        let d = m.powered_at(3.0).unwrap();
        assert_eq!(d.exact(0, 2), Some(&integer(8)));
        assert!(m.unpowered().unwrap().is_some());
        m.sidecar = Some(MatrixSidecar { p: Some(2.0), powered: true });
        assert!(matches!(m.powered_at(1.0), Err(Error::Consistency(_))));
    }
}
