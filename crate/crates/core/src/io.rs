//! File formats.
//!
//! Datasets are JSON objects
//!
//! ```json
//! {"chart": "lorentz", "dim": 2, "points": [[1.0, 0.0, 0.0], ...]}
//! ```
//!
//! with `D + 1` hyperboloid coordinates per point. `"chart": "poincare"` is
//! accepted on input with `D` ball coordinates per point; such points are
//! converted and always written back in Lorentz form. Floats are written in
//! the shortest form that parses back to the same `f64`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Error, Result};
use crate::hygeo::{LorentzPoint, PoincarePoint};
use crate::rgd::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    pub chart: String,
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
}

impl From<&Dataset> for DatasetFile {
    fn from(data: &Dataset) -> Self {
        Self {
            chart: "lorentz".into(),
            dim: data.dim(),
            points: data.points().iter().map(|p| p.coords().to_vec()).collect(),
        }
    }
}

impl DatasetFile {
    pub fn into_dataset(self) -> Result<Dataset> {
        if self.dim < 1 {
            return Err(invalid("field `dim`: must be >= 1"));
        }
        if self.points.is_empty() {
            return Err(invalid("field `points`: must contain at least one point"));
        }
        let poincare = match self.chart.as_str() {
            "lorentz" => false,
            "poincare" => true,
            other => {
                return Err(invalid(format!(
                    "field `chart`: expected \"lorentz\" or \"poincare\", got \"{other}\""
                )))
            }
        };
        let width = if poincare { self.dim } else { self.dim + 1 };
        let points = self
            .points
            .into_iter()
            .enumerate()
            .map(|(i, coords)| {
                if coords.len() != width {
                    return Err(invalid(format!(
                        "points[{i}]: expected {width} coordinates for {} chart with dim {}, got {}",
                        self.chart,
                        self.dim,
                        coords.len()
                    )));
                }
                let point = if poincare {
                    PoincarePoint::new(coords).map(|p| p.to_lorentz())
                } else {
                    LorentzPoint::new(coords)
                };
                point.map_err(|e| invalid(format!("points[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(points)
    }
}

/// Parses a dataset, reporting JSON syntax errors with line and column and
/// semantic errors with the offending field.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let file: DatasetFile = serde_json::from_str(text).map_err(|e| {
        invalid(format!(
            "line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    file.into_dataset()
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_dataset(&text).map_err(|e| match e {
        Error::InvalidArgument(m) => invalid(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn dataset_to_json(data: &Dataset) -> String {
    to_json(&DatasetFile::from(data))
}

pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    write_text(path, &dataset_to_json(data))
}

/// One row per point, columns `x0..xD`.
pub fn dataset_to_csv(data: &Dataset) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = (0..=data.dim()).map(|i| format!("x{i}")).collect();
    w.write_record(&header).map_err(csv_err)?;
    for p in data.points() {
        w.write_record(p.coords().iter().map(|c| c.to_string()))
            .map_err(csv_err)?;
    }
    finish_csv(w)
}

/// Pretty JSON of any result type.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("result types serialise");
    s.push('\n');
    s
}

/// `key,value` rows of a result, nested fields flattened to dotted keys
/// (`scores.0.dim`).
pub fn to_csv<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| invalid(e.to_string()))?;
    let mut rows = Vec::new();
    flatten("", &v, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).map_err(csv_err)?;
    for (k, v) in rows {
        w.write_record([k, v]).map_err(csv_err)?;
    }
    finish_csv(w)
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_err(e: csv::Error) -> Error {
    invalid(format!("csv: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| invalid(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| invalid(e.to_string()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::pc_general;
    use crate::quad::RngSeed;
    use crate::rgd::{sample, RgdParams};

    #[test]
    fn dataset_round_trip_is_exact() {
        let p = RgdParams::new(LorentzPoint::from_spatial(&[0.5, -1.0, 0.25]), 1.1).unwrap();
        let d = sample(25, &p, RngSeed(2)).unwrap();
        assert_eq!(parse_dataset(&dataset_to_json(&d)).unwrap(), d);
    }

    #[test]
    fn poincare_input_is_converted() {
        let d = parse_dataset(r#"{"chart":"poincare","dim":2,"points":[[0,0],[0.5,0]]}"#).unwrap();
        assert_eq!(d.points()[0], LorentzPoint::origin(2));
        assert!((d.points()[1].time() - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let msg = |t: &str| parse_dataset(t).unwrap_err().to_string();
        assert!(msg("{\"chart\":\"lorentz\",\n\"dim\":1,\n\"points\":[[1,0],]}").contains("line 3"));
        assert!(msg(r#"{"chart":"lorentz","dim":2,"points":[[1,0,0],[1,0]]}"#).contains("points[1]"));
        assert!(msg(r#"{"chart":"lorentz","dim":1,"points":[[2,0]]}"#).contains("points[0]"));
        assert!(msg(r#"{"chart":"klein","dim":1,"points":[[1,0]]}"#).contains("chart"));
        assert!(msg(r#"{"chart":"lorentz","dim":1}"#).contains("points"));
        assert!(msg(r#"{"chart":"poincare","dim":1,"points":[[1.5]]}"#).contains("points[0]"));
    }

    #[test]
    fn result_round_trip_and_csv() {
        let r = pc_general(3, 250, 1.7).unwrap();
        let back: crate::complexity::PcResult = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(back, r);
        let csv = to_csv(&r).unwrap();
        assert!(csv.starts_with("key,value\n"));
        assert!(csv.contains("total_log_pc,"));
    }
}
