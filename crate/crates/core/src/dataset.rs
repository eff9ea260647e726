//! Experiment tables: loading, validation and the coded [-1, 1] domain.

use std::collections::HashSet;
use std::fs::File;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name and physical range of one input variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            lower,
            upper,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Config("variable name must be nonempty".into()));
        }
        if !self.lower.is_finite() || !self.upper.is_finite() {
            return Err(Error::Config(format!(
                "bounds of `{}` must be finite",
                self.name
            )));
        }
        if self.lower >= self.upper {
            return Err(Error::Config(format!(
                "`{}`: lower bound {} must be strictly below upper bound {}",
                self.name, self.lower, self.upper
            )));
        }
        Ok(())
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }
}

/// Column roles for [`load_csv`], as read from the JSON sidecar config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub inputs: Vec<VariableSpec>,
    pub outputs: Vec<String>,
    #[serde(default = "default_strict")]
    pub strict: bool,
}

fn default_strict() -> bool {
    true
}

impl Schema {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let schema: Schema = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Config("at least one input column is required".into()));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("at least one output column is required".into()));
        }
        let mut seen = HashSet::new();
        for spec in &self.inputs {
            spec.validate()?;
            if !seen.insert(spec.name.as_str()) {
                return Err(Error::Config(format!("name `{}` used twice", spec.name)));
            }
        }
        for name in &self.outputs {
            if name.trim().is_empty() {
                return Err(Error::Config("output name must be nonempty".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Config(format!("name `{name}` used twice")));
            }
        }
        Ok(())
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// n runs of d inputs and m outputs, in physical units.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    inputs: DMatrix<f64>,
    outputs: DMatrix<f64>,
    input_specs: Vec<VariableSpec>,
    output_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, enforcing the range check on every input row when
    /// `strict` is set. With `strict` off, out-of-range rows are logged.
    pub fn new(
        inputs: DMatrix<f64>,
        outputs: DMatrix<f64>,
        input_specs: Vec<VariableSpec>,
        output_names: Vec<String>,
        strict: bool,
    ) -> Result<Self> {
        let n = inputs.nrows();
        if n == 0 {
            return Err(Error::EmptyData);
        }
        if outputs.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: outputs.nrows(),
            });
        }
        if input_specs.len() != inputs.ncols() || input_specs.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: inputs.ncols(),
                found: input_specs.len(),
            });
        }
        if output_names.len() != outputs.ncols() || output_names.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: outputs.ncols(),
                found: output_names.len(),
            });
        }
        Schema {
            inputs: input_specs.clone(),
            outputs: output_names.clone(),
            strict,
        }
        .validate()?;
        if let Some(v) = inputs.iter().chain(outputs.iter()).find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite data value {v}")));
        }
        for (i, row) in inputs.row_iter().enumerate() {
            for (spec, &v) in input_specs.iter().zip(row.iter()) {
                if !spec.contains(v) {
                    if strict {
                        return Err(Error::OutOfRange {
                            row: i + 1,
                            column: spec.name.clone(),
                            value: v,
                            lower: spec.lower,
                            upper: spec.upper,
                        });
                    }
                    log::warn!(
                        "row {}: input `{}` = {v} outside [{}, {}]",
                        i + 1,
                        spec.name,
                        spec.lower,
                        spec.upper
                    );
                }
            }
        }
        Ok(Self {
            inputs,
            outputs,
            input_specs,
            output_names,
        })
    }

    pub fn n(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn d(&self) -> usize {
        self.inputs.ncols()
    }

    pub fn m(&self) -> usize {
        self.outputs.ncols()
    }

    pub fn inputs(&self) -> &DMatrix<f64> {
        &self.inputs
    }

    pub fn outputs(&self) -> &DMatrix<f64> {
        &self.outputs
    }

    pub fn input_specs(&self) -> &[VariableSpec] {
        &self.input_specs
    }

    pub fn output_names(&self) -> &[String] {
        &self.output_names
    }

    pub fn schema(&self, strict: bool) -> Schema {
        Schema {
            inputs: self.input_specs.clone(),
            outputs: self.output_names.clone(),
            strict,
        }
    }

    /// Maps every input dimension onto [-1, 1]. The returned dataset carries
    /// `[-1, 1]` specs; the domain remembers the physical ranges.
    pub fn to_coded(&self) -> (Dataset, ScaledDomain) {
        let domain = ScaledDomain::new(self.input_specs.clone());
        let mut coded = self.inputs.clone();
        for (k, mut col) in coded.column_iter_mut().enumerate() {
            for v in col.iter_mut() {
                *v = domain.coded_value(k, *v);
            }
        }
        let specs = self
            .input_specs
            .iter()
            .map(|s| VariableSpec {
                name: s.name.clone(),
                lower: -1.0,
                upper: 1.0,
            })
            .collect();
        let ds = Dataset {
            inputs: coded,
            outputs: self.outputs.clone(),
            input_specs: specs,
            output_names: self.output_names.clone(),
        };
        (ds, domain)
    }

    /// Writes the table as CSV with inputs first, then outputs.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        let header: Vec<&str> = self
            .input_specs
            .iter()
            .map(|s| s.name.as_str())
            .chain(self.output_names.iter().map(String::as_str))
            .collect();
        w.write_record(&header)?;
        for i in 0..self.n() {
            let rec: Vec<String> = self
                .inputs
                .row(i)
                .iter()
                .chain(self.outputs.row(i).iter())
                .map(|v| format!("{v}"))
                .collect();
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Loads a CSV run table. Columns are picked by name according to `schema`;
/// columns the schema does not mention are ignored.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

pub fn read_csv<R: std::io::Read>(reader: R, schema: &Schema) -> Result<Dataset> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let mut seen = HashSet::new();
    for h in &header {
        if !seen.insert(h.as_str()) {
            return Err(Error::DuplicateColumn(h.clone()));
        }
    }
    let locate = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    };
    let in_cols = schema
        .inputs
        .iter()
        .map(|s| locate(&s.name))
        .collect::<Result<Vec<_>>>()?;
    let out_cols = schema
        .outputs
        .iter()
        .map(|s| locate(s))
        .collect::<Result<Vec<_>>>()?;

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut rows = 0usize;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let cell = |col: usize| -> Result<f64> {
            let raw = rec.get(col).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::MalformedCell {
                    row,
                    column: header[col].clone(),
                    value: raw.to_owned(),
                })
        };
        for &c in &in_cols {
            xs.push(cell(c)?);
        }
        for &c in &out_cols {
            ys.push(cell(c)?);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::EmptyData);
    }
    let inputs = DMatrix::from_row_slice(rows, in_cols.len(), &xs);
    let outputs = DMatrix::from_row_slice(rows, out_cols.len(), &ys);
    Dataset::new(
        inputs,
        outputs,
        schema.inputs.clone(),
        schema.outputs.clone(),
        schema.strict,
    )
}

/// Affine physical <-> coded map, `[lower, upper] -> [-1, 1]` per dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScaledDomain {
    specs: Vec<VariableSpec>,
}

impl ScaledDomain {
    pub fn new(specs: Vec<VariableSpec>) -> Self {
        Self { specs }
    }

    pub fn specs(&self) -> &[VariableSpec] {
        &self.specs
    }

    pub fn dim(&self) -> usize {
        self.specs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.specs.is_empty() {
            return Err(Error::ModelFormat("empty domain".into()));
        }
        self.specs.iter().try_for_each(VariableSpec::validate)
    }

    pub fn coded_value(&self, k: usize, v: f64) -> f64 {
        let s = &self.specs[k];
        2.0 * (v - s.lower) / (s.upper - s.lower) - 1.0
    }

    pub fn physical_value(&self, k: usize, u: f64) -> f64 {
        let s = &self.specs[k];
        s.lower + (u + 1.0) * (s.upper - s.lower) / 2.0
    }

    pub fn to_coded(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok(x.iter()
            .enumerate()
            .map(|(k, &v)| self.coded_value(k, v))
            .collect())
    }

    pub fn from_coded(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(u.len())?;
        Ok(u.iter()
            .enumerate()
            .map(|(k, &v)| self.physical_value(k, v))
            .collect())
    }

    /// Half-width of each physical range; `d x_phys / d x_coded`.
    pub fn half_widths(&self) -> Vec<f64> {
        self.specs
            .iter()
            .map(|s| (s.upper - s.lower) / 2.0)
            .collect()
    }

    /// Physical midpoint of each range.
    pub fn centers(&self) -> Vec<f64> {
        self.specs
            .iter()
            .map(|s| s.lower + (s.upper - s.lower) / 2.0)
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.specs.iter().position(|s| s.name == name)
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.specs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.specs.len(),
                found,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn im_schema() -> Schema {
        Schema {
            inputs: vec![
                VariableSpec::new("mold_temperature", 30.0, 50.0).unwrap(),
                VariableSpec::new("injection_speed", 22.5, 67.5).unwrap(),
                VariableSpec::new("packing_pressure", 400.0, 600.0).unwrap(),
                VariableSpec::new("packing_time", 1.0, 4.5).unwrap(),
            ],
            outputs: vec!["hl".into(), "hr".into(), "vu".into(), "vd".into()],
            strict: true,
        }
    }

    #[test]
    fn variable_spec_rejects_degenerate_ranges() {
        assert!(VariableSpec::new("a", 1.0, 1.0).is_err());
        assert!(VariableSpec::new("a", 2.0, 1.0).is_err());
        assert!(VariableSpec::new("", 0.0, 1.0).is_err());
        assert!(VariableSpec::new("a", 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn minimal_file() {
        let schema = Schema {
            inputs: vec![VariableSpec::new("x", 0.0, 1.0).unwrap()],
            outputs: vec!["y".into()],
            strict: true,
        };
        let ds = read_csv("x,y\n0.5,2\n".as_bytes(), &schema).unwrap();
        assert_eq!((ds.n(), ds.d(), ds.m()), (1, 1, 1));
        assert_eq!(ds.inputs()[(0, 0)], 0.5);
        assert_eq!(ds.outputs()[(0, 0)], 2.0);
    }

    #[test]
    fn malformed_cell_names_row_and_column() {
        let schema = Schema {
            inputs: vec![VariableSpec::new("x", 0.0, 1.0).unwrap()],
            outputs: vec!["y".into()],
            strict: true,
        };
        let err = read_csv("x,y\n0.1,1\n0.2,abc\n".as_bytes(), &schema).unwrap_err();
        match err {
            Error::MalformedCell { row, column, value } => {
                assert_eq!(row, 2);
                assert_eq!(column, "y");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_and_row_errors() {
        let schema = Schema {
            inputs: vec![VariableSpec::new("x", 0.0, 1.0).unwrap()],
            outputs: vec!["y".into()],
            strict: true,
        };
        assert!(matches!(
            read_csv("x,x,y\n0,0,1\n".as_bytes(), &schema),
            Err(Error::DuplicateColumn(_))
        ));
        assert!(matches!(
            read_csv("x,y\n".as_bytes(), &schema),
            Err(Error::EmptyData)
        ));
        assert!(matches!(
            read_csv("x,z\n0,1\n".as_bytes(), &schema),
            Err(Error::MissingColumn(c)) if c == "y"
        ));
        assert!(matches!(
            load_csv("/nonexistent/file.csv", &schema),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn strict_mode_names_offending_row() {
        let mut schema = Schema {
            inputs: vec![VariableSpec::new("x", 0.0, 1.0).unwrap()],
            outputs: vec!["y".into()],
            strict: true,
        };
        let text = "x,y\n0.5,1\n1.5,2\n";
        match read_csv(text.as_bytes(), &schema) {
            Err(Error::OutOfRange { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
        schema.strict = false;
        assert_eq!(read_csv(text.as_bytes(), &schema).unwrap().n(), 2);
    }

    #[test]
    fn loader_preserves_order_and_ignores_extra_columns() {
        let schema = im_schema();
        let mut text = String::from(
            "run,mold_temperature,injection_speed,packing_pressure,packing_time,hl,hr,vu,vd\n",
        );
        for k in 0..57 {
            let t = 30.0 + 20.0 * k as f64 / 56.0;
            text.push_str(&format!("{k},{t},45,500,2.5,{k},0,0,0\n"));
        }
        let ds = read_csv(text.as_bytes(), &schema).unwrap();
        assert_eq!((ds.n(), ds.d(), ds.m()), (57, 4, 4));
        for k in 0..57 {
            assert_eq!(ds.outputs()[(k, 0)], k as f64);
        }
    }

    #[test]
    fn coding_examples() {
        let ds = Dataset::new(
            DMatrix::from_row_slice(2, 4, &[30.0, 22.5, 437.282, 1.0, 40.0, 45.0, 600.0, 4.5]),
            DMatrix::from_row_slice(2, 4, &[0.0; 8]),
            im_schema().inputs,
            im_schema().outputs,
            true,
        )
        .unwrap();
        let (coded, dom) = ds.to_coded();
        assert_eq!(coded.inputs()[(0, 0)], -1.0);
        assert_eq!(coded.inputs()[(1, 0)], 0.0);
        assert!((coded.inputs()[(0, 2)] - (2.0 * 37.282 / 200.0 - 1.0)).abs() < 1e-12);
        assert!((coded.inputs()[(0, 2)] + 0.62718).abs() < 1e-12);
        assert_eq!(coded.inputs()[(1, 3)], 1.0);
        assert_eq!(coded.outputs(), ds.outputs());
        assert!(coded.input_specs().iter().all(|s| s.lower == -1.0 && s.upper == 1.0));

        let lows = dom.from_coded(&[-1.0; 4]).unwrap();
        assert_eq!(lows, vec![30.0, 22.5, 400.0, 1.0]);
        assert_eq!(dom.physical_value(1, 0.0), 45.0);
        assert!(matches!(
            dom.from_coded(&[0.0; 3]),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
    }

    proptest! {
        #[test]
        fn coded_round_trip(
            lower in -1e3f64..1e3,
            width in 1e-3f64..1e4,
            t in 0.0f64..=1.0,
        ) {
            let dom = ScaledDomain::new(vec![VariableSpec::new("v", lower, lower + width).unwrap()]);
            let v = lower + t * width;
            let back = dom.physical_value(0, dom.coded_value(0, v));
            let scale = v.abs().max(lower.abs()).max(width);
            prop_assert!((back - v).abs() <= 1e-12 * scale);
        }
    }
}
