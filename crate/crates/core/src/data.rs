//! Tabular dataset model, sidecar schema, delimited-text ingestion and
//! stratified fold splitting.
//!
//! A data file is plain delimiter-separated text with a header row. Its
//! column roles live in a separate schema file with one line per column:
//!
//! ```text
//! # name        kind     mutability  role
//! temperature   numeric  flexible    condition
//! pus           nominal  flexible    condition
//! patient_id    nominal  stable      ignore
//! ill           nominal  stable      decision
//! ```
//!
//! `role` defaults to `condition` when omitted. Missing cells are rejected.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Nominal,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mutability {
    /// Values cannot be changed by an action.
    Stable,
    Flexible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Condition,
    Decision,
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
    pub mutability: Mutability,
    /// Observed nominal values in first-appearance order; empty for numeric attributes.
    pub domain: Vec<String>,
}

impl Attribute {
    pub fn nominal(name: &str, mutability: Mutability, domain: &[&str]) -> Self {
        Attribute {
            name: name.to_string(),
            kind: AttributeKind::Nominal,
            mutability,
            domain: domain.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn numeric(name: &str, mutability: Mutability) -> Self {
        Attribute {
            name: name.to_string(),
            kind: AttributeKind::Numeric,
            mutability,
            domain: Vec::new(),
        }
    }

    pub fn is_stable(&self) -> bool {
        self.mutability == Mutability::Stable
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.domain.iter().position(|v| v == value)
    }
}

/// One cell of an example. Nominal cells index into the attribute domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Nominal(usize),
    Numeric(f64),
}

impl Value {
    pub fn as_numeric(self) -> Option<f64> {
        match self {
            Value::Numeric(v) => Some(v),
            Value::Nominal(_) => None,
        }
    }

    pub fn as_nominal(self) -> Option<usize> {
        match self {
            Value::Nominal(v) => Some(v),
            Value::Numeric(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub values: Vec<Value>,
    pub label: usize,
}

/// An example read for prediction or recommendation; the label is optional.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub values: Vec<Value>,
    pub label: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    attributes: Vec<Attribute>,
    examples: Vec<Example>,
    classes: Vec<String>,
    decision: String,
    ranges: Vec<Option<(f64, f64)>>,
    class_counts: Vec<usize>,
}

impl Dataset {
    /// Builds and validates a dataset: at least two classes, each with an example.
    pub fn new(
        attributes: Vec<Attribute>,
        examples: Vec<Example>,
        classes: Vec<String>,
        decision: &str,
    ) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let ds = Self::assemble(attributes, examples, classes, decision.to_string())?;
        if ds.classes.len() < 2 {
            return Err(Error::TooFewClasses(ds.classes.len()));
        }
        if let Some(c) = ds.class_counts.iter().position(|&c| c == 0) {
            return Err(Error::UnknownClass(ds.classes[c].clone()));
        }
        Ok(ds)
    }

    fn assemble(
        attributes: Vec<Attribute>,
        examples: Vec<Example>,
        classes: Vec<String>,
        decision: String,
    ) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, a) in attributes.iter().enumerate() {
            if seen.insert(a.name.clone(), i).is_some() {
                return Err(Error::Schema {
                    line: i + 1,
                    message: format!("duplicate attribute `{}`", a.name),
                });
            }
        }
        for (row, ex) in examples.iter().enumerate() {
            if ex.values.len() != attributes.len() {
                return Err(Error::RowLength {
                    row: row + 1,
                    expected: attributes.len(),
                    found: ex.values.len(),
                });
            }
            if ex.label >= classes.len() {
                return Err(Error::UnknownClass(format!("#{}", ex.label)));
            }
        }
        let mut ds = Dataset {
            attributes,
            examples,
            classes,
            decision,
            ranges: Vec::new(),
            class_counts: Vec::new(),
        };
        ds.refresh_statistics();
        Ok(ds)
    }

    fn refresh_statistics(&mut self) {
        self.ranges = (0..self.attributes.len())
            .map(|a| {
                if self.attributes[a].kind != AttributeKind::Numeric {
                    return None;
                }
                self.examples
                    .iter()
                    .filter_map(|e| e.values[a].as_numeric())
                    .fold(None, |acc: Option<(f64, f64)>, v| match acc {
                        None => Some((v, v)),
                        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
                    })
            })
            .collect();
        let mut counts = vec![0; self.classes.len()];
        for e in &self.examples {
            counts[e.label] += 1;
        }
        self.class_counts = counts;
    }

    /// Examples at `indices`, sharing this dataset's schema. Ranges and class
    /// counts are recomputed from the subset.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut ds = Dataset {
            attributes: self.attributes.clone(),
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            classes: self.classes.clone(),
            decision: self.decision.clone(),
            ranges: Vec::new(),
            class_counts: Vec::new(),
        };
        ds.refresh_statistics();
        ds
    }

    /// Same schema with a different example list.
    pub fn with_examples(&self, examples: Vec<Example>) -> Result<Dataset> {
        Self::assemble(
            self.attributes.clone(),
            examples,
            self.classes.clone(),
            self.decision.clone(),
        )
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, index: usize) -> &Attribute {
        &self.attributes[index]
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == name)
    }

    pub fn class_name(&self, class: usize) -> &str {
        &self.classes[class]
    }

    pub fn decision_name(&self) -> &str {
        &self.decision
    }

    pub fn class_count(&self, class: usize) -> usize {
        self.class_counts[class]
    }

    /// Training minimum and maximum of a numeric attribute.
    pub fn range(&self, attribute: usize) -> Option<(f64, f64)> {
        self.ranges[attribute]
    }

    /// Most frequent class; ties go to the earlier class.
    pub fn majority_class(&self) -> usize {
        let mut best = 0;
        for (c, &n) in self.class_counts.iter().enumerate() {
            if n > self.class_counts[best] {
                best = c;
            }
        }
        best
    }

    pub fn format_value(&self, attribute: usize, value: Value) -> String {
        match value {
            Value::Nominal(v) => self.attributes[attribute].domain[v].clone(),
            Value::Numeric(v) => format_number(v),
        }
    }

    pub fn schema(&self) -> Schema {
        let mut columns: Vec<ColumnSpec> = self
            .attributes
            .iter()
            .map(|a| ColumnSpec {
                name: a.name.clone(),
                kind: a.kind,
                mutability: a.mutability,
                role: Role::Condition,
            })
            .collect();
        columns.push(ColumnSpec {
            name: self.decision.clone(),
            kind: AttributeKind::Nominal,
            mutability: Mutability::Stable,
            role: Role::Decision,
        });
        Schema { columns }
    }
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: AttributeKind,
    pub mutability: Mutability,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<ColumnSpec>,
}

impl Schema {
    pub fn parse(text: &str) -> Result<Schema> {
        let mut columns = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let err = |message: String| Error::Schema {
                line: no + 1,
                message,
            };
            if fields.len() < 3 || fields.len() > 4 {
                return Err(err(format!(
                    "expected `name kind mutability [role]`, got `{line}`"
                )));
            }
            let kind = match fields[1].to_ascii_lowercase().as_str() {
                "nominal" | "symbolic" => AttributeKind::Nominal,
                "numeric" | "real" => AttributeKind::Numeric,
                other => return Err(err(format!("unknown kind `{other}`"))),
            };
            let mutability = match fields[2].to_ascii_lowercase().as_str() {
                "stable" => Mutability::Stable,
                "flexible" => Mutability::Flexible,
                other => return Err(err(format!("unknown mutability `{other}`"))),
            };
            let role = match fields.get(3).map(|r| r.to_ascii_lowercase()) {
                None => Role::Condition,
                Some(r) => match r.as_str() {
                    "condition" => Role::Condition,
                    "decision" | "class" => Role::Decision,
                    "ignore" => Role::Ignore,
                    other => return Err(err(format!("unknown role `{other}`"))),
                },
            };
            if role == Role::Decision && kind != AttributeKind::Nominal {
                return Err(err("decision column must be nominal".to_string()));
            }
            columns.push(ColumnSpec {
                name: fields[0].to_string(),
                kind,
                mutability,
                role,
            });
        }
        let decisions = columns.iter().filter(|c| c.role == Role::Decision).count();
        if decisions > 1 {
            return Err(Error::Schema {
                line: 0,
                message: "more than one decision column".to_string(),
            });
        }
        Ok(Schema { columns })
    }

    pub fn read<R: Read>(reader: R) -> Result<Schema> {
        let mut text = String::new();
        BufReader::new(reader).read_to_string(&mut text)?;
        Schema::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# name kind mutability role\n");
        for c in &self.columns {
            let kind = match c.kind {
                AttributeKind::Nominal => "nominal",
                AttributeKind::Numeric => "numeric",
            };
            let mutability = match c.mutability {
                Mutability::Stable => "stable",
                Mutability::Flexible => "flexible",
            };
            let role = match c.role {
                Role::Condition => "condition",
                Role::Decision => "decision",
                Role::Ignore => "ignore",
            };
            out.push_str(&format!("{} {kind} {mutability} {role}\n", c.name));
        }
        out
    }

    fn decision(&self) -> Option<&ColumnSpec> {
        self.columns.iter().find(|c| c.role == Role::Decision)
    }

    /// Maps every header column to its schema entry.
    fn bind(&self, header: &csv::StringRecord) -> Result<Vec<&ColumnSpec>> {
        let mut by_name: HashMap<&str, &ColumnSpec> = HashMap::new();
        for c in &self.columns {
            by_name.insert(c.name.as_str(), c);
        }
        for c in &self.columns {
            if !header.iter().any(|h| h.trim() == c.name) {
                return Err(Error::UnknownColumn(c.name.clone()));
            }
        }
        header
            .iter()
            .map(|h| {
                by_name
                    .get(h.trim())
                    .copied()
                    .ok_or_else(|| Error::UndeclaredColumn(h.trim().to_string()))
            })
            .collect()
    }
}

fn reader_builder(delimiter: u8) -> csv::ReaderBuilder {
    let mut b = csv::ReaderBuilder::new();
    b.delimiter(delimiter).has_headers(true).flexible(true);
    b
}

fn parse_numeric(cell: &str, row: usize, column: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::ParseNumeric {
            row,
            column: column.to_string(),
            value: cell.to_string(),
        })
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "?"
}

/// Reads a comma-separated dataset.
pub fn load_dataset<R: Read>(reader: R, schema: &Schema) -> Result<Dataset> {
    load_dataset_with_delimiter(reader, schema, b',')
}

pub fn load_dataset_with_delimiter<R: Read>(
    reader: R,
    schema: &Schema,
    delimiter: u8,
) -> Result<Dataset> {
    let decision = schema.decision().ok_or(Error::MissingDecision)?;
    let mut rdr = reader_builder(delimiter).from_reader(reader);
    let header = rdr.headers()?.clone();
    let bound = schema.bind(&header)?;

    let mut attributes: Vec<Attribute> = Vec::new();
    let mut slots: Vec<Option<usize>> = Vec::with_capacity(bound.len());
    let mut decision_col = 0;
    for (col, spec) in bound.iter().enumerate() {
        match spec.role {
            Role::Condition => {
                slots.push(Some(attributes.len()));
                attributes.push(Attribute {
                    name: spec.name.clone(),
                    kind: spec.kind,
                    mutability: spec.mutability,
                    domain: Vec::new(),
                });
            }
            Role::Decision => {
                decision_col = col;
                slots.push(None);
            }
            Role::Ignore => slots.push(None),
        }
    }

    let mut classes: Vec<String> = Vec::new();
    let mut examples = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() != header.len() {
            return Err(Error::RowLength {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        let mut values = vec![Value::Numeric(0.0); attributes.len()];
        for (col, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            let spec = bound[col];
            if spec.role == Role::Ignore {
                continue;
            }
            if is_missing(cell) {
                return Err(Error::MissingValue {
                    row,
                    column: spec.name.clone(),
                });
            }
            if let Some(a) = slots[col] {
                let attr = &mut attributes[a];
                values[a] = match attr.kind {
                    AttributeKind::Numeric => Value::Numeric(parse_numeric(cell, row, &spec.name)?),
                    AttributeKind::Nominal => {
                        let idx = match attr.value_index(cell) {
                            Some(idx) => idx,
                            None => {
                                attr.domain.push(cell.to_string());
                                attr.domain.len() - 1
                            }
                        };
                        Value::Nominal(idx)
                    }
                };
            }
        }
        let class_cell = record[decision_col].trim();
        let label = match classes.iter().position(|c| c == class_cell) {
            Some(l) => l,
            None => {
                classes.push(class_cell.to_string());
                classes.len() - 1
            }
        };
        examples.push(Example { values, label });
    }
    Dataset::new(attributes, examples, classes, &decision.name)
}

/// Reads examples against an existing training schema. The decision column
/// is optional; nominal values must belong to the training domains.
pub fn load_queries<R: Read>(reader: R, train: &Dataset, delimiter: u8) -> Result<Vec<Query>> {
    let mut rdr = reader_builder(delimiter).from_reader(reader);
    let header = rdr.headers()?.clone();
    let mut columns = Vec::with_capacity(train.attributes().len());
    for a in train.attributes() {
        let col = header
            .iter()
            .position(|h| h.trim() == a.name)
            .ok_or_else(|| Error::SchemaMismatch(format!("column `{}` missing", a.name)))?;
        columns.push(col);
    }
    let decision_col = header
        .iter()
        .position(|h| h.trim() == train.decision_name());

    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let mut values = Vec::with_capacity(columns.len());
        for (a, &col) in columns.iter().enumerate() {
            let attr = train.attribute(a);
            let cell = record.get(col).unwrap_or("").trim();
            if is_missing(cell) {
                return Err(Error::MissingValue {
                    row,
                    column: attr.name.clone(),
                });
            }
            values.push(match attr.kind {
                AttributeKind::Numeric => Value::Numeric(parse_numeric(cell, row, &attr.name)?),
                AttributeKind::Nominal => {
                    Value::Nominal(attr.value_index(cell).ok_or_else(|| Error::UnknownValue {
                        row,
                        column: attr.name.clone(),
                        value: cell.to_string(),
                    })?)
                }
            });
        }
        let label = match decision_col.and_then(|c| record.get(c)).map(str::trim) {
            Some(cell) if !is_missing(cell) => Some(
                train
                    .class_index(cell)
                    .ok_or_else(|| Error::UnknownClass(cell.to_string()))?,
            ),
            _ => None,
        };
        out.push(Query { values, label });
    }
    Ok(out)
}

/// Writes attributes then the decision column, comma-separated.
pub fn write_dataset<W: Write>(writer: W, ds: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = ds.attributes().iter().map(|a| a.name.as_str()).collect();
    header.push(ds.decision_name());
    w.write_record(&header)?;
    for e in ds.examples() {
        let mut rec: Vec<String> = e
            .values
            .iter()
            .enumerate()
            .map(|(a, &v)| ds.format_value(a, v))
            .collect();
        rec.push(ds.class_name(e.label).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes bare attribute rows (no decision column).
pub fn write_values<W: Write>(writer: W, ds: &Dataset, rows: &[Vec<Value>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ds.attributes().iter().map(|a| a.name.as_str()))?;
    for row in rows {
        w.write_record(row.iter().enumerate().map(|(a, &v)| ds.format_value(a, v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads one class label per non-empty line.
pub fn read_labels<R: Read>(reader: R, ds: &Dataset) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        let label = line.trim();
        if label.is_empty() {
            continue;
        }
        out.push(
            ds.class_index(label)
                .ok_or_else(|| Error::UnknownClass(label.to_string()))?,
        );
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Fold {
    pub train: Dataset,
    pub test: Dataset,
    /// Indices of the test examples in the source dataset.
    pub test_indices: Vec<usize>,
}

/// Fold number for every example. Each class is shuffled with a seeded
/// ChaCha8 stream and dealt round-robin starting at fold 0.
pub fn fold_assignment(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::FoldCount(k));
    }
    for c in 0..ds.classes().len() {
        if ds.class_count(c) < k {
            return Err(Error::ClassTooSmall {
                class: ds.class_name(c).to_string(),
                count: ds.class_count(c),
                folds: k,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; ds.len()];
    for c in 0..ds.classes().len() {
        let mut members: Vec<usize> = ds
            .examples()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.label == c)
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut rng);
        for (pos, i) in members.into_iter().enumerate() {
            assignment[i] = pos % k;
        }
    }
    Ok(assignment)
}

pub fn stratified_folds(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    let assignment = fold_assignment(ds, k, seed)?;
    Ok((0..k)
        .map(|f| {
            let (test_indices, train_indices): (Vec<usize>, Vec<usize>) =
                (0..ds.len()).partition(|&i| assignment[i] == f);
            Fold {
                train: ds.subset(&train_indices),
                test: ds.subset(&test_indices),
                test_indices,
            }
        })
        .collect())
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} examples, {} attributes, classes [",
            self.len(),
            self.attributes.len()
        )?;
        for (c, name) in self.classes.iter().enumerate() {
            if c > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}: {}", self.class_counts[c])?;
        }
        write!(f, "]")
    }
}
