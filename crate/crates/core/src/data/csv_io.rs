use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Dataset, GroupLabel, Record};
use crate::error::{Error, Result};

/// Column mapping for CSV ingestion.
///
/// `id` and `score` are optional: when `None`, a column literally named
/// `id`/`score` is used if the header has one. Listed `legit` columns are
/// read as categorical legitimate attributes. When `groups` is set, any other
/// group label is rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvSchema {
    pub id: Option<String>,
    pub group: String,
    pub outcome: String,
    pub decision: String,
    pub score: Option<String>,
    pub legit: Vec<String>,
    pub groups: Option<Vec<String>>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            id: None,
            group: "a".into(),
            outcome: "y".into(),
            decision: "d".into(),
            score: None,
            legit: Vec::new(),
            groups: None,
        }
    }
}

impl CsvSchema {
    pub fn with_legit<S: Into<String>>(mut self, cols: impl IntoIterator<Item = S>) -> Self {
        self.legit = cols.into_iter().map(Into::into).collect();
        self
    }
}

pub fn load_dataset(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_dataset(file, schema)
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn { column: name.into() })
}

fn optional_column(headers: &csv::StringRecord, explicit: &Option<String>, fallback: &str) -> Result<Option<usize>> {
    match explicit {
        Some(name) => column(headers, name).map(Some),
        None => Ok(headers.iter().position(|h| h.trim() == fallback)),
    }
}

fn parse_bit(raw: &str, row: usize, name: &str) -> Result<bool> {
    match raw.trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::NonBinaryValue {
            row,
            column: name.into(),
            value: other.into(),
        }),
    }
}

pub fn read_dataset<R: Read>(reader: R, schema: &CsvSchema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let a_col = column(&headers, &schema.group)?;
    let y_col = column(&headers, &schema.outcome)?;
    let d_col = column(&headers, &schema.decision)?;
    let id_col = optional_column(&headers, &schema.id, "id")?;
    let score_col = optional_column(&headers, &schema.score, "score")?;
    let score_name = schema.score.clone().unwrap_or_else(|| "score".into());
    let legit_cols = schema
        .legit
        .iter()
        .map(|name| column(&headers, name).map(|i| (name.clone(), i)))
        .collect::<Result<Vec<_>>>()?;
    let declared: Option<BTreeSet<GroupLabel>> = schema
        .groups
        .as_ref()
        .map(|gs| gs.iter().map(|g| GroupLabel(g.clone())).collect());

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        let row = row?;
        let field = |c: usize| row.get(c).unwrap_or("").trim();

        let group = GroupLabel(field(a_col).to_owned());
        if let Some(declared) = &declared {
            if !declared.contains(&group) {
                return Err(Error::UnknownGroup {
                    row: row_no,
                    column: schema.group.clone(),
                    group: group.0,
                });
            }
        }
        let outcome = parse_bit(field(y_col), row_no, &schema.outcome)?;
        let decision = parse_bit(field(d_col), row_no, &schema.decision)?;
        let score = match score_col.map(field) {
            None | Some("") => None,
            Some(raw) => match raw.parse::<f64>() {
                Ok(s) if (0.0..=1.0).contains(&s) => Some(s),
                _ => {
                    return Err(Error::ScoreOutOfRange {
                        row: row_no,
                        column: score_name.clone(),
                        value: raw.into(),
                    })
                }
            },
        };
        let id = match id_col {
            Some(c) => field(c).to_owned(),
            None => format!("row{row_no}"),
        };
        let legit = legit_cols
            .iter()
            .map(|(name, c)| (name.clone(), field(*c).to_owned()))
            .collect();
        records.push(Record {
            id,
            group,
            outcome,
            decision,
            score,
            legit,
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let groups = match declared {
        Some(g) => g,
        None => records.iter().map(|r| r.group.clone()).collect(),
    };
    let mut legit_schema: BTreeMap<String, BTreeSet<String>> =
        schema.legit.iter().map(|n| (n.clone(), BTreeSet::new())).collect();
    for r in &records {
        for (k, v) in &r.legit {
            legit_schema.get_mut(k).expect("column declared").insert(v.clone());
        }
    }
    Dataset::new(records, groups, legit_schema)
}

/// Writes `id,a,y,d[,score][,legit...]`; scores use Rust's shortest
/// round-trip float formatting so re-reading yields identical values.
pub fn write_dataset<W: Write>(ds: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let with_score = ds.records().iter().any(|r| r.score.is_some());
    let legit: Vec<&String> = ds.legit_schema().keys().collect();

    let mut header = vec!["id", "a", "y", "d"];
    if with_score {
        header.push("score");
    }
    header.extend(legit.iter().map(|s| s.as_str()));
    w.write_record(&header)?;

    for r in ds.records() {
        let mut row = vec![
            r.id.clone(),
            r.group.0.clone(),
            (r.outcome as u8).to_string(),
            (r.decision as u8).to_string(),
        ];
        if with_score {
            row.push(r.score.map(|s| s.to_string()).unwrap_or_default());
        }
        row.extend(legit.iter().map(|k| r.legit[*k].clone()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn dataset_to_csv(ds: &Dataset) -> String {
    let mut buf = Vec::new();
    write_dataset(ds, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}
