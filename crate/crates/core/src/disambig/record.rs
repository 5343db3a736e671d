use std::io::{BufRead, Read};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub book_id: String,
    #[serde(default)]
    pub pub_place: Option<String>,
    #[serde(default)]
    pub book_date: Option<i32>,
}

/// One officer entry from a local gazetteer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NameRecord {
    pub record_id: String,
    pub name: String,
    #[serde(default)]
    pub birth_place: Option<String>,
    /// 入仕方法
    #[serde(default)]
    pub entry_into_office: Option<String>,
    /// 職官
    #[serde(default)]
    pub office_posting: Option<String>,
    /// 字號
    #[serde(default)]
    pub alternate_names: Vec<String>,
    #[serde(default)]
    pub service_location: Option<String>,
    #[serde(default)]
    pub service_period: Option<(i32, i32)>,
    #[serde(default)]
    pub source: Source,
}

impl NameRecord {
    pub fn validate(&self) -> Result<()> {
        if self.record_id.is_empty() {
            return Err(Error::Schema("record without record_id".into()));
        }
        if self.name.trim().is_empty() {
            return Err(Error::Schema(format!("record {}: empty name", self.record_id)));
        }
        if let Some((s, e)) = self.service_period {
            if s > e {
                return Err(Error::Schema(format!(
                    "record {}: service period {s}-{e} reversed",
                    self.record_id
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    record_id: String,
    name: String,
    #[serde(default)]
    birth_place: String,
    #[serde(default)]
    entry_into_office: String,
    #[serde(default)]
    office_posting: String,
    #[serde(default)]
    alternate_names: String,
    #[serde(default)]
    service_location: String,
    service_start: Option<i32>,
    service_end: Option<i32>,
    #[serde(default)]
    book_id: String,
    #[serde(default)]
    pub_place: String,
    book_date: Option<i32>,
}

fn opt(s: String) -> Option<String> {
    let t = s.trim();
    (!t.is_empty()).then(|| t.to_string())
}

/// Tab-separated records; empty cells are missing values, alternate names
/// are `|`-separated.
pub fn read_records_tsv(r: impl Read) -> Result<Vec<NameRecord>> {
    let mut rdr = csv::ReaderBuilder::new().delimiter(b'\t').from_reader(r);
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<Row>().enumerate() {
        let row = rec.map_err(|e| Error::Schema(format!("record row {}: {e}", i + 1)))?;
        let service_period = match (row.service_start, row.service_end) {
            (Some(s), Some(e)) => Some((s, e)),
            (Some(s), None) | (None, Some(s)) => Some((s, s)),
            (None, None) => None,
        };
        let r = NameRecord {
            record_id: row.record_id,
            name: row.name,
            birth_place: opt(row.birth_place),
            entry_into_office: opt(row.entry_into_office),
            office_posting: opt(row.office_posting),
            alternate_names: row
                .alternate_names
                .split('|')
                .filter_map(|s| opt(s.to_string()))
                .collect(),
            service_location: opt(row.service_location),
            service_period,
            source: Source {
                book_id: row.book_id,
                pub_place: opt(row.pub_place),
                book_date: row.book_date,
            },
        };
        r.validate()?;
        out.push(r);
    }
    Ok(out)
}

/// Inverse of [`read_records_tsv`].
pub fn write_records_tsv(records: &[NameRecord], w: impl std::io::Write) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().delimiter(b'\t').from_writer(w);
    wtr.write_record([
        "record_id",
        "name",
        "birth_place",
        "entry_into_office",
        "office_posting",
        "alternate_names",
        "service_location",
        "service_start",
        "service_end",
        "book_id",
        "pub_place",
        "book_date",
    ])?;
    let opt = |x: &Option<String>| x.clone().unwrap_or_default();
    for r in records {
        wtr.write_record([
            r.record_id.clone(),
            r.name.clone(),
            opt(&r.birth_place),
            opt(&r.entry_into_office),
            opt(&r.office_posting),
            r.alternate_names.join("|"),
            opt(&r.service_location),
            r.service_period.map(|p| p.0.to_string()).unwrap_or_default(),
            r.service_period.map(|p| p.1.to_string()).unwrap_or_default(),
            r.source.book_id.clone(),
            opt(&r.source.pub_place),
            r.source.book_date.map(|d| d.to_string()).unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_records_jsonl(r: impl BufRead) -> Result<Vec<NameRecord>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: NameRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Schema(format!("line {}: {e}", i + 1)))?;
        rec.validate()?;
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_missing_values() {
        let text = "record_id\tname\tbirth_place\tentry_into_office\toffice_posting\talternate_names\tservice_location\tservice_start\tservice_end\tbook_id\tpub_place\tbook_date\n\
                    r1\t王臣\t龍川縣\t進士\t\t子忠|彥臣\t\t1650\t1655\tb1\t惠州府\t1700\n\
                    r2\t王臣\t\t\t\t\t\t\t\tb2\t\t\n";
        let rs = read_records_tsv(text.as_bytes()).unwrap();
        assert_eq!(rs[0].alternate_names, vec!["子忠", "彥臣"]);
        assert_eq!(rs[0].office_posting, None);
        assert_eq!(rs[0].service_period, Some((1650, 1655)));
        assert_eq!(rs[1].birth_place, None);
        assert_eq!(rs[1].source.book_date, None);
    }

    #[test]
    fn tsv_round_trip() {
        let r = NameRecord {
            record_id: "r1".into(),
            name: "王臣".into(),
            alternate_names: vec!["子忠".into(), "彥臣".into()],
            service_period: Some((1650, 1655)),
            source: Source {
                book_id: "b1".into(),
                pub_place: Some("惠州府".into()),
                book_date: Some(1700),
            },
            ..Default::default()
        };
        let mut buf = Vec::new();
        write_records_tsv(&[r.clone()], &mut buf).unwrap();
        assert_eq!(read_records_tsv(&buf[..]).unwrap(), vec![r]);
    }

    #[test]
    fn validation() {
        let bad = r#"{"record_id":"x","name":"王臣","service_period":[1700,1600]}"#;
        assert!(read_records_jsonl(bad.as_bytes()).is_err());
        let unknown = r#"{"record_id":"x","name":"王臣","age":3}"#;
        assert!(read_records_jsonl(unknown.as_bytes()).is_err());
        let ok = r#"{"record_id":"x","name":"王臣"}"#;
        assert_eq!(read_records_jsonl(ok.as_bytes()).unwrap().len(), 1);
    }
}
