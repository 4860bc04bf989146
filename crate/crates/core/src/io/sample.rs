//! Delimiter-separated sample files and instance strings.
//!
//! A sample file has a header row naming the features in model order,
//! optionally followed by a final `prediction` column. Files ending in
//! `.tsv` are tab-separated; everything else is comma-separated.

use std::path::Path;

use crate::error::{Error, Result};
use crate::explanations::Sample;
use crate::models::{FeatureSpace, Model, Point, Value, ValueKind};
use crate::rational::parse_rational;

pub const PREDICTION_COLUMN: &str = "prediction";

pub fn load_sample(path: impl AsRef<Path>, model: &Model) -> Result<Sample> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    let delimiter = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("tsv") => b'\t',
        _ => b',',
    };
    parse_sample(&text, delimiter, model)
}

pub fn parse_sample(text: &str, delimiter: u8, model: &Model) -> Result<Sample> {
    let space = model.space();
    let m = space.len();
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Parse(format!("sample header: {e}")))?
        .clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Validation("sample file is empty".into()));
    }
    let with_predictions = match header.len() {
        n if n == m => false,
        n if n == m + 1 && &header[m] == PREDICTION_COLUMN => true,
        n => {
            return Err(Error::Validation(format!(
                "sample header has {n} columns; expected {m} feature columns, optionally followed by \"{PREDICTION_COLUMN}\""
            )))
        }
    };
    for (i, feature) in space.features().iter().enumerate() {
        if header[i] != feature.name {
            return Err(Error::Validation(format!(
                "sample column {} is \"{}\" but feature {} is \"{}\"",
                i + 1,
                &header[i],
                feature.id,
                feature.name
            )));
        }
    }
    let mut rows = Vec::new();
    let mut predictions = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let line = r + 2;
        let record = record.map_err(|e| Error::Parse(format!("sample line {line}: {e}")))?;
        let point = (0..m)
            .map(|i| {
                parse_rational(&record[i]).map_err(|e| {
                    Error::Validation(format!("sample line {line}, column {}: {e}", i + 1))
                })
            })
            .collect::<Result<Point>>()?;
        if with_predictions {
            predictions.push(
                parse_output(model.value_kind(), &record[m]).map_err(|e| {
                    Error::Validation(format!("sample line {line}, prediction: {e}"))
                })?,
            );
        }
        rows.push(point);
    }
    if rows.is_empty() {
        return Err(Error::Validation("sample file has no rows".into()));
    }
    Sample::new(model, rows, with_predictions.then_some(predictions))
}

fn parse_output(kind: ValueKind, text: &str) -> Result<Value> {
    match kind {
        ValueKind::Numeric => parse_rational(text).map(Value::Num),
        ValueKind::Categorical => Ok(Value::Label(text.to_string())),
    }
}

/// Parses `"1,1,2"` (or `"1/2, 3/4"`) into a point of the space.
pub fn parse_instance(space: &FeatureSpace, text: &str) -> Result<Point> {
    let point = text
        .split(',')
        .enumerate()
        .map(|(i, part)| {
            parse_rational(part.trim())
                .map_err(|e| Error::Validation(format!("instance component {}: {e}", i + 1)))
        })
        .collect::<Result<Point>>()?;
    space.check_point(&point)?;
    Ok(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fixtures::{e1, e3};
    use crate::rational::{int, ratio};

    #[test]
    fn reads_rows_and_predictions() {
        let text = "x1,x2,x3,prediction\n1,0,0,1\n0,1,1,7\n";
        let s = parse_sample(text, b',', &e1()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.rows()[1], vec![int(0), int(1), int(1)]);
        assert_eq!(s.predictions()[1], Value::Num(int(7)));
        let tsv = "x1\tx2\n1/2\t-1/4\n";
        let s = parse_sample(tsv, b'\t', &e3()).unwrap();
        assert_eq!(s.rows()[0], vec![ratio(1, 2), ratio(-1, 4)]);
    }

    #[test]
    fn rejects_malformed_samples() {
        let m = e1();
        assert!(parse_sample("", b',', &m).is_err());
        assert!(parse_sample("x1,x2,x3\n", b',', &m).is_err());
        assert!(parse_sample("x1,x2\n1,0\n", b',', &m).is_err());
        assert!(parse_sample("x1,x3,x2\n1,0,0\n", b',', &m).is_err());
        assert!(parse_sample("x1,x2,x3\n1,0,5\n", b',', &m).is_err());
        assert!(parse_sample("x1,x2,x3\n1,0,zz\n", b',', &m).is_err());
        // A recorded prediction must agree with the model.
        assert!(parse_sample("x1,x2,x3,prediction\n1,0,0,0\n", b',', &m).is_err());
    }

    #[test]
    fn instances() {
        let m = e1();
        assert_eq!(
            parse_instance(m.space(), "1, 1,2").unwrap(),
            vec![int(1), int(1), int(2)]
        );
        assert!(matches!(
            parse_instance(m.space(), "1,1"),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            parse_instance(m.space(), "1,1,3"),
            Err(Error::Domain(_))
        ));
        assert!(parse_instance(m.space(), "1,x,2").is_err());
    }
}
