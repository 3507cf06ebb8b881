use std::fs;
use std::path::Path;

use super::{IterationRecord, RunOutput};
use crate::error::{Error, Result};
use crate::game::GameTree;

const FIXED: [&str; 4] = ["iteration", "measure", "value", "wall_seconds"];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(format!("csv: {e}"))
}

/// Serializes records with columns iteration, measure, value, wall_seconds, alpha_0, ...
/// Floats use the shortest representation that parses back to the same value.
pub fn records_to_csv(records: &[IterationRecord]) -> Result<String> {
    let dim = records.iter().map(|r| r.alpha.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = FIXED.iter().map(|s| s.to_string()).collect();
    header.extend((0..dim).map(|i| format!("alpha_{i}")));
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row = vec![
            r.iteration.to_string(),
            r.measure.clone(),
            format!("{:?}", r.value),
            format!("{:?}", r.wall_seconds),
        ];
        row.extend((0..dim).map(|i| r.alpha.get(i).map_or(String::new(), |a| format!("{a:?}"))));
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses the output of [`records_to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<IterationRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_err)?.clone();
    if header.len() < FIXED.len() || header.iter().zip(FIXED).any(|(a, b)| a != b) {
        return Err(Error::Config(format!("unexpected csv header {header:?}")));
    }
    let num = |s: &str, what: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::Config(format!("bad {what} {s:?} in csv")))
    };
    let mut out = Vec::new();
    for row in r.records() {
        let row = row.map_err(csv_err)?;
        let alpha = row
            .iter()
            .skip(FIXED.len())
            .filter(|s| !s.is_empty())
            .map(|s| num(s, "alpha"))
            .collect::<Result<Vec<_>>>()?;
        out.push(IterationRecord {
            iteration: row[0]
                .parse()
                .map_err(|_| Error::Config(format!("bad iteration {:?} in csv", &row[0])))?,
            measure: row[1].to_string(),
            value: num(&row[2], "value")?,
            wall_seconds: num(&row[3], "wall_seconds")?,
            alpha,
        });
    }
    Ok(out)
}

/// Writes `records.csv`, `summary.json` and `policy.json` into `dir`.
pub fn write_outputs(dir: &Path, tree: &GameTree, output: &RunOutput) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("records.csv"), records_to_csv(&output.records)?)?;
    let summary = serde_json::to_string_pretty(&output.summary)
        .map_err(|e| Error::Io(format!("json: {e}")))?;
    fs::write(dir.join("summary.json"), summary + "\n")?;
    fs::write(dir.join("policy.json"), output.policy.to_json(tree) + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let records = vec![
            IterationRecord {
                iteration: 1,
                measure: "nash_conv".into(),
                value: 0.1 + 0.2,
                wall_seconds: 0.0,
                alpha: vec![1e-6, 1.0 / 3.0],
            },
            IterationRecord {
                iteration: 2,
                measure: "nash_conv".into(),
                value: 1e-300,
                wall_seconds: 1.5,
                alpha: vec![0.25, 0.5],
            },
        ];
        let text = records_to_csv(&records).unwrap();
        assert!(text.starts_with("iteration,measure,value,wall_seconds,alpha_0,alpha_1\n"));
        assert_eq!(parse_csv(&text).unwrap(), records);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(parse_csv("a,b\n1,2\n").is_err());
    }
}
