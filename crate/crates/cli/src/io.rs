//! Input parsing and output writing.

use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use hodgeq_core::{
    assemble_edge_signal, CliqueComplex, ComparisonRecord, Graph, HodgeError, PairwiseData, SimplicialSignal,
};
use serde::Serialize;

use crate::config::{Input, RunConfig};

/// Parses `voter,i,j,value` rows. A header row is skipped if present and
/// `#` lines are ignored. Errors carry 1-based line numbers.
pub fn parse_pairs(text: &str) -> Result<PairwiseData> {
    let mut records = Vec::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        // csv handles quoting; physical line numbers are tracked here
        let row = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(trimmed.as_bytes())
            .records()
            .next()
            .transpose()
            .map_err(|e| anyhow!("line {line}: {e}"))?
            .unwrap_or_default();
        let header = first && row.get(1).is_some_and(|f| f.eq_ignore_ascii_case("i"));
        first = false;
        if header {
            continue;
        }
        if row.len() != 4 {
            bail!("line {line}: expected 4 fields voter,i,j,value, got {}", row.len());
        }
        let index = |f: usize, name: &str| {
            row[f].parse::<usize>().map_err(|_| anyhow!("line {line}: {name} must be a vertex id, got {:?}", &row[f]))
        };
        let value: f64 = row[3].parse().map_err(|_| anyhow!("line {line}: value must be a number, got {:?}", &row[3]))?;
        records.push(ComparisonRecord { voter: row[0].to_string(), i: index(1, "i")?, j: index(2, "j")?, value });
    }
    PairwiseData::new(records, None).map_err(Into::into)
}

/// Whitespace-separated values, `#` comments allowed.
pub fn parse_signal(text: &str, k: usize) -> Result<SimplicialSignal> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| anyhow!("signal line {}: bad value {tok:?}", i + 1))?;
            if !v.is_finite() {
                bail!("signal line {}: non-finite value", i + 1);
            }
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(HodgeError::EmptyData.into());
    }
    Ok(SimplicialSignal::new(k, values))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// A complex, a degree and a signal on its k-simplices.
#[derive(Clone, Debug)]
pub struct Problem {
    pub complex: CliqueComplex,
    pub k: usize,
    pub signal: SimplicialSignal,
}

/// Builds the clique complex up to dimension `k + 1` so that the curl part
/// of a k-signal is available.
pub fn complex_for(graph: Graph, k: usize) -> Result<CliqueComplex> {
    let complex = CliqueComplex::build_full(graph, k + 1)?;
    if complex.max_dim() < k || complex.count(k) == 0 {
        return Err(HodgeError::NoSimplices { k }.into());
    }
    Ok(complex)
}

pub fn load_problem(cfg: &RunConfig) -> Result<Problem> {
    match &cfg.input {
        Input::Pairs(path) => {
            if cfg.k != 1 {
                bail!("pairwise data gives an edge signal; use k = 1");
            }
            let data = parse_pairs(&read(path)?).with_context(|| path.display().to_string())?;
            let (graph, signal) = assemble_edge_signal(&data)?;
            Ok(Problem { complex: complex_for(graph, 1)?, k: 1, signal })
        }
        Input::EdgesAndSignal { edges, signal } => {
            let graph = Graph::from_edge_list(&read(edges)?).with_context(|| edges.display().to_string())?;
            let complex = complex_for(graph, cfg.k)?;
            let signal = parse_signal(&read(signal)?, cfg.k).with_context(|| signal.display().to_string())?;
            signal.check_against(&complex)?;
            Ok(Problem { complex, k: cfg.k, signal })
        }
        Input::RankResult(_) | Input::None => bail!("this command needs --pairs or --edges with --signal"),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

/// Writes to `--out` when given, otherwise to stdout.
pub fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_with_header_and_comments() {
        let data = parse_pairs("voter,i,j,value\n# note\na,0,1,1.0\nb,2,1,-1.0\n").unwrap();
        assert_eq!(data.n(), 3);
        assert_eq!(data.records()[1], ComparisonRecord { voter: "b".into(), i: 1, j: 2, value: 1.0 });
    }

    #[test]
    fn malformed_rows_report_their_line() {
        let err = parse_pairs("a,0,1,1\nb,0,x,1\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = parse_pairs("a,0,1,1\n\nb,0,2\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let err = parse_pairs("# c\n\n\"x, y\",0,1,yes\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(parse_pairs("").unwrap_err().to_string(), "empty data");
        assert_eq!(parse_pairs("voter,i,j,value\n").unwrap_err().to_string(), "empty data");
        assert_eq!(parse_signal("# nothing\n", 1).unwrap_err().to_string(), "empty data");
    }

    #[test]
    fn signal_values() {
        let s = parse_signal("1 2\n-0.5 # last\n", 1).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, -0.5]);
        assert!(parse_signal("1 two", 1).unwrap_err().to_string().contains("line 1"));
    }
}
