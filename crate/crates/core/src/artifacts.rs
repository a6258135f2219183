//! Result files written and read back by the command-line tool.
//!
//! * scores: `rank<TAB>id<TAB>given_label<TAB>score<TAB>keep`, sorted by rank
//! * evidence: `instance_id<TAB>prototype_id<TAB>clique<TAB>contribution`
//! * id lists: one id per line
//!
//! Scores are printed with Rust's shortest round-trip formatting, so reading
//! a file back recovers the exact `f64` values.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::dataset::write_lines;
use crate::error::{Error, Result};
use crate::ranking::{CliqueType, Evidence, ScoreEntry, ScoreTable};

pub fn write_scores(path: &Path, table: &ScoreTable) -> Result<()> {
    let names = table.class_names();
    write_lines(
        path,
        table.ranked().into_iter().map(|e| {
            format!(
                "{}\t{}\t{}\t{}\t{}",
                e.rank,
                e.id,
                names[e.label],
                e.score,
                u8::from(e.keep)
            )
        }),
    )
}

pub fn write_evidence(path: &Path, table: &ScoreTable) -> Result<()> {
    write_lines(
        path,
        table.entries().iter().flat_map(|e| {
            e.evidence.iter().map(move |ev| {
                format!(
                    "{}\t{}\t{}\t{}",
                    e.id, ev.prototype_id, ev.clique, ev.contribution
                )
            })
        }),
    )
}

pub fn write_ids<'a>(path: &Path, ids: impl IntoIterator<Item = &'a str>) -> Result<()> {
    write_lines(path, ids)
}

pub fn read_ids(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

/// Class order for labels seen only as strings: numeric when every name is
/// an integer, lexicographic otherwise.
pub fn infer_class_order<'a>(names: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut unique: Vec<String> = names.into_iter().map(str::to_string).collect();
    unique.sort();
    unique.dedup();
    if unique.iter().all(|n| n.parse::<u64>().is_ok()) {
        unique.sort_by_key(|n| n.parse::<u64>().unwrap());
    }
    unique
}

/// Reads a score file back into a table, keeping its keep flags.
///
/// With `classes` unset the class order comes from [`infer_class_order`].
/// The table carries no evidence until [`attach_evidence`] is called.
pub fn read_scores(path: &Path, classes: Option<&[String]>, delta: f64) -> Result<ScoreTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ctx = path.display().to_string();
    let mut parsed = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Error::format(&ctx, format!("line {}: {what}", lineno + 1));
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(bad("expected 5 tab-separated columns"));
        }
        let rank: usize = cols[0].parse().map_err(|_| bad("bad rank"))?;
        let score: f64 = cols[3].parse().map_err(|_| bad("bad score"))?;
        let keep = match cols[4] {
            "0" => false,
            "1" => true,
            _ => return Err(bad("keep must be 0 or 1")),
        };
        parsed.push((rank, cols[1].to_string(), cols[2].to_string(), score, keep));
    }
    if parsed.is_empty() {
        return Err(Error::Empty(format!("{ctx} has no rows")));
    }

    let class_names = match classes {
        Some(c) => c.to_vec(),
        None => infer_class_order(parsed.iter().map(|p| p.2.as_str())),
    };
    let lookup: HashMap<&str, usize> = class_names
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let mut seen = HashMap::new();
    let mut entries = Vec::with_capacity(parsed.len());
    for (rank, id, label, score, keep) in &parsed {
        let label = *lookup
            .get(label.as_str())
            .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
        if seen.insert(id.clone(), ()).is_some() {
            return Err(Error::DuplicateId(id.clone()));
        }
        entries.push(ScoreEntry {
            id: id.clone(),
            label,
            score: *score,
            rank: *rank,
            keep: *keep,
            evidence: Vec::new(),
        });
    }

    let mut ranks: Vec<usize> = entries.iter().map(|e| e.rank).collect();
    ranks.sort_unstable();
    if ranks.iter().enumerate().any(|(i, &r)| r != i + 1) {
        return Err(Error::format(&ctx, "ranks are not a permutation of 1..N"));
    }
    Ok(ScoreTable::from_entries(entries, class_names, delta, false))
}

/// Loads an evidence file into `table`, attaching each pair to its instance.
pub fn attach_evidence(table: ScoreTable, path: &Path) -> Result<ScoreTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ctx = path.display().to_string();
    let (mut entries, class_names, delta) = table.into_parts();
    let pos: HashMap<String, usize> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.clone(), i))
        .collect();
    for e in &mut entries {
        e.evidence.clear();
    }
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Error::format(&ctx, format!("line {}: {what}", lineno + 1));
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(bad("expected 4 tab-separated columns"));
        }
        let inst = *pos
            .get(cols[0])
            .ok_or_else(|| Error::NotFound(cols[0].to_string()))?;
        let proto = *pos
            .get(cols[1])
            .ok_or_else(|| Error::NotFound(cols[1].to_string()))?;
        let clique: CliqueType = cols[2].parse().map_err(|_| bad("bad clique type"))?;
        let contribution: f64 = cols[3].parse().map_err(|_| bad("bad contribution"))?;
        let prototype_label = entries[proto].label;
        entries[inst].evidence.push(Evidence {
            prototype_id: cols[1].to_string(),
            prototype_label,
            clique,
            contribution,
        });
    }
    Ok(ScoreTable::from_entries(entries, class_names, delta, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ScoreTable {
        let ev = |p: &str, l, c, x| Evidence {
            prototype_id: p.to_string(),
            prototype_label: l,
            clique: c,
            contribution: x,
        };
        ScoreTable::from_scores(
            vec![
                ("a".into(), 0, -0.25, vec![ev("c", 1, CliqueType::C10, 0.1), ev("d", 0, CliqueType::C11, -0.35)]),
                ("b".into(), 1, 0.1 + 0.2, vec![ev("a", 0, CliqueType::C00, 0.1 + 0.2)]),
                ("c".into(), 1, 0.0, vec![]),
                ("d".into(), 0, 1e-300, vec![]),
            ],
            vec!["cat".into(), "dog".into()],
            0.0,
            true,
        )
    }

    #[test]
    fn scores_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let t = table();
        write_scores(&dir.path().join("s"), &t).unwrap();
        write_evidence(&dir.path().join("e"), &t).unwrap();
        let text = fs::read_to_string(dir.path().join("s")).unwrap();
        assert_eq!(text.lines().next().unwrap(), "1\tb\tdog\t0.30000000000000004\t0");

        let back = read_scores(&dir.path().join("s"), None, 0.0).unwrap();
        let mut by_id: Vec<_> = back.entries().to_vec();
        by_id.sort_by(|a, b| a.id.cmp(&b.id));
        let scores: Vec<f64> = by_id.iter().map(|e| e.score).collect();
        assert_eq!(scores, vec![-0.25, 0.1 + 0.2, 0.0, 1e-300]);
        assert!(!back.has_evidence());

        let full = attach_evidence(back, &dir.path().join("e")).unwrap();
        assert_eq!(full.get("a").unwrap().evidence, t.get("a").unwrap().evidence);
        assert_eq!(full.get("b").unwrap().evidence, t.get("b").unwrap().evidence);
    }

    #[test]
    fn class_order_inference() {
        assert_eq!(infer_class_order(["10", "2", "2"]), vec!["2", "10"]);
        assert_eq!(infer_class_order(["b", "a"]), vec!["a", "b"]);
    }

    #[test]
    fn malformed_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s");
        fs::write(&p, "1\ta\tx\t0.5\t2\n").unwrap();
        assert!(read_scores(&p, None, 0.0).is_err());
        fs::write(&p, "2\ta\tx\t0.5\t1\n").unwrap();
        assert!(read_scores(&p, None, 0.0).is_err());
    }
}
