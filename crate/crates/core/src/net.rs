//! Edge-list ingestion and degree extraction for directed ownership networks.
//!
//! An edge `owner -> owned` records that `owner` holds shares of `owned`.
//! Out-degree counts distinct companies held (diversification), in-degree
//! counts distinct shareholders (integration). Zero degrees are excluded from
//! the analysis samples.

use std::io::Read;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeFormat {
    Csv,
    Tsv,
}

impl EdgeFormat {
    fn delimiter(self) -> u8 {
        match self {
            EdgeFormat::Csv => b',',
            EdgeFormat::Tsv => b'\t',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub owner: String,
    pub owned: String,
}

/// A normalized edge list: no self-loops, no repeated `(owner, owned)` pairs.
/// Edges keep their first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeList {
    edges: Vec<Edge>,
}

/// Rows discarded while normalizing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounts {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl EdgeList {
    /// Builds a normalized edge list from raw `(owner, owned)` pairs.
    pub fn from_pairs<I, S>(pairs: I) -> (Self, DropCounts)
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut seen = IndexSet::new();
        let mut dropped = DropCounts::default();
        for (owner, owned) in pairs {
            let edge = Edge {
                owner: owner.into(),
                owned: owned.into(),
            };
            if edge.owner == edge.owned {
                dropped.self_loops += 1;
            } else if !seen.insert(edge) {
                dropped.duplicates += 1;
            }
        }
        let edges = seen.into_iter().collect();
        (EdgeList { edges }, dropped)
    }

    pub fn normalize(&self) -> (Self, DropCounts) {
        Self::from_pairs(
            self.edges
                .iter()
                .map(|e| (e.owner.clone(), e.owned.clone())),
        )
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Result of [`load_edge_list`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedEdges {
    pub edges: EdgeList,
    pub dropped: DropCounts,
    pub header_skipped: bool,
}

fn is_numeric(token: &str) -> bool {
    token.parse::<f64>().is_ok()
}

fn looks_like_header(fields: &[&str]) -> bool {
    if fields.len() >= 3 && !is_numeric(fields[2]) {
        return true;
    }
    fields.len() >= 2
        && fields[0].eq_ignore_ascii_case("owner")
        && fields[1].eq_ignore_ascii_case("owned")
}

/// Reads `owner,owned[,weight]` rows. Lines starting with `#` are comments; a
/// header row is detected on the first record. The weight column is validated
/// as numeric and otherwise ignored.
pub fn load_edge_list<R: Read>(source: R, format: EdgeFormat) -> Result<LoadedEdges> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut pairs = Vec::new();
    let mut header_skipped = false;
    let mut first = true;
    let mut record = csv::StringRecord::new();
    loop {
        let line_hint = reader.position().line();
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(line_hint);
                return Err(Error::Parse {
                    line,
                    message: e.to_string(),
                });
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(line_hint);
        let fields: Vec<&str> = record.iter().collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        if first {
            first = false;
            if looks_like_header(&fields) {
                header_skipped = true;
                continue;
            }
        }
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 or 3 columns, found {}", fields.len()),
            });
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty node identifier".into(),
            });
        }
        if fields.len() == 3 && !is_numeric(fields[2]) {
            return Err(Error::Parse {
                line,
                message: format!("non-numeric weight {:?}", fields[2]),
            });
        }
        pairs.push((fields[0].to_owned(), fields[1].to_owned()));
    }

    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (edges, dropped) = EdgeList::from_pairs(pairs);
    Ok(LoadedEdges {
        edges,
        dropped,
        header_skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub node_id: String,
    pub k_in: usize,
    pub k_out: usize,
}

/// One record per node, in order of first appearance in the edge list.
pub fn degree_sequences(edges: &EdgeList) -> Vec<DegreeRecord> {
    let mut table: IndexMap<&str, (usize, usize)> = IndexMap::new();
    for e in edges.edges() {
        table.entry(&e.owner).or_default().1 += 1;
        table.entry(&e.owned).or_default().0 += 1;
    }
    table
        .into_iter()
        .map(|(id, (k_in, k_out))| DegreeRecord {
            node_id: id.to_owned(),
            k_in,
            k_out,
        })
        .collect()
}

/// Paired `(k_in, k_out)` observations with both degrees positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSample {
    pub pairs: Vec<(usize, usize)>,
    pub n_in_max: usize,
    pub n_out_max: usize,
}

impl DegreeSample {
    /// Support bounds default to the observed maxima.
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::DegenerateSample("no pairs".into()));
        }
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i == 0 || j == 0) {
            return Err(Error::DegenerateSample(format!(
                "zero degree in pair ({i}, {j})"
            )));
        }
        let n_in_max = pairs.iter().map(|p| p.0).max().unwrap_or(0);
        let n_out_max = pairs.iter().map(|p| p.1).max().unwrap_or(0);
        Ok(DegreeSample {
            pairs,
            n_in_max,
            n_out_max,
        })
    }

    pub fn k_in(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn k_out(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// Nodes with `k_in >= 1` and `k_out >= 1`.
    #[default]
    JointPositive,
    /// Each degree filtered on its own positivity.
    MarginalPositive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Samples {
    Joint(DegreeSample),
    Marginal { k_in: Vec<usize>, k_out: Vec<usize> },
}

pub fn build_degree_sample(records: &[DegreeRecord], mode: SampleMode) -> Result<Samples> {
    if records.is_empty() {
        return Err(Error::DegenerateSample("no degree records".into()));
    }
    match mode {
        SampleMode::JointPositive => {
            let pairs: Vec<_> = records
                .iter()
                .filter(|r| r.k_in >= 1 && r.k_out >= 1)
                .map(|r| (r.k_in, r.k_out))
                .collect();
            if pairs.is_empty() {
                return Err(Error::DegenerateSample(
                    "no node has both degrees positive".into(),
                ));
            }
            DegreeSample::new(pairs).map(Samples::Joint)
        }
        SampleMode::MarginalPositive => {
            let k_in: Vec<_> = records.iter().map(|r| r.k_in).filter(|&k| k > 0).collect();
            let k_out: Vec<_> = records.iter().map(|r| r.k_out).filter(|&k| k > 0).collect();
            if k_in.is_empty() || k_out.is_empty() {
                return Err(Error::DegenerateSample(
                    "a marginal sample is empty after removing zeros".into(),
                ));
            }
            Ok(Samples::Marginal { k_in, k_out })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<LoadedEdges> {
        load_edge_list(text.as_bytes(), EdgeFormat::Csv)
    }

    fn rec(id: &str, k_in: usize, k_out: usize) -> DegreeRecord {
        DegreeRecord {
            node_id: id.into(),
            k_in,
            k_out,
        }
    }

    #[test]
    fn parses_simple_edges() {
        let l = load("A,B\nB,C").unwrap();
        assert_eq!(l.edges.len(), 2);
        assert_eq!(l.dropped, DropCounts::default());
    }

    #[test]
    fn drops_self_loops() {
        let l = load("A,A\nA,B").unwrap();
        assert_eq!(l.edges.len(), 1);
        assert_eq!(l.dropped.self_loops, 1);
    }

    #[test]
    fn collapses_duplicates() {
        let l = load("A,B\nA,B").unwrap();
        assert_eq!(l.edges.len(), 1);
        assert_eq!(l.dropped.duplicates, 1);
    }

    #[test]
    fn header_comments_and_weights() {
        let l = load("# cross holdings\nowner,owned,fraction\nA,B,0.25\n\nB,C,0.1\n").unwrap();
        assert!(l.header_skipped);
        assert_eq!(l.edges.len(), 2);

        let l = load("owner,owned\nA,B\n").unwrap();
        assert!(l.header_skipped);
        assert_eq!(l.edges.len(), 1);

        // numeric third column on the first row is data
        let l = load("A,B,0.5\nB,C,0.2").unwrap();
        assert!(!l.header_skipped);
        assert_eq!(l.edges.len(), 2);
    }

    #[test]
    fn tsv_input() {
        let l = load_edge_list("A\tB\nB\tC\n".as_bytes(), EdgeFormat::Tsv).unwrap();
        assert_eq!(l.edges.len(), 2);
    }

    #[test]
    fn malformed_row_reports_line() {
        match load("A,B\nB,C,0.1,9\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match load("A,B\nC\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match load("A,B\nB,C,heavy\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_input() {
        assert!(matches!(load(""), Err(Error::EmptyInput)));
        assert!(matches!(load("# only a comment\n"), Err(Error::EmptyInput)));
    }

    #[test]
    fn degrees_of_small_graph() {
        let (el, _) = EdgeList::from_pairs([("A", "B"), ("A", "C"), ("B", "C")]);
        assert_eq!(
            degree_sequences(&el),
            vec![rec("A", 0, 2), rec("B", 1, 1), rec("C", 2, 0)]
        );

        let (el, _) = EdgeList::from_pairs([("A", "B")]);
        assert_eq!(degree_sequences(&el), vec![rec("A", 0, 1), rec("B", 1, 0)]);
    }

    #[test]
    fn degrees_of_star() {
        let pairs: Vec<_> = (1..=5)
            .map(|i| ("H".to_string(), format!("X{i}")))
            .collect();
        let (el, _) = EdgeList::from_pairs(pairs);
        let recs = degree_sequences(&el);
        assert_eq!(recs[0], rec("H", 0, 5));
        for r in &recs[1..] {
            assert_eq!((r.k_in, r.k_out), (1, 0));
        }
    }

    #[test]
    fn sample_modes() {
        let recs = vec![rec("A", 0, 2), rec("B", 1, 1), rec("C", 2, 0)];
        match build_degree_sample(&recs, SampleMode::JointPositive).unwrap() {
            Samples::Joint(s) => {
                assert_eq!(s.pairs, vec![(1, 1)]);
                assert_eq!((s.n_in_max, s.n_out_max), (1, 1));
            }
            other => panic!("{other:?}"),
        }
        match build_degree_sample(&recs, SampleMode::MarginalPositive).unwrap() {
            Samples::Marginal { k_in, k_out } => {
                assert_eq!(k_in, vec![1, 2]);
                assert_eq!(k_out, vec![2, 1]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn all_zero_records_are_degenerate() {
        let recs = vec![rec("A", 0, 0), rec("B", 0, 0)];
        for mode in [SampleMode::JointPositive, SampleMode::MarginalPositive] {
            assert!(matches!(
                build_degree_sample(&recs, mode),
                Err(Error::DegenerateSample(_))
            ));
        }
        assert!(build_degree_sample(&[], SampleMode::JointPositive).is_err());
    }
}
