//! Edit-distance accuracy of OCR hypotheses against dataset labels.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::error::{Error, Result};
use crate::groundtruth::{DatasetManifest, RecordKind, Split, MANIFEST_FILE};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub insertions: usize,
    pub deletions: usize,
    pub substitutions: usize,
}

impl EditCounts {
    pub fn total(&self) -> usize {
        self.insertions + self.deletions + self.substitutions
    }
}

/// Edits turning `gt` into `hyp` along one minimal unit-cost alignment of
/// their grapheme clusters. Where alignments tie, a substitution is
/// preferred over a deletion, and a deletion over an insertion.
pub fn edit_counts(gt: &str, hyp: &str) -> EditCounts {
    let a: Vec<&str> = gt.graphemes(true).collect();
    let b: Vec<&str> = hyp.graphemes(true).collect();
    let (n, m) = (a.len(), b.len());
    let w = m + 1;
    let mut d = vec![0usize; (n + 1) * w];
    for j in 0..=m {
        d[j] = j;
    }
    for i in 1..=n {
        d[i * w] = i;
        for j in 1..=m {
            let diag = d[(i - 1) * w + j - 1] + usize::from(a[i - 1] != b[j - 1]);
            let del = d[(i - 1) * w + j] + 1;
            let ins = d[i * w + j - 1] + 1;
            d[i * w + j] = diag.min(del).min(ins);
        }
    }

    let mut c = EditCounts::default();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 {
            let sub = usize::from(a[i - 1] != b[j - 1]);
            if d[(i - 1) * w + j - 1] + sub == here {
                c.substitutions += sub;
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && d[(i - 1) * w + j] + 1 == here {
            c.deletions += 1;
            i -= 1;
        } else {
            c.insertions += 1;
            j -= 1;
        }
    }
    c
}

/// `max(0, 1 - edits / len(gt)) * 100`, with the length in graphemes.
pub fn accuracy(gt: &str, hyp: &str) -> Result<f64> {
    let len = gt.graphemes(true).count();
    if len == 0 {
        return Err(Error::UndefinedAccuracy);
    }
    Ok(accuracy_from(edit_counts(gt, hyp).total(), len))
}

fn accuracy_from(edits: usize, len: usize) -> f64 {
    ((1.0 - edits as f64 / len as f64) * 100.0).max(0.0)
}

/// Which records to score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchOptions {
    pub kind: RecordKind,
    /// Restrict to these splits; empty means all.
    pub splits: Vec<Split>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            kind: RecordKind::Word,
            splits: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordScore {
    pub id: String,
    pub split: Split,
    pub border: bool,
    pub gt: String,
    pub hyp: String,
    /// False when the hypothesis file had no line for this record.
    pub has_hypothesis: bool,
    pub gt_len: usize,
    pub edits: EditCounts,
    pub accuracy: f64,
}

/// Length-weighted totals over a set of records.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub records: usize,
    pub gt_len: usize,
    pub edits: usize,
    pub accuracy: f64,
}

impl Stratum {
    fn of<'a>(scores: impl Iterator<Item = &'a RecordScore>) -> Stratum {
        let mut s = Stratum::default();
        for r in scores {
            s.records += 1;
            s.gt_len += r.gt_len;
            s.edits += r.edits.total();
        }
        s.accuracy = if s.gt_len == 0 { 0.0 } else { accuracy_from(s.edits, s.gt_len) };
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub options: BenchOptions,
    pub corpus: Stratum,
    pub inside: Stratum,
    pub border: Stratum,
    /// Number of records per edit distance.
    pub histogram: BTreeMap<usize, usize>,
    pub missing_hypotheses: usize,
    /// Hypothesis ids that name no scored record; ignored.
    pub unknown_ids: Vec<String>,
    /// Accuracy is clamped at 0 and corpus figures are length-weighted.
    pub clamped_at_zero: bool,
    pub length_weighted: bool,
    pub records: Vec<RecordScore>,
}

/// Parse `record_id<TAB>hypothesis` lines. A line without a tab is an id
/// with an empty hypothesis; later duplicates win.
pub fn parse_hypotheses(text: &str) -> HashMap<String, String> {
    text.lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.is_empty())
        .map(|l| match l.split_once('\t') {
            Some((id, hyp)) => (id.to_string(), hyp.to_string()),
            None => (l.to_string(), String::new()),
        })
        .collect()
}

/// Score records of `dataset_dir` against hypotheses keyed by record id.
pub fn benchmark_with(
    dataset_dir: &Path,
    hyps: &HashMap<String, String>,
    options: &BenchOptions,
) -> Result<BenchReport> {
    let manifest = DatasetManifest::load(dataset_dir.join(MANIFEST_FILE))?;
    let selected: Vec<_> = manifest
        .records
        .iter()
        .filter(|r| r.kind == options.kind)
        .filter(|r| options.splits.is_empty() || options.splits.contains(&r.split))
        .collect();

    let records: Vec<RecordScore> = selected
        .par_iter()
        .map(|r| -> Result<RecordScore> {
            let path = dataset_dir.join(&r.path).join("gt.txt");
            let gt = fs::read_to_string(&path).map_err(|e| Error::from(e).at(&path))?;
            let hyp = hyps.get(&r.id);
            let hyp_text = hyp.cloned().unwrap_or_default();
            let gt_len = gt.graphemes(true).count();
            let edits = edit_counts(&gt, &hyp_text);
            Ok(RecordScore {
                id: r.id.clone(),
                split: r.split,
                border: r.border,
                accuracy: if gt_len == 0 { 0.0 } else { accuracy_from(edits.total(), gt_len) },
                gt,
                hyp: hyp_text,
                has_hypothesis: hyp.is_some(),
                gt_len,
                edits,
            })
        })
        .collect::<Result<_>>()?;

    let known: std::collections::HashSet<&str> = records.iter().map(|r| r.id.as_str()).collect();
    let mut unknown_ids: Vec<String> =
        hyps.keys().filter(|k| !known.contains(k.as_str())).cloned().collect();
    unknown_ids.sort();
    for id in &unknown_ids {
        log::warn!("hypothesis for unknown record {id} ignored");
    }
    let mut histogram = BTreeMap::new();
    for r in &records {
        *histogram.entry(r.edits.total()).or_insert(0) += 1;
    }
    Ok(BenchReport {
        options: options.clone(),
        corpus: Stratum::of(records.iter()),
        inside: Stratum::of(records.iter().filter(|r| !r.border)),
        border: Stratum::of(records.iter().filter(|r| r.border)),
        histogram,
        missing_hypotheses: records.iter().filter(|r| !r.has_hypothesis).count(),
        unknown_ids,
        clamped_at_zero: true,
        length_weighted: true,
        records,
    })
}

/// Score word records of `dataset_dir` against the hypothesis TSV.
pub fn benchmark(dataset_dir: &Path, hyp_file: &Path) -> Result<BenchReport> {
    let text = fs::read_to_string(hyp_file).map_err(|e| Error::from(e).at(hyp_file))?;
    benchmark_with(dataset_dir, &parse_hypotheses(&text), &BenchOptions::default())
}

impl BenchReport {
    /// Human-readable summary table.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<10} {:>8} {:>10} {:>8} {:>10}", "stratum", "records", "gt_len", "edits", "accuracy");
        for (name, st) in [("all", &self.corpus), ("inside", &self.inside), ("border", &self.border)] {
            let _ = writeln!(
                s,
                "{:<10} {:>8} {:>10} {:>8} {:>9.2}%",
                name, st.records, st.gt_len, st.edits, st.accuracy
            );
        }
        let _ = writeln!(s, "missing hypotheses: {}", self.missing_hypotheses);
        if !self.unknown_ids.is_empty() {
            let _ = writeln!(s, "unknown ids ignored: {}", self.unknown_ids.len());
        }
        let _ = write!(s, "edit distance histogram:");
        for (d, n) in &self.histogram {
            let _ = write!(s, " {d}:{n}");
        }
        s.push('\n');
        s
    }
}
