//! Batch repair over a corpus of expressions, one per line.

use crate::ast::parse;
use crate::examples::{sample_examples, SampleConfig};
use crate::ltp::check_ltp;
use crate::matcher::Matcher;
use crate::repair::{repair, RepairConfig, RepairStatus};
use serde::Serialize;
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

/// Twenty expressions with super-linear backtracking behaviour.
pub const DESK_CORPUS: &str = include_str!("../data/desk_corpus.txt");

/// Non-empty lines of a corpus file.
pub fn entries(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Repaired,
    AlreadyLtp,
    Timeout,
    Infeasible,
    Error,
}

impl From<RepairStatus> for EntryStatus {
    fn from(s: RepairStatus) -> Self {
        match s {
            RepairStatus::Repaired => EntryStatus::Repaired,
            RepairStatus::AlreadyLtp => EntryStatus::AlreadyLtp,
            RepairStatus::Timeout => EntryStatus::Timeout,
            RepairStatus::Infeasible => EntryStatus::Infeasible,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusRecord {
    pub index: usize,
    pub input: String,
    pub status: EntryStatus,
    pub output: Option<String>,
    pub cost: Option<usize>,
    /// Whether a returned output was re-checked as linear-time and
    /// consistent with the examples.
    pub verified: Option<bool>,
    pub positives: usize,
    pub negatives: usize,
    pub elapsed_ms: u64,
    pub error: Option<String>,
}

/// Samples examples for one entry, repairs it, and re-verifies the output.
/// Failures of any kind, panics included, become an error record.
pub fn run_entry(index: usize, input: &str, cfg: &RepairConfig) -> CorpusRecord {
    let start = Instant::now();
    let mut rec = CorpusRecord {
        index,
        input: input.to_string(),
        status: EntryStatus::Error,
        output: None,
        cost: None,
        verified: None,
        positives: 0,
        negatives: 0,
        elapsed_ms: 0,
        error: None,
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| -> Result<(), String> {
        let r = parse(input).map_err(|e| e.to_string())?;
        let scfg = SampleConfig {
            count: cfg.example_count,
            seed: cfg.seed,
            ..Default::default()
        };
        let ex = sample_examples(&r, &scfg).map_err(|e| e.to_string())?;
        rec.positives = ex.positives.len();
        rec.negatives = ex.negatives.len();
        let res = repair(&r, &ex, cfg).map_err(|e| e.to_string())?;
        rec.status = res.status.into();
        rec.cost = res.cost;
        if let Some(out) = &res.output {
            let m = Matcher::new(out);
            let ok = check_ltp(out).satisfies
                && ex.positives.iter().all(|w| m.accepts(w) == Ok(true))
                && ex.negatives.iter().all(|w| m.accepts(w) == Ok(false));
            rec.verified = Some(ok);
            rec.output = Some(out.to_string());
        }
        Ok(())
    }));
    match outcome {
        Ok(Ok(())) => {}
        Ok(Err(e)) => {
            rec.status = EntryStatus::Error;
            rec.error = Some(e);
        }
        Err(panic) => {
            rec.status = EntryStatus::Error;
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "internal error".to_string());
            rec.error = Some(msg);
        }
    }
    rec.elapsed_ms = start.elapsed().as_millis() as u64;
    rec
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub entries: usize,
    pub repaired: usize,
    pub already_ltp: usize,
    pub timeout: usize,
    pub infeasible: usize,
    pub errors: usize,
    /// Outputs that failed re-verification.
    pub unverified: usize,
    pub cost_histogram: BTreeMap<usize, usize>,
    pub time_histogram: BTreeMap<String, usize>,
}

fn time_bucket(ms: u64) -> &'static str {
    match ms {
        0..=999 => "<1s",
        1000..=4999 => "1-5s",
        5000..=29_999 => "5-30s",
        _ => ">=30s",
    }
}

pub fn summarize(records: &[CorpusRecord]) -> CorpusSummary {
    let mut s = CorpusSummary {
        entries: records.len(),
        ..Default::default()
    };
    for r in records {
        match r.status {
            EntryStatus::Repaired => s.repaired += 1,
            EntryStatus::AlreadyLtp => s.already_ltp += 1,
            EntryStatus::Timeout => s.timeout += 1,
            EntryStatus::Infeasible => s.infeasible += 1,
            EntryStatus::Error => s.errors += 1,
        }
        if r.verified == Some(false) {
            s.unverified += 1;
        }
        if let (EntryStatus::Repaired, Some(c)) = (r.status, r.cost) {
            *s.cost_histogram.entry(c).or_default() += 1;
        }
        *s.time_histogram.entry(time_bucket(r.elapsed_ms).to_string()).or_default() += 1;
    }
    s
}
