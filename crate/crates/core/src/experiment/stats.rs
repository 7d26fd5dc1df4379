use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::{ReplicateRun, ReplicateSummary};
use crate::metrics::IterationReport;

/// Sample mean and (n-1) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(MeanStd { mean, std, n })
    }
}

type Field = fn(&ReplicateSummary) -> Option<f64>;

const SUMMARY_FIELDS: &[(&str, Field)] = &[
    ("baseline_latency", |s| s.baseline.avg_friend_latency),
    ("final_latency", |s| s.final_metrics.avg_friend_latency),
    ("latency_gain", |s| s.latency_gain),
    ("baseline_rel_finger", |s| Some(s.baseline.reliability_finger.mean)),
    ("final_rel_finger", |s| Some(s.final_metrics.reliability_finger.mean)),
    ("baseline_rel_1hop", |s| s.baseline.reliability_ihop.first().map(|u| u.mean)),
    ("final_rel_1hop", |s| s.final_metrics.reliability_ihop.first().map(|u| u.mean)),
    ("baseline_rel_2hop", |s| s.baseline.reliability_ihop.get(1).map(|u| u.mean)),
    ("final_rel_2hop", |s| s.final_metrics.reliability_ihop.get(1).map(|u| u.mean)),
    ("baseline_rel_3hop", |s| s.baseline.reliability_ihop.get(2).map(|u| u.mean)),
    ("final_rel_3hop", |s| s.final_metrics.reliability_ihop.get(2).map(|u| u.mean)),
    ("cumulative_migration_fraction", |s| s.cumulative_migration_fraction),
    ("movers_fraction", |s| Some(s.movers_fraction)),
    ("final_per_iter_fraction", |s| s.final_per_iter_fraction),
    ("first_quiet_iteration", |s| s.first_quiet_iteration.map(|i| i as f64)),
];

pub(super) fn aggregate_summaries(replicates: &[ReplicateSummary]) -> BTreeMap<String, MeanStd> {
    SUMMARY_FIELDS
        .iter()
        .filter_map(|(name, field)| {
            let values: Vec<f64> = replicates.iter().filter_map(field).collect();
            MeanStd::of(&values).map(|m| (name.to_string(), m))
        })
        .collect()
}

type Column = fn(&IterationReport) -> Option<f64>;

const ROW_COLUMNS: &[(&str, Column)] = &[
    ("avg_latency", |r| r.avg_friend_latency()),
    ("per_iter_fraction", |r| r.per_iteration_fraction()),
    ("cum_fraction", |r| r.cumulative_migration_fraction()),
    ("rel_finger", |r| r.metrics.as_ref().map(|m| m.reliability_finger.mean)),
    ("rel_1hop", |r| r.metrics.as_ref().and_then(|m| m.reliability_ihop.first()).map(|u| u.mean)),
    ("rel_2hop", |r| r.metrics.as_ref().and_then(|m| m.reliability_ihop.get(1)).map(|u| u.mean)),
    ("rel_3hop", |r| r.metrics.as_ref().and_then(|m| m.reliability_ihop.get(2)).map(|u| u.mean)),
    ("movers_fraction", |r| Some(r.movers_fraction)),
];

/// Per-iteration `<column>_mean,<column>_std` across replicates; a cell is empty unless
/// every replicate has a value for it.
pub(super) fn aggregate_csv(runs: &[ReplicateRun]) -> Vec<u8> {
    let mut out = Vec::new();
    let header: Vec<String> = std::iter::once("iteration".to_string())
        .chain(ROW_COLUMNS.iter().flat_map(|(c, _)| [format!("{c}_mean"), format!("{c}_std")]))
        .collect();
    writeln!(out, "{}", header.join(",")).expect("writing to memory");
    let rows = runs.iter().map(|r| r.reports.len()).min().unwrap_or(0);
    for row in 0..rows {
        let mut fields = vec![runs[0].reports[row].iteration.to_string()];
        for (_, column) in ROW_COLUMNS {
            let values: Option<Vec<f64>> = runs.iter().map(|r| column(&r.reports[row])).collect();
            match values.as_deref().and_then(MeanStd::of) {
                Some(m) => fields.extend([format!("{:.6}", m.mean), format!("{:.6}", m.std)]),
                None => fields.extend([String::new(), String::new()]),
            }
        }
        writeln!(out, "{}", fields.join(",")).expect("writing to memory");
    }
    out
}
