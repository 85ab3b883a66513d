//! Rendering [`TrialStats`] as Markdown or CSV.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use crate::bench::experiment::{improvement, AlgoSummary, TrialStats};
use crate::error::{ClusterError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Markdown,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = ClusterError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "" | "md" | "markdown" => Ok(Self::Markdown),
            "csv" => Ok(Self::Csv),
            other => Err(ClusterError::InvalidConfig(format!("unknown output format {other:?}"))),
        }
    }
}

fn percent(value: Option<f64>, csv: bool) -> String {
    match value {
        Some(v) if csv => format!("{v:.2}"),
        Some(v) => format!("{v:.2}%"),
        None if csv => String::new(),
        None => "n/a".into(),
    }
}

type Metric = fn(&AlgoSummary) -> f64;

/// Renders one row per `(m, k)` cell. The first algorithm is the baseline.
/// For each of average potential, minimum potential and average time the
/// baseline value is followed by the improvement of every other algorithm,
/// `100·(1 − other/baseline)`.
pub fn render_table(stats: &TrialStats, format: OutputFormat) -> String {
    let csv = format == OutputFormat::Csv;
    let Some(first) = stats.rows.first() else {
        return String::new();
    };
    let base = first.results[0].algorithm;
    let others: Vec<_> = first.results[1..].iter().map(|s| s.algorithm).collect();

    let mut header = vec!["m".to_string(), "k".to_string()];
    for metric in ["avg phi", "min phi", "avg T (s)"] {
        header.push(format!("{base} {metric}"));
        for alg in &others {
            header.push(format!("{alg} {metric} impr"));
        }
    }

    let mut out = String::new();
    if csv {
        out.push_str(&header.join(","));
        out.push('\n');
    } else {
        let _ = writeln!(out, "{} trials on {}", stats.trials, stats.dataset);
        out.push('\n');
        let _ = writeln!(out, "| {} |", header.join(" | "));
        let _ = writeln!(out, "|{}", "---:|".repeat(header.len()));
    }

    for row in &stats.rows {
        let phi = |v: f64| if csv { format!("{v:.6e}") } else { format!("{v:.4e}") };
        let mut cells = vec![row.m.to_string(), row.k.to_string()];
        let metrics: [(Metric, bool); 3] = [
            (|s| s.avg_potential, true),
            (|s| s.min_potential, true),
            (|s| s.avg_time, false),
        ];
        for (get, is_phi) in metrics {
            let b = get(&row.results[0]);
            cells.push(if is_phi { phi(b) } else { format!("{b:.4}") });
            for s in &row.results[1..] {
                cells.push(percent(improvement(b, get(s)), csv));
            }
        }
        if csv {
            out.push_str(&cells.join(","));
            out.push('\n');
        } else {
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
    }
    out
}

pub fn emit_table<W: Write>(stats: &TrialStats, format: OutputFormat, mut out: W) -> Result<()> {
    out.write_all(render_table(stats, format).as_bytes())?;
    Ok(())
}
