//! Plain-text, CSV and JSON renderings of evaluation results, plus an SVG
//! heat map of the normalized confusion matrix.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::confusion::ConfusionMatrix;
use super::metrics::{AggregateReport, MeanStd, PrfSummary};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Text => "txt",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "text" | "txt" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!(
                "unknown report format {other:?} (expected text, csv or json)"
            ))),
        }
    }
}

/// One row of the configuration comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: String,
    pub scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq_len: Option<usize>,
    pub micro_f1: MeanStd,
}

impl SummaryRow {
    pub fn new(model: impl Into<String>, scheme: impl Into<String>, report: &AggregateReport) -> Self {
        Self {
            model: model.into(),
            scheme: scheme.into(),
            seq_len: None,
            micro_f1: report.micro.f1,
        }
    }
}

/// Configuration comparison: micro F1 with its standard deviation across folds.
pub fn render_summary(rows: &[SummaryRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => json(rows),
        ReportFormat::Csv => {
            let mut out = String::from("model,scheme,seq_len,micro_f1,std\n");
            for r in rows {
                let seq = r.seq_len.map(|s| s.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{:.4},{:.4}",
                    csv_field(&r.model),
                    csv_field(&r.scheme),
                    seq,
                    r.micro_f1.mean,
                    r.micro_f1.std
                );
            }
            out
        }
        ReportFormat::Text => {
            let mw = rows.iter().map(|r| r.model.len()).max().unwrap_or(0).max(5);
            let sw = rows.iter().map(|r| r.scheme.len()).max().unwrap_or(0).max(6);
            let mut out = format!(
                "{:<mw$}  {:<sw$}  {:>7}  {:>8}  {:>7}\n",
                "model", "scheme", "seq_len", "micro-F1", "std"
            );
            for r in rows {
                let seq = r.seq_len.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    out,
                    "{:<mw$}  {:<sw$}  {:>7}  {:>8.3}  {:>7}",
                    r.model,
                    r.scheme,
                    seq,
                    r.micro_f1.mean,
                    format!("±{:.4}", r.micro_f1.std)
                );
            }
            out
        }
    }
}

/// Per-class precision, recall, F1 and support (fold means), followed by
/// the micro and macro averages.
pub fn render_class_table(report: &AggregateReport, format: ReportFormat) -> String {
    let rows: Vec<(&str, &PrfSummary, f64)> = report
        .per_class
        .iter()
        .map(|c| (c.class.as_str(), &c.scores, c.support))
        .collect();
    let footer = [
        ("micro avg", &report.micro, report.support),
        ("macro avg", &report.macro_avg, report.support),
    ];
    match format {
        ReportFormat::Json => json(report),
        ReportFormat::Csv => {
            let mut out = String::from("class,precision,recall,f1,f1_std,support\n");
            if !rows.is_empty() {
                for (name, s, support) in rows.iter().copied().chain(footer) {
                    let _ = writeln!(
                        out,
                        "{},{:.4},{:.4},{:.4},{:.4},{}",
                        csv_field(name),
                        s.precision.mean,
                        s.recall.mean,
                        s.f1.mean,
                        s.f1.std,
                        support
                    );
                }
            }
            out
        }
        ReportFormat::Text => {
            let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(9);
            let mut out = format!(
                "{:<w$}  {:>9}  {:>6}  {:>6}  {:>7}\n",
                "class", "precision", "recall", "f1", "support"
            );
            if rows.is_empty() {
                return out;
            }
            let line = |out: &mut String, (name, s, support): (&str, &PrfSummary, f64)| {
                let _ = writeln!(
                    out,
                    "{:<w$}  {:>9.3}  {:>6.3}  {:>6.3}  {:>7.2}",
                    name, s.precision.mean, s.recall.mean, s.f1.mean, support
                );
            };
            for r in rows {
                line(&mut out, r);
            }
            let _ = writeln!(out, "{}", "-".repeat(w + 38));
            for r in footer {
                line(&mut out, r);
            }
            out
        }
    }
}

/// Row-normalized confusion matrix.
pub fn render_confusion(conf: &ConfusionMatrix, format: ReportFormat) -> String {
    let norm = conf.row_normalized();
    match format {
        ReportFormat::Json => {
            #[derive(Serialize)]
            struct View<'a> {
                classes: &'a [String],
                counts: Vec<&'a [u64]>,
                normalized: &'a [Vec<f64>],
            }
            json(&View {
                classes: &conf.classes,
                counts: (0..conf.n()).map(|t| conf.row(t)).collect(),
                normalized: &norm,
            })
        }
        ReportFormat::Csv => {
            let mut out = String::from("true\\predicted");
            for c in &conf.classes {
                out.push(',');
                out.push_str(&csv_field(c));
            }
            out.push('\n');
            for (c, row) in conf.classes.iter().zip(&norm) {
                out.push_str(&csv_field(c));
                for v in row {
                    let _ = write!(out, ",{v:.4}");
                }
                out.push('\n');
            }
            out
        }
        ReportFormat::Text => {
            let digits = conf.n().saturating_sub(1).to_string().len();
            let w = conf
                .classes
                .iter()
                .map(|c| c.len() + digits + 1)
                .max()
                .unwrap_or(0)
                .max(4);
            let mut out = format!("{:<w$}", "true");
            for i in 0..conf.n() {
                let _ = write!(out, " {:>5}", i);
            }
            out.push('\n');
            for (i, (c, row)) in conf.classes.iter().zip(&norm).enumerate() {
                let _ = write!(out, "{:<w$}", format!("{i:>digits$} {c}"));
                for v in row {
                    let _ = write!(out, " {:>5.2}", v);
                }
                out.push('\n');
            }
            out
        }
    }
}

/// Class table followed by the normalized confusion matrix; for JSON a
/// single object holding both.
pub fn render_report(report: &AggregateReport, conf: &ConfusionMatrix, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            #[derive(Serialize)]
            struct Full<'a> {
                report: &'a AggregateReport,
                confusion: &'a ConfusionMatrix,
                confusion_normalized: Vec<Vec<f64>>,
            }
            json(&Full {
                report,
                confusion: conf,
                confusion_normalized: conf.row_normalized(),
            })
        }
        _ => {
            let mut out = render_class_table(report, format);
            if format == ReportFormat::Text {
                if !report.folds.is_empty() {
                    let _ = writeln!(
                        out,
                        "\nmicro F1 over {} fold(s): {:.3} ± {:.4}{}",
                        report.folds.len(),
                        report.micro.f1.mean,
                        report.micro.f1.std,
                        if report.std_undefined { " (std undefined)" } else { "" }
                    );
                }
                out.push_str("\nconfusion (row-normalized):\n");
            } else {
                out.push('\n');
            }
            out.push_str(&render_confusion(conf, format));
            out
        }
    }
}

/// Heat map of the row-normalized confusion matrix.
pub fn confusion_svg(conf: &ConfusionMatrix) -> String {
    let n = conf.n();
    let cell = 44;
    let label_w = 12 + 7 * conf.classes.iter().map(|c| c.len()).max().unwrap_or(0);
    let top = label_w;
    let (w, h) = (label_w + n * cell + 10, top + n * cell + 10);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"11\">\n"
    );
    for (i, c) in conf.classes.iter().enumerate() {
        let y = top + i * cell + cell / 2 + 4;
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{y}\" text-anchor=\"end\">{}</text>",
            label_w - 6,
            xml_escape(c)
        );
        let x = label_w + i * cell + cell / 2 + 4;
        let _ = writeln!(
            out,
            "<text x=\"{x}\" y=\"{}\" transform=\"rotate(-60 {x} {})\">{}</text>",
            top - 6,
            top - 6,
            xml_escape(c)
        );
    }
    for (t, row) in conf.row_normalized().iter().enumerate() {
        for (p, &v) in row.iter().enumerate() {
            let shade = (255.0 * (1.0 - v)).round() as u8;
            let (x, y) = (label_w + p * cell, top + t * cell);
            let _ = writeln!(
                out,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"rgb({shade},{shade},255)\" stroke=\"#ccc\"/>"
            );
            let color = if v > 0.5 { "white" } else { "black" };
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"{color}\">{v:.2}</text>",
                x + cell / 2,
                y + cell / 2 + 4
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
