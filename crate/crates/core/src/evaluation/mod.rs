//! Stratified cross-validation and classification metrics.

pub mod confusion;
pub mod folds;
pub mod metrics;
pub mod report;

pub use confusion::{confusion, ConfusionMatrix};
pub use folds::{stratified_kfold, FoldAssignment};
pub use metrics::{
    aggregate_folds, prf_scores, AggregateReport, ClassScores, ClassSummary, EvalReport, MeanStd, Prf, PrfSummary,
};
pub use report::{
    confusion_svg, render_class_table, render_confusion, render_report, render_summary, ReportFormat, SummaryRow,
};
