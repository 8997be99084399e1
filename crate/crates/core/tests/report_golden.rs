use std::path::PathBuf;

use docrel::embeddings::ConcatScheme;
use docrel::evaluation::{
    aggregate_folds, prf_scores, render_report, render_summary, ConfusionMatrix, ReportFormat, SummaryRow,
};
use docrel::RelationClass;

fn fold(cells: &[(RelationClass, RelationClass, usize)]) -> ConfusionMatrix {
    ConfusionMatrix::from_pairs(cells.iter().flat_map(|&(t, p, n)| std::iter::repeat_n((t, p), n)))
}

fn fixture() -> (docrel::evaluation::AggregateReport, ConfusionMatrix) {
    use RelationClass as R;
    let a = fold(&[
        (R::CountryOfCitizenship, R::CountryOfCitizenship, 9),
        (R::EducatedAt, R::EducatedAt, 5),
        (R::EducatedAt, R::Employer, 2),
        (R::Employer, R::Employer, 4),
        (R::HasEffect, R::Symptoms, 1),
        (R::Symptoms, R::Symptoms, 3),
        (R::None, R::None, 20),
        (R::None, R::DifferentFrom, 1),
    ]);
    let b = fold(&[
        (R::CountryOfCitizenship, R::CountryOfCitizenship, 10),
        (R::EducatedAt, R::EducatedAt, 6),
        (R::Employer, R::EducatedAt, 1),
        (R::Employer, R::Employer, 3),
        (R::HasEffect, R::HasEffect, 1),
        (R::OppositeOf, R::DifferentFrom, 2),
        (R::None, R::None, 21),
    ]);
    let report = aggregate_folds(&[prf_scores(&a), prf_scores(&b)]).unwrap();
    let mut total = a.clone();
    total.merge(&b).unwrap();
    (report, total)
}

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("DOCREL_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(
        actual,
        expected,
        "{} differs; rerun with DOCREL_BLESS=1 after review",
        path.display()
    );
}

#[test]
fn text_report_matches_golden() {
    let (report, conf) = fixture();
    golden("report.txt", &render_report(&report, &conf, ReportFormat::Text));
}

#[test]
fn csv_report_matches_golden() {
    let (report, conf) = fixture();
    golden("report.csv", &render_report(&report, &conf, ReportFormat::Csv));
}

#[test]
fn summary_matches_golden() {
    let (report, _) = fixture();
    let rows = [
        SummaryRow::new("AvgGloVe", ConcatScheme::UvDiffProd.notation(), &report),
        SummaryRow::new("Doc2vec", ConcatScheme::Uv.notation(), &report),
    ];
    golden("summary.txt", &render_summary(&rows, ReportFormat::Text));
}
