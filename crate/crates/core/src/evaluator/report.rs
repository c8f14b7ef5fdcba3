use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::EvalResult;
use crate::composer::CheckClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportLayout {
    /// mAP, AP_S, AP_M, AP_L, AR_S, AR_M, AR_L.
    Overall,
    /// Per-class AP followed by the overall mAP.
    ClassWise,
}

const CLASS_COLUMNS: [(&str, CheckClass); 6] = [
    ("Genuine", CheckClass::SignatureGenuine),
    ("Forged", CheckClass::SignatureForged),
    ("Date", CheckClass::Date),
    ("Courtesy", CheckClass::AmountCourtesy),
    ("Legal", CheckClass::AmountLegal),
    ("Payee", CheckClass::Payee),
];

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "—".to_string(), |v| format!("{:.1}", 100.0 * v))
}

/// Aligned plain-text table with a single row labelled `row_label`.
/// Metrics are shown as percentages; undefined values as "—".
pub fn report(result: &EvalResult, layout: ReportLayout, row_label: &str) -> String {
    let (headers, values): (Vec<&str>, Vec<Option<f64>>) = match layout {
        ReportLayout::Overall => (
            vec!["mAP", "AP_S", "AP_M", "AP_L", "AR_S", "AR_M", "AR_L"],
            vec![
                result.map,
                result.ap_small,
                result.ap_medium,
                result.ap_large,
                result.ar_small,
                result.ar_medium,
                result.ar_large,
            ],
        ),
        ReportLayout::ClassWise => CLASS_COLUMNS
            .iter()
            .map(|(h, c)| (*h, result.per_class_ap.get(&c.id()).copied().flatten()))
            .chain(std::iter::once(("Overall", result.map)))
            .unzip(),
    };
    let lw = row_label.chars().count().max(5);
    let cells: Vec<String> = values.into_iter().map(cell).collect();
    let widths: Vec<usize> = headers
        .iter()
        .zip(&cells)
        .map(|(h, c)| h.len().max(c.chars().count()).max(5))
        .collect();

    let mut out = String::new();
    write!(out, "{:lw$}", "Model").unwrap();
    for (h, w) in headers.iter().zip(&widths) {
        write!(out, "  {h:>w$}").unwrap();
    }
    out.push('\n');
    write!(out, "{row_label:lw$}").unwrap();
    for (c, w) in cells.iter().zip(&widths) {
        // Pad by characters; "—" is multi-byte.
        let pad = w - c.chars().count();
        write!(out, "  {}{c}", " ".repeat(pad)).unwrap();
    }
    out.push('\n');
    out
}
