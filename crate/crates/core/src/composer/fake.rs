use chrono::{Duration, NaiveDate};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{amount_to_words, ComposeError, MAX_CENTS};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DateFormat {
    #[default]
    #[serde(rename = "MM/DD/YYYY")]
    MonthDayYear,
    #[serde(rename = "DD.MM.YYYY")]
    DayMonthYear,
}

impl DateFormat {
    pub fn format(self, d: NaiveDate) -> String {
        match self {
            DateFormat::MonthDayYear => d.format("%m/%d/%Y").to_string(),
            DateFormat::DayMonthYear => d.format("%d.%m.%Y").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FakeFieldConfig {
    pub date_start: NaiveDate,
    pub date_end: NaiveDate,
    #[serde(default)]
    pub date_format: DateFormat,
    /// Inclusive amount bounds in cents.
    pub amount_min: u64,
    pub amount_max: u64,
    pub names: Vec<String>,
}

impl Default for FakeFieldConfig {
    fn default() -> Self {
        FakeFieldConfig {
            date_start: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            date_end: NaiveDate::from_ymd_opt(2024, 12, 31).unwrap(),
            date_format: DateFormat::MonthDayYear,
            amount_min: 100,
            amount_max: 500_000,
            names: [
                "Alice Moreno",
                "Bilal Haider",
                "Chen Wei",
                "Dana Fischer",
                "Emeka Obi",
                "Farah Qureshi",
                "Greta Lindqvist",
                "Hiro Tanaka",
                "Ines Duarte",
                "Jonas Weber",
                "Kavya Rao",
                "Luis Romero",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FakeFields {
    pub payee: String,
    pub date: String,
    pub courtesy: String,
    pub legal: String,
    pub cents: u64,
}

/// `$D.CC` with no thousands separators.
pub fn format_courtesy(cents: u64) -> String {
    format!("${}.{:02}", cents / 100, cents % 100)
}

/// Draws a payee, a date and an amount. Courtesy and legal strings encode
/// the same amount.
pub fn fake_fields<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &FakeFieldConfig,
) -> Result<FakeFields, ComposeError> {
    if cfg.names.is_empty() {
        return Err(ComposeError::EmptyNamePool);
    }
    if cfg.date_end < cfg.date_start {
        return Err(ComposeError::InvertedRange(format!(
            "dates {} > {}",
            cfg.date_start, cfg.date_end
        )));
    }
    if cfg.amount_max < cfg.amount_min {
        return Err(ComposeError::InvertedRange(format!(
            "amounts {} > {}",
            cfg.amount_min, cfg.amount_max
        )));
    }
    if cfg.amount_max >= MAX_CENTS {
        return Err(ComposeError::AmountOutOfRange(cfg.amount_max));
    }
    let payee = cfg.names[rng.gen_range(0..cfg.names.len())].clone();
    let span = (cfg.date_end - cfg.date_start).num_days();
    let date = cfg.date_start + Duration::days(rng.gen_range(0..=span));
    let cents = rng.gen_range(cfg.amount_min..=cfg.amount_max);
    Ok(FakeFields {
        payee,
        date: cfg.date_format.format(date),
        courtesy: format_courtesy(cents),
        legal: amount_to_words(cents)?,
        cents,
    })
}
