use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{Pen, SignatureSample};

/// Expected per-person counts of the collection protocol: two 4x2 sheets of
/// genuine signatures split evenly between ballpoint and pencil, plus eight
/// forgeries split four and four.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollectionProtocol {
    pub genuine_per_person: usize,
    pub forged_per_pen: usize,
}

impl Default for CollectionProtocol {
    fn default() -> Self {
        CollectionProtocol {
            genuine_per_person: 16,
            forged_per_pen: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PersonTally {
    pub genuine_ballpoint: usize,
    pub genuine_pencil: usize,
    pub forged_ballpoint: usize,
    pub forged_pencil: usize,
}

impl PersonTally {
    pub fn genuine(&self) -> usize {
        self.genuine_ballpoint + self.genuine_pencil
    }

    pub fn forged(&self) -> usize {
        self.forged_ballpoint + self.forged_pencil
    }

    pub fn total(&self) -> usize {
        self.genuine() + self.forged()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProtocolFlag {
    NoSamples,
    GenuineCount { found: usize, expected: usize },
    GenuinePenSplit { ballpoint: usize, pencil: usize },
    ForgedPenSplit { ballpoint: usize, pencil: usize, expected: usize },
}

impl fmt::Display for ProtocolFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolFlag::NoSamples => write!(f, "no samples"),
            ProtocolFlag::GenuineCount { found, expected } => {
                write!(f, "genuine count {found} ≠ {expected}")
            }
            ProtocolFlag::GenuinePenSplit { ballpoint, pencil } => {
                write!(f, "genuine pen split {ballpoint}/{pencil} is uneven")
            }
            ProtocolFlag::ForgedPenSplit {
                ballpoint,
                pencil,
                expected,
            } => write!(f, "pen split {ballpoint}/{pencil} ≠ {expected}/{expected}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PersonReport {
    pub tally: PersonTally,
    pub flags: Vec<ProtocolFlag>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub persons: BTreeMap<String, PersonReport>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.persons.values().all(|p| p.flags.is_empty())
    }

    pub fn flag_count(&self) -> usize {
        self.persons.values().map(|p| p.flags.len()).sum()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} {:>6} {:>6} {:>6} {:>6}  flags",
            "person", "G-bp", "G-pc", "F-bp", "F-pc"
        )?;
        for (person, r) in &self.persons {
            let t = &r.tally;
            let flags = if r.flags.is_empty() {
                "ok".to_string()
            } else {
                r.flags
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; ")
            };
            writeln!(
                f,
                "{:<12} {:>6} {:>6} {:>6} {:>6}  {}",
                person,
                t.genuine_ballpoint,
                t.genuine_pencil,
                t.forged_ballpoint,
                t.forged_pencil,
                flags
            )?;
        }
        Ok(())
    }
}

pub fn validate_collection(samples: &[SignatureSample]) -> ValidationReport {
    validate_collection_with_roster(samples, &[], CollectionProtocol::default())
}

/// Tallies samples per person and flags deviations from `protocol`. Every
/// name in `roster` gets a row even if it has no samples.
pub fn validate_collection_with_roster(
    samples: &[SignatureSample],
    roster: &[&str],
    protocol: CollectionProtocol,
) -> ValidationReport {
    let mut tallies: BTreeMap<String, PersonTally> = roster
        .iter()
        .map(|p| (p.to_string(), PersonTally::default()))
        .collect();
    for s in samples {
        let t = tallies.entry(s.person_id().to_string()).or_default();
        match (s.forged(), s.pen()) {
            (false, Pen::Ballpoint) => t.genuine_ballpoint += 1,
            (false, Pen::Pencil) => t.genuine_pencil += 1,
            (true, Pen::Ballpoint) => t.forged_ballpoint += 1,
            (true, Pen::Pencil) => t.forged_pencil += 1,
        }
    }

    let persons = tallies
        .into_iter()
        .map(|(person, tally)| {
            let flags = flags_for(&tally, protocol);
            (person, PersonReport { tally, flags })
        })
        .collect();
    ValidationReport { persons }
}

fn flags_for(t: &PersonTally, protocol: CollectionProtocol) -> Vec<ProtocolFlag> {
    if t.total() == 0 {
        return vec![ProtocolFlag::NoSamples];
    }
    let mut flags = Vec::new();
    if t.genuine() != protocol.genuine_per_person {
        flags.push(ProtocolFlag::GenuineCount {
            found: t.genuine(),
            expected: protocol.genuine_per_person,
        });
    }
    if t.genuine_ballpoint != t.genuine_pencil {
        flags.push(ProtocolFlag::GenuinePenSplit {
            ballpoint: t.genuine_ballpoint,
            pencil: t.genuine_pencil,
        });
    }
    if t.forged_ballpoint != protocol.forged_per_pen || t.forged_pencil != protocol.forged_per_pen {
        flags.push(ProtocolFlag::ForgedPenSplit {
            ballpoint: t.forged_ballpoint,
            pencil: t.forged_pencil,
            expected: protocol.forged_per_pen,
        });
    }
    flags
}
