//! Telling the mechanisms apart from a final correlation report.
//!
//! Each mechanism leaves a distinct pattern in the ego-alter correlations:
//!
//! * confounding keeps first-degree similarity low;
//! * contagion makes mutual alters clearly more similar than incoming ones,
//!   because influence flows only along the ties an ego names;
//! * homophily produces similar values across tie types and, once strong
//!   nodes have clustered, a negative third-degree correlation.

use crate::graph::RelationClass;
use crate::mechanisms::Mechanism;
use crate::metrics::CorrelationReport;

/// First-degree similarity below this is read as confounding.
pub const MAGNITUDE_CEILING: f64 = 0.25;
/// Mutual-minus-incoming gap above this is read as contagion.
pub const SPREAD_THRESHOLD: f64 = 0.10;
/// Half-width of the band around [`SPREAD_THRESHOLD`] in which the sign of
/// the third-degree correlation decides instead.
pub const SPREAD_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signature {
    /// Mean of the defined first-degree correlations (all, incoming,
    /// outgoing, mutual).
    pub magnitude: f64,
    /// `mutual - incoming`.
    pub spread: f64,
    pub third_degree: f64,
}

impl Signature {
    /// `None` when the report lacks the correlations the rule needs.
    pub fn of(report: &CorrelationReport) -> Option<Self> {
        let first: Vec<f64> = [
            RelationClass::AllClose,
            RelationClass::Incoming,
            RelationClass::Outgoing,
            RelationClass::Mutual,
        ]
        .iter()
        .filter_map(|&c| report.value(c))
        .collect();
        if first.is_empty() {
            return None;
        }
        Some(Signature {
            magnitude: first.iter().sum::<f64>() / first.len() as f64,
            spread: report.value(RelationClass::Mutual)? - report.value(RelationClass::Incoming)?,
            third_degree: report.value(RelationClass::Distance3).unwrap_or(0.0),
        })
    }

    pub fn classify(&self) -> Mechanism {
        if self.magnitude < MAGNITUDE_CEILING {
            return Mechanism::Confounding;
        }
        if (self.spread - SPREAD_THRESHOLD).abs() < SPREAD_MARGIN {
            return if self.third_degree < 0.0 {
                Mechanism::Homophily
            } else {
                Mechanism::Contagion
            };
        }
        if self.spread > SPREAD_THRESHOLD {
            Mechanism::Contagion
        } else {
            Mechanism::Homophily
        }
    }
}

/// Best guess at the mechanism that produced `report`.
pub fn infer_mechanism(report: &CorrelationReport) -> Option<Mechanism> {
    Signature::of(report).map(|s| s.classify())
}
