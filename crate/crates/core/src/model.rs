//! Problem instances: parallel links with outage probabilities and a set of
//! prioritized messages, plus the probability calculus over link up-patterns.

use crate::real::Real;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on the number of links: payoff evaluation enumerates all `2^N`
/// up-patterns exactly.
pub const MAX_LINKS: usize = 24;

/// One unreliable link. `outage_prob` is the probability the link is down
/// for the whole communication attempt; the complement is [`LinkSpec::up_prob`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec<R: Real = f64> {
    pub capacity: R,
    pub outage_prob: R,
}

impl<R: Real> LinkSpec<R> {
    /// Success probability of the link.
    pub fn up_prob(&self) -> R {
        R::one() - self.outage_prob
    }
}

/// One message: `size` in the same data units as link capacities, and the
/// worth credited per unit of the message that is recovered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MessageSpec<R: Real = f64> {
    pub size: R,
    #[serde(rename = "worth")]
    pub worth_per_unit: R,
}

/// A problem instance: ordered links and ordered messages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario<R: Real = f64> {
    pub links: Vec<LinkSpec<R>>,
    pub messages: Vec<MessageSpec<R>>,
}

/// Validation failure for a [`Scenario`].
#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("link {index}: outage probability {value} outside [0, 1]")]
    OutageProbOutOfRange { index: usize, value: f64 },
    #[error("link {index}: negative capacity {value}")]
    NegativeCapacity { index: usize, value: f64 },
    #[error("message {index}: negative size {value}")]
    NegativeSize { index: usize, value: f64 },
    #[error("message {index}: negative worth {value}")]
    NegativeWorth { index: usize, value: f64 },
    #[error("scenario must have at least one link")]
    NoLinks,
    #[error("scenario must have at least one message")]
    NoMessages,
    #[error("{n} links exceeds the supported maximum of {MAX_LINKS}")]
    TooManyLinks { n: usize },
}

/// A subset of links that are up, as a bitmask over link indices `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UpSet(pub u32);

impl UpSet {
    pub const EMPTY: UpSet = UpSet(0);

    /// Up-set with every link `0..n` up.
    pub fn full(n: usize) -> UpSet {
        UpSet(((1u64 << n) - 1) as u32)
    }

    pub fn contains(&self, link: usize) -> bool {
        self.0 >> link & 1 == 1
    }

    pub fn is_subset_of(&self, other: UpSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// All `2^n` up-sets in ascending bitmask order.
    pub fn enumerate(n: usize) -> impl Iterator<Item = UpSet> {
        (0..1u64 << n).map(|mask| UpSet(mask as u32))
    }

    /// Indices of the up links, ascending.
    pub fn iter_links(&self) -> impl Iterator<Item = usize> + '_ {
        (0..32).filter(|i| self.contains(*i))
    }
}

impl<R: Real> Scenario<R> {
    /// Number of links.
    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Number of messages.
    pub fn message_count(&self) -> usize {
        self.messages.len()
    }

    /// Check every type invariant, returning the scenario on success.
    pub fn validate(self) -> Result<Self, ScenarioError> {
        if self.links.is_empty() {
            return Err(ScenarioError::NoLinks);
        }
        if self.messages.is_empty() {
            return Err(ScenarioError::NoMessages);
        }
        if self.links.len() > MAX_LINKS {
            return Err(ScenarioError::TooManyLinks { n: self.links.len() });
        }
        for (index, link) in self.links.iter().enumerate() {
            let p = link.outage_prob;
            if !(p >= R::zero() && p <= R::one()) {
                return Err(ScenarioError::OutageProbOutOfRange {
                    index,
                    value: p.to_f64().unwrap_or(f64::NAN),
                });
            }
            if !(link.capacity >= R::zero()) {
                return Err(ScenarioError::NegativeCapacity {
                    index,
                    value: link.capacity.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        for (index, msg) in self.messages.iter().enumerate() {
            if !(msg.size >= R::zero()) {
                return Err(ScenarioError::NegativeSize {
                    index,
                    value: msg.size.to_f64().unwrap_or(f64::NAN),
                });
            }
            if !(msg.worth_per_unit >= R::zero()) {
                return Err(ScenarioError::NegativeWorth {
                    index,
                    value: msg.worth_per_unit.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(self)
    }

    /// Probability that exactly the links in `s` are up and every other link
    /// is down. Link failures are independent.
    pub fn upset_prob(&self, s: UpSet) -> R {
        let n = self.links.len();
        assert!(u64::from(s.0) < 1u64 << n, "up-set has bits beyond link count");
        let mut p = R::one();
        for (i, link) in self.links.iter().enumerate() {
            p = p * if s.contains(i) { link.up_prob() } else { link.outage_prob };
        }
        p
    }

    /// Reindex links by ascending outage probability and messages by
    /// descending worth. Both sorts are stable, so ties keep their original
    /// order. Returns the reordered scenario together with the permutations
    /// applied: `link_perm[new] = old` and `msg_perm[new] = old`.
    pub fn canonical_order(&self) -> (Self, Vec<usize>, Vec<usize>) {
        let mut link_perm: Vec<usize> = (0..self.links.len()).collect();
        link_perm.sort_by(|&a, &b| {
            self.links[a]
                .outage_prob
                .partial_cmp(&self.links[b].outage_prob)
                .expect("outage probabilities are ordered")
                .then(a.cmp(&b))
        });
        let mut msg_perm: Vec<usize> = (0..self.messages.len()).collect();
        msg_perm.sort_by(|&a, &b| {
            self.messages[b]
                .worth_per_unit
                .partial_cmp(&self.messages[a].worth_per_unit)
                .expect("worths are ordered")
                .then(a.cmp(&b))
        });
        let reordered = Scenario {
            links: link_perm.iter().map(|&i| self.links[i]).collect(),
            messages: msg_perm.iter().map(|&j| self.messages[j]).collect(),
        };
        (reordered, link_perm, msg_perm)
    }

    /// Parse a scenario from its JSON form and validate it.
    pub fn from_json_str(text: &str) -> Result<Self, ScenarioLoadError>
    where
        R: for<'de> Deserialize<'de>,
    {
        let raw: Scenario<R> = serde_json::from_str(text)?;
        Ok(raw.validate()?)
    }

    pub fn to_json_string(&self) -> String
    where
        R: Serialize,
    {
        serde_json::to_string(self).expect("scenario serializes")
    }
}

/// Failure to load a scenario from JSON text.
#[derive(Debug, Error)]
pub enum ScenarioLoadError {
    #[error("invalid scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] ScenarioError),
}

/// Unit-capacity, unit-size scenario from bare probability and worth lists.
/// Convenience for tests and the experiment harness.
pub fn unit_scenario<R: Real>(outage_probs: &[R], worths: &[R]) -> Scenario<R> {
    Scenario {
        links: outage_probs
            .iter()
            .map(|&p| LinkSpec { capacity: R::one(), outage_prob: p })
            .collect(),
        messages: worths
            .iter()
            .map(|&w| MessageSpec { size: R::one(), worth_per_unit: w })
            .collect(),
    }
    .validate()
    .expect("unit scenario is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario3() -> Scenario {
        // up_prob = (0.9, 0.8, 0.7)
        unit_scenario(&[0.1, 0.2, 0.3], &[1.0, 1.0])
    }

    #[test]
    fn validate_accepts_good_scenario() {
        let s = Scenario {
            links: vec![
                LinkSpec { capacity: 1.0, outage_prob: 0.1 },
                LinkSpec { capacity: 1.0, outage_prob: 0.2 },
                LinkSpec { capacity: 1.0, outage_prob: 0.3 },
            ],
            messages: vec![
                MessageSpec { size: 1.0, worth_per_unit: 2.0 },
                MessageSpec { size: 1.0, worth_per_unit: 1.0 },
            ],
        };
        assert!(s.validate().is_ok());
    }

    #[test]
    fn validate_rejects_bad_probability() {
        let s = Scenario {
            links: vec![LinkSpec { capacity: 1.0, outage_prob: 1.5 }],
            messages: vec![MessageSpec { size: 1.0, worth_per_unit: 1.0 }],
        };
        assert_eq!(
            s.validate(),
            Err(ScenarioError::OutageProbOutOfRange { index: 0, value: 1.5 })
        );
    }

    #[test]
    fn validate_rejects_empty() {
        let no_links = Scenario::<f64> {
            links: vec![],
            messages: vec![MessageSpec { size: 1.0, worth_per_unit: 1.0 }],
        };
        assert_eq!(no_links.validate(), Err(ScenarioError::NoLinks));

        let no_messages = Scenario::<f64> {
            links: vec![LinkSpec { capacity: 1.0, outage_prob: 0.5 }],
            messages: vec![],
        };
        assert_eq!(no_messages.validate(), Err(ScenarioError::NoMessages));
    }

    #[test]
    fn validate_rejects_too_many_links() {
        let s = Scenario {
            links: vec![LinkSpec { capacity: 1.0, outage_prob: 0.5 }; 25],
            messages: vec![MessageSpec { size: 1.0, worth_per_unit: 1.0 }],
        };
        assert_eq!(s.validate(), Err(ScenarioError::TooManyLinks { n: 25 }));
    }

    #[test]
    fn upset_prob_all_up() {
        // 0.9 * 0.8 * 0.7
        let p = scenario3().upset_prob(UpSet::full(3));
        assert!((p - 0.504).abs() < 1e-15);
    }

    #[test]
    fn upset_prob_certain_when_outage_zero() {
        let s = unit_scenario(&[0.0, 0.0, 0.0], &[1.0]);
        assert_eq!(s.upset_prob(UpSet::full(3)), 1.0);
        assert_eq!(s.upset_prob(UpSet::EMPTY), 0.0);
    }

    #[test]
    fn upset_probs_total_one() {
        let s = scenario3();
        let total: f64 = UpSet::enumerate(3).map(|u| s.upset_prob(u)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn upset_prob_monotone_in_up_prob() {
        let s = scenario3();
        let up = UpSet(0b011);
        let mut bumped = s.clone();
        bumped.links[0].outage_prob -= 1e-6; // raise up_prob of an up link
        assert!(bumped.upset_prob(up) > s.upset_prob(up));
        let mut bumped_down = s.clone();
        bumped_down.links[2].outage_prob -= 1e-6; // raise up_prob of a down link
        assert!(bumped_down.upset_prob(up) < s.upset_prob(up));
    }

    #[test]
    fn canonical_order_sorts_links_ascending_outage() {
        let s = unit_scenario(&[0.3, 0.1, 0.2], &[1.0]);
        let (sorted, link_perm, _) = s.canonical_order();
        assert_eq!(link_perm, vec![1, 2, 0]);
        assert_eq!(sorted.links[0].outage_prob, 0.1);
        assert_eq!(sorted.links[2].outage_prob, 0.3);
    }

    #[test]
    fn canonical_order_sorts_messages_descending_worth() {
        let s = unit_scenario(&[0.5], &[1.0, 5.0]);
        let (sorted, _, msg_perm) = s.canonical_order();
        assert_eq!(msg_perm, vec![1, 0]);
        assert_eq!(sorted.messages[0].worth_per_unit, 5.0);
    }

    #[test]
    fn canonical_order_identity_on_canonical_input() {
        let s = unit_scenario(&[0.1, 0.2, 0.3], &[5.0, 1.0]);
        let (sorted, link_perm, msg_perm) = s.canonical_order();
        assert_eq!(link_perm, vec![0, 1, 2]);
        assert_eq!(msg_perm, vec![0, 1]);
        assert_eq!(sorted, s);
    }

    #[test]
    fn canonical_order_is_idempotent_with_ties() {
        let s = unit_scenario(&[0.2, 0.2, 0.1], &[3.0, 3.0]);
        let (once, _, _) = s.canonical_order();
        let (twice, link_perm, msg_perm) = once.canonical_order();
        assert_eq!(once, twice);
        assert_eq!(link_perm, vec![0, 1, 2]);
        assert_eq!(msg_perm, vec![0, 1]);
    }

    #[test]
    fn json_round_trip_and_unknown_field_rejection() {
        let text = r#"{"links":[{"capacity":1.0,"outage_prob":0.1}],
                       "messages":[{"size":1.0,"worth":2.0}]}"#;
        let s: Scenario = Scenario::from_json_str(text).unwrap();
        assert_eq!(s.messages[0].worth_per_unit, 2.0);

        let bad = r#"{"links":[{"capacity":1.0,"outage_prob":0.1,"latency":5}],
                      "messages":[{"size":1.0,"worth":2.0}]}"#;
        assert!(matches!(
            Scenario::<f64>::from_json_str(bad),
            Err(ScenarioLoadError::Json(_))
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let s: Scenario<f32> = unit_scenario(&[0.1f32, 0.2, 0.3], &[1.0]);
        let total: f32 = UpSet::enumerate(3).map(|u| s.upset_prob(u)).sum();
        assert!((total - 1.0).abs() < 1e-6);
    }
}
