//! Supervision pairs and the diversity threshold learned from them.
//!
//! Each pair is the object-encounter distance at query time together with
//! the user's same-genus answer. The threshold maximizes the number of pairs
//! it classifies correctly, where a pair counts as predicted-similar when its
//! distance is strictly below the threshold.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupervisionPair {
    pub delta: f64,
    pub same_genus: bool,
}

impl SupervisionPair {
    /// True when threshold `lambda` classifies this pair the way the user did.
    pub fn agrees_with(&self, lambda: f64) -> bool {
        (self.delta < lambda) == self.same_genus
    }
}

/// Number of pairs classified correctly by `lambda`.
pub fn objective(pairs: &[SupervisionPair], lambda: f64) -> usize {
    pairs.iter().filter(|p| p.agrees_with(lambda)).count()
}

/// Representative thresholds, one per interval on which the objective is
/// constant, in increasing order: half the smallest distance, the midpoints
/// between consecutive distinct distances, and one past the largest.
pub fn candidates(pairs: &[SupervisionPair]) -> Vec<f64> {
    let mut deltas: Vec<f64> = pairs.iter().map(|p| p.delta).collect();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    let (Some(&lo), Some(&hi)) = (deltas.first(), deltas.last()) else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(deltas.len() + 1);
    out.push(lo / 2.0);
    out.extend(deltas.windows(2).map(|w| midpoint(w[0], w[1])));
    out.push(past(hi));
    out
}

/// A value in `(a, b]`, the midpoint unless `a` and `b` are adjacent floats.
fn midpoint(a: f64, b: f64) -> f64 {
    let mid = a + (b - a) / 2.0;
    if mid > a {
        mid
    } else {
        b
    }
}

fn past(hi: f64) -> f64 {
    (hi + 1.0).max(hi.next_up())
}

/// Optimal threshold and its objective value.
///
/// Sorts once and sweeps the candidates left to right, updating the score by
/// the labels of each group of tied distances as it moves below the
/// threshold. Among equal scores the smallest candidate wins. An empty set
/// yields `(0.0, 0)`.
pub fn optimal_threshold(pairs: &[SupervisionPair]) -> (f64, usize) {
    if pairs.is_empty() {
        return (0.0, 0);
    }
    let mut sorted: Vec<SupervisionPair> = pairs.to_vec();
    sorted.sort_by(|a, b| a.delta.total_cmp(&b.delta));

    // Nothing lies below delta_min / 2: only the negatives are right.
    let mut score = sorted.iter().filter(|p| !p.same_genus).count() as i64;
    let mut best = (sorted[0].delta / 2.0, score);

    let mut i = 0;
    while i < sorted.len() {
        let value = sorted[i].delta;
        let mut j = i;
        while j < sorted.len() && sorted[j].delta.total_cmp(&value) == Ordering::Equal {
            score += if sorted[j].same_genus { 1 } else { -1 };
            j += 1;
        }
        let lambda = match sorted.get(j) {
            Some(next) => midpoint(value, next.delta),
            None => past(value),
        };
        if score > best.1 {
            best = (lambda, score);
        }
        i = j;
    }
    (best.0, best.1 as usize)
}

/// The supervision multiset and the current threshold.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SupervisionStore {
    pairs: Vec<SupervisionPair>,
    theta: f64,
}

impl SupervisionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn from_parts(pairs: Vec<SupervisionPair>, theta: f64) -> Result<Self> {
        for p in &pairs {
            check_delta(p.delta)?;
        }
        if !theta.is_finite() || theta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "threshold {theta} must be finite and non-negative"
            )));
        }
        Ok(SupervisionStore { pairs, theta })
    }

    /// Appends a pair. The threshold is left untouched until
    /// [`SupervisionStore::update_theta`].
    pub fn record(&mut self, delta: f64, same_genus: bool) -> Result<()> {
        check_delta(delta)?;
        self.pairs.push(SupervisionPair { delta, same_genus });
        Ok(())
    }

    pub fn compute_theta(&self) -> f64 {
        optimal_threshold(&self.pairs).0
    }

    /// Recomputes and stores the threshold.
    pub fn update_theta(&mut self) -> f64 {
        self.theta = self.compute_theta();
        self.theta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn pairs(&self) -> &[SupervisionPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "supervision distance {delta} must be finite and non-negative"
        )));
    }
    Ok(())
}
