//! Averaging, majority voting and weighted voting.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::{argmax_lowest, Classifier, Error, Model, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VoteRule {
    /// Mean of member probabilities.
    Average,
    /// Modal member label.
    Majority,
    /// Per-label sum of member weights.
    Weighted(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VotingClassifier {
    pub members: Vec<Model>,
    pub rule: VoteRule,
    pub n_features: usize,
    pub n_classes: usize,
}

fn check_members(members: &[Model]) -> Result<usize> {
    if members.len() < 2 {
        return Err(Error::Ensemble(format!("voting needs at least 2 members, got {}", members.len())));
    }
    let c = members[0].n_classes();
    if let Some(m) = members.iter().find(|m| m.n_classes() != c) {
        return Err(Error::Ensemble(format!("member class counts differ ({c} vs {})", m.n_classes())));
    }
    Ok(c)
}

fn check_weights(weights: &[f64], n_members: usize) -> Result<()> {
    if weights.len() != n_members {
        return Err(Error::Config(format!("{} weights for {n_members} members", weights.len())));
    }
    if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::Config("vote weights must be positive and finite".into()));
    }
    Ok(())
}

/// Row-wise mean of probability matrices.
pub fn average_probabilities(probas: &[Array2<f64>]) -> Array2<f64> {
    let mut acc = probas[0].clone();
    for p in &probas[1..] {
        acc += p;
    }
    acc /= probas.len() as f64;
    acc
}

/// Per-row share of members voting for each label (`votes[m][row]`).
pub fn vote_shares(votes: &[Vec<usize>], weights: Option<&[f64]>, n_classes: usize) -> Result<Array2<f64>> {
    let n = votes.first().map_or(0, Vec::len);
    if votes.iter().any(|v| v.len() != n) {
        return Err(Error::Dimension("member vote vectors differ in length".into()));
    }
    let total: f64 = weights.map_or(votes.len() as f64, |w| w.iter().sum());
    let mut shares = Array2::zeros((n, n_classes));
    for (m, v) in votes.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[m]);
        for (r, &label) in v.iter().enumerate() {
            if label >= n_classes {
                return Err(Error::LabelRange { value: label, classes: n_classes });
            }
            shares[[r, label]] += w;
        }
    }
    shares /= total;
    Ok(shares)
}

/// Modal label per row; ties go to the lowest class index.
pub fn majority_vote_labels(votes: &[Vec<usize>], n_classes: usize) -> Result<Vec<usize>> {
    let n = votes.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(n);
    let mut counts = vec![0usize; n_classes];
    for r in 0..n {
        counts.fill(0);
        for v in votes {
            let label = *v.get(r).ok_or_else(|| Error::Dimension("member vote vectors differ in length".into()))?;
            if label >= n_classes {
                return Err(Error::LabelRange { value: label, classes: n_classes });
            }
            counts[label] += 1;
        }
        let best = *counts.iter().max().unwrap();
        out.push(counts.iter().position(|&c| c == best).unwrap());
    }
    Ok(out)
}

/// Label with the largest summed weight per row; ties go low.
pub fn weighted_vote_labels(votes: &[Vec<usize>], weights: &[f64], n_classes: usize) -> Result<Vec<usize>> {
    check_weights(weights, votes.len())?;
    let shares = vote_shares(votes, Some(weights), n_classes)?;
    Ok(shares.outer_iter().map(argmax_lowest).collect())
}

fn member_votes(members: &[Model], x: ArrayView2<'_, f64>) -> Result<Vec<Vec<usize>>> {
    members.iter().map(|m| m.predict(x)).collect()
}

/// Mean member probabilities and their argmax.
pub fn soft_vote_average(members: &[Model], x: ArrayView2<'_, f64>) -> Result<(Vec<usize>, Array2<f64>)> {
    check_members(members)?;
    let probas = members.iter().map(|m| m.predict_proba(x)).collect::<Result<Vec<_>>>()?;
    let p = average_probabilities(&probas);
    Ok((p.outer_iter().map(argmax_lowest).collect(), p))
}

pub fn hard_vote_majority(members: &[Model], x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
    let c = check_members(members)?;
    majority_vote_labels(&member_votes(members, x)?, c)
}

pub fn weighted_hard_vote(members: &[Model], weights: &[f64], x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
    let c = check_members(members)?;
    check_weights(weights, members.len())?;
    weighted_vote_labels(&member_votes(members, x)?, weights, c)
}

impl VotingClassifier {
    pub fn new(members: Vec<Model>, rule: VoteRule) -> Result<Self> {
        let n_classes = check_members(&members)?;
        if let VoteRule::Weighted(w) = &rule {
            check_weights(w, members.len())?;
        }
        let n_features = members[0].n_features();
        Ok(VotingClassifier { members, rule, n_features, n_classes })
    }
}

impl Classifier for VotingClassifier {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    /// Averaging returns mean probabilities; voting rules return vote shares.
    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        match &self.rule {
            VoteRule::Average => Ok(soft_vote_average(&self.members, x)?.1),
            VoteRule::Majority => vote_shares(&member_votes(&self.members, x)?, None, self.n_classes),
            VoteRule::Weighted(w) => vote_shares(&member_votes(&self.members, x)?, Some(w), self.n_classes),
        }
    }

    fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
        match &self.rule {
            VoteRule::Average => Ok(soft_vote_average(&self.members, x)?.0),
            VoteRule::Majority => hard_vote_majority(&self.members, x),
            VoteRule::Weighted(w) => weighted_hard_vote(&self.members, w, x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_weights_break_toward_pair() {
        let votes = vec![vec![0], vec![1], vec![1]];
        assert_eq!(weighted_vote_labels(&votes, &[0.4, 0.3, 0.3], 2).unwrap(), vec![1]);
        assert_eq!(weighted_vote_labels(&votes, &[0.5, 0.25, 0.25], 2).unwrap(), vec![0]);
    }

    #[test]
    fn majority_ties_go_low() {
        assert_eq!(majority_vote_labels(&[vec![1], vec![0]], 2).unwrap(), vec![0]);
        assert_eq!(majority_vote_labels(&[vec![0], vec![0], vec![1]], 2).unwrap(), vec![0]);
    }

    #[test]
    fn weight_length_mismatch_is_config_error() {
        assert!(matches!(weighted_vote_labels(&[vec![0], vec![1]], &[1.0], 2), Err(Error::Config(_))));
    }
}
