use std::collections::HashMap;

use super::dist::{JointDist, NORMALIZATION_TOL};
use super::measures::entropy_of;
use crate::error::{invalid, Error, Result};

/// Joint law stored as its support: a list of labeled outcomes.
///
/// Suited to laws over rich variables (whole local views, transcripts) whose
/// product alphabet is far larger than the number of outcomes that occur.
/// Labels are arbitrary `u64` codes; equal labels denote equal values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLaw {
    num_vars: usize,
    outcomes: Vec<(Vec<u64>, f64)>,
}

/// Anything that can report joint entropies of variable subsets.
pub trait EntropyOracle {
    fn num_vars(&self) -> usize;
    /// `H(vars)` in bits; the empty set has entropy 0.
    fn joint_entropy(&self, vars: &[usize]) -> f64;

    fn cond_entropy(&self, a: &[usize], given: &[usize]) -> f64 {
        let mut ab = a.to_vec();
        ab.extend_from_slice(given);
        (self.joint_entropy(&ab) - self.joint_entropy(given)).max(0.0)
    }
}

impl EntropyOracle for JointDist {
    fn num_vars(&self) -> usize {
        JointDist::num_vars(self)
    }

    fn joint_entropy(&self, vars: &[usize]) -> f64 {
        if vars.is_empty() {
            return 0.0;
        }
        entropy_of(&self.marginal_table(vars))
    }
}

impl SparseLaw {
    /// Merges repeated outcomes and drops zero-mass ones. Total mass must be
    /// within the normalization tolerance of 1.
    pub fn new(outcomes: Vec<(Vec<u64>, f64)>) -> Result<Self> {
        let Some(num_vars) = outcomes.first().map(|(l, _)| l.len()) else {
            return invalid("no outcomes");
        };
        let mut merged: HashMap<Vec<u64>, f64> = HashMap::with_capacity(outcomes.len());
        let mut order = Vec::new();
        let mut total = 0.0;
        for (labels, p) in outcomes {
            if labels.len() != num_vars {
                return Err(Error::ShapeMismatch("ragged outcome labels".into()));
            }
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::NegativeProbability(p));
            }
            if p == 0.0 {
                continue;
            }
            total += p;
            match merged.get_mut(&labels) {
                Some(q) => *q += p,
                None => {
                    order.push(labels.clone());
                    merged.insert(labels, p);
                }
            }
        }
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(total));
        }
        let outcomes = order
            .into_iter()
            .map(|l| {
                let p = merged[&l] / total;
                (l, p)
            })
            .collect();
        Ok(SparseLaw { num_vars, outcomes })
    }

    pub fn outcomes(&self) -> &[(Vec<u64>, f64)] {
        &self.outcomes
    }

    /// Support size.
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn from_dense(j: &JointDist) -> SparseLaw {
        let outcomes = j
            .table()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (j.symbols_of(i).into_iter().map(|s| s as u64).collect(), p))
            .collect();
        SparseLaw {
            num_vars: j.num_vars(),
            outcomes,
        }
    }

    pub fn to_dense(&self) -> Result<JointDist> {
        JointDist::from_labeled(&self.outcomes)
    }

    /// Masses of the distinct values of `vars`, in first-seen order.
    pub fn marginal_masses(&self, vars: &[usize]) -> Vec<f64> {
        let mut idx: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut masses = Vec::new();
        for (labels, p) in &self.outcomes {
            let key: Vec<u64> = vars.iter().map(|&v| labels[v]).collect();
            let next = masses.len();
            let i = *idx.entry(key).or_insert(next);
            if i == masses.len() {
                masses.push(0.0);
            }
            masses[i] += p;
        }
        masses
    }

    /// Number of distinct values taken by `var`.
    pub fn support_size(&self, var: usize) -> usize {
        self.marginal_masses(&[var]).len()
    }

    /// Law conditioned on `var == label`; `None` when that has zero mass.
    pub fn condition(&self, var: usize, label: u64) -> Option<SparseLaw> {
        let kept: Vec<(Vec<u64>, f64)> = self
            .outcomes
            .iter()
            .filter(|(l, _)| l[var] == label)
            .cloned()
            .collect();
        let mass: f64 = kept.iter().map(|(_, p)| p).sum();
        if mass <= 0.0 {
            return None;
        }
        Some(SparseLaw {
            num_vars: self.num_vars,
            outcomes: kept.into_iter().map(|(l, p)| (l, p / mass)).collect(),
        })
    }

    /// Keeps only `vars`, in the order given.
    pub fn project(&self, vars: &[usize]) -> SparseLaw {
        let outcomes: Vec<(Vec<u64>, f64)> = self
            .outcomes
            .iter()
            .map(|(l, p)| (vars.iter().map(|&v| l[v]).collect(), *p))
            .collect();
        SparseLaw::new(outcomes).expect("projection of a valid law")
    }

    /// Appends a variable computed from each outcome.
    pub fn with_var(&self, f: impl Fn(&[u64]) -> u64) -> SparseLaw {
        SparseLaw {
            num_vars: self.num_vars + 1,
            outcomes: self
                .outcomes
                .iter()
                .map(|(l, p)| {
                    let mut l2 = l.clone();
                    l2.push(f(l));
                    (l2, *p)
                })
                .collect(),
        }
    }

    /// Largest absolute difference between the law of `groups` and the
    /// product of the group marginals, over the product support.
    pub fn product_gap(&self, groups: &[Vec<usize>]) -> f64 {
        let margs: Vec<HashMap<Vec<u64>, f64>> = groups
            .iter()
            .map(|g| {
                let mut m = HashMap::new();
                for (l, p) in &self.outcomes {
                    *m.entry(g.iter().map(|&v| l[v]).collect::<Vec<_>>()).or_insert(0.0) += p;
                }
                m
            })
            .collect();
        let mut joint: HashMap<Vec<Vec<u64>>, f64> = HashMap::new();
        for (l, p) in &self.outcomes {
            let key = groups.iter().map(|g| g.iter().map(|&v| l[v]).collect()).collect();
            *joint.entry(key).or_insert(0.0) += p;
        }
        // Walk the product of the marginal supports.
        let supports: Vec<Vec<(&Vec<u64>, f64)>> =
            margs.iter().map(|m| m.iter().map(|(k, &p)| (k, p)).collect()).collect();
        let mut gap: f64 = 0.0;
        let mut digits = vec![0usize; supports.len()];
        loop {
            let key: Vec<Vec<u64>> = digits.iter().zip(&supports).map(|(&d, s)| s[d].0.clone()).collect();
            let prod: f64 = digits.iter().zip(&supports).map(|(&d, s)| s[d].1).product();
            let actual = joint.get(&key).copied().unwrap_or(0.0);
            gap = gap.max((actual - prod).abs());
            let mut v = supports.len();
            loop {
                if v == 0 {
                    return gap;
                }
                v -= 1;
                digits[v] += 1;
                if digits[v] < supports[v].len() {
                    break;
                }
                digits[v] = 0;
            }
        }
    }
}

impl EntropyOracle for SparseLaw {
    fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn joint_entropy(&self, vars: &[usize]) -> f64 {
        if vars.is_empty() {
            return 0.0;
        }
        entropy_of(&self.marginal_masses(vars))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_matches_dense() {
        let law = SparseLaw::new(vec![
            (vec![7, 1], 0.25),
            (vec![7, 1], 0.25),
            (vec![9, 0], 0.5),
            (vec![3, 3], 0.0),
        ])
        .unwrap();
        assert_eq!(law.len(), 2);
        assert_eq!(law.joint_entropy(&[0]), 1.0);
        assert_eq!(law.cond_entropy(&[1], &[0]), 0.0);
        let dense = law.to_dense().unwrap();
        assert_eq!(dense.joint_entropy(&[0, 1]), 1.0);
        assert_eq!(SparseLaw::from_dense(&dense).joint_entropy(&[0, 1]), 1.0);
    }

    #[test]
    fn product_gap_detects_coupling() {
        let ind = SparseLaw::new(
            (0..4).map(|i| (vec![i / 2, i % 2], 0.25)).collect(),
        )
        .unwrap();
        assert!(ind.product_gap(&[vec![0], vec![1]]) < 1e-15);
        let copy = SparseLaw::new(vec![(vec![0, 0], 0.5), (vec![1, 1], 0.5)]).unwrap();
        assert!((copy.product_gap(&[vec![0], vec![1]]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(SparseLaw::new(vec![(vec![0], 0.4)]).is_err());
        assert!(SparseLaw::new(vec![(vec![0], -0.1), (vec![1], 1.1)]).is_err());
    }
}
