use super::dist::JointDist;
use crate::error::{invalid, Error, Result};

/// Values this close to zero are reported as exactly zero by the
/// difference-of-entropies measures.
const ZERO_SNAP: f64 = 1e-12;

/// Shannon entropy in bits of a mass vector.
pub fn entropy_of(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h.max(0.0)
}

/// Binary entropy function `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

fn subset_entropy(j: &JointDist, vars: &[usize]) -> f64 {
    if vars.is_empty() {
        return 0.0;
    }
    entropy_of(&j.marginal_table(vars))
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u = a.to_vec();
    u.extend_from_slice(b);
    u
}

fn check_disjoint(j: &JointDist, sets: &[&[usize]]) -> Result<()> {
    let all: Vec<usize> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    j.check_vars(&all)
        .map_err(|_| Error::InvalidArgument("variable subsets overlap or are out of range".into()))
}

/// `H(vars)` of the marginal on `vars`.
pub fn entropy(j: &JointDist, vars: &[usize]) -> Result<f64> {
    if vars.is_empty() {
        return invalid("entropy of an empty variable set");
    }
    j.check_vars(vars)?;
    Ok(subset_entropy(j, vars))
}

/// `H(a | b) = H(a, b) - H(b)`.
pub fn conditional_entropy(j: &JointDist, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() {
        return invalid("conditional entropy of an empty variable set");
    }
    check_disjoint(j, &[a, b])?;
    let h = subset_entropy(j, &union(a, b)) - subset_entropy(j, b);
    Ok(if h < ZERO_SNAP { 0.0 } else { h })
}

/// `I(a ; b | given)`.
pub fn mutual_information(j: &JointDist, a: &[usize], b: &[usize], given: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return invalid("mutual information needs nonempty variable sets");
    }
    check_disjoint(j, &[a, b, given])?;
    let ag = union(a, given);
    let bg = union(b, given);
    let abg = union(&ag, b);
    let i = subset_entropy(j, &ag) + subset_entropy(j, &bg)
        - subset_entropy(j, &abg)
        - subset_entropy(j, given);
    Ok(if i < ZERO_SNAP { 0.0 } else { i })
}

/// `D(p || q)` in bits; `f64::INFINITY` when `p` is not absolutely
/// continuous with respect to `q`.
pub fn kl_divergence(p: &JointDist, q: &JointDist) -> Result<f64> {
    if p.arity() != q.arity() {
        return Err(Error::ShapeMismatch(format!(
            "arity {:?} vs {:?}",
            p.arity(),
            q.arity()
        )));
    }
    let mut d = 0.0;
    for (&a, &b) in p.table().iter().zip(q.table()) {
        if a > 0.0 {
            if b <= 0.0 {
                return Ok(f64::INFINITY);
            }
            d += a * (a / b).log2();
        }
    }
    Ok(if d < ZERO_SNAP { 0.0 } else { d })
}

/// Security index `log|K| - H(K | F)` of key variable `key` against the
/// transcript variables `transcript`. `|K|` is the declared alphabet size of
/// the key variable.
pub fn security_index(j: &JointDist, key: usize, transcript: &[usize]) -> Result<f64> {
    check_disjoint(j, &[&[key], transcript])?;
    let log_k = (j.arity()[key] as f64).log2();
    let h = subset_entropy(j, &union(&[key], transcript)) - subset_entropy(j, transcript);
    let s = log_k - h;
    Ok(if s < ZERO_SNAP { 0.0 } else { s })
}
