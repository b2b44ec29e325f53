use std::collections::HashMap;

use crate::error::{invalid, Error, Result};

/// Inputs whose mass differs from one by more than this are rejected; inputs
/// within it are renormalized.
pub const NORMALIZATION_TOL: f64 = 1e-9;

const DEFAULT_BUDGET: usize = 1 << 26;

/// Maximum number of entries a dense table may hold.
///
/// Overridable through the `MACSK_MAX_TABLE_ENTRIES` environment variable.
pub fn table_budget() -> usize {
    std::env::var("MACSK_MAX_TABLE_ENTRIES")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_BUDGET)
}

pub(crate) fn checked_size(arity: &[usize]) -> Result<usize> {
    let budget = table_budget();
    let mut size: u128 = 1;
    for &a in arity {
        size = size.saturating_mul(a as u128);
    }
    if size > budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: size,
            budget,
        });
    }
    Ok(size as usize)
}

fn normalize(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    let mut total = 0.0;
    for &p in &probs {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::NegativeProbability(p));
        }
        total += p;
    }
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(total));
    }
    if total != 1.0 {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    Ok(probs)
}

/// A probability vector on `{0, .., k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDist {
    probs: Vec<f64>,
}

impl FiniteDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return invalid("distribution over an empty alphabet");
        }
        Ok(FiniteDist {
            probs: normalize(probs)?,
        })
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k > 0, "uniform distribution over an empty alphabet");
        FiniteDist {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn point(k: usize, at: usize) -> Self {
        assert!(at < k);
        let mut probs = vec![0.0; k];
        probs[at] = 1.0;
        FiniteDist { probs }
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy(&self) -> f64 {
        super::entropy_of(&self.probs)
    }
}

/// Dense joint probability table over a tuple of finite-alphabet variables.
///
/// Entries are stored row-major: the last variable varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    arity: Vec<usize>,
    table: Vec<f64>,
}

impl JointDist {
    pub fn new(arity: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        if arity.is_empty() || arity.iter().any(|&a| a == 0) {
            return invalid("every variable needs a nonempty alphabet");
        }
        let size = checked_size(&arity)?;
        if table.len() != size {
            return Err(Error::ShapeMismatch(format!(
                "table has {} entries, arity implies {size}",
                table.len()
            )));
        }
        Ok(JointDist {
            arity,
            table: normalize(table)?,
        })
    }

    /// Accumulates weighted outcomes into a table. Repeated outcomes add up.
    pub fn from_outcomes<'a, I>(arity: Vec<usize>, outcomes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [usize], f64)>,
    {
        if arity.is_empty() || arity.iter().any(|&a| a == 0) {
            return invalid("every variable needs a nonempty alphabet");
        }
        let size = checked_size(&arity)?;
        let mut table = vec![0.0; size];
        let strides = strides_of(&arity);
        for (symbols, p) in outcomes {
            if symbols.len() != arity.len() {
                return Err(Error::ShapeMismatch(format!(
                    "outcome has {} symbols, expected {}",
                    symbols.len(),
                    arity.len()
                )));
            }
            let mut idx = 0;
            for ((&s, &a), &st) in symbols.iter().zip(&arity).zip(&strides) {
                if s >= a {
                    return invalid(format!("symbol {s} outside alphabet of size {a}"));
                }
                idx += s * st;
            }
            table[idx] += p;
        }
        JointDist::new(arity, table)
    }

    /// Builds a table by interning the distinct values of each coordinate.
    ///
    /// Each outcome is a list of arbitrary `u64` labels, one per variable; the
    /// labels of variable `v` are renumbered `0..` in order of first
    /// appearance. Used when variable alphabets are only known after
    /// enumeration.
    pub fn from_labeled(outcomes: &[(Vec<u64>, f64)]) -> Result<Self> {
        let Some((first, _)) = outcomes.first() else {
            return invalid("no outcomes");
        };
        let nv = first.len();
        let mut maps: Vec<HashMap<u64, usize>> = vec![HashMap::new(); nv];
        let mut coded = Vec::with_capacity(outcomes.len());
        for (labels, p) in outcomes {
            if labels.len() != nv {
                return Err(Error::ShapeMismatch("ragged outcome labels".into()));
            }
            let sym: Vec<usize> = labels
                .iter()
                .zip(maps.iter_mut())
                .map(|(l, m)| {
                    let next = m.len();
                    *m.entry(*l).or_insert(next)
                })
                .collect();
            coded.push((sym, *p));
        }
        let arity = maps.iter().map(|m| m.len()).collect();
        JointDist::from_outcomes(arity, coded.iter().map(|(s, p)| (s.as_slice(), *p)))
    }

    /// Product law of independent variables.
    pub fn independent(marginals: &[&FiniteDist]) -> Result<Self> {
        let arity: Vec<usize> = marginals.iter().map(|d| d.alphabet_size()).collect();
        let size = checked_size(&arity)?;
        let mut table = vec![1.0; size];
        let strides = strides_of(&arity);
        for (idx, cell) in table.iter_mut().enumerate() {
            for (v, d) in marginals.iter().enumerate() {
                *cell *= d.probs()[(idx / strides[v]) % arity[v]];
            }
        }
        JointDist::new(arity, table)
    }

    pub fn num_vars(&self) -> usize {
        self.arity.len()
    }

    pub fn arity(&self) -> &[usize] {
        &self.arity
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn prob(&self, symbols: &[usize]) -> f64 {
        let strides = strides_of(&self.arity);
        let idx: usize = symbols.iter().zip(&strides).map(|(s, st)| s * st).sum();
        self.table[idx]
    }

    /// Decodes a flat table index into per-variable symbols.
    pub fn symbols_of(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.arity.len()];
        for v in (0..self.arity.len()).rev() {
            out[v] = idx % self.arity[v];
            idx /= self.arity[v];
        }
        out
    }

    pub(crate) fn check_vars(&self, vars: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.arity.len()];
        for &v in vars {
            if v >= self.arity.len() {
                return invalid(format!(
                    "variable {v} out of range for a {}-variable law",
                    self.arity.len()
                ));
            }
            if seen[v] {
                return invalid(format!("variable {v} listed twice"));
            }
            seen[v] = true;
        }
        Ok(())
    }

    /// Marginal on `vars`, in the order given.
    pub fn marginal(&self, vars: &[usize]) -> Result<JointDist> {
        if vars.is_empty() {
            return invalid("marginal over an empty set of variables");
        }
        self.check_vars(vars)?;
        let arity: Vec<usize> = vars.iter().map(|&v| self.arity[v]).collect();
        let out = self.marginal_table(vars);
        Ok(JointDist { arity, table: out })
    }

    /// Raw marginal mass vector on `vars` (empty `vars` gives `[1.0]`).
    pub(crate) fn marginal_table(&self, vars: &[usize]) -> Vec<f64> {
        let n = self.arity.len();
        // For each source variable, the stride it contributes to the target index.
        let mut target_stride = vec![0usize; n];
        let mut size = 1usize;
        for &v in vars.iter().rev() {
            target_stride[v] = size;
            size *= self.arity[v];
        }
        let mut out = vec![0.0; size];
        if vars.len() == n && vars.iter().enumerate().all(|(i, &v)| i == v) {
            out.copy_from_slice(&self.table);
            return out;
        }
        // Odometer walk over the source table.
        let mut digits = vec![0usize; n];
        let mut tidx = 0usize;
        for &p in &self.table {
            if p != 0.0 {
                out[tidx] += p;
            }
            for v in (0..n).rev() {
                digits[v] += 1;
                tidx += target_stride[v];
                if digits[v] < self.arity[v] {
                    break;
                }
                tidx -= target_stride[v] * self.arity[v];
                digits[v] = 0;
            }
        }
        out
    }

    /// Law conditioned on `var = value`; the variable keeps its slot as a
    /// point mass.
    pub fn condition(&self, var: usize, value: usize) -> Result<JointDist> {
        self.check_vars(&[var])?;
        if value >= self.arity[var] {
            return invalid(format!("value {value} outside alphabet of variable {var}"));
        }
        let strides = strides_of(&self.arity);
        let mut table = vec![0.0; self.table.len()];
        let mut mass = 0.0;
        for (idx, &p) in self.table.iter().enumerate() {
            if (idx / strides[var]) % self.arity[var] == value {
                table[idx] = p;
                mass += p;
            }
        }
        if mass <= 0.0 {
            return invalid(format!("conditioning on a null event (variable {var} = {value})"));
        }
        table.iter_mut().for_each(|p| *p /= mass);
        Ok(JointDist {
            arity: self.arity.clone(),
            table,
        })
    }

    /// Independent juxtaposition of two laws: variables of `self` first.
    pub fn product(&self, other: &JointDist) -> Result<JointDist> {
        let mut arity = self.arity.clone();
        arity.extend_from_slice(&other.arity);
        checked_size(&arity)?;
        let mut table = Vec::with_capacity(self.table.len() * other.table.len());
        for &a in &self.table {
            for &b in &other.table {
                table.push(a * b);
            }
        }
        Ok(JointDist { arity, table })
    }

    /// Applies a deterministic map to one variable.
    pub fn map_var(&self, var: usize, new_arity: usize, f: impl Fn(usize) -> usize) -> Result<JointDist> {
        self.check_vars(&[var])?;
        let mut arity = self.arity.clone();
        arity[var] = new_arity;
        let size = checked_size(&arity)?;
        let mut table = vec![0.0; size];
        let old_strides = strides_of(&self.arity);
        let new_strides = strides_of(&arity);
        for (idx, &p) in self.table.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let s = (idx / old_strides[var]) % self.arity[var];
            let t = f(s);
            if t >= new_arity {
                return invalid(format!("mapped symbol {t} outside new alphabet {new_arity}"));
            }
            let mut nidx = 0;
            for v in 0..self.arity.len() {
                let sym = if v == var { t } else { (idx / old_strides[v]) % self.arity[v] };
                nidx += sym * new_strides[v];
            }
            table[nidx] += p;
        }
        Ok(JointDist { arity, table })
    }
}

pub(crate) fn strides_of(arity: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; arity.len()];
    for v in (0..arity.len().saturating_sub(1)).rev() {
        strides[v] = strides[v + 1] * arity[v + 1];
    }
    strides
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_mass() {
        assert!(matches!(
            FiniteDist::new(vec![0.5, 0.6]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            FiniteDist::new(vec![1.5, -0.5]),
            Err(Error::NegativeProbability(_))
        ));
        let d = FiniteDist::new(vec![0.5, 0.5 + 5e-10]).unwrap();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn marginal_reorders() {
        let j = JointDist::new(vec![2, 3], vec![0.1, 0.2, 0.0, 0.3, 0.0, 0.4]).unwrap();
        let m = j.marginal(&[1, 0]).unwrap();
        assert_eq!(m.arity(), &[3, 2]);
        assert!((m.prob(&[0, 1]) - 0.3).abs() < 1e-15);
        assert!((m.prob(&[2, 1]) - 0.4).abs() < 1e-15);
        let m1 = j.marginal(&[1]).unwrap();
        assert!((m1.table()[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn budget_is_enforced() {
        let err = JointDist::new(vec![1 << 14, 1 << 14], vec![]).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn labeled_outcomes_are_interned() {
        let j = JointDist::from_labeled(&[(vec![7, 100], 0.5), (vec![9, 100], 0.5)]).unwrap();
        assert_eq!(j.arity(), &[2, 1]);
    }

    #[test]
    fn condition_keeps_point_mass() {
        let j = JointDist::new(vec![2, 2], vec![0.25; 4]).unwrap();
        let c = j.condition(0, 1).unwrap();
        assert_eq!(c.prob(&[1, 0]), 0.5);
        assert_eq!(c.prob(&[0, 0]), 0.0);
        assert!(j.map_var(0, 1, |_| 0).unwrap().condition(0, 0).is_ok());
    }
}
