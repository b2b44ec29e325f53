use rand::Rng;
use serde::Serialize;

use super::simplex::maximize_or_internal;
use crate::error::{invalid, Error, Result};

/// Largest terminal count handled by the subset-indexed routines.
pub const MAX_TERMINALS: usize = 6;

/// Covering tolerance for fractional partitions.
pub const COVER_TOL: f64 = 1e-8;

/// Subsets of terminals `0..m` are bit masks.
pub type Subset = u32;

pub fn full_mask(m: usize) -> Subset {
    (1u32 << m) - 1
}

pub fn members(mask: Subset) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Formats a subset with 1-based terminal labels, e.g. `{1,3}`.
pub fn subset_label(mask: Subset) -> String {
    let inner: Vec<String> = members(mask).iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn check_m(m: usize) -> Result<()> {
    if !(2..=MAX_TERMINALS).contains(&m) {
        return invalid(format!("terminal count must be in 2..={MAX_TERMINALS}, got {m}"));
    }
    Ok(())
}

/// Set partition of the terminals into at least two blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    m: usize,
    blocks: Vec<Subset>,
}

impl Partition {
    /// Blocks are lists of 0-based terminal indices.
    pub fn new(m: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        check_m(m)?;
        let mut seen: Subset = 0;
        let mut masks = Vec::with_capacity(blocks.len());
        for b in blocks {
            if b.is_empty() {
                return invalid("partition blocks must be nonempty");
            }
            let mut mask = 0;
            for &i in b {
                if i >= m {
                    return invalid(format!("terminal {} outside 1..={m}", i + 1));
                }
                if (seen | mask) >> i & 1 == 1 {
                    return invalid(format!("terminal {} appears twice", i + 1));
                }
                mask |= 1 << i;
            }
            seen |= mask;
            masks.push(mask);
        }
        if seen != full_mask(m) {
            return invalid("partition blocks must cover every terminal");
        }
        if masks.len() < 2 {
            return invalid("a partition needs at least two blocks");
        }
        Ok(Partition { m, blocks: masks })
    }

    /// Parses `1|2,3` style specs (1-based terminals, `|` between blocks).
    pub fn parse(m: usize, spec: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for part in spec.split('|') {
            let mut b = Vec::new();
            for tok in part.split(',') {
                let tok = tok.trim();
                let i: usize = tok
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad terminal label {tok:?} in partition")))?;
                if i == 0 {
                    return invalid("terminal labels start at 1");
                }
                b.push(i - 1);
            }
            blocks.push(b);
        }
        Partition::new(m, &blocks)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> &[Subset] {
        &self.blocks
    }

    pub fn label(&self) -> String {
        self.blocks.iter().map(|&b| subset_label(b)).collect::<Vec<_>>().join("")
    }
}

/// Every partition of `0..m` with at least two blocks.
pub fn all_partitions(m: usize) -> Result<Vec<Partition>> {
    check_m(m)?;
    // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[..i]).
    let mut out = Vec::new();
    let mut a = vec![0usize; m];
    loop {
        let k = a.iter().max().unwrap() + 1;
        if k >= 2 {
            let mut blocks = vec![0 as Subset; k];
            for (i, &b) in a.iter().enumerate() {
                blocks[b] |= 1 << i;
            }
            out.push(Partition { m, blocks });
        }
        // Next string.
        let mut i = m - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            let cap = a[..i].iter().max().unwrap() + 1;
            if a[i] < cap {
                a[i] += 1;
                a[i + 1..].iter_mut().for_each(|v| *v = 0);
                break;
            }
            i -= 1;
        }
    }
}

/// Weights `lambda_B` on proper nonempty subsets with every terminal covered
/// exactly once in total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalPartition {
    m: usize,
    // Indexed by mask; entries 0 and full stay 0.
    weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<Partition>,
}

impl FractionalPartition {
    pub fn new(m: usize, weights: &[(Subset, f64)]) -> Result<Self> {
        check_m(m)?;
        let full = full_mask(m);
        let mut w = vec![0.0; 1 << m];
        for &(mask, l) in weights {
            if mask == 0 || mask >= full {
                return invalid(format!("subset mask {mask} is not a proper nonempty subset"));
            }
            if !(-COVER_TOL..=1.0 + COVER_TOL).contains(&l) {
                return invalid(format!("weight {l} for {} outside [0, 1]", subset_label(mask)));
            }
            w[mask as usize] += l.clamp(0.0, 1.0);
        }
        let fp = FractionalPartition { m, weights: w, source: None };
        let err = fp.covering_error();
        if err > COVER_TOL {
            return invalid(format!("weights miss the covering constraint by {err:e}"));
        }
        Ok(fp)
    }

    /// Weights from a vector indexed by subset mask.
    pub(crate) fn from_mask_vector(m: usize, w: Vec<f64>) -> Result<Self> {
        let pairs: Vec<(Subset, f64)> = w
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != 0.0)
            .map(|(i, &l)| (i as Subset, l))
            .collect();
        FractionalPartition::new(m, &pairs)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn weight(&self, mask: Subset) -> f64 {
        self.weights.get(mask as usize).copied().unwrap_or(0.0)
    }

    /// Subsets with positive weight.
    pub fn support(&self) -> Vec<(Subset, f64)> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0.0)
            .map(|(i, &l)| (i as Subset, l))
            .collect()
    }

    /// The partition this was derived from, if any.
    pub fn source(&self) -> Option<&Partition> {
        self.source.as_ref()
    }

    /// `max_i |sum_{B containing i} lambda_B - 1|`.
    pub fn covering_error(&self) -> f64 {
        (0..self.m)
            .map(|i| {
                let s: f64 = self
                    .weights
                    .iter()
                    .enumerate()
                    .filter(|(mask, _)| mask >> i & 1 == 1)
                    .map(|(_, l)| l)
                    .sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Readable `{subset: weight}` listing with 1-based labels.
    pub fn labeled(&self) -> Vec<(String, f64)> {
        self.support().into_iter().map(|(b, l)| (subset_label(b), l)).collect()
    }
}

/// `lambda_{pi_i^c} = 1 / (k - 1)` for each block `pi_i`.
pub fn partition_to_fractional(p: &Partition) -> FractionalPartition {
    let k = p.blocks.len();
    let full = full_mask(p.m);
    let mut w = vec![0.0; 1 << p.m];
    for &b in &p.blocks {
        w[(full & !b) as usize] += 1.0 / (k - 1) as f64;
    }
    FractionalPartition {
        m: p.m,
        weights: w,
        source: Some(p.clone()),
    }
}

/// Equality rows of the covering polytope over masks `1..2^m - 1`.
pub(crate) fn covering_rows(m: usize) -> Vec<Vec<f64>> {
    let nvars = (1usize << m) - 2;
    (0..m)
        .map(|i| (0..nvars).map(|j| if (j + 1) >> i & 1 == 1 { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Random fractional partition: a random convex mixture of up to three
/// vertices of the covering polytope, each the LP optimum for a random
/// objective. Every vertex is reachable, so the draws span the polytope.
pub fn random_fractional_partition<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<FractionalPartition> {
    check_m(m)?;
    let rows = covering_rows(m);
    let ones = vec![1.0; m];
    let nvars = (1usize << m) - 2;
    let parts = rng.gen_range(1..=3);
    let mix: Vec<f64> = {
        let raw: Vec<f64> = (0..parts).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
        let s: f64 = raw.iter().sum();
        raw.iter().map(|r| r / s).collect()
    };
    let mut w = vec![0.0; 1 << m];
    for theta in mix {
        let c: Vec<f64> = (0..nvars).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sol = maximize_or_internal(&c, &rows, &ones)?;
        for (j, x) in sol.x.iter().enumerate() {
            w[j + 1] += theta * x;
        }
    }
    FractionalPartition::from_mask_vector(m, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_examples() {
        let p = Partition::parse(3, "1|2,3").unwrap();
        let f = partition_to_fractional(&p);
        assert_eq!(f.weight(0b110), 1.0);
        assert_eq!(f.weight(0b001), 1.0);
        assert_eq!(f.support().len(), 2);

        let singles = Partition::parse(3, "1|2|3").unwrap();
        let f = partition_to_fractional(&singles);
        for mask in [0b011, 0b101, 0b110] {
            assert_eq!(f.weight(mask), 0.5);
        }
        let two = partition_to_fractional(&Partition::parse(2, "1|2").unwrap());
        assert_eq!((two.weight(1), two.weight(2)), (1.0, 1.0));
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::parse(3, "1,2,3").is_err());
        assert!(Partition::parse(3, "1|2").is_err());
        assert!(Partition::parse(3, "1|1,2,3").is_err());
        assert!(Partition::parse(3, "0|1,2").is_err());
    }

    #[test]
    fn partition_counts_are_bell_minus_one() {
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for m in 2..=6 {
            assert_eq!(all_partitions(m).unwrap().len(), bell[m] - 1);
        }
    }

    #[test]
    fn covering_constraint_checked() {
        assert!(FractionalPartition::new(2, &[(1, 1.0), (2, 0.5)]).is_err());
        assert!(FractionalPartition::new(2, &[(3, 1.0)]).is_err());
        let mut rng = crate::seed::rng(3);
        for m in 2..=5 {
            for _ in 0..20 {
                let f = random_fractional_partition(m, &mut rng).unwrap();
                assert!(f.covering_error() <= COVER_TOL);
            }
        }
    }
}
