use serde::Serialize;

use super::partition::{covering_rows, full_mask, members, FractionalPartition, Subset, MAX_TERMINALS};
use super::simplex::maximize_or_internal;
use crate::error::{invalid, Error, Result};
use crate::info::{binary_entropy, EntropyOracle};

/// Where the terminal observations, key and transcript live in a law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TerminalLayout {
    /// Variables making up each terminal's observation `Y_i`.
    pub terminals: Vec<Vec<usize>>,
    pub key: usize,
    /// Declared key alphabet size `|K|`.
    pub key_alphabet: usize,
    pub transcript: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundTerms {
    /// `H(Y_M)`
    pub h_total: f64,
    /// `sum_B lambda_B H(Y_B | Y_{B^c})`
    pub penalty: f64,
    /// `log|K| - H(K | F)`
    pub s_in: f64,
    /// `(m + 2)(eps log|K| + h(eps))`
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseBoundResult {
    /// Upper bound on `log|K|`: `h_total - penalty + s_in + nu`.
    pub bound_bits: f64,
    pub log_k: f64,
    pub terms: BoundTerms,
    /// `D(P_{Y_M} || prod_i P_{Y_{pi_i}}) / (k - 1) + s_in + nu` when the
    /// weights come from a partition; equals `bound_bits`.
    pub partition_form: Option<f64>,
}

fn vars_of(terminals: &[Vec<usize>], mask: Subset) -> Vec<usize> {
    members(mask).into_iter().flat_map(|i| terminals[i].iter().copied()).collect()
}

/// `sum_B lambda_B H(Y_B | Y_{B^c})`.
pub fn penalty<L: EntropyOracle + ?Sized>(law: &L, terminals: &[Vec<usize>], lam: &FractionalPartition) -> Result<f64> {
    if lam.m() != terminals.len() {
        return Err(Error::ShapeMismatch(format!(
            "weights are over {} terminals, law has {}",
            lam.m(),
            terminals.len()
        )));
    }
    let full = full_mask(lam.m());
    Ok(lam
        .support()
        .into_iter()
        .map(|(b, l)| l * law.cond_entropy(&vars_of(terminals, b), &vars_of(terminals, full & !b)))
        .sum())
}

/// Right-hand side of the one-shot converse for weights `lam`.
pub fn one_shot_bound<L: EntropyOracle + ?Sized>(
    law: &L,
    layout: &TerminalLayout,
    lam: &FractionalPartition,
    eps: f64,
) -> Result<ConverseBoundResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps must lie in (0, 1), got {eps}"));
    }
    if layout.key_alphabet == 0 {
        return invalid("key alphabet must be nonempty");
    }
    let m = layout.terminals.len();
    let all: Vec<usize> = layout.terminals.iter().flatten().copied().collect();
    let nv = law.num_vars();
    if all
        .iter()
        .chain(&layout.transcript)
        .chain(std::iter::once(&layout.key))
        .any(|&v| v >= nv)
    {
        return Err(Error::ShapeMismatch("layout names a variable outside the law".into()));
    }
    let h_total = law.joint_entropy(&all);
    let pen = penalty(law, &layout.terminals, lam)?;
    let log_k = (layout.key_alphabet as f64).log2();
    let s_in = (log_k - law.cond_entropy(&[layout.key], &layout.transcript)).max(0.0);
    let nu = (m as f64 + 2.0) * (eps * log_k + binary_entropy(eps));
    let bound_bits = h_total - pen + s_in + nu;
    let partition_form = lam.source().map(|p| {
        let k = p.blocks().len() as f64;
        let d: f64 = p
            .blocks()
            .iter()
            .map(|&b| law.joint_entropy(&vars_of(&layout.terminals, b)))
            .sum::<f64>()
            - h_total;
        d / (k - 1.0) + s_in + nu
    });
    Ok(ConverseBoundResult {
        bound_bits,
        log_k,
        terms: BoundTerms {
            h_total,
            penalty: pen,
            s_in,
            nu,
        },
        partition_form,
    })
}

/// Weights maximizing the penalty, i.e. giving the tightest bound, by LP
/// over the covering polytope. Returns the weights and the penalty.
pub fn best_bound_lp<L: EntropyOracle + ?Sized>(law: &L, terminals: &[Vec<usize>]) -> Result<(FractionalPartition, f64)> {
    let m = terminals.len();
    if !(2..=MAX_TERMINALS).contains(&m) {
        return invalid(format!("LP bound supports 2..={MAX_TERMINALS} terminals, got {m}"));
    }
    let full = full_mask(m);
    let c: Vec<f64> = (1..full)
        .map(|b| law.cond_entropy(&vars_of(terminals, b), &vars_of(terminals, full & !b)))
        .collect();
    let sol = maximize_or_internal(&c, &covering_rows(m), &vec![1.0; m])?;
    let mut w = vec![0.0; 1 << m];
    for (j, x) in sol.x.iter().enumerate() {
        w[j + 1] = *x;
    }
    let lam = FractionalPartition::from_mask_vector(m, w)?;
    let pen = penalty(law, terminals, &lam)?;
    Ok((lam, pen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::converse::partition::{all_partitions, partition_to_fractional, Partition};
    use crate::info::JointDist;

    fn xor_triple() -> JointDist {
        let mut t = vec![0.0; 8];
        for a in 0..2 {
            for b in 0..2 {
                t[a * 4 + b * 2 + (a ^ b)] = 0.25;
            }
        }
        JointDist::new(vec![2, 2, 2], t).unwrap()
    }

    #[test]
    fn shared_bit_bound() {
        // (Y1, Y2, K, F) with Y1 = Y2 = K uniform and F constant.
        let j = JointDist::new(vec![2, 2, 2, 1], {
            let mut t = vec![0.0; 8];
            t[0] = 0.5;
            t[7] = 0.5;
            t
        })
        .unwrap();
        let layout = TerminalLayout {
            terminals: vec![vec![0], vec![1]],
            key: 2,
            key_alphabet: 2,
            transcript: vec![3],
        };
        let lam = partition_to_fractional(&Partition::parse(2, "1|2").unwrap());
        let r = one_shot_bound(&j, &layout, &lam, 0.01).unwrap();
        assert!(r.bound_bits >= 1.0);
        assert!((r.bound_bits - r.terms.nu - r.terms.s_in - 1.0).abs() < 1e-12);
        assert!((r.partition_form.unwrap() - r.bound_bits).abs() < 1e-12);
        assert!(one_shot_bound(&j, &layout, &lam, 1.0).is_err());
    }

    #[test]
    fn independent_observations_give_nothing() {
        let mut t = vec![0.0; 16];
        for a in 0..2 {
            for b in 0..2 {
                // K = 0 constant, F constant.
                t[a * 8 + b * 4] = 0.25;
            }
        }
        let j = JointDist::new(vec![2, 2, 2, 2], t).unwrap();
        let layout = TerminalLayout {
            terminals: vec![vec![0], vec![1]],
            key: 2,
            key_alphabet: 1,
            transcript: vec![3],
        };
        let lam = partition_to_fractional(&Partition::parse(2, "1|2").unwrap());
        let r = one_shot_bound(&j, &layout, &lam, 0.1).unwrap();
        assert!((r.bound_bits - r.terms.nu - r.terms.s_in).abs() < 1e-12);
    }

    #[test]
    fn xor_triple_divergence() {
        let j = xor_triple();
        let terms = vec![vec![0], vec![1], vec![2]];
        let lam = partition_to_fractional(&Partition::parse(3, "1|2|3").unwrap());
        let pen = penalty(&j, &terms, &lam).unwrap();
        // H - penalty = D / 2 = (1 + 1 + 1 - 2) / 2.
        assert!((2.0 - pen - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lp_examples() {
        let two = JointDist::new(vec![2, 2], vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let (lam, pen) = best_bound_lp(&two, &[vec![0], vec![1]]).unwrap();
        assert_eq!((lam.weight(1), lam.weight(2)), (1.0, 1.0));
        let h = two.cond_entropy(&[0], &[1]) + two.cond_entropy(&[1], &[0]);
        assert!((pen - h).abs() < 1e-9);

        let iid = JointDist::new(vec![2, 2, 2], vec![0.125; 8]).unwrap();
        let (_, pen) = best_bound_lp(&iid, &[vec![0], vec![1], vec![2]]).unwrap();
        assert!((pen - 3.0).abs() < 1e-9);

        let x = xor_triple();
        let terms = vec![vec![0], vec![1], vec![2]];
        let (_, pen) = best_bound_lp(&x, &terms).unwrap();
        let best_partition = all_partitions(3)
            .unwrap()
            .iter()
            .map(|p| penalty(&x, &terms, &partition_to_fractional(p)).unwrap())
            .fold(f64::MIN, f64::max);
        assert!((pen - best_partition).abs() < 1e-9);
    }
}
