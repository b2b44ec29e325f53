//! Slepian-Wolf coding of `N` independent blocks by seeded random linear
//! binning, decoded with an exact per-block side-information law.

use serde::Serialize;

use super::gf2::{get_bit, solve, xor_into, BitMatrix};
use crate::error::{invalid, Result};
use crate::seed;

/// Largest kernel dimension searched exhaustively inside a bin.
pub const MAX_KERNEL_DIM: usize = 12;

/// Random linear binning `F = H v` of the concatenated block symbols `v`,
/// each symbol `block_bits` wide.
#[derive(Debug, Clone, PartialEq)]
pub struct SwCode {
    blocks: usize,
    block_bits: usize,
    bins: usize,
    // H^T: one row of `bins` bits per source bit.
    ht: BitMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SwStatus {
    /// Best candidate in the bin, after searching `2^kernel_dim` of them.
    Decoded { kernel_dim: usize },
    /// No communication and some block was not determined by the side
    /// information; the most probable symbol was taken.
    Guessed,
    /// No supported sequence lies in the bin.
    NoCandidate,
    /// Too many candidates to search.
    Ambiguous { kernel_dim: usize },
}

impl SwStatus {
    pub fn is_failure(self) -> bool {
        matches!(self, SwStatus::NoCandidate | SwStatus::Ambiguous { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwDecode {
    /// Reconstructed symbols; the per-block most probable symbols when
    /// decoding fails.
    pub symbols: Vec<u64>,
    pub status: SwStatus,
    /// Dimension of the affine search space.
    pub unknowns: usize,
}

impl SwCode {
    /// Bin count `ceil(N (target + slack))`, or none at all when the
    /// conditional entropy target is zero.
    pub fn new(blocks: usize, block_bits: usize, target: f64, slack: f64, seed: u64) -> Result<Self> {
        if !(target >= 0.0 && target.is_finite()) || !(slack >= 0.0 && slack.is_finite()) {
            return invalid(format!("entropy target {target} and slack {slack} must be finite and nonnegative"));
        }
        let bins = if target <= 1e-12 {
            0
        } else {
            (blocks as f64 * (target + slack) - 1e-9).ceil() as usize
        };
        Self::with_bins(blocks, block_bits, bins, seed)
    }

    pub fn with_bins(blocks: usize, block_bits: usize, bins: usize, seed: u64) -> Result<Self> {
        if block_bits == 0 || block_bits > 32 {
            return invalid(format!("block symbols must be 1 to 32 bits wide, got {block_bits}"));
        }
        let ht = BitMatrix::random(blocks * block_bits, bins, &mut seed::rng(seed));
        Ok(SwCode {
            blocks,
            block_bits,
            bins,
            ht,
        })
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn block_bits(&self) -> usize {
        self.block_bits
    }

    /// Public bits sent.
    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Bits per block.
    pub fn rate(&self) -> f64 {
        self.bins as f64 / self.blocks.max(1) as f64
    }

    /// Bin index of one symbol per block.
    pub fn compress(&self, symbols: &[u64]) -> Vec<u64> {
        assert_eq!(symbols.len(), self.blocks, "one symbol per block");
        let mut out = vec![0; self.bins.div_ceil(64)];
        for (j, &s) in symbols.iter().enumerate() {
            self.add_symbol(&mut out, j, s);
        }
        out
    }

    /// Bin contribution of symbol `s` in block `block` alone; bins of a
    /// sequence are the XOR of these.
    pub fn symbol_bin(&self, block: usize, s: u64) -> Vec<u64> {
        let mut out = vec![0; self.bins.div_ceil(64)];
        self.add_symbol(&mut out, block, s);
        out
    }

    fn add_symbol(&self, acc: &mut [u64], block: usize, s: u64) {
        let mut bits = s;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            xor_into(acc, self.ht.row(block * self.block_bits + i));
        }
    }

    /// Most probable supported sequence in the bin. `side[j][s]` is the
    /// decoder's probability of symbol `s` in block `j`.
    pub fn decode(&self, bin: &[u64], side: &[Vec<f64>]) -> SwDecode {
        assert_eq!(side.len(), self.blocks, "one law per block");
        let ranked: Vec<Vec<u64>> = side
            .iter()
            .map(|law| {
                let mut s: Vec<u64> = (0..law.len() as u64).filter(|&s| law[s as usize] > 0.0).collect();
                s.sort_by(|&a, &b| law[b as usize].total_cmp(&law[a as usize]).then(a.cmp(&b)));
                if s.is_empty() {
                    s.push(0);
                }
                s
            })
            .collect();
        let map: Vec<u64> = ranked.iter().map(|r| r[0]).collect();
        if self.bins == 0 {
            let determined = ranked.iter().all(|r| r.len() == 1);
            return SwDecode {
                symbols: map,
                status: if determined { SwStatus::Decoded { kernel_dim: 0 } } else { SwStatus::Guessed },
                unknowns: 0,
            };
        }
        // Parametrize each block as base + span of supported differences.
        let bases: Vec<Vec<u64>> = ranked.iter().map(|r| span_basis(r.iter().map(|&s| s ^ r[0]))).collect();
        let unknowns: usize = bases.iter().map(Vec::len).sum();
        let mut at = BitMatrix::zeros(unknowns, self.bins);
        let mut row = 0;
        for (j, basis) in bases.iter().enumerate() {
            for &g in basis {
                self.add_symbol(at.row_mut(row), j, g);
                row += 1;
            }
        }
        let mut rhs = bin.to_vec();
        for (j, &a) in map.iter().enumerate() {
            self.add_symbol(&mut rhs, j, a);
        }
        let fail = |status| SwDecode {
            symbols: map.clone(),
            status,
            unknowns,
        };
        let Some(sol) = solve(&at.transpose(), &rhs) else {
            return fail(SwStatus::NoCandidate);
        };
        let kd = sol.kernel.len();
        if kd > MAX_KERNEL_DIM {
            return fail(SwStatus::Ambiguous { kernel_dim: kd });
        }
        let mut best: Option<(f64, Vec<u64>)> = None;
        for mask in 0..1u64 << kd {
            let mut s = sol.particular.clone();
            for (i, k) in sol.kernel.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    xor_into(&mut s, k);
                }
            }
            let mut symbols = Vec::with_capacity(self.blocks);
            let mut score = 0.0;
            let mut p = 0;
            for (j, basis) in bases.iter().enumerate() {
                let mut v = map[j];
                for &g in basis {
                    if get_bit(&s, p) {
                        v ^= g;
                    }
                    p += 1;
                }
                let q = side[j].get(v as usize).copied().unwrap_or(0.0);
                if q <= 0.0 {
                    score = f64::NEG_INFINITY;
                    break;
                }
                score += q.ln();
                symbols.push(v);
            }
            if score > f64::NEG_INFINITY && best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, symbols));
            }
        }
        match best {
            Some((_, symbols)) => SwDecode {
                symbols,
                status: SwStatus::Decoded { kernel_dim: kd },
                unknowns,
            },
            None => fail(SwStatus::NoCandidate),
        }
    }
}

/// Basis of the GF(2) span of small bit vectors.
fn span_basis(vectors: impl Iterator<Item = u64>) -> Vec<u64> {
    let mut reduced: Vec<u64> = Vec::new();
    let mut basis = Vec::new();
    for v in vectors {
        let mut x = v;
        for &r in &reduced {
            x = x.min(x ^ r);
        }
        if x != 0 {
            reduced.push(x);
            reduced.sort_unstable_by(|a, b| b.cmp(a));
            basis.push(v);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn span_basis_dimension() {
        assert_eq!(span_basis([0, 1, 2, 3].into_iter()).len(), 2);
        assert_eq!(span_basis([5, 5, 0].into_iter()).len(), 1);
        assert!(span_basis([0].into_iter()).is_empty());
    }

    /// Uniform bits with useless side information.
    fn uniform_error_rate(blocks: usize, rate: f64, trials: u64) -> f64 {
        let side = vec![vec![0.5, 0.5]; blocks];
        let mut errors = 0;
        for i in 0..trials {
            let bins = (blocks as f64 * rate).ceil() as usize;
            let code = SwCode::with_bins(blocks, 1, bins, seed::derive(1, seed::stream::BINNING, i)).unwrap();
            let mut rng = seed::rng(seed::derive(2, seed::stream::TRIAL, i));
            let v: Vec<u64> = (0..blocks).map(|_| rng.gen_range(0..2)).collect();
            let d = code.decode(&code.compress(&v), &side);
            if d.symbols != v {
                errors += 1;
            }
        }
        errors as f64 / trials as f64
    }

    #[test]
    fn above_entropy_decodes() {
        let e = uniform_error_rate(200, 1.1, 200);
        assert!(e <= 0.05, "error rate {e}");
    }

    #[test]
    fn below_entropy_fails_more_with_length() {
        let short = uniform_error_rate(10, 0.8, 300);
        let long = uniform_error_rate(60, 0.8, 300);
        assert!(long > 0.95 && long >= short, "{short} {long}");
    }

    #[test]
    fn deterministic_blocks_need_no_bits() {
        let code = SwCode::new(5, 2, 0.0, 0.1, 3).unwrap();
        assert_eq!(code.bins(), 0);
        let side = vec![vec![0.0, 0.0, 1.0, 0.0]; 5];
        let d = code.decode(&code.compress(&[2; 5]), &side);
        assert_eq!(d.symbols, vec![2; 5]);
        assert_eq!(d.status, SwStatus::Decoded { kernel_dim: 0 });
    }

    #[test]
    fn side_information_picks_the_likely_candidate() {
        // Symbols 0..4 with a skewed law and a tiny bin: decoding returns a
        // supported sequence in the right bin.
        let blocks = 30;
        let side = vec![vec![0.7, 0.1, 0.1, 0.1]; blocks];
        let code = SwCode::new(blocks, 2, 1.36, 0.3, 8).unwrap();
        let mut rng = seed::rng(4);
        let v: Vec<u64> = (0..blocks).map(|_| if rng.gen_bool(0.7) { 0 } else { rng.gen_range(1..4) }).collect();
        let bin = code.compress(&v);
        let d = code.decode(&bin, &side);
        assert!(!d.status.is_failure());
        assert_eq!(code.compress(&d.symbols), bin);
    }
}
