use rand::Rng;

use super::dist::{checked_size, FiniteDist, JointDist, NORMALIZATION_TOL};
use crate::error::{invalid, Error, Result};

/// Two-input discrete memoryless channel `W(x3 | x1, x2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MacChannel {
    in1: usize,
    in2: usize,
    out: usize,
    // Flattened [x1][x2][x3].
    w: Vec<f64>,
}

impl MacChannel {
    /// Builds a channel from rows `w[x1][x2][x3]`. Rows within the
    /// normalization tolerance are renormalized.
    pub fn new(w: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let in1 = w.len();
        let in2 = w.first().map_or(0, |r| r.len());
        let out = w.first().and_then(|r| r.first()).map_or(0, |r| r.len());
        if in1 == 0 || in2 == 0 || out == 0 {
            return invalid("channel alphabets must be nonempty");
        }
        let mut flat = Vec::with_capacity(in1 * in2 * out);
        for (x1, rows) in w.iter().enumerate() {
            if rows.len() != in2 {
                return Err(Error::ShapeMismatch(format!("w[{x1}] has {} rows, expected {in2}", rows.len())));
            }
            for (x2, row) in rows.iter().enumerate() {
                if row.len() != out {
                    return Err(Error::ShapeMismatch(format!(
                        "w[{x1}][{x2}] has {} entries, expected {out}",
                        row.len()
                    )));
                }
                let total: f64 = row.iter().sum();
                if let Some(&bad) = row.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
                    return Err(Error::NegativeProbability(bad));
                }
                if (total - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::NotNormalized(total));
                }
                flat.extend(row.iter().map(|p| p / total));
            }
        }
        Ok(MacChannel { in1, in2, out, w: flat })
    }

    /// Deterministic channel from a map `(x1, x2) -> x3`.
    pub fn deterministic(in1: usize, in2: usize, out: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut w = vec![0.0; in1 * in2 * out];
        for x1 in 0..in1 {
            for x2 in 0..in2 {
                let y = f(x1, x2);
                assert!(y < out);
                w[(x1 * in2 + x2) * out + y] = 1.0;
            }
        }
        MacChannel { in1, in2, out, w }
    }

    /// Binary adder channel `x3 = x1 + x2` over the integers.
    pub fn adder() -> Self {
        Self::deterministic(2, 2, 3, |a, b| a + b)
    }

    /// Binary modulo-two adder `x3 = x1 xor x2`.
    pub fn xor() -> Self {
        Self::deterministic(2, 2, 2, |a, b| a ^ b)
    }

    /// Adder channel whose output is replaced, with probability `flip`, by one
    /// of the two other output symbols chosen uniformly.
    pub fn noisy_adder(flip: f64) -> Self {
        let mut w = vec![0.0; 12];
        for x1 in 0..2 {
            for x2 in 0..2 {
                for y in 0..3 {
                    w[(x1 * 2 + x2) * 3 + y] = if y == x1 + x2 { 1.0 - flip } else { flip / 2.0 };
                }
            }
        }
        MacChannel { in1: 2, in2: 2, out: 3, w }
    }

    /// Channel whose output ignores both inputs.
    pub fn useless(out_law: &FiniteDist) -> Self {
        let out = out_law.alphabet_size();
        let mut w = Vec::with_capacity(4 * out);
        for _ in 0..4 {
            w.extend_from_slice(out_law.probs());
        }
        MacChannel { in1: 2, in2: 2, out, w }
    }

    pub fn in1(&self) -> usize {
        self.in1
    }

    pub fn in2(&self) -> usize {
        self.in2
    }

    pub fn out(&self) -> usize {
        self.out
    }

    #[inline]
    pub fn prob(&self, x3: usize, x1: usize, x2: usize) -> f64 {
        self.w[(x1 * self.in2 + x2) * self.out + x3]
    }

    #[inline]
    pub fn row(&self, x1: usize, x2: usize) -> &[f64] {
        let base = (x1 * self.in2 + x2) * self.out;
        &self.w[base..base + self.out]
    }

    /// Nested `w[x1][x2][x3]` form, as stored in channel files.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.in1)
            .map(|x1| (0..self.in2).map(|x2| self.row(x1, x2).to_vec()).collect())
            .collect()
    }

    pub fn is_deterministic(&self) -> bool {
        self.w.iter().all(|&p| p == 0.0 || p == 1.0)
    }

    /// `W(x3 | x1, x2) = W(x3 | x2, x1)` within `tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.in1 == self.in2
            && (0..self.in1).all(|a| {
                (0..self.in2).all(|b| {
                    self.row(a, b)
                        .iter()
                        .zip(self.row(b, a))
                        .all(|(p, q)| (p - q).abs() <= tol)
                })
            })
    }

    pub fn sample<R: Rng + ?Sized>(&self, x1: usize, x2: usize, rng: &mut R) -> usize {
        let row = self.row(x1, x2);
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (y, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return y;
            }
        }
        // Rounding left a sliver of mass: fall back to the last supported symbol.
        row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }
}

/// Joint law of `(X1^n, X2^n, X3^n)` for independent i.i.d. inputs sent
/// through `n` uses of the channel.
///
/// Variables are ordered `x1_1..x1_n, x2_1..x2_n, x3_1..x3_n`.
pub fn channel_pushforward(ch: &MacChannel, p1: &FiniteDist, p2: &FiniteDist, n: usize) -> Result<JointDist> {
    if n == 0 {
        return invalid("block length must be positive");
    }
    if p1.alphabet_size() != ch.in1() || p2.alphabet_size() != ch.in2() {
        return Err(Error::ShapeMismatch("input distributions do not match channel alphabets".into()));
    }
    let mut arity = vec![ch.in1(); n];
    arity.extend(std::iter::repeat(ch.in2()).take(n));
    arity.extend(std::iter::repeat(ch.out()).take(n));
    checked_size(&arity)?;
    // Single-letter law, then memoryless extension letter by letter.
    let mut letter = Vec::with_capacity(ch.in1() * ch.in2() * ch.out());
    for a in 0..ch.in1() {
        for b in 0..ch.in2() {
            for y in 0..ch.out() {
                letter.push(((a, b, y), p1.probs()[a] * p2.probs()[b] * ch.prob(y, a, b)));
            }
        }
    }
    let mut outcomes: Vec<(Vec<usize>, f64)> = vec![(vec![0; 3 * n], 1.0)];
    for t in 0..n {
        let mut next = Vec::with_capacity(outcomes.len() * letter.len());
        for (sym, p) in &outcomes {
            for &((a, b, y), q) in &letter {
                if q == 0.0 {
                    continue;
                }
                let mut s = sym.clone();
                s[t] = a;
                s[n + t] = b;
                s[2 * n + t] = y;
                next.push((s, p * q));
            }
        }
        outcomes = next;
    }
    JointDist::from_outcomes(arity, outcomes.iter().map(|(s, p)| (s.as_slice(), *p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{entropy, mutual_information};

    #[test]
    fn rejects_unnormalized_rows() {
        assert!(MacChannel::new(vec![vec![vec![0.5, 0.4]]]).is_err());
        assert!(MacChannel::new(vec![vec![vec![0.5, 0.5]], vec![vec![1.0]]]).is_err());
    }

    #[test]
    fn pushforward_point_masses() {
        let ch = MacChannel::adder();
        let j = channel_pushforward(&ch, &FiniteDist::point(2, 1), &FiniteDist::point(2, 0), 1).unwrap();
        assert_eq!(j.prob(&[1, 0, 1]), 1.0);
    }

    #[test]
    fn pushforward_adder_output_law() {
        let u = FiniteDist::uniform(2);
        let j = channel_pushforward(&MacChannel::adder(), &u, &u, 1).unwrap();
        let out = j.marginal(&[2]).unwrap();
        assert_eq!(out.table(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn pushforward_xor_two_letters() {
        let u = FiniteDist::uniform(2);
        let j = channel_pushforward(&MacChannel::xor(), &u, &u, 2).unwrap();
        assert_eq!(j.table().len(), 64);
        for t in 0..2 {
            assert_eq!(j.marginal(&[4 + t]).unwrap().table(), &[0.5, 0.5]);
        }
        // Memoryless: the two output letters are independent.
        assert_eq!(mutual_information(&j, &[4], &[5], &[]).unwrap(), 0.0);
        assert!((entropy(&j, &[4, 5]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn symmetry_and_sampling() {
        assert!(MacChannel::adder().is_symmetric(1e-9));
        assert!(MacChannel::noisy_adder(0.05).is_symmetric(1e-9));
        let asym = MacChannel::deterministic(2, 2, 2, |a, _| a);
        assert!(!asym.is_symmetric(1e-9));
        let mut rng = rand::rngs::mock::StepRng::new(0, 1 << 40);
        assert_eq!(MacChannel::adder().sample(1, 1, &mut rng), 2);
    }
}
