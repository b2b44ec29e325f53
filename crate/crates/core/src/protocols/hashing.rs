//! Toeplitz hashing, a 2-universal family used for privacy amplification.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::gf2::{get_bit, pack, set_bit};
use crate::seed;

/// Products below this many bit operations use the direct sum.
const DIRECT_LIMIT: usize = 1 << 24;

/// Binary `out_len x in_len` Toeplitz matrix `T[i][j] = diag[i - j + in_len - 1]`
/// drawn from a seed. For distinct inputs `x != x'`, `Pr{Tx = Tx'} = 2^-out_len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzHash {
    out_len: usize,
    in_len: usize,
    diag: Vec<u64>,
}

impl ToeplitzHash {
    pub fn new(out_len: usize, in_len: usize, seed: u64) -> Self {
        use rand::Rng;
        let len = (out_len + in_len).saturating_sub(1);
        let mut rng = seed::rng(seed);
        let mut diag: Vec<u64> = (0..len.div_ceil(64)).map(|_| rng.gen()).collect();
        if len % 64 != 0 {
            if let Some(last) = diag.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        ToeplitzHash { out_len, in_len, diag }
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    pub fn in_len(&self) -> usize {
        self.in_len
    }

    /// Hash of a bit string of length `in_len`, packed little-endian.
    pub fn hash(&self, x: &[u64]) -> Vec<u64> {
        assert!(x.len() * 64 >= self.in_len, "input shorter than the hash width");
        if self.out_len == 0 || self.in_len == 0 {
            return vec![0; self.out_len.div_ceil(64)];
        }
        if self.out_len.saturating_mul(self.in_len) <= DIRECT_LIMIT {
            self.hash_direct(x)
        } else {
            self.hash_fft(x)
        }
    }

    pub fn hash_bits(&self, x: &[bool]) -> Vec<bool> {
        let h = self.hash(&pack(x));
        (0..self.out_len).map(|i| get_bit(&h, i)).collect()
    }

    fn hash_direct(&self, x: &[u64]) -> Vec<u64> {
        let ones: Vec<usize> = (0..self.in_len).filter(|&j| get_bit(x, j)).collect();
        let mut out = vec![0; self.out_len.div_ceil(64)];
        for i in 0..self.out_len {
            let parity = ones.iter().fold(false, |acc, &j| acc ^ get_bit(&self.diag, i + self.in_len - 1 - j));
            set_bit(&mut out, i, parity);
        }
        out
    }

    /// `y_i = sum_j diag[i + in_len - 1 - j] x_j` is entry `i + in_len - 1` of
    /// the integer convolution `diag * x`, reduced mod 2. Both sequences go
    /// through one complex transform as real and imaginary parts.
    fn hash_fft(&self, x: &[u64]) -> Vec<u64> {
        let dl = self.out_len + self.in_len - 1;
        let size = (dl + self.in_len - 1).next_power_of_two();
        let mut z: Vec<Complex<f64>> = (0..size)
            .map(|i| {
                let re = if i < dl && get_bit(&self.diag, i) { 1.0 } else { 0.0 };
                let im = if i < self.in_len && get_bit(x, i) { 1.0 } else { 0.0 };
                Complex::new(re, im)
            })
            .collect();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(size).process(&mut z);
        let half = Complex::new(0.5, 0.0);
        let neg_half_i = Complex::new(0.0, -0.5);
        let prod: Vec<Complex<f64>> = (0..size)
            .map(|k| {
                let zk = z[k];
                let zc = z[(size - k) % size].conj();
                ((zk + zc) * half) * ((zk - zc) * neg_half_i)
            })
            .collect();
        drop(z);
        let mut prod = prod;
        planner.plan_fft_inverse(size).process(&mut prod);
        let scale = size as f64;
        let mut out = vec![0; self.out_len.div_ceil(64)];
        for i in 0..self.out_len {
            let v = (prod[i + self.in_len - 1].re / scale).round() as i64;
            set_bit(&mut out, i, v & 1 == 1);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_bits(len: usize, s: u64) -> Vec<bool> {
        let mut rng = seed::rng(s);
        (0..len).map(|_| rng.gen()).collect()
    }

    #[test]
    fn matches_explicit_matrix() {
        let h = ToeplitzHash::new(5, 7, 11);
        let x = random_bits(7, 2);
        let expected: Vec<bool> = (0..5)
            .map(|i| (0..7).fold(false, |acc, j| acc ^ (x[j] && get_bit(&h.diag, i + 6 - j))))
            .collect();
        assert_eq!(h.hash_bits(&x), expected);
    }

    #[test]
    fn fft_agrees_with_direct_sum() {
        for (out, inp, s) in [(300, 1000, 1), (1, 5000, 2), (4000, 4000, 3), (77, 64, 4)] {
            let h = ToeplitzHash::new(out, inp, s);
            let x = pack(&random_bits(inp, s + 10));
            assert_eq!(h.hash_fft(&x), h.hash_direct(&x), "{out}x{inp}");
        }
    }

    #[test]
    fn collision_rate_is_universal() {
        let (out, inp, samples) = (4usize, 24usize, 100_000u64);
        let mut rng = seed::rng(99);
        let mut collisions = 0u64;
        for i in 0..samples {
            let h = ToeplitzHash::new(out, inp, seed::derive(5, seed::stream::EXTRACTOR, i));
            let a: u64 = rng.gen_range(0..1 << inp);
            let mut b: u64 = rng.gen_range(0..1 << inp);
            while b == a {
                b = rng.gen_range(0..1 << inp);
            }
            if h.hash(&[a]) == h.hash(&[b]) {
                collisions += 1;
            }
        }
        let rate = collisions as f64 / samples as f64;
        assert!(rate <= 2f64.powi(-(out as i32)) * 1.1, "collision rate {rate}");
    }
}
