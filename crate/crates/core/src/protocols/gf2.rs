//! Dense bit-packed matrices over GF(2).

use rand::Rng;

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

pub fn get_bit(v: &[u64], i: usize) -> bool {
    (v[i / 64] >> (i % 64)) & 1 == 1
}

pub fn set_bit(v: &mut [u64], i: usize, b: bool) {
    let m = 1u64 << (i % 64);
    if b {
        v[i / 64] |= m;
    } else {
        v[i / 64] &= !m;
    }
}

pub fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

pub fn pack(bits: &[bool]) -> Vec<u64> {
    let mut v = vec![0; words(bits.len())];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            v[i / 64] |= 1 << (i % 64);
        }
    }
    v
}

pub fn unpack(v: &[u64], len: usize) -> Vec<bool> {
    (0..len).map(|i| get_bit(v, i)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        let tail = cols % 64;
        for r in 0..rows {
            let row = m.row_mut(r);
            for w in row.iter_mut() {
                *w = rng.gen();
            }
            if tail != 0 {
                if let Some(last) = row.last_mut() {
                    *last &= (1u64 << tail) - 1;
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        get_bit(self.row(r), c)
    }

    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        set_bit(self.row_mut(r), c, b)
    }

    /// `self * v` for a packed vector of length `cols`.
    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0; words(self.rows)];
        for r in 0..self.rows {
            let parity = self.row(r).iter().zip(v).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1;
            if parity == 1 {
                out[r / 64] |= 1 << (r % 64);
            }
        }
        out
    }

    /// `self^T * v` for a packed vector of length `rows`: the sum of the rows
    /// selected by `v`.
    pub fn mul_vec_transposed(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.stride];
        for r in 0..self.rows {
            if get_bit(v, r) {
                xor_into(&mut out, self.row(r));
            }
        }
        out
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            let row = self.row(r);
            for (w, &word) in row.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let c = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    t.set(c, r, true);
                }
            }
        }
        t
    }
}

/// Solution set `{particular + span(kernel)}` of a linear system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<u64>,
    pub kernel: Vec<Vec<u64>>,
}

/// Solves `a s = b` by Gauss-Jordan elimination. Returns `None` when the
/// system is inconsistent.
pub fn solve(a: &BitMatrix, b: &[u64]) -> Option<AffineSolution> {
    let (rows, cols) = (a.rows, a.cols);
    let mut m = BitMatrix::zeros(rows, cols + 1);
    for r in 0..rows {
        m.row_mut(r)[..a.stride].copy_from_slice(a.row(r));
        m.set(r, cols, get_bit(b, r));
    }
    let mut pivots: Vec<usize> = Vec::new();
    let mut next = 0;
    for c in 0..cols {
        if next == rows {
            break;
        }
        let Some(p) = (next..rows).find(|&r| m.get(r, c)) else {
            continue;
        };
        if p != next {
            let s = m.stride;
            let (lo, hi) = m.data.split_at_mut(p * s);
            lo[next * s..(next + 1) * s].swap_with_slice(&mut hi[..s]);
        }
        let pivot_row = m.row(next).to_vec();
        let w = c / 64;
        let bit = 1u64 << (c % 64);
        for r in 0..rows {
            if r != next && m.row(r)[w] & bit != 0 {
                xor_into(m.row_mut(r), &pivot_row);
            }
        }
        pivots.push(c);
        next += 1;
    }
    if (next..rows).any(|r| m.get(r, cols)) {
        return None;
    }
    let mut particular = vec![0; words(cols)];
    for (i, &c) in pivots.iter().enumerate() {
        set_bit(&mut particular, c, m.get(i, cols));
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let kernel = (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![0; words(cols)];
            set_bit(&mut v, f, true);
            for (i, &c) in pivots.iter().enumerate() {
                set_bit(&mut v, c, m.get(i, f));
            }
            v
        })
        .collect();
    Some(AffineSolution { particular, kernel })
}
