use serde::Serialize;

use super::pentagon::{check_alphabets, pentagon_fast, PentagonRates};
use crate::error::{invalid, Result};
use crate::info::MacChannel;

/// Tuning for [`compute_rstar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RstarOptions {
    /// Lattice points per simplex dimension (resolution `grid - 1`).
    pub grid: usize,
    /// Maximum number of accepted refinement moves plus step halvings.
    pub refine_iters: usize,
    /// Largest accepted input or output alphabet.
    pub alphabet_limit: usize,
    /// Cap on the number of product input laws visited on the lattice; the
    /// resolution is lowered until the lattice fits.
    pub max_pairs: usize,
}

impl Default for RstarOptions {
    fn default() -> Self {
        RstarOptions {
            grid: 33,
            refine_iters: 200,
            alphabet_limit: 8,
            max_pairs: 400_000,
        }
    }
}

/// Outcome of the symmetric-rate optimization.
#[derive(Debug, Clone, Serialize)]
pub struct RstarResult {
    /// Best symmetric rate found (bits per channel use).
    pub rate: f64,
    /// Gain still available from single moves at the lattice spacing after
    /// refinement; zero when the result is a local optimum at that scale.
    pub uncertainty: f64,
    /// Symmetric rate of the hull before refinement.
    pub grid_rate: f64,
    /// Lattice resolution actually used.
    pub resolution: usize,
    /// Input laws supporting the optimum (one pair, or two when time
    /// sharing between pentagons is needed).
    pub support: Vec<(Vec<f64>, Vec<f64>)>,
    /// Largest single-pentagon symmetric rate met anywhere.
    pub best_single_pentagon: f64,
    /// Largest `isum / 2` met anywhere.
    pub max_half_sum: f64,
}

/// All points of the probability simplex on `k` symbols with coordinates in
/// multiples of `1 / res`.
fn simplex_lattice(k: usize, res: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(k - 1, left - v, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(k, res, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|c| c.into_iter().map(|v| v as f64 / res as f64).collect())
        .collect()
}

fn lattice_size(k: usize, res: usize) -> u128 {
    // C(res + k - 1, k - 1)
    let mut num: u128 = 1;
    for i in 1..k as u128 {
        num = num * (res as u128 + i) / i;
    }
    num
}

#[derive(Clone)]
struct Candidate {
    point: (f64, f64),
    source: usize,
}

/// Maximum symmetric value of the down-closed convex hull of `points`.
///
/// Returns the value and the indices (into `points`) of the one or two
/// points whose combination attains it.
pub(crate) fn hull_symmetric(points: &[(f64, f64)]) -> (f64, Vec<usize>) {
    let mut best = (0.0, Vec::new());
    let hull = upper_hull(points);
    for &i in &hull {
        let (x, y) = points[i];
        let v = x.min(y);
        if v > best.0 {
            best = (v, vec![i]);
        }
    }
    for &i in &hull {
        let (px, py) = points[i];
        if px <= py {
            continue;
        }
        for &j in &hull {
            let (qx, qy) = points[j];
            if qy <= qx {
                continue;
            }
            let a = px - py;
            let b = qy - qx;
            let theta = b / (a + b);
            let v = theta * px + (1.0 - theta) * qx;
            if v > best.0 {
                best = (v, vec![i, j]);
            }
        }
    }
    best
}

/// Indices of the points on the upper-right convex boundary.
fn upper_hull(points: &[(f64, f64)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a]
            .0
            .partial_cmp(&points[b].0)
            .unwrap()
            .then(points[a].1.partial_cmp(&points[b].1).unwrap())
    });
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while hull.len() >= 2 {
            let o = points[hull[hull.len() - 2]];
            let a = points[hull[hull.len() - 1]];
            if cross(o, a, points[i]) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

struct Search<'a> {
    ch: &'a MacChannel,
    laws: Vec<(Vec<f64>, Vec<f64>)>,
    pts: Vec<Candidate>,
    best_single: f64,
    max_half_sum: f64,
}

impl<'a> Search<'a> {
    fn add(&mut self, p1: Vec<f64>, p2: Vec<f64>) -> PentagonRates {
        let pent = pentagon_fast(self.ch, &p1, &p2);
        self.best_single = self.best_single.max(pent.symmetric_rate());
        self.max_half_sum = self.max_half_sum.max(pent.isum / 2.0);
        let source = self.laws.len();
        self.laws.push((p1, p2));
        for point in pent.vertices() {
            self.pts.push(Candidate { point, source });
        }
        pent
    }

    fn value(&self) -> (f64, Vec<usize>) {
        let pts: Vec<(f64, f64)> = self.pts.iter().map(|c| c.point).collect();
        let (v, idx) = hull_symmetric(&pts);
        let mut sources: Vec<usize> = idx.into_iter().map(|i| self.pts[i].source).collect();
        sources.dedup();
        (v, sources)
    }

    /// Drops candidate points strictly inside the hull to keep later hull
    /// evaluations small.
    fn prune(&mut self) {
        let pts: Vec<(f64, f64)> = self.pts.iter().map(|c| c.point).collect();
        let keep = upper_hull(&pts);
        self.pts = keep.into_iter().map(|i| self.pts[i].clone()).collect();
    }

    /// Value of the hull with one extra input law, without keeping it.
    fn value_with(&self, p1: &[f64], p2: &[f64]) -> f64 {
        let pent = pentagon_fast(self.ch, p1, p2);
        let mut pts: Vec<(f64, f64)> = self.pts.iter().map(|c| c.point).collect();
        pts.extend(pent.vertices());
        hull_symmetric(&pts).0
    }
}

fn moves(p: &[f64], step: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..p.len() {
        for j in 0..p.len() {
            if i == j || p[i] <= 0.0 {
                continue;
            }
            let d = step.min(p[i]);
            let mut q = p.to_vec();
            q[i] -= d;
            q[j] += d;
            out.push(q);
        }
    }
    out
}

/// Maximum `R` with `(R, R)` in the no-feedback capacity region, i.e. the
/// symmetric point of the convex hull of the union of pentagons over product
/// input laws.
pub fn compute_rstar(ch: &MacChannel, opts: &RstarOptions) -> Result<RstarResult> {
    check_alphabets(ch, opts.alphabet_limit)?;
    if opts.grid < 2 {
        return invalid("grid needs at least two points per dimension");
    }
    let mut res = opts.grid - 1;
    while res > 1
        && lattice_size(ch.in1(), res) * lattice_size(ch.in2(), res) > opts.max_pairs as u128
    {
        res -= 1;
    }
    let l1 = simplex_lattice(ch.in1(), res);
    let l2 = simplex_lattice(ch.in2(), res);

    let mut search = Search {
        ch,
        laws: Vec::new(),
        pts: Vec::new(),
        best_single: 0.0,
        max_half_sum: 0.0,
    };
    for p1 in &l1 {
        for p2 in &l2 {
            search.add(p1.clone(), p2.clone());
        }
        search.prune();
    }
    let (grid_rate, mut support) = search.value();

    // Coordinate moves on the supporting laws, halving the step on stalls.
    let spacing = 1.0 / res as f64;
    let mut step = spacing;
    let mut current = grid_rate;
    let mut budget = opts.refine_iters;
    while budget > 0 && current > 0.0 {
        budget -= 1;
        let mut improved = None;
        'outer: for &s in &support {
            let (p1, p2) = search.laws[s].clone();
            for q1 in moves(&p1, step) {
                let v = search.value_with(&q1, &p2);
                if v > current + 1e-15 {
                    improved = Some((q1, p2.clone()));
                    break 'outer;
                }
            }
            for q2 in moves(&p2, step) {
                let v = search.value_with(&p1, &q2);
                if v > current + 1e-15 {
                    improved = Some((p1.clone(), q2));
                    break 'outer;
                }
            }
        }
        match improved {
            Some((q1, q2)) => {
                search.add(q1, q2);
                search.prune();
                let (v, s) = search.value();
                current = v;
                support = s;
            }
            None => {
                step /= 2.0;
                if step < 1e-9 {
                    break;
                }
            }
        }
    }

    // Remaining single-move gain at the lattice spacing.
    let mut uncertainty: f64 = 0.0;
    for &s in &support {
        let (p1, p2) = &search.laws[s];
        for q1 in moves(p1, spacing) {
            uncertainty = uncertainty.max(search.value_with(&q1, p2) - current);
        }
        for q2 in moves(p2, spacing) {
            uncertainty = uncertainty.max(search.value_with(p1, &q2) - current);
        }
    }

    Ok(RstarResult {
        rate: current,
        uncertainty,
        grid_rate,
        resolution: res,
        support: support.iter().map(|&s| search.laws[s].clone()).collect(),
        best_single_pentagon: search.best_single,
        max_half_sum: search.max_half_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::FiniteDist;

    #[test]
    fn lattice_counts() {
        assert_eq!(simplex_lattice(2, 32).len(), 33);
        assert_eq!(simplex_lattice(3, 4).len() as u128, lattice_size(3, 4));
    }

    #[test]
    fn hull_time_sharing_beats_corners() {
        // Two pentagons that are each lopsided.
        let pts = [(1.0, 0.0), (1.0, 0.2), (0.0, 0.0), (0.2, 1.0), (0.0, 1.0)];
        let (v, idx) = hull_symmetric(&pts);
        assert!((v - 0.6).abs() < 1e-12);
        assert_eq!(idx.len(), 2);
    }

    #[test]
    fn named_channels() {
        let o = RstarOptions::default();
        let a = compute_rstar(&MacChannel::adder(), &o).unwrap();
        assert!((a.rate - 0.75).abs() < 1e-3, "{a:?}");
        let x = compute_rstar(&MacChannel::xor(), &o).unwrap();
        assert!((x.rate - 0.5).abs() < 1e-3, "{x:?}");
        let useless = MacChannel::useless(&FiniteDist::new(vec![0.2, 0.8]).unwrap());
        assert_eq!(compute_rstar(&useless, &o).unwrap().rate, 0.0);
    }

    #[test]
    fn alphabet_limit() {
        let big = MacChannel::deterministic(9, 2, 9, |a, _| a);
        assert!(compute_rstar(&big, &RstarOptions::default()).is_err());
    }
}
