use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{channel_pushforward, mutual_information, FiniteDist, MacChannel};

/// The three mutual informations bounding the no-feedback rate region for a
/// fixed product input law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PentagonRates {
    /// `I(X1 ; X3 | X2)`
    pub i1: f64,
    /// `I(X2 ; X3 | X1)`
    pub i2: f64,
    /// `I(X1, X2 ; X3)`
    pub isum: f64,
}

impl PentagonRates {
    /// Largest `R` with `(R, R)` inside this pentagon.
    pub fn symmetric_rate(&self) -> f64 {
        self.i1.min(self.i2).min(self.isum / 2.0)
    }

    /// Nontrivial vertices of the pentagon `{r1 <= i1, r2 <= i2, r1 + r2 <= isum}`.
    pub fn vertices(&self) -> [(f64, f64); 4] {
        let r1_max = self.i1.min(self.isum);
        let r2_max = self.i2.min(self.isum);
        [
            (r1_max, 0.0),
            (r1_max, r2_max.min(self.isum - r1_max).max(0.0)),
            (r1_max.min(self.isum - r2_max).max(0.0), r2_max),
            (0.0, r2_max),
        ]
    }
}

/// Pentagon rates computed through the joint-law kernel.
pub fn pentagon(ch: &MacChannel, p1: &FiniteDist, p2: &FiniteDist) -> Result<PentagonRates> {
    let j = channel_pushforward(ch, p1, p2, 1)?;
    Ok(PentagonRates {
        i1: mutual_information(&j, &[0], &[2], &[1])?,
        i2: mutual_information(&j, &[1], &[2], &[0])?,
        isum: mutual_information(&j, &[0, 1], &[2], &[])?,
    })
}

/// Direct evaluation used inside optimization loops; agrees with
/// [`pentagon`] to rounding.
pub(crate) fn pentagon_fast(ch: &MacChannel, p1: &[f64], p2: &[f64]) -> PentagonRates {
    let out = ch.out();
    let h = |v: &[f64]| crate::info::entropy_of(v);
    let mut y = vec![0.0; out];
    let mut h_given_both = 0.0;
    let mut h_given_x1 = 0.0;
    let mut h_given_x2 = 0.0;
    let mut row_x1 = vec![0.0; out];
    for (a, &pa) in p1.iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        row_x1.iter_mut().for_each(|v| *v = 0.0);
        for (b, &pb) in p2.iter().enumerate() {
            if pb == 0.0 {
                continue;
            }
            let r = ch.row(a, b);
            h_given_both += pa * pb * h(r);
            for (k, &w) in r.iter().enumerate() {
                row_x1[k] += pb * w;
                y[k] += pa * pb * w;
            }
        }
        h_given_x1 += pa * h(&row_x1);
    }
    let mut row_x2 = vec![0.0; out];
    for (b, &pb) in p2.iter().enumerate() {
        if pb == 0.0 {
            continue;
        }
        row_x2.iter_mut().for_each(|v| *v = 0.0);
        for (a, &pa) in p1.iter().enumerate() {
            for (k, &w) in ch.row(a, b).iter().enumerate() {
                row_x2[k] += pa * w;
            }
        }
        h_given_x2 += pb * h(&row_x2);
    }
    let snap = |v: f64| if v < 1e-12 { 0.0 } else { v };
    PentagonRates {
        i1: snap(h_given_x2 - h_given_both),
        i2: snap(h_given_x1 - h_given_both),
        isum: snap(h(&y) - h_given_both),
    }
}

pub(crate) fn check_alphabets(ch: &MacChannel, limit: usize) -> Result<()> {
    for size in [ch.in1(), ch.in2(), ch.out()] {
        if size > limit {
            return Err(Error::AlphabetLimit { size, limit });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: PentagonRates, b: (f64, f64, f64)) {
        assert!((a.i1 - b.0).abs() < 1e-12, "{a:?}");
        assert!((a.i2 - b.1).abs() < 1e-12, "{a:?}");
        assert!((a.isum - b.2).abs() < 1e-12, "{a:?}");
    }

    #[test]
    fn named_channels() {
        let u = FiniteDist::uniform(2);
        close(pentagon(&MacChannel::adder(), &u, &u).unwrap(), (1.0, 1.0, 1.5));
        close(pentagon(&MacChannel::xor(), &u, &u).unwrap(), (1.0, 1.0, 1.0));
        let useless = MacChannel::useless(&FiniteDist::new(vec![0.3, 0.7]).unwrap());
        close(pentagon(&useless, &u, &u).unwrap(), (0.0, 0.0, 0.0));
    }

    #[test]
    fn fast_path_agrees() {
        let ch = MacChannel::noisy_adder(0.05);
        let p1 = FiniteDist::new(vec![0.3, 0.7]).unwrap();
        let p2 = FiniteDist::new(vec![0.55, 0.45]).unwrap();
        let a = pentagon(&ch, &p1, &p2).unwrap();
        let b = pentagon_fast(&ch, p1.probs(), p2.probs());
        close(a, (b.i1, b.i2, b.isum));
    }

    #[test]
    fn vertices_of_adder_pentagon() {
        let p = PentagonRates { i1: 1.0, i2: 1.0, isum: 1.5 };
        assert_eq!(p.vertices(), [(1.0, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 1.0)]);
        assert_eq!(p.symmetric_rate(), 0.75);
    }
}
