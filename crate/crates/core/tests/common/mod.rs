//! Reference error rates computed straight from the channel model, without
//! the library's transition matrices or decision regions.

#![allow(dead_code)]

use pncmap::{LinkSetup, SymbolMapping};

/// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// Integral of the N(mean, sigma^2) density over [lo, hi] by composite
/// Gauss-Legendre quadrature on panels of width at most sigma / 4.
fn gaussian_mass(mean: f64, lo: f64, hi: f64, sigma: f64) -> f64 {
    let lo = lo.max(mean - 40.0 * sigma);
    let hi = hi.min(mean + 40.0 * sigma);
    if lo >= hi {
        return 0.0;
    }
    let panels = ((hi - lo) / (0.25 * sigma)).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let mut total = 0.0;
    for k in 0..panels {
        let mid = lo + (k as f64 + 0.5) * h;
        for (x, w) in GL_NODES {
            let t = (mid + 0.5 * h * x - mean) / sigma;
            total += w * (-0.5 * t * t).exp();
        }
    }
    total * 0.5 * h * norm
}

/// Probability of each nearest-neighbour region of `points` (sorted) for a
/// Gaussian centred at `mean`.
fn region_probs(points: &[f64], mean: f64, sigma: f64) -> Vec<f64> {
    let mut cuts = vec![f64::NEG_INFINITY];
    cuts.extend(points.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    cuts.push(f64::INFINITY);
    cuts.windows(2)
        .map(|c| gaussian_mass(mean, c[0], c[1], sigma))
        .collect()
}

fn mean_power(points: &[f64]) -> f64 {
    points.iter().map(|p| p * p).sum::<f64>() / points.len() as f64
}

pub struct Oracle {
    pub q: usize,
    pub bits: usize,
    code: Vec<usize>,
    relay_given_pair: Vec<Vec<f64>>,
    d: Vec<Vec<f64>>,
}

impl Oracle {
    pub fn new(setup: &LinkSetup, snr_db: f64) -> Self {
        let q = setup.order();
        let ma: Vec<f64> = (0..q).map(|s| setup.ma().point(s) as f64).collect();
        let relay: Vec<f64> = (0..q).map(|s| setup.bc().point(s) as f64).collect();
        let code: Vec<usize> = (0..q * q).map(|i| setup.scheme().code(i / q, i % q)).collect();
        let mut levels: Vec<f64> = Vec::new();
        let mut level_code = Vec::new();
        let mut sums: Vec<(f64, usize)> = (0..q * q).map(|i| (ma[i / q] + ma[i % q], code[i])).collect();
        sums.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (level, c) in sums {
            if levels.last() != Some(&level) {
                levels.push(level);
                level_code.push(c);
            }
        }
        let snr = 10f64.powf(snr_db / 10.0);
        let sigma1 = (mean_power(&ma) / snr).sqrt();
        let sigma2 = (mean_power(&relay) / snr).sqrt();
        let relay_given_pair = (0..q * q)
            .map(|i| {
                let mut out = vec![0.0; q];
                let probs = region_probs(&levels, ma[i / q] + ma[i % q], sigma1);
                for (r, p) in probs.into_iter().enumerate() {
                    out[level_code[r]] += p;
                }
                out
            })
            .collect();
        let d = relay.iter().map(|&m| region_probs(&relay, m, sigma2)).collect();
        Oracle {
            q,
            bits: q.trailing_zeros() as usize,
            code,
            relay_given_pair,
            d,
        }
    }

    fn c(&self, s1: usize, s2: usize) -> usize {
        self.code[s1 * self.q + s2]
    }

    /// P(relay decides code value j | user symbols s1, s2).
    pub fn relay_probs(&self, s1: usize, s2: usize) -> Vec<f64> {
        self.relay_given_pair[s1 * self.q + s2].clone()
    }

    /// Relay transition matrix between code values, averaged over the pairs
    /// that produce each value.
    pub fn u(&self) -> Vec<Vec<f64>> {
        let mut u = vec![vec![0.0; self.q]; self.q];
        let mut counts = vec![0usize; self.q];
        for s1 in 0..self.q {
            for s2 in 0..self.q {
                let i = self.c(s1, s2);
                counts[i] += 1;
                for (j, p) in self.relay_probs(s1, s2).into_iter().enumerate() {
                    u[i][j] += p;
                }
            }
        }
        for (row, n) in u.iter_mut().zip(counts) {
            row.iter_mut().for_each(|x| *x /= n as f64);
        }
        u
    }

    pub fn d(&self) -> Vec<Vec<f64>> {
        self.d.clone()
    }

    /// Decoded partner symbol for user 1 (own = s1) or user 2 (own = s2).
    fn invert(&self, user: usize, own: usize, value: usize) -> usize {
        (0..self.q)
            .find(|&s| {
                let v = if user == 0 { self.c(own, s) } else { self.c(s, own) };
                v == value
            })
            .unwrap()
    }

    /// Symbol error rate, summing over user symbols and relay decisions.
    pub fn ser(&self, map: &SymbolMapping) -> f64 {
        let d = &self.d;
        let w = map.assignment();
        let mut total = 0.0;
        for s1 in 0..self.q {
            for s2 in 0..self.q {
                let i = self.c(s1, s2);
                for (j, p) in self.relay_probs(s1, s2).into_iter().enumerate() {
                    total += p * (1.0 - d[w[j]][w[i]]);
                }
            }
        }
        total / (self.q * self.q) as f64
    }

    fn ber_with(&self, map: &SymbolMapping, labels: &[usize], relay: impl Fn(usize, usize) -> Vec<f64>) -> f64 {
        let d = &self.d;
        let w = map.assignment();
        let mut total = 0.0;
        for s1 in 0..self.q {
            for s2 in 0..self.q {
                let pj = relay(s1, s2);
                for n in 0..self.q {
                    let p: f64 = (0..self.q).map(|j| pj[j] * d[w[j]][w[n]]).sum();
                    let e1 = (labels[s2] ^ labels[self.invert(0, s1, n)]).count_ones();
                    let e2 = (labels[s1] ^ labels[self.invert(1, s2, n)]).count_ones();
                    total += p * (e1 + e2) as f64 / 2.0;
                }
            }
        }
        total / (self.q * self.q * self.bits) as f64
    }

    /// BER when the relay error law depends only on the code value sent.
    pub fn ber_model(&self, map: &SymbolMapping, labels: &[usize]) -> f64 {
        let u = self.u();
        self.ber_with(map, labels, |s1, s2| u[self.c(s1, s2)].clone())
    }

    /// BER with the relay error law of the actual superposed level.
    pub fn ber_exact(&self, map: &SymbolMapping, labels: &[usize]) -> f64 {
        self.ber_with(map, labels, |s1, s2| self.relay_probs(s1, s2))
    }
}
