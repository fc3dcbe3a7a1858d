//! Uniform and nonuniform Q-PAM alphabets, the superposed constellation seen
//! by the relay, and the nearest-neighbour decision regions shared by the
//! analytic model and the simulator.
//!
//! Points are kept on an integer lattice. Power normalization is applied to
//! the noise instead (see [`noise_variance`]), so decision boundaries are
//! exact half-integers.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spacing rule of the user alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulationKind {
    /// Equally spaced points (`d = 2`).
    Uniform,
    /// Modified spacing (`d = 3`) that separates the superposed copies.
    Nonuniform,
}

impl ModulationKind {
    /// Expansion base `d` of `X = sum_k d^k * M2(b_k)`.
    pub fn spacing(self) -> i64 {
        match self {
            ModulationKind::Uniform => 2,
            ModulationKind::Nonuniform => 3,
        }
    }
}

/// An ordered PAM alphabet. `points[s]` is the natural-order image of symbol `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PamConstellation {
    order: usize,
    kind: ModulationKind,
    points: Vec<i64>,
    avg_power: Rational64,
}

impl PamConstellation {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of bits per symbol.
    pub fn bits_per_symbol(&self) -> usize {
        self.order.trailing_zeros() as usize
    }

    pub fn kind(&self) -> ModulationKind {
        self.kind
    }

    pub fn spacing(&self) -> i64 {
        self.kind.spacing()
    }

    pub fn points(&self) -> &[i64] {
        &self.points
    }

    pub fn point(&self, symbol: usize) -> i64 {
        self.points[symbol]
    }

    /// Mean squared point, exact.
    pub fn avg_power(&self) -> Rational64 {
        self.avg_power
    }

    pub fn avg_power_f64(&self) -> f64 {
        *self.avg_power.numer() as f64 / *self.avg_power.denom() as f64
    }

    /// Index of `value` in the alphabet, if present.
    pub fn index_of(&self, value: i64) -> Option<usize> {
        self.points.iter().position(|&p| p == value)
    }

    pub fn regions(&self) -> DecisionRegions {
        DecisionRegions::new(self.points.clone())
    }
}

/// Builds the natural-order Q-PAM alphabet for `order` ∈ {4, 8}.
///
/// Symbol `s` with binary digits `b_0 b_1 ... b_{q-1}` (LSB first) maps to
/// `sum_k d^k * (2 b_k - 1)`, which is increasing in `s` for `d >= 2`.
pub fn make_pam(order: usize, kind: ModulationKind) -> Result<PamConstellation> {
    if order != 4 && order != 8 {
        return Err(Error::InvalidOrder(order));
    }
    let bits = order.trailing_zeros();
    let d = kind.spacing();
    let points: Vec<i64> = (0..order)
        .map(|s| {
            (0..bits)
                .map(|k| {
                    let sign = if (s >> k) & 1 == 1 { 1 } else { -1 };
                    sign * d.pow(k)
                })
                .sum()
        })
        .collect();
    let energy: i64 = points.iter().map(|p| p * p).sum();
    Ok(PamConstellation {
        order,
        kind,
        points,
        avg_power: Rational64::new(energy, order as i64),
    })
}

/// Per-phase noise variance in lattice units at the given SNR.
///
/// SNR is `1/sigma^2` for unit-power signalling; keeping integer points means
/// the noise is scaled by the alphabet's average power instead.
pub fn noise_variance(c: &PamConstellation, snr_db: f64) -> f64 {
    c.avg_power_f64() * 10f64.powf(-snr_db / 10.0)
}

/// The multiset of noiseless sums `M(s1) + M(s2)` seen at the relay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperposedConstellation {
    order: usize,
    levels: Vec<i64>,
    pairs: Vec<Vec<(usize, usize)>>,
    level_of_pair: Vec<usize>,
}

impl SuperposedConstellation {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Distinct sums, ascending.
    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Ordered pairs `(s1, s2)` producing level `index`.
    pub fn pairs(&self, index: usize) -> &[(usize, usize)] {
        &self.pairs[index]
    }

    pub fn multiplicity(&self, index: usize) -> usize {
        self.pairs[index].len()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.pairs.iter().map(Vec::len).collect()
    }

    /// Level index of the pair `(s1, s2)`.
    pub fn level_index(&self, s1: usize, s2: usize) -> usize {
        self.level_of_pair[s1 * self.order + s2]
    }

    pub fn regions(&self) -> DecisionRegions {
        DecisionRegions::new(self.levels.clone())
    }
}

/// Enumerates all `Q^2` ordered pairs and groups them by their sum.
pub fn superpose(c: &PamConstellation) -> SuperposedConstellation {
    let q = c.order();
    let mut levels: Vec<i64> = (0..q)
        .flat_map(|a| (0..q).map(move |b| (a, b)))
        .map(|(a, b)| c.point(a) + c.point(b))
        .collect();
    levels.sort_unstable();
    levels.dedup();

    let mut pairs = vec![Vec::new(); levels.len()];
    let mut level_of_pair = vec![0; q * q];
    for s1 in 0..q {
        for s2 in 0..q {
            let sum = c.point(s1) + c.point(s2);
            let idx = levels.binary_search(&sum).expect("level present");
            pairs[idx].push((s1, s2));
            level_of_pair[s1 * q + s2] = idx;
        }
    }
    SuperposedConstellation {
        order: q,
        levels,
        pairs,
        level_of_pair,
    }
}

/// Nearest-neighbour partition of the real line around sorted points.
///
/// Boundaries sit at midpoints of adjacent points and the outermost regions
/// are unbounded. A value exactly on a boundary belongs to the lower region.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRegions {
    points: Vec<i64>,
    boundaries: Vec<f64>,
}

impl DecisionRegions {
    /// `points` must be strictly increasing.
    pub fn new(points: Vec<i64>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        let boundaries = points.windows(2).map(|w| (w[0] + w[1]) as f64 / 2.0).collect();
        DecisionRegions { points, boundaries }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[i64] {
        &self.points
    }

    /// `(lo, hi)` of region `index`, with infinities at the ends.
    pub fn interval(&self, index: usize) -> (f64, f64) {
        let lo = if index == 0 {
            f64::NEG_INFINITY
        } else {
            self.boundaries[index - 1]
        };
        let hi = if index + 1 == self.points.len() {
            f64::INFINITY
        } else {
            self.boundaries[index]
        };
        (lo, hi)
    }

    /// Index of the region containing `y`.
    pub fn decide(&self, y: f64) -> usize {
        self.boundaries.partition_point(|&b| b < y)
    }
}
