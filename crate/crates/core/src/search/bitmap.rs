//! User bit labelings and their bit-error profiles.
//!
//! For a given network code the mean number of bit errors of a relay error
//! pattern `W_i -> W_j` depends only on the offset between `i` and `j`
//! (`j - i mod Q` for the modulo code, `i xor j` for the XOR code). The
//! vector `b` of per-offset means therefore determines the whole matrix `B`,
//! and two labelings are interchangeable exactly when their `b` agree.

use itertools::Itertools;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::denoise::Coupling;
use crate::error::{Error, Result};

/// Offset index between code values `i` and `j`.
pub(crate) fn offset(coupling: Coupling, i: usize, j: usize, order: usize) -> usize {
    match coupling {
        Coupling::Additive => (order + j - i) % order,
        Coupling::Xor => i ^ j,
    }
}

pub(crate) fn validate_labels(labels: &[usize]) -> Result<()> {
    let q = labels.len();
    if !q.is_power_of_two() || q < 2 {
        return Err(Error::InvalidLabels(format!(
            "expected a power-of-two number of labels, got {q}"
        )));
    }
    let mut seen = vec![false; q];
    for &l in labels {
        if l >= q {
            return Err(Error::InvalidLabels(format!(
                "label {l:#b} does not fit in {} bits",
                q.trailing_zeros()
            )));
        }
        if std::mem::replace(&mut seen[l], true) {
            return Err(Error::InvalidLabels(format!("label {l:#b} used twice")));
        }
    }
    Ok(())
}

/// `Q * b[i]`: total Hamming distance over all `k` at offset `i`. Exact.
fn offset_totals(labels: &[usize], coupling: Coupling) -> Vec<u32> {
    let q = labels.len();
    (0..q)
        .map(|i| {
            (0..q)
                .map(|k| {
                    let partner = match coupling {
                        Coupling::Additive => (k + i) % q,
                        Coupling::Xor => k ^ i,
                    };
                    (labels[k] ^ labels[partner]).count_ones()
                })
                .sum()
        })
        .collect()
}

/// Mean bit errors per offset, `b[i] = (1/Q) sum_k d_H(B(k), B(k + i))`.
pub fn compute_b(labels: &[usize], coupling: Coupling) -> Result<Vec<f64>> {
    validate_labels(labels)?;
    let q = labels.len() as f64;
    Ok(offset_totals(labels, coupling)
        .into_iter()
        .map(|t| t as f64 / q)
        .collect())
}

/// Expands `b` into the symmetric table `B[i][j] = b[offset(i, j)]`.
pub fn b_to_matrix(b: &[f64], coupling: Coupling) -> Array2<f64> {
    let q = b.len();
    Array2::from_shape_fn((q, q), |(i, j)| match coupling {
        // |i - j| mod Q
        Coupling::Additive => b[i.abs_diff(j) % q],
        Coupling::Xor => b[i ^ j],
    })
}

/// A labeling `labels[s] = B_Q(s)` with its exact per-offset error totals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitMapping {
    labels: Vec<usize>,
    coupling: Coupling,
    totals: Vec<u32>,
}

impl BitMapping {
    pub fn new(labels: Vec<usize>, coupling: Coupling) -> Result<Self> {
        validate_labels(&labels)?;
        let totals = offset_totals(&labels, coupling);
        Ok(BitMapping {
            labels,
            coupling,
            totals,
        })
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    /// `Q * b`, as integers; equal totals means equal `B`.
    pub fn offset_totals(&self) -> &[u32] {
        &self.totals
    }

    pub fn b(&self) -> Vec<f64> {
        let q = self.order() as f64;
        self.totals.iter().map(|&t| t as f64 / q).collect()
    }

    pub fn b_matrix(&self) -> Array2<f64> {
        b_to_matrix(&self.b(), self.coupling)
    }

    /// True when both labelings induce the same `B`.
    pub fn equivalent(&self, other: &BitMapping) -> bool {
        self.coupling == other.coupling && self.totals == other.totals
    }

    /// Labels rendered as fixed-width bit strings.
    pub fn label_strings(&self) -> Vec<String> {
        let width = self.order().trailing_zeros() as usize;
        self.labels.iter().map(|l| format!("{l:0width$b}")).collect()
    }
}

/// One representative per distinct `b` among all `Q!` labelings.
///
/// Labelings are enumerated in lexicographic order, so each representative
/// is the lexicographically smallest labeling of its class and the output
/// is sorted by label sequence.
pub fn distinct_bit_mappings(order: usize, coupling: Coupling) -> Result<Vec<BitMapping>> {
    if order != 4 && order != 8 {
        return Err(Error::InvalidOrder(order));
    }
    let mut seen = std::collections::HashSet::new();
    let mut reps = Vec::new();
    for labels in (0..order).permutations(order) {
        let totals = offset_totals(&labels, coupling);
        if seen.insert(totals.clone()) {
            reps.push(BitMapping {
                labels,
                coupling,
                totals,
            });
        }
    }
    Ok(reps)
}
