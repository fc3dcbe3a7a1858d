//! Closed-form transition matrices for both phases and the SER/BER
//! objectives of a relay symbol mapping.
//!
//! Index conventions: `U[i][j]` is the probability that the relay decides a
//! level of group `j` when a level of group `i` was sent (network-code
//! space); `D[a][b]` is the probability that a user decides alphabet point
//! `b` when the relay sent point `a` (alphabet space). A [`SymbolMapping`]
//! `w` sends code value `u` to alphabet index `w(u)`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::constellation::{DecisionRegions, ModulationKind, PamConstellation, SuperposedConstellation};
use crate::denoise::{DenoiseScheme, WGroupTable};
use crate::error::{Error, Result};

/// Upper Gaussian tail `P(Z > z)`.
fn upper_tail(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Probability that `N(mean, sigma^2)` falls in `[lo, hi]`.
///
/// Evaluated with `erfc` on whichever tail keeps full relative precision, so
/// probabilities far below machine epsilon relative to one stay accurate.
pub fn gaussian_interval_prob(mean: f64, lo: f64, hi: f64, sigma: f64) -> Result<f64> {
    if lo > hi {
        return Err(Error::InvalidInterval { lo, hi });
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidSigma(sigma));
    }
    let za = (lo - mean) / sigma;
    let zb = (hi - mean) / sigma;
    let p = if za >= 0.0 {
        upper_tail(za) - upper_tail(zb)
    } else if zb <= 0.0 {
        upper_tail(-zb) - upper_tail(-za)
    } else {
        1.0 - upper_tail(-za) - upper_tail(zb)
    };
    Ok(p.max(0.0))
}

/// A relay symbol mapping: code value `u` is broadcast as alphabet point `w(u)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SymbolMapping {
    assignment: Vec<usize>,
}

impl TryFrom<Vec<usize>> for SymbolMapping {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        SymbolMapping::new(v)
    }
}

impl From<SymbolMapping> for Vec<usize> {
    fn from(m: SymbolMapping) -> Self {
        m.assignment
    }
}

impl SymbolMapping {
    /// `assignment` must be a permutation of `0..Q`.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let q = assignment.len();
        let mut seen = vec![false; q];
        for &a in &assignment {
            if a >= q || std::mem::replace(&mut seen[a], true) {
                return Err(Error::InvalidMapping(format!(
                    "{assignment:?} is not a permutation of 0..{q}"
                )));
            }
        }
        Ok(SymbolMapping { assignment })
    }

    pub(crate) fn from_vec_unchecked(assignment: Vec<usize>) -> Self {
        SymbolMapping { assignment }
    }

    pub fn identity(order: usize) -> Self {
        SymbolMapping {
            assignment: (0..order).collect(),
        }
    }

    /// Mapping given as the broadcast points `[W_0, ..., W_{Q-1}]`.
    pub fn from_points(points: &[i64], relay: &PamConstellation) -> Result<Self> {
        if points.len() != relay.order() {
            return Err(Error::OrderMismatch {
                expected: relay.order(),
                got: points.len(),
            });
        }
        let assignment = points
            .iter()
            .map(|&p| {
                relay
                    .index_of(p)
                    .ok_or_else(|| Error::InvalidMapping(format!("{p} is not a relay constellation point")))
            })
            .collect::<Result<Vec<_>>>()?;
        SymbolMapping::new(assignment)
    }

    pub fn order(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Alphabet index of code value `u`.
    pub fn apply(&self, u: usize) -> usize {
        self.assignment[u]
    }

    /// `inverse()[a]` is the code value broadcast on alphabet point `a`.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.order()];
        for (u, &a) in self.assignment.iter().enumerate() {
            inv[a] = u;
        }
        inv
    }

    /// `[W_0, ..., W_{Q-1}]`.
    pub fn points(&self, relay: &PamConstellation) -> Vec<i64> {
        self.assignment.iter().map(|&a| relay.point(a)).collect()
    }

    /// The permutation matrix with `[W_0 .. W_{Q-1}] P = [A_0 .. A_{Q-1}]`.
    pub fn permutation_matrix(&self) -> Array2<f64> {
        let q = self.order();
        let mut p = Array2::zeros((q, q));
        for (u, &a) in self.assignment.iter().enumerate() {
            p[[u, a]] = 1.0;
        }
        p
    }
}

/// MA-phase and BC-phase transition matrices at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    pub u: Array2<f64>,
    pub d: Array2<f64>,
    pub snr_db: f64,
    /// Relay noise variance in lattice units.
    pub sigma1_sq: f64,
    /// User noise variance in lattice units.
    pub sigma2_sq: f64,
}

impl TransitionModel {
    pub fn order(&self) -> usize {
        self.u.nrows()
    }
}

/// MA-phase transition matrix between W-groups.
///
/// Entry `(i, j)` averages, over the levels of group `i` weighted by their
/// priors, the probability of the relay deciding any level of group `j`.
pub fn build_u(sup: &SuperposedConstellation, groups: &WGroupTable, sigma1: f64) -> Result<Array2<f64>> {
    let q = groups.order();
    let regions = sup.regions();
    let mut u = Array2::zeros((q, q));
    for i in 0..q {
        for member in groups.group(i) {
            let weight = *member.weight.numer() as f64 / *member.weight.denom() as f64;
            let mean = member.level as f64;
            for target in 0..regions.len() {
                let (lo, hi) = regions.interval(target);
                let p = gaussian_interval_prob(mean, lo, hi, sigma1)?;
                u[[i, groups.value_of_level(target)]] += weight * p;
            }
        }
    }
    Ok(u)
}

/// BC-phase transition matrix of a uniform relay alphabet.
pub fn build_d(bc: &PamConstellation, sigma2: f64) -> Result<Array2<f64>> {
    if bc.kind() != ModulationKind::Uniform {
        return Err(Error::InvalidRelayConstellation);
    }
    let q = bc.order();
    let regions: DecisionRegions = bc.regions();
    let mut d = Array2::zeros((q, q));
    for i in 0..q {
        for j in 0..q {
            let (lo, hi) = regions.interval(j);
            d[[i, j]] = gaussian_interval_prob(bc.point(i) as f64, lo, hi, sigma2)?;
        }
    }
    Ok(d)
}

fn check_order(map: &SymbolMapping, model: &TransitionModel) -> Result<()> {
    if map.order() != model.order() {
        return Err(Error::OrderMismatch {
            expected: model.order(),
            got: map.order(),
        });
    }
    Ok(())
}

/// Sum of the off-diagonal entries of `P^T U P D`; the SER is this over `Q`.
pub fn ser_objective(map: &SymbolMapping, model: &TransitionModel) -> Result<f64> {
    check_order(map, model)?;
    let q = map.order();
    let (u, d) = (&model.u, &model.d);
    let d_rows: Vec<f64> = d.rows().into_iter().map(|r| r.sum()).collect();
    let w = map.assignment();
    let mut total = 0.0;
    for i in 0..q {
        for l in 0..q {
            total += u[[i, l]] * (d_rows[w[l]] - d[[w[l], w[i]]]);
        }
    }
    Ok(total)
}

/// Sum of the entries of `(P^T U P D) ∘ (P^T B P)`; the BER is this over `Q log2 Q`.
///
/// `b_matrix` is indexed in code-value space: entry `(i, j)` is the mean
/// number of bit errors for the relay pattern `W_i -> W_j`.
pub fn ber_objective(map: &SymbolMapping, b_matrix: &Array2<f64>, model: &TransitionModel) -> Result<f64> {
    check_order(map, model)?;
    let q = map.order();
    if b_matrix.dim() != (q, q) {
        return Err(Error::OrderMismatch {
            expected: q,
            got: b_matrix.nrows(),
        });
    }
    let (u, d) = (&model.u, &model.d);
    let w = map.assignment();
    let mut total = 0.0;
    for i in 0..q {
        for n in 0..q {
            let b = b_matrix[[i, n]];
            if b == 0.0 {
                continue;
            }
            let mut p = 0.0;
            for l in 0..q {
                p += u[[i, l]] * d[[w[l], w[n]]];
            }
            total += p * b;
        }
    }
    Ok(total)
}

/// Symbol error rate by direct summation over `(S1, S2, S2~)`.
///
/// Independent of [`ser_objective`]: walks the user symbols through the
/// network code and composes the pairwise probabilities explicitly.
pub fn ser_by_enumeration(map: &SymbolMapping, model: &TransitionModel, scheme: &DenoiseScheme) -> f64 {
    let q = map.order();
    let qf = q as f64;
    let mut total = 0.0;
    for s1 in 0..q {
        for s2 in 0..q {
            let x = map.apply(scheme.code(s1, s2));
            for s2_hat in (0..q).filter(|&s| s != s2) {
                let x_hat = map.apply(scheme.code(s1, s2_hat));
                total += pairwise_error(map, model, x, x_hat) / (qf * qf);
            }
        }
    }
    total
}

/// Bit error rate by direct summation over `(S1, S2, S2~)` with Hamming weights.
pub fn ber_by_enumeration(
    map: &SymbolMapping,
    labels: &[usize],
    model: &TransitionModel,
    scheme: &DenoiseScheme,
) -> f64 {
    let q = map.order();
    let qf = q as f64;
    let bits = q.trailing_zeros() as f64;
    let mut total = 0.0;
    for s1 in 0..q {
        for s2 in 0..q {
            let x = map.apply(scheme.code(s1, s2));
            for s2_hat in (0..q).filter(|&s| s != s2) {
                let x_hat = map.apply(scheme.code(s1, s2_hat));
                let dh = (labels[s2] ^ labels[s2_hat]).count_ones() as f64;
                total += pairwise_error(map, model, x, x_hat) * dh / bits / (qf * qf);
            }
        }
    }
    total
}

/// `P(X -> X~)` for alphabet indices, summed over the relay decision.
fn pairwise_error(map: &SymbolMapping, model: &TransitionModel, x: usize, x_hat: usize) -> f64 {
    let inv = map.inverse();
    (0..map.order())
        .map(|relay| model.u[[inv[x], inv[relay]]] * model.d[[relay, x_hat]])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{make_pam, noise_variance, superpose};
    use crate::denoise::{build_w_groups, Coupling};

    fn uniform4_model(snr_db: f64) -> TransitionModel {
        let c = make_pam(4, ModulationKind::Uniform).unwrap();
        let sup = superpose(&c);
        let groups = build_w_groups(&sup, &DenoiseScheme::new(4, Coupling::Additive)).unwrap();
        let s1 = noise_variance(&c, snr_db);
        TransitionModel {
            u: build_u(&sup, &groups, s1.sqrt()).unwrap(),
            d: build_d(&c, s1.sqrt()).unwrap(),
            snr_db,
            sigma1_sq: s1,
            sigma2_sq: s1,
        }
    }

    #[test]
    fn interval_prob_basics() {
        let p = gaussian_interval_prob(0.0, f64::NEG_INFINITY, f64::INFINITY, 0.7).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        let ab = gaussian_interval_prob(0.3, -1.0, 0.5, 1.2).unwrap();
        let bc = gaussian_interval_prob(0.3, 0.5, 2.0, 1.2).unwrap();
        let ac = gaussian_interval_prob(0.3, -1.0, 2.0, 1.2).unwrap();
        assert!((ab + bc - ac).abs() < 1e-15);
        assert_eq!(
            gaussian_interval_prob(0.0, 1.0, 0.0, 1.0),
            Err(Error::InvalidInterval { lo: 1.0, hi: 0.0 })
        );
        assert!(gaussian_interval_prob(0.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn interval_prob_tail_precision() {
        // P(Z > 10) = 7.619853024160527e-24
        let p = gaussian_interval_prob(0.0, 10.0, f64::INFINITY, 1.0).unwrap();
        assert!((p / 7.619853024160527e-24 - 1.0).abs() < 1e-12);
        let p = gaussian_interval_prob(0.0, f64::NEG_INFINITY, -10.0, 1.0).unwrap();
        assert!((p / 7.619853024160527e-24 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn d_entry_at_10db() {
        // D(1,2) = f(-3; -2, 0) with sigma2^2 = 5 * 0.1
        let p = gaussian_interval_prob(-3.0, -2.0, 0.0, 0.5f64.sqrt()).unwrap();
        assert!((p - 0.079).abs() < 5e-4);
    }

    #[test]
    fn u_d_rows_stochastic_and_symmetric() {
        for snr in [-10.0, 0.0, 10.0, 25.0] {
            let m = uniform4_model(snr);
            for row in m.u.rows().into_iter().chain(m.d.rows()) {
                assert!((row.sum() - 1.0).abs() < 1e-9);
                assert!(row.iter().all(|&p| (0.0..=1.0).contains(&p)));
            }
            for i in 0..4 {
                for j in 0..4 {
                    assert!((m.d[[i, j]] - m.d[[3 - i, 3 - j]]).abs() < 1e-15);
                    let nu = |x: usize| (4 + 2 - x) % 4;
                    assert!((m.u[[i, j]] - m.u[[nu(i), nu(j)]]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn u_tends_to_identity() {
        let m = uniform4_model(60.0);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((m.u[[i, j]] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nonuniform_relay_rejected() {
        let c = make_pam(4, ModulationKind::Nonuniform).unwrap();
        assert_eq!(build_d(&c, 1.0), Err(Error::InvalidRelayConstellation));
    }

    #[test]
    fn mapping_validation() {
        assert!(SymbolMapping::new(vec![0, 1, 1, 3]).is_err());
        assert!(SymbolMapping::new(vec![0, 1, 4, 3]).is_err());
        let relay = make_pam(4, ModulationKind::Uniform).unwrap();
        let m = SymbolMapping::from_points(&[-3, 1, -1, 3], &relay).unwrap();
        assert_eq!(m.assignment(), &[0, 2, 1, 3]);
        assert_eq!(m.points(&relay), vec![-3, 1, -1, 3]);
        assert!(SymbolMapping::from_points(&[-3, 1, 0, 3], &relay).is_err());
        let p = m.permutation_matrix();
        let w = ndarray::arr1(&[-3.0, 1.0, -1.0, 3.0]);
        assert_eq!(w.dot(&p).to_vec(), vec![-3.0, -1.0, 1.0, 3.0]);
    }

    #[test]
    fn error_free_channel_has_zero_objective() {
        let eye = Array2::eye(4);
        let model = TransitionModel {
            u: eye.clone(),
            d: eye,
            snr_db: f64::INFINITY,
            sigma1_sq: 0.0,
            sigma2_sq: 0.0,
        };
        let map = SymbolMapping::identity(4);
        assert_eq!(ser_objective(&map, &model).unwrap(), 0.0);
        let b = Array2::from_shape_fn((4, 4), |(i, j)| if i == j { 0.0 } else { 1.0 });
        assert_eq!(ber_objective(&map, &b, &model).unwrap(), 0.0);
    }

    #[test]
    fn zero_b_gives_zero_ber() {
        let model = uniform4_model(0.0);
        let b = Array2::zeros((4, 4));
        let map = SymbolMapping::new(vec![2, 0, 3, 1]).unwrap();
        assert_eq!(ber_objective(&map, &b, &model).unwrap(), 0.0);
    }

    #[test]
    fn matrix_product_route_agrees() {
        let model = uniform4_model(3.0);
        let b = Array2::from_shape_fn((4, 4), |(i, j)| [0.0, 1.0, 2.0, 1.0][(4 + j - i) % 4]);
        for map in [vec![0, 1, 2, 3], vec![0, 2, 1, 3], vec![3, 1, 0, 2]] {
            let map = SymbolMapping::new(map).unwrap();
            let p = map.permutation_matrix();
            let prod = p.t().dot(&model.u).dot(&p).dot(&model.d);
            let off: f64 = prod.sum() - prod.diag().sum();
            assert!((ser_objective(&map, &model).unwrap() - off).abs() < 1e-12);
            let pbp = p.t().dot(&b).dot(&p);
            let ber: f64 = (&prod * &pbp).sum();
            assert!((ber_objective(&map, &b, &model).unwrap() - ber).abs() < 1e-12);
        }
    }

    #[test]
    fn order_mismatch_reported() {
        let model = uniform4_model(0.0);
        let map = SymbolMapping::identity(8);
        assert!(matches!(ser_objective(&map, &model), Err(Error::OrderMismatch { .. })));
    }
}
