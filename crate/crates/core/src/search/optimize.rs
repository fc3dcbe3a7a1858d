//! Exhaustive minimum-SER and minimum-BER searches over class representatives.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{ber_objective, ser_objective, SymbolMapping, TransitionModel};
use crate::denoise::Coupling;
use crate::error::{Error, Result};
use crate::link::LinkSetup;
use crate::search::bitmap::{distinct_bit_mappings, offset, BitMapping};
use crate::search::classes::{enumerate_symbol_classes, singleton_classes, verify_orbits, EquivalenceClass};
use crate::search::TIE_RTOL;

/// Which error rate is being minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Ser,
    Ber,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Ser => "ser",
            Criterion::Ber => "ber",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ser" => Ok(Criterion::Ser),
            "ber" => Ok(Criterion::Ber),
            _ => Err(Error::InvalidConfig(format!(
                "unknown criterion '{s}'; expected ser or ber"
            ))),
        }
    }
}

/// Per-offset error mass of one symbol mapping.
///
/// With `E = P^T U P D` re-indexed into code-value space, the BER objective
/// of any labeling is `sum_k c[k] * b[k]` where `c[k]` sums the entries of
/// `E` at offset `k`. One `O(Q^3)` pass per mapping makes every labeling an
/// `O(Q)` dot product.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProfile {
    offsets: Vec<f64>,
}

impl ErrorProfile {
    pub fn new(map: &SymbolMapping, model: &TransitionModel, coupling: Coupling) -> Self {
        let q = map.order();
        let w = map.assignment();
        let (u, d) = (&model.u, &model.d);
        let mut offsets = vec![0.0; q];
        for i in 0..q {
            for n in 0..q {
                let mut p = 0.0;
                for l in 0..q {
                    p += u[[i, l]] * d[[w[l], w[n]]];
                }
                offsets[offset(coupling, i, n, q)] += p;
            }
        }
        ErrorProfile { offsets }
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn ber_objective(&self, bits: &BitMapping) -> f64 {
        let q = self.offsets.len() as f64;
        self.offsets
            .iter()
            .zip(bits.offset_totals())
            .map(|(c, &t)| c * t as f64)
            .sum::<f64>()
            / q
    }
}

/// A symbol mapping, optionally paired with a user labeling.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Candidate {
    pub symbol: SymbolMapping,
    pub bits: Option<BitMapping>,
}

impl Candidate {
    pub fn symbol(symbol: SymbolMapping) -> Self {
        Candidate { symbol, bits: None }
    }

    pub fn with_bits(symbol: SymbolMapping, bits: BitMapping) -> Self {
        Candidate {
            symbol,
            bits: Some(bits),
        }
    }

    /// Unnormalized objective of this candidate under `criterion`.
    pub fn objective(&self, model: &TransitionModel, criterion: Criterion) -> Result<f64> {
        match criterion {
            Criterion::Ser => ser_objective(&self.symbol, model),
            Criterion::Ber => {
                let bits = self
                    .bits
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("BER criterion needs a bit mapping".into()))?;
                ber_objective(&self.symbol, &bits.b_matrix(), model)
            }
        }
    }
}

/// Normalization turning an objective into an error rate.
pub fn rate_scale(order: usize, criterion: Criterion) -> f64 {
    match criterion {
        Criterion::Ser => order as f64,
        Criterion::Ber => (order * order.trailing_zeros() as usize) as f64,
    }
}

/// Outcome of one exhaustive search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub criterion: Criterion,
    /// Minimum unnormalized objective.
    pub objective: f64,
    /// Minimum error rate (objective with normalization applied).
    pub rate: f64,
    /// All candidates within the tie tolerance of the minimum, in class order.
    pub ties: Vec<Candidate>,
}

impl SearchResult {
    pub fn best(&self) -> &Candidate {
        &self.ties[0]
    }
}

fn tie_threshold(best: f64) -> f64 {
    best + TIE_RTOL * best.abs()
}

/// Minimum-SER search over class representatives.
pub fn optimize_ser(model: &TransitionModel, classes: &[EquivalenceClass]) -> Result<SearchResult> {
    if classes.is_empty() {
        return Err(Error::InvalidConfig("empty search space".into()));
    }
    let values = classes
        .par_iter()
        .map(|c| ser_objective(c.representative(), model))
        .collect::<Result<Vec<f64>>>()?;
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let limit = tie_threshold(best);
    let ties = classes
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v <= limit)
        .map(|(c, _)| Candidate::symbol(c.representative().clone()))
        .collect();
    Ok(SearchResult {
        criterion: Criterion::Ser,
        objective: best,
        rate: best / rate_scale(model.order(), Criterion::Ser),
        ties,
    })
}

/// Joint minimum-BER search over (class representative, labeling) pairs.
pub fn optimize_ber(
    model: &TransitionModel,
    classes: &[EquivalenceClass],
    bitmaps: &[BitMapping],
) -> Result<SearchResult> {
    let coupling = match bitmaps.first() {
        Some(b) => b.coupling(),
        None => return Err(Error::InvalidConfig("no bit mappings to search".into())),
    };
    if classes.is_empty() {
        return Err(Error::InvalidConfig("empty search space".into()));
    }
    let profiles: Vec<ErrorProfile> = classes
        .par_iter()
        .map(|c| ErrorProfile::new(c.representative(), model, coupling))
        .collect();
    let best = profiles
        .par_iter()
        .map(|p| bitmaps.iter().map(|b| p.ber_objective(b)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min);
    let limit = tie_threshold(best);
    let mut ties = Vec::new();
    for (class, profile) in classes.iter().zip(&profiles) {
        for bits in bitmaps {
            if profile.ber_objective(bits) <= limit {
                ties.push(Candidate::with_bits(class.representative().clone(), bits.clone()));
            }
        }
    }
    Ok(SearchResult {
        criterion: Criterion::Ber,
        objective: best,
        rate: best / rate_scale(model.order(), Criterion::Ber),
        ties,
    })
}

/// Symbol classes and distinct labelings for one link configuration.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    coupling: Coupling,
    classes: Vec<EquivalenceClass>,
    bitmaps: Vec<BitMapping>,
    reduced: bool,
    fallback: bool,
}

impl SearchSpace {
    /// Orbit-reduced classes and `b`-distinct labelings.
    pub fn reduced(setup: &LinkSetup) -> Result<Self> {
        let coupling = setup
            .coupling()
            .ok_or_else(|| Error::InvalidConfig("search needs the modulo or XOR network code".into()))?;
        let q = setup.order();
        Ok(SearchSpace {
            coupling,
            classes: enumerate_symbol_classes(q, coupling)?,
            bitmaps: distinct_bit_mappings(q, coupling)?,
            reduced: true,
            fallback: true,
        })
    }

    /// Every mapping in its own class.
    pub fn full(setup: &LinkSetup) -> Result<Self> {
        let mut space = SearchSpace::reduced(setup)?;
        space.classes = singleton_classes(setup.order());
        space.reduced = false;
        Ok(space)
    }

    /// Makes [`optimize`](Self::optimize) return the orbit check error
    /// instead of falling back to the unreduced search.
    pub fn strict(mut self) -> Self {
        self.fallback = false;
        self
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn classes(&self) -> &[EquivalenceClass] {
        &self.classes
    }

    pub fn bitmaps(&self) -> &[BitMapping] {
        &self.bitmaps
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Class containing `map`, if the space is reduced.
    pub fn class_of(&self, map: &SymbolMapping) -> Option<&EquivalenceClass> {
        let rep = crate::search::classes::canonical(map, self.coupling);
        self.classes
            .binary_search_by(|c| c.representative().cmp(&rep))
            .ok()
            .map(|i| &self.classes[i])
    }

    /// Distinct-labeling representative equivalent to `bits`.
    pub fn bitmap_of(&self, bits: &BitMapping) -> Option<&BitMapping> {
        self.bitmaps.iter().find(|b| b.equivalent(bits))
    }

    pub fn verify(&self, model: &TransitionModel) -> Result<()> {
        verify_orbits(&self.classes, model, &self.bitmaps)
    }

    /// Runs the search, first checking the orbit reduction at this model.
    /// If the check fails the space falls back to the unreduced set, unless
    /// it is [`strict`](Self::strict).
    pub fn optimize(&mut self, model: &TransitionModel, criterion: Criterion) -> Result<SearchResult> {
        if self.reduced {
            if let Err(err) = self.verify(model) {
                if !self.fallback {
                    return Err(err);
                }
                log::warn!("orbit reduction rejected ({err}); searching all mappings");
                self.classes = singleton_classes(model.order());
                self.reduced = false;
            }
        }
        match criterion {
            Criterion::Ser => optimize_ser(model, &self.classes),
            Criterion::Ber => optimize_ber(model, &self.classes, &self.bitmaps),
        }
    }

    /// Whether `candidate` is among the ties of `result`, up to symbol
    /// equivalence and `B` equality of the labeling.
    pub fn is_co_optimal(&self, result: &SearchResult, candidate: &Candidate) -> bool {
        let rep = crate::search::classes::canonical(&candidate.symbol, self.coupling);
        result.ties.iter().any(|t| {
            let same_symbol = if self.reduced {
                t.symbol == rep
            } else {
                crate::search::classes::canonical(&t.symbol, self.coupling) == rep
            };
            let same_bits = match (&t.bits, &candidate.bits) {
                (Some(a), Some(b)) => a.equivalent(b),
                (None, None) => true,
                _ => false,
            };
            same_symbol && same_bits
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{NamedLabels, Scenario};

    #[test]
    fn criterion_parse() {
        assert_eq!("SER".parse::<Criterion>().unwrap(), Criterion::Ser);
        assert!("mse".parse::<Criterion>().is_err());
    }

    #[test]
    fn profile_matches_direct_ber() {
        let setup = Scenario::Nonuniform4.setup();
        let model = setup.model(2.0).unwrap();
        for bits in distinct_bit_mappings(4, Coupling::Xor).unwrap() {
            for map in Scenario::Nonuniform4.reference_mappings() {
                let direct = ber_objective(&map, &bits.b_matrix(), &model).unwrap();
                let fast = ErrorProfile::new(&map, &model, Coupling::Xor).ber_objective(&bits);
                assert!((direct - fast).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform4_high_snr_optimum() {
        let setup = Scenario::Uniform4.setup();
        let mut space = SearchSpace::reduced(&setup).unwrap();
        let model = setup.model(10.0).unwrap();
        let ser = space.optimize(&model, Criterion::Ser).unwrap();
        let m1 = Scenario::Uniform4.reference_mapping(1).unwrap();
        assert!(space.is_co_optimal(&ser, &Candidate::symbol(m1.clone())));
        let ber = space.optimize(&model, Criterion::Ber).unwrap();
        let gray = BitMapping::new(NamedLabels::Gray.labels(4).unwrap(), Coupling::Additive).unwrap();
        assert!(space.is_co_optimal(&ber, &Candidate::with_bits(m1, gray)));
        assert!(space.is_reduced());
    }

    #[test]
    fn broken_symmetry_falls_back_or_fails() {
        let setup = Scenario::Uniform4.setup();
        let mut model = setup.model(0.0).unwrap();
        model.d[[0, 1]] += 0.05;
        model.d[[0, 0]] -= 0.05;
        let strict = SearchSpace::reduced(&setup).unwrap().strict();
        assert!(matches!(
            strict.clone().optimize(&model, Criterion::Ser),
            Err(Error::OrbitInconsistency { .. })
        ));
        let mut space = SearchSpace::reduced(&setup).unwrap();
        let result = space.optimize(&model, Criterion::Ser).unwrap();
        assert!(!space.is_reduced());
        assert_eq!(space.classes().len(), 24);
        let mut full = SearchSpace::full(&setup).unwrap();
        assert_eq!(full.optimize(&model, Criterion::Ser).unwrap(), result);
    }

    #[test]
    fn empty_inputs_rejected() {
        let model = Scenario::Uniform4.setup().model(0.0).unwrap();
        assert!(optimize_ser(&model, &[]).is_err());
        let classes = enumerate_symbol_classes(4, Coupling::Additive).unwrap();
        assert!(optimize_ber(&model, &classes, &[]).is_err());
    }
}
