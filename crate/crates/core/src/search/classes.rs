//! Equivalence classes of relay symbol mappings.
//!
//! Two transformations leave both objectives unchanged:
//!
//! * sign reversal, `w'(u) = Q - 1 - w(u)`: negating every broadcast point.
//!   The relay alphabet is symmetric, so `D` is invariant under the
//!   exchange permutation.
//! * order reversal (modulo code only), `w'(u) = w((Q - 2 - u) mod Q)`:
//!   negating the superposed constellation maps code value `u` to
//!   `(Q - 2 - u) mod Q`, so `P^T U P` is unchanged.
//!
//! Orbits therefore have four members for the modulo code and two for XOR.

use itertools::Itertools;
use rayon::prelude::*;

use crate::analytic::{ser_objective, SymbolMapping, TransitionModel};
use crate::denoise::Coupling;
use crate::error::{Error, Result};
use crate::search::bitmap::BitMapping;
use crate::search::optimize::ErrorProfile;
use crate::search::TIE_RTOL;

pub fn sign_reversal(map: &SymbolMapping) -> SymbolMapping {
    let q = map.order();
    SymbolMapping::from_vec_unchecked(map.assignment().iter().map(|&a| q - 1 - a).collect())
}

pub fn order_reversal(map: &SymbolMapping) -> SymbolMapping {
    let q = map.order();
    let w = map.assignment();
    SymbolMapping::from_vec_unchecked((0..q).map(|u| w[(2 * q - 2 - u) % q]).collect())
}

/// All mappings equivalent to `map`, sorted and deduplicated.
pub fn orbit(map: &SymbolMapping, coupling: Coupling) -> Vec<SymbolMapping> {
    let mut members = vec![map.clone(), sign_reversal(map)];
    if coupling == Coupling::Additive {
        let reversed = order_reversal(map);
        members.push(sign_reversal(&reversed));
        members.push(reversed);
    }
    members.sort();
    members.dedup();
    members
}

/// Lexicographically smallest member of the orbit.
pub fn canonical(map: &SymbolMapping, coupling: Coupling) -> SymbolMapping {
    orbit(map, coupling).swap_remove(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    representative: SymbolMapping,
    members: Vec<SymbolMapping>,
}

impl EquivalenceClass {
    pub fn representative(&self) -> &SymbolMapping {
        &self.representative
    }

    pub fn members(&self) -> &[SymbolMapping] {
        &self.members
    }

    pub fn contains(&self, map: &SymbolMapping) -> bool {
        self.members.binary_search(map).is_ok()
    }
}

/// Partitions all `Q!` mappings into orbits, ordered by representative.
pub fn enumerate_symbol_classes(order: usize, coupling: Coupling) -> Result<Vec<EquivalenceClass>> {
    if order != 4 && order != 8 {
        return Err(Error::InvalidOrder(order));
    }
    Ok((0..order)
        .permutations(order)
        .filter_map(|w| {
            let map = SymbolMapping::from_vec_unchecked(w);
            let members = orbit(&map, coupling);
            (members[0] == map).then_some(EquivalenceClass {
                representative: map,
                members,
            })
        })
        .collect())
}

/// Every mapping in its own class: the unreduced search space.
pub fn singleton_classes(order: usize) -> Vec<EquivalenceClass> {
    (0..order)
        .permutations(order)
        .map(|w| {
            let map = SymbolMapping::from_vec_unchecked(w);
            EquivalenceClass {
                representative: map.clone(),
                members: vec![map],
            }
        })
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_RTOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Checks that every member of every class matches its representative's
/// SER objective and, for each labeling in `bitmaps`, its BER objective.
pub fn verify_orbits(classes: &[EquivalenceClass], model: &TransitionModel, bitmaps: &[BitMapping]) -> Result<()> {
    classes.par_iter().try_for_each(|class| {
        let rep = &class.representative;
        let rep_ser = ser_objective(rep, model)?;
        let rep_profile = (!bitmaps.is_empty()).then(|| ErrorProfile::new(rep, model, bitmaps[0].coupling()));
        for member in class.members.iter().filter(|m| *m != rep) {
            let inconsistent = |class_value: f64, member_value: f64| Error::OrbitInconsistency {
                representative: rep.assignment().to_vec(),
                member: member.assignment().to_vec(),
                class_value,
                member_value,
            };
            let ser = ser_objective(member, model)?;
            if !close(rep_ser, ser) {
                return Err(inconsistent(rep_ser, ser));
            }
            if let Some(rep_profile) = &rep_profile {
                let profile = ErrorProfile::new(member, model, bitmaps[0].coupling());
                for bm in bitmaps {
                    let (a, b) = (rep_profile.ber_objective(bm), profile.ber_objective(bm));
                    if !close(a, b) {
                        return Err(inconsistent(a, b));
                    }
                }
            }
        }
        Ok(())
    })
}
