//! Denoise maps (network codes) applied at the relay and the W-group table
//! that ties each superposed level to a network-code value.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::constellation::SuperposedConstellation;
use crate::error::{Error, Result};

/// How the two user symbols are combined into a network-code value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// `(s1 + s2) mod Q`.
    Additive,
    /// Bitwise XOR of the natural binary representations.
    Xor,
}

impl Coupling {
    pub fn combine(self, s1: usize, s2: usize, order: usize) -> usize {
        match self {
            Coupling::Additive => denoise_mod(s1, s2, order),
            Coupling::Xor => denoise_xor(s1, s2, order),
        }
    }
}

/// Modulo-Q network code.
pub fn denoise_mod(s1: usize, s2: usize, order: usize) -> usize {
    (s1 + s2) % order
}

/// Bitwise-XOR network code. Acts on symbol indices, not on bit labels.
pub fn denoise_xor(s1: usize, s2: usize, order: usize) -> usize {
    debug_assert!(s1 < order && s2 < order);
    s1 ^ s2
}

/// A total code `C: Z_Q x Z_Q -> Z_Q`, stored as a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenoiseScheme {
    order: usize,
    coupling: Option<Coupling>,
    table: Vec<usize>,
}

impl DenoiseScheme {
    pub fn new(order: usize, coupling: Coupling) -> Self {
        let table = (0..order * order)
            .map(|i| coupling.combine(i / order, i % order, order))
            .collect();
        DenoiseScheme {
            order,
            coupling: Some(coupling),
            table,
        }
    }

    /// An arbitrary code, e.g. to exercise the exclusive-law check.
    pub fn from_fn(order: usize, code: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let mut table = Vec::with_capacity(order * order);
        for s1 in 0..order {
            for s2 in 0..order {
                let u = code(s1, s2);
                if u >= order {
                    return Err(Error::InvalidConfig(format!(
                        "code value {u} at ({s1}, {s2}) outside Z_{order}"
                    )));
                }
                table.push(u);
            }
        }
        Ok(DenoiseScheme {
            order,
            coupling: None,
            table,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `None` for custom tables.
    pub fn coupling(&self) -> Option<Coupling> {
        self.coupling
    }

    pub fn code(&self, s1: usize, s2: usize) -> usize {
        self.table[s1 * self.order + s2]
    }

    /// The partner symbol `s` with `C(own, s) == u`; first match wins.
    pub fn solve_partner(&self, own: usize, u: usize) -> Option<usize> {
        (0..self.order).find(|&s| self.code(own, s) == u)
    }

    /// Same as [`solve_partner`](Self::solve_partner) but for the first argument.
    pub fn solve_first(&self, own: usize, u: usize) -> Option<usize> {
        (0..self.order).find(|&s| self.code(s, own) == u)
    }
}

/// True iff fixing either argument of the code leaves a bijection on `Z_Q`.
pub fn check_exclusive_law(scheme: &DenoiseScheme) -> bool {
    let q = scheme.order();
    let bijective = |code: &dyn Fn(usize) -> usize| {
        let mut seen = vec![false; q];
        (0..q).all(|s| !std::mem::replace(&mut seen[code(s)], true))
    };
    (0..q).all(|s2| bijective(&|s1| scheme.code(s1, s2))) && (0..q).all(|s1| bijective(&|s2| scheme.code(s1, s2)))
}

/// One superposed level inside a W-group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMember {
    pub level_index: usize,
    pub level: i64,
    /// Prior probability of this level given the group's code value.
    pub weight: Rational64,
}

/// Assignment of superposed levels to network-code values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WGroupTable {
    order: usize,
    value_of_level: Vec<usize>,
    groups: Vec<Vec<GroupMember>>,
}

impl WGroupTable {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Network-code value `u(l)` of level `index`.
    pub fn value_of_level(&self, index: usize) -> usize {
        self.value_of_level[index]
    }

    pub fn values_by_level(&self) -> &[usize] {
        &self.value_of_level
    }

    /// Member levels of the group for code value `u`, ascending.
    pub fn group(&self, u: usize) -> &[GroupMember] {
        &self.groups[u]
    }
}

/// Labels every superposed level with its code value and derives the
/// per-group level priors from pair multiplicities.
///
/// Fails with [`Error::Ambiguity`] when two pairs summing to the same level
/// disagree on `C`, which is what happens for XOR on uniform PAM.
pub fn build_w_groups(sup: &SuperposedConstellation, scheme: &DenoiseScheme) -> Result<WGroupTable> {
    let q = scheme.order();
    if sup.order() != q {
        return Err(Error::OrderMismatch {
            expected: q,
            got: sup.order(),
        });
    }
    let mut value_of_level = Vec::with_capacity(sup.len());
    for idx in 0..sup.len() {
        let mut pairs = sup.pairs(idx).iter();
        let &(a, b) = pairs.next().expect("levels are never empty");
        let first = scheme.code(a, b);
        if let Some(&(c, d)) = pairs.find(|&&(c, d)| scheme.code(c, d) != first) {
            return Err(Error::Ambiguity {
                level: sup.levels()[idx],
                first,
                second: scheme.code(c, d),
            });
        }
        value_of_level.push(first);
    }

    let mut totals = vec![0i64; q];
    for (idx, &u) in value_of_level.iter().enumerate() {
        totals[u] += sup.multiplicity(idx) as i64;
    }
    let mut groups = vec![Vec::new(); q];
    for (idx, &u) in value_of_level.iter().enumerate() {
        groups[u].push(GroupMember {
            level_index: idx,
            level: sup.levels()[idx],
            weight: Rational64::new(sup.multiplicity(idx) as i64, totals[u]),
        });
    }
    if let Some(u) = totals.iter().position(|&t| t == 0) {
        return Err(Error::InvalidConfig(format!(
            "network-code value {u} is never produced"
        )));
    }
    Ok(WGroupTable {
        order: q,
        value_of_level,
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{make_pam, superpose, ModulationKind};

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn code_examples() {
        assert_eq!(denoise_mod(1, 3, 4), 0);
        assert_eq!(denoise_mod(3, 3, 4), 2);
        for s in 0..8 {
            assert_eq!(denoise_mod(0, s, 8), s);
            assert_eq!(denoise_xor(s, s, 8), 0);
        }
        assert_eq!(denoise_xor(3, 5, 8), 6);
        assert_eq!(denoise_xor(2, 1, 4), 3);
    }

    #[test]
    fn exclusive_law() {
        for q in [4, 8] {
            assert!(check_exclusive_law(&DenoiseScheme::new(q, Coupling::Additive)));
            assert!(check_exclusive_law(&DenoiseScheme::new(q, Coupling::Xor)));
        }
        let constant = DenoiseScheme::from_fn(4, |_, _| 0).unwrap();
        assert!(!check_exclusive_law(&constant));
        // Rows bijective but columns not
        let rows_only = DenoiseScheme::from_fn(4, |_, s2| s2).unwrap();
        assert!(!check_exclusive_law(&rows_only));
    }

    #[test]
    fn solve_partner_inverts_code() {
        let scheme = DenoiseScheme::new(8, Coupling::Additive);
        for own in 0..8 {
            for s in 0..8 {
                let u = scheme.code(own, s);
                assert_eq!(scheme.solve_partner(own, u), Some(s));
                assert_eq!(scheme.solve_first(own, scheme.code(s, own)), Some(s));
            }
        }
    }

    #[test]
    fn uniform4_mod_groups() {
        let sup = superpose(&make_pam(4, ModulationKind::Uniform).unwrap());
        let groups = build_w_groups(&sup, &DenoiseScheme::new(4, Coupling::Additive)).unwrap();
        // {-6,2} -> 0, {-4,4} -> 1, {-2,6} -> 2, {0} -> 3
        assert_eq!(groups.values_by_level(), &[0, 1, 2, 3, 0, 1, 2]);
        let g0: Vec<(i64, Rational64)> = groups.group(0).iter().map(|m| (m.level, m.weight)).collect();
        assert_eq!(g0, vec![(-6, r(1, 4)), (2, r(3, 4))]);
        let g3: Vec<(i64, Rational64)> = groups.group(3).iter().map(|m| (m.level, m.weight)).collect();
        assert_eq!(g3, vec![(0, r(1, 1))]);
        for u in 0..4 {
            let total: Rational64 = groups.group(u).iter().map(|m| m.weight).sum();
            assert_eq!(total, r(1, 1));
        }
    }

    #[test]
    fn xor_on_uniform_is_ambiguous() {
        for q in [4, 8] {
            let sup = superpose(&make_pam(q, ModulationKind::Uniform).unwrap());
            let err = build_w_groups(&sup, &DenoiseScheme::new(q, Coupling::Xor)).unwrap_err();
            assert!(matches!(err, Error::Ambiguity { .. }), "{err:?}");
        }
    }

    #[test]
    fn xor_on_nonuniform_partitions_evenly() {
        for q in [4, 8] {
            let sup = superpose(&make_pam(q, ModulationKind::Nonuniform).unwrap());
            let groups = build_w_groups(&sup, &DenoiseScheme::new(q, Coupling::Xor)).unwrap();
            for u in 0..q {
                let pairs: usize = groups.group(u).iter().map(|m| sup.multiplicity(m.level_index)).sum();
                assert_eq!(pairs, q);
                let total: Rational64 = groups.group(u).iter().map(|m| m.weight).sum();
                assert_eq!(total, r(1, 1));
            }
        }
    }

    #[test]
    fn mod_on_uniform8_has_q_groups() {
        let sup = superpose(&make_pam(8, ModulationKind::Uniform).unwrap());
        let groups = build_w_groups(&sup, &DenoiseScheme::new(8, Coupling::Additive)).unwrap();
        for u in 0..8 {
            assert!(!groups.group(u).is_empty());
        }
    }
}
