//! The four standard transmission scenarios and their reference mappings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::SymbolMapping;
use crate::constellation::{make_pam, ModulationKind};
use crate::denoise::{Coupling, DenoiseScheme};
use crate::error::{Error, Result};
use crate::link::LinkSetup;

/// User modulation in the MA phase; the relay always uses uniform PAM of
/// the same order. Uniform PAM pairs with the modulo code, nonuniform PAM
/// with the XOR code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Uniform4,
    Nonuniform4,
    Uniform8,
    Nonuniform8,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Uniform4,
        Scenario::Nonuniform4,
        Scenario::Uniform8,
        Scenario::Nonuniform8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Uniform4 => "uniform4",
            Scenario::Nonuniform4 => "nonuniform4",
            Scenario::Uniform8 => "uniform8",
            Scenario::Nonuniform8 => "nonuniform8",
        }
    }

    pub fn order(self) -> usize {
        match self {
            Scenario::Uniform4 | Scenario::Nonuniform4 => 4,
            Scenario::Uniform8 | Scenario::Nonuniform8 => 8,
        }
    }

    pub fn kind(self) -> ModulationKind {
        match self {
            Scenario::Uniform4 | Scenario::Uniform8 => ModulationKind::Uniform,
            Scenario::Nonuniform4 | Scenario::Nonuniform8 => ModulationKind::Nonuniform,
        }
    }

    pub fn coupling(self) -> Coupling {
        match self.kind() {
            ModulationKind::Uniform => Coupling::Additive,
            ModulationKind::Nonuniform => Coupling::Xor,
        }
    }

    pub fn setup(self) -> LinkSetup {
        let q = self.order();
        LinkSetup::new(
            make_pam(q, self.kind()).expect("supported order"),
            make_pam(q, ModulationKind::Uniform).expect("supported order"),
            DenoiseScheme::new(q, self.coupling()),
        )
        .expect("standard scenarios are valid")
    }

    /// Reference relay mappings as broadcast points `[W_0, ..., W_{Q-1}]`,
    /// numbered from 1.
    pub fn reference_points(self) -> &'static [&'static [i64]] {
        match self {
            Scenario::Uniform4 => &[&[-3, -1, 1, 3], &[-3, 1, -1, 3]],
            Scenario::Nonuniform4 => &[&[-1, -3, 1, 3], &[-3, -1, 1, 3], &[-3, -1, 3, 1], &[-3, 1, 3, -1]],
            Scenario::Uniform8 => &[&[-7, -5, -3, -1, 1, 3, 5, 7], &[-5, 1, 7, -3, 3, -7, -1, 5]],
            Scenario::Nonuniform8 => &[
                &[-3, -1, -5, -7, 3, 1, 5, 7],
                &[-3, -1, -5, -7, 3, 1, 7, 5],
                &[-3, -1, -7, -5, 3, 1, 7, 5],
                &[-7, -1, -5, -3, 5, 1, 7, 3],
                &[-7, -1, -3, -5, 5, 3, 7, 1],
                &[-7, -5, 7, 5, -1, -3, 1, 3],
                &[-7, -5, -3, -1, 7, 5, 3, 1],
                &[-7, -3, -5, -1, 5, 3, 7, 1],
                &[-7, -3, -1, -5, 5, 3, 7, 1],
            ],
        }
    }

    /// Reference mapping `id` (1-based).
    pub fn reference_mapping(self, id: usize) -> Result<SymbolMapping> {
        let table = self.reference_points();
        let points = id.checked_sub(1).and_then(|i| table.get(i)).ok_or_else(|| {
            Error::InvalidMapping(format!(
                "{} has reference mappings 1..={}, got {id}",
                self.name(),
                table.len()
            ))
        })?;
        let relay = make_pam(self.order(), ModulationKind::Uniform)?;
        SymbolMapping::from_points(points, &relay)
    }

    pub fn reference_mappings(self) -> Vec<SymbolMapping> {
        (1..=self.reference_points().len())
            .map(|id| self.reference_mapping(id).expect("table entries are valid"))
            .collect()
    }

    /// Bit labeling recommended at high SNR: Gray for uniform, binary for nonuniform.
    pub fn recommended_labels(self) -> NamedLabels {
        match self.kind() {
            ModulationKind::Uniform => NamedLabels::Gray,
            ModulationKind::Nonuniform => NamedLabels::Binary,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown scenario '{s}'; expected one of uniform4, nonuniform4, uniform8, nonuniform8"
                ))
            })
    }
}

/// Named user bit labelings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedLabels {
    Gray,
    Binary,
    /// The alternative labeling discussed alongside Gray and binary. It is a
    /// different labeling for Q = 4 and Q = 8.
    Third,
}

impl NamedLabels {
    pub const ALL: [NamedLabels; 3] = [NamedLabels::Gray, NamedLabels::Binary, NamedLabels::Third];

    pub fn name(self) -> &'static str {
        match self {
            NamedLabels::Gray => "gray",
            NamedLabels::Binary => "binary",
            NamedLabels::Third => "third",
        }
    }

    /// `labels[s]` is the bit string of symbol `s`, MSB first when printed.
    pub fn labels(self, order: usize) -> Result<Vec<usize>> {
        let labels: &[usize] = match (self, order) {
            (NamedLabels::Gray, 4) => &[0b00, 0b01, 0b11, 0b10],
            (NamedLabels::Binary, 4) => &[0, 1, 2, 3],
            (NamedLabels::Third, 4) => &[0b00, 0b11, 0b01, 0b10],
            (NamedLabels::Gray, 8) => &[0b000, 0b001, 0b101, 0b100, 0b110, 0b111, 0b011, 0b010],
            (NamedLabels::Binary, 8) => &[0, 1, 2, 3, 4, 5, 6, 7],
            (NamedLabels::Third, 8) => &[0b000, 0b011, 0b100, 0b111, 0b010, 0b001, 0b110, 0b101],
            _ => return Err(Error::InvalidOrder(order)),
        };
        Ok(labels.to_vec())
    }
}

impl fmt::Display for NamedLabels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedLabels {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedLabels::ALL
            .into_iter()
            .find(|n| n.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown bit mapping '{s}'")))
    }
}
