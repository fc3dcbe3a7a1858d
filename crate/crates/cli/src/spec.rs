//! Experiment description: parsed from flags and an optional TOML/JSON file,
//! then resolved into a fully explicit [`ExperimentSpec`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pncmap::search::snr_grid;
use pncmap::{make_pam, BitMapping, Criterion, ModulationKind, NamedLabels, Scenario, SymbolMapping};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

/// Default trial count: about 1% relative standard error at an error rate
/// of 1e-3.
pub const DEFAULT_TRIALS: u64 = 10_000_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Optimize,
    Sweep,
    Simulate,
    Tables,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Inclusive SNR grid in dB. In config files it may be a table, a
/// `"start:stop:step"` string or a single number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr")]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrGrid {
    pub fn single(snr_db: f64) -> Self {
        SnrGrid {
            start: snr_db,
            stop: snr_db,
            step: 1.0,
        }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        snr_grid(self.start, self.stop, self.step).map_err(|e| CliError::field("snr", e))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridRepr {
    Single(f64),
    Text(String),
    Table(GridTable),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridTable {
    start: f64,
    stop: f64,
    step: f64,
}

impl TryFrom<GridRepr> for SnrGrid {
    type Error = String;

    fn try_from(r: GridRepr) -> std::result::Result<Self, String> {
        match r {
            GridRepr::Single(x) => Ok(SnrGrid::single(x)),
            GridRepr::Text(s) => s.parse(),
            GridRepr::Table(t) => Ok(SnrGrid {
                start: t.start,
                stop: t.stop,
                step: t.step,
            }),
        }
    }
}

impl FromStr for SnrGrid {
    type Err = String;

    /// `start:stop:step`
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("expected start:stop:step, got '{s}'"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
        Ok(SnrGrid {
            start: num(start)?,
            stop: num(stop)?,
            step: num(step)?,
        })
    }
}

/// A relay mapping: a reference-table id or explicit broadcast points
/// `[W_0, ..., W_{Q-1}]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MappingSpec {
    Reference(usize),
    Points(Vec<i64>),
}

impl FromStr for MappingSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if let Ok(id) = s.parse::<usize>() {
            return Ok(MappingSpec::Reference(id));
        }
        s.trim_start_matches('[')
            .trim_end_matches(']')
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| format!("'{t}' is not an integer point"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(MappingSpec::Points)
    }
}

impl fmt::Display for MappingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MappingSpec::Reference(id) => write!(f, "{id}"),
            MappingSpec::Points(p) => {
                let parts: Vec<String> = p.iter().map(i64::to_string).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

impl MappingSpec {
    pub fn resolve(&self, scenario: Scenario) -> Result<SymbolMapping> {
        let map = match self {
            MappingSpec::Reference(id) => scenario.reference_mapping(*id),
            MappingSpec::Points(points) => {
                let relay = make_pam(scenario.order(), ModulationKind::Uniform)?;
                SymbolMapping::from_points(points, &relay)
            }
        };
        map.map_err(|e| CliError::field("mappings", e))
    }
}

/// A user labeling: a named one or explicit bit strings per symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BitmapSpec {
    Named(NamedLabels),
    Labels(Vec<String>),
}

impl FromStr for BitmapSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Ok(named) = s.parse::<NamedLabels>() {
            return Ok(BitmapSpec::Named(named));
        }
        let labels: Vec<String> = s.split(',').map(|t| t.trim().to_string()).collect();
        if labels
            .iter()
            .any(|l| l.is_empty() || !l.chars().all(|c| c == '0' || c == '1'))
        {
            return Err(format!(
                "'{s}' is neither gray, binary, third nor a list of bit strings"
            ));
        }
        Ok(BitmapSpec::Labels(labels))
    }
}

impl fmt::Display for BitmapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BitmapSpec::Named(n) => write!(f, "{n}"),
            BitmapSpec::Labels(l) => write!(f, "{}", l.join(",")),
        }
    }
}

impl BitmapSpec {
    pub fn resolve(&self, scenario: Scenario) -> Result<BitMapping> {
        let q = scenario.order();
        let labels = match self {
            BitmapSpec::Named(n) => n.labels(q).map_err(|e| CliError::field("bitmaps", e))?,
            BitmapSpec::Labels(strings) => {
                let width = q.trailing_zeros() as usize;
                if strings.len() != q {
                    return Err(CliError::field(
                        "bitmaps",
                        format!("{} labels given for {q} symbols", strings.len()),
                    ));
                }
                strings
                    .iter()
                    .map(|s| {
                        if s.len() != width {
                            return Err(CliError::field("bitmaps", format!("label '{s}' is not {width} bits")));
                        }
                        usize::from_str_radix(s, 2).map_err(|e| CliError::field("bitmaps", e))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        BitMapping::new(labels, scenario.coupling()).map_err(|e| CliError::field("bitmaps", e))
    }
}

/// Every setting is optional here; flags override the config file, and
/// [`PartialSpec::resolve`] fills in defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialSpec {
    pub scenario: Option<String>,
    pub criterion: Option<String>,
    pub snr: Option<SnrGrid>,
    pub mappings: Option<Vec<MappingSpec>>,
    pub bitmaps: Option<Vec<BitmapSpec>>,
    pub simulate: Option<bool>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub strict: Option<bool>,
}

impl PartialSpec {
    /// Reads a TOML file, or JSON when the extension is `.json`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: PartialSpec) -> PartialSpec {
        PartialSpec {
            scenario: other.scenario.or(self.scenario),
            criterion: other.criterion.or(self.criterion),
            snr: other.snr.or(self.snr),
            mappings: other.mappings.or(self.mappings),
            bitmaps: other.bitmaps.or(self.bitmaps),
            simulate: other.simulate.or(self.simulate),
            trials: other.trials.or(self.trials),
            seed: other.seed.or(self.seed),
            format: other.format.or(self.format),
            out: other.out.or(self.out),
            strict: other.strict.or(self.strict),
        }
    }

    pub fn resolve(self, command: Command) -> Result<ExperimentSpec> {
        let scenario = self
            .scenario
            .as_deref()
            .map(Scenario::from_str)
            .transpose()
            .map_err(|e| CliError::field("scenario", e))?;
        let criterion = match self.criterion.as_deref() {
            Some(c) => c.parse::<Criterion>().map_err(|e| CliError::field("criterion", e))?,
            None => Criterion::Ser,
        };
        let snr = self.snr.unwrap_or(SnrGrid {
            start: -10.0,
            stop: 15.0,
            step: 1.0,
        });
        let trials = self.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(CliError::field("trials", "must be at least 1"));
        }
        let (mappings, bitmaps) = match (command, scenario) {
            (Command::Tables, _) => (Vec::new(), Vec::new()),
            (_, None) => {
                return Err(CliError::field(
                    "scenario",
                    "required; one of uniform4, nonuniform4, uniform8, nonuniform8",
                ))
            }
            (_, Some(sc)) => {
                let mappings = self.mappings.unwrap_or_else(|| match command {
                    Command::Simulate => vec![MappingSpec::Reference(1)],
                    _ => (1..=sc.reference_points().len()).map(MappingSpec::Reference).collect(),
                });
                let bitmaps = self.bitmaps.unwrap_or_else(|| match (command, criterion) {
                    (Command::Sweep, Criterion::Ber) => NamedLabels::ALL.map(BitmapSpec::Named).to_vec(),
                    (Command::Optimize, _) => Vec::new(),
                    _ => vec![BitmapSpec::Named(sc.recommended_labels())],
                });
                for m in &mappings {
                    m.resolve(sc)?;
                }
                for b in &bitmaps {
                    b.resolve(sc)?;
                }
                (mappings, bitmaps)
            }
        };
        let spec = ExperimentSpec {
            command,
            scenario,
            criterion,
            snr,
            mappings,
            bitmaps,
            simulate: self.simulate.unwrap_or(command == Command::Simulate),
            trials,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            format: self.format.unwrap_or_default(),
            out: self.out,
            strict: self.strict.unwrap_or(false),
        };
        if command != Command::Tables {
            spec.snr.points()?;
        }
        Ok(spec)
    }
}

/// A validated experiment with every default made explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub command: Command,
    pub scenario: Option<Scenario>,
    pub criterion: Criterion,
    pub snr: SnrGrid,
    pub mappings: Vec<MappingSpec>,
    pub bitmaps: Vec<BitmapSpec>,
    pub simulate: bool,
    pub trials: u64,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub strict: bool,
}

impl ExperimentSpec {
    pub fn scenario(&self) -> Result<Scenario> {
        self.scenario.ok_or_else(|| CliError::field("scenario", "required"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_mapping_specs() {
        assert_eq!("3".parse::<MappingSpec>().unwrap(), MappingSpec::Reference(3));
        assert_eq!(
            "-3,1,-1,3".parse::<MappingSpec>().unwrap(),
            MappingSpec::Points(vec![-3, 1, -1, 3])
        );
        assert_eq!(
            "[-3, 1, -1, 3]".parse::<MappingSpec>().unwrap().to_string(),
            "[-3,1,-1,3]"
        );
        assert!("a,b".parse::<MappingSpec>().is_err());
    }

    #[test]
    fn parse_bitmap_specs() {
        assert_eq!(
            "Gray".parse::<BitmapSpec>().unwrap(),
            BitmapSpec::Named(NamedLabels::Gray)
        );
        let b = "00,01,11,10".parse::<BitmapSpec>().unwrap();
        assert_eq!(b.resolve(Scenario::Uniform4).unwrap().labels(), &[0, 1, 3, 2]);
        assert!(b.resolve(Scenario::Uniform8).is_err());
        assert!("00,01,12".parse::<BitmapSpec>().is_err());
        assert!("00,01,01,10"
            .parse::<BitmapSpec>()
            .unwrap()
            .resolve(Scenario::Uniform4)
            .is_err());
    }

    #[test]
    fn parse_grid() {
        let g: SnrGrid = "-10:15:2.5".parse().unwrap();
        assert_eq!(g.points().unwrap().len(), 11);
        assert!("1:2".parse::<SnrGrid>().is_err());
        assert!("0:1:0.01".parse::<SnrGrid>().unwrap().points().is_err());
    }

    #[test]
    fn defaults_and_errors() {
        let spec = PartialSpec {
            scenario: Some("nonuniform8".into()),
            ..Default::default()
        }
        .resolve(Command::Sweep)
        .unwrap();
        assert_eq!(spec.mappings.len(), 9);
        assert_eq!(spec.trials, DEFAULT_TRIALS);
        assert!(!spec.simulate);

        let err = PartialSpec {
            scenario: Some("uniform5".into()),
            ..Default::default()
        }
        .resolve(Command::Optimize)
        .unwrap_err();
        assert!(err.to_string().starts_with("scenario:"));
        assert_eq!(err.exit_code(), 2);

        let err = PartialSpec {
            scenario: Some("uniform4".into()),
            mappings: Some(vec![MappingSpec::Reference(3)]),
            ..Default::default()
        }
        .resolve(Command::Sweep)
        .unwrap_err();
        assert!(err.to_string().starts_with("mappings:"));
        assert!(PartialSpec::default().resolve(Command::Tables).is_ok());
        assert!(PartialSpec::default().resolve(Command::Optimize).is_err());
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = PartialSpec {
            scenario: Some("uniform4".into()),
            seed: Some(5),
            ..Default::default()
        };
        let flags = PartialSpec {
            seed: Some(9),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.scenario.as_deref(), Some("uniform4"));
    }

    #[test]
    fn config_file_formats() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("exp.toml");
        std::fs::write(
            &toml_path,
            "scenario = \"uniform4\"\ncriterion = \"ber\"\nmappings = [1, [-3, 1, -1, 3]]\nbitmaps = [\"gray\", [\"00\", \"01\", \"10\", \"11\"]]\n[snr]\nstart = 0.0\nstop = 5.0\nstep = 1.0\n",
        )
        .unwrap();
        let spec = PartialSpec::from_file(&toml_path)
            .unwrap()
            .resolve(Command::Sweep)
            .unwrap();
        assert_eq!(spec.mappings[1], MappingSpec::Points(vec![-3, 1, -1, 3]));
        assert_eq!(spec.bitmaps[0], BitmapSpec::Named(NamedLabels::Gray));

        let json_path = dir.path().join("exp.json");
        std::fs::write(
            &json_path,
            serde_json::to_string(&PartialSpec::from_file(&toml_path).unwrap()).unwrap(),
        )
        .unwrap();
        assert_eq!(
            PartialSpec::from_file(&json_path).unwrap(),
            PartialSpec::from_file(&toml_path).unwrap()
        );

        std::fs::write(&toml_path, "scenery = \"uniform4\"\n").unwrap();
        let err = PartialSpec::from_file(&toml_path).unwrap_err();
        assert!(err.to_string().contains("scenery"));
    }
}
