//! Subcommand implementations. Each turns a resolved [`ExperimentSpec`]
//! into a list of output records.

use pncmap::search::{
    canonical, distinct_bit_mappings, enumerate_symbol_classes, rate_scale, Candidate, ErrorProfile, SearchResult,
};
use pncmap::simulator::{derive_seed, sweep_sim, SimConfig, SimResult};
use pncmap::{
    make_pam, BitMapping, Coupling, Criterion, LinkSetup, ModulationKind, NamedLabels, Scenario, SearchSpace,
    SymbolMapping, TransitionModel,
};

use crate::output::{OptimizeRecord, SimulateRecord, Spaced, SweepRecord, TableRecord};
use crate::spec::ExperimentSpec;
use crate::Result;

fn relay_points(scenario: Scenario, map: &SymbolMapping) -> Spaced<i64> {
    let relay = make_pam(scenario.order(), ModulationKind::Uniform).expect("supported order");
    Spaced(map.points(&relay))
}

fn search_space(spec: &ExperimentSpec, setup: &LinkSetup) -> Result<SearchSpace> {
    let space = SearchSpace::reduced(setup)?;
    Ok(if spec.strict { space.strict() } else { space })
}

/// Reference ids whose mapping is equivalent to `map`.
fn reference_ids(scenario: Scenario, map: &SymbolMapping) -> Vec<usize> {
    let rep = canonical(map, scenario.coupling());
    scenario
        .reference_mappings()
        .iter()
        .enumerate()
        .filter(|(_, m)| canonical(m, scenario.coupling()) == rep)
        .map(|(i, _)| i + 1)
        .collect()
}

fn bitmap_names(scenario: Scenario, bits: &BitMapping) -> Vec<String> {
    NamedLabels::ALL
        .into_iter()
        .filter(|n| {
            let labels = n.labels(scenario.order()).expect("supported order");
            BitMapping::new(labels, scenario.coupling()).is_ok_and(|b| b.equivalent(bits))
        })
        .map(|n| n.to_string())
        .collect()
}

pub fn optimize(spec: &ExperimentSpec) -> Result<Vec<OptimizeRecord>> {
    let sc = spec.scenario()?;
    let setup = sc.setup();
    let mut space = search_space(spec, &setup)?;
    let mut records = Vec::new();
    for snr_db in spec.snr.points()? {
        let model = setup.model(snr_db)?;
        let result = space.optimize(&model, spec.criterion)?;
        for (rank, cand) in result.ties.iter().enumerate() {
            records.push(OptimizeRecord {
                snr_db,
                criterion: spec.criterion.to_string(),
                objective: result.objective,
                rate: result.rate,
                rank,
                ties: result.ties.len(),
                w: relay_points(sc, &cand.symbol),
                reference_ids: Spaced(reference_ids(sc, &cand.symbol)),
                labels: cand.bits.as_ref().map(|b| Spaced(b.label_strings())),
                bitmap_names: cand.bits.as_ref().map(|b| Spaced(bitmap_names(sc, b))),
            });
        }
    }
    Ok(records)
}

struct Entry {
    mapping_id: String,
    bitmap_id: Option<String>,
    candidate: Candidate,
    /// Labels used when simulating.
    sim_labels: BitMapping,
}

fn sweep_entries(spec: &ExperimentSpec, sc: Scenario) -> Result<Vec<Entry>> {
    let recommended = BitMapping::new(sc.recommended_labels().labels(sc.order())?, sc.coupling())?;
    let mut entries = Vec::new();
    for m in &spec.mappings {
        let symbol = m.resolve(sc)?;
        match spec.criterion {
            Criterion::Ser => {
                let sim_labels = match spec.bitmaps.first() {
                    Some(b) => b.resolve(sc)?,
                    None => recommended.clone(),
                };
                entries.push(Entry {
                    mapping_id: m.to_string(),
                    bitmap_id: None,
                    candidate: Candidate::symbol(symbol),
                    sim_labels,
                });
            }
            Criterion::Ber => {
                for b in &spec.bitmaps {
                    let bits = b.resolve(sc)?;
                    entries.push(Entry {
                        mapping_id: m.to_string(),
                        bitmap_id: Some(b.to_string()),
                        candidate: Candidate::with_bits(symbol.clone(), bits.clone()),
                        sim_labels: bits,
                    });
                }
            }
        }
    }
    Ok(entries)
}

fn simulate_entry(
    spec: &ExperimentSpec,
    setup: &LinkSetup,
    entry: &Entry,
    index: usize,
    grid: &[f64],
) -> Result<Vec<SimResult>> {
    let template = SimConfig {
        setup: setup.clone(),
        mapping: entry.candidate.symbol.clone(),
        labels: entry.sim_labels.labels().to_vec(),
        snr_db: grid[0],
        trials: spec.trials,
        seed: derive_seed(spec.seed, index),
    };
    Ok(sweep_sim(&template, grid, spec.trials)?)
}

pub fn sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRecord>> {
    let sc = spec.scenario()?;
    let setup = sc.setup();
    let mut space = search_space(spec, &setup)?;
    let grid = spec.snr.points()?;
    let entries = sweep_entries(spec, sc)?;
    let sims: Vec<Option<Vec<SimResult>>> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            spec.simulate
                .then(|| simulate_entry(spec, &setup, e, i, &grid))
                .transpose()
        })
        .collect::<Result<_>>()?;
    let scale = rate_scale(sc.order(), spec.criterion);
    let mut records = Vec::new();
    for (k, &snr_db) in grid.iter().enumerate() {
        let model = setup.model(snr_db)?;
        let optimum: SearchResult = space.optimize(&model, spec.criterion)?;
        for (entry, sim) in entries.iter().zip(&sims) {
            let rate = entry.candidate.objective(&model, spec.criterion)? / scale;
            let sim = sim.as_ref().map(|s| &s[k]);
            let ser = spec.criterion == Criterion::Ser;
            records.push(SweepRecord {
                snr_db,
                mapping_id: entry.mapping_id.clone(),
                bitmap_id: entry.bitmap_id.clone(),
                w: relay_points(sc, &entry.candidate.symbol),
                ser_analytic: ser.then_some(rate),
                ber_analytic: (!ser).then_some(rate),
                co_optimal: space.is_co_optimal(&optimum, &entry.candidate),
                optimum_rate: optimum.rate,
                ser_empirical: sim.filter(|_| ser).map(|s| s.ser),
                ser_stderr: sim.filter(|_| ser).map(|s| s.ser_stderr),
                ber_empirical: sim.filter(|_| !ser).map(|s| s.ber),
                ber_stderr: sim.filter(|_| !ser).map(|s| s.ber_stderr),
            });
        }
    }
    Ok(records)
}

fn analytic_rates(model: &TransitionModel, map: &SymbolMapping, bits: &BitMapping) -> (f64, f64) {
    let q = map.order();
    let ser = Candidate::symbol(map.clone())
        .objective(model, Criterion::Ser)
        .expect("orders checked")
        / rate_scale(q, Criterion::Ser);
    let ber = ErrorProfile::new(map, model, bits.coupling()).ber_objective(bits) / rate_scale(q, Criterion::Ber);
    (ser, ber)
}

pub fn simulate(spec: &ExperimentSpec) -> Result<Vec<SimulateRecord>> {
    let sc = spec.scenario()?;
    let setup = sc.setup();
    let grid = spec.snr.points()?;
    let mut records = Vec::new();
    let mut index = 0;
    for m in &spec.mappings {
        let map = m.resolve(sc)?;
        for b in &spec.bitmaps {
            let bits = b.resolve(sc)?;
            let entry = Entry {
                mapping_id: m.to_string(),
                bitmap_id: Some(b.to_string()),
                candidate: Candidate::with_bits(map.clone(), bits.clone()),
                sim_labels: bits.clone(),
            };
            let sims = simulate_entry(spec, &setup, &entry, index, &grid)?;
            index += 1;
            for sim in sims {
                let (ser, ber) = analytic_rates(&setup.model(sim.snr_db)?, &map, &bits);
                records.push(SimulateRecord {
                    snr_db: sim.snr_db,
                    mapping_id: entry.mapping_id.clone(),
                    bitmap_id: b.to_string(),
                    trials: sim.trials,
                    seed: sim.seed,
                    ser_analytic: ser,
                    ser_empirical: sim.ser,
                    ser_stderr: sim.ser_stderr,
                    ber_analytic: ber,
                    ber_empirical: sim.ber,
                    ber_stderr: sim.ber_stderr,
                    user1_symbol_errors: sim.symbol_errors[0],
                    user2_symbol_errors: sim.symbol_errors[1],
                    user1_bit_errors: sim.bit_errors[0],
                    user2_bit_errors: sim.bit_errors[1],
                });
            }
        }
    }
    Ok(records)
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

pub fn tables(_spec: &ExperimentSpec) -> Result<Vec<TableRecord>> {
    let mut records = Vec::new();
    for sc in Scenario::ALL {
        let relay = make_pam(sc.order(), ModulationKind::Uniform)?;
        for (i, map) in sc.reference_mappings().iter().enumerate() {
            records.push(TableRecord {
                table: "mapping".into(),
                scenario: sc.to_string(),
                id: (i + 1).to_string(),
                value: Spaced(map.points(&relay)).to_string(),
            });
        }
    }
    for sc in [Scenario::Uniform4, Scenario::Nonuniform4] {
        for named in NamedLabels::ALL {
            let bits = BitMapping::new(named.labels(4)?, sc.coupling())?;
            records.push(TableRecord {
                table: "b_vector".into(),
                scenario: sc.to_string(),
                id: named.to_string(),
                value: bits.b().into_iter().map(fmt_num).collect::<Vec<_>>().join(" "),
            });
        }
    }
    for named in [NamedLabels::Gray, NamedLabels::Binary] {
        let m = BitMapping::new(named.labels(4)?, Coupling::Additive)?.b_matrix();
        let rows: Vec<String> = m
            .rows()
            .into_iter()
            .map(|r| r.iter().copied().map(fmt_num).collect::<Vec<_>>().join(" "))
            .collect();
        records.push(TableRecord {
            table: "b_matrix".into(),
            scenario: Scenario::Uniform4.to_string(),
            id: named.to_string(),
            value: rows.join("; "),
        });
    }
    for sc in Scenario::ALL {
        records.push(TableRecord {
            table: "distinct_bit_mappings".into(),
            scenario: sc.to_string(),
            id: String::new(),
            value: distinct_bit_mappings(sc.order(), sc.coupling())?.len().to_string(),
        });
        records.push(TableRecord {
            table: "symbol_classes".into(),
            scenario: sc.to_string(),
            id: String::new(),
            value: enumerate_symbol_classes(sc.order(), sc.coupling())?.len().to_string(),
        });
    }
    Ok(records)
}
