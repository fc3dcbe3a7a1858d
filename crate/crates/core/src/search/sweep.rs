//! SNR sweeps over reference mappings and crossover location.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::LinkSetup;
use crate::scenario::{NamedLabels, Scenario};
use crate::search::bitmap::BitMapping;
use crate::search::optimize::{rate_scale, Candidate, Criterion, SearchResult, SearchSpace};

/// Default bracket width returned by [`find_crossover`], in dB.
pub const CROSSOVER_RESOLUTION_DB: f64 = 0.01;

/// A candidate with a display id such as `"1"` or `"3+binary"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCandidate {
    pub id: String,
    pub candidate: Candidate,
}

/// Reference mappings of a scenario; for BER each is paired with the named
/// labelings (Gray, binary, third).
pub fn reference_candidates(scenario: Scenario, criterion: Criterion) -> Vec<NamedCandidate> {
    let coupling = scenario.coupling();
    let mut out = Vec::new();
    for (idx, map) in scenario.reference_mappings().into_iter().enumerate() {
        let id = idx + 1;
        match criterion {
            Criterion::Ser => out.push(NamedCandidate {
                id: id.to_string(),
                candidate: Candidate::symbol(map),
            }),
            Criterion::Ber => {
                for named in NamedLabels::ALL {
                    let labels = named.labels(scenario.order()).expect("supported order");
                    let bits = BitMapping::new(labels, coupling).expect("named labels are valid");
                    out.push(NamedCandidate {
                        id: format!("{id}+{named}"),
                        candidate: Candidate::with_bits(map.clone(), bits),
                    });
                }
            }
        }
    }
    out
}

/// Objective of one named candidate at one SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateValue {
    pub id: String,
    pub objective: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub candidates: Vec<CandidateValue>,
    pub optimum: SearchResult,
}

/// Inclusive grid `start, start + step, ...` up to `stop`.
pub fn snr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::InvalidConfig("SNR grid bounds must be finite".into()));
    }
    if step < 0.1 {
        return Err(Error::InvalidConfig(format!(
            "SNR step must be at least 0.1 dB, got {step}"
        )));
    }
    if stop < start {
        return Err(Error::InvalidConfig(format!("empty SNR grid {start}:{stop}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    // Round to 1e-9 dB so that e.g. -10 + 7 * 0.1 prints cleanly.
    Ok((0..=n)
        .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

/// Evaluates every candidate and the global optimum at each SNR.
pub fn sweep(
    setup: &LinkSetup,
    space: &mut SearchSpace,
    candidates: &[NamedCandidate],
    grid: &[f64],
    criterion: Criterion,
) -> Result<Vec<SweepPoint>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty SNR grid".into()));
    }
    let scale = rate_scale(setup.order(), criterion);
    grid.iter()
        .map(|&snr_db| {
            let model = setup.model(snr_db)?;
            let candidates = candidates
                .iter()
                .map(|nc| {
                    let objective = nc.candidate.objective(&model, criterion)?;
                    Ok(CandidateValue {
                        id: nc.id.clone(),
                        objective,
                        rate: objective / scale,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let optimum = space.optimize(&model, criterion)?;
            Ok(SweepPoint {
                snr_db,
                candidates,
                optimum,
            })
        })
        .collect()
}

/// Brackets the SNR where `a` and `b` swap order, by bisection on the
/// objective difference. The returned interval is at most
/// [`CROSSOVER_RESOLUTION_DB`] wide.
pub fn find_crossover(
    setup: &LinkSetup,
    a: &Candidate,
    b: &Candidate,
    criterion: Criterion,
    lo_db: f64,
    hi_db: f64,
) -> Result<(f64, f64)> {
    find_crossover_within(setup, a, b, criterion, lo_db, hi_db, CROSSOVER_RESOLUTION_DB)
}

pub fn find_crossover_within(
    setup: &LinkSetup,
    a: &Candidate,
    b: &Candidate,
    criterion: Criterion,
    lo_db: f64,
    hi_db: f64,
    resolution_db: f64,
) -> Result<(f64, f64)> {
    if !(lo_db < hi_db && resolution_db > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "bad crossover interval [{lo_db}, {hi_db}] at resolution {resolution_db}"
        )));
    }
    let diff = |snr: f64| -> Result<f64> {
        let model = setup.model(snr)?;
        Ok(a.objective(&model, criterion)? - b.objective(&model, criterion)?)
    };
    let (mut lo, mut hi) = (lo_db, hi_db);
    let (d_lo, d_hi) = (diff(lo)?, diff(hi)?);
    if d_lo.signum() == d_hi.signum() || d_lo == d_hi {
        return Err(Error::NoSignChange { lo: lo_db, hi: hi_db });
    }
    let lo_sign = d_lo.signum();
    while hi - lo > resolution_db {
        let mid = 0.5 * (lo + hi);
        if diff(mid)?.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_construction() {
        let g = snr_grid(-10.0, 15.0, 1.0).unwrap();
        assert_eq!(g.len(), 26);
        assert_eq!(g[0], -10.0);
        assert_eq!(*g.last().unwrap(), 15.0);
        assert_eq!(snr_grid(3.0, 3.0, 1.0).unwrap(), vec![3.0]);
        assert!(snr_grid(0.0, 1.0, 0.05).is_err());
        assert!(snr_grid(1.0, 0.0, 1.0).is_err());
        assert_eq!(snr_grid(0.0, 0.3, 0.1).unwrap(), vec![0.0, 0.1, 0.2, 0.3]);
    }

    #[test]
    fn single_point_sweep() {
        let setup = Scenario::Uniform4.setup();
        let mut space = SearchSpace::reduced(&setup).unwrap();
        let cands = reference_candidates(Scenario::Uniform4, Criterion::Ser);
        let rows = sweep(&setup, &mut space, &cands, &[5.0], Criterion::Ser).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].candidates.len(), 2);
        assert!(sweep(&setup, &mut space, &cands, &[], Criterion::Ser).is_err());
    }

    #[test]
    fn identical_candidates_have_no_crossover() {
        let setup = Scenario::Uniform4.setup();
        let m = Candidate::symbol(Scenario::Uniform4.reference_mapping(1).unwrap());
        assert_eq!(
            find_crossover(&setup, &m, &m, Criterion::Ser, -10.0, 0.0),
            Err(Error::NoSignChange { lo: -10.0, hi: 0.0 })
        );
    }

    #[test]
    fn ber_candidates_pair_labels() {
        let c = reference_candidates(Scenario::Nonuniform4, Criterion::Ber);
        assert_eq!(c.len(), 12);
        assert_eq!(c[7].id, "3+binary");
    }
}
