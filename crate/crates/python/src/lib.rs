//! Python bindings. Build with `--features extension-module` for a wheel,
//! or plain `cargo build` and load the resulting shared library directly.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pncmap::search::{distinct_bit_mappings, enumerate_symbol_classes, rate_scale, ErrorProfile};
use pncmap::simulator::{run_trials, SimConfig};
use pncmap::{
    make_pam, BitMapping, Candidate, Criterion, LinkSetup, ModulationKind, NamedLabels, SearchSpace, SymbolMapping,
};

fn err(e: pncmap::Error) -> PyErr {
    match e {
        pncmap::Error::OrbitInconsistency { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn criterion(name: &str) -> PyResult<Criterion> {
    name.parse().map_err(err)
}

/// Bit labels as accepted from Python: a name or one integer per symbol.
#[derive(FromPyObject)]
enum Labels {
    Named(String),
    Explicit(Vec<usize>),
}

/// One transmission scenario: `uniform4`, `nonuniform4`, `uniform8` or `nonuniform8`.
#[pyclass(frozen, module = "pncmap_py")]
struct Scenario {
    inner: pncmap::Scenario,
    setup: LinkSetup,
}

/// Transition matrices at one SNR, as nested lists.
#[pyclass(frozen, get_all, module = "pncmap_py")]
struct Model {
    snr_db: f64,
    u: Vec<Vec<f64>>,
    d: Vec<Vec<f64>>,
    sigma1_sq: f64,
    sigma2_sq: f64,
}

/// One optimal candidate.
#[pyclass(frozen, get_all, module = "pncmap_py")]
struct Optimum {
    points: Vec<i64>,
    labels: Option<Vec<usize>>,
    objective: f64,
    rate: f64,
}

#[pyclass(frozen, get_all, module = "pncmap_py")]
struct Simulation {
    snr_db: f64,
    trials: u64,
    seed: u64,
    ser: f64,
    ber: f64,
    ser_stderr: f64,
    ber_stderr: f64,
    symbol_errors: (u64, u64),
    bit_errors: (u64, u64),
}

impl Scenario {
    fn mapping(&self, points: Vec<i64>) -> PyResult<SymbolMapping> {
        let relay = make_pam(self.inner.order(), ModulationKind::Uniform).map_err(err)?;
        SymbolMapping::from_points(&points, &relay).map_err(err)
    }

    fn bits(&self, labels: Option<Labels>) -> PyResult<BitMapping> {
        let q = self.inner.order();
        let raw = match labels {
            None => self.inner.recommended_labels().labels(q).map_err(err)?,
            Some(Labels::Named(name)) => name.parse::<NamedLabels>().and_then(|n| n.labels(q)).map_err(err)?,
            Some(Labels::Explicit(v)) => v,
        };
        BitMapping::new(raw, self.inner.coupling()).map_err(err)
    }

    fn points(&self, map: &SymbolMapping) -> Vec<i64> {
        let relay = make_pam(self.inner.order(), ModulationKind::Uniform).expect("supported order");
        map.points(&relay)
    }
}

#[pymethods]
impl Scenario {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        let inner: pncmap::Scenario = name.parse().map_err(err)?;
        Ok(Scenario {
            inner,
            setup: inner.setup(),
        })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    /// Broadcast points of reference mapping `id` (1-based).
    fn reference_mapping(&self, id: usize) -> PyResult<Vec<i64>> {
        let map = self.inner.reference_mapping(id).map_err(err)?;
        Ok(self.points(&map))
    }

    fn model(&self, snr_db: f64) -> PyResult<Model> {
        let m = self.setup.model(snr_db).map_err(err)?;
        Ok(Model {
            snr_db,
            u: m.u.rows().into_iter().map(|r| r.to_vec()).collect(),
            d: m.d.rows().into_iter().map(|r| r.to_vec()).collect(),
            sigma1_sq: m.sigma1_sq,
            sigma2_sq: m.sigma2_sq,
        })
    }

    /// Analytic symbol error rate of the mapping given by its broadcast points.
    fn ser(&self, points: Vec<i64>, snr_db: f64) -> PyResult<f64> {
        let model = self.setup.model(snr_db).map_err(err)?;
        let obj = Candidate::symbol(self.mapping(points)?)
            .objective(&model, Criterion::Ser)
            .map_err(err)?;
        Ok(obj / rate_scale(self.inner.order(), Criterion::Ser))
    }

    /// Analytic bit error rate; `labels` is `"gray"`, `"binary"`, `"third"`
    /// or one integer label per symbol.
    #[pyo3(signature = (points, snr_db, labels=None))]
    fn ber(&self, points: Vec<i64>, snr_db: f64, labels: Option<Labels>) -> PyResult<f64> {
        let model = self.setup.model(snr_db).map_err(err)?;
        let bits = self.bits(labels)?;
        let map = self.mapping(points)?;
        let obj = ErrorProfile::new(&map, &model, bits.coupling()).ber_objective(&bits);
        Ok(obj / rate_scale(self.inner.order(), Criterion::Ber))
    }

    /// All co-optimal mappings at one SNR.
    #[pyo3(signature = (snr_db, criterion="ser", strict=false))]
    fn optimize(&self, snr_db: f64, criterion: &str, strict: bool) -> PyResult<Vec<Optimum>> {
        let crit = self::criterion(criterion)?;
        let model = self.setup.model(snr_db).map_err(err)?;
        let mut space = SearchSpace::reduced(&self.setup).map_err(err)?;
        if strict {
            space = space.strict();
        }
        let res = space.optimize(&model, crit).map_err(err)?;
        Ok(res
            .ties
            .iter()
            .map(|c| Optimum {
                points: self.points(&c.symbol),
                labels: c.bits.as_ref().map(|b| b.labels().to_vec()),
                objective: res.objective,
                rate: res.rate,
            })
            .collect())
    }

    /// Monte Carlo estimate of both error rates.
    #[pyo3(signature = (points, snr_db, trials, seed=1, labels=None))]
    fn simulate(
        &self,
        py: Python<'_>,
        points: Vec<i64>,
        snr_db: f64,
        trials: u64,
        seed: u64,
        labels: Option<Labels>,
    ) -> PyResult<Simulation> {
        let cfg = SimConfig {
            setup: self.setup.clone(),
            mapping: self.mapping(points)?,
            labels: self.bits(labels)?.labels().to_vec(),
            snr_db,
            trials,
            seed,
        };
        let r = py.detach(|| run_trials(&cfg)).map_err(err)?;
        Ok(Simulation {
            snr_db: r.snr_db,
            trials: r.trials,
            seed: r.seed,
            ser: r.ser,
            ber: r.ber,
            ser_stderr: r.ser_stderr,
            ber_stderr: r.ber_stderr,
            symbol_errors: (r.symbol_errors[0], r.symbol_errors[1]),
            bit_errors: (r.bit_errors[0], r.bit_errors[1]),
        })
    }

    /// Number of bit mappings with distinct error profiles.
    fn count_bit_mappings(&self) -> PyResult<usize> {
        Ok(distinct_bit_mappings(self.inner.order(), self.inner.coupling())
            .map_err(err)?
            .len())
    }

    /// Number of symbol-mapping equivalence classes.
    fn count_symbol_classes(&self) -> PyResult<usize> {
        Ok(enumerate_symbol_classes(self.inner.order(), self.inner.coupling())
            .map_err(err)?
            .len())
    }

    fn __repr__(&self) -> String {
        format!("Scenario('{}')", self.inner.name())
    }
}

#[pymodule]
fn pncmap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scenario>()?;
    m.add_class::<Model>()?;
    m.add_class::<Optimum>()?;
    m.add_class::<Simulation>()?;
    m.add("SCENARIOS", pncmap::Scenario::ALL.map(|s| s.name()).to_vec())?;
    Ok(())
}
