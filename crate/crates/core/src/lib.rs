//! Optimal relay symbol mappings and user bit mappings for two-way relaying
//! with physical-layer network coding over 4- and 8-PAM.
//!
//! The relay decodes the superposition of both user signals to a
//! network-code value and broadcasts it on a uniform PAM alphabet. This
//! crate computes closed-form symbol and bit error rates for every choice of
//! relay mapping, searches them exhaustively (up to equivalence), and checks
//! the results with a Monte Carlo simulation.
//!
//! ```
//! use pncmap::{Criterion, Scenario, SearchSpace};
//!
//! let setup = Scenario::Uniform4.setup();
//! let model = setup.model(10.0).unwrap();
//! let mut space = SearchSpace::reduced(&setup).unwrap();
//! let best = space.optimize(&model, Criterion::Ser).unwrap();
//! assert_eq!(best.best().symbol.assignment(), &[0, 1, 2, 3]);
//! ```

pub mod analytic;
pub mod constellation;
pub mod denoise;
pub mod error;
pub mod link;
pub mod scenario;
pub mod search;
pub mod simulator;

pub use analytic::{
    ber_objective, build_d, build_u, gaussian_interval_prob, ser_objective, SymbolMapping, TransitionModel,
};
pub use constellation::{
    make_pam, noise_variance, superpose, DecisionRegions, ModulationKind, PamConstellation, SuperposedConstellation,
};
pub use denoise::{
    build_w_groups, check_exclusive_law, denoise_mod, denoise_xor, Coupling, DenoiseScheme, WGroupTable,
};
pub use error::{Error, Result};
pub use link::LinkSetup;
pub use scenario::{NamedLabels, Scenario};
pub use search::{BitMapping, Candidate, Criterion, EquivalenceClass, SearchResult, SearchSpace};
pub use simulator::{run_trials, sweep_sim, SimConfig, SimResult};
