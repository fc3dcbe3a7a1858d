//! Monte Carlo simulation of the two-phase exchange.
//!
//! Trials are split into fixed-size batches. Batch `k` draws from a ChaCha8
//! generator seeded with the run seed on stream `k`, so the tallies do not
//! depend on how batches are spread over threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::SymbolMapping;
use crate::error::{Error, Result};
use crate::link::LinkSetup;
use crate::search::bitmap::validate_labels;

/// Trials per RNG stream.
pub const BATCH_TRIALS: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub setup: LinkSetup,
    pub mapping: SymbolMapping,
    /// `labels[s]` is the bit label of user symbol `s`.
    pub labels: Vec<usize>,
    pub snr_db: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let q = self.setup.order();
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trial count must be at least 1".into()));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::InvalidConfig(format!("SNR must be finite, got {}", self.snr_db)));
        }
        if self.mapping.order() != q {
            return Err(Error::OrderMismatch {
                expected: q,
                got: self.mapping.order(),
            });
        }
        if self.labels.len() != q {
            return Err(Error::OrderMismatch {
                expected: q,
                got: self.labels.len(),
            });
        }
        validate_labels(&self.labels)
    }
}

/// Error tallies of one run. User 1 decodes `S2`, user 2 decodes `S1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub snr_db: f64,
    pub trials: u64,
    pub seed: u64,
    pub symbol_errors: [u64; 2],
    pub bit_errors: [u64; 2],
    /// Sum over trials of (symbol errors in the trial)^2, both users combined.
    pub symbol_sq_sum: u64,
    /// Sum over trials of (bit errors in the trial)^2, both users combined.
    pub bit_sq_sum: u64,
    pub ser: f64,
    pub ber: f64,
    pub ser_stderr: f64,
    pub ber_stderr: f64,
}

impl SimResult {
    fn from_tally(cfg: &SimConfig, t: Tally) -> Self {
        let n = cfg.trials as f64;
        let k = cfg.setup.bits_per_symbol() as f64;
        let ser = (t.symbol_errors[0] + t.symbol_errors[1]) as f64 / (2.0 * n);
        let ber = (t.bit_errors[0] + t.bit_errors[1]) as f64 / (2.0 * k * n);
        SimResult {
            snr_db: cfg.snr_db,
            trials: cfg.trials,
            seed: cfg.seed,
            symbol_errors: t.symbol_errors,
            bit_errors: t.bit_errors,
            symbol_sq_sum: t.symbol_sq_sum,
            bit_sq_sum: t.bit_sq_sum,
            ser,
            ber,
            ser_stderr: mean_stderr(ser, t.symbol_sq_sum as f64 / (4.0 * n), cfg.trials),
            ber_stderr: mean_stderr(ber, t.bit_sq_sum as f64 / (4.0 * k * k * n), cfg.trials),
        }
    }

    pub fn user_ser(&self, user: usize) -> f64 {
        self.symbol_errors[user] as f64 / self.trials as f64
    }

    pub fn user_ber(&self, user: usize, bits_per_symbol: usize) -> f64 {
        self.bit_errors[user] as f64 / (self.trials * bits_per_symbol as u64) as f64
    }

    /// `sqrt(p (1 - p) / M)` over the `M = 2 N` symbol decisions, treating
    /// them as independent.
    pub fn ser_stderr_binomial(&self) -> f64 {
        (self.ser * (1.0 - self.ser) / (2 * self.trials) as f64).sqrt()
    }

    pub fn ber_stderr_binomial(&self, bits_per_symbol: usize) -> f64 {
        let m = (2 * self.trials * bits_per_symbol as u64) as f64;
        (self.ber * (1.0 - self.ber) / m).sqrt()
    }
}

/// Standard error of a sample mean from its first two moments.
fn mean_stderr(mean: f64, mean_sq: f64, n: u64) -> f64 {
    if n < 2 {
        return f64::NAN;
    }
    let n = n as f64;
    let var = ((mean_sq - mean * mean) * n / (n - 1.0)).max(0.0);
    (var / n).sqrt()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    symbol_errors: [u64; 2],
    bit_errors: [u64; 2],
    symbol_sq_sum: u64,
    bit_sq_sum: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        for u in 0..2 {
            self.symbol_errors[u] += o.symbol_errors[u];
            self.bit_errors[u] += o.bit_errors[u];
        }
        self.symbol_sq_sum += o.symbol_sq_sum;
        self.bit_sq_sum += o.bit_sq_sum;
        self
    }
}

/// Relay decision: the network-code value of the nearest superposed level.
pub fn detect_relay(setup: &LinkSetup, y: f64) -> usize {
    let level = setup.relay_regions().decide(y);
    setup.groups().value_of_level(level)
}

/// Relay decision by minimizing `|y - M(s1) - M(s2)|` over all ordered pairs.
/// Ties go to the pair with the smaller superposed level.
pub fn detect_relay_pairwise(setup: &LinkSetup, y: f64) -> usize {
    let ma = setup.ma();
    let q = setup.order();
    let mut best = (f64::INFINITY, i64::MAX, 0);
    for s1 in 0..q {
        for s2 in 0..q {
            let level = ma.point(s1) + ma.point(s2);
            let dist = (y - level as f64).abs();
            if dist < best.0 || (dist == best.0 && level < best.1) {
                best = (dist, level, setup.scheme().code(s1, s2));
            }
        }
    }
    best.2
}

/// User decision on the partner symbol: nearest relay point, mapped back to
/// a code value and inverted with the user's own symbol. `user` is 0 when
/// the own symbol is the first code argument.
pub fn decode_partner(setup: &LinkSetup, inverse: &[usize], user: usize, own: usize, y: f64) -> usize {
    let u = inverse[setup.user_regions().decide(y)];
    let partner = if user == 0 {
        setup.scheme().solve_partner(own, u)
    } else {
        setup.scheme().solve_first(own, u)
    };
    partner.expect("exclusive law holds for validated setups")
}

/// User decision by minimizing `|y - W_{C(own, s)}|` over the partner symbol.
/// Ties go to the candidate with the smaller relay point.
pub fn decode_partner_argmin(setup: &LinkSetup, mapping: &SymbolMapping, user: usize, own: usize, y: f64) -> usize {
    let bc = setup.bc();
    let mut best = (f64::INFINITY, i64::MAX, 0);
    for s in 0..setup.order() {
        let u = if user == 0 {
            setup.scheme().code(own, s)
        } else {
            setup.scheme().code(s, own)
        };
        let point = bc.point(mapping.apply(u));
        let dist = (y - point as f64).abs();
        if dist < best.0 || (dist == best.0 && point < best.1) {
            best = (dist, point, s);
        }
    }
    best.2
}

fn run_batch(cfg: &SimConfig, inverse: &[usize], batch: u64, count: u64) -> Tally {
    let setup = &cfg.setup;
    let q = setup.order();
    let (ma, bc) = (setup.ma(), setup.bc());
    let sigma1 = setup.sigma1_sq(cfg.snr_db).sqrt();
    let sigma2 = setup.sigma2_sq(cfg.snr_db).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(batch);
    let mut t = Tally::default();
    for _ in 0..count {
        let s = [rng.random_range(0..q), rng.random_range(0..q)];
        let n_r: f64 = rng.sample(StandardNormal);
        let y_r = (ma.point(s[0]) + ma.point(s[1])) as f64 + sigma1 * n_r;
        let x = bc.point(cfg.mapping.apply(detect_relay(setup, y_r))) as f64;
        let (mut sym, mut bits) = (0u64, 0u64);
        for user in 0..2 {
            let n_u: f64 = rng.sample(StandardNormal);
            let decided = decode_partner(setup, inverse, user, s[user], x + sigma2 * n_u);
            let truth = s[1 - user];
            if decided != truth {
                let d = (cfg.labels[decided] ^ cfg.labels[truth]).count_ones() as u64;
                t.symbol_errors[user] += 1;
                t.bit_errors[user] += d;
                sym += 1;
                bits += d;
            }
        }
        t.symbol_sq_sum += sym * sym;
        t.bit_sq_sum += bits * bits;
    }
    t
}

fn run_batches(cfg: &SimConfig) -> Tally {
    let inverse = cfg.mapping.inverse();
    let batches = cfg.trials.div_ceil(BATCH_TRIALS);
    let tallies: Vec<Tally> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH_TRIALS.min(cfg.trials - b * BATCH_TRIALS);
            run_batch(cfg, &inverse, b, count)
        })
        .collect();
    tallies.into_iter().fold(Tally::default(), Tally::merge)
}

/// Runs `cfg.trials` independent exchanges on the global thread pool.
pub fn run_trials(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    Ok(SimResult::from_tally(cfg, run_batches(cfg)))
}

/// As [`run_trials`], on a dedicated pool of `threads` workers.
pub fn run_trials_with_threads(cfg: &SimConfig, threads: usize) -> Result<SimResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?;
    Ok(SimResult::from_tally(cfg, pool.install(|| run_batches(cfg))))
}

/// Seed for grid point `index` of a sweep started from `seed`.
pub fn derive_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX - index as u64);
    rng.next_u64()
}

/// One simulation per grid point, each with `trials` trials and a seed
/// derived from the template seed and the point index.
pub fn sweep_sim(template: &SimConfig, grid: &[f64], trials: u64) -> Result<Vec<SimResult>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty SNR grid".into()));
    }
    grid.iter()
        .enumerate()
        .map(|(i, &snr_db)| {
            let cfg = SimConfig {
                snr_db,
                trials,
                seed: derive_seed(template.seed, i),
                ..template.clone()
            };
            run_trials(&cfg)
        })
        .collect()
}
