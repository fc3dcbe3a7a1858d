//! A complete two-way relay configuration: user alphabet, network code and
//! relay alphabet, with the relay-side structures precomputed.

use crate::analytic::{build_d, build_u, TransitionModel};
use crate::constellation::{
    noise_variance, superpose, DecisionRegions, ModulationKind, PamConstellation, SuperposedConstellation,
};
use crate::denoise::{build_w_groups, check_exclusive_law, Coupling, DenoiseScheme, WGroupTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSetup {
    ma: PamConstellation,
    bc: PamConstellation,
    scheme: DenoiseScheme,
    superposed: SuperposedConstellation,
    groups: WGroupTable,
    relay_regions: DecisionRegions,
    user_regions: DecisionRegions,
}

impl LinkSetup {
    /// Validates the combination: equal orders, exclusive law, a uniform
    /// relay alphabet and an unambiguous denoise map.
    pub fn new(ma: PamConstellation, bc: PamConstellation, scheme: DenoiseScheme) -> Result<Self> {
        if ma.order() != bc.order() || scheme.order() != ma.order() {
            return Err(Error::OrderMismatch {
                expected: ma.order(),
                got: if bc.order() != ma.order() {
                    bc.order()
                } else {
                    scheme.order()
                },
            });
        }
        if bc.kind() != ModulationKind::Uniform {
            return Err(Error::InvalidRelayConstellation);
        }
        if !check_exclusive_law(&scheme) {
            return Err(Error::InvalidConfig("denoise map violates the exclusive law".into()));
        }
        let superposed = superpose(&ma);
        let groups = build_w_groups(&superposed, &scheme)?;
        let relay_regions = superposed.regions();
        let user_regions = bc.regions();
        Ok(LinkSetup {
            ma,
            bc,
            scheme,
            superposed,
            groups,
            relay_regions,
            user_regions,
        })
    }

    pub fn order(&self) -> usize {
        self.ma.order()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.ma.bits_per_symbol()
    }

    pub fn ma(&self) -> &PamConstellation {
        &self.ma
    }

    pub fn bc(&self) -> &PamConstellation {
        &self.bc
    }

    pub fn scheme(&self) -> &DenoiseScheme {
        &self.scheme
    }

    /// Coupling of the network code, if it is one of the two standard codes.
    pub fn coupling(&self) -> Option<Coupling> {
        self.scheme.coupling()
    }

    pub fn superposed(&self) -> &SuperposedConstellation {
        &self.superposed
    }

    pub fn groups(&self) -> &WGroupTable {
        &self.groups
    }

    /// Decision regions of the superposed levels at the relay.
    pub fn relay_regions(&self) -> &DecisionRegions {
        &self.relay_regions
    }

    /// Decision regions of the relay alphabet at the users.
    pub fn user_regions(&self) -> &DecisionRegions {
        &self.user_regions
    }

    pub fn sigma1_sq(&self, snr_db: f64) -> f64 {
        noise_variance(&self.ma, snr_db)
    }

    pub fn sigma2_sq(&self, snr_db: f64) -> f64 {
        noise_variance(&self.bc, snr_db)
    }

    pub fn model(&self, snr_db: f64) -> Result<TransitionModel> {
        if !snr_db.is_finite() {
            return Err(Error::InvalidConfig(format!("SNR must be finite, got {snr_db}")));
        }
        let sigma1_sq = self.sigma1_sq(snr_db);
        let sigma2_sq = self.sigma2_sq(snr_db);
        Ok(TransitionModel {
            u: build_u(&self.superposed, &self.groups, sigma1_sq.sqrt())?,
            d: build_d(&self.bc, sigma2_sq.sqrt())?,
            snr_db,
            sigma1_sq,
            sigma2_sq,
        })
    }
}
