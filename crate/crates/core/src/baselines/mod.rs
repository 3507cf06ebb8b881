//! Reference algorithms: magnetic mirror descent (KL and Euclidean) and CFR / CFR+.

mod cfr;
mod mmd;

pub use cfr::{cfr_iteration, RegretState};
pub use mmd::{
    magnet_update, mmd_eu_step, mmd_kl_step, mmd_update, mmd_update_players, MmdConfig, MmdState,
    MmdVariant,
};
