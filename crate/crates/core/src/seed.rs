//! Deterministic seed derivation.
//!
//! Every random stream in a run is derived from one master seed:
//! `derive(master, stream, index) = mix(mix(master ^ mix(stream)) ^ mix(index))`
//! where `mix` is the splitmix64 finalizer. Streams are named by the constants
//! below, and `index` is a replicate number, grid position or similar counter,
//! so results never depend on scheduling order.

pub const STREAM_REPLICATE: u64 = 1;
pub const STREAM_TRAIN_DATA: u64 = 2;
pub const STREAM_TEST_DATA: u64 = 3;
pub const STREAM_SPLIT: u64 = 4;
pub const STREAM_INIT: u64 = 5;
pub const STREAM_COVARIATES: u64 = 6;
pub const STREAM_OUTCOME: u64 = 7;
pub const STREAM_ORACLE: u64 = 8;

/// The splitmix64 output function.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(master: u64, stream: u64, index: u64) -> u64 {
    mix(mix(master ^ mix(stream)) ^ mix(index))
}
