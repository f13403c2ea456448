//! Shared fixtures for the benchmarks.

use amalgam_core::corpus::load;
use amalgam_core::FundamentalGroup;

pub fn group(name: &str) -> FundamentalGroup {
    FundamentalGroup::new(load(name), 0).expect("corpus entries are connected")
}
