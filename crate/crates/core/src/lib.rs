//! Greedy two-tier decision trees and detection of features that interfere
//! with complementary feature pairs.

pub mod crossval;
pub mod data;
pub mod error;
pub mod exec;
pub mod interference;
pub mod report;
pub mod scoring;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};
