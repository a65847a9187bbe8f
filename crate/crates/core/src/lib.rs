pub mod dataset;
pub mod harness;
pub mod network;
pub mod optimizers;
pub mod stats;
