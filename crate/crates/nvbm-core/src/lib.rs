//! Turns virtual-platform transaction logs of an NVDLA-style accelerator into
//! bare-metal RV32I programs and DRAM preload images, and provides a
//! functional SoC model (CPU, bus decoder, arbiter, DRAM, scripted register
//! device) to execute the generated code and verify replay equivalence
//! against the original trace.

pub mod config;
pub mod rv32;
pub mod sim;
pub mod trace;
pub mod weights;
