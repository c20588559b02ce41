//! Coded-modulation simulation toolkit.
//!
//! Two concatenated multilevel-coding chains are modelled end to end over an
//! AWGN channel: probabilistic amplitude shaping (CCDM or ESS over PAM/QAM)
//! and multidimensional Voronoi constellations carved from the Leech lattice.
//! Both share an inner DVB-S2 LDPC decoder and are compared at a fixed
//! pre-hard-decision-FEC bit error rate.

pub mod chains;
pub mod channel;
pub mod error;
pub mod fec;
pub mod harness;
pub mod lattice;
pub mod mapping;
pub mod shaping;
pub mod voronoi;

pub use error::{Error, Result};
