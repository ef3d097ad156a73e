//! Hyperdimensional graph classification.
//!
//! - [`vsa`]: hypervectors and the bind / bundle / permute / similarity
//!   primitives for the MAP, FHRR and VTB architectures.
//! - [`graph`]: graphs, TUDataset parsing and fetching, stratified splits.
//! - [`encode`]: star-subgraph, Gayler & Levy and GraphHD encoders.
//! - [`learner`]: associative memories trained with Add, AdaptHD, OnlineHD
//!   or RefineHD updates.
//! - [`eval`]: AUC, repeated experiments, sweeps and reports.
//! - [`synth`]: synthetic labelled graph datasets.

pub mod encode;
pub mod eval;
pub mod graph;
pub mod learner;
pub mod synth;
pub mod vsa;
