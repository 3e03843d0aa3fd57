//! Laplacian spectra of compact metric graphs with standard vertex
//! conditions, and a greedy spectrum-driven graph evolution engine.

pub mod error;
pub mod fixtures;
pub mod graph;
pub mod rational;
pub mod secular;

pub use error::{Error, Result};
pub use graph::{Edge, LengthExpr, MetricGraph, Param, ParameterBinding, Violation};
pub use rational::{rational_structure, RationalStructure};
pub use secular::SecularEvaluator;
pub mod spectrum;
pub use spectrum::{Root, RootSearchOptions, Spectrum, SpectrumMode};
pub mod evolution;
pub mod export;
pub mod goals;
pub mod io;

pub use evolution::{run, MovePolicy, RunConfig, RunLog};
pub use goals::{Goal, TargetSpectrum};
