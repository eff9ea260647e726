pub mod bayes_lm;
pub mod boundary;
pub mod cli;
pub mod dataset;
pub mod designgen;
pub mod error;
pub mod optimizer;
pub mod polybasis;
pub mod rng;
pub mod svg;
pub mod synth;
