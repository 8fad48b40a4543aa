//! Benchmark harness for sampling strategies on imbalanced prognosis data.
//!
//! The pipeline runs fixed-width record parsing ([`parser`]), outcome recodes
//! and feature filtering ([`preprocess`]), random / stratified / balanced
//! stratified sampling ([`sampler`]), three classifiers ([`classifiers`]),
//! and an accuracy-versus-sample-size experiment grid ([`evaluator`]), with
//! a synthetic data generator ([`synthgen`]) standing in for registry
//! extracts and table-shaped reporting ([`report`]).

pub mod classifiers;
pub mod config;
pub mod dataset;
pub mod error;
pub mod evaluator;
pub mod io;
pub mod parser;
pub mod preprocess;
pub mod report;
pub mod rng;
pub mod sampler;
pub mod synthgen;

pub use dataset::{Cell, Column, Dataset, Kind};
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/records.md")]
    mod records {}
    #[doc = include_str!("../../../book/src/preprocessing.md")]
    mod preprocessing {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/classifiers.md")]
    mod classifiers {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    mod synthetic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
