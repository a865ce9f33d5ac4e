//! Speech emotion recognition toolkit.
//!
//! The pipeline runs scan, augment, extract, split, train and evaluate over
//! the CREMA-D, RAVDESS, SAVEE and TESS corpora (or the bundled synthetic
//! corpus), with every stochastic step driven by explicit seeds.

pub mod audio_io;
pub mod augment;
pub mod dataset;
pub mod dsp;
pub mod experiment;
pub mod matrix;
pub mod nn;
pub mod rng;
pub mod viz;
