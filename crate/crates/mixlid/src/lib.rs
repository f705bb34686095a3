//! IO, file formats, parameter sweeps and the command line for
//! [`mixlid_core`].

pub mod cli;
mod error;
pub mod model_file;
pub mod report;
pub mod sweep;
pub mod synth_spec;
pub mod tsv;

pub use crate::error::{Error, Result};
pub use crate::model_file::{load_model, save_heli, save_ngram, LoadedModel};
pub use crate::sweep::{sweep, SweepMethod, SweepRow};
pub use crate::tsv::{load_tsv, parse_tsv, Mode};
