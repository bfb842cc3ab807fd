//! Monte-Carlo harness, JSON file formats and command-line front end for
//! [`trapkit_core`].

#![forbid(unsafe_code)]

pub mod cli;
pub mod harness;
pub mod io;
