//! File formats, SVG rendering and the command-line front end for
//! `peelkit-core`.

pub mod cli;
pub mod format;
pub mod svg;
