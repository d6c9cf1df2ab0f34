//! Solution files, the bundled examples, reports and the `oae` command line.

pub mod bundled;
pub mod commands;
pub mod format;
pub mod load;
pub mod report;
pub mod sampling;

pub use commands::{run, Outcome};
pub use format::{parse_seeds, parse_solution, write_solution, FormatError, Kind, Solution};
pub use load::{load_solution, read_solution, LoadError, SolutionBundle};
pub use report::{Record, Report, Verdict};
