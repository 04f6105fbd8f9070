//! Natural homology of finite loop-free precubical sets, computed as a
//! persistence object over the trace poset.

pub mod bisim;
pub mod cli;
pub mod colimit;
pub mod diagram;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod homology;
pub mod matrix;
pub mod natural;
pub mod persistence;
pub mod poset;
pub mod precubical;
pub mod traceposet;
pub mod tracespace;

pub use error::{Error, Result};
pub use field::{Field, Q};
pub use matrix::Matrix;
pub use precubical::PrecubicalSet;
pub use tracespace::{EdgePath, TraceComplex};
