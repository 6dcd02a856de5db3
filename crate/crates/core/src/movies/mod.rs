//! Window movies: glue events a path places across a separating window, and
//! the pumping and breaking arguments built on repeated movies.

pub mod bounds;
pub mod cagefree;
pub mod diet;
pub mod movie;
pub mod window;
pub mod wml;

use thiserror::Error;

use crate::geom::BBox;

pub use bounds::{all_bounds, bound, BoundParams, BoundReport, BOUND_NAMES};
pub use cagefree::cagefree_separators;
pub use diet::{diet_check, DietConfig, DietOutcome};
pub use movie::{movies_equal_upto, record_movie, Event, Movie};
pub use window::{Window, WindowKind};
pub use wml::{wml_pump, NotApplicable, WmlOutcome};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MovieError {
    #[error("window clip {clip:?} does not cover the assembly's bounding box {needed:?}")]
    WindowClip { clip: BBox, needed: BBox },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("unknown bound {0:?}")]
    UnknownBound(String),
    #[error("missing parameter {param:?} for bound {name:?}")]
    MissingParameter { name: String, param: &'static str },
    #[error("bound {name:?} is too large to evaluate ({reason})")]
    TooLarge { name: String, reason: String },
}
