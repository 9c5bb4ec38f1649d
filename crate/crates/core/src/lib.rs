//! Engine for blended authoring of charts: a single visualization spec shared
//! by menu-driven operations and by demonstration on the rendered view.

pub mod color;
pub mod data;
pub mod error;
pub mod exec;
pub mod intent;
pub mod recommend;
pub mod script;
pub mod session;
pub mod spec;
pub mod sync;

pub use error::{Error, ErrorClass, Result};
pub use exec::Execution;
pub use session::{Commit, Session, SessionConfig, SessionSnapshot};
