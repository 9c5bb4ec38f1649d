//! HTTP/SSE transport and replay CLI around the blendvis engine.

pub mod api;
pub mod cli;
pub mod error;
pub mod state;

pub use api::router;
pub use error::ApiError;
pub use state::{AppState, Event};
