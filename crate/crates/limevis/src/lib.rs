//! Dataset IO, external model transports, analysis sessions and the HTTP
//! service of the limevis workbench. Algorithms live in `limevis-core`.

pub mod dataset;
pub mod error;
pub mod export;
pub mod external;
pub mod formats;
pub mod handle;
pub mod responder;
pub mod server;
pub mod session;
pub mod wire;

pub use error::{LimevisError, Result};
pub use handle::{FeatureSource, PredictorHandle};
pub use limevis_core as core;
