//! File formats: JSON model files, delimiter-separated samples, and the
//! JSON run report.

pub mod model_file;
pub mod report;
pub mod sample;

pub use model_file::{load_model, parse_model, LoadedModel, Task};
pub use report::RunReport;
pub use sample::{load_sample, parse_instance, parse_sample};
