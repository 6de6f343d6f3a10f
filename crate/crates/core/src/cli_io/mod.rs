//! Scenario files, benchmark presets and result emission.

pub mod bench;
pub mod presets;
pub mod report;
pub mod scenario;

pub use bench::{run_benchmark, BenchReport, Metric};
pub use presets::{preset, Overrides, PresetInfo, PRESETS};
pub use report::{run_to_dir, RunSummary};
pub use scenario::{parse_scenario, Scenario};
