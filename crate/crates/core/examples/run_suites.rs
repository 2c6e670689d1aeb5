//! Runs every suite for a config file and writes the reports.
//!
//!     cargo run --example run_suites -- configs/trace.json /tmp/out

use std::path::PathBuf;

use nuclear_trace::harness::suites::{run_and_write, SuiteKind};
use nuclear_trace::harness::{with_thread_cap, ExperimentConfig};

fn main() -> nuclear_trace::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = ExperimentConfig::load(args.next().unwrap_or_else(|| "configs/trace.json".into()))?;
    let dir = args.next().map_or_else(|| config.out_dir.clone(), PathBuf::from);
    with_thread_cap(|| {
        for kind in SuiteKind::ALL {
            let (summary, _) = run_and_write(kind, &config, &dir)?;
            println!("{summary}");
        }
        println!("reports in {}", dir.display());
        Ok(())
    })?
}
