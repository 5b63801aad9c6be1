//! Experiment runner: configuration, the six experiment families, reports,
//! traces and the spectral cache.

pub mod cache;
pub mod config;
mod families;
pub mod report;

use std::path::{Path, PathBuf};
use std::str::FromStr;

pub use cache::{
    cache_spectrum, load_spectrum, spectrum_with_cache, CacheStatus, CachedSpectrum, SpectrumKey,
};
pub use config::{parse_list, ExperimentConfig, Overrides};
pub use families::{left_sample, right_sample};
pub use report::{CheckRecord, Comparison, RunReport, TraceTable};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Ergodic,
    Clustering,
    Smatrix,
    Deform,
    WarpOracle,
    ModularDemo,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Ergodic,
        Family::Clustering,
        Family::Smatrix,
        Family::Deform,
        Family::WarpOracle,
        Family::ModularDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Ergodic => "ergodic",
            Family::Clustering => "clustering",
            Family::Smatrix => "smatrix",
            Family::Deform => "deform",
            Family::WarpOracle => "warp-oracle",
            Family::ModularDemo => "modular-demo",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config {
                path: "family".into(),
                reason: format!("unknown family `{s}`"),
            })
    }
}

/// Prefixes numerical failures with the family that raised them.
fn in_context(family: Family, e: Error) -> Error {
    match e {
        Error::NonConvergence(msg) => Error::NonConvergence(format!("{family}: {msg}")),
        Error::Construction(msg) => Error::Construction(format!("{family}: {msg}")),
        other => other,
    }
}

/// Runs one family in memory. Nothing is written.
pub fn run_experiment(config: &ExperimentConfig, family: Family) -> Result<RunReport> {
    config.validate()?;
    let mut report = RunReport::new(family.name(), config.content_hash(), config.seed);
    let run = |report: &mut RunReport| -> Result<()> {
        if family == Family::ModularDemo {
            return families::modular_demo(config, report);
        }
        let net = families::build_net(config)?;
        match family {
            Family::Ergodic => families::ergodic(config, &net, report),
            Family::Clustering => families::clustering(config, &net, report),
            Family::Smatrix => families::smatrix(config, &net, report),
            Family::Deform => families::deform(config, &net, report),
            Family::WarpOracle => families::warp_oracle(config, &net, report),
            Family::ModularDemo => unreachable!(),
        }
    };
    run(&mut report).map_err(|e| in_context(family, e))?;
    Ok(report)
}

/// Outcome of [`run_to_dir`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub files: Vec<PathBuf>,
    pub cache: Option<CacheStatus>,
}

/// Runs one family and writes `report.json`, `trace_*.csv` and `cache/` under `out`.
pub fn run_to_dir(config: &ExperimentConfig, family: Family, out: &Path) -> Result<RunOutput> {
    config.validate()?;
    let cache = if family == Family::ModularDemo {
        None
    } else {
        let net = families::build_net(config)?;
        let (_, status) = spectrum_with_cache(&net, &out.join("cache"))?;
        log::info!("spectral cache: {status:?}");
        Some(status)
    };
    let report = run_experiment(config, family)?;
    let files = report.write(out)?;
    Ok(RunOutput {
        report,
        files,
        cache,
    })
}
