use std::fs;

use anyhow::{bail, Context, Result};
use umda_core::verify::{run_verification, SweepOptions};

use crate::{clock_seed, EXIT_FAILED, VerifyArgs};

pub fn verify(args: &VerifyArgs) -> Result<u8> {
    if args.seed.is_none() && args.strict {
        bail!("--strict requires --seed");
    }
    let opts = SweepOptions {
        cases: args.cases,
        k_max: args.k_max,
        seed: args.seed.unwrap_or_else(clock_seed),
        n_max: args.n_max,
        p_min: args.p_min,
        dstar: args.dstar,
    };
    let report = run_verification(args.check, &opts)?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    print!("{text}");
    if let Some(path) = &args.out {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    if report.passed() {
        Ok(0)
    } else {
        eprintln!(
            "{}: {} of {} cases violated the bound",
            args.check, report.violations, report.cases
        );
        Ok(EXIT_FAILED)
    }
}
