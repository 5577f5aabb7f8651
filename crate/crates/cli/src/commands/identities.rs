use gnch::hankel::battery::{run_battery, BatteryConfig};

use super::{parse_mode, ScalarMode};
use crate::output::write_output;
use crate::{CliError, IdentitiesArgs};

pub fn run(args: &IdentitiesArgs) -> Result<i32, CliError> {
    if parse_mode(&args.mode)? != ScalarMode::Exact {
        return Err(CliError::usage("the identity battery runs in exact mode only"));
    }
    let cfg = BatteryConfig {
        trials: args.trials,
        max_n: args.max_n,
        seed: args.seed,
        corrupt: args.corrupt,
    };
    let report = run_battery(&cfg);

    println!("identity battery: {} trials, seed {}", report.trials, report.seed);
    for count in &report.counts {
        println!("  {:16} {:6} pass  {:3} fail", count.name, count.passes, count.failures);
    }

    if let Some(path) = &args.out {
        write_output(
            Some(path),
            &format!(
                "{}\n",
                serde_json::to_string_pretty(&report.to_json()).expect("serializable")
            ),
        )?;
    }

    if report.all_passed() {
        println!("all residuals exactly zero");
        Ok(0)
    } else {
        let failure = report
            .first_failure
            .as_ref()
            .map(|f| {
                serde_json::json!({
                    "identity": f.identity,
                    "k": f.k,
                    "l": f.l,
                    "residual": f.residual,
                    "elements": f.elements,
                })
                .to_string()
            })
            .unwrap_or_else(|| "unknown".into());
        Err(CliError::Identity(format!("nonzero residual: {failure}")))
    }
}
