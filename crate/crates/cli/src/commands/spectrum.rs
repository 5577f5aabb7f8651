use gnch::spectral::{drift_fit, SpectralError};

use crate::grid::float_grid;
use crate::output::write_output;
use crate::system::build_f64;
use crate::{CliError, SpectrumArgs};

pub fn run(args: &SpectrumArgs) -> Result<i32, CliError> {
    let sys = build_f64(&args.system)?;
    let times = float_grid(&args.times)?;

    let report = match drift_fit(&sys, &times) {
        Ok(report) => report,
        Err(err @ (SpectralError::BranchCrossing { .. } | SpectralError::InvalidConfig(_))) => {
            return Err(CliError::Degenerate(err.to_string()));
        }
        Err(err) => return Err(CliError::usage(err.to_string())),
    };

    write_output(
        args.out.as_deref(),
        &format!("{}\n", serde_json::to_string_pretty(&report).expect("serializable")),
    )?;

    let worst = report
        .branches
        .iter()
        .map(|b| (b.slope - report.expected_slope).abs())
        .fold(0.0, f64::max);
    if worst <= args.tol {
        Ok(0)
    } else {
        eprintln!(
            "slope deviation {worst:.3e} from expected {} exceeds tolerance {:.3e}",
            report.expected_slope, args.tol
        );
        Ok(2)
    }
}
