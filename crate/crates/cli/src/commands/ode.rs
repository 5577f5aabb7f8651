use gnch::dynamics::{compare_closed_form, DynamicsError, OdeSettings};

use crate::grid::float_window;
use crate::output::write_output;
use crate::system::build_f64;
use crate::{CliError, OdeArgs};

pub fn run(args: &OdeArgs) -> Result<i32, CliError> {
    let sys = build_f64(&args.system)?;
    let (t0, t1) = float_window(&args.times)?;
    if args.steps < 1 {
        return Err(CliError::usage("--steps must be at least 1"));
    }
    let settings = OdeSettings::new(t0, t1, args.steps);

    let report = match compare_closed_form(&sys, &settings) {
        Ok(report) => report,
        Err(err @ DynamicsError::TurningPoint { .. }) => {
            return Err(CliError::Degenerate(err.to_string()));
        }
        Err(err) => return Err(CliError::usage(err.to_string())),
    };

    write_output(
        args.out.as_deref(),
        &format!("{}\n", serde_json::to_string_pretty(&report).expect("serializable")),
    )?;

    let worst = report.max_dev_x.max(report.max_dev_m);
    if worst <= args.tol {
        Ok(0)
    } else {
        eprintln!(
            "max deviation {worst:.3e} exceeds tolerance {:.3e} over [{t0}, {t1}]",
            args.tol
        );
        Ok(2)
    }
}
