use gnch::moments::{MomentSystem, Preset, SpectralMode};
use gnch::peakon::peakon_state;

use super::{parse_format, OutputFormat};
use crate::grid::float_grid;
use crate::output::write_output;
use crate::{CliError, FigureArgs};

const DEFAULT_GRID: &str = "-6:6:1201";

/// The two bundled examples: a single peak turning from antipeakon to peakon,
/// and a pair with opposite spectral constants.
fn figure_setup(fig: u32) -> Result<(MomentSystem<f64>, Vec<f64>), CliError> {
    match fig {
        1 => Ok((
            MomentSystem::new(Preset::Mixed.params(), vec![SpectralMode::new(1.0, 0.0)])
                .expect("valid preset system"),
            vec![-0.5, 0.0, 0.5, 1.0],
        )),
        2 => Ok((
            MomentSystem::new(
                Preset::Mixed.params(),
                vec![SpectralMode::new(1.0, 0.0), SpectralMode::new(-1.0, 0.0)],
            )
            .expect("valid preset system"),
            vec![-0.5, -0.125, 0.125, 0.5],
        )),
        other => Err(CliError::usage(format!("figure id must be 1 or 2, got {other}"))),
    }
}

/// Grid values plus the peak locations, sorted and deduplicated, so the
/// sampled profile contains the exact cusp points.
pub fn augmented_grid(grid: &[f64], peaks: &[f64]) -> Vec<f64> {
    let mut xs: Vec<f64> = grid.iter().chain(peaks.iter()).copied().collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs
}

pub fn run(args: &FigureArgs) -> Result<i32, CliError> {
    let format = parse_format(&args.format)?;
    let (sys, frames) = figure_setup(args.fig)?;
    let grid = float_grid(args.grid.as_deref().unwrap_or(DEFAULT_GRID))?;

    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for &t in &frames {
        let st = peakon_state(&sys, t);
        if !st.valid {
            return Err(CliError::Degenerate(format!(
                "figure frame t = {t} is degenerate: {}",
                st.reason.unwrap_or_default()
            )));
        }
        for x in augmented_grid(&grid, &st.x) {
            rows.push((t, x, st.eval_u(x)));
        }
    }

    let content = match format {
        OutputFormat::Csv => {
            let mut out = String::from("t,x,u\n");
            for (t, x, u) in &rows {
                out.push_str(&format!("{t},{x},{u}\n"));
            }
            out
        }
        OutputFormat::Json => {
            let arr: Vec<serde_json::Value> = rows
                .iter()
                .map(|(t, x, u)| serde_json::json!({"t": t, "x": x, "u": u}))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&arr).expect("serializable"))
        }
    };
    write_output(args.out.as_deref(), &content)?;
    Ok(0)
}
