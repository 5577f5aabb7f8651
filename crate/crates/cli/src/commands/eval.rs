use gnch::peakon::{exact_peakon, peakon_state, PeakonState};

use super::{parse_format, parse_mode, OutputFormat, ScalarMode};
use crate::grid::{float_grid, rational_grid};
use crate::output::{profile_path, write_output};
use crate::system::{build_exact, build_f64};
use crate::{CliError, EvalArgs};

/// One evaluated row, with presentation-ready cells (exact amplitudes keep
/// their p/q form).
struct Row {
    t: String,
    state: PeakonState,
    m_cells: Vec<String>,
}

pub fn run(args: &EvalArgs) -> Result<i32, CliError> {
    if let Some(fig) = args.fig {
        let fig_args = crate::FigureArgs {
            fig,
            grid: args.grid.clone(),
            out: args.out.clone(),
            format: args.format.clone(),
        };
        return super::figure::run(&fig_args);
    }
    let times_spec = args
        .times
        .as_ref()
        .ok_or_else(|| CliError::usage("--times t0:t1:n is required (or use --fig)"))?;
    let mode = parse_mode(&args.mode)?;
    let format = parse_format(&args.format)?;

    let (n, rows) = match mode {
        ScalarMode::Float => {
            let sys = build_f64(&args.system)?;
            let rows = float_grid(times_spec)?
                .into_iter()
                .map(|t| {
                    let st = peakon_state(&sys, t);
                    let m_cells = st.m.iter().map(|m| m.to_string()).collect();
                    Row { t: t.to_string(), state: st, m_cells }
                })
                .collect::<Vec<_>>();
            (sys.n_peakons(), rows)
        }
        ScalarMode::Exact => {
            let sys = build_exact(&args.system)?;
            let rows = rational_grid(times_spec)?
                .into_iter()
                .map(|t| {
                    let data = exact_peakon(&sys, &t);
                    let m_cells = data.m.iter().map(|m| m.to_string()).collect();
                    Row { t: t.to_string(), state: data.to_state(), m_cells }
                })
                .collect::<Vec<_>>();
            (sys.n_peakons(), rows)
        }
    };

    let any_invalid = rows.iter().any(|r| !r.state.valid);
    let profile = match &args.grid {
        Some(spec) => Some(profile_rows(&rows, &float_grid(spec)?)),
        None => None,
    };

    match format {
        OutputFormat::Csv => {
            write_output(args.out.as_deref(), &state_csv(n, &rows))?;
            if let Some(profile) = profile {
                let content = profile_csv(&profile);
                match &args.out {
                    Some(path) => write_output(Some(&profile_path(path)), &content)?,
                    None => write_output(None, &format!("\n{content}"))?,
                }
            }
        }
        OutputFormat::Json => {
            let states: Vec<serde_json::Value> = rows.iter().map(row_json).collect();
            let doc = match profile {
                Some(profile) => serde_json::json!({
                    "states": states,
                    "profile": profile.iter().map(|(t, x, u)| {
                        serde_json::json!({"t": t, "x": x, "u": u})
                    }).collect::<Vec<_>>(),
                }),
                None => serde_json::json!({ "states": states }),
            };
            write_output(
                args.out.as_deref(),
                &format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable")),
            )?;
        }
    }

    if any_invalid {
        eprintln!("note: some sampled times are degenerate (valid=0 rows)");
        Ok(2)
    } else {
        Ok(0)
    }
}

fn state_csv(n: usize, rows: &[Row]) -> String {
    let mut out = String::from("t");
    for j in 1..=n {
        out.push_str(&format!(",x{j}"));
    }
    for j in 1..=n {
        out.push_str(&format!(",m{j}"));
    }
    out.push_str(",valid\n");
    for row in rows {
        out.push_str(&row.t);
        if row.state.valid {
            for x in &row.state.x {
                out.push(',');
                out.push_str(&x.to_string());
            }
            for m in &row.m_cells {
                out.push(',');
                out.push_str(m);
            }
            out.push_str(",1\n");
        } else {
            for _ in 0..2 * n {
                out.push_str(",nan");
            }
            out.push_str(",0\n");
        }
    }
    out
}

fn row_json(row: &Row) -> serde_json::Value {
    serde_json::json!({
        "t": row.t,
        "x": row.state.x,
        "m": row.m_cells,
        "valid": row.state.valid,
        "reason": row.state.reason,
    })
}

/// Profile samples for every valid row, on the grid plus the peak locations.
fn profile_rows(rows: &[Row], grid: &[f64]) -> Vec<(String, f64, f64)> {
    let mut out = Vec::new();
    for row in rows {
        if !row.state.valid {
            continue;
        }
        for x in super::figure::augmented_grid(grid, &row.state.x) {
            out.push((row.t.clone(), x, row.state.eval_u(x)));
        }
    }
    out
}

fn profile_csv(rows: &[(String, f64, f64)]) -> String {
    let mut out = String::from("t,x,u\n");
    for (t, x, u) in rows {
        out.push_str(&format!("{t},{x},{u}\n"));
    }
    out
}
