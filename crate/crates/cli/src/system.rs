use gnch::moments::{GnchParams, MomentSystem, Preset, SpectralMode};
use gnch::numeric::{Rational, Scalar};

use crate::grid::{parse_f64, parse_rational};
use crate::{CliError, SystemArgs};

fn load_json(source: &str) -> Result<String, CliError> {
    if source.trim_start().starts_with('{') {
        Ok(source.to_string())
    } else {
        std::fs::read_to_string(source)
            .map_err(|e| CliError::usage(format!("cannot read {source}: {e}")))
    }
}

fn params_from_flags<T: Scalar>(
    args: &SystemArgs,
    parse: &dyn Fn(&str) -> Result<T, CliError>,
) -> Result<GnchParams<T>, CliError> {
    let preset = match &args.preset {
        Some(name) => Some(
            Preset::from_name(name)
                .ok_or_else(|| CliError::usage(format!("unknown preset '{name}'")))?,
        ),
        None => None,
    };
    let base: Option<GnchParams<T>> = preset.map(|p| p.params());
    let (mut r, mut s) = match base {
        Some(p) => (p.r, p.s),
        None => {
            if args.r.is_none() || args.s.is_none() {
                return Err(CliError::usage(
                    "select a system with --preset, with --r/--s, or with --system",
                ));
            }
            (T::zero(), T::zero())
        }
    };
    if let Some(rv) = &args.r {
        r = parse(rv)?;
    }
    if let Some(sv) = &args.s {
        s = parse(sv)?;
    }
    Ok(GnchParams::new(r, s))
}

fn modes_from_flags<T: Scalar>(
    args: &SystemArgs,
    parse: &dyn Fn(&str) -> Result<T, CliError>,
) -> Result<Vec<SpectralMode<T>>, CliError> {
    if args.lambda.is_empty() {
        return Err(CliError::usage("at least one --lambda value is required"));
    }
    let lambdas: Vec<T> = args
        .lambda
        .iter()
        .map(|v| parse(v))
        .collect::<Result<_, _>>()?;
    let a0: Vec<T> = if args.a0.is_empty() {
        vec![T::zero(); lambdas.len()]
    } else {
        if args.a0.len() != lambdas.len() {
            return Err(CliError::usage(format!(
                "--a0 has {} values but --lambda has {}",
                args.a0.len(),
                lambdas.len()
            )));
        }
        args.a0.iter().map(|v| parse(v)).collect::<Result<_, _>>()?
    };
    Ok(lambdas
        .into_iter()
        .zip(a0)
        .map(|(l, a)| SpectralMode::new(l, a))
        .collect())
}

pub fn build_f64(args: &SystemArgs) -> Result<MomentSystem<f64>, CliError> {
    if let Some(source) = &args.system {
        let text = load_json(source)?;
        return MomentSystem::<f64>::from_json(&text).map_err(CliError::usage);
    }
    let params = params_from_flags(args, &parse_f64)?;
    let modes = modes_from_flags(args, &parse_f64)?;
    MomentSystem::new(params, modes).map_err(CliError::usage)
}

pub fn build_exact(args: &SystemArgs) -> Result<MomentSystem<Rational>, CliError> {
    let sys = if let Some(source) = &args.system {
        let text = load_json(source)?;
        MomentSystem::<Rational>::from_json(&text).map_err(CliError::usage)?
    } else {
        let params = params_from_flags(args, &parse_rational)?;
        let modes = modes_from_flags(args, &parse_rational)?;
        MomentSystem::new(params, modes).map_err(CliError::usage)?
    };
    // exact sweeps need the polynomial regime: integer 2s/r
    sys.exponent_shift()
        .map_err(|e| CliError::usage(format!("exact mode: {e}")))?;
    Ok(sys)
}
