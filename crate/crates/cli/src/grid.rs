use gnch::numeric::{Rational, Scalar};

use crate::CliError;

/// Parses `a:b:n` into endpoints and a sample count (`n >= 1`).
fn split_spec(spec: &str) -> Result<(&str, &str, usize), CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!("grid spec '{spec}' must be a:b:n")));
    }
    let n: usize = parts[2]
        .parse()
        .map_err(|_| CliError::usage(format!("bad sample count in '{spec}'")))?;
    if n < 1 {
        return Err(CliError::usage("grids need n >= 1"));
    }
    Ok((parts[0], parts[1], n))
}

pub fn parse_f64(text: &str) -> Result<f64, CliError> {
    if let Ok(v) = text.trim().parse::<f64>() {
        if v.is_finite() {
            return Ok(v);
        }
    }
    // also accept p/q on the float path
    Rational::parse(text)
        .map(|r| r.to_f64())
        .map_err(|_| CliError::usage(format!("cannot parse '{text}' as a number")))
}

pub fn parse_rational(text: &str) -> Result<Rational, CliError> {
    Rational::parse(text)
        .map_err(|_| CliError::usage(format!("cannot parse '{text}' as an exact rational")))
}

/// `n` evenly spaced floats from `a` to `b`, endpoints included.
pub fn float_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let (a, b, n) = split_spec(spec)?;
    let a = parse_f64(a)?;
    let b = parse_f64(b)?;
    if n == 1 {
        return Ok(vec![a]);
    }
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| a + i as f64 * step).collect())
}

/// Exact evenly spaced rationals (endpoints must parse as rationals).
pub fn rational_grid(spec: &str) -> Result<Vec<Rational>, CliError> {
    let (a, b, n) = split_spec(spec)?;
    let a = parse_rational(a)?;
    let b = parse_rational(b)?;
    if n == 1 {
        return Ok(vec![a]);
    }
    let step = b.sub(&a).div(&Rational::from((n - 1) as i64));
    Ok((0..n)
        .map(|i| a.add(&step.mul(&Rational::from(i as i64))))
        .collect())
}

/// Window endpoints only (for integration commands).
pub fn float_window(spec: &str) -> Result<(f64, f64), CliError> {
    let (a, b, _) = split_spec(spec)?;
    Ok((parse_f64(a)?, parse_f64(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_inclusive() {
        assert_eq!(float_grid("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(float_grid("0:0:1").unwrap(), vec![0.0]);
        let r = rational_grid("0:1:5").unwrap();
        assert_eq!(r[1], Rational::new(1, 4));
        assert_eq!(r[4], Rational::from(1));
    }

    #[test]
    fn bad_specs_are_usage_errors() {
        assert!(float_grid("0:1").is_err());
        assert!(float_grid("0:1:0").is_err());
        assert!(rational_grid("0:x:3").is_err());
    }
}
