//! Forward eigenvalue problem of the discrete string and the drift of its
//! spectrum in time.
//!
//! A [`StringConfig`] defines the boundary value problem `f_yy = z g(y) f` on
//! `(-1, 1)` with `f(-1) = f(1) = 0` and `g` a sum of point masses `g_j` at
//! `y_j`. Solutions are piecewise linear; propagating `f(-1) = 0, f'(-1) = 1`
//! across the masses (value continuous, slope jumping by `z g_j f(y_j)`)
//! makes `f(1)` a polynomial `P(z)` of degree N whose roots are the
//! eigenvalues. `P(0) = 2` always: at `z = 0` the solution is the straight
//! line through the full string length.
//!
//! For a system with parameters `(r, s)` the eigenvalue branches are affine
//! in time with common slope `-r` (and intercepts `lambda_j exp(r a_j(0))`),
//! which [`drift_fit`] measures; at `r = 0` the spectrum is constant.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moments::MomentSystem;
use crate::numeric::{DensePolynomial, Rational, Scalar};
use crate::peakon::{string_config, StringConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid string configuration: {0}")]
    InvalidConfig(String),
    #[error("eigenvalue computation failed: {0}")]
    Convergence(String),
    #[error("branch matching ambiguous: eigenvalue gap {gap:.3e} at t = {t}")]
    BranchCrossing { gap: f64, t: f64 },
}

/// Characteristic polynomial `P(z) = f(1; z)` of the string problem.
/// Degree N for a valid configuration with nonzero masses; `P(0) = 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly<T: Scalar>(pub DensePolynomial<T>);

/// Transfer-matrix assembly of `P(z)`, carrying value and slope as
/// polynomials in `z` (degree grows by at most one per mass).
pub fn characteristic_polynomial<T: Scalar>(
    cfg: &StringConfig<T>,
) -> Result<CharPoly<T>, SpectralError> {
    if !cfg.valid {
        return Err(SpectralError::InvalidConfig(
            cfg.reason.clone().unwrap_or_else(|| "flagged invalid".into()),
        ));
    }
    let z = DensePolynomial::monomial(T::one(), 1);
    let mut value = DensePolynomial::zero();
    let mut slope = DensePolynomial::one();
    let mut prev = T::from_int(-1);
    for (yj, gj) in cfg.y.iter().zip(&cfg.g) {
        let gap = yj.sub(&prev);
        value = value.add(&slope.scale(&gap));
        slope = slope.add(&z.mul(&value.scale(gj)));
        prev = yj.clone();
    }
    let last_gap = T::one().sub(&prev);
    value = value.add(&slope.scale(&last_gap));
    Ok(CharPoly(value))
}

fn poly_eval_f64(p: &DensePolynomial<f64>, z: f64) -> f64 {
    p.eval(&z)
}

/// All N real roots of the characteristic polynomial, ascending. Roots are
/// found as companion-matrix eigenvalues and polished by a Newton step when
/// the residual warrants it. Fails if fewer than N real roots emerge.
pub fn string_eigenvalues(cfg: &StringConfig<f64>) -> Result<Vec<f64>, SpectralError> {
    let CharPoly(p) = characteristic_polynomial(cfg)?;
    let n = cfg.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let degree = p.degree().unwrap_or(0);
    if degree != n {
        return Err(SpectralError::Convergence(format!(
            "characteristic polynomial has degree {degree}, expected {n}"
        )));
    }
    let lead = *p.leading().expect("nonzero degree");
    let monic: Vec<f64> = (0..degree).map(|i| p.coeff(i) / lead).collect();
    let companion = DMatrix::from_fn(degree, degree, |i, j| {
        if j + 1 == degree {
            -monic[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eigen = companion.complex_eigenvalues();

    let dp = p.derivative();
    let scale: f64 = p.coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut roots = Vec::new();
    for ev in eigen.iter() {
        if ev.im.abs() > 1e-8 * (1.0 + ev.re.abs()) {
            continue;
        }
        let mut z = ev.re;
        // polish only when the residual is not already at rounding level
        for _ in 0..3 {
            let residual = poly_eval_f64(&p, z);
            if residual.abs() <= 1e-10 * scale.max(1.0) {
                break;
            }
            let d = poly_eval_f64(&dp, z);
            if d == 0.0 {
                break;
            }
            z -= residual / d;
        }
        roots.push(z);
    }
    if roots.len() != n {
        return Err(SpectralError::Convergence(format!(
            "found {} real eigenvalues, expected {n}",
            roots.len()
        )));
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

/// Exact eigenvalues when they are rational: rational-root extraction on the
/// integer-cleared characteristic polynomial, with deflation for repeated
/// roots. Fails (rather than approximating) when a root is irrational or the
/// coefficient divisors are out of enumeration range.
pub fn rational_eigenvalues(cfg: &StringConfig<Rational>) -> Result<Vec<Rational>, SpectralError> {
    use num::bigint::BigInt;
    use num::{One, Signed, ToPrimitive};

    let CharPoly(p) = characteristic_polynomial(cfg)?;
    let n = cfg.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.degree() != Some(n) {
        return Err(SpectralError::Convergence(format!(
            "characteristic polynomial has degree {:?}, expected {n}",
            p.degree()
        )));
    }

    // clear denominators to integer coefficients
    let mut denom_lcm = BigInt::one();
    for c in p.coeffs() {
        let d = c.inner().denom().clone();
        denom_lcm = num::integer::lcm(denom_lcm, d);
    }
    let int_coeffs: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| c.inner().numer() * (&denom_lcm / c.inner().denom()))
        .collect();

    let divisors = |v: &BigInt| -> Result<Vec<u64>, SpectralError> {
        let m = v.abs().to_u64().ok_or_else(|| {
            SpectralError::Convergence("coefficients too large for rational-root search".into())
        })?;
        if m == 0 {
            return Err(SpectralError::Convergence("zero boundary coefficient".into()));
        }
        let mut out = Vec::new();
        let mut d = 1u64;
        while d * d <= m {
            if m % d == 0 {
                out.push(d);
                out.push(m / d);
            }
            d += 1;
        }
        Ok(out)
    };
    let p_div = divisors(&int_coeffs[0])?;
    let q_div = divisors(int_coeffs.last().expect("nonempty"))?;

    let mut remaining = p.clone();
    let mut roots: Vec<Rational> = Vec::new();
    'outer: for &pp in &p_div {
        for &qq in &q_div {
            for sign in [1i64, -1] {
                let cand = Rational::new(sign * pp as i64, qq as i64);
                loop {
                    if remaining.degree() == Some(0) || remaining.is_zero() {
                        break 'outer;
                    }
                    if !Scalar::is_zero(&remaining.eval(&cand)) {
                        break;
                    }
                    roots.push(cand.clone());
                    remaining = deflate(&remaining, &cand);
                }
            }
        }
    }
    if roots.len() != n {
        return Err(SpectralError::Convergence(format!(
            "found {} rational eigenvalues, expected {n} (irrational spectrum?)",
            roots.len()
        )));
    }
    roots.sort_by(|a, b| a.compare(b).unwrap());
    Ok(roots)
}

/// Exact synthetic division of `p` by `(z - root)`; `root` must be a root.
fn deflate(p: &DensePolynomial<Rational>, root: &Rational) -> DensePolynomial<Rational> {
    let d = p.degree().expect("nonzero polynomial");
    let mut out = vec![Rational::from(0); d];
    let mut carry = Rational::from(0);
    for i in (0..=d).rev() {
        let c = p.coeff(i).add(&carry.mul(root));
        if i > 0 {
            out[i - 1] = c.clone();
            carry = c;
        }
    }
    DensePolynomial::from_coeffs(out)
}

/// Affine fit of one eigenvalue branch over the sampled times.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation of the samples from the fitted line.
    pub residual: f64,
}

/// Per-branch affine fits of the string spectrum over a time window.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DriftReport {
    pub branches: Vec<BranchFit>,
    pub expected_slope: f64,
}

impl DriftReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

/// Checks that sorted eigenvalue lists can be matched branch-by-branch:
/// consecutive eigenvalues at each time must be separated by more than the
/// crossing tolerance.
fn check_branch_separation(times: &[f64], spectra: &[Vec<f64>]) -> Result<(), SpectralError> {
    const GAP_TOL: f64 = 1e-9;
    for (t, spectrum) in times.iter().zip(spectra) {
        for w in spectrum.windows(2) {
            let gap = w[1] - w[0];
            if gap < GAP_TOL {
                return Err(SpectralError::BranchCrossing { gap, t: *t });
            }
        }
    }
    Ok(())
}

fn affine_fit(ts: &[f64], zs: &[f64]) -> BranchFit {
    let n = ts.len() as f64;
    let mean_t = ts.iter().sum::<f64>() / n;
    let mean_z = zs.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (t, z) in ts.iter().zip(zs) {
        cov += (t - mean_t) * (z - mean_z);
        var += (t - mean_t) * (t - mean_t);
    }
    let slope = cov / var;
    let intercept = mean_z - slope * mean_t;
    let residual = ts
        .iter()
        .zip(zs)
        .map(|(t, z)| (z - (slope * t + intercept)).abs())
        .fold(0.0, f64::max);
    BranchFit { slope, intercept, residual }
}

/// Solves the string problem at each sampled time, matches branches by sorted
/// order (rejecting windows where that is ambiguous), and fits each branch
/// affinely. Expected: every slope equals `-r`.
pub fn drift_fit(sys: &MomentSystem<f64>, times: &[f64]) -> Result<DriftReport, SpectralError> {
    if times.len() < 3 {
        return Err(SpectralError::Convergence(format!(
            "need at least 3 sample times, got {}",
            times.len()
        )));
    }
    let mut spectra = Vec::with_capacity(times.len());
    for &t in times {
        let cfg = string_config(sys, &t);
        if !cfg.valid {
            return Err(SpectralError::InvalidConfig(format!(
                "degenerate at t = {t}: {}",
                cfg.reason.unwrap_or_default()
            )));
        }
        spectra.push(string_eigenvalues(&cfg)?);
    }
    check_branch_separation(times, &spectra)?;

    let n = sys.n_peakons();
    let branches = (0..n)
        .map(|b| {
            let zs: Vec<f64> = spectra.iter().map(|sp| sp[b]).collect();
            affine_fit(times, &zs)
        })
        .collect();
    Ok(DriftReport { branches, expected_slope: -sys.params().r })
}

/// The expected spectrum `{lambda_j exp(r a_j(t))}` of a known system,
/// ascending (for round-trip checks against [`string_eigenvalues`]).
pub fn expected_spectrum(sys: &MomentSystem<f64>, t: f64) -> Vec<f64> {
    let r = sys.params().r;
    let mut out: Vec<f64> = sys
        .modes()
        .iter()
        .map(|m| {
            if r == 0.0 {
                m.lambda
            } else {
                // lambda exp(r a(t)) = lambda exp(r a0) - r t
                m.lambda * (r * m.a0).exp() - r * t
            }
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}
