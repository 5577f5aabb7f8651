//! The two-parameter equation family and its closed-form moment sequence.
//!
//! A [`MomentSystem`] bundles the family parameters `(r, s)` with N spectral
//! modes `(lambda_j, a_j(0))`. The moments are
//!
//! ```text
//! A_k(t) = [k == 0] * 1/2  +  Σ_j (-lambda_j)^k W_j(t, k)
//! ```
//!
//! where the per-mode weight is `W_j = phi_j(t)^(k + 1 + 2s/r)` for `r != 0`
//! (with `phi_j(t) = exp(r a_j(0)) - r t / lambda_j`, affine in `t`) and
//! `W_j = exp(2 s a_j(t))` for `r = 0`. The constant `1/2` at `k = 0` is the
//! contribution of a zeroth mode with `lambda_0 = 0`; folding it into an
//! offset removes the `r + 2s = 0` singularity of the equivalent
//! `a_0 = ln(1/2)/(r + 2s)` parameterization without changing any `A_k`.
//! `A_{-1}` omits that mode entirely.
//!
//! `phi_j` is carried as the affine function itself rather than through
//! `a_j = ln(phi_j)/r`, so evaluation continues through `phi_j <= 0`, where
//! the amplitudes cross from antipeakon to peakon.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{powi, DensePolynomial, Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    /// Parameter combination outside the operation's domain.
    #[error("parameter error: {0}")]
    Param(String),
    /// The requested value leaves the real field (log of a non-positive
    /// quantity, negative base under a non-integer power, ...).
    #[error("domain error: {0}")]
    Domain(String),
}

/// The equation parameters `(r, s)` selecting the family member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnchParams<T: Scalar> {
    pub r: T,
    pub s: T,
}

impl<T: Scalar> GnchParams<T> {
    pub fn new(r: T, s: T) -> Self {
        GnchParams { r, s }
    }
}

/// Named parameter presets for the three special cases studied in detail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `(r, s) = (0, 1)`: the Camassa-Holm equation itself (isospectral).
    Ch,
    /// `(r, s) = (1, 0)`: the nonisospectral variant.
    Noniso,
    /// `(r, s) = (4, 2)`: the mixed-type variant.
    Mixed,
}

impl Preset {
    pub fn from_name(name: &str) -> Option<Preset> {
        match name {
            "ch" => Some(Preset::Ch),
            "noniso" => Some(Preset::Noniso),
            "mixed" => Some(Preset::Mixed),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ch => "ch",
            Preset::Noniso => "noniso",
            Preset::Mixed => "mixed",
        }
    }

    pub fn params<T: Scalar>(self) -> GnchParams<T> {
        let (r, s) = match self {
            Preset::Ch => (0, 1),
            Preset::Noniso => (1, 0),
            Preset::Mixed => (4, 2),
        };
        GnchParams::new(T::from_int(r), T::from_int(s))
    }
}

/// One spectral mode: the constant `lambda_j != 0` and the initial value
/// `a_j(0)` of its logarithmic weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMode<T: Scalar> {
    pub lambda: T,
    pub a0: T,
}

impl<T: Scalar> SpectralMode<T> {
    pub fn new(lambda: T, a0: T) -> Self {
        SpectralMode { lambda, a0 }
    }
}

/// Parameters plus an ordered list of spectral modes; the full data of an
/// N-peakon solution.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSystem<T: Scalar> {
    params: GnchParams<T>,
    modes: Vec<SpectralMode<T>>,
}

impl<T: Scalar> MomentSystem<T> {
    /// Validates `N >= 1`, nonzero pairwise-distinct `lambda_j`, and (on the
    /// float path) finiteness.
    pub fn new(params: GnchParams<T>, modes: Vec<SpectralMode<T>>) -> Result<Self, MomentError> {
        if modes.is_empty() {
            return Err(MomentError::Param("at least one spectral mode required".into()));
        }
        for m in &modes {
            if m.lambda.is_zero() {
                return Err(MomentError::Param("lambda must be nonzero".into()));
            }
            if !m.lambda.magnitude().is_finite() || !m.a0.magnitude().is_finite() {
                return Err(MomentError::Param("mode values must be finite".into()));
            }
        }
        if !params.r.magnitude().is_finite() || !params.s.magnitude().is_finite() {
            return Err(MomentError::Param("r, s must be finite".into()));
        }
        for i in 0..modes.len() {
            for j in i + 1..modes.len() {
                if modes[i].lambda == modes[j].lambda {
                    return Err(MomentError::Param(format!(
                        "lambda values must be pairwise distinct (modes {i} and {j} coincide)"
                    )));
                }
            }
        }
        Ok(MomentSystem { params, modes })
    }

    pub fn params(&self) -> &GnchParams<T> {
        &self.params
    }

    pub fn modes(&self) -> &[SpectralMode<T>] {
        &self.modes
    }

    pub fn n_peakons(&self) -> usize {
        self.modes.len()
    }

    pub fn to_json(&self) -> String
    where
        T: Serialize,
    {
        let raw = RawSystem {
            r: self.params.r.clone(),
            s: self.params.s.clone(),
            modes: self.modes.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, MomentError>
    where
        T: serde::de::DeserializeOwned,
    {
        let raw: RawSystem<T> =
            serde_json::from_str(text).map_err(|e| MomentError::Param(format!("bad JSON: {e}")))?;
        MomentSystem::new(GnchParams::new(raw.r, raw.s), raw.modes)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
struct RawSystem<T: Scalar> {
    r: T,
    s: T,
    modes: Vec<SpectralMode<T>>,
}

/// Moment evaluation at a fixed time, generic over the scalar field. The two
/// concrete system types implement this; downstream reconstruction code is
/// written against it.
pub trait MomentSource<T: Scalar> {
    fn n_modes(&self) -> usize;
    /// `A_k(t)` for `k >= -1`.
    fn moment(&self, k: i64, t: &T) -> Result<T, MomentError>;
}

// ---------------------------------------------------------------------------
// Float path
// ---------------------------------------------------------------------------

impl MomentSystem<f64> {
    /// `a_j(t)`, the logarithmic weight of mode `j` (0-based).
    ///
    /// For `r != 0` this is `ln(phi_j(t)) / r`, defined only while
    /// `phi_j(t) > 0`; for `r = 0` it is `a_j(0) - t / lambda_j`.
    pub fn a_value(&self, j: usize, t: f64) -> Result<f64, MomentError> {
        let mode = &self.modes[j];
        let r = self.params.r;
        if r == 0.0 {
            return Ok(mode.a0 - t / mode.lambda);
        }
        let phi = self.phi_value(j, t)?;
        if phi <= 0.0 {
            return Err(MomentError::Domain(format!(
                "a_{j}(t) leaves the real line: phi = {phi} <= 0 at t = {t}"
            )));
        }
        Ok(phi.ln() / r)
    }

    /// `phi_j(t) = exp(r a_j(0)) - r t / lambda_j`, the affine continuation of
    /// `exp(r a_j(t))`; valid for all `t`, including `phi <= 0`.
    pub fn phi_value(&self, j: usize, t: f64) -> Result<f64, MomentError> {
        let r = self.params.r;
        if r == 0.0 {
            return Err(MomentError::Param(
                "phi is defined for r != 0; at r = 0 the weight is exp(2 s a_j(t))".into(),
            ));
        }
        let mode = &self.modes[j];
        Ok((r * mode.a0).exp() - r * t / mode.lambda)
    }

    /// Per-mode weight `W_j(t, k)`.
    fn weight(&self, j: usize, k: i64, t: f64) -> Result<f64, MomentError> {
        let (r, s) = (self.params.r, self.params.s);
        if r == 0.0 {
            let a = self.a_value(j, t)?;
            return Ok((2.0 * s * a).exp());
        }
        let phi = self.phi_value(j, t)?;
        let exponent = (k + 1) as f64 + 2.0 * s / r;
        let rounded = exponent.round();
        if (exponent - rounded).abs() < 1e-12 {
            let e = rounded as i64;
            if phi == 0.0 && e < 0 {
                return Err(MomentError::Domain(format!(
                    "phi_{j}(t) = 0 with negative exponent {e}"
                )));
            }
            Ok(powi(&phi, e))
        } else if phi > 0.0 {
            Ok(phi.powf(exponent))
        } else {
            Err(MomentError::Domain(format!(
                "phi_{j}(t) = {phi} <= 0 under non-integer exponent {exponent}"
            )))
        }
    }

    /// `d W_j / dt`.
    fn weight_derivative(&self, j: usize, k: i64, t: f64) -> Result<f64, MomentError> {
        let (r, s) = (self.params.r, self.params.s);
        let lambda = self.modes[j].lambda;
        if r == 0.0 {
            // d/dt exp(2 s a) = -(2 s / lambda) exp(2 s a)
            return Ok(-(2.0 * s / lambda) * self.weight(j, k, t)?);
        }
        let exponent = (k + 1) as f64 + 2.0 * s / r;
        if exponent == 0.0 {
            return Ok(0.0);
        }
        // d/dt phi^e = e phi^(e-1) * (-r / lambda); phi^(e-1) is W at k-1.
        Ok(exponent * self.weight(j, k - 1, t)? * (-r / lambda))
    }

    /// `A_k(t)` for `k >= -1`.
    pub fn moment(&self, k: i64, t: f64) -> Result<f64, MomentError> {
        if k < -1 {
            return Err(MomentError::Param(format!("moments defined for k >= -1, got {k}")));
        }
        let mut acc = if k == 0 { 0.5 } else { 0.0 };
        for j in 0..self.modes.len() {
            let lam = self.modes[j].lambda;
            acc += powi(&-lam, k) * self.weight(j, k, t)?;
        }
        Ok(acc)
    }

    /// Analytic `dA_k/dt` for `k >= 0` (the `k = 0` offset is constant).
    pub fn moment_derivative(&self, k: i64, t: f64) -> Result<f64, MomentError> {
        if k < 0 {
            return Err(MomentError::Param("derivative defined for k >= 0".into()));
        }
        let mut acc = 0.0;
        for j in 0..self.modes.len() {
            let lam = self.modes[j].lambda;
            acc += powi(&-lam, k) * self.weight_derivative(j, k, t)?;
        }
        Ok(acc)
    }

    /// Residual of the moment evolution law at time `t`:
    /// `dA_k/dt - [r(k+1) + 2s] A_{k-1}` for `k = 0` or `k >= 2`, and
    /// `dA_1/dt - (2r + 2s) A_0 + (r + s)` for `k = 1`.
    pub fn moment_derivative_residual(&self, k: i64, t: f64) -> Result<f64, MomentError> {
        let (r, s) = (self.params.r, self.params.s);
        let lhs = self.moment_derivative(k, t)?;
        let rhs = if k == 1 {
            (2.0 * r + 2.0 * s) * self.moment(0, t)? - (r + s)
        } else {
            (r * (k + 1) as f64 + 2.0 * s) * self.moment(k - 1, t)?
        };
        Ok(lhs - rhs)
    }
}

impl MomentSource<f64> for MomentSystem<f64> {
    fn n_modes(&self) -> usize {
        self.modes.len()
    }
    fn moment(&self, k: i64, t: &f64) -> Result<f64, MomentError> {
        MomentSystem::<f64>::moment(self, k, *t)
    }
}

// ---------------------------------------------------------------------------
// Exact path
// ---------------------------------------------------------------------------

impl MomentSystem<Rational> {
    /// The integer `2s/r` (exact mode requires it to be an integer so that all
    /// weights are rational polynomials in `t`).
    pub fn exponent_shift(&self) -> Result<i64, MomentError> {
        let r = &self.params.r;
        if r.is_zero() {
            return Err(MomentError::Param("2s/r undefined at r = 0".into()));
        }
        let m = self.params.s.mul(&Rational::from(2)).div(r);
        m.to_i64().ok_or_else(|| {
            MomentError::Param(format!("exact mode requires integer 2s/r, got {m}"))
        })
    }

    fn require_zero_a0(&self) -> Result<(), MomentError> {
        if self.modes.iter().any(|m| !m.a0.is_zero()) {
            return Err(MomentError::Param(
                "exact mode requires a_j(0) = 0 (exp(r a0) is irrational otherwise)".into(),
            ));
        }
        Ok(())
    }

    /// Exact `phi_j(t) = 1 - r t / lambda_j` (requires `r != 0`, `a0 = 0`).
    pub fn phi_value(&self, j: usize, t: &Rational) -> Result<Rational, MomentError> {
        if self.params.r.is_zero() {
            return Err(MomentError::Param("phi is defined for r != 0".into()));
        }
        self.require_zero_a0()?;
        let mode = &self.modes[j];
        Ok(Rational::from(1).sub(&self.params.r.mul(t).div(&mode.lambda)))
    }

    /// Exact `A_k(t)` for `k >= -1`. Requires the polynomial regime
    /// (`r != 0`, integer `2s/r`, `a0 = 0`) or `r = 0` at `t = 0` with
    /// `a0 = 0`, where every weight is 1.
    pub fn moment(&self, k: i64, t: &Rational) -> Result<Rational, MomentError> {
        if k < -1 {
            return Err(MomentError::Param(format!("moments defined for k >= -1, got {k}")));
        }
        self.require_zero_a0()?;
        let offset = if k == 0 { Rational::new(1, 2) } else { Rational::from(0) };
        if self.params.r.is_zero() {
            if !t.is_zero() {
                return Err(MomentError::Param(
                    "exact evaluation at r = 0 is limited to t = 0".into(),
                ));
            }
            let mut acc = offset;
            for mode in &self.modes {
                acc = acc.add(&powi(&mode.lambda.neg(), k));
            }
            return Ok(acc);
        }
        let shift = self.exponent_shift()?;
        let mut acc = offset;
        for (j, mode) in self.modes.iter().enumerate() {
            let phi = self.phi_value(j, t)?;
            let e = k + 1 + shift;
            if e < 0 && phi.is_zero() {
                return Err(MomentError::Domain(format!(
                    "phi_{j}(t) = 0 with negative exponent {e}"
                )));
            }
            acc = acc.add(&powi(&mode.lambda.neg(), k).mul(&powi(&phi, e)));
        }
        Ok(acc)
    }

    /// `A_k` as an exact polynomial in `t` (polynomial regime; requires the
    /// exponent `k + 1 + 2s/r` to be nonnegative).
    pub fn moment_poly(&self, k: i64) -> Result<DensePolynomial<Rational>, MomentError> {
        if k < -1 {
            return Err(MomentError::Param(format!("moments defined for k >= -1, got {k}")));
        }
        self.require_zero_a0()?;
        if self.params.r.is_zero() {
            return Err(MomentError::Param(
                "moments are not polynomial in t at r = 0".into(),
            ));
        }
        let shift = self.exponent_shift()?;
        let e = k + 1 + shift;
        if e < 0 {
            return Err(MomentError::Param(format!(
                "A_{k} is not polynomial: exponent {e} < 0"
            )));
        }
        let mut acc = if k == 0 {
            DensePolynomial::constant(Rational::new(1, 2))
        } else {
            DensePolynomial::zero()
        };
        for mode in &self.modes {
            // phi_j(t) = 1 - (r/lambda_j) t
            let phi = DensePolynomial::affine(
                Rational::from(1),
                self.params.r.div(&mode.lambda).neg(),
            );
            let term = phi.pow(e as u32).scale(&powi(&mode.lambda.neg(), k));
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Residual polynomial of the moment evolution law (must be identically
    /// zero): `dA_k/dt - [r(k+1) + 2s] A_{k-1}` for `k = 0` or `k >= 2`,
    /// `dA_1/dt - (2r + 2s) A_0 + (r + s)` for `k = 1`.
    pub fn moment_ode_residual_poly(
        &self,
        k: i64,
    ) -> Result<DensePolynomial<Rational>, MomentError> {
        if k < 0 {
            return Err(MomentError::Param("the evolution law starts at k = 0".into()));
        }
        let (r, s) = (&self.params.r, &self.params.s);
        let lhs = self.moment_poly(k)?.derivative();
        let rhs = if k == 1 {
            let coeff = r.add(s).mul(&Rational::from(2));
            self.moment_poly(0)?
                .scale(&coeff)
                .sub(&DensePolynomial::constant(r.add(s)))
        } else {
            let coeff = r.mul(&Rational::from(k + 1)).add(&s.mul(&Rational::from(2)));
            self.moment_poly(k - 1)?.scale(&coeff)
        };
        Ok(lhs.sub(&rhs))
    }

    /// Exact residual of the evolution law at a single time.
    pub fn moment_derivative_residual(
        &self,
        k: i64,
        t: &Rational,
    ) -> Result<Rational, MomentError> {
        Ok(self.moment_ode_residual_poly(k)?.eval(t))
    }

    /// The weights and nodes `(b_j, mu_j)` such that
    /// `A_k(t) = [k == 0]/2 + Σ_j b_j mu_j^k` at the fixed time `t`:
    /// `b_j = phi_j^(1 + 2s/r)` and `mu_j = -lambda_j phi_j`. Fails at turning
    /// times where some `phi_j = 0` (the nodes must stay nonzero).
    pub fn power_sum_law(
        &self,
        t: &Rational,
    ) -> Result<crate::hankel::PowerSumLaw<Rational>, MomentError> {
        self.require_zero_a0()?;
        let (weights, nodes) = if self.params.r.is_zero() {
            if !t.is_zero() {
                return Err(MomentError::Param(
                    "exact evaluation at r = 0 is limited to t = 0".into(),
                ));
            }
            let w = vec![Rational::from(1); self.modes.len()];
            let n = self.modes.iter().map(|m| m.lambda.neg()).collect();
            (w, n)
        } else {
            let shift = self.exponent_shift()?;
            let mut w = Vec::with_capacity(self.modes.len());
            let mut n = Vec::with_capacity(self.modes.len());
            for (j, mode) in self.modes.iter().enumerate() {
                let phi = self.phi_value(j, t)?;
                if phi.is_zero() {
                    return Err(MomentError::Domain(format!(
                        "turning time: phi_{j}(t) = 0, node mu_{j} vanishes"
                    )));
                }
                w.push(powi(&phi, 1 + shift));
                n.push(mode.lambda.neg().mul(&phi));
            }
            (w, n)
        };
        Ok(crate::hankel::PowerSumLaw::with_center(
            weights,
            nodes,
            Rational::new(1, 2),
        ))
    }

    pub fn to_f64(&self) -> MomentSystem<f64> {
        MomentSystem {
            params: GnchParams::new(self.params.r.to_f64(), self.params.s.to_f64()),
            modes: self
                .modes
                .iter()
                .map(|m| SpectralMode::new(m.lambda.to_f64(), m.a0.to_f64()))
                .collect(),
        }
    }
}

impl MomentSource<Rational> for MomentSystem<Rational> {
    fn n_modes(&self) -> usize {
        self.modes.len()
    }
    fn moment(&self, k: i64, t: &Rational) -> Result<Rational, MomentError> {
        MomentSystem::<Rational>::moment(self, k, t)
    }
}
