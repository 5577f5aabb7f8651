//! Reconstruction of the peakon data from Hankel determinants.
//!
//! In the transformed (string) picture the wave is described by point masses
//! `g_j` at positions `y_j` in `(-1, 1)`:
//!
//! ```text
//! y_j = 1 - delta(N-j, 2) / delta(N-j+1, 0)
//! g_j = delta(N-j+1, 0)^2 / (delta(N-j+1, 1) * delta(N-j, 1))
//! ```
//!
//! The physical variables follow through `x_j = atanh(y_j)` (written as the
//! half-log) and `m_j = g_j (1 - y_j^2)`, and the wave field is
//! `u(x) = 1/2 Σ m_j exp(-2 |x - x_j|)`.
//!
//! Degeneracies (turning points, where a determinant denominator vanishes and
//! an amplitude diverges or changes sign) are reported through a validity
//! flag plus a reason string, never as errors: time sweeps cross turning
//! points routinely.
//!
//! Everything evaluated *at the peaks* only involves `exp(2(x_i - x_j)) =
//! E_i / E_j` with `E_j = (1 + y_j)/(1 - y_j)`, so on the exact path those
//! functionals are rational; [`ExactPeakonData`] exposes them.

use serde::{Deserialize, Serialize};

use crate::hankel::{HankelElem, HankelTable, MomentSeq};
use crate::moments::{MomentSource, MomentSystem};
use crate::numeric::{Rational, Scalar};

/// Float-mode degeneracy threshold: a denominator `d` counts as nonzero when
/// `|d| > 1e-13 * max(1, |numerator|)`.
const DENOM_RTOL: f64 = 1e-13;
/// Float-mode ordering slack.
const ORDER_EPS: f64 = 1e-12;

/// String-picture variables at one time: masses `g_j` at `y_j` in `(-1, 1)`.
/// When `valid` is false, `y`/`g` are empty and `reason` names the vanishing
/// quantity or broken invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StringConfig<T: Scalar> {
    pub t: T,
    pub y: Vec<T>,
    pub g: Vec<T>,
    pub valid: bool,
    pub reason: Option<String>,
}

impl<T: Scalar> StringConfig<T> {
    pub fn invalid(t: T, reason: impl Into<String>) -> Self {
        StringConfig { t, y: Vec::new(), g: Vec::new(), valid: false, reason: Some(reason.into()) }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }
}

/// Physical peakon data: ordered positions `x_j` and amplitudes `m_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakonState {
    pub t: f64,
    pub x: Vec<f64>,
    pub m: Vec<f64>,
    pub valid: bool,
    pub reason: Option<String>,
}

fn denominator_ok<T: Scalar>(den: &T, num: &T) -> bool {
    if T::EXACT {
        !den.is_zero()
    } else {
        den.magnitude() > DENOM_RTOL * num.magnitude().max(1.0)
    }
}

fn strictly_less<T: Scalar>(a: &T, b: &T) -> bool {
    if T::EXACT {
        matches!(a.compare(b), Some(std::cmp::Ordering::Less))
    } else {
        b.to_f64() - a.to_f64() > ORDER_EPS
    }
}

/// Recovers the string configuration of `sys` at time `t`.
pub fn string_config<T>(sys: &MomentSystem<T>, t: &T) -> StringConfig<T>
where
    T: Scalar + HankelElem,
    MomentSystem<T>: MomentSource<T>,
{
    let n = sys.n_peakons() as i64;
    let tbl = HankelTable::new(MomentSeq::new(sys, t.clone()));
    let mut y = Vec::with_capacity(n as usize);
    let mut g = Vec::with_capacity(n as usize);

    for j in 1..=n {
        let k = n - j;
        let (num_y, den_y, d1a, d1b, num_g) = match (
            tbl.delta(k, 2),
            tbl.delta(k + 1, 0),
            tbl.delta(k + 1, 1),
            tbl.delta(k, 1),
        ) {
            (Ok(a), Ok(b), Ok(c), Ok(d)) => {
                let num_g = b.mul(&b);
                (a, b, c, d, num_g)
            }
            (Err(e), ..) | (_, Err(e), ..) | (_, _, Err(e), _) | (_, _, _, Err(e)) => {
                return StringConfig::invalid(t.clone(), e.to_string());
            }
        };
        if !denominator_ok(&den_y, &num_y) {
            return StringConfig::invalid(t.clone(), format!("delta({}, 0) vanishes", k + 1));
        }
        let den_g = d1a.mul(&d1b);
        if !denominator_ok(&den_g, &num_g) {
            let which = if !denominator_ok(&d1a, &num_g) { k + 1 } else { k };
            return StringConfig::invalid(t.clone(), format!("delta({which}, 1) vanishes"));
        }
        y.push(T::one().sub(&num_y.div(&den_y)));
        g.push(num_g.div(&den_g));
    }

    // ordering -1 < y_1 < ... < y_N < 1 and nonzero finite masses
    let lo = T::from_int(-1);
    let hi = T::one();
    let mut prev = &lo;
    for (idx, yj) in y.iter().enumerate() {
        if !strictly_less(prev, yj) {
            return StringConfig::invalid(
                t.clone(),
                format!("ordering violated at y_{}", idx + 1),
            );
        }
        prev = yj;
    }
    if !strictly_less(prev, &hi) {
        return StringConfig::invalid(t.clone(), "y_N reaches the right endpoint".to_string());
    }
    for (idx, gj) in g.iter().enumerate() {
        if gj.is_zero() || !gj.magnitude().is_finite() {
            return StringConfig::invalid(t.clone(), format!("g_{} degenerate", idx + 1));
        }
    }

    StringConfig { t: t.clone(), y, g, valid: true, reason: None }
}

/// Physical peakon state of `sys` at time `t` (float path).
pub fn peakon_state(sys: &MomentSystem<f64>, t: f64) -> PeakonState {
    let cfg = string_config(sys, &t);
    PeakonState::from_string_config(&cfg)
}

impl PeakonState {
    pub fn from_string_config(cfg: &StringConfig<f64>) -> PeakonState {
        if !cfg.valid {
            return PeakonState {
                t: cfg.t,
                x: Vec::new(),
                m: Vec::new(),
                valid: false,
                reason: cfg.reason.clone(),
            };
        }
        let x = cfg.y.iter().map(|y| 0.5 * ((1.0 + y) / (1.0 - y)).ln()).collect();
        let m = cfg.y.iter().zip(&cfg.g).map(|(y, g)| g * (1.0 - y * y)).collect();
        PeakonState::from_parts(cfg.t, x, m)
    }

    /// Validates ordering, finiteness, and nonzero amplitudes; degeneracy is
    /// recorded in the flag rather than thrown.
    pub fn from_parts(t: f64, x: Vec<f64>, m: Vec<f64>) -> PeakonState {
        let mut reason = None;
        if x.len() != m.len() {
            reason = Some("position/amplitude length mismatch".to_string());
        } else if x.iter().chain(m.iter()).any(|v| !v.is_finite()) {
            reason = Some("non-finite component".to_string());
        } else if x.windows(2).any(|w| w[1] - w[0] <= ORDER_EPS) {
            reason = Some("positions not strictly increasing".to_string());
        } else if m.iter().any(|&mj| mj == 0.0) {
            reason = Some("vanishing amplitude".to_string());
        }
        let valid = reason.is_none();
        PeakonState { t, x, m, valid, reason }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `u(x) = 1/2 Σ m_i exp(-2 |x - x_i|)`; continuous in `x`.
    pub fn eval_u(&self, x: f64) -> f64 {
        0.5 * self
            .x
            .iter()
            .zip(&self.m)
            .map(|(xi, mi)| mi * (-2.0 * (x - xi).abs()).exp())
            .sum::<f64>()
    }

    /// One-sided slopes `(u_x(x_j-), u_x(x_j+))` at peak `j` (0-based).
    pub fn u_x_sided(&self, j: usize) -> (f64, f64) {
        let smooth: f64 = self
            .x
            .iter()
            .zip(&self.m)
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(i, (xi, mi))| {
                if i < j {
                    -mi * (2.0 * (xi - self.x[j])).exp()
                } else {
                    mi * (2.0 * (self.x[j] - xi)).exp()
                }
            })
            .sum();
        (smooth + self.m[j], smooth - self.m[j])
    }

    /// Mean of the one-sided slopes at peak `j`; equals
    /// `-Σ_{i<j} m_i e^{2(x_i-x_j)} + Σ_{i>j} m_i e^{2(x_j-x_i)}`.
    pub fn u_x_average(&self, j: usize) -> f64 {
        let (left, right) = self.u_x_sided(j);
        0.5 * (left + right)
    }

    /// `u_x(x_j+) - u_x(x_j-)`; equals `-2 m_j` on the closed-form profile.
    pub fn u_x_jump(&self, j: usize) -> f64 {
        let (left, right) = self.u_x_sided(j);
        right - left
    }

    /// `∫_{x_j}^∞ u dx` in closed form.
    pub fn tail_integral(&self, j: usize) -> f64 {
        let mut acc = 0.0;
        for (i, (xi, mi)) in self.x.iter().zip(&self.m).enumerate() {
            if i < j {
                acc += 0.25 * mi * (2.0 * (xi - self.x[j])).exp();
            } else {
                acc += 0.5 * mi - 0.25 * mi * (2.0 * (self.x[j] - xi)).exp();
            }
        }
        acc
    }

    /// `H = 1/4 Σ_{j,k} m_j m_k exp(-2 |x_j - x_k|)`.
    pub fn hamiltonian(&self) -> f64 {
        let mut acc = 0.0;
        for (j, (xj, mj)) in self.x.iter().zip(&self.m).enumerate() {
            for (xk, mk) in self.x.iter().zip(&self.m).skip(j + 1) {
                acc += 2.0 * mj * mk * (-2.0 * (xj - xk).abs()).exp();
            }
            acc += mj * mj;
        }
        0.25 * acc
    }
}

/// Exact peak data: amplitudes `m_j` and position exponentials
/// `E_j = exp(2 x_j) = (1 + y_j)/(1 - y_j)`, all rational.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPeakonData {
    pub t: Rational,
    pub m: Vec<Rational>,
    pub e2x: Vec<Rational>,
    pub valid: bool,
    pub reason: Option<String>,
}

/// Exact reconstruction at a rational time (polynomial-moment regime).
pub fn exact_peakon(sys: &MomentSystem<Rational>, t: &Rational) -> ExactPeakonData {
    let cfg = string_config(sys, t);
    if !cfg.valid {
        return ExactPeakonData {
            t: t.clone(),
            m: Vec::new(),
            e2x: Vec::new(),
            valid: false,
            reason: cfg.reason,
        };
    }
    let one = Rational::from(1);
    let m = cfg
        .y
        .iter()
        .zip(&cfg.g)
        .map(|(y, g)| g.mul(&one.sub(&y.mul(y))))
        .collect();
    let e2x = cfg.y.iter().map(|y| one.add(y).div(&one.sub(y))).collect();
    ExactPeakonData { t: t.clone(), m, e2x, valid: true, reason: None }
}

impl ExactPeakonData {
    pub fn n(&self) -> usize {
        self.m.len()
    }

    /// `x_j` as a float, `1/2 ln E_j`.
    pub fn x_f64(&self, j: usize) -> f64 {
        0.5 * self.e2x[j].to_f64().ln()
    }

    /// Exact `u(x_j)`.
    pub fn u_at_peak(&self, j: usize) -> Rational {
        let mut acc = Rational::from(0);
        for i in 0..self.m.len() {
            let ratio = if i <= j {
                self.e2x[i].div(&self.e2x[j])
            } else {
                self.e2x[j].div(&self.e2x[i])
            };
            acc = acc.add(&self.m[i].mul(&ratio));
        }
        acc.mul(&Rational::new(1, 2))
    }

    /// Exact one-sided slopes `(u_x(x_j-), u_x(x_j+))`.
    pub fn u_x_sided(&self, j: usize) -> (Rational, Rational) {
        let mut smooth = Rational::from(0);
        for i in 0..self.m.len() {
            if i == j {
                continue;
            }
            let term = if i < j {
                self.m[i].mul(&self.e2x[i].div(&self.e2x[j])).neg()
            } else {
                self.m[i].mul(&self.e2x[j].div(&self.e2x[i]))
            };
            smooth = smooth.add(&term);
        }
        (smooth.add(&self.m[j]), smooth.sub(&self.m[j]))
    }

    /// Exact slope jump across `x_j`; must equal `-2 m_j` identically.
    pub fn u_x_jump(&self, j: usize) -> Rational {
        let (left, right) = self.u_x_sided(j);
        right.sub(&left)
    }

    pub fn u_x_average(&self, j: usize) -> Rational {
        let (left, right) = self.u_x_sided(j);
        left.add(&right).mul(&Rational::new(1, 2))
    }

    /// Exact `∫_{x_j}^∞ u dx`.
    pub fn tail_integral(&self, j: usize) -> Rational {
        let half = Rational::new(1, 2);
        let quarter = Rational::new(1, 4);
        let mut acc = Rational::from(0);
        for i in 0..self.m.len() {
            if i < j {
                acc = acc.add(&quarter.mul(&self.m[i]).mul(&self.e2x[i].div(&self.e2x[j])));
            } else {
                let tail = half.mul(&self.m[i]);
                let reflected = quarter.mul(&self.m[i]).mul(&self.e2x[j].div(&self.e2x[i]));
                acc = acc.add(&tail.sub(&reflected));
            }
        }
        acc
    }

    /// Exact Hamiltonian double sum.
    pub fn hamiltonian(&self) -> Rational {
        let mut acc = Rational::from(0);
        for j in 0..self.m.len() {
            for k in 0..self.m.len() {
                let ratio = if k <= j {
                    self.e2x[k].div(&self.e2x[j])
                } else {
                    self.e2x[j].div(&self.e2x[k])
                };
                acc = acc.add(&self.m[j].mul(&self.m[k]).mul(&ratio));
            }
        }
        acc.mul(&Rational::new(1, 4))
    }

    /// Float state with `x_j = 1/2 ln E_j`.
    pub fn to_state(&self) -> PeakonState {
        if !self.valid {
            return PeakonState {
                t: self.t.to_f64(),
                x: Vec::new(),
                m: Vec::new(),
                valid: false,
                reason: self.reason.clone(),
            };
        }
        PeakonState::from_parts(
            self.t.to_f64(),
            (0..self.n()).map(|j| self.x_f64(j)).collect(),
            self.m.iter().map(|m| m.to_f64()).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{Preset, SpectralMode};
    use approx::assert_relative_eq;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn mixed_f(lams: &[f64]) -> MomentSystem<f64> {
        MomentSystem::new(
            Preset::Mixed.params(),
            lams.iter().map(|&l| SpectralMode::new(l, 0.0)).collect(),
        )
        .unwrap()
    }

    fn mixed_q(lams: &[i64]) -> MomentSystem<Rational> {
        MomentSystem::new(
            Preset::Mixed.params(),
            lams.iter()
                .map(|&l| SpectralMode::new(Rational::from(l), Rational::from(0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn string_config_single_peakon_at_zero() {
        let cfg = string_config(&mixed_q(&[1]), &q(0, 1));
        assert!(cfg.valid);
        assert_eq!(cfg.y, vec![q(1, 3)]);
        assert_eq!(cfg.g, vec![q(-9, 4)]);
    }

    #[test]
    fn string_config_turning_point() {
        let cfg = string_config(&mixed_q(&[1]), &q(1, 4));
        assert!(!cfg.valid);
        assert!(cfg.reason.is_some());

        let fcfg = string_config(&mixed_f(&[1.0]), &0.25);
        assert!(!fcfg.valid);
    }

    #[test]
    fn string_config_ch_single() {
        let sys = MomentSystem::new(
            Preset::Ch.params::<Rational>(),
            vec![SpectralMode::new(Rational::from(2), Rational::from(0))],
        )
        .unwrap();
        let cfg = string_config(&sys, &q(0, 1));
        assert!(cfg.valid);
        assert_eq!(cfg.y, vec![q(1, 3)]);
        assert_eq!(cfg.g, vec![q(-9, 8)]);
    }

    #[test]
    fn peakon_state_single_at_zero() {
        let st = peakon_state(&mixed_f(&[1.0]), 0.0);
        assert!(st.valid);
        assert_relative_eq!(st.x[0], 0.5 * 2.0f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(st.m[0], -2.0, max_relative = 1e-15);
    }

    /// Printed two-peakon closed form at t = 1/2.
    #[test]
    fn peakon_state_two_at_half() {
        let ex = exact_peakon(&mixed_q(&[1, -1]), &q(1, 2));
        assert!(ex.valid);
        assert_eq!(ex.e2x, vec![q(36, 41), q(20, 1)]);
        assert_eq!(ex.m, vec![q(41, 21), q(5, 7)]);
    }

    #[test]
    fn peakon_state_single_at_one() {
        let ex = exact_peakon(&mixed_q(&[1]), &q(1, 1));
        assert_eq!(ex.m, vec![q(2, 3)]);
        assert_eq!(ex.e2x, vec![q(18, 1)]);
        assert_relative_eq!(ex.x_f64(0), 0.5 * 18.0f64.ln(), max_relative = 1e-15);
    }

    #[test]
    fn eval_u_examples() {
        let st = peakon_state(&mixed_f(&[1.0]), 0.0);
        // u(x_1) = m_1 / 2
        assert_relative_eq!(st.eval_u(st.x[0]), -1.0, max_relative = 1e-14);
        // exponential decay one log-unit away
        let shifted = st.eval_u(st.x[0] + 2.0f64.ln());
        assert_relative_eq!(shifted, st.m[0] / 8.0, max_relative = 1e-14);
    }

    #[test]
    fn u_x_average_examples() {
        let single = peakon_state(&mixed_f(&[1.0]), 0.0);
        assert_eq!(single.u_x_average(0), 0.0);

        let two = peakon_state(&mixed_f(&[1.0, -1.0]), 0.5);
        let gap = (2.0 * (two.x[0] - two.x[1])).exp();
        assert_relative_eq!(two.u_x_average(0), two.m[1] * gap, max_relative = 1e-13);
        assert_relative_eq!(two.u_x_average(1), -two.m[0] * gap, max_relative = 1e-13);
    }

    #[test]
    fn tail_integral_examples() {
        let st = peakon_state(&mixed_f(&[1.0]), 0.0);
        // single peak: 1/2 m - 1/4 m = m/4
        assert_relative_eq!(st.tail_integral(0), st.m[0] / 4.0, max_relative = 1e-14);
    }

    /// Closed-form tail integral against adaptive Simpson quadrature of u.
    #[test]
    fn tail_integral_matches_quadrature() {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, eps: f64) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (left + right - whole).abs() < 15.0 * eps {
                left + right + (left + right - whole) / 15.0
            } else {
                simpson(f, a, m, fa, flm, fm, eps / 2.0) + simpson(f, m, b, fm, frm, fb, eps / 2.0)
            }
        }

        let st = peakon_state(&mixed_f(&[1.0, -1.0]), 0.5);
        for j in 0..2 {
            let a = st.x[j];
            let b = a + 40.0; // exp(-80) tail is negligible
            let f = |x: f64| st.eval_u(x);
            let quad = simpson(&f, a, b, f(a), f(0.5 * (a + b)), f(b), 1e-12);
            assert!((st.tail_integral(j) - quad).abs() < 1e-10, "peak {j}");
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let st = PeakonState::from_parts(0.0, vec![0.0], vec![2.0]);
        assert_eq!(st.hamiltonian(), 1.0);
        let neg = PeakonState::from_parts(0.0, vec![0.0], vec![-2.0]);
        assert_eq!(neg.hamiltonian(), 1.0);

        let two = peakon_state(&mixed_f(&[1.0, -1.0]), 0.5);
        let (m1, m2) = (two.m[0], two.m[1]);
        let expect =
            0.25 * (m1 * m1 + m2 * m2 + 2.0 * m1 * m2 * (-2.0 * (two.x[1] - two.x[0])).exp());
        assert_relative_eq!(two.hamiltonian(), expect, max_relative = 1e-14);
    }

    #[test]
    fn tanh_round_trip() {
        let st = peakon_state(&mixed_f(&[1.0, -1.0]), 0.5);
        let cfg = string_config(&mixed_f(&[1.0, -1.0]), &0.5);
        for j in 0..2 {
            assert_relative_eq!(st.x[j].tanh(), cfg.y[j], max_relative = 1e-12);
            // m and g are mutually inverse through (1 - y^2)
            let y = cfg.y[j];
            assert_relative_eq!(st.m[j] / (1.0 - y * y), cfg.g[j], max_relative = 1e-12);
        }
    }

    #[test]
    fn exact_jump_is_minus_two_m() {
        let ex = exact_peakon(&mixed_q(&[1, -1]), &q(1, 2));
        for j in 0..2 {
            let jump = ex.u_x_jump(j);
            assert_eq!(jump, ex.m[j].mul(&Rational::from(-2)));
        }
    }

    #[test]
    fn exact_functionals_match_float() {
        let ex = exact_peakon(&mixed_q(&[1, -1]), &q(3, 8));
        assert!(ex.valid);
        let st = ex.to_state();
        for j in 0..2 {
            assert_relative_eq!(
                ex.u_at_peak(j).to_f64(),
                st.eval_u(st.x[j]),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                ex.u_x_average(j).to_f64(),
                st.u_x_average(j),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                ex.tail_integral(j).to_f64(),
                st.tail_integral(j),
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(ex.hamiltonian().to_f64(), st.hamiltonian(), max_relative = 1e-12);
    }

    /// On an interval with no turning point the ordering stays strict.
    #[test]
    fn ordering_monotonicity_by_dense_sampling() {
        let sys = mixed_f(&[1.0, -1.0]);
        for i in 0..=200 {
            let t = 0.26 + 0.6 * i as f64 / 200.0;
            let st = peakon_state(&sys, t);
            assert!(st.valid, "t = {t}: {:?}", st.reason);
            assert!(st.x[0] < st.x[1]);
        }
    }

    #[test]
    fn peakon_state_json_round_trip() {
        let st = peakon_state(&mixed_f(&[1.0]), 0.0);
        let text = serde_json::to_string(&st).unwrap();
        let back: PeakonState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, st);
    }
}
