//! Acceptance suite: one test per criterion, each printing a PASS line and
//! pinning the stated tolerance and runtime budget in code.
//!
//! Run with `cargo test -p gnch-cli --test acceptance -- --nocapture` to see
//! the per-criterion lines.

use std::process::{Command, Output};
use std::time::Instant;

use gnch::dynamics::{compare_closed_form, integrate, OdeSettings};
use gnch::hankel::battery::{run_battery, BatteryConfig};
use gnch::hankel::check_delta_derivatives;
use gnch::moments::{MomentSystem, Preset, SpectralMode};
use gnch::numeric::{Rational, Scalar};
use gnch::peakon::{exact_peakon, peakon_state};
use gnch::spectral::{drift_fit, expected_spectrum, string_eigenvalues};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn mixed_exact(lams: &[i64]) -> MomentSystem<Rational> {
    MomentSystem::new(
        Preset::Mixed.params(),
        lams.iter()
            .map(|&l| SpectralMode::new(Rational::from(l), Rational::from(0)))
            .collect(),
    )
    .unwrap()
}

fn system_f64(preset: Preset, lams: &[f64]) -> MomentSystem<f64> {
    MomentSystem::new(
        preset.params(),
        lams.iter().map(|&l| SpectralMode::new(l, 0.0)).collect(),
    )
    .unwrap()
}

fn gnch_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnch"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Criterion 1: single-peak closed form, x = log(2 (4t-1)^2)/2 and
/// m = 2/(4t-1), exact in exact mode and to 1e-12 relative in float mode,
/// at t in {-1/2, 0, 1/2, 1}. Runtime < 0.1 s.
#[test]
fn criterion_1_one_peakon_regression() {
    let start = Instant::now();
    let exact_sys = mixed_exact(&[1]);
    let float_sys = exact_sys.to_f64();
    let times = [q(-1, 2), q(0, 1), q(1, 2), q(1, 1)];
    for t in &times {
        let p = q(4, 1).mul(t).sub(&q(1, 1));
        // exact path: compare through exp(2x), which is rational
        let data = exact_peakon(&exact_sys, t);
        assert!(data.valid);
        assert_eq!(data.m[0], q(2, 1).div(&p), "m at t = {t}");
        assert_eq!(data.e2x[0], q(2, 1).mul(&p).mul(&p), "exp(2x) at t = {t}");

        // float path
        let tf = t.to_f64();
        let st = peakon_state(&float_sys, tf);
        let pf = 4.0 * tf - 1.0;
        let x_ref = 0.5 * (2.0 * pf * pf).ln();
        let m_ref = 2.0 / pf;
        assert!((st.x[0] - x_ref).abs() <= 1e-12 * x_ref.abs().max(1.0));
        assert!((st.m[0] - m_ref).abs() <= 1e-12 * m_ref.abs());
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 0.1, "took {elapsed:?}");
    eprintln!("ACCEPTANCE 1 (one-peakon closed form, 4 times, exact + 1e-12 float): PASS in {elapsed:?}");
}

/// Criterion 2: two-peak closed form (four printed formulas in p = 4t-1,
/// q = 4t+1) plus the amplitude sign table, at t in
/// {-1/2, -1/8, 1/8, 1/2}. Runtime < 0.1 s.
#[test]
fn criterion_2_two_peakon_regression() {
    let start = Instant::now();
    let exact_sys = mixed_exact(&[1, -1]);
    let float_sys = exact_sys.to_f64();
    // (t, m1 < 0, m2 < 0)
    let cases = [
        (q(-1, 2), true, true),
        (q(-1, 8), false, true),
        (q(1, 8), true, false),
        (q(1, 2), false, false),
    ];
    for (t, m1_neg, m2_neg) in &cases {
        let p = q(4, 1).mul(t).sub(&q(1, 1));
        let u = q(4, 1).mul(t).add(&q(1, 1));
        let (p2, u2) = (p.mul(&p), u.mul(&u));
        let (p3, u3) = (p2.mul(&p), u2.mul(&u));
        let (p4, u4) = (p2.mul(&p2), u2.mul(&u2));
        let e2x1 = q(8, 1).mul(&p2).mul(&u2).div(&p4.add(&u4));
        let e2x2 = q(2, 1).mul(&p2.add(&u2));
        let m1 = q(2, 1).mul(&p4.add(&u4)).div(&u.mul(&p).mul(&u3.add(&p3)));
        let m2 = q(2, 1).mul(&p2.add(&u2)).div(&u3.add(&p3));

        let data = exact_peakon(&exact_sys, t);
        assert!(data.valid, "t = {t}");
        assert_eq!(data.e2x, vec![e2x1, e2x2], "positions at t = {t}");
        assert_eq!(data.m, vec![m1.clone(), m2.clone()], "amplitudes at t = {t}");
        assert_eq!(data.m[0].is_negative(), *m1_neg, "sign of m1 at t = {t}");
        assert_eq!(data.m[1].is_negative(), *m2_neg, "sign of m2 at t = {t}");

        // float path against the same formulas
        let tf = t.to_f64();
        let st = peakon_state(&float_sys, tf);
        for (j, (e2x, m)) in [(e2x1, m1), (e2x2, m2)].iter().enumerate() {
            let x_ref = 0.5 * e2x.to_f64().ln();
            assert!((st.x[j] - x_ref).abs() <= 1e-12 * x_ref.abs().max(1.0), "x{j} at t = {t}");
            assert!(
                (st.m[j] - m.to_f64()).abs() <= 1e-12 * m.to_f64().abs(),
                "m{j} at t = {t}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 0.1, "took {elapsed:?}");
    eprintln!("ACCEPTANCE 2 (two-peakon closed form + sign table, 4 times): PASS in {elapsed:?}");
}

/// Criterion 3: 200 seeded exact-rational trials of the full identity
/// battery (17 relations across the five families), every residual exactly
/// zero. Runtime < 10 s.
#[test]
fn criterion_3_identity_battery() {
    let start = Instant::now();
    let report = run_battery(&BatteryConfig { trials: 200, max_n: 5, seed: 7, corrupt: false });
    assert!(report.all_passed(), "first failure: {:?}", report.first_failure);
    assert_eq!(report.counts.len(), 17);
    for count in &report.counts {
        assert_eq!(count.failures, 0, "{}", count.name);
        assert!(count.passes >= 200, "{}", count.name);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    eprintln!("ACCEPTANCE 3 (identity battery, 200 exact trials, 17 relations): PASS in {elapsed:?}");
}

/// Criterion 4: the determinant derivative law and the moment evolution law
/// are zero polynomials over the polynomial moments, for N <= 3,
/// 1 <= k <= N+1, 0 <= l <= 3. Runtime < 5 s.
#[test]
fn criterion_4_derivative_lemma() {
    let start = Instant::now();
    for lams in [vec![1], vec![1, -1], vec![1, -1, 2]] {
        let sys = mixed_exact(&lams);
        let n = sys.n_peakons() as i64;
        for k in 1..=n + 1 {
            for l in 0..=3 {
                let rep = check_delta_derivatives(&sys, k, l).unwrap();
                assert!(rep.all_exactly_zero(), "N={n} k={k} l={l}: {rep:?}");
            }
        }
        for k in 0..=2 * n + 2 {
            assert!(
                sys.moment_ode_residual_poly(k).unwrap().is_zero(),
                "moment law at N={n}, k={k}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    eprintln!("ACCEPTANCE 4 (derivative law + moment law, zero polynomials, N <= 3): PASS in {elapsed:?}");
}

/// Criterion 5: direct integration matches the closed form to 1e-7 on three
/// windows at >= 4096 steps, and the deviation scales as h^4 (ratio 16 within
/// a factor of 2 under step halving, measured where truncation error is above
/// the f64 rounding floor). Runtime < 2 s per case.
#[test]
fn criterion_5_ode_cross_validation() {
    let cases: [(MomentSystem<f64>, f64, f64, usize, usize); 3] = [
        (system_f64(Preset::Mixed, &[1.0]), 0.5, 0.9, 128, 256),
        (system_f64(Preset::Mixed, &[1.0, -1.0]), 0.3, 0.45, 128, 256),
        (system_f64(Preset::Ch, &[1.0, 3.0]), 0.0, 1.0, 64, 128),
    ];
    for (idx, (sys, t0, t1, coarse, fine)) in cases.iter().enumerate() {
        let start = Instant::now();
        let report = compare_closed_form(sys, &OdeSettings::new(*t0, *t1, 4096)).unwrap();
        let worst = report.max_dev_x.max(report.max_dev_m);
        assert!(worst <= 1e-7, "case {idx}: deviation {worst:.3e}");

        let dev_coarse = {
            let r = compare_closed_form(sys, &OdeSettings::new(*t0, *t1, *coarse)).unwrap();
            r.max_dev_x.max(r.max_dev_m)
        };
        let dev_fine = {
            let r = compare_closed_form(sys, &OdeSettings::new(*t0, *t1, *fine)).unwrap();
            r.max_dev_x.max(r.max_dev_m)
        };
        let ratio = dev_coarse / dev_fine;
        assert!(
            (8.0..=32.0).contains(&ratio),
            "case {idx}: fourth-order ratio {ratio:.2} ({dev_coarse:.3e} / {dev_fine:.3e})"
        );
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 2.0, "case {idx} took {elapsed:?}");
        eprintln!(
            "ACCEPTANCE 5 case {} (window [{t0}, {t1}], 4096 steps, dev {worst:.2e}, h^4 ratio {ratio:.1}): PASS in {elapsed:?}",
            ["a", "b", "c"][idx]
        );
    }
}

/// Criterion 6: the interaction energy is conserved to 1e-10 relative along
/// the r = 0 window (case c); no conservation is asserted for r != 0.
#[test]
fn criterion_6_hamiltonian_conservation() {
    let sys = system_f64(Preset::Ch, &[1.0, 3.0]);
    let initial = peakon_state(&sys, 0.0);
    let traj = integrate(sys.params(), &initial, &OdeSettings::new(0.0, 1.0, 4096)).unwrap();
    let h0 = traj.states[0].hamiltonian();
    let variation = traj
        .states
        .iter()
        .map(|s| (s.hamiltonian() - h0).abs())
        .fold(0.0, f64::max)
        / h0.abs();
    assert!(variation <= 1e-10, "relative variation {variation:.3e}");

    // r != 0: the same functional drifts; recorded, not asserted
    let mixed = system_f64(Preset::Mixed, &[1.0]);
    let initial = peakon_state(&mixed, 0.5);
    let traj = integrate(mixed.params(), &initial, &OdeSettings::new(0.5, 0.9, 1024)).unwrap();
    let h0 = traj.states[0].hamiltonian();
    let drift = traj
        .states
        .iter()
        .map(|s| (s.hamiltonian() - h0).abs())
        .fold(0.0, f64::max)
        / h0.abs();
    eprintln!(
        "ACCEPTANCE 6 (energy conserved to {variation:.2e} at r = 0; drift {drift:.2e} at r != 0, not asserted): PASS"
    );
}

/// Criterion 7: spectral drift slopes equal -r (mixed: -4, nonisospectral:
/// -1) to 1e-8, the r = 0 preset is isospectral to 1e-10, and the string
/// spectrum round-trips the spectral data to 1e-9. Runtime < 1 s.
#[test]
fn criterion_7_nonisospectral_drift() {
    let start = Instant::now();

    let mixed1 = system_f64(Preset::Mixed, &[1.0]);
    let report = drift_fit(&mixed1, &[0.4, 0.5, 0.6]).unwrap();
    for b in &report.branches {
        assert!((b.slope + 4.0).abs() <= 1e-8, "{b:?}");
        assert!(b.residual <= 1e-8, "{b:?}");
    }

    let mixed2 = system_f64(Preset::Mixed, &[1.0, -1.0]);
    let report = drift_fit(&mixed2, &[0.4, 0.5, 0.6]).unwrap();
    for b in &report.branches {
        assert!((b.slope + 4.0).abs() <= 1e-8, "{b:?}");
    }

    let noniso = system_f64(Preset::Noniso, &[1.0]);
    let report = drift_fit(&noniso, &[0.1, 0.2, 0.3]).unwrap();
    for b in &report.branches {
        assert!((b.slope + 1.0).abs() <= 1e-8, "{b:?}");
    }

    let ch = system_f64(Preset::Ch, &[1.0, 3.0]);
    let report = drift_fit(&ch, &[0.0, 0.35, 0.7]).unwrap();
    for b in &report.branches {
        assert!(b.slope.abs() <= 1e-10, "{b:?}");
    }

    // round trip: string spectrum of the reconstructed configuration
    for (sys, times) in [
        (&mixed2, [0.4, 0.5, 0.6]),
        (&noniso, [0.1, 0.2, 0.3]),
        (&ch, [0.0, 0.35, 0.7]),
    ] {
        for t in times {
            let cfg = gnch::peakon::string_config(sys, &t);
            let roots = string_eigenvalues(&cfg).unwrap();
            let expect = expected_spectrum(sys, t);
            for (root, reference) in roots.iter().zip(&expect) {
                assert!((root - reference).abs() <= 1e-9, "t = {t}: {roots:?} vs {expect:?}");
            }
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    eprintln!("ACCEPTANCE 7 (drift slopes -4/-1/0, round-trip spectrum to 1e-9): PASS in {elapsed:?}");
}

/// Criterion 8: on every valid sampled state the slope jump across each peak
/// equals -2 m_j -- exactly in exact arithmetic, where exp(2 x_j) is
/// rational.
#[test]
fn criterion_8_weak_form_weight_check() {
    let systems = [mixed_exact(&[1]), mixed_exact(&[1, -1]), mixed_exact(&[1, -1, 2])];
    let mut checked = 0usize;
    for sys in &systems {
        for num in -10..=10 {
            let t = q(num, 8);
            let data = exact_peakon(sys, &t);
            if !data.valid {
                continue;
            }
            for j in 0..data.n() {
                assert_eq!(
                    data.u_x_jump(j),
                    data.m[j].mul(&Rational::from(-2)),
                    "exact jump at peak {j}, t = {t}"
                );
                checked += 1;
            }
        }
        // float states from the same sweep, at rounding accuracy
        let fsys = sys.to_f64();
        for num in -10..=10 {
            let t = num as f64 / 8.0;
            let st = peakon_state(&fsys, t);
            if !st.valid {
                continue;
            }
            for j in 0..st.n() {
                let jump = st.u_x_jump(j);
                assert!(
                    (jump + 2.0 * st.m[j]).abs() <= 1e-12 * st.m[j].abs().max(1.0),
                    "float jump at peak {j}, t = {t}"
                );
            }
        }
    }
    assert!(checked > 50, "only {checked} exact states sampled");
    eprintln!("ACCEPTANCE 8 (slope jump = -2m on {checked} exact peak samples + float sweep): PASS");
}

/// Criterion 9: the figure exports contain the peaks at the closed-form
/// locations and heights to 1e-10 at every caption time, and the eval sweeps
/// report the turning times as invalid.
#[test]
fn criterion_9_figure_data_and_turning_points() {
    // figure 1: single peak at t in {-0.5, 0, 0.5, 1}
    let fig1 = gnch_bin(&["figure", "--fig", "1"]);
    assert_eq!(fig1.status.code(), Some(0));
    check_figure_peaks(
        &String::from_utf8_lossy(&fig1.stdout),
        &system_f64(Preset::Mixed, &[1.0]),
        &[-0.5, 0.0, 0.5, 1.0],
    );

    // figure 2: pair at t in {-0.5, -0.125, 0.125, 0.5}
    let fig2 = gnch_bin(&["figure", "--fig", "2"]);
    assert_eq!(fig2.status.code(), Some(0));
    check_figure_peaks(
        &String::from_utf8_lossy(&fig2.stdout),
        &system_f64(Preset::Mixed, &[1.0, -1.0]),
        &[-0.5, -0.125, 0.125, 0.5],
    );

    // turning-point sweeps: t = 1/4 for the single peak
    let sweep = gnch_bin(&["eval", "--preset", "mixed", "--lambda", "1", "--times", "0:1:5"]);
    assert_eq!(sweep.status.code(), Some(2));
    let text = String::from_utf8_lossy(&sweep.stdout).into_owned();
    assert!(text.lines().any(|l| l.starts_with("0.25,") && l.ends_with(",0")), "{text}");

    // t in {-1/4, 0, 1/4} for the pair
    let sweep = gnch_bin(&[
        "eval", "--preset", "mixed", "--lambda", "1,-1", "--times", "-0.5:0.5:5",
    ]);
    assert_eq!(sweep.status.code(), Some(2));
    let text = String::from_utf8_lossy(&sweep.stdout).into_owned();
    for bad in ["-0.25,", "0,", "0.25,"] {
        assert!(
            text.lines().any(|l| l.starts_with(bad) && l.ends_with(",0")),
            "expected invalid row at {bad}: {text}"
        );
    }
    eprintln!("ACCEPTANCE 9 (figure peaks at closed-form locations/heights to 1e-10; turning times flagged): PASS");
}

/// Asserts that the profile contains each closed-form peak as a sampled local
/// extremum at the right location and height.
fn check_figure_peaks(csv: &str, sys: &MomentSystem<f64>, frames: &[f64]) {
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for line in csv.lines().skip(1) {
        let mut parts = line.split(',');
        let t: f64 = parts.next().unwrap().parse().unwrap();
        let x: f64 = parts.next().unwrap().parse().unwrap();
        let u: f64 = parts.next().unwrap().parse().unwrap();
        rows.push((t, x, u));
    }
    for &t in frames {
        let frame: Vec<&(f64, f64, f64)> = rows.iter().filter(|(rt, _, _)| *rt == t).collect();
        assert!(!frame.is_empty(), "no rows for frame t = {t}");
        let st = peakon_state(sys, t);
        assert!(st.valid);
        for j in 0..st.n() {
            let peak_x = st.x[j];
            let peak_u = st.eval_u(peak_x);
            let idx = frame
                .iter()
                .position(|(_, x, _)| (x - peak_x).abs() <= 1e-10)
                .unwrap_or_else(|| panic!("no sample at peak {j} of frame t = {t}"));
            let (_, _, u) = frame[idx];
            assert!(
                (u - peak_u).abs() <= 1e-10,
                "height mismatch at peak {j}, t = {t}: {u} vs {peak_u}"
            );
            // cusp is a local extremum of the sampled profile
            if idx > 0 && idx + 1 < frame.len() {
                let before = frame[idx - 1].2;
                let after = frame[idx + 1].2;
                if st.m[j] > 0.0 {
                    assert!(*u >= before && *u >= after, "peak {j} at t = {t} not a max");
                } else {
                    assert!(*u <= before && *u <= after, "peak {j} at t = {t} not a min");
                }
            }
        }
    }
}
