//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary. Exit status is zero unless
//! `KERRJ_ACCEPTANCE_STRICT=1` is set and some criterion failed.

use std::cell::Cell;
use std::time::{Duration, Instant};

use kerrjunction::langevin::{analytic_spectrum, drive_for_population};
use kerrjunction::lindblad::{emission_spectrum, gn_point, gn_scan, steady_state, two_time_correlator, Liouvillian, DEFAULT_CUTOFF};
use kerrjunction::propagator::{run_pulse, GridSpec};
use kerrjunction::scattering::{emission_density, emission_density_integral, local_maxima, pair_amplitude, pair_spectral_density, single_amplitudes};
use kerrjunction::spectrum::{default_grid, fwhm_one_side, relative_l2, uniform_grid};
use kerrjunction::{CavityParams, Channel, Envelope, Pair, PulseSpec, C64};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn sym(u: f64) -> CavityParams<f64> {
    CavityParams::symmetric(0.0, u, 1.0)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let worst = Cell::new(0.0f64);
    let mut runner = TestRunner::new(Config { cases: 10_000, failure_persistence: None, ..Config::default() });
    let strategy = (-20.0..20.0f64, -50.0..50.0f64, 1e-3..10.0f64, 1e-3..10.0f64, -40.0..40.0f64);
    let res = runner.run(&strategy, |(wc, u, gl, gr, w0)| {
        let c = single_amplitudes(&CavityParams::new(wc, u, gl, gr), w0);
        let err = (c.c_l.norm_sqr() + c.c_r.norm_sqr() - 1.0).abs();
        worst.set(worst.get().max(err));
        prop_assert!(err <= 1e-12);
        Ok(())
    });
    let el = t.elapsed();
    outcome(
        res.is_ok() && within(el, 1.0),
        format!("max ||c_L|^2+|c_R|^2-1| = {:.2e} over 10^4 draws (tol 1e-12), {:.3}s (limit 1s)", worst.get(), el.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let at = |u: f64| pair_amplitude(&sym(u), 0.0, Pair::RR, 0.0).norm_sqr();
    let a4 = at(4.0);
    let big = at(1e4);
    let el = t.elapsed();
    outcome(
        (a4 - 1.0 / 17.0).abs() < 1e-12 && big < 1e-3 && within(el, 1.0),
        format!("|a_RR(0)|^2 = {a4:.15} at u=4 (1/17, tol 1e-12); {big:.3e} at u=1e4 (tol < 1e-3), {:.3}s", el.as_secs_f64()),
    )
}

/// `int F~ dw` by Simpson's rule after `w = omega_c + gamma tan(theta)`.
fn emission_integral_oracle(p: &CavityParams<f64>, omega_0: f64) -> f64 {
    let n = 20_000;
    let (lo, hi) = (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
    let h = (hi - lo) / n as f64;
    let g = p.gamma();
    let f = |th: f64| {
        let c = th.cos();
        if c.abs() < 1e-300 {
            return 0.0;
        }
        emission_density(p, omega_0, p.omega_c + g * th.tan()) * g / (c * c)
    };
    let mut s = f(lo) + f(hi);
    for k in 1..n {
        s += f(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let p = sym(4.0);
    let axis = uniform_grid(-12.0, 18.0, 101).unwrap();
    let cell = axis[1] - axis[0];
    let mut rows = 0;
    let mut ridge_miss = 0;
    let mut worst_shift: f64 = 0.0;
    let mut worst_int: f64 = 0.0;
    for &w0 in &axis {
        let s = pair_spectral_density(&p, w0, 1.0, Channel::R, Channel::L, &axis).unwrap();
        let exact = emission_density_integral(&p, w0);
        worst_int = worst_int.max((emission_integral_oracle(&p, w0) / exact - 1.0).abs());
        let partner = 2.0 * w0 - p.omega_c;
        let det = p.detuning(w0);
        if det.abs() < 3.5 || partner < axis[0] || partner > axis[100] {
            continue;
        }
        rows += 1;
        let y = &s.continuous;
        let mut peaks = local_maxima(y);
        // ridges landing on the map boundary
        if y[0] > y[1] {
            peaks.insert(0, 0);
        }
        if y[100] > y[99] {
            peaks.push(100);
        }
        let mut hit = |target: f64| {
            let best = peaks.iter().map(|&k| (axis[k] - target).abs()).fold(f64::INFINITY, f64::min);
            worst_shift = worst_shift.max(best);
            best <= cell + 1e-12
        };
        let ok = peaks.len() == 2 && hit(p.omega_c) & hit(partner);
        if !ok {
            ridge_miss += 1;
        }
    }
    let el = t.elapsed();
    outcome(
        ridge_miss == 0 && worst_int < 1e-4 && within(el, 5.0),
        format!(
            "{rows} resolved rows, {ridge_miss} missing a ridge, worst ridge offset {worst_shift:.3} (cell {cell:.2}); worst integral error {worst_int:.2e} (tol 1e-4); {:.2}s",
            el.as_secs_f64()
        ),
    )
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let p = sym(4.0);
    let tau = 7.0;
    let omegas: Vec<f64> = (0..=48).map(|k| -4.0 + 0.25 * k as f64).collect();
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, env) in [("(ii)", Envelope::UncorrelatedGaussian), ("(iii)", Envelope::CorrelatedGaussian)] {
        let mut dev: f64 = 0.0;
        let mut at = 0.0;
        let mut drift: f64 = 0.0;
        for &w0 in &omegas {
            let pulse = PulseSpec::new(w0, tau, env);
            let run = match run_pulse(&p, &pulse, GridSpec::for_pulse(&p, &pulse)) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("{name} at omega0={w0}: {e}")),
            };
            drift = drift.max(run.norm_drift);
            for pair in Pair::ALL {
                let d = (run.amplitudes.coincidence_ratio(pair) - pair_amplitude(&p, w0, pair, 0.0).norm_sqr()).abs();
                if d > dev {
                    dev = d;
                    at = w0;
                }
            }
        }
        pass &= dev < 0.05 && drift < 1e-6;
        parts.push(format!("{name} max dev {dev:.4} at omega0={at} (tol 0.05), drift {drift:.1e} (tol 1e-6)"));
    }
    let mut halving: f64 = 0.0;
    for env in [Envelope::UncorrelatedGaussian, Envelope::CorrelatedGaussian] {
        for w0 in [0.0, 3.65, 4.0] {
            let pulse = PulseSpec::new(w0, tau, env);
            let grid = GridSpec::for_pulse(&p, &pulse);
            let coarse = run_pulse(&p, &pulse, grid).map(|r| Pair::ALL.map(|q| r.amplitudes.coincidence_ratio(q)));
            let fine = run_pulse(&p, &pulse, GridSpec::with_step(&p, &pulse, grid.h / 2.0)).map(|r| Pair::ALL.map(|q| r.amplitudes.coincidence_ratio(q)));
            match (coarse, fine) {
                (Ok(a), Ok(b)) => (0..3).for_each(|i| halving = halving.max((a[i] - b[i]).abs())),
                (Err(e), _) | (_, Err(e)) => return outcome(false, format!("halving run at omega0={w0}: {e}")),
            }
        }
    }
    pass &= halving < 1e-3;
    let el = t.elapsed();
    pass &= within(el, 600.0);
    parts.push(format!("halving change {halving:.1e} (tol 1e-3); {:.0}s (limit 600s)", el.as_secs_f64()));
    outcome(pass, parts.join("; "))
}

/// Blue-flank FWHM of the transmitted-pair coincidence feature near `omega_c + u`.
fn transmission_width(p: &CavityParams<f64>, tau: f64) -> Result<(f64, f64), String> {
    let omegas: Vec<f64> = (0..=40).map(|k| 2.5 + 0.1 * k as f64).collect();
    let mut y = Vec::with_capacity(omegas.len());
    for &w0 in &omegas {
        let pulse = PulseSpec::new(w0, tau, Envelope::UncorrelatedGaussian);
        let run = run_pulse(p, &pulse, GridSpec::for_pulse(p, &pulse)).map_err(|e| e.to_string())?;
        y.push(run.amplitudes.coincidence_ratio(Pair::RR));
    }
    let peak = (0..y.len()).fold(0, |b, k| if y[k] > y[b] { k } else { b });
    let w = fwhm_one_side(&omegas, &y, peak, 1).ok_or("no half-maximum crossing")?;
    Ok((omegas[peak], w))
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let p = sym(4.0);
    let short = transmission_width(&p, 1.0);
    let long = transmission_width(&p, 7.0);
    let el = t.elapsed();
    match (short, long) {
        (Ok((c1, w1)), Ok((c7, w7))) => outcome(
            w1 > w7 && within(el, 600.0),
            format!("FWHM {w1:.3} at tau=1 (peak {c1:.1}) vs {w7:.3} at tau=7 (peak {c7:.1}); {:.0}s", el.as_secs_f64()),
        ),
        (Err(e), _) | (_, Err(e)) => outcome(false, e),
    }
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let p = sym(4.0);
    let f = drive_for_population(&p, -4.0, 5.9e-4);
    let rho = match Liouvillian::new(&p, -4.0, C64::new(f, 0.0), DEFAULT_CUTOFF).and_then(|l| steady_state(&l)) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let n = rho.mean_field().norm_sqr();
    let tr = (rho.trace() - C64::new(1.0, 0.0)).norm();
    let herm = rho.hermiticity_defect();
    let min_eig = rho.min_eigenvalue();
    let el = t.elapsed();
    outcome(
        (n / 5.9e-4 - 1.0).abs() < 0.02 && rho.check().is_ok() && within(el, 10.0),
        format!(
            "f={f:.5}, |<a>|^2={n:.4e} (5.9e-4 +- 2%); |Tr-1|={tr:.1e}, hermiticity {herm:.1e}, min eigenvalue {min_eig:.1e}; {:.2}s",
            el.as_secs_f64()
        ),
    )
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let p = sym(4.0);
    let w0 = -4.0;
    let f = drive_for_population(&p, w0, 5.9e-4);
    let grid = default_grid(w0, 1.0, 4.0);
    let numeric = Liouvillian::new(&p, w0, C64::new(f, 0.0), DEFAULT_CUTOFF).and_then(|l| {
        let rho = steady_state(&l)?;
        let c = two_time_correlator(&rho, &l, 30.0, 0.02)?;
        emission_spectrum(&c, p.gamma_r, &grid)
    });
    let numeric = match numeric {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let theory = pair_spectral_density(&p, w0, 1.0, Channel::R, Channel::L, &grid).unwrap();
    let err = relative_l2(&numeric.normalized(), &theory.normalized());
    let el = t.elapsed();
    outcome(err < 0.05 && within(el, 60.0), format!("normalized relative L2 {err:.4} (tol 0.05); {:.1}s", el.as_secs_f64()))
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let p = sym(4.0);
    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    let mut max_n: f64 = 0.0;
    for k in 0..=28 {
        let det = -6.0 + 0.5 * k as f64;
        let row = match gn_point(&p, C64::new(0.02, 0.0), det, DEFAULT_CUTOFF) {
            Ok(r) => r,
            Err(e) => return outcome(false, e.to_string()),
        };
        max_n = max_n.max(row.photon_number);
        let oracle = (det * det + 1.0) / ((det - 4.0) * (det - 4.0) + 1.0);
        let rel = (row.g2 / oracle - 1.0).abs();
        if rel > worst {
            worst = rel;
            at = det;
        }
    }
    let f = drive_for_population(&p, -4.0, 5.9e-4);
    let g2 = gn_point(&p, C64::new(f, 0.0), -4.0, DEFAULT_CUTOFF).map(|r| r.g2).unwrap_or(f64::NAN);
    let rel17 = (g2 / (17.0 / 65.0) - 1.0).abs();
    let el = t.elapsed();
    outcome(
        worst < 0.02 && rel17 < 0.02 && max_n < 1e-3 && within(el, 120.0),
        format!(
            "max rel error {worst:.4} at Delta={at} (tol 0.02, max <n> {max_n:.1e}); g2(-4)={g2:.5} vs 17/65 rel {rel17:.4}; {:.2}s",
            el.as_secs_f64()
        ),
    )
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let p = sym(4.0);
    let dets: Vec<f64> = (0..=320).map(|k| -2.0 + 0.05 * k as f64).collect();
    let rows = match gn_scan(&p, C64::new(0.02, 0.0), &dets, DEFAULT_CUTOFF) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let argmax = |get: &dyn Fn(usize) -> f64| dets[(0..rows.len()).fold(0, |b, k| if get(k) > get(b) { k } else { b })];
    let peaks = [argmax(&|k| rows[k].g2), argmax(&|k| rows[k].g3), argmax(&|k| rows[k].g4)];
    let targets = [4.0, 8.0, 12.0];
    let ok = peaks.iter().zip(targets).all(|(a, b)| (a - b).abs() <= 0.5);
    let el = t.elapsed();
    outcome(
        ok && within(el, 300.0),
        format!(
            "g2/g3/g4 maxima at Delta={:.2}/{:.2}/{:.2} (targets 4/8/12, tol 0.5); {:.1}s",
            peaks[0],
            peaks[1],
            peaks[2],
            el.as_secs_f64()
        ),
    )
}

fn criterion_10() -> Outcome {
    let t = Instant::now();
    let mut identity: f64 = 0.0;
    for (u, w0, tau) in [(0.125, -1.0, 1.0), (4.0, -4.0, 7.0), (2.0, 3.3, 0.5)] {
        let p = sym(u);
        let b = C64::new(0.02, 0.01);
        let pulse = PulseSpec::new(w0, tau, Envelope::Monochromatic).with_b(b);
        let grid = default_grid(w0, 1.0, u);
        let a = analytic_spectrum(&p, &pulse, &grid).unwrap().spectrum;
        let s = pair_spectral_density(&p, w0, tau, Channel::R, Channel::L, &grid).unwrap();
        let b4 = b.norm_sqr().powi(2);
        for (x, y) in a.continuous.iter().zip(&s.continuous) {
            identity = identity.max((x / b4 - y).abs() / y.abs().max(f64::MIN_POSITIVE));
        }
        identity = identity.max((a.delta_weight / b4 - s.delta_weight).abs() / s.delta_weight);
    }

    let p = sym(0.125);
    let w0 = -1.0;
    let pulse = PulseSpec::new(w0, 1.0, Envelope::Monochromatic).with_b(C64::new(0.02, 0.0));
    let grid = default_grid(w0, 1.0, p.u);
    let theory = analytic_spectrum(&p, &pulse, &grid).unwrap();
    let numeric = Liouvillian::new(&p, w0, pulse.drive(&p), DEFAULT_CUTOFF).and_then(|l| {
        let rho = steady_state(&l)?;
        let c = two_time_correlator(&rho, &l, 40.0, 0.02)?;
        emission_spectrum(&c, p.gamma_r, &grid)
    });
    let numeric = match numeric {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let abs_err = relative_l2(&numeric.continuous, &theory.spectrum.continuous);
    let shape_err = relative_l2(&numeric.normalized(), &theory.spectrum.normalized());
    let ratio = numeric.peak().unwrap().1 / theory.spectrum.peak().unwrap().1;
    let el = t.elapsed();
    outcome(
        identity <= 1e-12 && abs_err < 0.03 && within(el, 60.0),
        format!(
            "identity max rel {identity:.1e} (tol 1e-12); Lindblad vs |b|^4 S relative L2 {abs_err:.4} (tol 0.03), peak ratio {ratio:.4}, shape-only L2 {shape_err:.4}, within_validity={}; {:.1}s",
            theory.within_validity,
            el.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let only: Option<Vec<u32>> = std::env::var("KERRJ_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    let mut ran = 0;
    for (n, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        ran += 1;
        let o = run();
        println!("criterion {n}: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(n);
        }
    }
    println!("acceptance: {} of {ran} passed; failed: {failed:?}", ran - failed.len());
    if !failed.is_empty() && std::env::var("KERRJ_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
