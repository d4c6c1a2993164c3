use super::*;
use crate::langevin::drive_for_population;
use crate::scattering::local_maxima;
use crate::spectrum::uniform_grid;

fn red_detuned() -> (CavityParams<f64>, Cx<f64>) {
    let p = CavityParams::symmetric(0.0, 4.0, 1.0);
    (p, cx(drive_for_population(&p, -4.0, 5.9e-4), 0.0))
}

#[test]
fn vacuum_is_steady_without_drive() {
    let p = CavityParams::symmetric(0.0, 0.0, 1.0);
    let l = Liouvillian::new(&p, 0.3, cx(0.0, 0.0), 6).unwrap();
    let vac = DensityMatrix::<f64>::vacuum(6);
    assert_eq!(l.apply(&vac.data).max_abs(), 0.0);
    let rho = steady_state(&l).unwrap();
    assert!(rho.data.sub(&vac.data).max_abs() < 1e-14);
}

#[test]
fn generator_is_trace_preserving() {
    let (p, f) = red_detuned();
    let l = Liouvillian::new(&p, 1.0, f * 3.0, 7).unwrap();
    let d = l.dim();
    let raw = CMat::from_fn(d, d, |r, c| cx(((r * 7 + c * 3) % 5) as f64 * 0.1, (r as f64 - c as f64) * 0.05));
    let herm = raw.add(&raw.adjoint()).add(&CMat::identity(d));
    let rho = herm.scale(re(1.0) / herm.trace());
    let tr = l.apply(&rho).trace().norm();
    assert!(tr < 1e-12, "{tr}");
}

#[test]
fn linear_cavity_mean_field() {
    let p = CavityParams::<f64>::symmetric(0.0, 0.0, 1.0);
    let f = cx(0.01f64, 0.02);
    for omega_0 in [-2.0, 0.0, 0.5, 3.0] {
        let l = Liouvillian::new(&p, omega_0, f, 8).unwrap();
        let rho = steady_state(&l).unwrap();
        let expect = f / cx(omega_0, 1.0);
        assert!((rho.mean_field() - expect).norm() < 1e-10 * expect.norm() + 1e-14);
        let n = rho.mean_field().norm_sqr();
        assert!((n - f.norm_sqr() / (omega_0 * omega_0 + 1.0)).abs() < 1e-6 * n);
        for k in 2..=4 {
            assert!((gn(&rho, k).unwrap() - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn red_detuned_steady_state() {
    let (p, f) = red_detuned();
    let l = Liouvillian::new(&p, -4.0, f, DEFAULT_CUTOFF).unwrap();
    let rho = steady_state(&l).unwrap();
    rho.check().unwrap();
    assert!(l.apply(&rho.data).max_abs() < 1e-10);
    let coherent = rho.mean_field().norm_sqr();
    assert!((coherent / 5.9e-4 - 1.0).abs() < 0.02, "{coherent}");
    assert!((rho.photon_number() / coherent - 1.0).abs() < 0.01);
    // weak-drive pair amplitude ratio (Delta^2 + gamma^2)/((Delta - u)^2 + gamma^2)
    assert!((gn(&rho, 2).unwrap() / (17.0 / 65.0) - 1.0).abs() < 0.02);
}

#[test]
fn cutoff_is_converged_at_weak_drive() {
    let (p, f) = red_detuned();
    for det in [-4.0, 4.0, 8.0] {
        let a = gn_point(&p, f, det, 8).unwrap();
        let b = gn_point(&p, f, det, 12).unwrap();
        for (x, y) in [(a.photon_number, b.photon_number), (a.g2, b.g2), (a.g3, b.g3), (a.g4, b.g4)] {
            assert!((x - y).abs() < 1e-4 * y, "{det}: {x} vs {y}");
        }
    }
}

#[test]
fn undamped_undriven_cavity_has_many_steady_states() {
    let p = CavityParams::symmetric(0.0, 1.0, 0.0);
    let l = Liouvillian::new(&p, 0.5, cx(0.0, 0.0), 3).unwrap();
    assert!(matches!(steady_state(&l), Err(Error::NonUniqueSteadyState { dimension }) if dimension >= 4));
}

#[test]
fn strong_drive_overflows_small_cutoff() {
    let p = CavityParams::symmetric(0.0, 0.0, 1.0);
    let l = Liouvillian::new(&p, 0.0, cx(1.0, 0.0), 3).unwrap();
    assert!(matches!(steady_state(&l), Err(Error::CutoffTooSmall { level: 3, .. })));
}

#[test]
fn antibunching_red_bunching_blue() {
    let (p, f) = red_detuned();
    assert!(gn_point(&p, f, -4.0, 8).unwrap().g2 < 1.0);
    assert!(gn_point(&p, f, 4.0, 8).unwrap().g2 > 1.0);
}

#[test]
fn coherence_needs_photons() {
    let vac = DensityMatrix::<f64>::vacuum(8);
    assert!(matches!(gn(&vac, 2), Err(Error::VanishingDenominator { .. })));
    let small = DensityMatrix::<f64>::vacuum(4);
    let mut s = small.clone();
    s.data[(1, 1)] = re(0.5);
    s.data[(0, 0)] = re(0.5);
    assert!(matches!(gn(&s, 2), Err(Error::CutoffTooSmall { .. })));
}

#[test]
fn propagation_keeps_invariants() {
    let (p, f) = red_detuned();
    let l = Liouvillian::new(&p, -4.0, f * 20.0, 10).unwrap();
    let traj = propagate(&l, &DensityMatrix::vacuum(10), 0.05, 200).unwrap();
    assert_eq!(traj.len(), 201);
    let last = traj.last().unwrap();
    let ss = steady_state(&l).unwrap();
    assert!(last.data.sub(&ss.data).max_abs() < 1e-4);
}

#[test]
fn undriven_correlator_vanishes() {
    let p = CavityParams::symmetric(0.0, 4.0, 1.0);
    let l = Liouvillian::new(&p, 0.0, cx(0.0, 0.0), 8).unwrap();
    let rho = steady_state(&l).unwrap();
    let c = two_time_correlator(&rho, &l, 10.0, 0.05).unwrap();
    assert!(c.values.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn correlator_starts_at_photon_number() {
    let (p, f) = red_detuned();
    let l = Liouvillian::new(&p, -4.0, f, 8).unwrap();
    let rho = steady_state(&l).unwrap();
    let c = two_time_correlator(&rho, &l, 30.0, 0.02).unwrap();
    assert!((c.values[0] - re(rho.photon_number())).norm() < 1e-10);
    assert!((c.values.last().unwrap().re - c.asymptote).abs() < 1e-12);
}

#[test]
fn regression_decays_at_linewidth() {
    // one photon in a linear cavity: C(t) = exp[(-i Delta - gamma) t]
    let p = CavityParams::symmetric(0.0, 0.0, 1.0);
    let det = 1.5;
    let l = Liouvillian::new(&p, det, cx(0.0, 0.0), 4).unwrap();
    let mut rho = DensityMatrix::<f64>::vacuum(4);
    rho.data[(0, 0)] = re(0.0);
    rho.data[(1, 1)] = re(1.0);
    let c = two_time_correlator(&rho, &l, 10.0, 0.01).unwrap();
    let (k1, k2) = (100, 600);
    let t = 5.0;
    let rate = (c.values[k1].norm() / c.values[k2].norm()).ln() / t;
    assert!((rate - 1.0).abs() < 0.01);
    let phase = (c.values[k2] / c.values[k1]).arg();
    assert!((phase - (-det * t).rem_euclid(2.0 * std::f64::consts::PI) + 2.0 * std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) < 1e-8);
}

#[test]
fn correlator_rejects_short_records() {
    let (p, f) = red_detuned();
    let l = Liouvillian::new(&p, -4.0, f, 8).unwrap();
    let rho = steady_state(&l).unwrap();
    assert!(matches!(two_time_correlator(&rho, &l, 5.0, 0.02), Err(Error::BadGrid(_))));
    let c = two_time_correlator(&rho, &l, 10.0, 0.02).unwrap();
    let grid = uniform_grid(-10.0, 10.0, 11).unwrap();
    assert!(matches!(emission_spectrum(&c, 1.0, &grid), Err(Error::UnsettledCorrelator { .. })));
}

#[test]
fn linear_cavity_emits_elastically() {
    let p = CavityParams::symmetric(0.0, 0.0, 1.0);
    let l = Liouvillian::new(&p, 1.0, cx(0.05f64, 0.0), 8).unwrap();
    let rho = steady_state(&l).unwrap();
    let c = two_time_correlator(&rho, &l, 30.0, 0.02).unwrap();
    let grid = uniform_grid(-6.0, 8.0, 701).unwrap();
    let s = emission_spectrum(&c, 1.0, &grid).unwrap();
    assert!(s.delta_weight > 0.0);
    let max = s.continuous.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(max <= 1e-8 * s.delta_weight, "{max} vs {}", s.delta_weight);
}

#[test]
fn red_detuned_spectrum_has_mixing_peaks() {
    let (p, f) = red_detuned();
    let omega_0 = -4.0;
    let l = Liouvillian::new(&p, omega_0, f, 8).unwrap();
    let rho = steady_state(&l).unwrap();
    let c = two_time_correlator(&rho, &l, 30.0, 0.02).unwrap();
    let grid = uniform_grid(-14.0, 6.0, 2001).unwrap();
    let s = emission_spectrum(&c, 1.0, &grid).unwrap();
    let peaks = local_maxima(&s.continuous);
    assert_eq!(peaks.len(), 2, "{peaks:?}");
    // the Lorentzian tails pull both maxima inwards by about gamma^2 / (2 |omega_0 - omega_c|)
    assert!((grid[peaks[0]] + 8.0).abs() < 0.25 && grid[peaks[1]].abs() < 0.25, "{} {}", grid[peaks[0]], grid[peaks[1]]);
    // mirror symmetry about the drive
    let mut worst: f64 = 0.0;
    let max = s.peak().unwrap().1;
    for k in 0..grid.len() {
        worst = worst.max((s.continuous[k] - s.continuous[grid.len() - 1 - k]).abs() / max);
    }
    assert!(worst < 0.02, "{worst}");
}
