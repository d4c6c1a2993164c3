use std::io::BufWriter;
use std::path::{Path, PathBuf};

use kerrjunction::langevin::{analytic_spectrum, cubic_residual, drive_for_population, linearize, steady_amplitude};
use kerrjunction::lindblad::{emission_spectrum, gn_point, steady_state, two_time_correlator, Liouvillian, DEFAULT_CUTOFF};
use kerrjunction::model::Validated;
use kerrjunction::propagator::{evolve, init_field, into_amplitudes, run_pulse, write_checkpoint, GridSpec};
use kerrjunction::scattering::{pair_amplitude, pair_spectral_density};
use kerrjunction::spectrum::{default_grid, SpectrumResult};
use kerrjunction::{Channel, Error, Pair, C64};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Range, RunConfig};
use crate::output::{provenance, with_path, write_file, Table};

/// Subcommand inputs after config loading and flag overrides.
pub struct Job<'a> {
    pub name: &'a str,
    pub cfg: RunConfig,
    pub model: Validated<f64>,
    pub out: &'a Path,
    pub pool: &'a rayon::ThreadPool,
}

impl Job<'_> {
    fn header(&self) -> String {
        provenance(self.name, &self.cfg)
    }

    fn gamma(&self) -> f64 {
        self.model.params.gamma()
    }

    fn omega_c(&self) -> f64 {
        self.model.params.omega_c
    }

    /// Runs `f` over `xs` on the worker pool, keeping grid order.
    fn scan<R: Send>(&self, xs: &[f64], f: impl Fn(f64) -> Result<R, Error> + Sync + Send) -> Result<Vec<R>, Error> {
        self.pool.install(|| xs.par_iter().map(|&x| f(x)).collect())
    }

    fn drive(&self) -> C64 {
        let c = &self.cfg.controls;
        let p = &self.model.params;
        if let Some(n) = c.target_population {
            return C64::new(drive_for_population(p, self.model.pulse.omega_0, n), 0.0);
        }
        match (c.drive_re, c.drive_im) {
            (None, None) => self.model.pulse.drive(p),
            (re, im) => C64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)),
        }
    }

    fn check_drive(&self) -> Result<C64, Error> {
        if let Some(n) = self.cfg.controls.target_population {
            if n.is_nan() || n < 0.0 {
                return Err(Error::Parse("target_population must be >= 0".into()));
            }
        }
        let f = self.drive();
        if !(f.re.is_finite() && f.im.is_finite()) {
            return Err(Error::Parse("drive must be finite".into()));
        }
        Ok(f)
    }

    fn cutoff(&self) -> usize {
        self.cfg.controls.cutoff.unwrap_or(DEFAULT_CUTOFF)
    }

    fn omega0_default(&self) -> Range {
        let (c, g) = (self.omega_c(), self.gamma());
        Range::new(c - 4.0 * g, c + 8.0 * g, 49)
    }

    fn spectrum_grid(&self) -> Result<Vec<f64>, Error> {
        match self.cfg.controls.omega {
            Some(r) => r.samples(),
            None => Ok(default_grid(self.model.pulse.omega_0, self.gamma(), self.model.params.u)),
        }
    }
}

fn spectrum_table(header: &str, s: &SpectrumResult<f64>) -> Table {
    let extra = [format!("delta_weight={}", s.delta_weight), format!("delta_at={}", s.delta_at)];
    let mut t = Table::new(header, &extra, "omega,S_continuous");
    for (w, v) in s.grid.iter().zip(&s.continuous) {
        t.row(&[*w, *v]);
    }
    t
}

/// Monochromatic `|a_ij(0)|^2` over a grid of carrier frequencies.
pub fn amplitudes(job: &Job) -> Result<Vec<PathBuf>, Error> {
    let grid = job.cfg.controls.omega0.unwrap_or_else(|| job.omega0_default()).samples()?;
    let p = job.model.params;
    let rows = job.scan(&grid, |w0| Ok(Pair::ALL.map(|q| pair_amplitude(&p, w0, q, 0.0).norm_sqr())))?;
    let mut t = Table::new(&job.header(), &[], "omega0,|aLL|^2,|aRR|^2,|aLR|^2");
    for (w0, r) in grid.iter().zip(rows) {
        t.row(&[*w0, r[0], r[1], r[2]]);
    }
    Ok(vec![t.write(job.out, "amplitudes.csv")?])
}

/// Continuous two-photon spectral density over a `(omega_0, omega)` map.
pub fn spectrum2(job: &Job) -> Result<Vec<PathBuf>, Error> {
    let (c, g) = (job.omega_c(), job.gamma());
    let ctl = &job.cfg.controls;
    let span = Range::new(c - 12.0 * g, c + 18.0 * g, 101);
    let w0s = ctl.omega0.unwrap_or(span).samples()?;
    let ws = ctl.omega.unwrap_or(span).samples()?;
    let output = ctl.output.unwrap_or(Channel::R);
    let p = job.model.params;
    let tau = job.model.pulse.tau;
    let rows = job.scan(&w0s, |w0| pair_spectral_density(&p, w0, tau, output, Channel::L, &ws))?;
    let mut map = Table::new(&job.header(), &[], "omega0,omega,S_continuous");
    let mut weights = Table::new(&job.header(), &[], "omega0,delta_weight");
    for (w0, s) in w0s.iter().zip(&rows) {
        weights.row(&[*w0, s.delta_weight]);
        for (w, v) in ws.iter().zip(&s.continuous) {
            map.row(&[*w0, *w, *v]);
        }
    }
    Ok(vec![map.write(job.out, "spectrum2.csv")?, weights.write(job.out, "delta_weights.csv")?])
}

/// Finite-pulse propagation. With an `omega0` range the coincidence ratios
/// are scanned; otherwise one run at the model carrier writes a cut, a
/// summary and a checkpoint of the final field.
pub fn pulse(job: &Job) -> Result<Vec<PathBuf>, Error> {
    let p = job.model.params;
    let base = job.model.pulse;
    let h = job.cfg.controls.h;
    if h.is_some_and(|h| !h.is_finite() || h <= 0.0) {
        return Err(Error::BadGrid("controls.h must be positive".into()));
    }
    let grid_for = |pulse: &kerrjunction::Pulse64| match h {
        Some(h) => GridSpec::with_step(&p, pulse, h),
        None => GridSpec::for_pulse(&p, pulse),
    };
    if let Some(r) = job.cfg.controls.omega0 {
        let w0s = r.samples()?;
        let rows = job.scan(&w0s, |w0| {
            let pulse = kerrjunction::Pulse64 { omega_0: w0, ..base };
            let run = run_pulse(&p, &pulse, grid_for(&pulse))?;
            drift_ok(run.norm_drift)?;
            Ok((Pair::ALL.map(|q| run.amplitudes.coincidence_ratio(q)), run.norm_drift))
        })?;
        let mut t = Table::new(&job.header(), &[], "omega0,|aLL|^2,|aRR|^2,|aLR|^2,norm_drift");
        for (w0, (r, drift)) in w0s.iter().zip(rows) {
            t.row(&[*w0, r[0], r[1], r[2], drift]);
        }
        return Ok(vec![t.write(job.out, "pulse_scan.csv")?]);
    }

    let grid = grid_for(&base);
    let mut field = init_field(&base, grid)?;
    let drift = evolve(&mut field, &p, grid.s_max())?;
    drift_ok(drift)?;
    let ck_path = job.out.join("checkpoint.kjcp");
    let file = std::fs::File::create(&ck_path).map_err(|e| with_path(e, &ck_path))?;
    write_checkpoint(&field, BufWriter::new(file))?;
    let amps = into_amplitudes(field, &p)?;

    let max_d = job.cfg.controls.max_d.unwrap_or(6.0 / job.gamma());
    let mut cut = Table::new(&job.header(), &[], "d,|a_LL|^2,|a_RR|^2,|a_LR|^2");
    for row in amps.cut(max_d) {
        cut.row(&[row.d, row.ll, row.rr, row.lr]);
    }
    let ratio = |q| amps.coincidence_ratio(q);
    let mono = |q| pair_amplitude(&p, base.omega_0, q, 0.0).norm_sqr();
    let summary = json!({
        "tool": format!("kerrjunction {}", env!("CARGO_PKG_VERSION")),
        "model": job.cfg.model,
        "controls": job.cfg.controls,
        "h": grid.h,
        "s_min": grid.s_min,
        "bins": grid.n_bins,
        "norm_drift": drift,
        "coincidence": {"LL": ratio(Pair::LL), "RR": ratio(Pair::RR), "LR": ratio(Pair::LR)},
        "monochromatic": {"LL": mono(Pair::LL), "RR": mono(Pair::RR), "LR": mono(Pair::LR)},
    });
    Ok(vec![
        cut.write(job.out, "pulse_cut.csv")?,
        write_file(job.out, "pulse_summary.json", pretty(&summary).as_bytes())?,
        ck_path,
    ])
}

fn drift_ok(drift: f64) -> Result<(), Error> {
    if drift > 1e-6 {
        return Err(Error::UnstableStep { drift });
    }
    Ok(())
}

/// Steady-state emission spectrum of the classically driven cavity.
pub fn emission(job: &Job) -> Result<Vec<PathBuf>, Error> {
    let p = job.model.params;
    let ctl = &job.cfg.controls;
    let grid = job.spectrum_grid()?;
    let l = Liouvillian::new(&p, job.model.pulse.omega_0, job.check_drive()?, job.cutoff())?;
    let rho = steady_state(&l)?;
    let corr = two_time_correlator(&rho, &l, ctl.t_max.unwrap_or(30.0 / job.gamma()), ctl.dt.unwrap_or(0.02 / job.gamma()))?;
    let s = emission_spectrum(&corr, p.gamma_r, &grid)?;
    Ok(vec![spectrum_table(&job.header(), &s).write(job.out, "emission.csv")?])
}

/// `g^(2..4)` against drive detuning at fixed drive strength.
pub fn gn(job: &Job) -> Result<Vec<PathBuf>, Error> {
    let p = job.model.params;
    let g = job.gamma();
    let dets = job.cfg.controls.detuning.unwrap_or(Range::new(-2.0 * g, 14.0 * g, 321)).samples()?;
    let f = job.check_drive()?;
    let cutoff = job.cutoff();
    let rows = job.scan(&dets, |d| gn_point(&p, f, d, cutoff))?;
    let mut t = Table::new(&job.header(), &[format!("drive={} {}", f.re, f.im)], "detuning,g2,g3,g4");
    for r in rows {
        t.row(&[r.detuning, r.g2, r.g3, r.g4]);
    }
    Ok(vec![t.write(job.out, "gn.csv")?])
}

/// Weak-nonlinearity spectrum and the mean-field report.
pub fn langevin(job: &Job) -> Result<Vec<PathBuf>, Error> {
    let p = job.model.params;
    let pulse = job.model.pulse;
    let grid = job.spectrum_grid()?;
    let a = analytic_spectrum(&p, &pulse, &grid)?;
    let steady = steady_amplitude(&p, pulse.omega_0, job.check_drive()?);
    let lin = linearize(&p, &steady);
    let cplx = |z: C64| json!([z.re, z.im]);
    let roots: Vec<_> = steady
        .roots
        .iter()
        .map(|r| json!({"n_bar": r.n_bar, "amplitude": cplx(r.amplitude), "residual": cubic_residual(&p, &steady, r)}))
        .collect();
    let report = json!({
        "tool": format!("kerrjunction {}", env!("CARGO_PKG_VERSION")),
        "model": job.cfg.model,
        "controls": job.cfg.controls,
        "drive": cplx(steady.drive),
        "detuning": steady.detuning,
        "roots": roots,
        "selected": steady.selected,
        "multistable": steady.multistable(),
        "drift_matrix": lin.a,
        "diffusion_diagonal": [cplx(lin.d[0][0]), cplx(lin.d[1][1])],
        "eigenvalues": [cplx(lin.eigenvalues[0]), cplx(lin.eigenvalues[1])],
        "stable": lin.stable,
        "within_validity": a.within_validity,
    });
    Ok(vec![
        spectrum_table(&job.header(), &a.spectrum).write(job.out, "langevin_spectrum.csv")?,
        write_file(job.out, "roots.json", pretty(&report).as_bytes())?,
    ])
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}
