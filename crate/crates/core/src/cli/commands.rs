//! Subcommands: each runs one study and writes its files into the output directory.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::characteristics::{ensemble, integrate, Ensemble};
use crate::criteria::{nonrel_summary, rel_smallamp_summary};
use crate::error::{Error, Result};
use crate::eulerian::{cross_check, density_field, evolve, grid_points, initial_snapshot, GridConfig};
use crate::characteristics::Breaking;
use crate::floquet::{asymptotic_coshmupi, hill_floquet, mathieu_floquet, propagated_ensemble};
use crate::initial::{Family, InitialData};
use crate::reductions::hill::ReferenceOrbit;
use crate::reductions::scalar::{period_of, turning_points};
use crate::reductions::traveling_wave;

use super::config::{linear_period, RunConfig};
use super::output::{self, table_csv, trace_csv, Summary};

/// Orbit samples per period when locating a breaking crossing.
const PROPAGATION_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Simulate,
    Ensemble,
    Period,
    Wave,
    Floquet,
    Criteria,
    Crosscheck,
    BreakingMap,
}

impl Subcommand {
    pub const ALL: [Subcommand; 8] = [
        Subcommand::Simulate,
        Subcommand::Ensemble,
        Subcommand::Period,
        Subcommand::Wave,
        Subcommand::Floquet,
        Subcommand::Criteria,
        Subcommand::Crosscheck,
        Subcommand::BreakingMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Simulate => "simulate",
            Subcommand::Ensemble => "ensemble",
            Subcommand::Period => "period",
            Subcommand::Wave => "wave",
            Subcommand::Floquet => "floquet",
            Subcommand::Criteria => "criteria",
            Subcommand::Crosscheck => "crosscheck",
            Subcommand::BreakingMap => "breaking-map",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::validation(format!("unknown subcommand '{s}'")))
    }
}

/// Files written and the summary of one run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Summary,
    pub files: Vec<String>,
}

/// Runs `cmd` and writes `summary.txt`, `manifest.txt` and data files to `out`.
pub fn run(cmd: Subcommand, cfg: &RunConfig, out: &Path, progress: &mut dyn FnMut(&str)) -> Result<Outcome> {
    std::fs::create_dir_all(out)?;
    let started = Instant::now();
    let mut summary = Summary::default();
    summary.put("subcommand", cmd);
    let mut files = Vec::new();
    match cmd {
        Subcommand::Simulate => simulate(cfg, out, &mut summary, &mut files)?,
        Subcommand::Ensemble => run_ensemble(cfg, out, &mut summary, &mut files, progress)?,
        Subcommand::Period => period(cfg, &mut summary)?,
        Subcommand::Wave => wave(cfg, out, &mut summary, &mut files)?,
        Subcommand::Floquet => floquet(cfg, &mut summary)?,
        Subcommand::Criteria => criteria(cfg, &mut summary),
        Subcommand::Crosscheck => crosscheck(cfg, out, &mut summary, &mut files, progress)?,
        Subcommand::BreakingMap => breaking_map(cfg, out, &mut summary, &mut files, progress)?,
    }
    files.push(output::write(out, "summary.txt", &summary.render())?);
    files.push("manifest.txt".into());
    let manifest = manifest(cmd, cfg, &files, started.elapsed().as_secs_f64());
    output::write(out, "manifest.txt", &manifest)?;
    Ok(Outcome { summary, files })
}

fn manifest(cmd: Subcommand, cfg: &RunConfig, files: &[String], wall: f64) -> String {
    let mut s = format!("subcommand = {cmd}\nversion = {}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in &cfg.resolved {
        s.push_str(&format!("{k} = {v}\n"));
    }
    s.push_str(&format!("outputs = {}\n", files.join(", ")));
    s.push_str(&format!("wall_clock_seconds = {wall:.3}\n"));
    s
}

fn simulate(cfg: &RunConfig, out: &Path, summary: &mut Summary, files: &mut Vec<String>) -> Result<()> {
    let rho = cfg.run.seed_rho;
    summary.num("seed_rho", rho);
    let trace = match integrate(cfg.sim.dynamics, cfg.data.sample(rho), &cfg.sim) {
        Ok(t) => t,
        Err(Error::StepSizeUnderflow { theta, partial: Some(t) }) => {
            files.push(output::write(out, "trace_0.csv", &trace_csv(&t))?);
            return Err(Error::StepSizeUnderflow { theta, partial: Some(t) });
        }
        Err(e) => return Err(e),
    };
    let i0 = trace.initial_integrals;
    summary.num("K1", i0.k1);
    summary.num("K2", i0.k2);
    summary.opt("C1", i0.c1);
    summary.opt("breaking_time", trace.breaking.map(|b| b.time));
    summary.opt("breaking_time_extrapolated", trace.breaking.and_then(|b| b.extrapolated));
    if let Some(b) = trace.breaking {
        summary.put("breaking_component", format!("{:?}", b.component));
    }
    summary.num("final_theta", trace.final_time());
    summary.num("drift_K1", trace.integrals_drift.k1);
    summary.num("drift_K2", trace.integrals_drift.k2);
    summary.num("drift_C1", trace.integrals_drift.c1);
    summary.num("drift_C1_identity", trace.integrals_drift.c1_identity);
    summary.put("steps", trace.steps);
    files.push(output::write(out, "trace_0.csv", &trace_csv(&trace))?);
    Ok(())
}

fn summarize_ensemble(ens: &Ensemble, summary: &mut Summary) {
    summary.put("n_characteristics", ens.seeds.len());
    summary.put("failed_characteristics", ens.failures());
    summary.put("broken_characteristics", ens.ok_traces().filter(|t| t.breaking.is_some()).count());
    summary.opt("breaking_time", ens.min_breaking_time());
    let first = ens
        .ok_traces()
        .filter_map(|t| t.breaking.map(|b| (b, t.rho0)))
        .min_by(|a, b| a.0.time.total_cmp(&b.0.time));
    summary.opt("breaking_time_extrapolated", first.and_then(|(b, _)| b.extrapolated));
    summary.opt("breaking_seed_rho", first.map(|(_, r)| r));
    let drift = ens.ok_traces().map(|t| t.integrals_drift.max()).fold(0.0, f64::max);
    summary.num("max_integral_drift", drift);
}

fn run_ensemble(cfg: &RunConfig, out: &Path, summary: &mut Summary, files: &mut Vec<String>, progress: &mut dyn FnMut(&str)) -> Result<()> {
    progress(&format!("integrating {} characteristics", cfg.sim.n_characteristics));
    let ens = ensemble(&cfg.data, &cfg.sim)?;
    summarize_ensemble(&ens, summary);
    for (i, t) in ens.traces.iter().enumerate() {
        let trace = match t {
            Ok(t) => Some(t),
            Err(Error::StepSizeUnderflow { partial: Some(p), .. }) => Some(p.as_ref()),
            Err(_) => None,
        };
        if let Some(t) = trace {
            files.push(output::write(out, &format!("trace_{i}.csv"), &trace_csv(t))?);
        }
    }
    Ok(())
}

fn period(cfg: &RunConfig, summary: &mut Summary) -> Result<()> {
    let rho = cfg.run.seed_rho;
    let (s, _) = cfg.data.sample(rho);
    let b0 = cfg.sim.b0;
    let k1 = cfg.data.k1_at(rho);
    let k2 = cfg.data.k2_at(rho);
    let tp = turning_points(k1, k2, b0, s.p2)?;
    let t = period_of(&tp);
    let orbit = ReferenceOrbit::compute(b0, s.p1, s.p2, s.e1)?;
    summary.num("seed_rho", rho);
    summary.num("K1", k1);
    summary.num("K2", k2);
    summary.num("p2_minus", tp.p2_minus);
    summary.num("p2_plus", tp.p2_plus);
    summary.num("period", t);
    summary.num("period_return_map", orbit.period);
    summary.num("period_linear", linear_period(b0));
    summary.num("period_relative_difference", (t - orbit.period).abs() / orbit.period);
    Ok(())
}

fn wave(cfg: &RunConfig, out: &Path, summary: &mut Summary, files: &mut Vec<String>) -> Result<()> {
    let rho = cfg.run.seed_rho;
    let (s, _) = cfg.data.sample(rho);
    let b0 = cfg.sim.b0;
    let (k1, k2) = (cfg.data.k1_at(rho), cfg.data.k2_at(rho));
    let w = cfg.run.wave_speed;
    let tp = turning_points(k1, k2, b0, s.p2)?;
    let xi_max = cfg.run.xi_max.unwrap_or_else(|| (w * period_of(&tp)).abs().max(1.0));
    let branch = if s.p1 == 0.0 { 1.0 } else { s.p1.signum() };
    let wave = traveling_wave(w, k1, k2, b0, xi_max, s.p2, branch)?;
    summary.num("wave_speed", w);
    summary.num("K1", k1);
    summary.num("K2", k2);
    summary.opt("terminated_at", wave.terminated_at);
    summary.opt("wavelength", wave.wavelength);
    let rows = (0..wave.xi.len()).map(|i| vec![wave.xi[i], wave.p1[i], wave.profile[i], wave.e1[i]]);
    files.push(output::write(out, "wave.csv", &table_csv(&["xi", "P1", "P2", "E1"], rows))?);
    Ok(())
}

fn floquet(cfg: &RunConfig, summary: &mut Summary) -> Result<()> {
    let eps = cfg.epsilon()?;
    let b0 = cfg.sim.b0;
    let hill = hill_floquet(eps, b0)?;
    let mathieu = mathieu_floquet(eps, b0)?;
    summary.num("epsilon", eps);
    summary.num("mathieu_a", hill.mathieu_a);
    summary.num("mathieu_b", hill.mathieu_b);
    summary.num("cosh_mu_pi_asymptotic", asymptotic_coshmupi(eps, b0));
    summary.num("cosh_mu_pi_hill", hill.cosh_mu_pi);
    summary.put("classification_hill", hill.classification);
    summary.num("cosh_mu_pi_mathieu", mathieu.cosh_mu_pi);
    summary.put("classification_mathieu", mathieu.classification);
    summary.num("wronskian_hill", hill.wronskian);
    summary.num("k_min", hill.k_min);
    summary.num("k_max", hill.k_max);
    Ok(())
}

fn criteria(cfg: &RunConfig, summary: &mut Summary) {
    let nr = nonrel_summary(&cfg.data);
    summary.num("nonrel_max_delta", nr.max_value);
    summary.num("nonrel_argmax_rho", nr.argmax);
    summary.put("nonrel_smooth", nr.smooth);
    let rel = rel_smallamp_summary(&cfg.data);
    summary.num("rel_smallamp_max_margin", rel.max_value);
    summary.put("rel_smallamp_smooth", rel.smooth);
    summary.put("constant_k2", matches!(cfg.data.family, Family::ConstantK2 { .. }));
}

fn crosscheck(cfg: &RunConfig, out: &Path, summary: &mut Summary, files: &mut Vec<String>, progress: &mut dyn FnMut(&str)) -> Result<()> {
    let theta = cfg.run.theta;
    let sim = crate::config::SimConfig { horizon: theta, output_times: vec![theta], ..cfg.sim.clone() };
    progress(&format!("integrating {} characteristics to theta = {theta}", sim.n_characteristics));
    let ens = ensemble(&cfg.data, &sim)?;
    progress(&format!("evolving a grid of {} points", cfg.run.grid_n));
    let grid_cfg = GridConfig { cfl: cfg.run.cfl, ..GridConfig::new(cfg.run.grid_n) };
    let grid = evolve(initial_snapshot(&cfg.data, cfg.run.grid_n)?, cfg.data.domain_length, cfg.sim.b0, &grid_cfg, &[theta])?;
    let report = cross_check(&ens, &grid, theta)?;
    summary.num("theta", theta);
    summary.put("grid_n", cfg.run.grid_n);
    summary.put("grid_steps", grid.steps);
    for (k, name) in ["P1", "P2", "E1"].iter().enumerate() {
        summary.num(&format!("max_error_{name}"), report.max_error[k]);
        summary.num(&format!("l2_error_{name}"), report.l2_error[k]);
    }
    summary.num("coverage", report.coverage);
    summary.put("reliable", report.reliable);
    let snap = grid.at(theta).expect("snapshot at theta");
    let dens = density_field(&snap.e1, grid.dx());
    let rho = grid_points(grid.length, snap.len());
    let rows = (0..snap.len()).map(|i| vec![theta, rho[i], snap.p1[i], snap.p2[i], snap.e1[i], dens[i]]);
    files.push(output::write(out, "grid.csv", &table_csv(&["theta", "rho", "P1", "P2", "E1", "N"], rows))?);
    Ok(())
}

fn breaking_map(cfg: &RunConfig, out: &Path, summary: &mut Summary, files: &mut Vec<String>, progress: &mut dyn FnMut(&str)) -> Result<()> {
    let eps = cfg.epsilon()?;
    let k = cfg.small_perturbation_k();
    summary.num("breaking_horizon", cfg.run.breaking_horizon);
    let mut rows = Vec::new();
    for &b0 in &cfg.run.b0_list {
        progress(&format!("B0 = {b0}"));
        let data = InitialData::small_perturbation(b0, eps, k)?;
        let sim = crate::config::SimConfig { b0, horizon: cfg.run.breaking_horizon, ..cfg.sim.clone() };
        let mut first: Option<(f64, Breaking)> = None;
        for (rho, r) in propagated_ensemble(&data, &sim, PROPAGATION_SAMPLES)? {
            if let Some(b) = r? {
                if first.map_or(true, |(_, f)| b.time < f.time) {
                    first = Some((rho, b));
                }
            }
        }
        let key = format!("breaking_time_b0_{b0}");
        match first {
            Some((rho, b)) => {
                summary.num(&key, b.time);
                rows.push(vec![b0, b.time, b.extrapolated.unwrap_or(f64::NAN), rho]);
            }
            None => {
                summary.put(&key, "none");
                rows.push(vec![b0, f64::NAN, f64::NAN, f64::NAN]);
            }
        }
    }
    let header = ["B0", "breaking_time", "breaking_time_extrapolated", "rho"];
    files.push(output::write(out, "breaking_map.csv", &table_csv(&header, rows))?);
    Ok(())
}
