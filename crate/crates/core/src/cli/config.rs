//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # small-amplitude run
//! sim.b0 = 1
//! data.family = small-perturbation
//! data.epsilon = 0.1
//! run.horizon = 50
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use crate::config::{Dynamics, SimConfig};
use crate::error::{Error, Result};
use crate::initial::{BranchSign, InitialData};
use crate::profile::Profile;

const KEYS: &[&str] = &[
    "sim.b0",
    "sim.model",
    "sim.rel_tol",
    "sim.abs_tol",
    "sim.blowup_threshold",
    "sim.n_characteristics",
    "sim.max_steps",
    "sim.sample_dt",
    "data.family",
    "data.epsilon",
    "data.k",
    "data.length",
    "data.p1",
    "data.p2",
    "data.e1",
    "data.k1",
    "data.k2",
    "data.sign",
    "run.horizon",
    "run.seed_rho",
    "run.grid_n",
    "run.cfl",
    "run.theta",
    "run.wave_speed",
    "run.xi_max",
    "run.b0_list",
    "run.breaking_horizon",
];

/// Parameters that only some subcommands read.
#[derive(Debug, Clone, PartialEq)]
pub struct RunParams {
    pub seed_rho: f64,
    pub grid_n: usize,
    pub cfl: f64,
    /// Comparison time for `crosscheck`; one linear period by default.
    pub theta: f64,
    pub wave_speed: f64,
    pub xi_max: Option<f64>,
    pub b0_list: Vec<f64>,
    /// Horizon for `breaking-map`, which propagates the derivative system
    /// period by period instead of integrating step by step.
    pub breaking_horizon: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub data: InitialData,
    pub run: RunParams,
    /// Every key with its resolved value, defaults included.
    pub resolved: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn epsilon(&self) -> Result<f64> {
        self.sim.epsilon.ok_or_else(|| Error::validation("data.epsilon is required here"))
    }

    pub fn small_perturbation_k(&self) -> f64 {
        2.0 * PI / self.data.domain_length
    }
}

pub fn linear_period(b0: f64) -> f64 {
    2.0 * PI / (1.0 + b0 * b0).sqrt()
}

pub fn parse_config_file(path: &Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
    resolved: BTreeMap<String, String>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.map.get(key)
    }

    fn f64_or(&mut self, key: &str, default: Option<f64>) -> Result<Option<f64>> {
        let v = match self.raw(key) {
            Some((line, s)) => Some(s.parse::<f64>().map_err(|_| Error::Parse {
                line: *line,
                message: format!("{key}: '{s}' is not a number"),
            })?),
            None => default,
        };
        if let Some(x) = v {
            self.resolved.insert(key.into(), format!("{x:?}"));
        }
        Ok(v)
    }

    fn f64_req(&mut self, key: &str) -> Result<f64> {
        self.f64_or(key, None)?.ok_or_else(|| Error::validation(format!("{key} is required")))
    }

    fn f64_def(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_or(key, Some(default))?.expect("default given"))
    }

    fn usize_def(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = match self.raw(key) {
            Some((line, s)) => s.parse::<usize>().map_err(|_| Error::Parse {
                line: *line,
                message: format!("{key}: '{s}' is not a non-negative integer"),
            })?,
            None => default,
        };
        self.resolved.insert(key.into(), v.to_string());
        Ok(v)
    }

    fn str_def(&mut self, key: &str, default: &str) -> String {
        let v = self.raw(key).map_or(default.to_string(), |(_, s)| s.clone());
        self.resolved.insert(key.into(), v.clone());
        v
    }

    fn profile(&mut self, key: &str, default: &str) -> Result<Profile> {
        let (line, src) = self.raw(key).cloned().unwrap_or((0, default.to_string()));
        let p = Profile::parse(&src).map_err(|e| Error::Parse { line, message: format!("{key}: {e}") })?;
        self.resolved.insert(key.into(), p.to_string());
        Ok(p)
    }

    fn line_of(&self, key: &str) -> usize {
        self.raw(key).map_or(0, |(l, _)| *l)
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| Error::Parse { line, message: format!("expected 'key = value', found '{body}'") })?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(Error::Parse { line, message: format!("unknown key '{k}'") });
        }
        if map.insert(k.to_string(), (line, v.to_string())).is_some() {
            return Err(Error::Parse { line, message: format!("duplicate key '{k}'") });
        }
    }
    let mut e = Entries { map, resolved: BTreeMap::new() };

    let b0 = e.f64_req("sim.b0")?;
    let dynamics = match e.str_def("sim.model", "relativistic").as_str() {
        "relativistic" => Dynamics::Relativistic,
        "nonrelativistic" => Dynamics::Nonrelativistic,
        other => {
            return Err(Error::Parse { line: e.line_of("sim.model"), message: format!("sim.model: unknown model '{other}'") })
        }
    };
    let defaults = SimConfig::default();
    let period = linear_period(b0);
    let sample_dt = e.f64_or("sim.sample_dt", None)?;
    let mut sim = SimConfig {
        b0,
        horizon: e.f64_def("run.horizon", 10.0 * period)?,
        rel_tol: e.f64_def("sim.rel_tol", defaults.rel_tol)?,
        abs_tol: e.f64_def("sim.abs_tol", defaults.abs_tol)?,
        blowup_threshold: e.f64_def("sim.blowup_threshold", defaults.blowup_threshold)?,
        n_characteristics: e.usize_def("sim.n_characteristics", defaults.n_characteristics)?,
        epsilon: None,
        dynamics,
        sample_interval: sample_dt,
        output_times: Vec::new(),
        max_steps: e.usize_def("sim.max_steps", defaults.max_steps)?,
    };

    let family = e.str_def("data.family", "small-perturbation");
    let data = match family.as_str() {
        "small-perturbation" => {
            let eps = e.f64_req("data.epsilon")?;
            if !(eps >= 0.0) {
                return Err(Error::validation(format!("data.epsilon = {eps} must be non-negative")));
            }
            sim.epsilon = Some(eps);
            let k = e.f64_def("data.k", 1.0)?;
            InitialData::small_perturbation(b0, eps, k)?
        }
        "equilibrium" => InitialData::equilibrium(b0, e.f64_def("data.length", 2.0 * PI)?)?,
        "general" => {
            let len = e.f64_def("data.length", 2.0 * PI)?;
            let (p1, p2, e1) = (e.profile("data.p1", "0")?, e.profile("data.p2", "0")?, e.profile("data.e1", "0")?);
            InitialData::general(b0, len, p1, p2, e1)?
        }
        "constant-k1" => {
            let len = e.f64_def("data.length", 2.0 * PI)?;
            let (p1, e1) = (e.profile("data.p1", "0")?, e.profile("data.e1", "0")?);
            let k1 = e.f64_def("data.k1", 0.0)?;
            InitialData::constant_k1(b0, len, p1, e1, k1)?
        }
        "constant-k2" => {
            let len = e.f64_def("data.length", 2.0 * PI)?;
            let (p2, e1) = (e.profile("data.p2", "0")?, e.profile("data.e1", "0")?);
            let k2 = e.f64_req("data.k2")?;
            let sign = match e.str_def("data.sign", "+").as_str() {
                "+" | "plus" => BranchSign::Plus,
                "-" | "minus" => BranchSign::Minus,
                other => {
                    return Err(Error::Parse { line: e.line_of("data.sign"), message: format!("data.sign: expected + or -, found '{other}'") })
                }
            };
            InitialData::constant_k2(b0, len, p2, e1, k2, sign)?
        }
        other => {
            return Err(Error::Parse { line: e.line_of("data.family"), message: format!("data.family: unknown family '{other}'") })
        }
    };
    if sim.epsilon.is_none() {
        if let Some(eps) = e.f64_or("data.epsilon", None)? {
            sim.epsilon = Some(eps);
        }
    }

    let b0_list = match e.raw("run.b0_list").cloned() {
        Some((line, s)) => s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse { line, message: format!("run.b0_list: '{t}' is not a number") }))
            .collect::<Result<Vec<_>>>()?,
        None => vec![0.0, 0.5, 1.0, 2.0, 4.0],
    };
    e.resolved.insert("run.b0_list".into(), b0_list.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(", "));
    let run = RunParams {
        seed_rho: e.f64_def("run.seed_rho", 0.0)?,
        grid_n: e.usize_def("run.grid_n", 2048)?,
        cfl: e.f64_def("run.cfl", crate::eulerian::DEFAULT_CFL)?,
        theta: e.f64_def("run.theta", period)?,
        wave_speed: e.f64_def("run.wave_speed", 10.0)?,
        xi_max: e.f64_or("run.xi_max", None)?,
        b0_list,
        breaking_horizon: e.f64_def("run.breaking_horizon", 1e7)?,
    };
    sim.validate()?;
    Ok(RunConfig { sim, data, run, resolved: e.resolved })
}
