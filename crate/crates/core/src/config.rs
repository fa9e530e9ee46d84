//! Flat `key = value` run configuration.
//!
//! Every command-line flag has a config key of the same name (dashes and
//! underscores are interchangeable, keys are case-insensitive). Values given
//! later override earlier ones at the level of whole sources: a file is
//! parsed into [`ConfigOverrides`], flags into another, and the two are
//! merged before defaults are filled in.

use std::path::PathBuf;

use crate::advection::WenoOrder;
use crate::error::{Result, WignerError};
use crate::solver::{Mode, Problem, SolverConfig, TimeStep};

/// Partially specified configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub problem: Option<Problem>,
    pub h: Option<f64>,
    pub nx: Option<usize>,
    pub nv: Option<usize>,
    pub lx: Option<f64>,
    pub lv: Option<f64>,
    pub time_step: Option<TimeStep>,
    pub t_final: Option<f64>,
    pub mode: Option<Mode>,
    pub weno_order: Option<WenoOrder>,
    pub eps_c: Option<f64>,
    pub eps_s: Option<f64>,
    pub candidates: Option<usize>,
    pub max_rank: Option<usize>,
    pub seed: Option<u64>,
    pub snapshot_every: Option<usize>,
    pub fit_window: Option<(f64, f64)>,
    pub out: Option<PathBuf>,
}

fn config_err(line: usize, msg: impl std::fmt::Display) -> WignerError {
    WignerError::Config(format!("line {line}: {msg}"))
}

fn value<T: std::str::FromStr>(line: usize, key: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>()
        .map_err(|e| config_err(line, format!("bad value `{raw}` for `{key}`: {e}")))
}

impl ConfigOverrides {
    /// Parses `key = value` lines. `#` starts a comment; blank lines are
    /// ignored; unknown and repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut o = ConfigOverrides::default();
        let mut seen = std::collections::HashSet::new();
        let mut cfl = None;
        let mut dt = None;
        for (n, raw_line) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(line_no, format!("expected `key = value`, got `{line}`")))?;
            let key = k.trim().to_ascii_lowercase().replace('-', "_");
            let v = v.trim();
            if !seen.insert(key.clone()) {
                return Err(config_err(line_no, format!("duplicate key `{key}`")));
            }
            match key.as_str() {
                "problem" => o.problem = Some(v.parse()?),
                "h" => o.h = Some(value(line_no, &key, v)?),
                "nx" => o.nx = Some(value(line_no, &key, v)?),
                "nv" => o.nv = Some(value(line_no, &key, v)?),
                "lx" => o.lx = Some(value(line_no, &key, v)?),
                "lv" => o.lv = Some(value(line_no, &key, v)?),
                "cfl" => cfl = Some(value(line_no, &key, v)?),
                "dt" => dt = Some(value(line_no, &key, v)?),
                "tfinal" | "t" => o.t_final = Some(value(line_no, &key, v)?),
                "solver" => o.mode = Some(v.parse()?),
                "weno_order" => {
                    let n: u32 = value(line_no, &key, v)?;
                    o.weno_order = Some(
                        WenoOrder::from_int(n)
                            .ok_or_else(|| config_err(line_no, "weno_order must be 3 or 5"))?,
                    );
                }
                "eps_c" => o.eps_c = Some(value(line_no, &key, v)?),
                "eps_s" => o.eps_s = Some(value(line_no, &key, v)?),
                "p" => o.candidates = Some(value(line_no, &key, v)?),
                "max_rank" => o.max_rank = Some(value(line_no, &key, v)?),
                "seed" => o.seed = Some(value(line_no, &key, v)?),
                "snapshot_every" => o.snapshot_every = Some(value(line_no, &key, v)?),
                "fit_window" => {
                    let (a, b) = v
                        .split_once(',')
                        .ok_or_else(|| config_err(line_no, "fit_window expects `t0, t1`"))?;
                    o.fit_window = Some((
                        value(line_no, &key, a.trim())?,
                        value(line_no, &key, b.trim())?,
                    ));
                }
                "out" => o.out = Some(PathBuf::from(v)),
                _ => return Err(config_err(line_no, format!("unknown key `{key}`"))),
            }
        }
        o.time_step = match (cfl, dt) {
            (Some(_), Some(_)) => {
                return Err(WignerError::Config("`cfl` and `dt` are mutually exclusive".into()))
            }
            (Some(c), None) => Some(TimeStep::Cfl(c)),
            (None, Some(d)) => Some(TimeStep::Fixed(d)),
            (None, None) => None,
        };
        Ok(o)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(self, other: ConfigOverrides) -> ConfigOverrides {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigOverrides { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            problem, h, nx, nv, lx, lv, time_step, t_final, mode, weno_order, eps_c, eps_s,
            candidates, max_rank, seed, snapshot_every, fit_window, out
        )
    }

    /// Fills defaults and validates. `problem`, `H`, `nx`, `nv`, the final
    /// time and one of `cfl`/`dt` are required.
    pub fn build(&self) -> Result<SolverConfig> {
        let missing = |k: &str| WignerError::Config(format!("missing required key `{k}`"));
        let problem = self.problem.ok_or_else(|| missing("problem"))?;
        let mut c = SolverConfig::new(
            problem,
            self.h.ok_or_else(|| missing("H"))?,
            self.nx.ok_or_else(|| missing("nx"))?,
            self.nv.ok_or_else(|| missing("nv"))?,
        );
        c.time_step = self.time_step.ok_or_else(|| missing("cfl or dt"))?;
        c.t_final = self.t_final.ok_or_else(|| missing("tfinal"))?;
        if let Some(x) = self.lx {
            c.lx = x;
        }
        if let Some(x) = self.lv {
            c.lv = x;
        }
        if let Some(x) = self.mode {
            c.mode = x;
        }
        if let Some(x) = self.weno_order {
            c.weno_order = x;
        }
        if let Some(x) = self.eps_c {
            c.eps_c = x;
        }
        if let Some(x) = self.eps_s {
            c.eps_s = x;
        }
        if let Some(x) = self.candidates {
            c.candidates = x;
        }
        c.max_rank = self.max_rank.or(c.max_rank);
        if let Some(x) = self.seed {
            c.seed = x;
        }
        if let Some(x) = self.snapshot_every {
            c.snapshot_every = x;
        }
        if let Some(x) = self.fit_window {
            c.fit_window = x;
        }
        c.validate()?;
        Ok(c)
    }
}

pub fn parse_config(text: &str) -> Result<SolverConfig> {
    ConfigOverrides::parse(text)?.build()
}

/// Complete `key = value` rendering that parses back to the same config.
/// Floats use the shortest representation that round-trips exactly.
pub fn config_echo(c: &SolverConfig) -> String {
    let mut s = String::new();
    let mut put = |k: &str, v: String| {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(&v);
        s.push('\n');
    };
    put("problem", c.problem.name().into());
    put("H", format!("{:?}", c.h));
    put("nx", c.nx.to_string());
    put("nv", c.nv.to_string());
    put("lx", format!("{:?}", c.lx));
    put("lv", format!("{:?}", c.lv));
    match c.time_step {
        TimeStep::Cfl(x) => put("cfl", format!("{x:?}")),
        TimeStep::Fixed(x) => put("dt", format!("{x:?}")),
    }
    put("tfinal", format!("{:?}", c.t_final));
    put("solver", c.mode.name().into());
    put("weno_order", c.weno_order.as_int().to_string());
    put("eps_c", format!("{:?}", c.eps_c));
    put("eps_s", format!("{:?}", c.eps_s));
    put("p", c.candidates.to_string());
    if let Some(r) = c.max_rank {
        put("max_rank", r.to_string());
    }
    put("seed", c.seed.to_string());
    put("snapshot_every", c.snapshot_every.to_string());
    put("fit_window", format!("{:?}, {:?}", c.fit_window.0, c.fit_window.1));
    s
}
