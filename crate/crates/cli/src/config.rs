//! Run configuration: flags layered over an optional `key=value` file.
//!
//! Every setting has one key, spelled like its long flag without the dashes.
//! A flag wins over the file; the file wins over the built-in default. All
//! values go through the same parsers, so a bad value is reported with its
//! key whichever layer it came from.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hubbard_rg::ed::SolverConfig;
use hubbard_rg::entanglement::LogBase;
use hubbard_rg::rg::{DegeneracyPolicy, HoppingChannel, RgConfig};
use hubbard_rg::scaling::{FixedMask, Observable, MAX_LEVEL};

use crate::error::CliError;

/// Keys accepted in a config file.
pub const KNOWN_KEYS: &[&str] = &[
    "workers",
    "base",
    "u-cap",
    "channel",
    "degeneracy",
    "direction",
    "krylov-dim",
    "residual-tol",
    "shift-tol",
    "degeneracy-tol",
    "dense-max-dim",
    "fallback-max-dim",
    "max-restarts",
    "out-dir",
    "out",
    "json",
    "lo",
    "hi",
    "u-min",
    "u-max",
    "u-count",
    "levels",
    "observables",
    "block-total-level",
    "input",
    "observable",
    "init-uc",
    "init-nu",
    "init-ye",
    "fix",
    "u-off",
    "u-on",
    "level",
    "widths",
    "u0",
    "steps",
    "format",
];

/// Default bracket for the fixed-point search.
pub const DEFAULT_BRACKET: (f64, f64) = (1.0, 25.0);
pub const DEFAULT_LEVELS: &str = "0-5";
pub const MAX_STEPS: usize = 24;

/// Values read from a config file, with their line numbers.
#[derive(Debug, Default)]
pub struct FileLayer {
    path: Option<PathBuf>,
    values: BTreeMap<String, (usize, String)>,
}

impl FileLayer {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("config file {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!(
                    "config file {} line {}: expected key=value",
                    path.display(),
                    i + 1
                ))
            })?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Validation(format!(
                    "config file {} line {}: unknown key {key:?}",
                    path.display(),
                    i + 1
                )));
            }
            values.insert(key, (i + 1, value.trim().to_string()));
        }
        Ok(Self {
            path: Some(path.to_path_buf()),
            values,
        })
    }

    /// The flag if given, else the file value, parsed with `parse`.
    fn pick<T>(
        &self,
        flag: &Option<String>,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, CliError> {
        if let Some(v) = flag {
            return parse(v)
                .map(Some)
                .map_err(|e| CliError::Validation(format!("--{key}: {e}")));
        }
        match self.values.get(key) {
            Some((line, v)) => parse(v).map(Some).map_err(|e| {
                let path = self.path.as_deref().unwrap_or(Path::new("config"));
                CliError::Validation(format!("{key} (config file {} line {line}): {e}", path.display()))
            }),
            None => Ok(None),
        }
    }

    pub fn get<T>(&self, flag: &Option<String>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.pick(flag, key, |s| s.parse::<T>().map_err(|e| e.to_string()))
    }

    pub fn get_with<T>(
        &self,
        flag: &Option<String>,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, CliError> {
        self.pick(flag, key, parse)
    }

    /// A switch is on if the flag is present or the file sets it to true.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        Ok(self.get::<bool>(&None, key)?.unwrap_or(false))
    }
}

pub fn invalid(key: &str, msg: impl Display) -> CliError {
    CliError::Validation(format!("{key}: {msg}"))
}

pub fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be positive and finite, got {v}")))
    }
}

pub fn non_negative(key: &str, v: f64) -> Result<f64, CliError> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be finite and >= 0, got {v}")))
    }
}

/// `"0-5"`, `"1,3,4"` or a mix such as `"0-2,5"`, sorted and deduplicated.
pub fn parse_levels(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(parse(part)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err("no levels given".into());
    }
    if let Some(&l) = out.iter().find(|&&l| l > MAX_LEVEL) {
        return Err(format!("level {l} above {MAX_LEVEL}"));
    }
    Ok(out)
}

/// `"all"` or a comma list of observable names.
pub fn parse_observables(s: &str) -> Result<Vec<Observable>, String> {
    if s.trim() == "all" {
        return Ok(Observable::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let o: Observable = name.parse().map_err(|e: hubbard_rg::Error| e.to_string())?;
        if !out.contains(&o) {
            out.push(o);
        }
    }
    if out.is_empty() {
        return Err("no observables given".into());
    }
    Ok(out)
}

/// `"none"` or a comma list drawn from `u_c`, `nu`, `y_E`.
pub fn parse_fixed(s: &str) -> Result<FixedMask, String> {
    let mut mask = FixedMask::NONE;
    if s.trim() == "none" {
        return Ok(mask);
    }
    for name in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match name {
            "u_c" => mask.u_c = true,
            "nu" => mask.nu = true,
            "y_E" => mask.y_e = true,
            other => return Err(format!("unknown parameter {other:?}, expected u_c, nu or y_E")),
        }
    }
    Ok(mask)
}

pub fn parse_base(s: &str) -> Result<LogBase, String> {
    s.parse::<LogBase>().map_err(|e| e.to_string())
}

fn parse_channel(s: &str) -> Result<HoppingChannel, String> {
    match s {
        "electron" => Ok(HoppingChannel::Electron),
        "hole" => Ok(HoppingChannel::Hole),
        "mean" => Ok(HoppingChannel::Mean),
        _ => Err(format!("{s:?}, expected electron, hole or mean")),
    }
}

fn parse_degeneracy(s: &str) -> Result<DegeneracyPolicy, String> {
    match s {
        "average" => Ok(DegeneracyPolicy::MultipletAverage),
        "strict" => Ok(DegeneracyPolicy::Strict),
        _ => Err(format!("{s:?}, expected average or strict")),
    }
}

pub fn channel_name(c: HoppingChannel) -> &'static str {
    match c {
        HoppingChannel::Electron => "electron",
        HoppingChannel::Hole => "hole",
        HoppingChannel::Mean => "mean",
    }
}

pub fn degeneracy_name(d: DegeneracyPolicy) -> &'static str {
    match d {
        DegeneracyPolicy::MultipletAverage => "average",
        DegeneracyPolicy::Strict => "strict",
    }
}

/// Raw flag values shared by every computing subcommand.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct CommonFlags {
    /// Worker threads for independent grid points [default: all cores]
    #[arg(long)]
    pub workers: Option<String>,
    /// Logarithm base of the bare single-site entropy: 2 or e [default: 2]
    #[arg(long)]
    pub base: Option<String>,
    /// Largest u at which a block is diagonalized [default: 1000]
    #[arg(long)]
    pub u_cap: Option<String>,
    /// Transition defining t': electron, hole or mean [default: electron]
    #[arg(long)]
    pub channel: Option<String>,
    /// Degenerate kept multiplets: average or strict [default: average]
    #[arg(long)]
    pub degeneracy: Option<String>,
    /// Neighbour direction (0-5) whose boundary bonds define t' [default: 0]
    #[arg(long)]
    pub direction: Option<String>,
    /// Krylov subspace size of the sparse solver [default: 40]
    #[arg(long)]
    pub krylov_dim: Option<String>,
    /// Relative residual accepted by the sparse solver [default: 1e-11]
    #[arg(long)]
    pub residual_tol: Option<String>,
    /// Relative eigenvalue change accepted between restarts [default: 1e-11]
    #[arg(long)]
    pub shift_tol: Option<String>,
    /// Levels this close to the ground energy form one multiplet [default: 1e-8]
    #[arg(long)]
    pub degeneracy_tol: Option<String>,
    /// Sectors up to this dimension are diagonalized densely [default: 512]
    #[arg(long)]
    pub dense_max_dim: Option<String>,
    /// Sectors up to this dimension are diagonalized densely when the sparse solver stalls [default: 4096]
    #[arg(long)]
    pub fallback_max_dim: Option<String>,
    /// Restart limit of the sparse solver [default: 400]
    #[arg(long)]
    pub max_restarts: Option<String>,
}

/// Settings shared by the computing subcommands, after validation.
#[derive(Debug, Clone)]
pub struct Common {
    pub workers: usize,
    pub base: LogBase,
    pub rg: RgConfig,
}

impl Common {
    pub fn resolve(flags: &CommonFlags, file: &FileLayer) -> Result<Self, CliError> {
        let workers = match file.get::<usize>(&flags.workers, "workers")? {
            Some(0) => return Err(invalid("workers", "must be at least 1")),
            Some(n) => n,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        let base = file.get_with(&flags.base, "base", parse_base)?.unwrap_or(LogBase::Two);

        let defaults = RgConfig::default();
        let mut solver = SolverConfig::default();
        if let Some(v) = file.get::<usize>(&flags.krylov_dim, "krylov-dim")? {
            if v < 4 {
                return Err(invalid("krylov-dim", "must be at least 4"));
            }
            solver.krylov_dim = v;
        }
        if let Some(v) = file.get::<f64>(&flags.residual_tol, "residual-tol")? {
            solver.residual_tol = positive("residual-tol", v)?;
        }
        if let Some(v) = file.get::<f64>(&flags.shift_tol, "shift-tol")? {
            solver.shift_tol = positive("shift-tol", v)?;
        }
        if let Some(v) = file.get::<f64>(&flags.degeneracy_tol, "degeneracy-tol")? {
            solver.degeneracy_tol = positive("degeneracy-tol", v)?;
        }
        if let Some(v) = file.get::<usize>(&flags.dense_max_dim, "dense-max-dim")? {
            solver.dense_max_dim = v;
        }
        if let Some(v) = file.get::<usize>(&flags.fallback_max_dim, "fallback-max-dim")? {
            solver.fallback_max_dim = v;
        }
        if let Some(v) = file.get::<usize>(&flags.max_restarts, "max-restarts")? {
            if v == 0 {
                return Err(invalid("max-restarts", "must be at least 1"));
            }
            solver.max_restarts = v;
        }
        let u_cap = match file.get::<f64>(&flags.u_cap, "u-cap")? {
            Some(v) => positive("u-cap", v)?,
            None => defaults.u_cap,
        };
        let direction = file.get::<usize>(&flags.direction, "direction")?.unwrap_or(defaults.direction);
        if direction >= 6 {
            return Err(invalid("direction", format!("must be in 0..6, got {direction}")));
        }
        let rg = RgConfig {
            solver,
            degeneracy: file
                .get_with(&flags.degeneracy, "degeneracy", parse_degeneracy)?
                .unwrap_or(defaults.degeneracy),
            channel: file
                .get_with(&flags.channel, "channel", parse_channel)?
                .unwrap_or(defaults.channel),
            direction,
            u_cap,
        };
        Ok(Self { workers, base, rg })
    }

    /// Settings that change results, for the config hash. The worker count
    /// is left out because it never changes an output.
    pub fn hash_entries(&self, entries: &mut BTreeMap<String, String>) {
        let s = &self.rg.solver;
        for (k, v) in [
            ("base", self.base.label().to_string()),
            ("u-cap", self.rg.u_cap.to_string()),
            ("channel", channel_name(self.rg.channel).to_string()),
            ("degeneracy", degeneracy_name(self.rg.degeneracy).to_string()),
            ("direction", self.rg.direction.to_string()),
            ("krylov-dim", s.krylov_dim.to_string()),
            ("residual-tol", s.residual_tol.to_string()),
            ("shift-tol", s.shift_tol.to_string()),
            ("degeneracy-tol", s.degeneracy_tol.to_string()),
            ("dense-max-dim", s.dense_max_dim.to_string()),
            ("fallback-max-dim", s.fallback_max_dim.to_string()),
            ("max-restarts", s.max_restarts.to_string()),
        ] {
            entries.insert(k.to_string(), v);
        }
    }
}

/// Fixed-point bracket from `lo`/`hi`, validated.
pub fn bracket(file: &FileLayer, lo: &Option<String>, hi: &Option<String>) -> Result<(f64, f64), CliError> {
    let lo = non_negative("lo", file.get::<f64>(lo, "lo")?.unwrap_or(DEFAULT_BRACKET.0))?;
    let hi = non_negative("hi", file.get::<f64>(hi, "hi")?.unwrap_or(DEFAULT_BRACKET.1))?;
    if lo >= hi {
        return Err(invalid("hi", format!("must exceed lo ({lo}), got {hi}")));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_lists() {
        assert_eq!(parse_levels("0-5").unwrap(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(parse_levels("3,1,1-2").unwrap(), vec![1, 2, 3]);
        assert!(parse_levels("").is_err());
        assert!(parse_levels("4-2").is_err());
        assert!(parse_levels("9").is_err());
        assert!(parse_levels("x").is_err());
    }

    #[test]
    fn fixed_masks() {
        assert_eq!(parse_fixed("y_E").unwrap(), FixedMask::Y_E);
        assert_eq!(parse_fixed("none").unwrap(), FixedMask::NONE);
        assert_eq!(parse_fixed("u_c,nu,y_E").unwrap(), FixedMask::ALL);
        assert!(parse_fixed("mu").is_err());
    }

    #[test]
    fn observable_lists() {
        assert_eq!(parse_observables("all").unwrap().len(), 5);
        assert_eq!(parse_observables("E_bb,gap,E_bb").unwrap(), vec![Observable::Ebb, Observable::Gap]);
        assert!(parse_observables("E_xx").is_err());
    }

    #[test]
    fn flag_beats_file() {
        let mut file = FileLayer::default();
        file.values.insert("lo".into(), (1, "2.0".into()));
        assert_eq!(file.get::<f64>(&None, "lo").unwrap(), Some(2.0));
        assert_eq!(file.get::<f64>(&Some("3".into()), "lo").unwrap(), Some(3.0));
        let err = file.get::<f64>(&Some("x".into()), "lo").unwrap_err();
        assert!(err.to_string().contains("lo"));
    }
}
