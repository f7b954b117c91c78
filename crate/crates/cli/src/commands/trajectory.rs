use std::collections::BTreeMap;
use std::path::PathBuf;

use hubbard_rg::rg::{rg_flow, sites_at_level};

use crate::config::{invalid, non_negative, Common, CommonFlags, FileLayer, MAX_STEPS};
use crate::error::CliError;
use crate::output::{csv_text, emit, json_text, num, Meta};

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub common: CommonFlags,
    /// Starting coupling U/t
    #[arg(long)]
    pub u0: Option<String>,
    /// Renormalization steps [default: 6]
    #[arg(long)]
    pub steps: Option<String>,
    /// csv or json [default: csv]
    #[arg(long)]
    pub format: Option<String>,
    /// Write here instead of stdout
    #[arg(long)]
    pub out: Option<String>,
}

const LABELS: [&str; 4] = ["empty", "up", "down", "double"];

fn columns() -> Vec<String> {
    let mut c: Vec<String> = [
        "level", "N", "u", "capped", "t_scale", "U", "e0", "mu", "t_next", "U_next", "e0_next", "mu_next",
    ]
    .map(String::from)
    .to_vec();
    c.extend(LABELS.map(|l| format!("E_{l}")));
    c.extend(LABELS.map(|l| format!("g_{l}")));
    for r in LABELS {
        for s in LABELS {
            c.push(format!("w_{r}_{s}"));
        }
    }
    c
}

pub fn run(args: &Args, file: &FileLayer) -> Result<(), CliError> {
    let common = Common::resolve(&args.common, file)?;
    let u0 = non_negative(
        "u0",
        file.get::<f64>(&args.u0, "u0")?
            .ok_or_else(|| invalid("u0", "a starting coupling is required"))?,
    )?;
    let steps = file.get::<usize>(&args.steps, "steps")?.unwrap_or(6);
    if steps == 0 || steps > MAX_STEPS {
        return Err(invalid("steps", format!("must be in 1..={MAX_STEPS}, got {steps}")));
    }
    let format = file.get::<String>(&args.format, "format")?.unwrap_or_else(|| "csv".into());
    if format != "csv" && format != "json" {
        return Err(invalid("format", format!("{format:?}, expected csv or json")));
    }
    let out = file.get::<PathBuf>(&args.out, "out")?;

    let mut entries = BTreeMap::new();
    common.hash_entries(&mut entries);
    entries.insert("u0".into(), u0.to_string());
    entries.insert("steps".into(), steps.to_string());
    entries.insert("format".into(), format.clone());
    let meta = Meta::new("trajectory", &entries, common.base.label());

    let traj = rg_flow(u0, steps, &common.rg)?;
    let text = if format == "json" {
        json_text(&meta, &traj)?
    } else {
        let rows: Vec<Vec<String>> = traj
            .levels
            .iter()
            .map(|l| {
                let s = &l.step;
                let mut row = vec![
                    l.level.to_string(),
                    sites_at_level(l.level).to_string(),
                    num(l.params.u),
                    l.capped.to_string(),
                    num(l.t_scale),
                    num(l.params.u * l.t_scale),
                    num(l.e0),
                    num(l.mu),
                    num(s.t_next),
                    num(s.u_next),
                    num(s.e0_next),
                    num(s.mu_next),
                ];
                row.extend(s.kept_energies.map(num));
                row.extend(s.multiplicities.map(|g| g.to_string()));
                row.extend(s.descent_w.iter().flatten().map(|&w| num(w)));
                row
            })
            .collect();
        let cols = columns();
        let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
        csv_text(&meta, &cols, &rows)?
    };
    emit(out.as_deref(), &text)
}
