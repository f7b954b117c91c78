use std::collections::BTreeMap;
use std::path::PathBuf;

use hubbard_rg::entanglement::block_block_entanglement;
use hubbard_rg::rg::{find_fixed_point, rg_flow, sites_at_level};
use hubbard_rg::scaling::{transition_widths, TransitionWidth, MAX_LEVEL};
use serde::Serialize;

use crate::config::{bracket, invalid, non_negative, Common, CommonFlags, FileLayer};
use crate::error::CliError;
use crate::output::{json_text, write_file, Meta};

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub common: CommonFlags,
    /// Setting on the metallic side [default: u*/2]
    #[arg(long)]
    pub u_off: Option<String>,
    /// Setting on the insulating side [default: 2 u*]
    #[arg(long)]
    pub u_on: Option<String>,
    /// Level of the top problem [default: 5]
    #[arg(long)]
    pub level: Option<String>,
    /// Whether to compute the step widths of levels 1..=level: true or false [default: true]
    #[arg(long)]
    pub widths: Option<String>,
    /// Fixed-point bracket [default: 1]
    #[arg(long)]
    pub lo: Option<String>,
    /// Fixed-point bracket [default: 25]
    #[arg(long)]
    pub hi: Option<String>,
    /// Print the JSON report instead of text
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON report to this file
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Serialize)]
struct Report {
    level: usize,
    n_sites: u64,
    u_star: Option<f64>,
    u_off: f64,
    u_on: f64,
    e_bb_off: f64,
    e_bb_on: f64,
    contrast: f64,
    widths: Vec<TransitionWidth>,
}

fn e_bb(u: f64, level: usize, common: &Common) -> Result<f64, CliError> {
    let traj = rg_flow(u, level + 1, &common.rg)?;
    Ok(block_block_entanglement(&traj, level)?.0)
}

pub fn run(args: &Args, file: &FileLayer) -> Result<(), CliError> {
    let common = Common::resolve(&args.common, file)?;
    let level = file.get::<usize>(&args.level, "level")?.unwrap_or(5);
    if level > MAX_LEVEL {
        return Err(invalid("level", format!("level {level} above {MAX_LEVEL}")));
    }
    let u_off = file
        .get::<f64>(&args.u_off, "u-off")?
        .map(|v| non_negative("u-off", v))
        .transpose()?;
    let u_on = file
        .get::<f64>(&args.u_on, "u-on")?
        .map(|v| non_negative("u-on", v))
        .transpose()?;
    let widths = file.get::<bool>(&args.widths, "widths")?.unwrap_or(true);
    let (lo, hi) = bracket(file, &args.lo, &args.hi)?;
    let json = file.switch(args.json, "json")?;
    let out = file.get::<PathBuf>(&args.out, "out")?;

    let mut entries = BTreeMap::new();
    common.hash_entries(&mut entries);
    entries.insert("level".into(), level.to_string());
    entries.insert("widths".into(), widths.to_string());
    entries.insert("lo".into(), lo.to_string());
    entries.insert("hi".into(), hi.to_string());
    if let Some(u) = u_off {
        entries.insert("u-off".into(), u.to_string());
    }
    if let Some(u) = u_on {
        entries.insert("u-on".into(), u.to_string());
    }
    let meta = Meta::new("switch-report", &entries, "2");

    let need_star = u_off.is_none() || u_on.is_none() || (widths && level >= 1);
    let u_star = if need_star {
        Some(find_fixed_point(lo, hi, &common.rg)?)
    } else {
        None
    };
    let u_off = u_off.unwrap_or_else(|| 0.5 * u_star.expect("fixed point computed"));
    let u_on = u_on.unwrap_or_else(|| 2.0 * u_star.expect("fixed point computed"));
    let e_bb_off = e_bb(u_off, level, &common)?;
    let e_bb_on = e_bb(u_on, level, &common)?;
    let widths = match u_star {
        Some(us) if widths && level >= 1 => {
            let levels: Vec<usize> = (1..=level).collect();
            transition_widths(&levels, 0.2 * us, 1.8 * us, &common.rg)?
        }
        _ => Vec::new(),
    };
    let report = Report {
        level,
        n_sites: sites_at_level(level),
        u_star,
        u_off,
        u_on,
        e_bb_off,
        e_bb_on,
        contrast: e_bb_off - e_bb_on,
        widths,
    };

    let text = json_text(&meta, &report)?;
    if let Some(path) = &out {
        write_file(path, &text)?;
    }
    if json {
        print!("{text}");
    } else {
        println!("level {} (N = {})", report.level, report.n_sites);
        if let Some(us) = report.u_star {
            println!("u*               = {us}");
        }
        println!("E_bb(u = {}) = {} bits", report.u_off, report.e_bb_off);
        println!("E_bb(u = {}) = {} bits", report.u_on, report.e_bb_on);
        println!("contrast         = {} bits", report.contrast);
        for w in &report.widths {
            println!("w({})             = {}", w.level, w.width);
        }
    }
    Ok(())
}
