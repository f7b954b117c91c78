use std::collections::BTreeMap;
use std::path::PathBuf;

use hubbard_rg::rg::{find_fixed_point, nu_from_linearization, rescaling_factor};
use serde::Serialize;

use crate::config::{bracket, channel_name, Common, CommonFlags, FileLayer};
use crate::error::CliError;
use crate::output::{json_text, write_file, Meta};

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub common: CommonFlags,
    /// Lower end of the search bracket [default: 1]
    #[arg(long)]
    pub lo: Option<String>,
    /// Upper end of the search bracket [default: 25]
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
    bracket: [f64; 2],
    channel: &'static str,
    u_star: f64,
    slope: f64,
    nu: f64,
    length_rescaling: f64,
}

pub fn run(args: &Args, file: &FileLayer) -> Result<(), CliError> {
    let common = Common::resolve(&args.common, file)?;
    let (lo, hi) = bracket(file, &args.lo, &args.hi)?;
    let json = file.switch(args.json, "json")?;
    let out = file.get::<PathBuf>(&args.out, "out")?;

    let mut entries = BTreeMap::new();
    common.hash_entries(&mut entries);
    entries.insert("lo".into(), lo.to_string());
    entries.insert("hi".into(), hi.to_string());
    let meta = Meta::new("fixed-point", &entries, common.base.label());

    let u_star = find_fixed_point(lo, hi, &common.rg)?;
    let lin = nu_from_linearization(u_star, &common.rg)?;
    let report = Report {
        bracket: [lo, hi],
        channel: channel_name(common.rg.channel),
        u_star,
        slope: lin.slope,
        nu: lin.nu,
        length_rescaling: rescaling_factor(),
    };
    let text = json_text(&meta, &report)?;
    if let Some(path) = &out {
        write_file(path, &text)?;
    }
    if json {
        print!("{text}");
    } else {
        println!("u*      = {}", report.u_star);
        println!("du'/du  = {}", report.slope);
        println!("nu      = {}", report.nu);
    }
    Ok(())
}
