use std::collections::BTreeMap;
use std::path::PathBuf;

use hubbard_rg::entanglement::{block_entanglement_curve, report, EntanglementReport};
use hubbard_rg::rg::{find_fixed_point, rg_flow, sites_at_level};
use hubbard_rg::scaling::{default_grid, linear_grid, Observable, MAX_LEVEL};
use rayon::prelude::*;

use super::thread_pool;
use crate::config::{
    bracket, invalid, non_negative, parse_levels, parse_observables, Common, CommonFlags, FileLayer,
    DEFAULT_LEVELS,
};
use crate::error::CliError;
use crate::output::{csv_text, num, write_file, Meta};

pub const DEFAULT_COUNT: usize = 41;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    pub common: CommonFlags,
    /// First grid point [default: 0.2 u*]
    #[arg(long)]
    pub u_min: Option<String>,
    /// Last grid point [default: 1.8 u*]
    #[arg(long)]
    pub u_max: Option<String>,
    /// Number of grid points [default: 41]
    #[arg(long)]
    pub u_count: Option<String>,
    /// Levels as a list or range, e.g. 0-5 or 1,3 [default: 0-5]
    #[arg(long)]
    pub levels: Option<String>,
    /// Comma list of E_bb, E_b7, E_avg, E_single, gap, or all [default: all]
    #[arg(long)]
    pub observables: Option<String>,
    /// Also scan block entanglement vs block size in a system of level L
    #[arg(long, value_name = "L")]
    pub block_total_level: Option<String>,
    /// Fixed-point bracket used for the default grid [default: 1]
    #[arg(long)]
    pub lo: Option<String>,
    /// Fixed-point bracket used for the default grid [default: 25]
    #[arg(long)]
    pub hi: Option<String>,
    /// Output directory [default: scan-out]
    #[arg(long)]
    pub out_dir: Option<String>,
}

enum Grid {
    Explicit { lo: f64, hi: f64, count: usize },
    AroundFixedPoint { lo: f64, hi: f64 },
}

struct Point {
    u: f64,
    reports: Vec<Result<EntanglementReport, String>>,
    block: Option<Result<Vec<(u64, f64)>, String>>,
}

fn compute_point(
    u: f64,
    levels: &[usize],
    block_total: Option<usize>,
    common: &Common,
) -> Point {
    let steps = levels.iter().max().copied().unwrap_or(0).max(block_total.unwrap_or(0)) + 1;
    match rg_flow(u, steps, &common.rg) {
        Ok(traj) => Point {
            u,
            reports: levels
                .iter()
                .map(|&l| report(&traj, l, common.base).map_err(|e| e.to_string()))
                .collect(),
            block: block_total.map(|total| {
                let blocks: Vec<usize> = (0..=total).collect();
                block_entanglement_curve(&traj, total, &blocks).map_err(|e| e.to_string())
            }),
        },
        Err(e) => Point {
            u,
            reports: levels.iter().map(|_| Err(e.to_string())).collect(),
            block: block_total.map(|_| Err(e.to_string())),
        },
    }
}

fn status(r: &Result<impl Sized, String>) -> String {
    match r {
        Ok(_) => "ok".into(),
        Err(e) => format!("error: {e}"),
    }
}

pub fn run(args: &Args, file: &FileLayer) -> Result<(), CliError> {
    let common = Common::resolve(&args.common, file)?;
    let levels = match file.get_with(&args.levels, "levels", parse_levels)? {
        Some(l) => l,
        None => parse_levels(DEFAULT_LEVELS).expect("default levels parse"),
    };
    let observables = file
        .get_with(&args.observables, "observables", parse_observables)?
        .unwrap_or_else(|| Observable::ALL.to_vec());
    let block_total = file.get::<usize>(&args.block_total_level, "block-total-level")?;
    if let Some(l) = block_total.filter(|&l| l > MAX_LEVEL) {
        return Err(invalid("block-total-level", format!("level {l} above {MAX_LEVEL}")));
    }
    let count = file.get::<usize>(&args.u_count, "u-count")?.unwrap_or(DEFAULT_COUNT);
    if count == 0 {
        return Err(invalid("u-count", "must be at least 1"));
    }
    let u_min = file.get::<f64>(&args.u_min, "u-min")?;
    let u_max = file.get::<f64>(&args.u_max, "u-max")?;
    let grid = match (u_min, u_max) {
        (Some(a), Some(b)) => {
            let a = non_negative("u-min", a)?;
            let b = non_negative("u-max", b)?;
            if b < a || (b == a && count > 1) {
                return Err(invalid("u-max", format!("must exceed u-min ({a}), got {b}")));
            }
            Grid::Explicit { lo: a, hi: b, count }
        }
        (None, None) => {
            if count != DEFAULT_COUNT {
                return Err(invalid("u-count", "needs u-min and u-max"));
            }
            let (lo, hi) = bracket(file, &args.lo, &args.hi)?;
            Grid::AroundFixedPoint { lo, hi }
        }
        _ => return Err(invalid("u-min", "u-min and u-max must be given together")),
    };
    let out_dir = file
        .get::<PathBuf>(&args.out_dir, "out-dir")?
        .unwrap_or_else(|| PathBuf::from("scan-out"));

    let mut entries = BTreeMap::new();
    common.hash_entries(&mut entries);
    let join = |v: &[String]| v.join(",");
    entries.insert("levels".into(), join(&levels.iter().map(|l| l.to_string()).collect::<Vec<_>>()));
    entries.insert(
        "observables".into(),
        join(&observables.iter().map(|o| o.name().to_string()).collect::<Vec<_>>()),
    );
    if let Some(t) = block_total {
        entries.insert("block-total-level".into(), t.to_string());
    }
    match grid {
        Grid::Explicit { lo, hi, count } => {
            entries.insert("u-min".into(), lo.to_string());
            entries.insert("u-max".into(), hi.to_string());
            entries.insert("u-count".into(), count.to_string());
        }
        Grid::AroundFixedPoint { lo, hi } => {
            entries.insert("grid".into(), "fixed-point".into());
            entries.insert("lo".into(), lo.to_string());
            entries.insert("hi".into(), hi.to_string());
        }
    }
    let meta = Meta::new("scan", &entries, common.base.label());

    let pool = thread_pool(common.workers)?;
    let u_grid = match grid {
        Grid::Explicit { lo, hi, count } => linear_grid(lo, hi, count),
        Grid::AroundFixedPoint { lo, hi } => default_grid(find_fixed_point(lo, hi, &common.rg)?),
    };
    let points: Vec<Point> = pool.install(|| {
        u_grid
            .par_iter()
            .map(|&u| compute_point(u, &levels, block_total, &common))
            .collect()
    });

    let base = common.base.label();
    let mut report_rows = Vec::new();
    let mut curve_rows: Vec<Vec<Vec<String>>> = vec![Vec::new(); observables.len()];
    let mut failures = 0usize;
    let mut successes = 0usize;
    for p in &points {
        for (&level, r) in levels.iter().zip(&p.reports) {
            let n = sites_at_level(level).to_string();
            match r {
                Ok(_) => successes += 1,
                Err(_) => failures += 1,
            }
            let values: Vec<String> = match r {
                Ok(rep) => [rep.e_bb, rep.e_b7, rep.e_avg, rep.e_single, rep.gap].map(num).to_vec(),
                Err(_) => vec![String::new(); 5],
            };
            let mut row = vec![num(p.u), level.to_string(), n.clone()];
            row.extend(values);
            row.push(base.to_string());
            row.push(status(r));
            report_rows.push(row);
            for (o, rows) in observables.iter().zip(&mut curve_rows) {
                let value = r.as_ref().map(|rep| num(o.extract(rep))).unwrap_or_default();
                rows.push(vec![o.name().to_string(), num(p.u), n.clone(), value, status(r)]);
            }
        }
    }

    write_file(
        &out_dir.join("report.csv"),
        &csv_text(
            &meta,
            &["u0", "level", "N", "E_bb", "E_b7", "E_avg", "E_single", "gap", "base", "status"],
            &report_rows,
        )?,
    )?;
    for (o, rows) in observables.iter().zip(&curve_rows) {
        write_file(
            &out_dir.join(format!("curve_{}.csv", o.name())),
            &csv_text(&meta, &["observable", "u", "N", "E", "status"], rows)?,
        )?;
    }
    if let Some(total) = block_total {
        let mut rows = Vec::new();
        for p in &points {
            match p.block.as_ref().expect("block scan requested") {
                Ok(curve) => {
                    for (m, &(sites, e)) in curve.iter().enumerate() {
                        rows.push(vec![
                            num(p.u),
                            total.to_string(),
                            m.to_string(),
                            sites.to_string(),
                            num(e),
                            "ok".into(),
                        ]);
                    }
                }
                Err(e) => {
                    failures += 1;
                    rows.push(vec![
                        num(p.u),
                        total.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        format!("error: {e}"),
                    ]);
                }
            }
        }
        write_file(
            &out_dir.join("block_size.csv"),
            &csv_text(
                &meta,
                &["u0", "total_level", "block_level", "block_sites", "E_block", "status"],
                &rows,
            )?,
        )?;
    }

    eprintln!(
        "hubbard-rg: {} grid points x {} levels written to {}",
        u_grid.len(),
        levels.len(),
        out_dir.display()
    );
    if failures > 0 {
        eprintln!("hubbard-rg: {failures} rows flagged as failed");
    }
    if successes == 0 {
        return Err(CliError::Numerical("every grid point failed".into()));
    }
    Ok(())
}
