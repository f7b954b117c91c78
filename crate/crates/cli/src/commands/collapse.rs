use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hubbard_rg::scaling::{
    fit_collapse, transform, CollapseParams, CurveSample, EntanglementCurve, FixedMask,
};
use serde::Serialize;

use crate::config::{invalid, parse_fixed, positive, FileLayer};
use crate::error::{io_error, CliError};
use crate::output::{csv_text, json_text, num, sha256_hex, write_file, Meta};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Curve CSV with columns observable, u, N, E and an optional status
    #[arg(long)]
    pub input: Option<String>,
    /// Observable whose rows are fitted [default: E_bb]
    #[arg(long)]
    pub observable: Option<String>,
    /// Starting u_c [default: middle of the u range]
    #[arg(long)]
    pub init_uc: Option<String>,
    /// Starting nu [default: 1]
    #[arg(long)]
    pub init_nu: Option<String>,
    /// Starting y_E [default: 0]
    #[arg(long)]
    pub init_ye: Option<String>,
    /// Parameters held at their start values: none or a list of u_c, nu, y_E [default: y_E]
    #[arg(long)]
    pub fix: Option<String>,
    /// Output directory [default: collapse-out]
    #[arg(long)]
    pub out_dir: Option<String>,
}

/// Rows of one observable grouped by `N`.
pub struct CurveInput {
    pub curves: Vec<EntanglementCurve>,
    pub skipped: usize,
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize, CliError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| CliError::Validation(format!("{}: missing column {name:?}", path.display())))
}

/// Reads curves of `observable` from `text`. Lines starting with `#` are
/// ignored; rows whose status is present and not `ok` are skipped.
pub fn parse_curves(text: &str, observable: &str, path: &Path) -> Result<CurveInput, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let at = |line: u64, msg: String| CliError::Validation(format!("{} line {line}: {msg}", path.display()));
    let csv_error = |e: csv::Error| match e.position() {
        Some(pos) => at(pos.line(), e.to_string()),
        None => CliError::Validation(format!("{}: {e}", path.display())),
    };
    let headers = reader.headers().map_err(csv_error)?.clone();
    let i_obs = column(&headers, "observable", path)?;
    let i_u = column(&headers, "u", path)?;
    let i_n = column(&headers, "N", path)?;
    let i_e = column(&headers, "E", path)?;
    let i_status = headers.iter().position(|h| h.trim() == "status");

    let mut groups: BTreeMap<u64, Vec<CurveSample>> = BTreeMap::new();
    let mut skipped = 0;
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.get(i_obs) != Some(observable) {
            continue;
        }
        if let Some(s) = i_status.and_then(|i| record.get(i)) {
            if s != "ok" {
                skipped += 1;
                continue;
            }
        }
        let field = |i: usize, name: &str| -> Result<&str, CliError> {
            record.get(i).ok_or_else(|| at(line, format!("missing field {name}")))
        };
        let u: f64 = field(i_u, "u")?
            .parse()
            .map_err(|e| at(line, format!("column u: {e}")))?;
        let n: u64 = field(i_n, "N")?
            .parse()
            .map_err(|e| at(line, format!("column N: {e}")))?;
        let value: f64 = field(i_e, "E")?
            .parse()
            .map_err(|e| at(line, format!("column E: {e}")))?;
        if !u.is_finite() || !value.is_finite() {
            return Err(at(line, "u and E must be finite".into()));
        }
        if n == 0 {
            return Err(at(line, "N must be positive".into()));
        }
        groups.entry(n).or_default().push(CurveSample { u, value });
    }
    if groups.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no usable rows for observable {observable:?}",
            path.display()
        )));
    }
    let curves = groups
        .into_iter()
        .map(|(n, samples)| EntanglementCurve::new(observable, n, samples))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CurveInput { curves, skipped })
}

#[derive(Debug, Serialize)]
struct Fixed {
    u_c: bool,
    nu: bool,
    #[serde(rename = "y_E")]
    y_e: bool,
}

impl From<FixedMask> for Fixed {
    fn from(m: FixedMask) -> Self {
        Self {
            u_c: m.u_c,
            nu: m.nu,
            y_e: m.y_e,
        }
    }
}

#[derive(Debug, Serialize)]
struct Start {
    u_c: f64,
    nu: f64,
    #[serde(rename = "y_E")]
    y_e: f64,
}

#[derive(Debug, Serialize)]
struct Report {
    observable: String,
    input_sha256: String,
    sizes: Vec<u64>,
    init: Start,
    fixed: Fixed,
    u_c: f64,
    nu: f64,
    #[serde(rename = "y_E")]
    y_e: f64,
    residual: f64,
    evaluations: usize,
    converged: bool,
}

pub fn run(args: &Args, file: &FileLayer) -> Result<(), CliError> {
    let input = file
        .get::<PathBuf>(&args.input, "input")?
        .ok_or_else(|| invalid("input", "a curve CSV is required"))?;
    let observable = file
        .get::<String>(&args.observable, "observable")?
        .unwrap_or_else(|| "E_bb".into());
    let init_uc = file.get::<f64>(&args.init_uc, "init-uc")?;
    if let Some(v) = init_uc.filter(|v| !v.is_finite()) {
        return Err(invalid("init-uc", format!("must be finite, got {v}")));
    }
    let init_nu = positive("init-nu", file.get::<f64>(&args.init_nu, "init-nu")?.unwrap_or(1.0))?;
    let init_ye = file.get::<f64>(&args.init_ye, "init-ye")?.unwrap_or(0.0);
    if !init_ye.is_finite() {
        return Err(invalid("init-ye", format!("must be finite, got {init_ye}")));
    }
    let fixed = file.get_with(&args.fix, "fix", parse_fixed)?.unwrap_or(FixedMask::Y_E);
    let out_dir = file
        .get::<PathBuf>(&args.out_dir, "out-dir")?
        .unwrap_or_else(|| PathBuf::from("collapse-out"));

    let text = std::fs::read_to_string(&input).map_err(|e| io_error(&input, e))?;
    let data = parse_curves(&text, &observable, &input)?;
    if data.skipped > 0 {
        eprintln!("hubbard-rg: skipped {} rows flagged as failed", data.skipped);
    }
    let (u_lo, u_hi) = data
        .curves
        .iter()
        .flat_map(|c| c.samples.iter().map(|s| s.u))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), u| (a.min(u), b.max(u)));
    let init = CollapseParams::new(init_uc.unwrap_or(0.5 * (u_lo + u_hi)), init_nu, init_ye);

    let input_sha256 = sha256_hex(text.as_bytes());
    let mut entries = BTreeMap::new();
    entries.insert("input-sha256".into(), input_sha256.clone());
    entries.insert("observable".into(), observable.clone());
    entries.insert("init-uc".into(), init.u_c.to_string());
    entries.insert("init-nu".into(), init.nu.to_string());
    entries.insert("init-ye".into(), init.y_e.to_string());
    entries.insert("fix".into(), format!("{},{},{}", fixed.u_c, fixed.nu, fixed.y_e));
    let meta = Meta::new("collapse", &entries, "none");

    let fit = fit_collapse(&data.curves, &init, fixed)?;
    let report = Report {
        observable: observable.clone(),
        input_sha256,
        sizes: data.curves.iter().map(|c| c.n_sites).collect(),
        init: Start {
            u_c: init.u_c,
            nu: init.nu,
            y_e: init.y_e,
        },
        fixed: fixed.into(),
        u_c: fit.u_c,
        nu: fit.nu,
        y_e: fit.y_e,
        residual: fit.residual,
        evaluations: fit.evaluations,
        converged: fit.converged,
    };
    write_file(&out_dir.join("collapse.json"), &json_text(&meta, &report)?)?;

    let scaled = transform(&data.curves, &fit.params())?;
    let rows: Vec<Vec<String>> = scaled
        .iter()
        .flat_map(|c| {
            let obs = &observable;
            c.points
                .iter()
                .map(move |&(x, y)| vec![obs.clone(), c.n_sites.to_string(), num(x), num(y)])
        })
        .collect();
    write_file(
        &out_dir.join("master_curve.csv"),
        &csv_text(&meta, &["observable", "N", "x", "y"], &rows)?,
    )?;

    println!("u_c      = {}", fit.u_c);
    println!("nu       = {}", fit.nu);
    println!("y_E      = {}", fit.y_e);
    println!("residual = {}", fit.residual);
    println!("converged after {} evaluations: {}", fit.evaluations, fit.converged);
    Ok(())
}
