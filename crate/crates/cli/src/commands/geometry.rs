use std::collections::BTreeMap;
use std::path::PathBuf;

use hubbard_rg::lattice::build_block_geometry;

use crate::config::FileLayer;
use crate::error::CliError;
use crate::output::{emit, json_text, Meta};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Write the JSON here instead of stdout
    #[arg(long)]
    pub out: Option<String>,
}

pub fn run(args: &Args, file: &FileLayer) -> Result<(), CliError> {
    let out = file.get::<PathBuf>(&args.out, "out")?;
    let geometry: serde_json::Value = serde_json::from_str(&build_block_geometry().to_json())
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let meta = Meta::new("geometry-dump", &BTreeMap::new(), "none");
    let text = json_text(&meta, &serde_json::json!({ "geometry": geometry }))?;
    emit(out.as_deref(), &text)
}
