use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sector ({nsites} sites, {nup} up, {ndown} down) out of range")]
    SectorOutOfRange {
        nsites: usize,
        nup: usize,
        ndown: usize,
    },
    #[error("bond ({0}, {1}) references a site outside the basis")]
    BondOutOfRange(usize, usize),
    #[error("site {site} out of range for {nsites} sites")]
    SiteOutOfRange { site: usize, nsites: usize },
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("charge gap {0:e} is negative beyond tolerance")]
    NegativeGap(f64),
    #[error("degenerate ground multiplet in sector ({nup}, {ndown}): gap {gap:e}")]
    Degenerate { nup: usize, ndown: usize, gap: f64 },
    #[error("hopping must be positive, got {0}")]
    NonPositiveHopping(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no sign change of u' - u on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("flow derivative {0} at the fixed point is not > 1")]
    IrrelevantFixedPoint(f64),
    #[error("level {requested} not available (trajectory has {available} levels)")]
    LevelOutOfRange { requested: usize, available: usize },
    #[error("collapse needs {0}")]
    CollapseInput(String),
    #[error("curves have no overlapping x range")]
    NoOverlap,
}
