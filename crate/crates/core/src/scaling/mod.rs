//! Finite-size scaling: curves over `u` and levels, collapse quality under
//! `E = q^y_E f(N^(1/(2ν)) q)`, and a simplex fit of `(u_c, ν, y_E)`.

mod collapse;
mod curves;
mod simplex;
mod width;

pub use collapse::{
    collapse_residual, fit_collapse, fit_collapse_with, transform, CollapseFit, CollapseParams,
    FixedMask, ScaledCurve, MIN_CURVES, MIN_POINTS, Q_EXCLUSION,
};
pub use curves::{
    build_curves, curves_from_reports, default_grid, gap_curves, linear_grid, scan_reports,
    CurveSample, EntanglementCurve, Observable, MAX_LEVEL,
};
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};
pub use width::{
    transition_width, transition_widths, TransitionWidth, LOWER_THRESHOLD, UPPER_THRESHOLD,
};
