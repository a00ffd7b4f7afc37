//! Log discrepancies and minimal log discrepancies of surface germs.

pub mod checks;
pub mod model;
pub mod oracle;
pub mod profile;
pub mod resolution;

pub use checks::{
    adjunction_coefficient, check_convexity, check_near_one_window, check_singular_bound,
    check_smooth_point, AdjunctionDecomposition, Violation,
};
pub use model::{Branch, SurfaceGermModel};
pub use oracle::mld_oracle;
pub use profile::{
    candidates, classify, generic_point_mld, mld_point, profile, smooth_point_mld,
    solve_discrepancies, Classification, DiscrepancyProfile, GenericTarget, Locus, Mld,
};
pub use resolution::{
    all_computing_paths, blow_up, check_computing_path, exceeds_sixteen_over, find_computing_path,
    path_conditions, resolution_model, ComputingPath, ExtraConditions, PathCase, PathConditions,
    ResolutionCase, ResolvedModel,
};
