//! Graph maps `F: U ⊂ S²₋ → S²₊` and the great-circle fields they define.

pub mod chart;
pub mod classify;
pub mod locate;
pub mod map;

pub use chart::ChartSpec;
pub use classify::{classify_map, holomorphy_defects, MapClass, MapVerdict, CLASSIFY_TOL};
pub use locate::{
    default_seed, locate_fibre, locate_fibre_seeded, locate_fibre_traced, vector_field, vector_field_seeded,
    FibreSolution, LocateOptions,
};
pub use map::{differential, eval_map, ChartTerm, Differential, Domain, FibrationMap, MapKind, DIFFERENTIAL_STEP};
