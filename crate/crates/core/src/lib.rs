//! Perfect hash families from solution-free sets.
//!
//! Permutation sequences are turned into linear equations, equations are
//! traced back through ancestor strings to one-sided equations, and sets free
//! of solutions are lifted digit by digit. The [`hashfam`] module assembles
//! such sets into perfect hash families and checks them.

pub mod arrays;
pub mod error;
pub mod hashfam;
pub mod json;
pub mod scalar;
pub mod sequences;
pub mod solfree;

pub use arrays::{
    algorithm1, algorithm1_in, ancestor, array_from_sequence, diagnostics, equations_of_set, feasibility_report,
    theta_schedule, theta_schedule_in, AncestorKind, AncestorString, ArrayDiagnostics, BipartiteArray, FeasibilityReport,
    PlasticParams,
};
pub use error::{Error, Result};
pub use hashfam::{
    bound_lower_lll, bound_upper, build_phf, collision_equation, find_rainbow_cycle, integer_lift_bound, plastic_tower, plastic_tower_in,
    verify_shf, HashFamilyMatrix, PlasticSet, Provenance, RainbowCycle, ShfReport, ShfType,
};
pub use scalar::{Int, LogBase, Real};
pub use sequences::{analyze, enumerate_sequences, Monotonicity, PermSeq, SeqAnalysis};
pub use solfree::{
    behrend_base, find_solution, greedy_solution_free, greedy_solution_free_in, link_construct, max_solution_free_exact,
    pipeline_single_equation, verify_solution_free, Construction, Method, PipelineConfig, SearchLimits,
    SolutionFreeCert, SolutionWitness,
};

pub use num_bigint::BigInt;

pub type Seq = PermSeq<i64>;
pub type BigSeq = PermSeq<BigInt>;
pub type Array = BipartiteArray<i64>;
pub type BigArray = BipartiteArray<BigInt>;
pub type Tower = PlasticSet<i64>;
pub type BigTower = PlasticSet<BigInt>;
pub type Cert = SolutionFreeCert<i64>;
pub type BigCert = SolutionFreeCert<BigInt>;
