//! Classical k-HodgeRank on clique complexes together with a matrix-level
//! simulator of its quantum counterpart: polynomial singular-value filters of
//! the scaled boundary operator, postselection statistics, the Dirac
//! encoding cross-check, and Monte-Carlo models of the readout procedures.

pub mod chebyshev;
pub mod complex;
pub mod dirac;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod filters;
pub mod fixtures;
pub mod hodgerank;
pub mod linalg;
pub mod qtsp;

pub use complex::{BoundaryMatrix, CliqueComplex, ComplexSummary, Graph, HodgeLaplacian, HodgeProjectors, OrientedSimplex};
pub use error::{HodgeError, Result};
pub use exec::Exec;
pub use filters::{apply_filter_sv, pseudoinverse_filter, FilterKind, FilterSpec, InversePolynomial};
pub use hodgerank::{
    assemble_edge_signal, consistency_measures, effective_condition_params, hodgerank_solve, ComparisonRecord,
    ConditionParams, ConsistencyMeasures, PairwiseData, RankResult, SimplicialSignal,
};
pub use dirac::{dirac_encoding, DiracEncoding, PueReport, SignConvention};
pub use estimators::{
    estimate_consistency, hadamard_test_sample, relative_ranking, tomography_ranking, EstimateReport, EstimatorConfig,
    EstimatorJob, Mode, Subspace, TomographyAccess,
};
pub use qtsp::{cost_model, prepare_signal_state, qtsp_apply, quantum_hodgerank, CostReport, FilterOutcome, OutcomeStatus};
