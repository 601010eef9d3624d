//! Intrinsic randomness of quantum measurement outcomes.
//!
//! This crate quantifies how much of the entropy produced by measuring a
//! quantum state with a POVM is unknowable to an adversary holding the
//! device's hidden degrees of freedom. The toolbox:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigensolver, entropies;
//! - [`povm`]: POVM validation, refinement/grouping, extremality
//!   certification, and decomposition into extremal measurements;
//! - [`naimark`]: canonical Naimark extensions turning a POVM into a PVM on
//!   system (x) ancilla;
//! - [`randomness`]: the R_c / R_q functionals, randomness of extremal
//!   POVMs through the canonical extension, the convex-roof value over POVM
//!   decompositions, state-independent minima, and analytic bounds;
//! - [`oracle`]: seeded instance generators and brute-force baselines the
//!   optimizers are validated against.
//!
//! Optimizer restarts and grid scans run data-parallel under the `parallel`
//! feature (on by default, via rayon) and sequentially without it; results
//! are bit-identical either way because every reduction orders candidates
//! by (value, index) and all randomness is counter-based from explicit
//! seeds.

pub mod linalg;
pub mod naimark;
pub mod oracle;
pub mod povm;
pub mod randomness;

mod exec;

pub(crate) use linalg::entropy_of_weights;

pub use linalg::{ComplexMatrix, DensityState, Ket, LinalgError};
pub use naimark::{canonical_extension, consistency_check, embed_state, NaimarkExtension, Pvm};
pub use povm::{
    extremal_decompose, extremality_check, Decomposition, ExtremalityStatus, ExtremalityVerdict,
    Povm, PovmError,
};
pub use randomness::{
    min_randomness, r_c_pvm, r_cf, r_extremal, BoundType, Measure, OptimizerConfig,
    PureDecomposition, RandomnessError, RandomnessReport,
};
