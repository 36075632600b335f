//! Kernel SVM training with ADMM on a Nyström-factorized kernel.
//!
//! The nonlinear problem is reduced to a linear SVM on the low-rank features
//! `V` of `Ψ ≈ V·Vᵀ`, solved by a closed-form ADMM iteration whose only
//! factorization is a Jacobi eigendecomposition computed once up front. A
//! reference SMO solver is included for comparison.

pub mod admm;
pub mod data;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod kernel;
pub mod linalg;
pub mod nystrom;
pub mod smo;
pub mod svm;

pub use admm::{AdmmConfig, AugmentedDesign, ConvergenceTrace, IterationRecord, LinearModel, SolverPath};
pub use data::{Dataset, ScalingMode, ScalingRecord, SplitSpec};
pub use error::{Error, Result};
pub use exec::Exec;
pub use kernel::KernelParams;
pub use nystrom::{NystromConfig, NystromFactor};
pub use smo::{SmoConfig, SmoResult};
pub use svm::{NonlinearModel, TrainOptions, TrainReport};
