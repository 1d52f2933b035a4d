//! Exact q-series engine for generalized Nahm sums attached to pairs of
//! Dynkin diagrams, together with the 2d CFT characters they are compared
//! against and a registry of identities checked to a truncation order.
//!
//! Modules:
//! - [`qseries`]: truncated series in `q^(1/g)` with big-integer coefficients
//! - [`dynkin`]: Cartan data catalog, exact rational matrices, quadruples
//! - [`nahm`]: pruned lattice enumeration of generalized Nahm sums
//! - [`cft`]: Virasoro, N=1, U(1), free fermion, parafermion characters
//! - [`analysis`]: Nahm equation, Rogers dilogarithm, central charges
//! - [`registry`]: identity records and the verification runner

pub mod analysis;
pub mod cft;
pub mod dynkin;
pub mod error;
pub mod nahm;
pub mod qseries;
pub mod rational;
pub mod registry;

pub use cft::{CharacterSpec, Label, Sector};
pub use dynkin::{
    build_quadruple, cartan_data, central_charge, dual_quadruple, kronecker,
    permutation_equivalent, rational_inverse, CartanData, DiagramKind, Family, RationalMatrix,
};
pub use error::{Error, Result};
pub use nahm::{min_exponent_tail, nahm_sum, LatticeConstraint, NahmQuadruple};
pub use qseries::{
    congruence_product, equal_to_order, pochhammer, theta_series, Comparison, Length, QSeries,
};
pub use rational::{rat, Rational};
pub use registry::{load_registry, run_suite, verify_identity, IdentityRecord, VerificationReport};
