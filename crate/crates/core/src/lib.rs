//! Orthogonal and symplectic orthogonal transformations to hollow and
//! constant-diagonal form, and their use for stabilising linear systems by
//! rotation and by multiplicative noise.

pub mod error;
pub mod fixtures;
pub mod hollow;
pub mod io;
pub mod matrix;
pub mod pairhollow;
pub mod poly;
pub mod random;
pub mod rotation;
pub mod sdesim;
pub mod spectrum;
pub mod stabilize;
pub mod sympl;

/// Machine epsilon for `f64`.
pub const EPS: f64 = f64::EPSILON;

pub use error::{Error, Result};
pub use hollow::{constant_diagonalise, hollowise, neutral_vector_2x2, HollowReport};
pub use matrix::DenseMatrix;
pub use pairhollow::{common_neutral_vector_3, pair_hollowise, realize_jnr_point, NeutralBranch, NeutralPair3, PairReport};
pub use rotation::{apply_givens_similarity, orthogonality_residual, Factor, GivensRotation, OrthogonalAccumulator};
pub use spectrum::{eigenvalues, spectral_abscissa, Spectrum};
pub use sympl::{equalize_halves, sympl_constant_diagonalise, sympl_hollowise_4x4, symplectic_residual, SymplReport, SymplecticGenerator};
pub use sdesim::{euler_maruyama, log_slope, simulate_servo, InitialState, SamplePathEnsemble, SdeConfig, ServoTrajectory};
pub use stabilize::{
    build_lyapunov_matrix, make_noise_pattern, ms_stable, noise_stabilize, rotation_stabilize, verify_block_hollow_pattern,
    GainSearch, LyapunovOperatorMatrix, NoisePattern, StabilizationDesign,
};
