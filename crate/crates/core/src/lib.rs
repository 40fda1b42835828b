//! Numerical laboratory for finite-rank nuclear operators: Lorentz sequence
//! quasinorms, weak vector norms, nuclear representations, spectra, Fredholm
//! determinants, factorizations through sequence spaces and direct sums, plus
//! the seeded experiment runner behind the `stl` command line tool.

pub mod determinant;
pub mod directsum;
pub mod error;
pub mod experiments;
pub mod factorization;
pub mod lorentz;
pub mod matrix;
pub mod nuclear;
pub mod sampling;
pub mod spectral;
pub mod weaknorm;

pub use error::{Error, Result};
pub use lorentz::{Exponent, FactorPair, LorentzParams, ScalarSequence};
pub use matrix::DenseMatrix;
pub use nuclear::{NuclearRep, QuasinormEstimate, QuasinormKind};
pub use num_complex::Complex64;
pub use spectral::Spectrum;
pub use weaknorm::VectorFamily;
