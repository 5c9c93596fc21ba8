//! Decoded quantum interferometry for Pauli Hamiltonians: symplectic codes,
//! syndrome decoders, polynomial filters, pilot-state amplitudes, a dense
//! reference simulator, and classical dequantization baselines.

pub mod code;
pub mod combinatorics;
pub mod decoders;
pub mod dequant;
pub mod ensembles;
pub mod dense;
pub mod error;
pub mod gf2;
pub mod pauli;
pub mod noncommuting;
pub mod poly;
pub mod sim;
pub mod symplectic;

pub use code::{Distance, SymplecticCode, TannerGraph};
pub use decoders::{BpDecoder, DecodeResult, DecodeStatus, GeDecoder, LookupDecoder, SyndromeDecoder};
pub use error::{HdqiError, Result};
pub use gf2::{BitMatrix, BitVec};
pub use pauli::{PauliHamiltonian, PauliWord, Phase, SignedTerm};

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating scalar accepted by the generic numeric routines.
pub trait Real: Float + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static {}

pub type C64 = num_complex::Complex64;
pub type Rational = num_rational::BigRational;
pub type Poly = poly::UniPoly<f64>;
pub type RationalPoly = poly::UniPoly<Rational>;
pub type Weights = poly::SymmetricWeights<f64>;
