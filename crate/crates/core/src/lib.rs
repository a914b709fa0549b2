//! Qudit-to-qubit encodings and the tools around them: Pauli algebra,
//! operator mapping, Trotter synthesis, peephole optimization, conversion
//! circuits, CNOT bounds, composite-model pricing and a dense oracle.

pub mod bounds;
pub mod circuit;
pub mod convert;
pub mod encoder;
pub mod encoding;
pub mod error;
pub mod models;
pub mod operators;
pub mod optimizer;
pub mod pauli;
pub mod sim;

pub use circuit::{Circuit, Decompose, Gate, ResourceReport};
pub use convert::ConversionKind;
pub use encoder::EncodedOperator;
pub use encoding::{BitString, EncodingKind, EncodingSpec, LocalCode};
pub use error::{Error, Result};
pub use models::{LocalTerm, ModelKind, ModelParams, ModelSpec, Scenario, Scheme, SchemeReport};
pub use operators::{BosonOp, QuditMatrix, SpinAxis};
pub use optimizer::PassConfig;
pub use pauli::{Pauli, PauliString, PauliSum};
