//! Two-qubit copying machines: a fixed b-qubit state and a fixed
//! two-qubit unitary define an isometry from one qubit into two. This
//! crate decomposes any such isometry into canonical form, extracts the
//! Bloch-sphere affine channels of both outputs, builds equivalent
//! quantum circuits, and runs seeded BB84/B92 eavesdropping experiments
//! against the closed-form error rates.

pub mod bloch;
pub mod canonical;
pub mod circuits;
pub mod error;
pub mod linalg;
pub mod protocols;
pub mod stochastic;
pub mod stream;

pub use bloch::{AffineChannel, BlochVector, EllipsoidReport, GammaDelta};
pub use canonical::{CanonicalDecomposition, CanonicalParams, ProductStates, Subspace2of4};
pub use circuits::{Basis, Circuit, Gate, MeasuredCircuit, Wire};
pub use error::{Error, Result};
pub use linalg::{COp, CVec, Isometry, Keep, C64};
pub use stochastic::{CoinEmbedding, StochasticCopier};
