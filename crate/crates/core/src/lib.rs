//! Spectral simulator for the free and delta-kicked Dirac equation on a
//! periodic box, with the time-dependent integrals of motion of the free
//! particle (initial momentum and position, orbital angular momentum, spin,
//! Newton-Wigner position) and of the kicked particle (initial momentum).
//!
//! Fields live on a [`grid::GridSpec`]; the momentum-diagonal pieces are
//! exact 4x4 mode kernels from [`clifford`], position-side pieces go
//! through the FFT. [`oracle`] holds dense brute-force counterparts used
//! only for verification.

pub mod clifford;
pub mod error;
pub mod evolution;
pub mod fft;
pub mod field;
pub mod grid;
pub mod invariants;
pub mod oracle;
pub mod ops;
pub mod par;
pub mod schrodinger;
pub mod spnf;

pub use clifford::{Momentum3, SpinorMatrix};
pub use error::{DiracError, Result};
pub use field::{GridField, Rep, ScalarField, SpinorField, WavepacketParams};
pub use grid::GridSpec;
