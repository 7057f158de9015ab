//! Iterated Beurling transforms `B^k` on the plane, their disk- and
//! square-truncated maximal variants, and Hardy–Littlewood maximal functions.
//!
//! * [`kernel`]: closed-form kernels `b_k` and multipliers `(conj(xi)/xi)^k`.
//! * [`exact`]: exact rational and `{1, pi, 1/pi}` arithmetic for the center
//!   values `B^k(chi_Q)(0)` and the identities behind them.
//! * [`quadrature`]: adaptive planar quadrature with principal values.
//! * [`grid`]: sampled fields and the FFT realization of `B^k`.
//! * [`maximal`]: maximal operators and Cotlar-type ratio fields.
//! * [`counterexample`]: growth of the square-truncated maximal transform of
//!   `B^{-1}(chi_Q0)` and the sector construction for even `k`.
//! * [`experiments`]: the reproducible experiment harness behind the CLI.

pub mod counterexample;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod grid;
pub mod kernel;
pub mod maximal;
pub mod quadrature;

pub use error::{Error, Result};
pub use kernel::{ComplexPoint, Direction, KernelSpec};
pub use num_complex::Complex64;
