//! Grids, transforms, Fourier multipliers, frequency projectors and norms.
//!
//! Coefficients follow the convention `f(x) = Σₙ cₙ e^{i n x 2π/L}` with
//! `cₙ = (1/L)∫ e^{−i n x 2π/L} f(x) dx`, so pointwise products are plain
//! coefficient convolutions and the constant mode is the mean. Norms carry
//! the factor `L` so that `H⁰ = L²`.

pub(crate) mod fft;
mod field;
mod grid;
mod norm;
mod projector;
pub mod special;
mod symbol;

pub use fft::{padded_product, physical_map};
pub use field::SpectralField;
pub use grid::Grid;
pub use norm::{norm, Norm};
pub use projector::{project, psi, psi_dyadic, Projection};
pub use symbol::{apply_symbol, make_symbol, symbol_at, MultiplierSpec, PropagatorTag};
