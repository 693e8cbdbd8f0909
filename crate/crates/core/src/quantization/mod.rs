//! Weyl and Wick quantization in a truncated Hermite basis.
//!
//! Matrices are exact compressions `P a^w P` onto the levels `|α| ≤ D`. Products of
//! compressions agree with compressions of products only on interior levels,
//! `|α| ≤ D − guard`, where `guard` is the degree of the right factor.

pub mod hermite;
pub mod polynomial;
pub mod weyl;
pub mod wick;

pub use hermite::HermiteBasis;
pub use polynomial::PolySymbol;
pub use weyl::{convention_transport, oscillator_symbol, quantize_form, transport_map, weyl_matrix, Convention};
pub use wick::{
    composition_residual, composition_symbol, quadratic_correction, wave_packet, wick_by_quadrature, wick_check, wick_matrix,
    wick_symbol, PhaseGrid, WickCheck,
};
