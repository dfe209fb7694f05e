//! Fourier quasicrystals from Lee-Yang polynomials.
//!
//! A Lee-Yang polynomial `p` (no zeros where all coordinates lie inside the
//! open unit polydisk, none where all lie outside the closed one) restricted
//! to a line `x -> exp(i x ell)` with positive direction `ell` is real-rooted,
//! and the counting measure of its zero set is a Fourier quasicrystal. This
//! crate constructs such polynomials, finds their line zeros by monotone
//! phase tracking, verifies the structural laws they satisfy (density, max
//! gap, phase-function identities), regularizes singular examples, and
//! estimates gap distributions along three routes with cross-validation
//! oracles:
//!
//! * empirically along a line ([`zeroline`], [`gapdist::empirical_gaps`]);
//! * by torus Monte-Carlo in the unit direction ([`gapdist::nu_one`]);
//! * by rational-direction substitution ([`gapdist::nu_rational`]).
//!
//! ```
//! use lyfq::polycore::MultiPoly;
//! use lyfq::zeroline::{self, TrackOpts};
//! use lyfq::gapdist;
//! use num_complex::Complex64;
//!
//! // p = 1 - z1 z2 restricted to direction (1, sqrt 2): an arithmetic
//! // progression of zeros with spacing 2 pi / (1 + sqrt 2)
//! let p = MultiPoly::new(2, vec![
//!     (vec![0, 0], Complex64::new(1.0, 0.0)),
//!     (vec![1, 1], Complex64::new(-1.0, 0.0)),
//! ])?;
//! let ell = [1.0, std::f64::consts::SQRT_2];
//! let zeros = zeroline::find_zeros(&p, &ell, 0.0, 40.0, &TrackOpts::default())?;
//! let gaps = gapdist::empirical_gaps(&zeros)?;
//! let spacing = 2.0 * std::f64::consts::PI / (1.0 + std::f64::consts::SQRT_2);
//! assert!((gapdist::mean_gap(&gaps) - spacing).abs() < 1e-9);
//! # Ok::<(), lyfq::Error>(())
//! ```

pub mod ellexpr;
pub mod error;
pub mod gapdist;
pub mod io;
pub mod linalg;
pub mod lycheck;
pub mod nuij;
pub mod polycore;
pub mod randutil;
pub mod torusdyn;
pub mod uniroots;
pub mod zeroline;

pub use error::{Error, Result};
pub use polycore::{MultiPoly, UnivariatePoly};
pub use uniroots::AngleSpectrum;
pub use zeroline::{PhaseTrack, TrackOpts, ZeroSet};
