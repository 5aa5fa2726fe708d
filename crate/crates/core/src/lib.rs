//! Entropy, dimension and rate–distortion quantities of ℤ and ℤ² subshifts of
//! finite type under the shift ultrametrics
//!
//! ```text
//! d(x, y) = α^{-min{ |u|∞ : x_u ≠ y_u }}      ρ(x, y) = α^{-min{ |u|₂ : x_u ≠ y_u }}
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: exact integer geometry on ℤ² (rectangles, the 3R dilation,
//!   Λ-boundaries, the greedy disjoint-subfamily selection, the skew windows
//!   `Λ_{a,b}(M,N)`).
//! - [`subshift`]: SFT presentations, locally admissible pattern counting
//!   (transfer operator on rectangles, backtracking elsewhere), 1D
//!   transfer-matrix entropy and the exactly tractable fixture families.
//! - [`metric`]: the two ultrametrics, resolution indices and Bowen windows.
//! - [`dimension`]: covering numbers, entropy at a resolution, metric mean
//!   dimension and mean Hausdorff dimension estimators.
//! - [`info`]: measures, Shannon quantities, Kolmogorov–Sinai entropy,
//!   rate–distortion bounds and Blahut–Arimoto.
//!
//! Everything is a pure function of its inputs. With the default `parallel`
//! feature the heavy loops run on rayon; results are bit-identical to the
//! sequential path.

#![forbid(unsafe_code)]

pub mod dimension;
pub mod info;
pub mod lattice;
pub mod metric;
pub mod par;
pub mod subshift;

mod error;
mod numeric;

pub use error::{Error, Result};
pub use numeric::{log2_biguint, Fit, FitModel};
