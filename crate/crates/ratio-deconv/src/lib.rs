//! Numerical recovery of the numerator density in a type-I ratio.
//!
//! Given independent positive random variables `X` and `Y` with
//! `Z = X / (X + Y)`, the density of `Z` can be written as an integral of
//! `f_X` against a scaled copy of `f_Y`. When `f_Y(sx)` factors as
//! `A(s) · B(x) · C(sx)` with `C` of exponential-power, linear-exponential
//! or power-law form, that integral equation inverts in closed form up to
//! one or two Laplace inversions. This crate implements those inversion
//! pipelines numerically:
//!
//! * [`special`] — gamma/beta/hypergeometric machinery,
//! * [`dist`] — the density catalog (positive-support and unit-interval
//!   families), samplers and CDFs,
//! * [`decomp`] — kernel decompositions `f_Y(sx) = A(s)B(x)C(sx)`,
//! * [`laplace`] — Gaver–Stehfest and fixed-Talbot inverse transforms,
//!   forward transforms, and the iterated double inversion,
//! * [`deconv`] — the three recovery pipelines and grid I/O,
//! * [`closed_form`] — worked ratio pairs with known numerator densities,
//! * [`verify`] — normalization / oracle / forward-consistency checks and
//!   the named verification cases.
//!
//! The `ratio-deconv` binary exposes `catalog`, `deconvolve` and `verify`
//! subcommands over the same machinery.

pub mod closed_form;
pub mod decomp;
pub mod deconv;
pub mod dist;
mod error;
pub mod laplace;
pub mod quad;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
