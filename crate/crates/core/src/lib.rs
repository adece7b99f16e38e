//! Arbitrarily small, purely positive-frequency electron states of the free
//! Dirac equation.
//!
//! The state family ψ_n superposes spin-up positive-frequency plane waves with
//! a Gaussian momentum profile of width n (in units of mc). Growing n shrinks
//! the charge distribution below the Compton radius without any
//! negative-frequency admixture. This crate builds ψ_n in position space via
//! two radial spherical-Bessel transforms and evaluates the charge, current,
//! energy and momentum densities together with the magnetic moments,
//! angular momenta, energy, mean-square charge radius and the projector split
//! of that radius.
//!
//! Internal units are ħ = m = c = e = 1 (see [`units`]).

pub mod densities;
pub mod error;
pub mod experiments;
pub mod observables;
pub mod oracle;
pub mod packet;
pub mod quadrature;
pub mod special;
pub mod spinor;
pub mod svg;
pub mod units;

pub use error::{Error, Result};
pub use packet::{radial_profiles, PacketSpec, PsiJet, QuadratureConfig, RadialProfiles};
pub use spinor::{Momentum3, Spinor4};
