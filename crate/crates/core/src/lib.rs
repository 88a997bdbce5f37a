//! Dispersion geometry and numerical experiments for Maxwell's equations in
//! fully anisotropic media.
//!
//! * [`tensors`]: material laws, validation, standard form.
//! * [`fresnel`]: symbol algebra, the Fresnel surface, singular points,
//!   curvature and hyperbolicity.
//! * [`eigenfield`]: continuation of eigenvectors of symmetric matrix fields.
//! * [`symmetrizer`]: symmetrizers for quasilinear material laws.
//! * [`spectral`]: pseudo-spectral evolution on a periodic box.
//! * [`harness`]: decay, Strichartz and energy measurements.
//! * [`fbi`]: a one-dimensional FBI transform.

pub mod eigenfield;
pub mod fbi;
pub mod fresnel;
pub mod harness;
pub mod spectral;
pub mod symmetrizer;
pub mod tensors;
