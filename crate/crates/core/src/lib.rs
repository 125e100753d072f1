//! Margulis invariants of affine deformations of Schottky groups.
//!
//! A Schottky group `Γ₀ ⊂ PSL(2,R)` acts on `V_r`, the `(2r+1)`-dimensional
//! irreducible representation. A cocycle `u` gives affine maps
//! `x ↦ ρ(γ)x + u(γ)`, and the Margulis invariant `α_u(γ)` measures their
//! signed translation along the neutral direction of `γ`. This crate
//! certifies Schottky groups, evaluates `α_u` stably on long words, checks
//! the orbit-integral formula for `α`, finds opposite-sign certificates and
//! approximates the cone of proper deformations from outside.

pub mod cone;
pub mod currents;
pub mod error;
pub mod freegrp;
pub mod lie;
pub mod margulis;
pub mod schottky;
pub mod symrep;

pub use cone::{
    build_halfspaces, cone_report, convergence_report, cross_section, margin_lp, membership,
    membership_of_coords, ConeReport, ConeStatus, ConvergenceRow, CrossSection, HalfSpace,
    HalfSpaceSet, LpSolution, Membership,
};
pub use currents::{
    growth_constant, opposite_sign_certificate, psi, quadrature_check, zero_current, FiniteCurrent,
    OppositeSign, OrbitSegment, Quadrature,
};
pub use error::{Error, Result};
pub use freegrp::{conj_class, enumerate_classes, ConjClass, Letter, Word};
pub use lie::{Classification, HyperbolicData, Mobius};
pub use margulis::{AlphaFunctional, Cocycle, CohomClass, DeformationSpace};
pub use schottky::{Arc, ArcPair, SchottkyGroup};
pub use symrep::{invariant_form, sym_power, Signature, Splitting, SymPowerRep};
