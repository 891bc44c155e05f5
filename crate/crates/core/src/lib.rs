//! Explicit open-image computations for 2-adic and ℓ-adic Galois representations
//! of elliptic curves: p-adic arithmetic, finite matrix groups modulo ℓᴺ, their
//! Lie algebras, Dickson classification, group-theoretic checks and explicit bounds.

pub mod bounds;
pub mod campaign;
pub mod dickson;
pub mod error;
pub mod fixtures;
pub mod group;
pub mod io;
pub mod lie;
pub mod mat;
pub mod padic;
pub mod theorems;

pub use dickson::{classify, classify_mod_ell, DicksonClass};
pub use error::{Error, Result};
pub use group::{close, congruence_subgroup, GroupClosure, DEFAULT_CAP};
pub use lie::{special_lie_algebra, LieModule, ReducedBasis};
pub use mat::Mat2;
pub use padic::{PadicContext, PadicInt};
pub use theorems::{
    check_gl2z2, check_sl2z2, check_star, check_starstar, select_h1, select_h1_two, trichotomy,
    H1Selection, Outcome, Theorem, TrichotomyMode, VerificationReport,
};
pub use bounds::{CurveParams, LogMagnitude};
pub use campaign::{run_campaign, CampaignConfig, CampaignSummary};
