//! Computational quaternionic gerbes: the quaternion algebra and its
//! conformal group ℝ⁺SO(4), the crossed-module structure groupoid over
//! SO(3), ℍ-bimodules with their frame classifiers, Čech nerves of covers,
//! bitorsor cocycles with coboundary equivalence, and tangent cocycles of
//! charted spaces with conformal transitions.

pub mod atlas;
pub mod bimodule;
pub mod conformal;
pub mod error;
pub mod gerbe;
pub mod groupoid;
pub mod nerve;
pub mod quat;
pub mod rotation;
pub mod selftest;

pub use atlas::{
    atlas_nerve, build_tangent_cocycle, builtin_atlas, factorize_transitions, Atlas, AtlasPair,
    AtlasQuad, AtlasTriple, JacobianMode, Step, TransitionMap, BUILTIN_ATLASES,
};
pub use bimodule::{
    bimodule_tensor, classifier, commutant_nullity, commutant_singular_values, identity_frame,
    standard_bimodule, twist_bimodule, Bimodule, Frame,
};
pub use conformal::{conformal_factorize, is_conformal, ConformalElement};
pub use error::{Error, Result};
pub use gerbe::{
    apply_coboundary, check_coboundary, check_cocycle, groupoid_oracle_check,
    synth_coboundary_cocycle, synthetic_nerve, BitorsorCocycle, CheckReport, CoboundaryData,
    SimplexCheck, Worst,
};
pub use groupoid::{compose, compose_tol, tensor, to_conformal, GroupoidMorphism};
pub use nerve::{build_nerve, CoverSpec, Nerve, OverlapId, PairOverlap, QuadOverlap, TripleOverlap};
pub use quat::{phi_matrix, qinv, qmul, Matrix4, Quat, I, J, K, ONE};
pub use rotation::{delta, Rotation3};
pub use selftest::{run_selftests, SelfTestResult, SelfTestSummary};
