//! Explicit constructions: ψ-singular vectors, dimension lifting, prefix
//! stability and direction steering.

mod lift;
mod prefix;
mod psi;
mod singular;
mod steer;

pub use lift::{box_sample, dimension_lift, LiftParams, LiftReport, LiftSample};
pub use prefix::{prefix_holds, prefix_stability, PrefixStability};
pub use psi::{parse_psi, PsiFunction};
pub use singular::{
    certified_ranges, default_p0, determinant_witness, linear_form_checks, next_p, schedule_det, sigma_calibrate, singular_build, verify_singularity,
    BuildOptions, CertificateReport, DeterminantWitness, Level, LinearFormCheck, Schedule, SingularCertificate, SingularityCheck,
};
pub use steer::{constant_signature_demo, fstar_targets, steer, steer_partial, SignatureDemo, SteerOptions, SteerStep, SteeringState};
