//! Elementary displacement, warping, the rescaling operator Π_ε and
//! numerical probes of the a priori estimates on the tapered rod.

mod decompose;
mod field;
mod probe;
mod rescale;

pub use decompose::{
    elementary_decompose, warping_orthogonality, ElementaryDisplacement, OrthogonalityResidual, RodDomain,
    SectionQuadrature, SectionState,
};
pub use field::{Field3D, FieldFamily, Mat3, PolyField, PolyTerm, Vec3};
pub use probe::{probe_estimates, EstimateProbe, ProbeRow, ProbeStatus, ProbeSummary};
pub use rescale::{norm_identity, rescale, NormIdentity, Rescaled};
