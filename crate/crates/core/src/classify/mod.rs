//! Class membership, incomparability evidence and the self-similarity
//! (Kalton–Peck) detector.

pub mod membership;
pub mod selfsim;

pub use membership::{
    class_report, incomparability_evidence, BiEvidence, BidEvidence, ClassConfig, ClassReport, Hypotheses,
    IncomparabilityConfig, IncomparabilityReport,
};
pub use selfsim::{
    canonical_l, kalton_peck_detector, selfsim_defect, uniform_block_defect, uniform_defect_routes, DefectRoutes,
    DetectorConfig, DetectorVerdict, SelfSimReport,
};
