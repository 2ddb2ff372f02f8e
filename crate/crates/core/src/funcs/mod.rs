//! Scalar Lipschitz maps `φ: [0, ∞) → ℂ`, their descriptors, and finite-scale
//! tests for equivalence and class membership.

pub mod analysis;
pub mod descriptor;
pub mod grid;
pub mod growth;
pub mod json;

pub use analysis::{
    additivity_defect, resolved, bid_difference, bid_functional, bid_sweep, difference_report, equivalence_test,
    golden_section, hyers_linearize, in_l_bis, lipschitz_bounds, projective_equivalence_test, window_report,
    BidSweep, BisEvidence, HyersFit, LipschitzEstimate, LipschitzOptions, ProjectiveFit, SearchBox,
};
pub use descriptor::{FuncDescriptor, LipschitzBounds, Meta, Node};
pub use grid::{LogGrid, Window};
pub use growth::{GrowthConfig, GrowthReport, RegressionAxis, Verdict, WindowMax};
