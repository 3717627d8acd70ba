//! Generalized means `P_φ(f) = φ⁻¹(∫ φ∘f dμ)` on finite atomic measure
//! spaces, the Hölder / Minkowski / Mulholland family of inequalities built
//! from them, and numerical probes of which generators make those
//! inequalities hold and be attained.
//!
//! ```
//! use lpchar::{holder_report, GeneratorPair, MeasureSpace, StepFunction};
//!
//! let mu = MeasureSpace::new(vec![0.5, 0.5]).unwrap();
//! let f = StepFunction::new(vec![1.0, 2.0]).unwrap();
//! let g = StepFunction::new(vec![1.0, 3.0]).unwrap();
//! let pair = GeneratorPair::powers(2.0, 2.0).unwrap();
//! let report = holder_report(&pair, &f, &g, &mu, 1e-9).unwrap();
//! assert!(report.holds);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod generators;
pub mod inequalities;
pub mod measure;

pub use analysis::{
    concavity_scan, counterexample_search, functional_equivalence_scan, hardy_condition_check,
    hessian_fd_check, multiplicativity_check, optimality_search, power_fit, power_hessian_det,
    reversed_optimality_search, strict_gap_demo, ConcavityVerdict, GridSpec, OptimalityResult, PowerFit,
    SearchConfig, SearchOutcome, SearchTarget,
};
pub use error::{Error, Result};
pub use generators::{mulholland_sum, p_functional, quasi_mean, Generator, GeneratorPair};
pub use inequalities::{
    build_two_block, generalized_minkowski_report, gmi_report, holder_report, minkowski_triangle_report,
    mulholland_subadditivity_check, quasi_mean_midpoint_report, reversed_holder_report, Direction,
    InequalityReport, DEFAULT_TOLERANCE,
};
pub use measure::{integrate, product_space, MeasureSpace, ProductIndex, ProductSpace, StepFunction};
