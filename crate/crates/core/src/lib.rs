//! Numerical decision of Keller-Osserman-type triviality and nonexistence
//! conditions for higher-order differential inequalities, with an a-priori
//! decay bound, a radial polyharmonic blow-up simulator, and a harness that
//! exercises the supporting inequality machinery on simulated solutions.
//!
//! The library is organized around the inequality data (order m, dimension n,
//! coefficient bound A, nonlinearity g):
//!
//! * [`expr`] — the nonlinearity grammar, evaluation, canonical rendering;
//! * [`admissibility`] — sampled monotonicity/convexity/positivity checks;
//! * [`quad`] — improper-integral verdicts (Converged/Diverged/Inconclusive)
//!   and the decreasing function G with its tables;
//! * [`conditions`] — the theorem battery and classification verdict, the
//!   decay bound C·G^{-1}(k·r), and the m=2 equivalence with the classical
//!   Keller-Osserman condition;
//! * [`sim`] — jet arithmetic, radial polyharmonic integration with blow-up
//!   detection, and the log-nonlinearity counterexample verifier;
//! * [`harness`] — ball volumes, normalized mass functions, the doubling
//!   radius sequence, and empirical-constant checks for the annulus and tail
//!   inequalities.

pub mod admissibility;
pub mod conditions;
pub mod expr;
pub mod harness;
pub mod quad;
pub mod sim;

pub use admissibility::{check_admissible, AdmissibilityReport, SamplingPlan};
pub use conditions::{classify, ProblemSpec, Verdict, VerdictOutcome};
pub use expr::{parse, NonlinearityExpr};
pub use quad::{improper_integral, IntegralStatus, IntegralVerdict};
