//! Local data of elliptic curves over completions of the rational function
//! field, computed exactly.
//!
//! The crate implements, over `K_P = F_Q((pi))`:
//!
//! * arithmetic in small finite fields `F_Q` and in `F_Q[[pi]]` with explicit
//!   absolute-precision tracking, so that a value can be either an exact
//!   element or a residue class known modulo `pi^M`;
//! * a precision-aware form of Tate's algorithm returning the Kodaira type,
//!   the Tamagawa number, the number of completed algorithm iterations (the
//!   non-minimality count) and the minimal discriminant valuation — or an
//!   explicit `Undecided` when a residue class does not pin the answer down;
//! * the closed-form Haar-measure density table for (type, Tamagawa number,
//!   iteration count) triples, an exact residue-class enumerator that brackets
//!   it, a seeded Monte Carlo estimator, and pushforward-uniformity checks for
//!   the reduction maps;
//! * the global side over `F_q(t)`: places, the zeta function, the closed-form
//!   density of everywhere-minimal curves, and an exhaustive census over
//!   curves with bounded-degree coefficients.
//!
//! Everything that claims to be exact is exact: masses are rationals with
//! power-of-`Q` denominators, reports are byte-identical across runs and
//! worker counts, and floating point appears only in Monte Carlo error bars.
//!
//! The hot loops (enumerator, sampler, census) are data-parallel over
//! independent classes/samples/curves and run on rayon when the default
//! `parallel` feature is enabled; the sequential fallback produces identical
//! output.

pub mod density;
pub mod field;
pub mod global;
pub mod local;
pub mod poly;
pub mod tate;
pub mod weierstrass;

mod par;
mod rational;

pub use density::{
    closed_form, closed_form_totals, compare_table, enumerate_exact, estimate_mc,
    pushforward_uniformity, DensityError, DensityKey, DensityReport, McReport, TableCheck,
    TableVerdict,
};
pub use field::{FieldElem, FieldError, FieldId, FieldOp, FieldSpec};
pub use global::{
    bad_places, empirical_global, global_density_formula, localize_at, monic_irreducibles,
    zeta_truncated, zeta_value, CensusMode, CensusRow, GlobalCurve, GlobalDensityResult,
    GlobalError, Place,
};
pub use local::{LocalError, PadicElem, Valuation};
pub use poly::{CubicStructure, Poly, PolyError};
pub use rational::{parse_rat, rat_str, rat_to_f64};
pub use tate::{
    minimality_certificate, reduce_form, run_tate, witness_uniqueness_check, FormTag,
    KodairaType, ReducedForm, TateConfig, TateError, TateOutcome, WitnessReport,
};
pub use weierstrass::{CurveInvariants, Transform, TransformError, WeierstrassCurve};
