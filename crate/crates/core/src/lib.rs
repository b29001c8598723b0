//! Finite-order variational calculus on jet coordinates.
//!
//! The crate is organized bottom-up:
//!
//! * [`expr`] — exact symbolic scalars (parsing, canonical normal forms,
//!   partial/total derivatives, the scaling substitution, parameter
//!   integration, numeric evaluation, three-valued zero decisions);
//! * [`forms`] — contact-graded exterior calculus on representatives
//!   (wedge, `d`, the horizontal/vertical split, horizontalization, contact
//!   projections, contraction, the interior Euler operator);
//! * [`fields`] — projectable vector fields and jet prolongation;
//! * [`varcalc`] — the variational operators: Euler–Lagrange, Helmholtz,
//!   Tonti Lagrangians, Noether currents, variational Lie derivatives,
//!   horizontal potentials, second variational derivative;
//! * [`cech`] — covers, nerves, cochains, the coboundary operator,
//!   presentations of local variational problems, nerve cohomology by exact
//!   linear algebra, and obstruction classes.

pub mod cech;
pub mod error;
pub mod expr;
pub mod fields;
pub mod forms;
pub mod sig;
pub mod varcalc;

pub use error::{CalcError, CechError, ExprError, FormError};
pub use expr::{parse, Atom, EvalPoint, Func, JetExpr, Verdict, ZeroCfg};
pub use sig::{ConstDef, MultiIndex, Signature};
