//! `operadiff` — an exact symbolic engine for algebraic operads and the
//! differential/tangent structure carried by their free-algebra monads.
//!
//! The crate is organized bottom-up:
//!
//! * [`scalar`] — exact field arithmetic (arbitrary-precision rationals, or a
//!   prime field `Z/p`).
//! * [`linalg`] — based free modules, sparse vectors, linear maps, and
//!   deterministic kernel / quotient-basis computation.
//! * [`perm`] — symmetric-group utilities.
//! * [`operad`] — symmetric operads: components, unit, Σ-actions, partial and
//!   complete composition, the built-in operads (`Com`, `Ass`, `Lie`, `A•`)
//!   and user-supplied table operads, plus axiom checkers.
//! * [`lie`] — the free-Lie-algebra rewriting engine (Lyndon normal forms)
//!   backing the `Lie` operad.
//! * [`free`] — the free-algebra monad `S(P,-)`: canonical orbit normal
//!   forms, unit and multiplication, the differential combinator
//!   transformation `∂`, the distributive law `λ`, the D-linear counit, and
//!   the DC / tangent-monad axiom suites.
//! * [`ppoly`] — the Lawvere theory of `P`-polynomials as a Cartesian
//!   differential category: composition, differentiation, derived-property
//!   checks.
//! * [`algebra`] — finite-dimensional `P`-algebras by structure constants,
//!   the tangent bundle `A ⋉ A`, tangent structure maps and their equation
//!   suite, derivations, vector fields, and differential-object criteria.
//! * [`adjoint`] — Kähler differentials, free `A`-algebras over modules, and
//!   the adjoint tangent bundle `T°(A)` via weight-truncated presentations;
//!   the adjunction `T° ⊣ T` and the adjoint tangent structure maps.
//! * [`expr`] — expression parsing and rendering per operad flavor.
//! * [`specfile`] — TOML ingestion of algebras / table operads / modules.
//! * [`report`] — structured check reports with JSON output.
//! * [`cli`] — the `operadiff` command-line surface.
//! * [`rng`] — seeded random elements, vectors, and maps for the suites.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so everything here is safe to share across threads.

pub mod scalar;
pub mod linalg;
pub mod perm;
pub mod lie;
pub mod operad;
pub mod free;
pub mod ppoly;
pub mod algebra;
pub mod adjoint;
pub mod expr;
pub mod specfile;
pub mod report;
pub mod cli;
pub mod rng;
