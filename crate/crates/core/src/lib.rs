//! Proof terms for classical propositional natural deduction.
//!
//! The calculus has intuitionistic variables, abstractions, pairs and
//! injections together with `mu` and naming for the absurdity rules. This
//! crate typechecks such terms, reduces them with the logical, permutative
//! and classical cut rules, classifies head redexes, decides strong
//! normalization of small terms by exhausting their reduction graphs, and
//! implements the marked-term machinery that relates a term with a pending
//! permutation to the term where the permutation has been carried out.

pub mod cli;
pub mod formula;
pub mod generator;
pub mod head;
pub mod marked;
pub mod oracle;
mod pack;
pub mod reduction;
pub mod scenario;
pub mod subst;
pub mod syntax;
pub mod term;
pub mod typing;

pub use formula::Formula;
pub use generator::{gen_app_scenarios, gen_typed, GenConfig, GenError, Rule};
pub use head::{classify, decompose, fill, is_nice, HeadRow, HoleContext};
pub use reduction::{normalize, redexes, reduce_at, step_all, Redex, RedexKind, Strategy};
pub use scenario::{BoxMode, Scenario};
pub use subst::{subst_class, subst_intu, SubstClass, SubstIntu};
pub use syntax::{parse, parse_formula, parse_scenario, parse_term, ParseError, SourceUnit};
pub use term::{alpha_eq, Elim, MarkId, Path, Side, Term, Var};
pub use typing::{check, subject_reduction_probe, TypeError, TypingContext};
