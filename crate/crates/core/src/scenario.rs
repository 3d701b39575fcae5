//! Inputs for the permutation theorem: a scrutinee, two case branches, a
//! pushed eliminator and a trailing spine.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::head::is_nice;
use crate::reduction::reduce_at_in;
use crate::term::{Elim, MarkId, Path, Term, Var};
use crate::typing::{check, TypeError, TypingContext};

/// Shape of the pushed eliminator; all boxes of one run share it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoxMode {
    Term,
    Proj,
    Case,
}

impl BoxMode {
    pub const ALL: [BoxMode; 3] = [BoxMode::Term, BoxMode::Proj, BoxMode::Case];

    /// The mode an eliminator belongs to; boxes are looked through.
    pub fn of(e: &Elim) -> BoxMode {
        match e {
            Elim::Term(_) => BoxMode::Term,
            Elim::Proj(_) => BoxMode::Proj,
            Elim::Case(..) => BoxMode::Case,
            Elim::Boxed(inner) => BoxMode::of(inner),
        }
    }
}

impl fmt::Display for BoxMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoxMode::Term => "term",
            BoxMode::Proj => "proj",
            BoxMode::Case => "case",
        })
    }
}

impl FromStr for BoxMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "term" => Ok(BoxMode::Term),
            "proj" => Ok(BoxMode::Proj),
            "case" => Ok(BoxMode::Case),
            other => Err(format!(
                "unknown mode `{other}` (expected term, proj or case)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub ctx: TypingContext,
    pub scrutinee: Term,
    pub x1: Var,
    pub branch1: Term,
    pub x2: Var,
    pub branch2: Term,
    pub eps: Elim,
    pub rest: Vec<Elim>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("the sequence eps V is not nice (a case eliminator may only come last)")]
    NotNice,
    #[error("S1 is ill-typed: {0}")]
    S1Untyped(TypeError),
    #[error("S2 is ill-typed: {0}")]
    S2Untyped(TypeError),
}

impl Scenario {
    pub fn mode(&self) -> BoxMode {
        BoxMode::of(&self.eps)
    }

    fn case(&self, n1: Term, n2: Term) -> Elim {
        Elim::Case(self.x1.clone(), n1, self.x2.clone(), n2)
    }

    /// `eps` followed by `V`.
    pub fn sequence(&self) -> Vec<Elim> {
        std::iter::once(self.eps.clone())
            .chain(self.rest.iter().cloned())
            .collect()
    }

    pub fn is_nice(&self) -> bool {
        is_nice(&self.sequence())
    }

    /// `(M [x1.N1 | x2.N2] eps V)`.
    pub fn s1(&self) -> Term {
        let head = Term::app(
            self.scrutinee.clone(),
            self.case(self.branch1.clone(), self.branch2.clone()),
        );
        Term::spine(head, self.sequence())
    }

    /// `(M [x1.(N1 eps) | x2.(N2 eps)] V)`, i.e. `S1` after the pivotal
    /// permutation.
    pub fn s2(&self) -> Term {
        let s1 = self.s1();
        let pivot = Path::new(vec![0; self.rest.len()]);
        reduce_at_in(&self.ctx, &s1, &pivot).expect("the pivot of S1 is a permutative redex")
    }

    /// The marked start term `(M [x1.{N1} | x2.{N2}] [[eps]] V)`.
    pub fn marked(&self) -> Term {
        let case = self.case(
            Term::mark(MarkId(0), self.branch1.clone()),
            Term::mark(MarkId(1), self.branch2.clone()),
        );
        let head = Term::app(
            Term::app(self.scrutinee.clone(), case),
            Elim::boxed(self.eps.clone()),
        );
        Term::spine(head, self.rest.iter().cloned())
    }

    /// Niceness plus typedness of both sides.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !self.is_nice() {
            return Err(ScenarioError::NotNice);
        }
        let t1 = check(&self.ctx, &self.s1()).map_err(ScenarioError::S1Untyped)?;
        let t2 = check(&self.ctx, &self.s2()).map_err(ScenarioError::S2Untyped)?;
        debug_assert_eq!(t1, t2);
        Ok(())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.ctx.is_empty() {
            writeln!(f, "{}", self.ctx)?;
        }
        // the file format fixes the binder names
        let n1 = crate::subst::rename_ivar(&self.branch1, &self.x1, "x1");
        let n2 = crate::subst::rename_ivar(&self.branch2, &self.x2, "x2");
        let rest: Vec<String> = self.rest.iter().map(|e| e.to_string()).collect();
        write!(
            f,
            "M = {}; N1 = {n1}; N2 = {n2}; eps = {}; V = [{}]",
            self.scrutinee,
            self.eps,
            rest.join(", ")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_scenario;
    use crate::syntax::parse_term;
    use crate::term::alpha_eq;

    fn sample() -> Scenario {
        parse_scenario(
            "ctx m:A \\/ B, f:A -> C -> D -> E, g:B -> C -> D -> E, c:C, d:D;\n\
             M = m; N1 = (f x1); N2 = (g x2); eps = c; V = [d]",
        )
        .unwrap_or_else(|e| panic!("{e}"))
    }

    #[test]
    fn s1_and_s2_shapes() {
        let s = sample();
        assert!(alpha_eq(
            &s.s1(),
            &parse_term("(m [x1.(f x1) | x2.(g x2)] c d)").unwrap()
        ));
        assert!(alpha_eq(
            &s.s2(),
            &parse_term("(m [x1.(f x1 c) | x2.(g x2 c)] d)").unwrap()
        ));
        assert_eq!(s.mode(), BoxMode::Term);
        s.validate().unwrap();
    }

    #[test]
    fn marked_start_term() {
        let s = sample();
        assert_eq!(
            s.marked().to_string(),
            "(m [x1.{(f x1)} | x2.{(g x2)}] [[c]] d)"
        );
    }

    #[test]
    fn case_then_more_is_not_nice() {
        let mut s = sample();
        s.eps = Elim::case("y1", Term::var("c"), "y2", Term::var("c"));
        assert_eq!(s.validate(), Err(ScenarioError::NotNice));
    }

    #[test]
    fn eps_free_variable_named_like_a_binder_is_not_captured() {
        let s = parse_scenario(
            "ctx m:A \\/ B, f:A -> C -> D, g:B -> C -> D, x1:C;\n M = m; N1 = (f x1); N2 = (g x2); eps = x1; V = []",
        )
        .unwrap();
        let s2 = s.s2();
        assert!(alpha_eq(
            &s2,
            &parse_term("(m [y.(f y x1) | z.(g z x1)])").unwrap()
        ));
        s.validate().unwrap();
    }

    #[test]
    fn mode_names_round_trip() {
        for m in BoxMode::ALL {
            assert_eq!(m.to_string().parse::<BoxMode>().unwrap(), m);
        }
    }
}
