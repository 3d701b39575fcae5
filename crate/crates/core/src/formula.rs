//! Propositional formulas: atoms, `Bot`, `->`, `/\`, `\/`.
//!
//! Negation is not a constructor; `~A` is `A -> Bot`.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Bottom,
    Imp(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Panics on an empty name; atom names must be nonempty.
    pub fn atom(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "atom names must be nonempty");
        Formula::Atom(name)
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Self {
        Formula::imp(a, Formula::Bottom)
    }

    /// The argument of a negation `A -> Bot`, if this is one.
    pub fn negated(&self) -> Option<&Formula> {
        match self {
            Formula::Imp(a, b) if **b == Formula::Bottom => Some(a),
            _ => None,
        }
    }

    /// Number of connectives (`->`, `/\`, `\/`); atoms and `Bot` count zero.
    pub fn lgt(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => 1 + a.lgt() + b.lgt(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 1,
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Atom(_) | Formula::Bottom => 4,
            Formula::Imp(_, b) if **b == Formula::Bottom => 3,
            Formula::And(..) => 2,
            Formula::Or(..) => 1,
            Formula::Imp(..) => 0,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.prec() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::Atom(n) => f.write_str(n)?,
            Formula::Bottom => f.write_str("Bot")?,
            Formula::Imp(a, b) if **b == Formula::Bottom => {
                f.write_str("~")?;
                a.write_at(f, 3)?;
            }
            Formula::Imp(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(" -> ")?;
                b.write_at(f, 0)?;
            }
            Formula::And(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(" /\\ ")?;
                b.write_at(f, 3)?;
            }
            Formula::Or(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(" \\/ ")?;
                b.write_at(f, 2)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }

    /// Renders without the `~` sugar at the top level, so that an
    /// intuitionistic declaration of a negated type is not mistaken for a
    /// classical one.
    pub fn display_unsugared(&self) -> String {
        match self {
            Formula::Imp(a, b) => {
                let lhs = if a.prec() < 1 {
                    format!("({a})")
                } else {
                    a.to_string()
                };
                format!("{lhs} -> {b}")
            }
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}
