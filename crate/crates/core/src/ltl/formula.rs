use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of a process in the monitored system (0-based).
pub type ProcessId = usize;

/// Index of a proposition in its [`ApTable`].
pub type PropId = usize;

/// A global state: bit `i` is the value of proposition `i`.
pub type Letter = u32;

/// Upper bound on the alphabet size the automaton pipeline accepts.
pub const MAX_PROPS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AtomicProposition {
    pub name: String,
    pub owner: ProcessId,
}

impl AtomicProposition {
    pub fn new(name: impl Into<String>, owner: ProcessId) -> Self {
        AtomicProposition { name: name.into(), owner }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApTableError {
    #[error("duplicate proposition name `{0}`")]
    Duplicate(String),
    #[error("invalid proposition name `{0}`")]
    InvalidName(String),
    #[error("too many propositions ({0}); at most {MAX_PROPS} are supported")]
    TooMany(usize),
}

/// The system's propositions with their owning processes. Names are unique;
/// each proposition belongs to exactly one process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApTable {
    props: Vec<AtomicProposition>,
    by_name: HashMap<String, PropId>,
    num_processes: usize,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ApTable {
    pub fn new(props: Vec<AtomicProposition>) -> Result<Self, ApTableError> {
        if props.len() > MAX_PROPS {
            return Err(ApTableError::TooMany(props.len()));
        }
        let mut by_name = HashMap::new();
        for (i, p) in props.iter().enumerate() {
            if !is_identifier(&p.name) || matches!(p.name.as_str(), "X" | "U" | "true" | "false") {
                return Err(ApTableError::InvalidName(p.name.clone()));
            }
            if by_name.insert(p.name.clone(), i).is_some() {
                return Err(ApTableError::Duplicate(p.name.clone()));
            }
        }
        let num_processes = props.iter().map(|p| p.owner + 1).max().unwrap_or(0);
        Ok(ApTable { props, by_name, num_processes })
    }

    /// Shorthand for tables built in code: `[("a", 0), ("b", 1)]`.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, ProcessId)]) -> Result<Self, ApTableError> {
        Self::new(pairs.iter().map(|(n, o)| AtomicProposition::new(n.as_ref(), *o)).collect())
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn get(&self, id: PropId) -> &AtomicProposition {
        &self.props[id]
    }

    pub fn props(&self) -> &[AtomicProposition] {
        &self.props
    }

    pub fn lookup(&self, name: &str) -> Option<PropId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: PropId) -> &str {
        &self.props[id].name
    }

    pub fn owner(&self, id: PropId) -> ProcessId {
        self.props[id].owner
    }

    /// One more than the largest owner index.
    pub fn num_processes(&self) -> usize {
        self.num_processes
    }

    pub fn num_letters(&self) -> usize {
        1usize << self.props.len()
    }

    /// Propositions owned by `p`, in table order.
    pub fn owned_by(&self, p: ProcessId) -> impl Iterator<Item = PropId> + '_ {
        self.props.iter().enumerate().filter(move |(_, ap)| ap.owner == p).map(|(i, _)| i)
    }

    /// Renders a letter as `{a,b}`.
    pub fn letter_to_string(&self, letter: Letter) -> String {
        let names: Vec<&str> =
            (0..self.len()).filter(|i| letter & (1 << i) != 0).map(|i| self.name(i)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// LTL abstract syntax. `And`, `Implies`, `Eventually`, `Always` and `False`
/// are sugar; [`Formula::desugar`] rewrites them into the core grammar
/// `True | Prop | Not | Or | Next | Until`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Prop(PropId),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn prop(p: PropId) -> Self {
        Formula::Prop(p)
    }
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }
    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }
    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }
    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    /// Rewrites sugar into the core grammar:
    /// `a ∧ b = ¬(¬a ∨ ¬b)`, `a ⇒ b = ¬a ∨ b`, `◊a = ⊤ U a`, `□a = ¬◊¬a`, `false = ¬true`.
    pub fn desugar(&self) -> Formula {
        use Formula::*;
        match self {
            True => True,
            False => Formula::not(True),
            Prop(p) => Prop(*p),
            Not(f) => Formula::not(f.desugar()),
            Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            And(a, b) => Formula::not(Formula::or(
                Formula::not(a.desugar()),
                Formula::not(b.desugar()),
            )),
            Implies(a, b) => Formula::or(Formula::not(a.desugar()), b.desugar()),
            Next(f) => Formula::next(f.desugar()),
            Until(a, b) => Formula::until(a.desugar(), b.desugar()),
            Eventually(f) => Formula::until(True, f.desugar()),
            Always(f) => Formula::not(Formula::until(True, Formula::not(f.desugar()))),
        }
    }

    pub fn is_core(&self) -> bool {
        use Formula::*;
        match self {
            True | Prop(_) => true,
            Not(f) | Next(f) => f.is_core(),
            Or(a, b) | Until(a, b) => a.is_core() && b.is_core(),
            False | And(..) | Implies(..) | Eventually(_) | Always(_) => false,
        }
    }

    /// Number of temporal operators (`X`, `U`, `◊`, `□`).
    pub fn temporal_depth_count(&self) -> usize {
        use Formula::*;
        match self {
            True | False | Prop(_) => 0,
            Not(f) => f.temporal_depth_count(),
            Or(a, b) | And(a, b) | Implies(a, b) => {
                a.temporal_depth_count() + b.temporal_depth_count()
            }
            Next(f) | Eventually(f) | Always(f) => 1 + f.temporal_depth_count(),
            Until(a, b) => 1 + a.temporal_depth_count() + b.temporal_depth_count(),
        }
    }

    /// Evaluates a temporal-free formula on one letter.
    pub fn eval_propositional(&self, letter: Letter) -> Option<bool> {
        use Formula::*;
        Some(match self {
            True => true,
            False => false,
            Prop(p) => letter & (1 << p) != 0,
            Not(f) => !f.eval_propositional(letter)?,
            Or(a, b) => a.eval_propositional(letter)? || b.eval_propositional(letter)?,
            And(a, b) => a.eval_propositional(letter)? && b.eval_propositional(letter)?,
            Implies(a, b) => !a.eval_propositional(letter)? || b.eval_propositional(letter)?,
            Next(_) | Until(..) | Eventually(_) | Always(_) => return None,
        })
    }

    pub fn display<'a>(&'a self, aps: &'a ApTable) -> FormulaDisplay<'a> {
        FormulaDisplay { f: self, aps }
    }
}

/// Prints a formula in the concrete syntax accepted by the parser, fully
/// parenthesized below the top level.
pub struct FormulaDisplay<'a> {
    f: &'a Formula,
    aps: &'a ApTable,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.f, self.aps, true)
    }
}

fn write_formula(
    out: &mut fmt::Formatter<'_>,
    f: &Formula,
    aps: &ApTable,
    top: bool,
) -> fmt::Result {
    use Formula::*;
    let bin = |out: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula| {
        if !top {
            out.write_str("(")?;
        }
        write_formula(out, a, aps, false)?;
        write!(out, " {op} ")?;
        write_formula(out, b, aps, false)?;
        if !top {
            out.write_str(")")?;
        }
        Ok(())
    };
    match f {
        True => out.write_str("true"),
        False => out.write_str("false"),
        Prop(p) => out.write_str(aps.name(*p)),
        Not(g) => {
            out.write_str("!")?;
            write_formula(out, g, aps, false)
        }
        Next(g) => {
            out.write_str("X ")?;
            write_formula(out, g, aps, false)
        }
        Eventually(g) => {
            out.write_str("<>")?;
            write_formula(out, g, aps, false)
        }
        Always(g) => {
            out.write_str("[]")?;
            write_formula(out, g, aps, false)
        }
        Or(a, b) => bin(out, a, "|", b),
        And(a, b) => bin(out, a, "&", b),
        Implies(a, b) => bin(out, a, "->", b),
        Until(a, b) => bin(out, a, "U", b),
    }
}
