//! Abstract syntax for action-language system descriptions.
//!
//! A program is a theory (modules holding sort declarations, fluent
//! declarations, and axioms) plus a structure (instances with attribute
//! assignments), followed by solver directives and a history of event
//! occurrences.

pub type Ident = String;

/// Dotted reference to a module inside a theory, e.g. `t_motion.m_move`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModulePath {
    pub theory: Ident,
    pub module: Ident,
}

impl ModulePath {
    pub fn new(theory: impl Into<Ident>, module: impl Into<Ident>) -> Self {
        ModulePath {
            theory: theory.into(),
            module: module.into(),
        }
    }
}

impl std::fmt::Display for ModulePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}", self.theory, self.module)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: Ident,
    pub theory: Theory,
    pub structure: Structure,
    pub temporal_projection: bool,
    pub max_steps: Option<u32>,
    pub history: Vec<Occurrence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub name: Ident,
    pub imports: Vec<Import>,
    pub modules: Vec<ModuleDecl>,
}

/// `import <theory>.<module> from <library>`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    pub path: ModulePath,
    pub library: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModuleDecl {
    pub name: Ident,
    pub depends_on: Vec<ModulePath>,
    pub sort_decls: Vec<SortDecl>,
    pub fluent_decls: Vec<FluentDecl>,
    pub axioms: Vec<Axiom>,
}

/// `names :: parents` with optional attribute block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortDecl {
    pub names: Vec<Ident>,
    pub parents: Vec<Ident>,
    pub attributes: Vec<AttributeDecl>,
}

/// `name : s1 * s2 -> booleans` (the arrow sort is always booleans in this
/// dialect, so only the argument sorts are stored).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDecl {
    pub name: Ident,
    pub arg_sorts: Vec<Ident>,
}

/// A basic boolean fluent, `name : s1 * s2 -> booleans`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FluentDecl {
    pub name: Ident,
    pub arg_sorts: Vec<Ident>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Axiom {
    DynamicCausal(DynamicCausalLaw),
    StateConstraint(StateConstraint),
    Executability(Executability),
}

/// `occurs(X) causes head if body.`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicCausalLaw {
    pub action_var: Ident,
    pub head: Literal,
    pub body: Vec<Condition>,
}

/// `head if body.`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateConstraint {
    pub head: Literal,
    pub body: Vec<Condition>,
}

/// `impossible occurs(X) if body.`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Executability {
    pub action_var: Ident,
    pub body: Vec<Condition>,
}

/// A possibly negated function atom over terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub function: Ident,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Literal(Literal),
    /// `instance(t, sort)`
    Instance { term: Term, sort: Ident },
    Equal(Term, Term),
    NotEqual(Term, Term),
}

/// Constants start with a lowercase letter, variables with an uppercase one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Ident),
    Var(Ident),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Const(n) | Term::Var(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub name: Ident,
    pub instances: Vec<InstanceDecl>,
}

/// `names in sort` with optional attribute assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDecl {
    pub names: Vec<Ident>,
    pub sort: Ident,
    pub assignments: Vec<AttributeAssignment>,
}

/// `attribute(args) = true|false`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeAssignment {
    pub attribute: Ident,
    pub args: Vec<Ident>,
    pub value: bool,
}

/// `happened(event, time).`
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence<I = Ident> {
    pub event: I,
    pub time: u32,
}

impl Program {
    /// All modules of the theory, in declaration order.
    pub fn modules(&self) -> impl Iterator<Item = &ModuleDecl> {
        self.theory.modules.iter()
    }
}

impl Literal {
    pub fn positive(function: impl Into<Ident>, args: Vec<Term>) -> Self {
        Literal {
            positive: true,
            function: function.into(),
            args,
        }
    }

    pub fn negated(&self) -> Self {
        Literal {
            positive: !self.positive,
            function: self.function.clone(),
            args: self.args.clone(),
        }
    }
}

impl Axiom {
    /// Variables appearing in the axiom head (empty for executability
    /// conditions, which have no head).
    pub fn head_vars(&self) -> Vec<&Ident> {
        match self {
            Axiom::DynamicCausal(law) => literal_vars(&law.head),
            Axiom::StateConstraint(sc) => literal_vars(&sc.head),
            Axiom::Executability(_) => Vec::new(),
        }
    }

    pub fn body(&self) -> &[Condition] {
        match self {
            Axiom::DynamicCausal(law) => &law.body,
            Axiom::StateConstraint(sc) => &sc.body,
            Axiom::Executability(ex) => &ex.body,
        }
    }

    /// The action variable bound by `occurs(X)`, if the axiom has one.
    pub fn action_var(&self) -> Option<&Ident> {
        match self {
            Axiom::DynamicCausal(law) => Some(&law.action_var),
            Axiom::Executability(ex) => Some(&ex.action_var),
            Axiom::StateConstraint(_) => None,
        }
    }
}

fn literal_vars(lit: &Literal) -> Vec<&Ident> {
    lit.args
        .iter()
        .filter_map(|t| match t {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        })
        .collect()
}

/// Terms occurring anywhere in a condition.
pub fn condition_terms(cond: &Condition) -> Vec<&Term> {
    match cond {
        Condition::Literal(lit) => lit.args.iter().collect(),
        Condition::Instance { term, .. } => vec![term],
        Condition::Equal(a, b) | Condition::NotEqual(a, b) => vec![a, b],
    }
}

/// Variables occurring anywhere in a condition.
pub fn condition_vars(cond: &Condition) -> Vec<&Ident> {
    condition_terms(cond)
        .into_iter()
        .filter_map(|t| match t {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        })
        .collect()
}
