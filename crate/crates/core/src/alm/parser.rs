//! Recursive-descent parser for system descriptions.
//!
//! Grammar sketch (keywords are contextual; `%` comments and whitespace are
//! handled by the lexer):
//!
//! ```text
//! program    := "system" "description" ID theory structure directives
//! theory     := "theory" ID { import | module }
//! import     := "import" ID "." ID "from" ID
//! module     := "module" ID [ "depends" "on" path {"," path} ]
//!               [ sortsec ] [ funsec ] [ "axioms" [dcls] [scs] [execs] ]
//! sortsec    := ("sort"|"sorts") "declarations" { sortdecl }
//! sortdecl   := idents "::" idents [ "attributes" { attrdecl } ]
//! attrdecl   := ID ":" ID {"*" ID} "->" "booleans"
//! funsec     := "function" "declarations" "fluents" "basic" { attrdecl }
//! dcls       := "dynamic" "causal" "laws"
//!               { "occurs" "(" VAR ")" "causes" literal "if" conds "." }
//! scs        := "state" "constraints" { literal "if" conds "." }
//! execs      := "executability" "conditions"
//!               { "impossible" "occurs" "(" VAR ")" "if" conds "." }
//! literal    := ["-"] ID "(" term {"," term} ")"
//! cond       := literal | "instance" "(" term "," ID ")"
//!             | term "=" term | term "!=" term
//! structure  := "structure" ID "instances" { instdecl }
//! instdecl   := idents "in" ID { ID "(" idents ")" "=" ("true"|"false") }
//! directives := ["temporal" "projection"] ["max" "steps" NAT]
//!               ["history" { "happened" "(" ID "," NAT ")" "." }]
//! ```
//!
//! Identifiers starting with an uppercase letter are variables in term
//! position; everything else is a constant.

use super::ast::*;
use super::lexer::{lex, SpannedTok, Tok};
use crate::diag::{Diagnostic, Location};

pub fn parse_program(source: &str) -> Result<Program, Diagnostic> {
    let toks = lex(source)?;
    let mut parser = Parser { toks: &toks, pos: 0 };
    let program = parser.program()?;
    parser.finish()?;
    Ok(program)
}

/// Parses a bare theory (the shape of a library file): `theory <name>`
/// followed by imports and modules, with no structure or directives.
pub fn parse_theory(source: &str) -> Result<Theory, Diagnostic> {
    let toks = lex(source)?;
    let mut parser = Parser { toks: &toks, pos: 0 };
    let theory = parser.theory()?;
    parser.finish()?;
    Ok(theory)
}

struct Parser<'t> {
    toks: &'t [SpannedTok],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn finish(&self) -> Result<(), Diagnostic> {
        match self.toks.get(self.pos) {
            Some(t) => Err(Diagnostic::error_at(
                t.loc,
                format!("unexpected trailing input starting at {}", t.tok),
            )),
            None => Ok(()),
        }
    }

    fn peek(&self) -> Option<&'t Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&'t Tok> {
        self.toks.get(self.pos + offset).map(|t| &t.tok)
    }

    fn peek_ident(&self) -> Option<&'t str> {
        match self.peek() {
            Some(Tok::Ident(s)) => Some(s),
            _ => None,
        }
    }

    fn is_kw(&self, offset: usize, kw: &str) -> bool {
        matches!(self.peek_at(offset), Some(Tok::Ident(s)) if s == kw)
    }

    /// Location of the next token, or of the end of input.
    fn loc(&self) -> Location {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|t| t.loc)
            .unwrap_or(Location { line: 1, col: 1 })
    }

    fn err(&self, expected: &str) -> Diagnostic {
        let found = match self.peek() {
            Some(t) => format!("{t}"),
            None => "end of input".to_string(),
        };
        Diagnostic::error_at(self.loc(), format!("expected {expected}, found {found}"))
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), Diagnostic> {
        if self.is_kw(0, kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("`{kw}`")))
        }
    }

    fn expect_tok(&mut self, tok: &Tok) -> Result<(), Diagnostic> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("{tok}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<Ident, Diagnostic> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.err(what)),
        }
    }

    fn nat(&mut self, what: &str) -> Result<u32, Diagnostic> {
        match self.peek() {
            Some(Tok::Nat(n)) => {
                self.pos += 1;
                Ok(*n)
            }
            _ => Err(self.err(what)),
        }
    }

    fn ident_list(&mut self, what: &str) -> Result<Vec<Ident>, Diagnostic> {
        let mut names = vec![self.ident(what)?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            names.push(self.ident(what)?);
        }
        Ok(names)
    }

    fn term(&mut self) -> Result<Term, Diagnostic> {
        let name = self.ident("a term")?;
        if name.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
            Ok(Term::Var(name))
        } else {
            Ok(Term::Const(name))
        }
    }

    fn program(&mut self) -> Result<Program, Diagnostic> {
        self.expect_kw("system")?;
        self.expect_kw("description")?;
        let name = self.ident("a system description name")?;
        let theory = self.theory()?;
        let structure = self.structure()?;

        let mut temporal_projection = false;
        if self.is_kw(0, "temporal") {
            self.pos += 1;
            self.expect_kw("projection")?;
            temporal_projection = true;
        }
        let mut max_steps = None;
        if self.is_kw(0, "max") {
            self.pos += 1;
            self.expect_kw("steps")?;
            max_steps = Some(self.nat("a step count")?);
        }
        let mut history = Vec::new();
        if self.is_kw(0, "history") {
            self.pos += 1;
            while self.is_kw(0, "happened") {
                self.pos += 1;
                self.expect_tok(&Tok::LParen)?;
                let event = self.ident("an event name")?;
                self.expect_tok(&Tok::Comma)?;
                let time = self.nat("a time point")?;
                self.expect_tok(&Tok::RParen)?;
                self.expect_tok(&Tok::Period)?;
                history.push(Occurrence { event, time });
            }
        }

        Ok(Program {
            name,
            theory,
            structure,
            temporal_projection,
            max_steps,
            history,
        })
    }

    fn theory(&mut self) -> Result<Theory, Diagnostic> {
        self.expect_kw("theory")?;
        let name = self.ident("a theory name")?;
        let mut imports = Vec::new();
        let mut modules = Vec::new();
        loop {
            if self.is_kw(0, "import") {
                self.pos += 1;
                let theory = self.ident("a theory name")?;
                self.expect_tok(&Tok::Period)?;
                let module = self.ident("a module name")?;
                self.expect_kw("from")?;
                let library = self.ident("a library name")?;
                imports.push(Import {
                    path: ModulePath { theory, module },
                    library,
                });
            } else if self.is_kw(0, "module") {
                modules.push(self.module()?);
            } else {
                break;
            }
        }
        Ok(Theory {
            name,
            imports,
            modules,
        })
    }

    fn module_path(&mut self) -> Result<ModulePath, Diagnostic> {
        let theory = self.ident("a theory name")?;
        self.expect_tok(&Tok::Period)?;
        let module = self.ident("a module name")?;
        Ok(ModulePath { theory, module })
    }

    fn module(&mut self) -> Result<ModuleDecl, Diagnostic> {
        self.expect_kw("module")?;
        let name = self.ident("a module name")?;
        let mut decl = ModuleDecl {
            name,
            ..ModuleDecl::default()
        };

        if self.is_kw(0, "depends") {
            self.pos += 1;
            self.expect_kw("on")?;
            decl.depends_on.push(self.module_path()?);
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                decl.depends_on.push(self.module_path()?);
            }
        }

        if (self.is_kw(0, "sort") || self.is_kw(0, "sorts")) && self.is_kw(1, "declarations") {
            self.pos += 2;
            // A declaration starts with an identifier followed by `,` or `::`.
            while matches!(self.peek(), Some(Tok::Ident(_)))
                && matches!(self.peek_at(1), Some(Tok::Comma | Tok::ColonColon))
            {
                decl.sort_decls.push(self.sort_decl()?);
            }
        }

        if self.is_kw(0, "function") && self.is_kw(1, "declarations") {
            self.pos += 2;
            self.expect_kw("fluents")?;
            self.expect_kw("basic")?;
            while matches!(self.peek(), Some(Tok::Ident(_)))
                && self.peek_at(1) == Some(&Tok::Colon)
            {
                let (name, arg_sorts) = self.typed_decl()?;
                decl.fluent_decls.push(FluentDecl { name, arg_sorts });
            }
        }

        if self.is_kw(0, "axioms") {
            self.pos += 1;
            if self.is_kw(0, "dynamic") && self.is_kw(1, "causal") {
                self.pos += 2;
                self.expect_kw("laws")?;
                while self.is_kw(0, "occurs") {
                    decl.axioms.push(Axiom::DynamicCausal(self.dynamic_law()?));
                }
            }
            if self.is_kw(0, "state") && self.is_kw(1, "constraints") {
                self.pos += 2;
                // A constraint starts with `-` or with `ident(`.
                while self.peek() == Some(&Tok::Minus)
                    || (matches!(self.peek(), Some(Tok::Ident(_)))
                        && self.peek_at(1) == Some(&Tok::LParen))
                {
                    decl.axioms.push(Axiom::StateConstraint(self.state_constraint()?));
                }
            }
            if self.is_kw(0, "executability") && self.is_kw(1, "conditions") {
                self.pos += 2;
                while self.is_kw(0, "impossible") {
                    decl.axioms.push(Axiom::Executability(self.executability()?));
                }
            }
        }

        Ok(decl)
    }

    fn sort_decl(&mut self) -> Result<SortDecl, Diagnostic> {
        let names = self.ident_list("a sort name")?;
        self.expect_tok(&Tok::ColonColon)?;
        let parents = self.ident_list("a parent sort name")?;
        let mut attributes = Vec::new();
        if self.is_kw(0, "attributes") {
            self.pos += 1;
            while matches!(self.peek(), Some(Tok::Ident(_)))
                && self.peek_at(1) == Some(&Tok::Colon)
            {
                let (name, arg_sorts) = self.typed_decl()?;
                attributes.push(AttributeDecl { name, arg_sorts });
            }
        }
        Ok(SortDecl {
            names,
            parents,
            attributes,
        })
    }

    /// `name : s1 * s2 -> booleans`, shared by attribute and fluent entries.
    fn typed_decl(&mut self) -> Result<(Ident, Vec<Ident>), Diagnostic> {
        let name = self.ident("a declaration name")?;
        self.expect_tok(&Tok::Colon)?;
        let mut arg_sorts = vec![self.ident("a sort name")?];
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            arg_sorts.push(self.ident("a sort name")?);
        }
        self.expect_tok(&Tok::Arrow)?;
        self.expect_kw("booleans")?;
        Ok((name, arg_sorts))
    }

    fn occurs_var(&mut self) -> Result<Ident, Diagnostic> {
        self.expect_kw("occurs")?;
        self.expect_tok(&Tok::LParen)?;
        let loc = self.loc();
        let var = match self.term()? {
            Term::Var(v) => v,
            Term::Const(c) => {
                return Err(Diagnostic::error_at(
                    loc,
                    format!("occurs takes a variable, found constant `{c}`"),
                ));
            }
        };
        self.expect_tok(&Tok::RParen)?;
        Ok(var)
    }

    fn dynamic_law(&mut self) -> Result<DynamicCausalLaw, Diagnostic> {
        let action_var = self.occurs_var()?;
        self.expect_kw("causes")?;
        let head = self.literal()?;
        self.expect_kw("if")?;
        let body = self.conditions()?;
        self.expect_tok(&Tok::Period)?;
        Ok(DynamicCausalLaw {
            action_var,
            head,
            body,
        })
    }

    fn state_constraint(&mut self) -> Result<StateConstraint, Diagnostic> {
        let head = self.literal()?;
        self.expect_kw("if")?;
        let body = self.conditions()?;
        self.expect_tok(&Tok::Period)?;
        Ok(StateConstraint { head, body })
    }

    fn executability(&mut self) -> Result<Executability, Diagnostic> {
        self.expect_kw("impossible")?;
        let action_var = self.occurs_var()?;
        self.expect_kw("if")?;
        let body = self.conditions()?;
        self.expect_tok(&Tok::Period)?;
        Ok(Executability { action_var, body })
    }

    fn literal(&mut self) -> Result<Literal, Diagnostic> {
        let positive = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            false
        } else {
            true
        };
        let function = self.ident("a function name")?;
        self.expect_tok(&Tok::LParen)?;
        let mut args = vec![self.term()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            args.push(self.term()?);
        }
        self.expect_tok(&Tok::RParen)?;
        Ok(Literal {
            positive,
            function,
            args,
        })
    }

    fn conditions(&mut self) -> Result<Vec<Condition>, Diagnostic> {
        let mut conds = vec![self.condition()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            conds.push(self.condition()?);
        }
        Ok(conds)
    }

    fn condition(&mut self) -> Result<Condition, Diagnostic> {
        if self.peek() == Some(&Tok::Minus) {
            return Ok(Condition::Literal(self.literal()?));
        }
        if matches!(self.peek(), Some(Tok::Ident(_))) && self.peek_at(1) == Some(&Tok::LParen) {
            if self.peek_ident() == Some("instance") {
                self.pos += 2;
                let term = self.term()?;
                self.expect_tok(&Tok::Comma)?;
                let sort = self.ident("a sort name")?;
                self.expect_tok(&Tok::RParen)?;
                return Ok(Condition::Instance { term, sort });
            }
            return Ok(Condition::Literal(self.literal()?));
        }
        let left = self.term()?;
        match self.peek() {
            Some(Tok::Eq) => {
                self.pos += 1;
                Ok(Condition::Equal(left, self.term()?))
            }
            Some(Tok::Neq) => {
                self.pos += 1;
                Ok(Condition::NotEqual(left, self.term()?))
            }
            _ => Err(self.err("`=` or `!=`")),
        }
    }

    fn structure(&mut self) -> Result<Structure, Diagnostic> {
        self.expect_kw("structure")?;
        let name = self.ident("a structure name")?;
        self.expect_kw("instances")?;
        let mut instances = Vec::new();
        // An instance declaration starts with an identifier followed by `,`
        // or the keyword `in`.
        while matches!(self.peek(), Some(Tok::Ident(_)))
            && (self.peek_at(1) == Some(&Tok::Comma) || self.is_kw(1, "in"))
        {
            let names = self.ident_list("an instance name")?;
            self.expect_kw("in")?;
            let sort = self.ident("a sort name")?;
            let mut assignments = Vec::new();
            while matches!(self.peek(), Some(Tok::Ident(_)))
                && self.peek_at(1) == Some(&Tok::LParen)
            {
                let attribute = self.ident("an attribute name")?;
                self.expect_tok(&Tok::LParen)?;
                let args = self.ident_list("a constant")?;
                self.expect_tok(&Tok::RParen)?;
                self.expect_tok(&Tok::Eq)?;
                let loc = self.loc();
                let value = match self.ident("`true` or `false`")?.as_str() {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(Diagnostic::error_at(
                            loc,
                            format!("expected `true` or `false`, found `{other}`"),
                        ));
                    }
                };
                assignments.push(AttributeAssignment {
                    attribute,
                    args,
                    value,
                });
            }
            instances.push(InstanceDecl {
                names,
                sort,
                assignments,
            });
        }
        Ok(Structure { name, instances })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "
system description demo
  theory demo_theory
    module demo
      sort declarations
        agents :: universe
        move :: actions
          attributes
            actor : agents -> booleans
      function declarations
        fluents
          basic
            tired : agents -> booleans
      axioms
        dynamic causal laws
          occurs(X) causes tired(A) if instance(X,move), actor(X,A).
  structure demo_structure
    instances
      bob in agents
      a1 in move
        actor(bob) = true
  temporal projection
  max steps 2
  history
    happened(a1, 0).
";

    #[test]
    fn parses_a_small_program() {
        let p = parse_program(SMALL).unwrap();
        assert_eq!(p.name, "demo");
        assert_eq!(p.theory.modules.len(), 1);
        let m = &p.theory.modules[0];
        assert_eq!(m.sort_decls.len(), 2);
        assert_eq!(m.sort_decls[1].attributes[0].name, "actor");
        assert_eq!(m.fluent_decls[0].arg_sorts, vec!["agents".to_string()]);
        assert_eq!(m.axioms.len(), 1);
        assert!(p.temporal_projection);
        assert_eq!(p.max_steps, Some(2));
        assert_eq!(p.history.len(), 1);
        assert_eq!(p.history[0].time, 0);
        assert_eq!(p.structure.instances[1].assignments.len(), 1);
    }

    #[test]
    fn sort_and_sorts_spellings_agree() {
        let a = parse_program(SMALL).unwrap();
        let b = parse_program(&SMALL.replace("sort declarations", "sorts declarations")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_missing_comma_in_history() {
        let src = SMALL.replace("happened(a1, 0).", "happened(a1 0).");
        let err = parse_program(&src).unwrap_err();
        assert!(err.message.contains("`,`"), "message: {}", err.message);
        let loc = err.location.unwrap();
        // Points at the time constant that follows the missing comma.
        assert_eq!(loc.line, 25);
    }

    #[test]
    fn rejects_trailing_input() {
        let src = format!("{SMALL}\n  leftovers");
        let err = parse_program(&src).unwrap_err();
        assert!(err.message.contains("trailing"));
    }

    #[test]
    fn variables_and_constants_by_case() {
        let p = parse_program(SMALL).unwrap();
        let m = &p.theory.modules[0];
        let Axiom::DynamicCausal(law) = &m.axioms[0] else {
            panic!("expected a dynamic causal law");
        };
        assert_eq!(law.action_var, "X");
        assert_eq!(law.head.args, vec![Term::Var("A".into())]);
        match &law.body[0] {
            Condition::Instance { term, sort } => {
                assert_eq!(term, &Term::Var("X".into()));
                assert_eq!(sort, "move");
            }
            other => panic!("expected instance condition, got {other:?}"),
        }
    }

    #[test]
    fn occurs_requires_a_variable() {
        let src = SMALL.replace("occurs(X)", "occurs(x)");
        let err = parse_program(&src).unwrap_err();
        assert!(err.message.contains("variable"));
    }
}
