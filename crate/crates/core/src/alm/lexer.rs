//! Tokenizer for system descriptions.
//!
//! The surface syntax is whitespace-insensitive. `%` starts a line comment.
//! Keywords are contextual, so the lexer only distinguishes identifiers,
//! natural numbers, and punctuation.

use crate::diag::{Diagnostic, Location};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Identifier; constants start lowercase, variables uppercase.
    Ident(String),
    Nat(u32),
    /// `::`
    ColonColon,
    /// `:`
    Colon,
    /// `->`
    Arrow,
    /// `-`
    Minus,
    /// `=`
    Eq,
    /// `!=`
    Neq,
    /// `*`
    Star,
    Comma,
    Period,
    LParen,
    RParen,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::ColonColon => write!(f, "`::`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Neq => write!(f, "`!=`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Period => write!(f, "`.`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpannedTok {
    pub tok: Tok,
    pub loc: Location,
}

pub fn lex(source: &str) -> Result<Vec<SpannedTok>, Diagnostic> {
    let mut toks = Vec::new();
    let mut chars = source.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let loc = Location { line, col };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                toks.push(SpannedTok {
                    tok: Tok::Ident(ident),
                    loc,
                });
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let n = digits
                    .parse::<u32>()
                    .map_err(|_| Diagnostic::error_at(loc, format!("number out of range: {digits}")))?;
                toks.push(SpannedTok { tok: Tok::Nat(n), loc });
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&':') {
                    bump!();
                    toks.push(SpannedTok {
                        tok: Tok::ColonColon,
                        loc,
                    });
                } else {
                    toks.push(SpannedTok { tok: Tok::Colon, loc });
                }
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    toks.push(SpannedTok { tok: Tok::Arrow, loc });
                } else {
                    toks.push(SpannedTok { tok: Tok::Minus, loc });
                }
            }
            '!' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    toks.push(SpannedTok { tok: Tok::Neq, loc });
                } else {
                    return Err(Diagnostic::error_at(loc, "expected `!=`".to_string()));
                }
            }
            '=' => {
                bump!();
                toks.push(SpannedTok { tok: Tok::Eq, loc });
            }
            '*' => {
                bump!();
                toks.push(SpannedTok { tok: Tok::Star, loc });
            }
            ',' => {
                bump!();
                toks.push(SpannedTok { tok: Tok::Comma, loc });
            }
            '.' => {
                bump!();
                toks.push(SpannedTok { tok: Tok::Period, loc });
            }
            '(' => {
                bump!();
                toks.push(SpannedTok { tok: Tok::LParen, loc });
            }
            ')' => {
                bump!();
                toks.push(SpannedTok { tok: Tok::RParen, loc });
            }
            other => {
                return Err(Diagnostic::error_at(
                    loc,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn punctuation_and_idents() {
        assert_eq!(
            kinds("move :: actions"),
            vec![
                Tok::Ident("move".into()),
                Tok::ColonColon,
                Tok::Ident("actions".into()),
            ]
        );
        assert_eq!(
            kinds("actor : agents -> booleans"),
            vec![
                Tok::Ident("actor".into()),
                Tok::Colon,
                Tok::Ident("agents".into()),
                Tok::Arrow,
                Tok::Ident("booleans".into()),
            ]
        );
    }

    #[test]
    fn minus_vs_arrow() {
        assert_eq!(
            kinds("-loc_in -> -"),
            vec![
                Tok::Minus,
                Tok::Ident("loc_in".into()),
                Tok::Arrow,
                Tok::Minus,
            ]
        );
    }

    #[test]
    fn comments_and_locations() {
        let toks = lex("a % trailing words ( ) ::\n  b").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[1].tok, Tok::Ident("b".into()));
        assert_eq!(toks[1].loc, Location { line: 2, col: 3 });
    }

    #[test]
    fn comparison_tokens() {
        assert_eq!(
            kinds("P1 != P2, P = D"),
            vec![
                Tok::Ident("P1".into()),
                Tok::Neq,
                Tok::Ident("P2".into()),
                Tok::Comma,
                Tok::Ident("P".into()),
                Tok::Eq,
                Tok::Ident("D".into()),
            ]
        );
    }

    #[test]
    fn rejects_stray_characters() {
        let err = lex("move :: actions\n  a & b").unwrap_err();
        assert!(err.message.contains('&'));
        assert_eq!(err.location.unwrap().line, 2);
    }

    #[test]
    fn rejects_bare_bang() {
        assert!(lex("a ! b").is_err());
    }
}
