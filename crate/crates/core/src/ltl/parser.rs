//! Recursive-descent parser for the concrete LTL syntax.
//!
//! ```text
//! formula := implies
//! implies := or ( "->" implies )?          right-associative
//! or      := and ( "|" and )*
//! and     := until ( "&" until )*
//! until   := unary ( "U" until )?          right-associative
//! unary   := ("!" | "X" | "<>" | "[]") unary | atom
//! atom    := "true" | "false" | ident | "(" formula ")"
//! ```

use super::formula::{ApTable, Formula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown proposition `{name}` at byte {pos}")]
    UnknownProposition { name: String, pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Until,
    Eventually,
    Always,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::End => "end of input".into(),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = |s: &str| text[i..].starts_with(s);
        let tok = if two("->") {
            i += 2;
            Tok::Implies
        } else if two("<>") {
            i += 2;
            Tok::Eventually
        } else if two("[]") {
            i += 2;
            Tok::Always
        } else {
            match c {
                b'!' => {
                    i += 1;
                    Tok::Not
                }
                b'&' => {
                    i += 1;
                    Tok::And
                }
                b'|' => {
                    i += 1;
                    Tok::Or
                }
                b'(' => {
                    i += 1;
                    Tok::LParen
                }
                b')' => {
                    i += 1;
                    Tok::RParen
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    match &text[start..i] {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        "X" => Tok::Next,
                        "U" => Tok::Until,
                        id => Tok::Ident(id.to_string()),
                    }
                }
                _ => {
                    let ch = text[i..].chars().next().unwrap();
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("unexpected character `{ch}`"),
                    });
                }
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    aps: &'a ApTable,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Until {
            self.bump();
            let rhs = self.until()?;
            return Ok(Formula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Next => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Tok::Eventually => {
                self.bump();
                Ok(Formula::eventually(self.unary()?))
            }
            Tok::Always => {
                self.bump();
                Ok(Formula::always(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::True => Ok(Formula::True),
            Tok::False => Ok(Formula::False),
            Tok::Ident(name) => match self.aps.lookup(&name) {
                Some(id) => Ok(Formula::Prop(id)),
                None => Err(ParseError::UnknownProposition { name, pos: at }),
            },
            Tok::LParen => {
                let f = self.implies()?;
                let close = self.offset();
                match self.bump() {
                    Tok::RParen => Ok(f),
                    other => Err(ParseError::Syntax {
                        pos: close,
                        msg: format!("expected `)`, found {}", describe(&other)),
                    }),
                }
            }
            other => Err(ParseError::Syntax {
                pos: at,
                msg: format!("expected a formula, found {}", describe(&other)),
            }),
        }
    }
}

/// Parses `text` exactly as written, keeping sugar (`&`, `->`, `<>`, `[]`,
/// `false`) in the tree.
pub fn parse_surface(text: &str, aps: &ApTable) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, aps };
    let f = p.implies()?;
    if *p.peek() != Tok::End {
        return Err(ParseError::Syntax {
            pos: p.offset(),
            msg: format!("unexpected {}", describe(p.peek())),
        });
    }
    Ok(f)
}

/// Parses and desugars into the core grammar.
pub fn parse_ltl(text: &str, aps: &ApTable) -> Result<Formula, ParseError> {
    parse_surface(text, aps).map(|f| f.desugar())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Formula as F;

    fn aps() -> ApTable {
        ApTable::from_pairs(&[("a", 0), ("b", 1), ("c", 2), ("b1", 1), ("b2", 2)]).unwrap()
    }

    #[test]
    fn running_example() {
        let t = aps();
        let f = parse_ltl("!a U (a U (b & c))", &t).unwrap();
        let expected = F::until(
            F::not(F::prop(0)),
            F::until(F::prop(0), F::and(F::prop(1), F::prop(2))),
        )
        .desugar();
        assert_eq!(f, expected);
        assert!(f.is_core());
    }

    #[test]
    fn constants() {
        assert_eq!(parse_ltl("true", &aps()).unwrap(), F::True);
        assert_eq!(parse_ltl("false", &aps()).unwrap(), F::not(F::True));
    }

    #[test]
    fn eventually_desugars_to_until() {
        let t = aps();
        let f = parse_ltl("<>(a & b1 & b2)", &t).unwrap();
        let conj = F::and(F::and(F::prop(0), F::prop(3)), F::prop(4)).desugar();
        assert_eq!(f, F::until(F::True, conj));
    }

    #[test]
    fn precedence_and_associativity() {
        let t = aps();
        // unary > U > & > | > ->
        assert_eq!(
            parse_surface("!a U b & c | a -> b", &t).unwrap(),
            F::implies(
                F::or(
                    F::and(F::until(F::not(F::prop(0)), F::prop(1)), F::prop(2)),
                    F::prop(0)
                ),
                F::prop(1)
            )
        );
        assert_eq!(
            parse_surface("a U b U c", &t).unwrap(),
            F::until(F::prop(0), F::until(F::prop(1), F::prop(2)))
        );
        assert_eq!(
            parse_surface("a -> b -> c", &t).unwrap(),
            F::implies(F::prop(0), F::implies(F::prop(1), F::prop(2)))
        );
        assert_eq!(
            parse_surface("[](a -> (b U c))", &t).unwrap(),
            F::always(F::implies(F::prop(0), F::until(F::prop(1), F::prop(2))))
        );
        assert_eq!(parse_surface("X X a", &t).unwrap(), F::next(F::next(F::prop(0))));
    }

    #[test]
    fn errors_carry_positions() {
        let t = aps();
        assert_eq!(
            parse_ltl("a & zz", &t),
            Err(ParseError::UnknownProposition { name: "zz".into(), pos: 4 })
        );
        assert!(matches!(parse_ltl("a &", &t), Err(ParseError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_ltl("(a | b", &t), Err(ParseError::Syntax { pos: 6, .. })));
        assert!(matches!(parse_ltl("a b", &t), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_ltl("a # b", &t), Err(ParseError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn display_roundtrips() {
        let t = aps();
        for src in ["!a U (a U (b & c))", "[](a -> (b U c))", "<>(a & b1 & b2)", "X (a | !b)"] {
            let f = parse_surface(src, &t).unwrap();
            let printed = f.display(&t).to_string();
            assert_eq!(parse_surface(&printed, &t).unwrap(), f, "{printed}");
        }
    }
}
