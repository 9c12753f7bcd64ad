//! Recursive-descent parser with precedence climbing.
//!
//! Precedence, tightest first: unary (`! X P F G O H`), `U`/`S`
//! (right-assoc), `&`, `|`, `->` (right-assoc), `<->` (left-assoc).
//! Quantifier and `fix` bodies extend as far right as possible.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use super::lexer::{tokenize, Tok};
use super::surface::{BinaryOp, Quantifier, Surface, SurfaceConstraint, UnaryOp};
use super::{Position, SyntaxError, SYS};

pub fn parse(text: &str) -> Result<Surface, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, cursor: 0 };
    let formula = parser.formula()?;
    parser.expect_eof()?;
    Ok(formula)
}

struct Parser {
    tokens: Vec<(Tok, Position)>,
    cursor: usize,
}

fn unary_op(name: &str) -> Option<UnaryOp> {
    Some(match name {
        "X" => UnaryOp::Next,
        "P" => UnaryOp::Prev,
        "F" => UnaryOp::Eventually,
        "G" => UnaryOp::Globally,
        "O" => UnaryOp::Once,
        "H" => UnaryOp::Historically,
        _ => return None,
    })
}

const KEYWORDS: [&str; 6] = ["forall", "exists", "in", "fix", "true", "false"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.cursor].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.cursor + k).min(self.tokens.len() - 1);
        &self.tokens[idx].0
    }

    fn pos(&self) -> Position {
        self.tokens[self.cursor].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.cursor].0.clone();
        if self.cursor + 1 < self.tokens.len() {
            self.cursor += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        let tok = self.peek();
        if *tok == Tok::Eof && expected == "`)`" {
            return SyntaxError::Unbalanced { at: self.pos() };
        }
        SyntaxError::Unexpected {
            found: tok.describe(),
            expected: expected.into(),
            at: self.pos(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            Tok::RParen => Err(SyntaxError::Unbalanced { at: self.pos() }),
            _ => Err(self.unexpected("end of input")),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn name(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// A set variable in binding position; `sys` is reserved.
    fn binding_set_name(&mut self) -> Result<String, SyntaxError> {
        let at = self.pos();
        let name = self.name("a set variable")?;
        if name == SYS {
            return Err(SyntaxError::ReservedName { at });
        }
        Ok(name)
    }

    pub(crate) fn formula(&mut self) -> Result<Surface, SyntaxError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Surface, SyntaxError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implies()?;
            lhs = Surface::binary(BinaryOp::Iff, lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Surface, SyntaxError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Surface::binary(BinaryOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Surface, SyntaxError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Surface::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Surface, SyntaxError> {
        let mut lhs = self.temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.temporal()?;
            lhs = Surface::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Surface, SyntaxError> {
        let lhs = self.unary()?;
        let op = match self.peek() {
            Tok::Ident(s) if s == "U" => BinaryOp::Until,
            Tok::Ident(s) if s == "S" => BinaryOp::Since,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.temporal()?;
        Ok(Surface::binary(op, lhs, rhs))
    }

    fn unary(&mut self) -> Result<Surface, SyntaxError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Surface::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(_) if *self.peek_at(1) == Tok::LBracket => self.atom(),
            Tok::Ident(word) => match word.as_str() {
                "true" => {
                    self.bump();
                    Ok(Surface::True)
                }
                "false" => {
                    self.bump();
                    Ok(Surface::False)
                }
                "forall" | "exists" => self.quantifier(),
                "fix" => self.fixpoint(),
                _ => match self.peek_at(1) {
                    Tok::EqEq | Tok::NotEq => self.equality(),
                    _ => match unary_op(&word) {
                        Some(op) => {
                            self.bump();
                            Ok(Surface::unary(op, self.unary()?))
                        }
                        None => Err(SyntaxError::UnknownToken {
                            token: word,
                            at: self.pos(),
                        }),
                    },
                },
            },
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn atom(&mut self) -> Result<Surface, SyntaxError> {
        let Tok::Ident(ap) = self.bump() else {
            unreachable!("atom starts with an identifier")
        };
        self.expect(Tok::LBracket, "`[`")?;
        let var = self.name("a trace variable")?;
        self.expect(Tok::RBracket, "`]`")?;
        Ok(Surface::Atom { ap, var })
    }

    fn equality(&mut self) -> Result<Surface, SyntaxError> {
        let left = self.name("a trace variable")?;
        let negated = self.bump() == Tok::NotEq;
        let right = self.name("a trace variable")?;
        Ok(Surface::TraceEq {
            left,
            right,
            negated,
        })
    }

    fn quantifier(&mut self) -> Result<Surface, SyntaxError> {
        let q = match self.bump() {
            Tok::Ident(s) if s == "forall" => Quantifier::Forall,
            _ => Quantifier::Exists,
        };
        let at = self.pos();
        let name = self.name("a variable")?;
        if self.is_keyword("in") {
            self.bump();
            let set = self.name("a set variable")?;
            self.expect(Tok::Dot, "`.`")?;
            let body = self.formula()?;
            return Ok(Surface::TraceQuant {
                q,
                var: name,
                set,
                body: Box::new(body),
            });
        }
        if name == SYS {
            return Err(SyntaxError::ReservedName { at });
        }
        self.expect(Tok::Dot, "`.`")?;
        let body = self.formula()?;
        Ok(Surface::SetQuant {
            q,
            set: name,
            body: Box::new(body),
        })
    }

    fn fixpoint(&mut self) -> Result<Surface, SyntaxError> {
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        let set = self.binding_set_name()?;
        let mut constraints = Vec::new();
        while *self.peek() == Tok::Comma {
            self.bump();
            constraints.push(self.constraint()?);
        }
        if constraints.is_empty() {
            return Err(self.unexpected("`,` followed by a fixpoint constraint"));
        }
        self.expect(Tok::RParen, "`)`")?;
        self.expect(Tok::Dot, "`.`")?;
        let body = self.formula()?;
        Ok(Surface::Fix {
            set,
            constraints,
            body: Box::new(body),
        })
    }

    fn constraint(&mut self) -> Result<SurfaceConstraint, SyntaxError> {
        let mut binders = Vec::new();
        while self.is_keyword("forall") {
            self.bump();
            let var = self.name("a trace variable")?;
            if !self.is_keyword("in") {
                return Err(self.unexpected("`in`"));
            }
            self.bump();
            let set = self.name("a set variable")?;
            self.expect(Tok::Dot, "`.`")?;
            binders.push((var, set));
        }
        let step = self.formula()?;
        self.expect(Tok::DoubleArrow, "`=>`")?;
        let target_trace = self.name("a trace variable")?;
        if !self.is_keyword("in") {
            return Err(self.unexpected("`in`"));
        }
        self.bump();
        let target_set = self.name("a set variable")?;
        Ok(SurfaceConstraint {
            binders,
            step,
            target_trace,
            target_set,
        })
    }
}
