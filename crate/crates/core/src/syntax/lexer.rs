use alloc::string::String;
use alloc::vec::Vec;

use super::{Position, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Bang,
    And,
    Or,
    Arrow,
    DoubleArrow,
    Iff,
    EqEq,
    NotEq,
    Dot,
    Comma,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        use alloc::format;
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Bang => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`=>`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::NotEq => "`!=`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, Position)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let bytes = text.as_bytes();
    while let Some(&(at, c)) = chars.peek() {
        let pos = Position { line, column: col };
        let mut advance = |n: usize, chars: &mut core::iter::Peekable<core::str::CharIndices<'_>>| {
            for _ in 0..n {
                chars.next();
            }
            col += n;
        };
        let next = bytes.get(at + 1).copied();
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut chars),
            '#' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                out.push((Tok::LParen, pos));
                advance(1, &mut chars);
            }
            ')' => {
                out.push((Tok::RParen, pos));
                advance(1, &mut chars);
            }
            '[' => {
                out.push((Tok::LBracket, pos));
                advance(1, &mut chars);
            }
            ']' => {
                out.push((Tok::RBracket, pos));
                advance(1, &mut chars);
            }
            '&' => {
                out.push((Tok::And, pos));
                advance(1, &mut chars);
            }
            '|' => {
                out.push((Tok::Or, pos));
                advance(1, &mut chars);
            }
            '.' => {
                out.push((Tok::Dot, pos));
                advance(1, &mut chars);
            }
            ',' => {
                out.push((Tok::Comma, pos));
                advance(1, &mut chars);
            }
            '!' if next == Some(b'=') => {
                out.push((Tok::NotEq, pos));
                advance(2, &mut chars);
            }
            '!' => {
                out.push((Tok::Bang, pos));
                advance(1, &mut chars);
            }
            '-' if next == Some(b'>') => {
                out.push((Tok::Arrow, pos));
                advance(2, &mut chars);
            }
            '=' if next == Some(b'>') => {
                out.push((Tok::DoubleArrow, pos));
                advance(2, &mut chars);
            }
            '=' if next == Some(b'=') => {
                out.push((Tok::EqEq, pos));
                advance(2, &mut chars);
            }
            '<' if text[at..].starts_with("<->") => {
                out.push((Tok::Iff, pos));
                advance(3, &mut chars);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(ident), pos));
            }
            other => {
                return Err(SyntaxError::UnknownToken {
                    token: other.into(),
                    at: pos,
                })
            }
        }
    }
    out.push((Tok::Eof, Position { line, column: col }));
    Ok(out)
}
