//! Tokenizer shared by the functor, element, formula, coalgebra and proof
//! parsers.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Quote,
    Slash,
    Tilde,
    And,
    Or,
    Le,
    Box,
    Dia,
    Dot,
    Star,
    Plus,
    Caret,
    Arrow,
    Eq,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Quote => "`'`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::And => "`/\\`".into(),
            Tok::Or => "`\\/`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Box => "`[]`".into(),
            Tok::Dia => "`<>`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Star => "`*`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = bytes.get(i + 1).map(|b| *b as char);
        let (tok, len) = match (c, next) {
            ('/', Some('\\')) => (Tok::And, 2),
            ('\\', Some('/')) => (Tok::Or, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('<', Some('>')) => (Tok::Dia, 2),
            ('[', Some(']')) => (Tok::Box, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBrack, 1),
            (']', _) => (Tok::RBrack, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            ('\'', _) => (Tok::Quote, 1),
            ('/', _) => (Tok::Slash, 1),
            ('~', _) => (Tok::Tilde, 1),
            ('.', _) => (Tok::Dot, 1),
            ('*', _) => (Tok::Star, 1),
            ('+', _) => (Tok::Plus, 1),
            ('^', _) => (Tok::Caret, 1),
            ('=', _) => (Tok::Eq, 1),
            _ if is_ident_char(c) => {
                let start = i;
                let mut j = i;
                while j < bytes.len() && is_ident_char(bytes[j] as char) {
                    j += 1;
                }
                (Tok::Ident(text[start..j].to_string()), j - start)
            }
            _ => {
                // report the full (possibly multi-byte) character
                let ch = text[i..].chars().next().unwrap_or(c);
                return Err(Error::syntax(i, format!("unexpected character `{ch}`")));
            }
        };
        out.push((tok, i));
        i += len;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

/// Cursor over a token stream.
pub(crate) struct Cursor {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self> {
        Ok(Cursor {
            toks: tokenize(text)?,
            at: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.at + k).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    pub(crate) fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> Error {
        Error::syntax(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}
