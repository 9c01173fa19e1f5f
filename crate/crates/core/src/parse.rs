//! Text formats for words and composite scripts.
//!
//! Words: `S`, `X<k>`, `X<k>^-1`, `dual(w)`, `(w * w)`; every tensor node
//! carries its own parentheses. Scripts: a `source: <word>` line, then one
//! move per line such as `twist (X1, X1^-1) @ R` or `alphahat 1 ^-1 @ L.R`.
//! `#` starts a comment.

use thiserror::Error;

use crate::composites::{FormalComposite, Move, MoveFailure, MoveKind, Path, Step, UnitorSide};
use crate::words::TensorWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: generator X{index} is outside X1..X{n}")]
    UnknownGenerator { line: usize, index: usize, n: usize },
    #[error("line {line}: `{mv}` does not apply to `{word}`")]
    MoveMismatch { line: usize, mv: String, word: String },
    #[error("line {line}: position {path} does not exist in `{word}`")]
    InvalidPosition { line: usize, path: String, word: String },
    #[error("missing `source:` line")]
    MissingSource,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    /// Column of `text[0]` within its line (1-based).
    col0: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize, col0: usize) -> Self {
        Cursor { text, pos: 0, line, col0 }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: self.line,
            column: self.col0 + self.text[..self.pos].chars().count(),
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let digits: String = self.rest().chars().take_while(char::is_ascii_digit).collect();
        if digits.is_empty() {
            return self.err("expected a number");
        }
        let v = digits.parse().or_else(|_| self.err("number too large"))?;
        self.pos += digits.len();
        Ok(v)
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn word(&mut self, n: Option<usize>) -> Result<TensorWord, ParseError> {
        self.skip_ws();
        if self.eat("(") {
            let a = self.word(n)?;
            self.expect("*")?;
            let b = self.word(n)?;
            self.expect(")")?;
            return Ok(TensorWord::tensor(a, b));
        }
        if self.eat("dual") {
            self.expect("(")?;
            let w = self.word(n)?;
            self.expect(")")?;
            return Ok(TensorWord::Dual(Box::new(w)));
        }
        if self.eat("X") {
            let k = self.number()?;
            if k == 0 {
                return self.err("generators are numbered from 1");
            }
            if let Some(n) = n {
                if k > n {
                    return Err(ParseError::UnknownGenerator { line: self.line, index: k, n });
                }
            }
            let inverse = self.eat("^-1");
            return Ok(if inverse { TensorWord::DualGen(k - 1) } else { TensorWord::Gen(k - 1) });
        }
        if self.eat("S") {
            return Ok(TensorWord::Unit);
        }
        self.err("expected `S`, `X<k>`, `dual(` or `(`")
    }

    fn path(&mut self) -> Result<Path, ParseError> {
        self.skip_ws();
        if self.eat("ε") || self.eat("eps") {
            return Ok(Path::root());
        }
        let mut steps = Vec::new();
        loop {
            if self.eat("L") {
                steps.push(Step::L);
            } else if self.eat("R") {
                steps.push(Step::R);
            } else {
                return self.err("expected a path of `L`/`R` steps or `ε`");
            }
            if !self.eat(".") {
                break;
            }
        }
        Ok(Path(steps))
    }

    fn mv(&mut self, n: Option<usize>) -> Result<Move, ParseError> {
        self.skip_ws();
        let kind = if self.eat("assoc") {
            MoveKind::Assoc
        } else if self.eat("unitor-left") {
            MoveKind::Unitor(UnitorSide::Left)
        } else if self.eat("unitor-right") {
            MoveKind::Unitor(UnitorSide::Right)
        } else if self.eat("twist") {
            self.expect("(")?;
            let u = self.word(n)?;
            self.expect(",")?;
            let v = self.word(n)?;
            self.expect(")")?;
            MoveKind::Twist(u, v)
        } else if self.eat("alphahat") {
            MoveKind::AlphaHat(self.generator(n)?)
        } else if self.eat("alpha") {
            MoveKind::Alpha(self.generator(n)?)
        } else {
            return self.err("expected a move: assoc, unitor-left, unitor-right, twist, alpha, alphahat");
        };
        let inverted = self.eat("^-1");
        self.expect("@")?;
        let position = self.path()?;
        Ok(Move { kind, position, inverted })
    }

    fn generator(&mut self, n: Option<usize>) -> Result<usize, ParseError> {
        let k = self.number()?;
        if k == 0 {
            return self.err("generators are numbered from 1");
        }
        if let Some(n) = n {
            if k > n {
                return Err(ParseError::UnknownGenerator { line: self.line, index: k, n });
            }
        }
        Ok(k - 1)
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Parses a word; `n` bounds the generator indices when given.
pub fn parse_word(text: &str, n: Option<usize>) -> Result<TensorWord, ParseError> {
    let mut c = Cursor::new(text, 1, 1);
    let w = c.word(n)?;
    if !c.at_end() {
        return c.err("trailing input");
    }
    Ok(w)
}

pub fn parse_move(text: &str, n: Option<usize>) -> Result<Move, ParseError> {
    let mut c = Cursor::new(text, 1, 1);
    let m = c.mv(n)?;
    if !c.at_end() {
        return c.err("trailing input");
    }
    Ok(m)
}

/// Parses and replays a composite script, reporting the first line whose
/// move does not apply.
pub fn parse_composite(text: &str, n: Option<usize>) -> Result<FormalComposite, ParseError> {
    let mut source: Option<TensorWord> = None;
    let mut current = TensorWord::Unit;
    let mut moves = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = strip_comment(raw);
        if body.trim().is_empty() {
            continue;
        }
        if source.is_none() {
            let start = body.len() - body.trim_start().len();
            let mut c = Cursor::new(&body[start..], line, start + 1);
            c.expect("source:")?;
            let w = c.word(n)?;
            if !c.at_end() {
                return c.err("trailing input");
            }
            current = w.clone();
            source = Some(w);
            continue;
        }
        let mut c = Cursor::new(body, line, 1);
        let m = c.mv(n)?;
        if !c.at_end() {
            return c.err("trailing input");
        }
        let before = current.to_string();
        m.apply(&mut current).map_err(|e| match e {
            MoveFailure::Position => ParseError::InvalidPosition {
                line,
                path: m.position.to_string(),
                word: before.clone(),
            },
            MoveFailure::Shape => ParseError::MoveMismatch {
                line,
                mv: m.to_string(),
                word: before.clone(),
            },
        })?;
        moves.push(m);
    }
    let source = source.ok_or(ParseError::MissingSource)?;
    Ok(FormalComposite::new(source, moves))
}

/// Script text that [`parse_composite`] reads back to `c`.
pub fn print_composite(c: &FormalComposite) -> String {
    let mut out = format!("source: {}\n", c.source);
    for m in &c.moves {
        out.push_str(&m.to_string());
        out.push('\n');
    }
    out
}
