//! A tiny term language for writing lattice polynomials.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//!     expr := term ("\/" term)*
//!     term := atom ("/\" atom)*
//!     atom := x<digits> | '<name>' | med(expr, expr, expr) | (expr)
//! ```
//!
//! `/\` binds tighter than `\/`. Variables are 1-indexed (`x1`, `x2`, ...)
//! and must stay within the declared arity. Constants name lattice elements
//! in single quotes. `med` is the ternary median.

use std::fmt;

use thiserror::Error;

use crate::lattice::{Element, Lattice};
use crate::poly::{PolyError, PolynomialFn, MAX_ARITY};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermExpr {
    /// 1-indexed variable.
    Var(usize),
    /// A named constant, resolved against the lattice at parse time.
    Const(Element),
    Meet(Box<TermExpr>, Box<TermExpr>),
    Join(Box<TermExpr>, Box<TermExpr>),
    Med(Box<TermExpr>, Box<TermExpr>, Box<TermExpr>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("byte {0}: expected a variable, constant, `med(`, or `(`")]
    ExpectedAtom(usize),
    #[error("byte {0}: expected `{1}`")]
    ExpectedToken(usize, &'static str),
    #[error("byte {0}: unterminated constant, missing closing `'`")]
    UnterminatedConst(usize),
    #[error("byte {0}: unknown element `{1}`")]
    UnknownElement(usize, String),
    #[error("byte {0}: variable x{1} is out of range for arity {2}")]
    VariableOutOfRange(usize, usize, usize),
    #[error("byte {0}: trailing input after expression")]
    TrailingInput(usize),
    #[error("arity {0} is out of range (1..={MAX_ARITY})")]
    ArityOutOfRange(usize),
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    lattice: &'a Lattice,
    arity: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: &'static str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(ParseError::ExpectedToken(self.pos, token))
        }
    }

    fn peek_is(&mut self, token: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(token)
    }

    fn expr(&mut self) -> Result<TermExpr, ParseError> {
        let mut acc = self.term()?;
        while self.peek_is("\\/") {
            self.pos += 2;
            let rhs = self.term()?;
            acc = TermExpr::Join(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<TermExpr, ParseError> {
        let mut acc = self.atom()?;
        while self.peek_is("/\\") {
            self.pos += 2;
            let rhs = self.atom()?;
            acc = TermExpr::Meet(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<TermExpr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&b) = self.bytes.get(self.pos) else {
            return Err(ParseError::ExpectedAtom(start));
        };
        match b {
            b'(' => {
                self.pos += 1;
                let inner = self.expr()?;
                self.eat(")")?;
                Ok(inner)
            }
            b'\'' => {
                self.pos += 1;
                let name_start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\'' {
                    self.pos += 1;
                }
                if self.pos == self.bytes.len() {
                    return Err(ParseError::UnterminatedConst(start));
                }
                let name = &self.src[name_start..self.pos];
                self.pos += 1;
                match self.lattice.by_name(name) {
                    Some(e) => Ok(TermExpr::Const(e)),
                    None => Err(ParseError::UnknownElement(start, name.to_string())),
                }
            }
            b'm' if self.src[self.pos..].starts_with("med") => {
                self.pos += 3;
                self.eat("(")?;
                let a = self.expr()?;
                self.eat(",")?;
                let b = self.expr()?;
                self.eat(",")?;
                let c = self.expr()?;
                self.eat(")")?;
                Ok(TermExpr::Med(Box::new(a), Box::new(b), Box::new(c)))
            }
            b'x' => {
                self.pos += 1;
                let digits_start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.pos == digits_start {
                    return Err(ParseError::ExpectedAtom(start));
                }
                let index: usize = self.src[digits_start..self.pos]
                    .parse()
                    .map_err(|_| ParseError::ExpectedAtom(start))?;
                if index == 0 || index > self.arity {
                    return Err(ParseError::VariableOutOfRange(start, index, self.arity));
                }
                Ok(TermExpr::Var(index))
            }
            _ => Err(ParseError::ExpectedAtom(start)),
        }
    }
}

impl TermExpr {
    /// Parses an expression against a lattice (for constants) and a declared
    /// arity (for variable bounds).
    pub fn parse(src: &str, lattice: &Lattice, arity: usize) -> Result<TermExpr, ParseError> {
        if !(1..=MAX_ARITY).contains(&arity) {
            return Err(ParseError::ArityOutOfRange(arity));
        }
        let mut p = Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            lattice,
            arity,
        };
        let expr = p.expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(ParseError::TrailingInput(p.pos));
        }
        Ok(expr)
    }

    pub fn eval(&self, lattice: &Lattice, args: &[Element]) -> Result<Element, PolyError> {
        for &a in args {
            if !lattice.owns(a) {
                return Err(PolyError::ForeignElement);
            }
        }
        self.eval_unchecked(lattice, args)
    }

    fn eval_unchecked(&self, l: &Lattice, args: &[Element]) -> Result<Element, PolyError> {
        Ok(match self {
            TermExpr::Var(i) => {
                if *i > args.len() {
                    return Err(PolyError::ArityMismatch {
                        expected: *i,
                        got: args.len(),
                    });
                }
                args[*i - 1]
            }
            TermExpr::Const(e) => {
                if !l.owns(*e) {
                    return Err(PolyError::ForeignElement);
                }
                *e
            }
            TermExpr::Meet(a, b) => l.meet(a.eval_unchecked(l, args)?, b.eval_unchecked(l, args)?),
            TermExpr::Join(a, b) => l.join(a.eval_unchecked(l, args)?, b.eval_unchecked(l, args)?),
            TermExpr::Med(a, b, c) => l.med(
                a.eval_unchecked(l, args)?,
                b.eval_unchecked(l, args)?,
                c.eval_unchecked(l, args)?,
            ),
        })
    }

    /// Lowers the expression to a polynomial in canonical form by evaluating
    /// it on all characteristic vectors; sound because meet, join, and med
    /// are themselves polynomial operations.
    pub fn lower(&self, lattice: &Lattice, arity: usize) -> Result<PolynomialFn, PolyError> {
        if !(1..=MAX_ARITY).contains(&arity) {
            return Err(PolyError::ArityOutOfRange(arity));
        }
        let (bottom, top) = (lattice.bottom(), lattice.top());
        let mut alpha = Vec::with_capacity(1 << arity);
        let mut vec_buf = vec![bottom; arity];
        for mask in 0..1usize << arity {
            for (i, v) in vec_buf.iter_mut().enumerate() {
                *v = if mask >> i & 1 == 1 { top } else { bottom };
            }
            alpha.push(self.eval(lattice, &vec_buf)?);
        }
        Ok(PolynomialFn::new(lattice, arity, &alpha)?.canonical())
    }

    /// Largest variable index mentioned, 0 if none.
    pub fn max_var(&self) -> usize {
        match self {
            TermExpr::Var(i) => *i,
            TermExpr::Const(_) => 0,
            TermExpr::Meet(a, b) | TermExpr::Join(a, b) => a.max_var().max(b.max_var()),
            TermExpr::Med(a, b, c) => a.max_var().max(b.max_var()).max(c.max_var()),
        }
    }

    /// Renders with minimal parentheses: a join nested under a meet is the
    /// only position that needs them.
    pub fn pretty(&self, lattice: &Lattice) -> String {
        let mut out = String::new();
        self.render(lattice, false, &mut out);
        out
    }

    fn render(&self, l: &Lattice, under_meet: bool, out: &mut String) {
        match self {
            TermExpr::Var(i) => {
                out.push('x');
                out.push_str(&i.to_string());
            }
            TermExpr::Const(e) => {
                out.push('\'');
                out.push_str(l.name(*e));
                out.push('\'');
            }
            TermExpr::Meet(a, b) => {
                a.render(l, true, out);
                out.push_str(" /\\ ");
                b.render(l, true, out);
            }
            TermExpr::Join(a, b) => {
                if under_meet {
                    out.push('(');
                }
                a.render(l, false, out);
                out.push_str(" \\/ ");
                b.render(l, false, out);
                if under_meet {
                    out.push(')');
                }
            }
            TermExpr::Med(a, b, c) => {
                out.push_str("med(");
                a.render(l, false, out);
                out.push_str(", ");
                b.render(l, false, out);
                out.push_str(", ");
                c.render(l, false, out);
                out.push(')');
            }
        }
    }
}

impl fmt::Display for ParseErrorWithSource<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.error)?;
        writeln!(f, "  {}", self.src)?;
        let pos = self.error.position().unwrap_or(0);
        write!(f, "  {}^", " ".repeat(pos))
    }
}

/// Pairs a parse error with its source line for caret-style rendering.
pub struct ParseErrorWithSource<'a> {
    pub src: &'a str,
    pub error: ParseError,
}

impl ParseError {
    /// Byte offset the error points at, if positional.
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::ExpectedAtom(p)
            | ParseError::ExpectedToken(p, _)
            | ParseError::UnterminatedConst(p)
            | ParseError::UnknownElement(p, _)
            | ParseError::VariableOutOfRange(p, _, _)
            | ParseError::TrailingInput(p) => Some(*p),
            ParseError::ArityOutOfRange(_) => None,
        }
    }
}
