//! Text form of polynomial matrices.
//!
//! ```text
//! matrix = '[' row (';' row)* ']'
//! row    = expr (',' expr)*
//! expr   = ['+'|'-'] term (('+'|'-') term)*
//! term   = power (('*'|'/') power)*
//! power  = atom ('^' integer)?
//! atom   = number | name | 'i' | '(' expr ')' | '-' atom
//! ```
//!
//! Division is only by nonzero constants. Names map to `x_1..x_p` in
//! declaration order; `i` is the imaginary unit when the field is ℚ(i).

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::jets::{MatrixJet, MultiIndex, SeriesJet};
use crate::scalars::{Field, Scalar};

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 4096;

#[derive(Clone, Debug)]
pub struct ParseOptions {
    pub vars: Vec<String>,
    pub truncation: u32,
    pub field: Field,
}

impl ParseOptions {
    pub fn new(vars: Vec<String>, truncation: u32, field: Field) -> Result<Self> {
        for (k, v) in vars.iter().enumerate() {
            if !is_name(v) {
                return Err(Error::InvalidInput(format!("'{v}' is not a valid variable name")));
            }
            if vars[..k].contains(v) {
                return Err(Error::InvalidInput(format!("variable '{v}' is declared twice")));
            }
            if field == Field::Gaussian && v == "i" {
                return Err(Error::InvalidInput("'i' is the imaginary unit over the Gaussian rationals".into()));
            }
        }
        if vars.is_empty() {
            return Err(Error::InvalidInput("at least one variable is required".into()));
        }
        Ok(ParseOptions { vars, truncation, field })
    }
}

fn is_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug)]
pub struct Parsed {
    pub matrix: MatrixJet,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.bump(c);
        }
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    /// Next token and where it starts.
    fn next(&mut self) -> Result<(Tok, usize, usize)> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        let rest = &self.src[self.pos..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, line, col));
        };
        if c.is_ascii_digit() {
            let len = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
            let n: BigInt = rest[..len].parse().expect("digits");
            (0..len).for_each(|_| self.bump('0'));
            return Ok((Tok::Num(n), line, col));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest.find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_')).unwrap_or(rest.len());
            let name = rest[..len].to_string();
            (0..len).for_each(|_| self.bump('a'));
            return Ok((Tok::Name(name), line, col));
        }
        if "[],;+-*/^()".contains(c) {
            self.bump(c);
            return Ok((Tok::Sym(c), line, col));
        }
        Err(Error::Parse { line, col, message: format!("unexpected character '{c}'") })
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    line: usize,
    col: usize,
    opts: &'a ParseOptions,
    dropped: bool,
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<()> {
        let (t, l, c) = self.lex.next()?;
        self.tok = t;
        self.line = l;
        self.col = c;
        Ok(())
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.line, col: self.col, message: message.into() })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.tok == Tok::Sym(c) {
            self.advance()
        } else {
            self.err(format!("expected '{c}', found {}", describe(&self.tok)))
        }
    }

    fn p(&self) -> usize {
        self.opts.vars.len()
    }

    fn n(&self) -> u32 {
        self.opts.truncation
    }

    fn constant(&self, s: Scalar) -> SeriesJet {
        SeriesJet::constant(self.p(), self.n(), s)
    }

    fn matrix(&mut self) -> Result<MatrixJet> {
        self.expect('[')?;
        let mut rows: Vec<Vec<SeriesJet>> = Vec::new();
        let (row_line, row_col) = (self.line, self.col);
        loop {
            let mut row = vec![self.expr()?];
            while self.tok == Tok::Sym(',') {
                self.advance()?;
                row.push(self.expr()?);
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::Parse {
                        line: self.line,
                        col: self.col,
                        message: format!("row {} has {} entries, expected {}", rows.len() + 1, row.len(), first.len()),
                    });
                }
            }
            rows.push(row);
            if self.tok == Tok::Sym(';') {
                self.advance()?;
                continue;
            }
            break;
        }
        self.expect(']')?;
        if self.tok != Tok::End {
            return self.err(format!("unexpected {} after the matrix", describe(&self.tok)));
        }
        let (r, c) = (rows.len(), rows[0].len());
        MatrixJet::from_entries(r, c, rows.into_iter().flatten().collect()).map_err(|e| Error::Parse {
            line: row_line,
            col: row_col,
            message: e.to_string(),
        })
    }

    fn expr(&mut self) -> Result<SeriesJet> {
        let mut acc = SeriesJet::zero(self.p(), self.n());
        let mut sign = match self.tok {
            Tok::Sym('-') => {
                self.advance()?;
                -1
            }
            Tok::Sym('+') => {
                self.advance()?;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&t)? } else { acc.add(&t)? };
            match self.tok {
                Tok::Sym('+') => sign = 1,
                Tok::Sym('-') => sign = -1,
                _ => return Ok(acc),
            }
            self.advance()?;
        }
    }

    fn term(&mut self) -> Result<SeriesJet> {
        let mut acc = self.power()?;
        loop {
            match self.tok {
                Tok::Sym('*') => {
                    self.advance()?;
                    let rhs = self.power()?;
                    acc = self.mul(&acc, &rhs)?;
                }
                Tok::Sym('/') => {
                    self.advance()?;
                    let (line, col) = (self.line, self.col);
                    let rhs = self.power()?;
                    let divisor = rhs
                        .terms()
                        .iter()
                        .all(|(k, _)| k.degree() == 0)
                        .then(|| rhs.coefficient(&MultiIndex::zero(self.p())))
                        .and_then(|c| c.inv());
                    match divisor {
                        Some(inv) => acc = acc.scale(&inv),
                        None => {
                            return Err(Error::Parse { line, col, message: "division by zero or by a non-constant".into() })
                        }
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn mul(&mut self, a: &SeriesJet, b: &SeriesJet) -> Result<SeriesJet> {
        let (da, db) = (a.degree(), b.degree());
        if let (Some(da), Some(db)) = (da, db) {
            if da + db > self.n() {
                self.dropped = true;
            }
        }
        a.mul(b)
    }

    fn power(&mut self) -> Result<SeriesJet> {
        let base = self.atom()?;
        if self.tok != Tok::Sym('^') {
            return Ok(base);
        }
        self.advance()?;
        let e = match &self.tok {
            Tok::Num(n) => match u32::try_from(n) {
                Ok(e) if e <= MAX_EXPONENT => e,
                _ => return self.err(format!("exponent overflow: exponents are limited to {MAX_EXPONENT}")),
            },
            t => return self.err(format!("expected a nonnegative integer exponent, found {}", describe(t))),
        };
        self.advance()?;
        let mut out = self.constant(Scalar::from_int(1));
        for _ in 0..e {
            out = self.mul(&out, &base)?;
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<SeriesJet> {
        match self.tok.clone() {
            Tok::Num(n) => {
                self.advance()?;
                Ok(self.constant(Scalar::real(BigRational::from_integer(n))))
            }
            Tok::Name(name) => {
                if let Some(k) = self.opts.vars.iter().position(|v| *v == name) {
                    self.advance()?;
                    if self.n() == 0 {
                        self.dropped = true;
                    }
                    return Ok(SeriesJet::variable(self.p(), self.n(), k));
                }
                if name == "i" {
                    if self.opts.field == Field::Gaussian {
                        self.advance()?;
                        return Ok(self.constant(Scalar::i()));
                    }
                    return self.err("the imaginary unit 'i' needs the Gaussian field (--field gaussian)");
                }
                self.err(format!("unknown variable '{name}' (declared: {})", self.opts.vars.join(", ")))
            }
            Tok::Sym('(') => {
                self.advance()?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym('-') => {
                self.advance()?;
                Ok(self.atom()?.neg())
            }
            t => self.err(format!("expected a number, variable or '(', found {}", describe(&t))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::Name(s) => format!("name '{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

/// Parses `[e11, e12; e21, e22]`, dropping terms above the truncation with a
/// warning.
pub fn parse_poly_matrix(text: &str, opts: &ParseOptions) -> Result<Parsed> {
    let mut p = Parser {
        lex: Lexer { src: text, pos: 0, line: 1, col: 1 },
        tok: Tok::End,
        line: 1,
        col: 1,
        opts,
        dropped: false,
    };
    p.advance()?;
    let matrix = p.matrix()?;
    let mut warnings = Vec::new();
    if p.dropped {
        warnings.push(format!("terms of degree above {} were dropped", opts.truncation));
    }
    Ok(Parsed { matrix, warnings })
}

/// Canonical text form; [`parse_poly_matrix`] reads it back exactly.
pub fn print_poly_matrix(a: &MatrixJet, vars: &[String]) -> String {
    a.to_text(vars)
}

/// Whether every coefficient lies in `field`.
pub fn check_field(a: &MatrixJet, field: Field) -> Result<()> {
    let bad = a.entries().iter().flat_map(|e| e.terms().values()).find(|c| !field.contains(c));
    match bad {
        Some(c) => Err(Error::InvalidInput(format!("coefficient {c} is not in the {} field", field.as_str()))),
        None => Ok(()),
    }
}
