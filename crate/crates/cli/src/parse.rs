//! Text grammar for fields, field elements, forms, vectors and involutions.
//!
//! ```text
//! field   := gf2 | gf4 | gf8 | gf16 | gf<2^m>:<modulus> | gf:<modulus> | f2t
//! elt     := sum ("/" sum)?
//! sum     := prod ("+" prod)*
//! prod    := atom ("*" atom)*
//! atom    := "(" sum ")" | "t" ("^" int)? | int        int = polynomial bit-code
//! form    := "" | term (("⊥" | "_|_") term)*
//! term    := "[" elt "," elt "]" | "<" elt ("," elt)* ">"
//! vector  := "0" | vterm ("+" vterm)*
//! vterm   := (atom "*")? ("x" | "y" | "e") int           1-based
//! map     := factor ("*" factor)*
//! factor  := "id" | "tau(" vector ")" | "null(" int "," int ")"
//!          | "radswap(" int "," int ")" | "[" elt ("," | ";" elt)* "]"
//! ```
//!
//! Basis order of a parsed form: x1, y1, x2, y2, ... for the pairs in the
//! order written, then e1, e2, ... for the diagonal entries.

use std::fmt;

use orthinv::linalg::{unit, vec_add, vec_scale, Mat, Vector};
use orthinv::orthogroup::{basic_null, basic_radical, orthogonal_transvection};
use orthinv::{FieldElement, FieldSpec, QuadForm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

pub type PResult<T> = Result<T, ParseError>;

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(s: &str) -> Cursor {
        Cursor { chars: s.chars().collect(), pos: 0 }
    }

    fn err_at<T>(&self, pos: usize, msg: impl Into<String>) -> PResult<T> {
        let (mut line, mut column) = (1, 1);
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Err(ParseError { line, column, message: msg.into() })
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        self.err_at(self.pos, msg)
    }

    fn ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.ws();
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            match self.peek() {
                Some(c) => self.err(format!("expected '{s}', found '{c}'")),
                None => self.err(format!("expected '{s}', found end of input")),
            }
        }
    }

    fn int(&mut self) -> PResult<u64> {
        self.ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().or_else(|_| self.err_at(start, "integer out of range"))
    }

    fn done(&mut self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected '{c}'")),
        }
    }
}

fn lift<T>(c: &Cursor, pos: usize, r: Result<T, impl fmt::Display>) -> PResult<T> {
    r.or_else(|e| c.err_at(pos, e.to_string()))
}

pub fn parse_field(s: &str) -> PResult<FieldSpec> {
    let mut c = Cursor::new(s);
    let spec = if c.eat("f2t") {
        FieldSpec::ratfunc()
    } else if c.eat("gf") {
        let size = if c.peek() == Some(':') { None } else { Some(c.int()?) };
        if c.eat(":") {
            let at = c.pos;
            let modulus = modulus_literal(&mut c)?;
            let m = 31 - modulus.leading_zeros();
            if let Some(size) = size {
                if size != 1u64 << m {
                    return c.err_at(at, format!("modulus has degree {m}, field gf{size} needs degree {}", size.trailing_zeros()));
                }
            }
            lift(&c, at, FieldSpec::binary_ext(m, modulus))?
        } else {
            match size {
                Some(2) => FieldSpec::gf2(),
                Some(4) => FieldSpec::gf4(),
                Some(8) => FieldSpec::gf8(),
                Some(16) => FieldSpec::gf16(),
                _ => return c.err("unknown field; give a modulus as gf<size>:<poly>"),
            }
        }
    } else {
        return c.err("expected gf2, gf4, gf8, gf16, gf<size>:<modulus>, gf:<modulus> or f2t");
    };
    c.done()?;
    Ok(spec)
}

/// Polynomial over GF(2) as a bit-code, either an integer or a sum of t-powers.
fn modulus_literal(c: &mut Cursor) -> PResult<u32> {
    if c.peek().is_some_and(|ch| ch.is_ascii_digit()) && !matches!(c.chars.get(c.pos + 1), Some('+')) {
        let at = c.pos;
        let v = c.int()?;
        return u32::try_from(v).or_else(|_| c.err_at(at, "modulus too large"));
    }
    let mut code = 0u32;
    loop {
        let at = c.pos;
        let bit = if c.eat("t") {
            if c.eat("^") {
                c.int()?
            } else {
                1
            }
        } else if c.eat("1") {
            0
        } else {
            return c.err("expected a term of the modulus");
        };
        if bit > 16 {
            return c.err_at(at, "modulus degree above 16");
        }
        code ^= 1 << bit;
        if !c.eat("+") {
            return Ok(code);
        }
    }
}

fn elt(c: &mut Cursor, spec: FieldSpec) -> PResult<FieldElement> {
    let num = sum(c, spec)?;
    if c.eat("/") {
        let at = c.pos;
        let den = sum(c, spec)?;
        return lift(c, at, num.checked_div(&den));
    }
    Ok(num)
}

fn sum(c: &mut Cursor, spec: FieldSpec) -> PResult<FieldElement> {
    let mut acc = prod(c, spec)?;
    while c.eat("+") {
        let at = c.pos;
        let x = prod(c, spec)?;
        acc = lift(c, at, acc.checked_add(&x))?;
    }
    Ok(acc)
}

fn prod(c: &mut Cursor, spec: FieldSpec) -> PResult<FieldElement> {
    let mut acc = atom(c, spec)?;
    while c.eat("*") {
        let at = c.pos;
        let x = atom(c, spec)?;
        acc = lift(c, at, acc.checked_mul(&x))?;
    }
    Ok(acc)
}

fn atom(c: &mut Cursor, spec: FieldSpec) -> PResult<FieldElement> {
    if c.eat("(") {
        let v = sum(c, spec)?;
        c.expect(")")?;
        return Ok(v);
    }
    let at = c.pos;
    if c.eat("t") {
        let e = if c.eat("^") { c.int()? } else { 1 };
        let mut acc = spec.one();
        let t = spec.t();
        for _ in 0..e {
            acc = lift(c, at, acc.checked_mul(&t))?;
        }
        return Ok(acc);
    }
    if c.peek().is_some_and(|ch| ch.is_ascii_digit()) {
        let v = c.int()?;
        if let Some(order) = spec.order() {
            if v >= order {
                return c.err_at(at, format!("code {v} is not an element of {spec}"));
            }
        } else if v >= 1 << 63 {
            return c.err_at(at, "code too large");
        }
        return Ok(spec.from_code(v));
    }
    match c.peek() {
        Some(ch) => c.err(format!("expected a field element, found '{ch}'")),
        None => c.err("expected a field element, found end of input"),
    }
}

pub fn parse_element(spec: FieldSpec, s: &str) -> PResult<FieldElement> {
    let mut c = Cursor::new(s);
    let v = elt(&mut c, spec)?;
    c.done()?;
    Ok(v)
}

pub fn parse_form(spec: FieldSpec, s: &str) -> PResult<QuadForm> {
    let mut c = Cursor::new(s);
    let mut pairs = Vec::new();
    let mut diag = Vec::new();
    if c.peek().is_none() {
        return Ok(QuadForm::empty(spec));
    }
    loop {
        if c.eat("[") {
            let a = elt(&mut c, spec)?;
            c.expect(",")?;
            let b = elt(&mut c, spec)?;
            c.expect("]")?;
            pairs.push((a, b));
        } else if c.eat("<") {
            loop {
                diag.push(elt(&mut c, spec)?);
                if !c.eat(",") {
                    break;
                }
            }
            c.expect(">")?;
        } else {
            return c.err("expected '[' or '<'");
        }
        if !(c.eat("⊥") || c.eat("_|_")) {
            break;
        }
    }
    c.done()?;
    Ok(QuadForm::from_signature(spec, &pairs, &diag))
}

/// Number of hyperbolic-style pairs in the parsed basis: the form produced by
/// `parse_form` has coordinates x_i = 2i-2, y_i = 2i-1, then e_j.
fn pair_count(q: &QuadForm) -> usize {
    match q.signature() {
        Some(sig) => sig.pairs.len(),
        None => 0,
    }
}

fn basis_index(c: &Cursor, q: &QuadForm, name: char, i: u64, at: usize) -> PResult<usize> {
    let r = pair_count(q);
    let s = q.dim() - 2 * r;
    let i = i as usize;
    let (ok, idx) = match name {
        'x' => (i >= 1 && i <= r, 2 * i.saturating_sub(1)),
        'y' => (i >= 1 && i <= r, 2 * i.saturating_sub(1) + 1),
        _ => (i >= 1 && i <= s, 2 * r + i.saturating_sub(1)),
    };
    if ok {
        Ok(idx)
    } else {
        c.err_at(at, format!("no basis vector {name}{i} in a form with {r} pairs and {s} diagonal entries"))
    }
}

fn vector(c: &mut Cursor, q: &QuadForm) -> PResult<Vector> {
    let spec = q.spec();
    let n = q.dim();
    let mut v = vec![spec.zero(); n];
    if c.eat("0") {
        return Ok(v);
    }
    loop {
        let at = c.pos;
        let coef = match c.peek() {
            Some('x' | 'y' | 'e') => spec.one(),
            _ => {
                let a = atom(c, spec)?;
                c.expect("*")?;
                a
            }
        };
        let name_at = c.pos;
        let name = match c.peek() {
            Some(ch @ ('x' | 'y' | 'e')) => {
                c.pos += 1;
                ch
            }
            _ => return c.err("expected a basis vector x<i>, y<i> or e<i>"),
        };
        let i = c.int()?;
        let idx = basis_index(c, q, name, i, name_at)?;
        let _ = at;
        v = vec_add(&v, &vec_scale(coef, &unit(spec, n, idx)));
        if !c.eat("+") {
            return Ok(v);
        }
    }
}

pub fn parse_vector(q: &QuadForm, s: &str) -> PResult<Vector> {
    let mut c = Cursor::new(s);
    let v = vector(&mut c, q)?;
    c.done()?;
    Ok(v)
}

fn factor(c: &mut Cursor, q: &QuadForm) -> PResult<Mat> {
    let spec = q.spec();
    let n = q.dim();
    let at = c.pos;
    if c.eat("tau(") {
        let w = vector(c, q)?;
        c.expect(")")?;
        return lift(c, at, orthogonal_transvection(q, &w)).map(|t| t.matrix().clone());
    }
    if c.eat("null(") {
        let i = c.int()?;
        c.expect(",")?;
        let j = c.int()?;
        c.expect(")")?;
        let p = |k: u64, name| basis_index(c, q, name, k, at).map(|idx| unit(spec, n, idx));
        let b = [p(i, 'x')?, p(i, 'y')?, p(j, 'x')?, p(j, 'y')?];
        return lift(c, at, basic_null(q, &b)).map(|t| t.matrix().clone());
    }
    if c.eat("radswap(") {
        let i = c.int()?;
        c.expect(",")?;
        let j = c.int()?;
        c.expect(")")?;
        let g = basis_index(c, q, 'e', i, at)?;
        let g2 = basis_index(c, q, 'e', j, at)?;
        return lift(c, at, basic_radical(q, &unit(spec, n, g), &unit(spec, n, g2))).map(|t| t.matrix().clone());
    }
    if c.eat("id") {
        return Ok(Mat::identity(spec, n));
    }
    if c.eat("[") {
        let mut entries = Vec::new();
        loop {
            entries.push(elt(c, spec)?);
            if !(c.eat(",") || c.eat(";")) {
                break;
            }
        }
        c.expect("]")?;
        if entries.len() != n * n {
            return c.err_at(at, format!("matrix literal has {} entries, expected {}", entries.len(), n * n));
        }
        let rows: Vec<Vector> = entries.chunks(n.max(1)).map(|r| r.to_vec()).collect();
        return Ok(if n == 0 { Mat::zeros(spec, 0, 0) } else { Mat::from_rows(spec, &rows) });
    }
    c.err("expected id, tau(..), null(i,j), radswap(i,j) or a matrix literal")
}

/// A matrix on the form's space: a product of constructors or a row-major literal.
pub fn parse_map(q: &QuadForm, s: &str) -> PResult<Mat> {
    let mut c = Cursor::new(s);
    let mut m = factor(&mut c, q)?;
    while c.eat("*") {
        let f = factor(&mut c, q)?;
        m = m.mul(&f);
    }
    c.done()?;
    Ok(m)
}
