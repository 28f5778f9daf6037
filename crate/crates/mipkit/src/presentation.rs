//! Finite group presentations: parsing, canonical rendering, and parameter
//! substitution for presentation templates.
//!
//! Grammar (whitespace insignificant, identifiers `[a-z][a-z0-9]*`):
//!
//! ```text
//! presentation := "<" genlist "|" relation ("," relation)* ">"
//! genlist      := ident ("," ident)*
//! relation     := word ("=" word)?          // bare relator w means w = 1
//! word         := "1" | factor ("*" factor)*
//! factor       := ident ("^" ("-"? digits | "(" "-"? digits ")"))?
//! ```

use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorId(pub usize);

impl GeneratorId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: GeneratorId,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub gen: GeneratorId,
    pub exp: i64,
}

/// A word in the generators, kept in normal form: adjacent syllables on the
/// same generator are merged and zero exponents dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn new(raw: Vec<Syllable>) -> Self {
        let mut syllables: Vec<Syllable> = Vec::with_capacity(raw.len());
        for s in raw {
            if s.exp == 0 {
                continue;
            }
            match syllables.last_mut() {
                Some(last) if last.gen == s.gen => {
                    last.exp += s.exp;
                    if last.exp == 0 {
                        syllables.pop();
                    }
                }
                _ => syllables.push(s),
            }
        }
        // Merging can create new adjacencies only when a syllable cancels to
        // zero, which pop() handles; a second pass is still cheapest to argue.
        let merged = Word { syllables };
        if merged.has_adjacent_duplicates() {
            let inner = merged.syllables;
            Word::new(inner)
        } else {
            merged
        }
    }

    fn has_adjacent_duplicates(&self) -> bool {
        self.syllables.windows(2).any(|w| w[0].gen == w[1].gen)
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable { gen: s.gen, exp: -s.exp })
                .collect(),
        }
    }

    /// Concatenation lhs * rhs, renormalized.
    pub fn concat(&self, rhs: &Word) -> Word {
        let mut v = self.syllables.clone();
        v.extend_from_slice(&rhs.syllables);
        Word::new(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
}

impl Relation {
    /// The relator lhs * rhs^-1 (trivial in the presented group).
    pub fn relator(&self) -> Word {
        self.lhs.concat(&self.rhs.inverse())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<Generator>,
    relations: Vec<Relation>,
}

impl Presentation {
    /// Relations are stored sorted, so structurally equal presentations
    /// compare equal regardless of the order they were written in.
    pub fn new(names: Vec<String>, mut relations: Vec<Relation>) -> Result<Self, ParseError> {
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ParseError::DuplicateGenerator { name: n.clone() });
            }
        }
        let generators = names
            .into_iter()
            .enumerate()
            .map(|(i, name)| Generator { id: GeneratorId(i), name })
            .collect();
        relations.sort();
        relations.dedup();
        Ok(Presentation { generators, relations })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: u32, col: u32, msg: String },
    #[error("unknown generator `{name}` at {line}:{col}")]
    UnknownGenerator { name: String, line: u32, col: u32 },
    #[error("zero exponent at {line}:{col}")]
    ZeroExponent { line: u32, col: u32 },
    #[error("exponent out of range at {line}:{col}")]
    ExponentOutOfRange { line: u32, col: u32 },
    #[error("duplicate generator `{name}`")]
    DuplicateGenerator { name: String },
}

/// Largest exponent magnitude the parser accepts. Far beyond any realizable
/// group order, and small enough that merging parsed syllables cannot
/// overflow i64 for any input that fits in memory.
pub const MAX_PARSED_EXPONENT: u64 = 1 << 32;

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.src.get(self.pos) {
            if c == b'\n' {
                self.line += 1;
                self.col = 1;
                self.pos += 1;
            } else if c.is_ascii_whitespace() {
                self.col += 1;
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
            self.col += 1;
        }
        c
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(got) if got == c => {
                self.bump();
                Ok(())
            }
            Some(got) => Err(self.err(format!("expected `{}`, found `{}`", c as char, got as char))),
            None => Err(self.err(format!("expected `{}`, found end of input", c as char))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {
                let mut s = String::new();
                s.push(self.bump().unwrap() as char);
                while let Some(&c) = self.src.get(self.pos) {
                    if c.is_ascii_lowercase() || c.is_ascii_digit() {
                        s.push(c as char);
                        self.pos += 1;
                        self.col += 1;
                    } else {
                        break;
                    }
                }
                Ok(s)
            }
            Some(c) => Err(self.err(format!("expected identifier, found `{}`", c as char))),
            None => Err(self.err("expected identifier, found end of input")),
        }
    }

    fn digits(&mut self) -> Result<i64, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let mut v: i64 = 0;
                while let Some(&c) = self.src.get(self.pos) {
                    if c.is_ascii_digit() {
                        v = v
                            .checked_mul(10)
                            .and_then(|v| v.checked_add((c - b'0') as i64))
                            .ok_or_else(|| self.err("integer literal overflows"))?;
                        self.pos += 1;
                        self.col += 1;
                    } else {
                        break;
                    }
                }
                Ok(v)
            }
            _ => Err(self.err("expected digits")),
        }
    }
}

struct Parser<'a> {
    sc: Scanner<'a>,
    names: Vec<String>,
}

impl<'a> Parser<'a> {
    fn lookup(&mut self) -> Result<GeneratorId, ParseError> {
        let (line, col) = (self.sc.line, self.sc.col);
        let name = self.sc.ident()?;
        match self.names.iter().position(|n| *n == name) {
            Some(i) => Ok(GeneratorId(i)),
            None => Err(ParseError::UnknownGenerator { name, line, col }),
        }
    }

    fn factor(&mut self) -> Result<Syllable, ParseError> {
        let gen = self.lookup()?;
        let mut exp = 1i64;
        if self.sc.peek() == Some(b'^') {
            self.sc.bump();
            let (line, col) = {
                self.sc.skip_ws();
                (self.sc.line, self.sc.col)
            };
            exp = self.exponent()?;
            if exp == 0 {
                return Err(ParseError::ZeroExponent { line, col });
            }
            if exp.unsigned_abs() > MAX_PARSED_EXPONENT {
                return Err(ParseError::ExponentOutOfRange { line, col });
            }
        }
        Ok(Syllable { gen, exp })
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        match self.sc.peek() {
            Some(b'(') => {
                self.sc.bump();
                let v = self.signed_digits()?;
                self.sc.expect(b')')?;
                Ok(v)
            }
            _ => self.signed_digits(),
        }
    }

    fn signed_digits(&mut self) -> Result<i64, ParseError> {
        let neg = self.sc.peek() == Some(b'-');
        if neg {
            self.sc.bump();
        }
        let v = self.sc.digits()?;
        Ok(if neg { -v } else { v })
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        let (line, col) = {
            self.sc.skip_ws();
            (self.sc.line, self.sc.col)
        };
        if let Some(c) = self.sc.peek() {
            if c.is_ascii_digit() {
                let v = self.sc.digits()?;
                if v != 1 {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        msg: format!("expected the identity word `1`, found `{v}`"),
                    });
                }
                return Ok(Word::identity());
            }
        }
        let mut syllables = vec![self.factor()?];
        while self.sc.peek() == Some(b'*') {
            self.sc.bump();
            syllables.push(self.factor()?);
        }
        let w = Word::new(syllables);
        // Merging `a^k*a^k` can push past the per-factor cap; keep the bound
        // so parsed words always render back to parseable text.
        if w.syllables().iter().any(|s| s.exp.unsigned_abs() > MAX_PARSED_EXPONENT) {
            return Err(ParseError::ExponentOutOfRange { line, col });
        }
        Ok(w)
    }

    fn relation(&mut self) -> Result<Relation, ParseError> {
        let lhs = self.word()?;
        let rhs = if self.sc.peek() == Some(b'=') {
            self.sc.bump();
            self.word()?
        } else {
            Word::identity()
        };
        Ok(Relation { lhs, rhs })
    }
}

pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut p = Parser { sc: Scanner::new(text), names: Vec::new() };
    p.sc.expect(b'<')?;
    loop {
        p.names.push(p.sc.ident()?);
        match p.sc.peek() {
            Some(b',') => {
                p.sc.bump();
            }
            _ => break,
        }
    }
    p.sc.expect(b'|')?;
    let mut relations = vec![p.relation()?];
    while p.sc.peek() == Some(b',') {
        p.sc.bump();
        relations.push(p.relation()?);
    }
    p.sc.expect(b'>')?;
    if let Some(c) = p.sc.peek() {
        return Err(p.sc.err(format!("trailing input after `>`: `{}`", c as char)));
    }
    Presentation::new(p.names, relations)
}

/// Parses a standalone word (`a^2*b`, `1`) against the generators of `p`.
pub fn parse_word(text: &str, p: &Presentation) -> Result<Word, ParseError> {
    let names = p.generators().iter().map(|g| g.name.clone()).collect();
    let mut parser = Parser { sc: Scanner::new(text), names };
    let w = parser.word()?;
    if let Some(c) = parser.sc.peek() {
        return Err(parser.sc.err(format!("trailing input after word: `{}`", c as char)));
    }
    Ok(w)
}

pub fn render_word(p: &Presentation, w: &Word) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    w.syllables()
        .iter()
        .map(|s| format!("{}^{}", p.generators()[s.gen.index()].name, s.exp))
        .collect::<Vec<_>>()
        .join("*")
}

/// Canonical text form; `parse_presentation` of the output yields an equal AST.
pub fn render_presentation(p: &Presentation) -> String {
    let gens = p.generators().iter().map(|g| g.name.as_str()).collect::<Vec<_>>().join(",");
    let rels = p
        .relations()
        .iter()
        .map(|r| format!("{}={}", render_word(p, &r.lhs), render_word(p, &r.rhs)))
        .collect::<Vec<_>>()
        .join(", ");
    format!("<{gens}| {rels}>")
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_presentation(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstituteError {
    #[error("unterminated `{{` in template")]
    UnterminatedBrace,
    #[error("bad expression `{0}`")]
    BadExpression(String),
    #[error("non-integer expression `{0}` (negative power of 2)")]
    NonIntegerExpression(String),
    #[error("arithmetic overflow in `{0}`")]
    Overflow(String),
}

/// Evaluates an integer expression in the single variable `m`.
/// Supports `+`, `-` (binary and unary), `^` and parentheses.
pub fn eval_m_expression(src: &str, m: i64) -> Result<i64, SubstituteError> {
    struct Ev<'a> {
        b: &'a [u8],
        i: usize,
        src: &'a str,
        m: i64,
    }
    impl Ev<'_> {
        fn ws(&mut self) {
            while self.b.get(self.i).is_some_and(|c| c.is_ascii_whitespace()) {
                self.i += 1;
            }
        }
        fn bad(&self) -> SubstituteError {
            SubstituteError::BadExpression(self.src.to_string())
        }
        fn expr(&mut self) -> Result<i64, SubstituteError> {
            self.ws();
            let mut acc;
            if self.b.get(self.i) == Some(&b'-') {
                self.i += 1;
                acc = self
                    .term()?
                    .checked_neg()
                    .ok_or(SubstituteError::Overflow(self.src.to_string()))?;
            } else {
                acc = self.term()?;
            }
            loop {
                self.ws();
                match self.b.get(self.i) {
                    Some(b'+') => {
                        self.i += 1;
                        let t = self.term()?;
                        acc = acc
                            .checked_add(t)
                            .ok_or(SubstituteError::Overflow(self.src.to_string()))?;
                    }
                    Some(b'-') => {
                        self.i += 1;
                        let t = self.term()?;
                        acc = acc
                            .checked_sub(t)
                            .ok_or(SubstituteError::Overflow(self.src.to_string()))?;
                    }
                    _ => return Ok(acc),
                }
            }
        }
        fn term(&mut self) -> Result<i64, SubstituteError> {
            let base = self.atom()?;
            self.ws();
            if self.b.get(self.i) == Some(&b'^') {
                self.i += 1;
                let e = self.term()?;
                if e < 0 {
                    return Err(SubstituteError::NonIntegerExpression(self.src.to_string()));
                }
                // Bases 0 and +-1 never overflow, so the loop below would
                // run for the full exponent; handle them directly.
                match base {
                    0 => return Ok(if e == 0 { 1 } else { 0 }),
                    1 => return Ok(1),
                    -1 => return Ok(if e % 2 == 0 { 1 } else { -1 }),
                    _ => {}
                }
                let mut acc: i64 = 1;
                for _ in 0..e {
                    acc = acc
                        .checked_mul(base)
                        .ok_or(SubstituteError::Overflow(self.src.to_string()))?;
                }
                Ok(acc)
            } else {
                Ok(base)
            }
        }
        fn atom(&mut self) -> Result<i64, SubstituteError> {
            self.ws();
            match self.b.get(self.i) {
                Some(b'(') => {
                    self.i += 1;
                    let v = self.expr()?;
                    self.ws();
                    if self.b.get(self.i) != Some(&b')') {
                        return Err(self.bad());
                    }
                    self.i += 1;
                    Ok(v)
                }
                Some(b'm') => {
                    self.i += 1;
                    Ok(self.m)
                }
                Some(c) if c.is_ascii_digit() => {
                    let mut v: i64 = 0;
                    while let Some(&c) = self.b.get(self.i) {
                        if !c.is_ascii_digit() {
                            break;
                        }
                        v = v
                            .checked_mul(10)
                            .and_then(|v| v.checked_add((c - b'0') as i64))
                            .ok_or(SubstituteError::Overflow(self.src.to_string()))?;
                        self.i += 1;
                    }
                    Ok(v)
                }
                _ => Err(self.bad()),
            }
        }
    }
    let mut ev = Ev { b: src.as_bytes(), i: 0, src, m };
    let v = ev.expr()?;
    ev.ws();
    if ev.i != ev.b.len() {
        return Err(ev.bad());
    }
    Ok(v)
}

/// Replaces every `{expr}` in a presentation template by the value of the
/// expression at the given `m`, producing plain text the parser accepts.
pub fn substitute_parameter(template: &str, m: i64) -> Result<String, SubstituteError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let after = &rest[start + 1..];
        let end = after.find('}').ok_or(SubstituteError::UnterminatedBrace)?;
        let expr = &after[..end];
        let v = eval_m_expression(expr, m)?;
        out.push_str(&v.to_string());
        rest = &after[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}
