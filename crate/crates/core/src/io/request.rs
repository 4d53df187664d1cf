//! The request file: a few bracketed sections of plain text.
//!
//! ```text
//! [command]
//! conjugacy
//! [substitution]
//! a -> aaaabb, b -> babbba
//! [field]
//! rational
//! [lengths]
//! 1, 1
//! [lengths2]
//! 1, 2
//! [budget]
//! max_word_len = 300
//! ```
//!
//! Lengths are rationals `p/q` or polynomials in `x`, the generator of the
//! declared field (`adjoin lambda`, the Perron eigenvalue, is the default
//! when `x` appears; `adjoin sqrt d` for a square root). Decimal literals
//! are rejected so that every verdict is exact.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{NumberField, QPoly, Scalar, Spectral, Q};
use crate::spectrum::{LengthVector, M_MAX_CAP};
use crate::subst::Substitution;
use crate::{Error, Result};

pub const BUDGET_ENV: &str = "SUBTILE_BUDGET";
pub const PREFIX_CAP: usize = 10_000_000;
pub const WORD_LEN_CAP: usize = 2_000;
pub const RENDER_TILE_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Spectrum,
    Conjugacy,
    Repvecs,
    Render,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Spectrum => "spectrum",
            Command::Conjugacy => "conjugacy",
            Command::Repvecs => "repvecs",
            Command::Render => "render",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "analyze" => Command::Analyze,
            "spectrum" => Command::Spectrum,
            "conjugacy" => Command::Conjugacy,
            "repvecs" => Command::Repvecs,
            "render" => Command::Render,
            other => return Err(Error::Invalid(format!("unknown command `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "field", rename_all = "snake_case")]
pub enum FieldDecl {
    Rational,
    /// `x` is the Perron eigenvalue.
    Perron,
    Sqrt { d: i64 },
}

impl fmt::Display for FieldDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDecl::Rational => f.write_str("rational"),
            FieldDecl::Perron => f.write_str("adjoin lambda"),
            FieldDecl::Sqrt { d } => write!(f, "adjoin sqrt {d}"),
        }
    }
}

impl FromStr for FieldDecl {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let words: Vec<&str> = s.split_whitespace().collect();
        match words.as_slice() {
            ["rational"] => Ok(FieldDecl::Rational),
            ["adjoin", "lambda"] | ["adjoin", "perron"] | ["perron"] => Ok(FieldDecl::Perron),
            ["adjoin", "sqrt", d] => {
                let d: i64 = d.parse().map_err(|_| Error::Invalid(format!("bad square root argument `{d}`")))?;
                Ok(FieldDecl::Sqrt { d })
            }
            _ => Err(Error::Invalid(format!("unknown field declaration `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderFormat {
    Svg,
    Text,
}

impl FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "svg" => Ok(RenderFormat::Svg),
            "text" => Ok(RenderFormat::Text),
            other => Err(Error::Invalid(format!("unknown render format `{other}`"))),
        }
    }
}

/// Budget overrides; `None` means the command's default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub prefix_len: Option<usize>,
    pub max_word_len: Option<usize>,
    pub m_max: Option<u32>,
    pub delta: Option<f64>,
    /// Repetition degree, a rational literal.
    pub degree: Option<String>,
    /// Eigenvalue candidates `k / 2 pi`, rational literals or polynomials
    /// in `x`.
    pub candidates: Option<Vec<String>>,
    /// Render window `t0:t1`.
    pub window: Option<(String, String)>,
    pub format: Option<RenderFormat>,
    pub supertiles: Option<u32>,
    /// Run spectrum and conjugacy even without aperiodicity evidence.
    pub assume_aperiodic: Option<bool>,
}

impl Budget {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| Error::Invalid(format!("bad value `{value}` for {what}"));
        match key.trim() {
            "prefix_len" => self.prefix_len = Some(value.parse().map_err(|_| bad("prefix_len"))?),
            "max_word_len" => self.max_word_len = Some(value.parse().map_err(|_| bad("max_word_len"))?),
            "m_max" => self.m_max = Some(value.parse().map_err(|_| bad("m_max"))?),
            "delta" => self.delta = Some(value.parse().map_err(|_| bad("delta"))?),
            "degree" => self.degree = Some(canonical_rational(value)?),
            "candidates" | "k" => {
                let list = value.split(',').map(|c| Ok(parse_poly(c)?.to_string())).collect::<Result<Vec<_>>>()?;
                self.candidates = Some(list);
            }
            "window" => {
                let (a, b) = value.split_once(':').ok_or_else(|| bad("window (expected t0:t1)"))?;
                self.window = Some((canonical_rational(a)?, canonical_rational(b)?));
            }
            "format" => self.format = Some(value.parse()?),
            "supertiles" => self.supertiles = Some(value.parse().map_err(|_| bad("supertiles"))?),
            "assume_aperiodic" => self.assume_aperiodic = Some(value.parse().map_err(|_| bad("assume_aperiodic"))?),
            other => return Err(Error::Invalid(format!("unknown budget key `{other}`"))),
        }
        Ok(())
    }

    /// Applies comma- or newline-separated `key=value` pairs, as found in
    /// the budget environment variable. Lists are not supported there.
    pub fn apply_overrides(&mut self, text: &str) -> Result<()> {
        for part in text.split([',', '\n', ';']) {
            if part.trim().is_empty() {
                continue;
            }
            let (k, v) = part.split_once('=').ok_or_else(|| Error::Invalid(format!("expected key=value, got `{part}`")))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn check(&self) -> Result<()> {
        if self.prefix_len.is_some_and(|p| p == 0 || p > PREFIX_CAP) {
            return Err(Error::Invalid(format!("prefix_len must lie in 1..={PREFIX_CAP}")));
        }
        if self.max_word_len.is_some_and(|w| w < 2 || w > WORD_LEN_CAP) {
            return Err(Error::Invalid(format!("max_word_len must lie in 2..={WORD_LEN_CAP}")));
        }
        if self.m_max.is_some_and(|m| m < 1 || m > M_MAX_CAP) {
            return Err(Error::Invalid(format!("m_max must lie in 1..={M_MAX_CAP}")));
        }
        if self.delta.is_some_and(|d| !(d > 0.0 && d < 1.0)) {
            return Err(Error::Invalid("delta must lie strictly between 0 and 1".into()));
        }
        Ok(())
    }

    fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(v) = self.prefix_len {
            out.push(format!("prefix_len = {v}"));
        }
        if let Some(v) = self.max_word_len {
            out.push(format!("max_word_len = {v}"));
        }
        if let Some(v) = self.m_max {
            out.push(format!("m_max = {v}"));
        }
        if let Some(v) = self.delta {
            out.push(format!("delta = {v:e}"));
        }
        if let Some(v) = &self.degree {
            out.push(format!("degree = {v}"));
        }
        if let Some(v) = &self.candidates {
            out.push(format!("candidates = {}", v.join(", ")));
        }
        if let Some((a, b)) = &self.window {
            out.push(format!("window = {a}:{b}"));
        }
        if let Some(v) = self.format {
            out.push(format!("format = {}", if v == RenderFormat::Svg { "svg" } else { "text" }));
        }
        if let Some(v) = self.supertiles {
            out.push(format!("supertiles = {v}"));
        }
        if let Some(v) = self.assume_aperiodic {
            out.push(format!("assume_aperiodic = {v}"));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRequest {
    pub command: Command,
    pub substitution: Substitution,
    pub root: Option<Substitution>,
    pub field: FieldDecl,
    /// Length expressions in canonical form.
    pub lengths: Option<Vec<String>>,
    pub lengths2: Option<Vec<String>>,
    pub budget: Budget,
}

impl AnalysisRequest {
    pub fn new(command: Command, substitution: Substitution) -> Self {
        AnalysisRequest {
            command,
            substitution,
            root: None,
            field: FieldDecl::Rational,
            lengths: None,
            lengths2: None,
            budget: Budget::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: Vec<(String, usize, Vec<String>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                sections.push((name.trim().to_string(), i + 1, Vec::new()));
                continue;
            }
            match sections.last_mut() {
                Some(s) => s.2.push(line.to_string()),
                None => return Err(Error::Parse { line: i + 1, msg: "text before the first [section]".into() }),
            }
        }
        let mut command = None;
        let mut substitution = None;
        let mut root = None;
        let mut field = None;
        let mut lengths = None;
        let mut lengths2 = None;
        let mut budget = Budget::default();
        for (name, line, body) in sections {
            let at = |e: Error| match e {
                Error::Parse { .. } => e,
                other => Error::Parse { line, msg: format!("[{name}]: {other}") },
            };
            let joined = body.join("\n");
            match name.as_str() {
                "command" => command = Some(joined.parse::<Command>().map_err(at)?),
                "substitution" => substitution = Some(Substitution::parse(&joined).map_err(at)?),
                "root" => root = Some(Substitution::parse(&joined).map_err(at)?),
                "field" => field = Some(joined.parse::<FieldDecl>().map_err(at)?),
                "lengths" => lengths = Some(parse_length_list(&joined).map_err(at)?),
                "lengths2" => lengths2 = Some(parse_length_list(&joined).map_err(at)?),
                "budget" => {
                    for l in &body {
                        let (k, v) = l
                            .split_once('=')
                            .ok_or_else(|| Error::Parse { line, msg: format!("expected key = value, got `{l}`") })?;
                        budget.set(k, v).map_err(at)?;
                    }
                }
                other => return Err(Error::Parse { line, msg: format!("unknown section [{other}]") }),
            }
        }
        let substitution = substitution.ok_or_else(|| Error::Invalid("missing [substitution] section".into()))?;
        let uses_x = lengths.iter().chain(&lengths2).flatten().any(|s: &String| s.contains('x'))
            || budget.candidates.iter().flatten().any(|s| s.contains('x'));
        let field = field.unwrap_or(if uses_x { FieldDecl::Perron } else { FieldDecl::Rational });
        if field == FieldDecl::Rational && uses_x {
            return Err(Error::Invalid("lengths use x but the field is declared rational".into()));
        }
        budget.check()?;
        Ok(AnalysisRequest {
            command: command.unwrap_or(Command::Analyze),
            substitution,
            root,
            field,
            lengths,
            lengths2,
            budget,
        })
    }

    /// Reads a request file and applies the budget environment variable.
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut req = Self::parse(&text)?;
        if let Ok(over) = std::env::var(BUDGET_ENV) {
            req.budget.apply_overrides(&over)?;
            req.budget.check()?;
        }
        Ok(req)
    }

    /// The generator `x` of the declared field, if any.
    pub fn generator(&self) -> Result<Option<Scalar>> {
        Ok(match self.field {
            FieldDecl::Rational => None,
            FieldDecl::Perron => Some(Spectral::new(&self.substitution.matrix())?.lambda().clone()),
            FieldDecl::Sqrt { d } => Some(NumberField::sqrt(d)?.generator()),
        })
    }

    pub fn eval(&self, expr: &str) -> Result<Scalar> {
        eval_poly(&parse_poly(expr)?, self.generator()?.as_ref())
    }

    fn resolve(&self, list: &[String]) -> Result<LengthVector> {
        if list.len() != self.substitution.n() {
            return Err(Error::Invalid(format!(
                "{} lengths given for an alphabet of {} letters",
                list.len(),
                self.substitution.n()
            )));
        }
        let x = self.generator()?;
        let entries = list.iter().map(|e| eval_poly(&parse_poly(e)?, x.as_ref())).collect::<Result<Vec<_>>>()?;
        LengthVector::new(entries)
    }

    /// The first length vector; the natural (Perron) lengths when absent.
    pub fn lengths(&self) -> Result<LengthVector> {
        match &self.lengths {
            Some(l) => self.resolve(l),
            None => Ok(LengthVector::perron(&Spectral::new(&self.substitution.matrix())?)),
        }
    }

    pub fn lengths2(&self) -> Result<LengthVector> {
        match &self.lengths2 {
            Some(l) => self.resolve(l),
            None => Err(Error::Invalid("missing [lengths2] section".into())),
        }
    }
}

impl fmt::Display for AnalysisRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[command]\n{}", self.command.name())?;
        writeln!(f, "[substitution]\n{}", self.substitution)?;
        if let Some(r) = &self.root {
            writeln!(f, "[root]\n{r}")?;
        }
        writeln!(f, "[field]\n{}", self.field)?;
        if let Some(l) = &self.lengths {
            writeln!(f, "[lengths]\n{}", l.join("; "))?;
        }
        if let Some(l) = &self.lengths2 {
            writeln!(f, "[lengths2]\n{}", l.join("; "))?;
        }
        let b = self.budget.lines();
        if !b.is_empty() {
            writeln!(f, "[budget]\n{}", b.join("\n"))?;
        }
        Ok(())
    }
}

fn parse_length_list(text: &str) -> Result<Vec<String>> {
    text.split([',', ';', '\n'])
        .filter(|s| !s.trim().is_empty())
        .map(|s| Ok(parse_poly(s)?.to_string()))
        .collect()
}

fn canonical_rational(s: &str) -> Result<String> {
    let p = parse_poly(s)?;
    if p.deg() > 0 {
        return Err(Error::Invalid(format!("`{s}` must be a rational number")));
    }
    Ok(p.coeff(0).to_string())
}

pub fn eval_poly(p: &QPoly, x: Option<&Scalar>) -> Result<Scalar> {
    if p.deg() == 0 {
        return Ok(Scalar::rational(p.coeff(0)));
    }
    let x = x.ok_or_else(|| Error::Invalid(format!("`{p}` uses x but no field generator is declared")))?;
    let mut acc = Scalar::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc * x + &Scalar::rational(c.clone());
    }
    Ok(acc)
}

/// Parses a polynomial in `x` with rational coefficients: sums of terms
/// like `3`, `1/2`, `x`, `2x`, `x/2`, `3/4*x^2`.
pub fn parse_poly(s: &str) -> Result<QPoly> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::Invalid("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, src: s };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(num_bigint::BigInt),
    X,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' => {}
            '0'..='9' => {
                let st = i;
                while i + 1 < cs.len() && cs[i + 1].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < cs.len() && (cs[i + 1] == '.' || cs[i + 1] == 'e') {
                    return Err(Error::Invalid(format!("decimal literal in `{s}`: write lengths as p/q")));
                }
                let digits: String = cs[st..=i].iter().collect();
                out.push(Tok::Num(digits.parse().expect("digits")));
            }
            'x' => out.push(Tok::X),
            '+' => out.push(Tok::Plus),
            '-' => out.push(Tok::Minus),
            '*' => out.push(Tok::Star),
            '/' => out.push(Tok::Slash),
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::Open),
            ')' => out.push(Tok::Close),
            '.' => return Err(Error::Invalid(format!("decimal literal in `{s}`: write lengths as p/q"))),
            other => return Err(Error::Invalid(format!("unexpected `{other}` in `{s}`"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Invalid(format!("{msg} in `{}`", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<QPoly> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            let sub = match t {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = if sub { &acc - &rhs } else { &acc + &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<QPoly> {
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    if f.deg() > 0 || f.is_zero() {
                        return Err(self.err("division by a non-constant or zero"));
                    }
                    acc = acc.scale(&(Q::from_integer(1.into()) / f.coeff(0)));
                }
                // Implicit product: `2x`, `3(x + 1)`.
                Some(Tok::X) | Some(Tok::Open) => {
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                _ => break,
            }
        }
        Ok(if neg { -&acc } else { acc })
    }

    fn factor(&mut self) -> Result<QPoly> {
        let base = match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                QPoly::constant(Q::from_integer(n))
            }
            Some(Tok::X) => {
                self.pos += 1;
                QPoly::x()
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(self.err("missing `)`"));
                }
                self.pos += 1;
                e
            }
            _ => return Err(self.err("expected a number, x or `(`")),
        };
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(e)) => {
                    self.pos += 1;
                    let e: usize = e.try_into().map_err(|_| self.err("exponent too large"))?;
                    if e > 64 {
                        return Err(self.err("exponent too large"));
                    }
                    return Ok(base.pow(e));
                }
                _ => return Err(self.err("expected an exponent")),
            }
        }
        Ok(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;

    #[test]
    fn polynomials() {
        let p = parse_poly("1 + x/2").unwrap();
        assert_eq!(p, QPoly::new(vec![q(1, 1), q(1, 2)]));
        assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
        assert_eq!(parse_poly("2x^2 - (x - 1)/3").unwrap(), QPoly::new(vec![q(1, 3), q(-1, 3), q(2, 1)]));
        assert!(parse_poly("1.5").is_err());
        assert!(parse_poly("1/(x)").is_err());
    }

    #[test]
    fn request_round_trip() {
        let text = "[command]\nconjugacy\n[substitution]\na -> b\nb -> ab\n[lengths]\n1, 1\n[lengths2]\n1 + x/2, 1/2\n[budget]\nm_max = 20\ndelta = 1e-6\n";
        let r = AnalysisRequest::parse(text).unwrap();
        assert_eq!(r.field, FieldDecl::Perron);
        assert_eq!(AnalysisRequest::parse(&r.to_string()).unwrap(), r);
        let l2 = r.lengths2().unwrap();
        assert_eq!(l2.get(1), &Scalar::rational(q(1, 2)));
        assert!(!l2.get(0).is_rational());
    }

    #[test]
    fn bad_requests() {
        assert!(AnalysisRequest::parse("[command]\nspectrum\n").is_err());
        assert!(AnalysisRequest::parse("[substitution]\na -> ab, b -> a\n[field]\nrational\n[lengths]\nx, 1\n").is_err());
        assert!(AnalysisRequest::parse("[substitution]\na -> ab, b -> a\n[budget]\nm_max = 500\n").is_err());
    }
}
