//! Products of traces of words in one random unitary and fixed operators.
//!
//! Text form: factors joined by `*`. A factor is `tr[ … ]`, `ntr[ … ]`
//! (trace divided by `q`), `1/q`, or a real number. Atoms inside a trace are
//! `U`, `U^k` (`k` may be negative), `U^dag`, an operator name, or `Name^dag`.
//!
//! ```text
//! tr[ Z U Z U^-1 ] * tr[ U^2 U^-2 ]
//! 1/q * tr[ Z U Z U^-1 Z U Z U^-1 ]
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE};

/// Guard on `|k|` when forming `U^k` numerically.
pub const MAX_POWER: i64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    /// `U^k`, `k ≠ 0` after normalization.
    U(i64),
    /// A named fixed operator, optionally adjointed.
    Fixed { op: String, dagger: bool },
}

impl Atom {
    pub fn fixed(op: impl Into<String>) -> Self {
        Atom::Fixed {
            op: op.into(),
            dagger: false,
        }
    }

    fn adjoint(&self) -> Self {
        match self {
            Atom::U(k) => Atom::U(-k),
            Atom::Fixed { op, dagger } => Atom::Fixed {
                op: op.clone(),
                dagger: !dagger,
            },
        }
    }
}

/// One trace factor; the atoms are read cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TraceWord {
    pub atoms: Vec<Atom>,
}

impl TraceWord {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Self { atoms }
    }

    /// Word of `(Tr W)^* = Tr(W†)`: reversed, each atom adjointed.
    pub fn adjoint(&self) -> Self {
        Self {
            atoms: self.atoms.iter().rev().map(Atom::adjoint).collect(),
        }
    }

    pub fn rotated(&self, by: usize) -> Self {
        let mut atoms = self.atoms.clone();
        if !atoms.is_empty() {
            let k = by % atoms.len();
            atoms.rotate_left(k);
        }
        Self { atoms }
    }

    /// Merges cyclically adjacent powers of `U` and drops `U^0`.
    pub fn normalized(&self) -> Self {
        let mut out: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            match (out.last_mut(), a) {
                (Some(Atom::U(prev)), Atom::U(k)) => *prev += k,
                _ => out.push(a.clone()),
            }
            if matches!(out.last(), Some(Atom::U(0))) {
                out.pop();
            }
        }
        // Wrap-around merge.
        while out.len() >= 2 {
            match (out.first(), out.last()) {
                (Some(Atom::U(a)), Some(Atom::U(b))) => {
                    let merged = a + b;
                    out.pop();
                    if merged == 0 {
                        out.remove(0);
                    } else {
                        out[0] = Atom::U(merged);
                    }
                }
                _ => break,
            }
        }
        Self { atoms: out }
    }

    fn unitary_counts(&self) -> (usize, usize) {
        self.atoms.iter().fold((0, 0), |(p, m), a| match a {
            Atom::U(k) if *k > 0 => (p + *k as usize, m),
            Atom::U(k) => (p, m + k.unsigned_abs() as usize),
            _ => (p, m),
        })
    }
}

/// `prefactor · q^{q_power} · ∏ Tr(word)`, with operators bound by name.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentExpression {
    pub factors: Vec<TraceWord>,
    pub operators: BTreeMap<String, CMatrix>,
    pub prefactor: Complex64,
    pub q_power: i32,
}

impl Default for MomentExpression {
    fn default() -> Self {
        Self {
            factors: Vec::new(),
            operators: BTreeMap::new(),
            prefactor: ONE,
            q_power: 0,
        }
    }
}

impl MomentExpression {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_operator(mut self, name: impl Into<String>, m: CMatrix) -> Self {
        self.operators.insert(name.into(), m);
        self
    }

    pub fn with_trace(mut self, word: TraceWord) -> Self {
        self.factors.push(word);
        self
    }

    /// Appends `(1/q) Tr(word)`.
    pub fn with_normalized_trace(mut self, word: TraceWord) -> Self {
        self.factors.push(word);
        self.q_power -= 1;
        self
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        self.prefactor *= c;
        self
    }

    /// Parses the text form, binding operator names from `operators`.
    pub fn parse(text: &str, operators: &BTreeMap<String, CMatrix>) -> Result<Self> {
        let mut expr = MomentExpression {
            operators: operators.clone(),
            ..Default::default()
        };
        for raw in split_factors(text)? {
            let factor = raw.trim();
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in `{text}`")));
            }
            if let Some(body) = factor
                .strip_prefix("ntr[")
                .and_then(|s| s.strip_suffix(']'))
            {
                expr.factors.push(parse_word(body)?);
                expr.q_power -= 1;
            } else if let Some(body) = factor.strip_prefix("tr[").and_then(|s| s.strip_suffix(']'))
            {
                expr.factors.push(parse_word(body)?);
            } else if factor == "1/q" {
                expr.q_power -= 1;
            } else if factor == "q" {
                expr.q_power += 1;
            } else {
                let c: f64 = factor
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad factor `{factor}`")))?;
                expr.prefactor *= c;
            }
        }
        expr.check_operators()?;
        Ok(expr)
    }

    pub fn check_operators(&self) -> Result<()> {
        for w in &self.factors {
            for a in &w.atoms {
                if let Atom::Fixed { op, .. } = a {
                    if !self.operators.contains_key(op) {
                        return Err(Error::UnknownOperator(op.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_dimension(&self, q: usize) -> Result<()> {
        for (name, m) in &self.operators {
            if m.nrows() != q || m.ncols() != q {
                return Err(Error::OperatorShape {
                    name: name.clone(),
                    rows: m.nrows(),
                    cols: m.ncols(),
                    q,
                });
            }
        }
        Ok(())
    }

    /// Same expression with every word normalized.
    pub fn normalized(&self) -> Self {
        Self {
            factors: self.factors.iter().map(TraceWord::normalized).collect(),
            ..self.clone()
        }
    }

    /// `(#U, #U†)` after expanding powers into single instances.
    pub fn unitary_counts(&self) -> (usize, usize) {
        self.factors.iter().fold((0, 0), |(p, m), w| {
            let (a, b) = w.unitary_counts();
            (p + a, m + b)
        })
    }

    /// Scalar multiplying the trace product at dimension `q`.
    pub fn scalar(&self, q: usize) -> Complex64 {
        self.prefactor * (q as f64).powi(self.q_power)
    }

    /// Product of this expression and `other`; operator maps are merged.
    pub fn times(mut self, other: &MomentExpression) -> Self {
        self.factors.extend(other.factors.iter().cloned());
        for (k, v) in &other.operators {
            self.operators.entry(k.clone()).or_insert_with(|| v.clone());
        }
        self.prefactor *= other.prefactor;
        self.q_power += other.q_power;
        self
    }

    /// Complex conjugate of the expression (words adjointed, prefactor conjugated).
    pub fn conjugate(&self) -> Self {
        Self {
            factors: self.factors.iter().map(TraceWord::adjoint).collect(),
            operators: self.operators.clone(),
            prefactor: self.prefactor.conj(),
            q_power: self.q_power,
        }
    }

    /// Evaluates the expression at a fixed unitary `u`.
    pub fn evaluate(&self, u: &CMatrix) -> Result<Complex64> {
        let q = u.nrows();
        self.check_dimension(q)?;
        let norm = self.normalized();
        let mut powers = PowerCache::new(u);
        let mut value = norm.scalar(q);
        for w in &norm.factors {
            let mut acc: Option<CMatrix> = None;
            for a in &w.atoms {
                let m = match a {
                    Atom::U(k) => powers.get(*k)?,
                    Atom::Fixed { op, dagger } => {
                        let m = norm
                            .operators
                            .get(op)
                            .ok_or_else(|| Error::UnknownOperator(op.clone()))?;
                        if *dagger {
                            m.adjoint()
                        } else {
                            m.clone()
                        }
                    }
                };
                acc = Some(match acc {
                    None => m,
                    Some(prev) => prev * m,
                });
            }
            value *= match acc {
                None => Complex64::from(q as f64),
                Some(m) => linalg::trace(&m),
            };
        }
        Ok(value)
    }
}

struct PowerCache<'a> {
    u: &'a CMatrix,
    pos: Vec<CMatrix>,
}

impl<'a> PowerCache<'a> {
    fn new(u: &'a CMatrix) -> Self {
        Self {
            u,
            pos: vec![u.clone()],
        }
    }

    fn get(&mut self, k: i64) -> Result<CMatrix> {
        if k.abs() > MAX_POWER || k == 0 {
            return Err(Error::PowerTooLarge(k));
        }
        let m = k.unsigned_abs() as usize;
        while self.pos.len() < m {
            let next = self.pos.last().unwrap() * self.u;
            self.pos.push(next);
        }
        Ok(if k > 0 {
            self.pos[m - 1].clone()
        } else {
            self.pos[m - 1].adjoint()
        })
    }
}

fn split_factors(text: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            '*' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if !(0..=1).contains(&depth) {
            return Err(Error::Parse(format!("unbalanced brackets in `{text}`")));
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in `{text}`")));
    }
    out.push(&text[start..]);
    Ok(out)
}

fn parse_word(body: &str) -> Result<TraceWord> {
    let atoms = body
        .split_whitespace()
        .map(parse_atom)
        .collect::<Result<Vec<_>>>()?;
    Ok(TraceWord { atoms })
}

fn parse_atom(tok: &str) -> Result<Atom> {
    let (name, exp) = match tok.split_once('^') {
        Some((n, e)) => (n, Some(e)),
        None => (tok, None),
    };
    let valid_name = !name.is_empty()
        && name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid_name {
        return Err(Error::Parse(format!("bad atom `{tok}`")));
    }
    if name == "U" {
        let k = match exp {
            None => 1,
            Some("dag") => -1,
            Some(e) => e
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad power in `{tok}`")))?,
        };
        return Ok(Atom::U(k));
    }
    match exp {
        None => Ok(Atom::fixed(name)),
        Some("dag") => Ok(Atom::Fixed {
            op: name.to_string(),
            dagger: true,
        }),
        Some(_) => Err(Error::Parse(format!("operators take only `^dag`: `{tok}`"))),
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::U(1) => write!(f, "U"),
            Atom::U(k) => write!(f, "U^{k}"),
            Atom::Fixed { op, dagger: false } => write!(f, "{op}"),
            Atom::Fixed { op, dagger: true } => write!(f, "{op}^dag"),
        }
    }
}

impl fmt::Display for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tr[")?;
        for a in &self.atoms {
            write!(f, " {a}")?;
        }
        write!(f, " ]")
    }
}

impl fmt::Display for MomentExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.prefactor != ONE {
            if self.prefactor.im == 0.0 {
                parts.push(format!("{}", self.prefactor.re));
            } else {
                parts.push(format!("({})", self.prefactor));
            }
        }
        for _ in 0..(-self.q_power).max(0) {
            parts.push("1/q".into());
        }
        for _ in 0..self.q_power.max(0) {
            parts.push("q".into());
        }
        parts.extend(self.factors.iter().map(|w| w.to_string()));
        if parts.is_empty() {
            parts.push("1".into());
        }
        write!(f, "{}", parts.join(" * "))
    }
}
