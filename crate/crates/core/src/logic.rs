//! Propositional bets: formulas, truth valuations and scenario compilation.
//!
//! The state space for propositions `p_0 … p_{k-1}` is the set of all `2^k`
//! valuations; in state `s` proposition `p_i` is true iff bit `i` of `s` is
//! set. Proposition order therefore fixes the state order.
//!
//! Concrete syntax, loosest binding first:
//!
//! ```text
//! formula := or ("->" formula)?          right associative
//! or      := and ("|" and)*              left associative
//! and     := unary ("&" unary)*          left associative
//! unary   := "!" unary | atom
//! atom    := "T" | "F" | ident | "(" formula ")"
//! ident   := [A-Za-z_][A-Za-z0-9_]*      except T and F
//! ```
//!
//! `|` and `->` are sugar: `a | b` parses to `!(!a & !b)` and `a -> b` to
//! `!(a & !b)`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{Algebra, Event, StateSpace};
use crate::decision::contains_discarded;
use crate::engine::{Chain, UpdatePair};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::rational::Rational;

/// Largest proposition set whose valuation space is materialized.
pub const MAX_PROPOSITIONS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Prop(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        self.not().and(other.not()).not()
    }

    pub fn implies(self, other: Formula) -> Formula {
        self.and(other.not()).not()
    }

    /// Proposition names mentioned, sorted.
    pub fn props(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Prop(p) => {
                out.insert(p);
            }
            Formula::Not(x) => x.collect_props(out),
            Formula::And(l, r) => {
                l.collect_props(out);
                r.collect_props(out);
            }
        }
    }

    fn fmt_unary(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::And(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

/// Prints only `!` and `&`, with the fewest parentheses that parse back to
/// the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("T"),
            Formula::False => f.write_str("F"),
            Formula::Prop(p) => f.write_str(p),
            Formula::Not(x) => {
                f.write_str("!")?;
                x.fmt_unary(f)
            }
            Formula::And(l, r) => {
                write!(f, "{l} & ")?;
                r.fmt_unary(f)
            }
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Formula> {
        parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Open,
    Close,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("`{name}`"),
            Token::True => "`T`".into(),
            Token::False => "`F`".into(),
            Token::Not => "`!`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Implies => "`->`".into(),
            Token::Open => "`(`".into(),
            Token::Close => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let token = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'(' => Token::Open,
            b')' => Token::Close,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Token::Implies
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                match &text[start..=i] {
                    "T" => Token::True,
                    "F" => Token::False,
                    name => Token::Ident(name.to_string()),
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((start, token));
        i += 1;
    }
    out.push((text.len(), Token::End));
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at].1
    }

    fn bump(&mut self) -> (usize, Token) {
        let t = self.tokens[self.at].clone();
        if t.1 != Token::End {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T> {
        let (pos, token) = &self.tokens[self.at];
        Err(Error::Syntax {
            pos: *pos,
            msg: format!("expected {wanted}, found {}", token.describe()),
        })
    }

    fn formula(&mut self) -> Result<Formula> {
        let left = self.or()?;
        if *self.peek() == Token::Implies {
            self.bump();
            let right = self.formula()?;
            return Ok(left.implies(right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut left = self.and()?;
        while *self.peek() == Token::Or {
            self.bump();
            left = left.or(self.and()?);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while *self.peek() == Token::And {
            self.bump();
            left = left.and(self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Token::Not => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Token::True => {
                self.bump();
                Ok(Formula::True)
            }
            Token::False => {
                self.bump();
                Ok(Formula::False)
            }
            Token::Ident(_) => match self.bump().1 {
                Token::Ident(name) => Ok(Formula::Prop(name)),
                _ => unreachable!(),
            },
            Token::Open => {
                self.bump();
                let inner = self.formula()?;
                if *self.peek() != Token::Close {
                    return self.unexpected("`)`");
                }
                self.bump();
                Ok(inner)
            }
            _ => self.unexpected("a formula"),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        at: 0,
    };
    let formula = parser.formula()?;
    if *parser.peek() != Token::End {
        return parser.unexpected("an operator or end of input");
    }
    Ok(formula)
}

/// Canonical text: the inverse of [`parse`] up to sugar.
pub fn format(formula: &Formula) -> String {
    formula.to_string()
}

fn check_props(props: &[String]) -> Result<()> {
    if props.len() > MAX_PROPOSITIONS {
        return Err(Error::TooManyPropositions(props.len()));
    }
    for (i, p) in props.iter().enumerate() {
        let valid = p.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && p != "T"
            && p != "F";
        if !valid {
            return Err(Error::Syntax {
                pos: 0,
                msg: format!("`{p}` is not a valid proposition name"),
            });
        }
        if props[..i].contains(p) {
            return Err(Error::DuplicateLabel(p.clone()));
        }
    }
    Ok(())
}

/// Label of valuation `state`, e.g. `c&!v`.
pub fn valuation_label(props: &[String], state: usize) -> String {
    props
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if state >> i & 1 == 1 {
                p.clone()
            } else {
                format!("!{p}")
            }
        })
        .collect::<Vec<_>>()
        .join("&")
}

/// The `2^k` valuations of `props`, labelled by [`valuation_label`].
pub fn valuation_space(props: &[String]) -> Result<Arc<StateSpace>> {
    check_props(props)?;
    StateSpace::new((0..1usize << props.len()).map(|s| valuation_label(props, s)))
}

/// Set of valuations of `props` satisfying `formula`.
pub fn truth_set(formula: &Formula, props: &[String]) -> Result<Event> {
    check_props(props)?;
    let n = 1usize << props.len();
    let mut cache: Vec<Option<Event>> = vec![None; props.len()];
    eval(formula, props, n, &mut cache)
}

fn eval(formula: &Formula, props: &[String], n: usize, cache: &mut Vec<Option<Event>>) -> Result<Event> {
    Ok(match formula {
        Formula::True => Event::full(n),
        Formula::False => Event::empty(n),
        Formula::Prop(name) => {
            let i = props
                .iter()
                .position(|p| p == name)
                .ok_or_else(|| Error::UnknownProposition(name.clone()))?;
            cache[i]
                .get_or_insert_with(|| {
                    Event::from_indices(n, (0..n).filter(|s| s >> i & 1 == 1)).expect("in range")
                })
                .clone()
        }
        Formula::Not(x) => eval(x, props, n, cache)?.complement(),
        Formula::And(l, r) => eval(l, props, n, cache)?.intersection(&eval(r, props, n, cache)?),
    })
}

/// Semantic entailment: every valuation satisfying `phi` satisfies `psi`.
pub fn entails(phi: &Formula, psi: &Formula, props: &[String]) -> Result<bool> {
    Ok(truth_set(phi, props)?.is_subset(&truth_set(psi, props)?))
}

/// The largest discarded formula-event entailing `phi`, if any: the
/// posterior-null part of `phi`'s truth set, when its outer prior measure is
/// positive.
pub fn discarded_within(pair: &UpdatePair, phi: &Formula, props: &[String]) -> Result<Option<Event>> {
    contains_discarded(pair, &truth_set(phi, props)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntacticPeriod {
    /// Propositions the agent is aware of.
    pub aware: Vec<String>,
    pub masses: Vec<(Formula, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntacticScenario {
    pub props: Vec<String>,
    pub periods: Vec<SyntacticPeriod>,
}

/// Algebra generated by the truth sets of the aware propositions.
pub fn awareness_algebra(space: &Arc<StateSpace>, props: &[String], aware: &[String]) -> Result<Algebra> {
    let events = aware
        .iter()
        .map(|p| truth_set(&Formula::Prop(p.clone()), props))
        .collect::<Result<Vec<_>>>()?;
    Algebra::generate(space.clone(), &events)
}

/// Compiles a propositional scenario into a chain over the common valuation
/// space.
pub fn compile_scenario(scenario: &SyntacticScenario) -> Result<Chain> {
    let props = &scenario.props;
    let space = valuation_space(props)?;
    let mut measures = Vec::with_capacity(scenario.periods.len());
    for (t, period) in scenario.periods.iter().enumerate() {
        for p in &period.aware {
            if !props.contains(p) {
                return Err(Error::UnknownProposition(p.clone()));
            }
        }
        if t > 0 {
            if let Some(lost) = scenario.periods[t - 1].aware.iter().find(|p| !period.aware.contains(p)) {
                return Err(Error::AwarenessShrink {
                    from: t - 1,
                    to: t,
                    prop: lost.clone(),
                });
            }
        }
    }
    for (t, period) in scenario.periods.iter().enumerate() {
        let algebra = awareness_algebra(&space, props, &period.aware)?;
        let mut entries = Vec::with_capacity(period.masses.len());
        for (formula, mass) in &period.masses {
            if let Some(p) = formula.props().into_iter().find(|p| !period.aware.iter().any(|a| a == p)) {
                return Err(Error::MassAlgebraMismatch {
                    period: t,
                    msg: format!("formula `{formula}` mentions `{p}`, which is not yet aware"),
                });
            }
            entries.push((truth_set(formula, props)?, mass.clone()));
        }
        let measure = Measure::from_event_masses(algebra, &entries).map_err(|e| Error::MassAlgebraMismatch {
            period: t,
            msg: e.to_string(),
        })?;
        measures.push(measure);
    }
    Chain::new(measures)
}
