//! Serializable reports. Rationals are `"p/q"` strings and events are lists
//! of state labels, so the JSON form is byte-stable.

use serde::Serialize;
use serde_json::Value;

use crate::algebra::Event;
use crate::decision::{ConsistencyReport, ReversalViolation};
use crate::engine::{Bounds, GebReport, PairReport, UpdateReport, Violation, Witness};
use crate::measure::Measure;
use crate::rational::{self, Rational};
use crate::StateSpace;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomMass {
    pub event: Vec<String>,
    pub mass: String,
}

pub fn labels(space: &StateSpace, event: &Event) -> Vec<String> {
    space.labels_of(event).into_iter().map(String::from).collect()
}

pub fn measure(m: &Measure) -> Vec<AtomMass> {
    let space = m.algebra().space();
    m.algebra()
        .atoms()
        .iter()
        .zip(m.masses())
        .map(|(atom, mass)| AtomMass {
            event: labels(space, atom),
            mass: rational::format(mass),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationOut {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<String>,
    pub message: String,
}

pub fn violation(space: &StateSpace, v: &Violation) -> ViolationOut {
    let mut out = ViolationOut {
        kind: "",
        e: None,
        f: None,
        lhs: None,
        rhs: None,
        expected: None,
        actual: None,
        message: String::new(),
    };
    let fmt = rational::format;
    match v {
        Violation::C1 { event, posterior_mass } => {
            out.kind = "c1";
            out.e = Some(labels(space, event));
            out.expected = Some("0".into());
            out.actual = Some(fmt(posterior_mass));
            out.message = format!(
                "prior mass 0 but posterior mass {} on {{{}}}",
                fmt(posterior_mass),
                space.labels_of(event).join(", ")
            );
        }
        Violation::C2 { e, f, lhs, rhs } => {
            out.kind = "c2";
            out.e = Some(labels(space, e));
            out.f = Some(labels(space, f));
            out.lhs = Some(fmt(lhs));
            out.rhs = Some(fmt(rhs));
            out.message = format!(
                "prior(E)*posterior(F) = {} exceeds posterior(E)*prior(F) = {}",
                fmt(lhs),
                fmt(rhs)
            );
        }
        Violation::Eb1 { atom, expected, actual } | Violation::Eb2 { atom, expected, actual } => {
            out.kind = if matches!(v, Violation::Eb1 { .. }) { "eb1" } else { "eb2" };
            out.e = Some(labels(space, atom));
            out.expected = Some(fmt(expected));
            out.actual = Some(fmt(actual));
            out.message = v.to_string();
        }
        Violation::Eb2NullEvidence => {
            out.kind = "eb2";
            out.message = v.to_string();
        }
        Violation::NullOriginalSpace => {
            out.kind = "null_original_space";
            out.message = v.to_string();
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessOut {
    pub beta: String,
    pub interim: Vec<AtomMass>,
}

pub fn witness(w: &Witness) -> WitnessOut {
    WitnessOut {
        beta: rational::format(&w.beta),
        interim: measure(&w.interim),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpdateOut {
    pub status: &'static str,
    pub evidence: Vec<String>,
    pub evidence_outer_measure: String,
    pub inf_ratio: String,
    pub completely_nonmeasurable: bool,
    pub reverse_bayesian: bool,
    pub witness: Option<WitnessOut>,
    pub violation: Option<ViolationOut>,
}

pub fn update(space: &StateSpace, r: &UpdateReport) -> UpdateOut {
    UpdateOut {
        status: r.status.as_str(),
        evidence: labels(space, &r.evidence),
        evidence_outer_measure: rational::format(&r.evidence_outer_measure),
        inf_ratio: rational::format(&r.inf_ratio),
        completely_nonmeasurable: r.completely_nonmeasurable,
        reverse_bayesian: r.reverse_bayesian,
        witness: r.witness.as_ref().map(witness),
        violation: r.violation.as_ref().map(|v| violation(space, v)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GebOut {
    pub status: &'static str,
    pub original_mass: String,
    pub conditioned: Option<Vec<AtomMass>>,
    pub generalized_reverse_bayesian: bool,
    pub update: Option<UpdateOut>,
    pub violation: Option<ViolationOut>,
}

pub fn geb(original: &StateSpace, r: &GebReport) -> GebOut {
    GebOut {
        status: r.status.as_str(),
        original_mass: rational::format(&r.original_mass),
        conditioned: r.conditioned.as_ref().map(measure),
        generalized_reverse_bayesian: r.generalized_reverse_bayesian,
        update: r.report.as_ref().map(|u| update(original, u)),
        violation: r.violation.as_ref().map(|v| violation(original, v)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairOut {
    pub from: usize,
    pub to: usize,
    #[serde(flatten)]
    pub report: UpdateOut,
}

pub fn pair(space: &StateSpace, p: &PairReport) -> PairOut {
    PairOut {
        from: p.from,
        to: p.to,
        report: update(space, &p.report),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsOut {
    pub given: Vec<String>,
    pub target: Vec<String>,
    pub inner: String,
    pub outer: String,
    /// Posterior probability of the target given the evidence, when both
    /// are measurable for the posterior.
    pub posterior: Option<String>,
    pub within: Option<bool>,
}

pub fn bounds(space: &StateSpace, given: &Event, target: &Event, b: &Bounds, posterior: Option<&Rational>) -> BoundsOut {
    BoundsOut {
        given: labels(space, given),
        target: labels(space, target),
        inner: rational::format(&b.inner),
        outer: rational::format(&b.outer),
        posterior: posterior.map(rational::format),
        within: posterior.map(|p| b.contains(p)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReversalOut {
    pub e: Vec<String>,
    pub f: Vec<String>,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyOut {
    pub consistent: bool,
    pub violation: Option<ReversalOut>,
}

pub fn consistency(space: &StateSpace, r: &ConsistencyReport) -> ConsistencyOut {
    ConsistencyOut {
        consistent: r.consistent,
        violation: r.violation.as_ref().map(|v: &ReversalViolation| ReversalOut {
            e: labels(space, &v.e),
            f: labels(space, &v.f),
            explanation: v.explanation.clone(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetRow {
    pub prize: String,
    pub event: Vec<String>,
    pub before: String,
    pub after: String,
}

/// Pretty JSON with a trailing newline.
pub fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Aligned `key  value` lines. Lists of scalars are joined; lists of
/// objects become indented entries.
pub fn to_text(value: &Value) -> String {
    let mut out = String::new();
    render(value, 0, &mut out);
    out
}

fn scalar(value: &Value) -> Option<String> {
    match value {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|v| matches!(v, Value::String(_))) => Some(format!(
            "{{{}}}",
            items.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(", ")
        )),
        // Atom/mass lists read best on one line.
        Value::Array(items) if items.iter().all(is_atom_mass) => Some(
            items
                .iter()
                .map(|v| format!("{} {}", scalar(&v["event"]).unwrap_or_default(), v["mass"].as_str().unwrap_or("")))
                .collect::<Vec<_>>()
                .join("  "),
        ),
        _ => None,
    }
}

fn is_atom_mass(value: &Value) -> bool {
    value.as_object().is_some_and(|o| o.len() == 2 && o.contains_key("event") && o.contains_key("mass"))
}

fn render(value: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match value {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
            for (key, v) in map {
                match scalar(v) {
                    Some(s) => out.push_str(&format!("{pad}{key:<width$}  {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{key}\n"));
                        render(v, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        render(item, indent + 2, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
