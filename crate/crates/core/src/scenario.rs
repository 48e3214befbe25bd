//! JSON scenario files.
//!
//! A file names either `states` or `propositions`. Each period carries an
//! algebra (`algebra`: blocks of state names, or `aware`: proposition names)
//! and a `measure`: a list of `{event | formula, mass}` entries, one per atom
//! with positive mass. `utility` optionally maps prizes to `"p/q"` utilities
//! plus a `worst` key naming the utility-0 prize. With `expansion_states`,
//! periods after the first live on `states` plus the expansion states.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use num_traits::Zero;
use serde_json::{Map, Value};

use crate::algebra::{Algebra, Event, StateSpace};
use crate::decision::UtilityIndex;
use crate::engine::{Chain, UpdatePair};
use crate::error::{Error, Result};
use crate::logic::{self, SyntacticPeriod, SyntacticScenario};
use crate::measure::Measure;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propositions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expansion_states: Option<Vec<String>>,
    pub periods: Vec<PeriodFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility: Option<Map<String, Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aware: Option<Vec<String>>,
    pub measure: Vec<MassEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    pub mass: String,
}

/// A loaded scenario: one measure per period.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Proposition names when the file was propositional.
    pub propositions: Option<Vec<String>>,
    pub space: Arc<StateSpace>,
    /// Present when later periods live on a larger space.
    pub expanded: Option<Arc<StateSpace>>,
    pub measures: Vec<Measure>,
    pub utility: Option<UtilityIndex>,
    utility_raw: Option<Map<String, Value>>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Scenario(msg.into())
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        Scenario::from_file(&file)
    }

    pub fn from_file(file: &ScenarioFile) -> Result<Scenario> {
        if file.periods.is_empty() {
            return Err(Error::EmptyChain);
        }
        let utility = file.utility.as_ref().map(parse_utility).transpose()?;
        let mut scenario = match (&file.states, &file.propositions) {
            (Some(states), None) => states_scenario(file, states)?,
            (None, Some(props)) => {
                if file.expansion_states.is_some() {
                    return Err(bad("`expansion_states` needs a state-based scenario"));
                }
                propositional_scenario(file, props)?
            }
            _ => return Err(bad("give exactly one of `states` and `propositions`")),
        };
        scenario.utility = utility;
        scenario.utility_raw = file.utility.clone();
        Ok(scenario)
    }

    pub fn is_expanding(&self) -> bool {
        self.expanded.is_some()
    }

    pub fn chain(&self) -> Result<Chain> {
        if self.is_expanding() {
            return Err(bad("chains need every period on one state space"));
        }
        Chain::new(self.measures.clone())
    }

    /// The update from period 0 to period 1.
    pub fn first_pair(&self) -> Result<UpdatePair> {
        if self.measures.len() < 2 {
            return Err(bad("this command needs at least two periods"));
        }
        if self.is_expanding() {
            return Err(bad("the posterior lives on an expanded space"));
        }
        UpdatePair::new(self.measures[0].clone(), self.measures[1].clone())
    }

    /// Reads an event from the command line: a formula for propositional
    /// scenarios, otherwise comma-separated state names.
    pub fn event(&self, text: &str) -> Result<Event> {
        match &self.propositions {
            Some(props) => logic::truth_set(&logic::parse(text)?, props),
            None => {
                let labels: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
                self.space.event(&labels)
            }
        }
    }

    /// The equivalent state-based file: every period's atoms as blocks and
    /// one entry per atom.
    pub fn to_state_file(&self) -> ScenarioFile {
        let mut file = state_file(&self.measures);
        file.states = Some(self.space.labels().to_vec());
        file.expansion_states = self.expanded.as_ref().map(|e| e.labels()[self.space.len()..].to_vec());
        file.utility = self.utility_raw.clone();
        file
    }
}

/// State-based file for measures over one state space.
pub fn state_file(measures: &[Measure]) -> ScenarioFile {
    let periods = measures
        .iter()
        .map(|m| {
            let space = m.algebra().space();
            let blocks: Vec<Vec<String>> = m
                .algebra()
                .atoms()
                .iter()
                .map(|a| space.labels_of(a).into_iter().map(String::from).collect())
                .collect();
            let measure = blocks
                .iter()
                .zip(m.masses())
                .filter(|(_, mass)| !mass.is_zero())
                .map(|(block, mass)| MassEntry {
                    event: Some(block.clone()),
                    formula: None,
                    mass: rational::format(mass),
                })
                .collect();
            PeriodFile {
                algebra: Some(blocks),
                aware: None,
                measure,
            }
        })
        .collect();
    ScenarioFile {
        states: measures.first().map(|m| m.algebra().space().labels().to_vec()),
        propositions: None,
        expansion_states: None,
        periods,
        utility: None,
    }
}

fn parse_utility(raw: &Map<String, Value>) -> Result<UtilityIndex> {
    let mut worst = None;
    let mut prizes = Vec::new();
    for (key, value) in raw {
        let text = value
            .as_str()
            .ok_or_else(|| bad(format!("utility `{key}` must be a string")))?;
        if key == "worst" {
            worst = Some(text);
        } else {
            prizes.push((key.clone(), rational::parse(text)?));
        }
    }
    let worst = worst.ok_or_else(|| bad("utility needs a `worst` key"))?;
    UtilityIndex::new(prizes, worst)
}

fn states_scenario(file: &ScenarioFile, states: &[String]) -> Result<Scenario> {
    let space = StateSpace::new(states.iter().cloned())?;
    let expanded = match &file.expansion_states {
        Some(extra) => Some(StateSpace::new(states.iter().chain(extra).cloned())?),
        None => None,
    };
    let mut measures = Vec::with_capacity(file.periods.len());
    for (t, period) in file.periods.iter().enumerate() {
        if period.aware.is_some() {
            return Err(bad(format!("period {t}: `aware` needs a propositional scenario")));
        }
        let on = match (&expanded, t) {
            (Some(e), t) if t > 0 => e,
            _ => &space,
        };
        let algebra = match &period.algebra {
            Some(blocks) => {
                let events = blocks.iter().map(|b| on.event(b)).collect::<Result<Vec<_>>>()?;
                Algebra::new(on.clone(), events)?
            }
            None => Algebra::discrete(on.clone()),
        };
        let mut entries = Vec::with_capacity(period.measure.len());
        for entry in &period.measure {
            if entry.formula.is_some() {
                return Err(bad(format!("period {t}: formulas need a propositional scenario")));
            }
            let event = entry
                .event
                .as_ref()
                .ok_or_else(|| bad(format!("period {t}: mass entry without `event`")))?;
            entries.push((on.event(event)?, rational::parse(&entry.mass)?));
        }
        measures.push(period_measure(algebra, &entries, t)?);
    }
    Ok(Scenario {
        propositions: None,
        space,
        expanded,
        measures,
        utility: None,
        utility_raw: None,
    })
}

fn period_measure(algebra: Algebra, entries: &[(Event, Rational)], period: usize) -> Result<Measure> {
    Measure::from_event_masses(algebra, entries).map_err(|e| Error::MassAlgebraMismatch {
        period,
        msg: e.to_string(),
    })
}

fn propositional_scenario(file: &ScenarioFile, props: &[String]) -> Result<Scenario> {
    let space = logic::valuation_space(props)?;
    let mut periods = Vec::with_capacity(file.periods.len());
    for (t, period) in file.periods.iter().enumerate() {
        if period.algebra.is_some() {
            return Err(bad(format!("period {t}: use `aware` in a propositional scenario")));
        }
        let aware = period
            .aware
            .clone()
            .ok_or_else(|| bad(format!("period {t}: missing `aware`")))?;
        let mut masses = Vec::with_capacity(period.measure.len());
        for entry in &period.measure {
            let formula = match (&entry.formula, &entry.event) {
                (Some(text), None) => logic::parse(text)?,
                // Valuation labels are themselves formulas.
                (None, Some(labels)) => {
                    let event = space.event(labels)?;
                    let mut disjuncts = event.iter().map(|s| {
                        logic::parse(space.label(s)).expect("valuation labels parse")
                    });
                    let first = disjuncts.next().unwrap_or(logic::Formula::False);
                    disjuncts.fold(first, |acc, f| acc.or(f))
                }
                _ => {
                    return Err(bad(format!(
                        "period {t}: each mass entry needs exactly one of `formula` and `event`"
                    )))
                }
            };
            masses.push((formula, rational::parse(&entry.mass)?));
        }
        periods.push(SyntacticPeriod { aware, masses });
    }
    let chain = logic::compile_scenario(&SyntacticScenario {
        props: props.to_vec(),
        periods,
    })?;
    Ok(Scenario {
        propositions: Some(props.to_vec()),
        space,
        expanded: None,
        measures: chain.measures().to_vec(),
        utility: None,
        utility_raw: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    const EXAMPLE: &str = r#"{
        "states": ["a", "b1", "b2", "c"],
        "periods": [
            {"algebra": [["a"], ["b1", "b2"], ["c"]],
             "measure": [{"event": ["a"], "mass": "1/2"},
                         {"event": ["b1", "b2"], "mass": "1/4"},
                         {"event": ["c"], "mass": "1/4"}]},
            {"measure": [{"event": ["a"], "mass": "4/7"},
                         {"event": ["b1"], "mass": "2/7"},
                         {"event": ["b2"], "mass": "1/7"}]}
        ]
    }"#;

    #[test]
    fn loads_state_scenarios() {
        let s = Scenario::from_json(EXAMPLE).unwrap();
        assert_eq!(s.measures.len(), 2);
        assert_eq!(s.measures[0].masses(), [rat(1, 2), rat(1, 4), rat(1, 4)]);
        assert!(s.measures[1].algebra().is_discrete());
        assert_eq!(s.measures[1].atom_mass(3), &rat(0, 1));
        s.first_pair().unwrap();
    }

    #[test]
    fn rejects_bad_masses() {
        let text = EXAMPLE.replace("\"4/7\"", "\"3/7\"");
        assert!(matches!(
            Scenario::from_json(&text),
            Err(Error::MassAlgebraMismatch { period: 1, .. })
        ));
        let text = EXAMPLE.replace("\"4/7\"", "\"0.5\"");
        assert!(matches!(Scenario::from_json(&text), Err(Error::InvalidRational(_))));
        let text = EXAMPLE.replace("\"b1\"]", "\"zz\"]");
        assert!(matches!(Scenario::from_json(&text), Err(Error::UnknownState(_))));
        assert!(matches!(Scenario::from_json("{"), Err(Error::Scenario(_))));
        assert!(matches!(
            Scenario::from_json(r#"{"states": ["a"], "periods": [], "extra": 1}"#),
            Err(Error::Scenario(_))
        ));
    }

    #[test]
    fn state_file_round_trip() {
        let s = Scenario::from_json(EXAMPLE).unwrap();
        let again = Scenario::from_file(&s.to_state_file()).unwrap();
        assert_eq!(again.measures, s.measures);
    }

    #[test]
    fn propositional_entries_by_label() {
        let text = r#"{
            "propositions": ["c", "v"],
            "periods": [
                {"aware": ["c"], "measure": [{"formula": "c", "mass": "1/3"},
                                             {"formula": "!c", "mass": "2/3"}]},
                {"aware": ["c", "v"], "measure": [{"event": ["c&!v"], "mass": "1/3"},
                                                  {"event": ["!c&!v"], "mass": "2/3"}]}
            ]
        }"#;
        let s = Scenario::from_json(text).unwrap();
        assert_eq!(s.measures[1].masses(), [rat(2, 3), rat(1, 3), rat(0, 1), rat(0, 1)]);
        assert_eq!(s.event("c & !v").unwrap().iter().collect::<Vec<_>>(), [1]);
        let back = Scenario::from_file(&s.to_state_file()).unwrap();
        assert_eq!(back.measures, s.measures);
    }

    #[test]
    fn utility_block() {
        let text = EXAMPLE.replacen(
            "\"periods\"",
            "\"utility\": {\"ticket\": \"1\", \"nothing\": \"0\", \"worst\": \"nothing\"}, \"periods\"",
            1,
        );
        let s = Scenario::from_json(&text).unwrap();
        assert_eq!(s.utility.unwrap().worst(), "nothing");
    }

    #[test]
    fn expansion() {
        let text = r#"{
            "states": ["a", "b"],
            "expansion_states": ["z"],
            "periods": [
                {"measure": [{"event": ["a"], "mass": "1/2"}, {"event": ["b"], "mass": "1/2"}]},
                {"measure": [{"event": ["a"], "mass": "1/4"}, {"event": ["b"], "mass": "1/4"},
                             {"event": ["z"], "mass": "1/2"}]}
            ]
        }"#;
        let s = Scenario::from_json(text).unwrap();
        assert!(s.is_expanding());
        assert_eq!(s.measures[1].algebra().space().len(), 3);
        assert!(s.chain().is_err());
        let back = Scenario::from_file(&s.to_state_file()).unwrap();
        assert_eq!(back.measures, s.measures);
    }
}
