//! Commands behind the CLI and the C interface. Each returns a JSON report
//! and whether the checked property holds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::decision::{bet_value, check_extension_consistency, Bet};
use crate::engine::{
    chain_common_witness, chain_reports, check_geb, classify_update, common_witness_mismatch, conditional_bounds,
    verify_witness, UpdateStatus,
};
use crate::error::{Error, Result};
use crate::measure::DEFAULT_VERTEX_CAP;
use crate::report;
use crate::sample::{random_chain, random_pair, PairConfig};
use crate::scenario::{state_file, Scenario};

/// Process exit codes.
pub mod exit {
    pub const HOLDS: i32 = 0;
    pub const FAILS: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const RESOURCE_CAP: i32 = 3;
}

/// Exit code for an error: resource caps get their own code, everything
/// else is bad input.
pub fn error_code(err: &Error) -> i32 {
    if err.is_resource_cap() {
        exit::RESOURCE_CAP
    } else {
        exit::INPUT
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub holds: bool,
    pub report: Value,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.holds {
            exit::HOLDS
        } else {
            exit::FAILS
        }
    }
}

fn value<T: serde::Serialize>(x: T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// Classifies the update from period 0 to period 1.
pub fn check(s: &Scenario) -> Result<Outcome> {
    if s.is_expanding() {
        let r = check_geb(&s.measures[0], period(s, 1)?)?;
        return Ok(Outcome {
            holds: r.status.satisfies_eb(),
            report: json!({"command": "check", "generalized": report::geb(&s.space, &r)}),
        });
    }
    let r = classify_update(&s.first_pair()?);
    Ok(Outcome {
        holds: r.status.satisfies_eb(),
        report: json!({"command": "check", "update": report::update(&s.space, &r)}),
    })
}

fn period(s: &Scenario, t: usize) -> Result<&crate::Measure> {
    s.measures
        .get(t)
        .ok_or_else(|| Error::Scenario(format!("this command needs period {t}")))
}

/// Builds the canonical witness and verifies it independently.
pub fn witness(s: &Scenario) -> Result<Outcome> {
    let (pair, r) = if s.is_expanding() {
        let geb = check_geb(&s.measures[0], period(s, 1)?)?;
        match (geb.conditioned, geb.report) {
            (Some(conditioned), Some(r)) => (crate::UpdatePair::new(s.measures[0].clone(), conditioned)?, r),
            _ => {
                return Ok(Outcome {
                    holds: false,
                    report: json!({
                        "command": "witness",
                        "status": geb.status.as_str(),
                        "witness": null,
                        "verified": false,
                        "violation": geb.violation.as_ref().map(|v| report::violation(&s.space, v)),
                    }),
                })
            }
        }
    } else {
        let pair = s.first_pair()?;
        let r = classify_update(&pair);
        (pair, r)
    };

    let verified = match &r.witness {
        Some(w) => Some(verify_witness(&pair, &w.interim)?),
        None => None,
    };
    let note = (r.status == UpdateStatus::EbTrivial)
        .then_some("evidence has outer prior measure 0: every extension is a witness, none is canonical");
    let holds = match r.status {
        UpdateStatus::Fails => false,
        UpdateStatus::EbTrivial => true,
        _ => verified.as_ref().is_some_and(|v| v.holds),
    };
    let violation = r
        .violation
        .as_ref()
        .or(verified.as_ref().and_then(|v| v.violation.as_ref()))
        .map(|v| report::violation(&s.space, v));
    Ok(Outcome {
        holds,
        report: json!({
            "command": "witness",
            "status": r.status.as_str(),
            "witness": r.witness.as_ref().map(report::witness),
            "verified": verified.map(|v| v.holds),
            "violation": violation,
            "note": note,
        }),
    })
}

/// All pair reports plus a common witness for the whole chain.
pub fn chain(s: &Scenario) -> Result<Outcome> {
    let chain = s.chain()?;
    let pairs = chain_reports(&chain);
    let all_eb = pairs.iter().all(|p| p.report.status.satisfies_eb());
    let (common, problem) = match chain_common_witness(&chain) {
        Ok((_, common)) => match common_witness_mismatch(&chain, &common)? {
            None => (Some(common), None),
            Some(n) => (Some(common), Some(format!("common witness misses period {n}"))),
        },
        Err(e @ (Error::TrivialLink { .. } | Error::BrokenLink { .. })) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let holds = all_eb && problem.is_none();
    let pairs: Vec<_> = pairs.iter().map(|p| report::pair(&s.space, p)).collect();
    Ok(Outcome {
        holds,
        report: json!({
            "command": "chain",
            "periods": chain.len(),
            "pairs": pairs,
            "common_witness": common.as_ref().map(report::measure),
            "common_witness_error": problem,
        }),
    })
}

/// Inner and outer conditional probability of `target` given `given` over
/// extensions of the period-0 prior to the period-1 algebra.
pub fn bounds(s: &Scenario, given: &str, target: &str, vertex_cap: Option<u64>) -> Result<Outcome> {
    let pair = s.first_pair()?;
    let given = s.event(given)?;
    let target = s.event(target)?;
    let b = conditional_bounds(
        pair.prior(),
        pair.fine(),
        &given,
        &target,
        vertex_cap.unwrap_or(DEFAULT_VERTEX_CAP),
    )?;
    let posterior = match pair.posterior().conditional(&given) {
        Ok(c) => Some(c.mass(&target)?),
        Err(Error::ZeroMassConditioning) => None,
        Err(e) => return Err(e),
    };
    let out = report::bounds(&s.space, &given, &target, &b, posterior.as_ref());
    Ok(Outcome {
        holds: out.within.unwrap_or(true),
        report: json!({"command": "bounds", "bounds": out}),
    })
}

/// Extension consistency of the betting preferences, plus a bet table when
/// the scenario has a utility index.
pub fn prefs(s: &Scenario) -> Result<Outcome> {
    let pair = s.first_pair()?;
    let r = check_extension_consistency(&pair)?;
    let bets = match &s.utility {
        None => None,
        Some(u) => {
            let mut rows = Vec::new();
            for prize in u.prizes().iter().filter(|p| *p != u.worst()) {
                for atom in pair.coarse().atoms() {
                    let bet = Bet {
                        prize: prize.clone(),
                        event: atom.clone(),
                    };
                    rows.push(report::BetRow {
                        prize: prize.clone(),
                        event: report::labels(&s.space, atom),
                        before: crate::rational::format(&bet_value(pair.prior(), u, &bet)?),
                        after: crate::rational::format(&bet_value(pair.posterior(), u, &bet)?),
                    });
                }
            }
            Some(rows)
        }
    };
    Ok(Outcome {
        holds: r.consistent,
        report: json!({
            "command": "prefs",
            "consistency": report::consistency(&s.space, &r),
            "bets": bets,
        }),
    })
}

/// The state-based scenario equivalent to `s`.
pub fn compile(s: &Scenario) -> Result<Outcome> {
    Ok(Outcome {
        holds: true,
        report: value(s.to_state_file()),
    })
}

/// A random state-based scenario. Two periods give a random pair (planted
/// extended Bayesian when `planted`); more give a chain whose links are all
/// extended Bayesian.
pub fn random(seed: u64, states: usize, periods: usize, planted: bool) -> Result<Outcome> {
    if !(2..=64).contains(&states) || periods == 0 {
        return Err(Error::Scenario("need 2..=64 states and at least one period".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let measures = if periods == 2 {
        let cfg = PairConfig {
            max_states: states,
            planted,
            ..PairConfig::default()
        };
        let pair = random_pair(&mut rng, &cfg);
        vec![pair.prior().clone(), pair.posterior().clone()]
    } else {
        random_chain(&mut rng, periods, states, 12).measures().to_vec()
    };
    Ok(Outcome {
        holds: true,
        report: value(state_file(&measures)),
    })
}
