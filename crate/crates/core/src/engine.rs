//! Extended Bayesian updates between measures on nested algebras.
//!
//! A prior on a coarse algebra and a posterior on a finer one are related by
//! an extended Bayesian update when some extension of the prior to the fine
//! algebra, conditioned on the posterior's support, reproduces the posterior.
//! On finite spaces this is decided by the commensurability conditions:
//!
//! * absolute continuity: `π0(F) = 0 ⟹ π1(F) = 0` for coarse `F`;
//! * ratio dominance: `π0(E)·π1(F) ≤ π1(E)·π0(F)` for coarse `E ⊆ S1` and any
//!   coarse `F`.
//!
//! Both are bilinear in the events, so quantifying over atoms suffices.

use std::fmt;

use num_traits::Zero;

use crate::algebra::{Algebra, Event};
use crate::error::{Error, Result};
use crate::measure::{ExtensionVertices, Measure};
use crate::rational::Rational;

/// A prior and a posterior on a refinement of the prior's algebra.
#[derive(Debug, Clone)]
pub struct UpdatePair {
    prior: Measure,
    posterior: Measure,
    /// Coarse atom containing each fine atom.
    parents: Vec<usize>,
}

impl UpdatePair {
    pub fn new(prior: Measure, posterior: Measure) -> Result<UpdatePair> {
        let parents = posterior.algebra().parents(prior.algebra())?;
        Ok(UpdatePair {
            prior,
            posterior,
            parents,
        })
    }

    pub fn prior(&self) -> &Measure {
        &self.prior
    }

    pub fn posterior(&self) -> &Measure {
        &self.posterior
    }

    pub fn coarse(&self) -> &Algebra {
        self.prior.algebra()
    }

    pub fn fine(&self) -> &Algebra {
        self.posterior.algebra()
    }

    /// The posterior's support `S1`.
    pub fn evidence(&self) -> Event {
        self.posterior.support()
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    /// Posterior mass of each coarse atom.
    pub fn posterior_on_coarse(&self) -> Vec<Rational> {
        let mut masses = vec![Rational::zero(); self.coarse().num_atoms()];
        for (f, &p) in self.parents.iter().enumerate() {
            masses[p] += self.posterior.atom_mass(f);
        }
        masses
    }

    /// Whether coarse atom `c` lies inside the posterior's support.
    fn coarse_atom_in_evidence(&self, c: usize) -> bool {
        self.parents
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p == c)
            .all(|(f, _)| !self.posterior.atom_mass(f).is_zero())
    }
}

/// The condition a pair or candidate witness fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Coarse event with prior mass 0 but positive posterior mass.
    C1 { event: Event, posterior_mass: Rational },
    /// `π0(E)·π1(F) > π1(E)·π0(F)` with `E` inside the evidence.
    C2 {
        e: Event,
        f: Event,
        lhs: Rational,
        rhs: Rational,
    },
    /// The candidate does not extend the prior on this coarse atom.
    Eb1 {
        atom: Event,
        expected: Rational,
        actual: Rational,
    },
    /// The candidate gives the evidence zero mass although its outer prior
    /// measure is positive.
    Eb2NullEvidence,
    /// Conditioning the candidate on the evidence misses the posterior here.
    Eb2 {
        atom: Event,
        expected: Rational,
        actual: Rational,
    },
    /// Expanded-space posterior gives the original space zero mass.
    NullOriginalSpace,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::C1 {
                event,
                posterior_mass,
            } => write!(f, "c1: prior mass 0 but posterior mass {posterior_mass} on {event:?}"),
            Violation::C2 { e, f: ff, lhs, rhs } => {
                write!(f, "c2: π0(E)π1(F) = {lhs} > {rhs} = π1(E)π0(F) for E={e:?}, F={ff:?}")
            }
            Violation::Eb1 {
                atom,
                expected,
                actual,
            } => write!(f, "eb1: candidate gives {actual}, prior {expected} on {atom:?}"),
            Violation::Eb2NullEvidence => write!(f, "eb2: candidate gives the evidence mass 0"),
            Violation::Eb2 {
                atom,
                expected,
                actual,
            } => write!(f, "eb2: conditional gives {actual}, posterior {expected} on {atom:?}"),
            Violation::NullOriginalSpace => {
                write!(f, "posterior gives the original state space mass 0")
            }
        }
    }
}

/// Outcome of the commensurability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commensurability {
    pub holds: bool,
    pub violation: Option<Violation>,
    /// `min π0(F)/π1(F)` over coarse atoms with positive posterior mass; the
    /// largest admissible witness mass on the evidence.
    pub inf_ratio: Rational,
}

pub fn check_commensurate(pair: &UpdatePair) -> Commensurability {
    let coarse = pair.coarse();
    let p0 = pair.prior().masses();
    let p1 = pair.posterior_on_coarse();

    let inf_ratio = (0..p0.len())
        .filter(|&c| !p1[c].is_zero())
        .map(|c| &p0[c] / &p1[c])
        .min()
        .expect("a probability measure has positive mass somewhere");

    let violation = (|| {
        for c in 0..p0.len() {
            if p0[c].is_zero() && !p1[c].is_zero() {
                return Some(Violation::C1 {
                    event: coarse.atom(c).clone(),
                    posterior_mass: p1[c].clone(),
                });
            }
        }
        for e in (0..p0.len()).filter(|&e| pair.coarse_atom_in_evidence(e)) {
            for f in 0..p0.len() {
                let lhs = &p0[e] * &p1[f];
                let rhs = &p1[e] * &p0[f];
                if lhs > rhs {
                    return Some(Violation::C2 {
                        e: coarse.atom(e).clone(),
                        f: coarse.atom(f).clone(),
                        lhs,
                        rhs,
                    });
                }
            }
        }
        None
    })();

    Commensurability {
        holds: violation.is_none(),
        violation,
        inf_ratio,
    }
}

/// An interim measure on the fine algebra certifying an extended Bayesian
/// update, together with the mass it puts on the evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub interim: Measure,
    pub beta: Rational,
}

/// Builds the canonical witness for a commensurate pair.
///
/// The evidence mass `β` is `π0(E)/π1(E)` for any coarse atom `E` inside the
/// evidence, or the infimum ratio when the evidence contains no coarse atom.
/// Inside the evidence the witness is `β·π1`; each coarse atom's remaining
/// mass is spread evenly over its fine atoms outside the evidence.
pub fn construct_witness(pair: &UpdatePair) -> Result<Witness> {
    let evidence = pair.evidence();
    if pair.prior().outer_measure(&evidence)?.is_zero() {
        return Err(Error::TriviallyConditioned);
    }
    let verdict = check_commensurate(pair);
    if let Some(v) = verdict.violation {
        return Err(Error::NotCommensurate(v));
    }

    let p0 = pair.prior().masses();
    let p1 = pair.posterior_on_coarse();
    let beta = (0..p0.len())
        .find(|&c| pair.coarse_atom_in_evidence(c))
        .map(|c| &p0[c] / &p1[c])
        .unwrap_or(verdict.inf_ratio);

    let posterior = pair.posterior();
    let fine = pair.fine();
    let mut interim: Vec<Rational> = posterior.masses().iter().map(|m| &beta * m).collect();
    let mut outside: Vec<Vec<usize>> = vec![Vec::new(); p0.len()];
    for (f, &c) in pair.parents().iter().enumerate() {
        if posterior.atom_mass(f).is_zero() {
            outside[c].push(f);
        }
    }
    for (c, cells) in outside.iter().enumerate() {
        let residual = &p0[c] - &beta * &p1[c];
        if cells.is_empty() {
            debug_assert!(residual.is_zero(), "coarse atom inside evidence keeps a residual");
            continue;
        }
        let share = residual / Rational::from_integer(cells.len().into());
        for &f in cells {
            interim[f] = share.clone();
        }
    }

    Ok(Witness {
        interim: Measure::new_unchecked(fine.clone(), interim),
        beta,
    })
}

/// Outcome of checking a candidate witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub holds: bool,
    pub violation: Option<Violation>,
}

pub fn verify_witness(pair: &UpdatePair, candidate: &Measure) -> Result<Verification> {
    if candidate.algebra() != pair.fine() {
        return Err(Error::InvalidMeasure(
            "candidate witness must live on the posterior's algebra".into(),
        ));
    }
    let fail = |v| Ok(Verification {
        holds: false,
        violation: Some(v),
    });

    let restricted = candidate.restrict(pair.coarse())?;
    for (c, (actual, expected)) in restricted.masses().iter().zip(pair.prior().masses()).enumerate() {
        if actual != expected {
            return fail(Violation::Eb1 {
                atom: pair.coarse().atom(c).clone(),
                expected: expected.clone(),
                actual: actual.clone(),
            });
        }
    }

    let evidence = pair.evidence();
    if !pair.prior().outer_measure(&evidence)?.is_zero() {
        let evidence_mass = candidate.mass(&evidence)?;
        if evidence_mass.is_zero() {
            return fail(Violation::Eb2NullEvidence);
        }
        let conditioned = candidate.conditional(&evidence)?;
        for (f, (actual, expected)) in conditioned
            .masses()
            .iter()
            .zip(pair.posterior().masses())
            .enumerate()
        {
            if actual != expected {
                return fail(Violation::Eb2 {
                    atom: pair.fine().atom(f).clone(),
                    expected: expected.clone(),
                    actual: actual.clone(),
                });
            }
        }
    }
    Ok(Verification {
        holds: true,
        violation: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UpdateStatus {
    /// Same algebra and the posterior is literally the prior conditioned on
    /// the evidence.
    Bayesian,
    EbPositive,
    /// The evidence has outer prior measure 0: anything goes.
    EbTrivial,
    Fails,
}

impl UpdateStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            UpdateStatus::Bayesian => "BAYESIAN",
            UpdateStatus::EbPositive => "EB_POSITIVE",
            UpdateStatus::EbTrivial => "EB_TRIVIAL",
            UpdateStatus::Fails => "FAILS",
        }
    }

    pub fn satisfies_eb(self) -> bool {
        self != UpdateStatus::Fails
    }
}

impl fmt::Display for UpdateStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateReport {
    pub status: UpdateStatus,
    pub witness: Option<Witness>,
    pub violation: Option<Violation>,
    pub evidence: Event,
    pub evidence_outer_measure: Rational,
    pub inf_ratio: Rational,
    pub completely_nonmeasurable: bool,
    pub reverse_bayesian: bool,
}

pub fn classify_update(pair: &UpdatePair) -> UpdateReport {
    let evidence = pair.evidence();
    let outer = pair
        .prior()
        .outer_measure(&evidence)
        .expect("evidence lives on the pair's space");
    let completely_nonmeasurable = pair
        .coarse()
        .is_completely_nonmeasurable(&evidence)
        .expect("support of a probability measure is nonempty");
    let reverse_bayesian = pair
        .posterior()
        .extends(pair.prior())
        .expect("pair algebras are nested");
    let verdict = check_commensurate(pair);

    let mut report = UpdateReport {
        status: UpdateStatus::Fails,
        witness: None,
        violation: None,
        evidence,
        evidence_outer_measure: outer,
        inf_ratio: verdict.inf_ratio.clone(),
        completely_nonmeasurable,
        reverse_bayesian,
    };

    if report.evidence_outer_measure.is_zero() {
        report.status = UpdateStatus::EbTrivial;
    } else if let Some(v) = verdict.violation {
        report.violation = Some(v);
    } else {
        let witness = construct_witness(pair).expect("commensurate pairs admit a witness");
        let literal_bayes = pair.coarse() == pair.fine()
            && pair
                .prior()
                .conditional(&report.evidence)
                .is_ok_and(|c| &c == pair.posterior());
        report.status = if literal_bayes {
            UpdateStatus::Bayesian
        } else {
            UpdateStatus::EbPositive
        };
        report.witness = Some(witness);
    }
    report
}

/// Generalized check when the posterior lives on an expanded state space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GebReport {
    pub status: UpdateStatus,
    /// Posterior mass of the original space.
    pub original_mass: Rational,
    /// The posterior conditioned on, and traced onto, the original space.
    pub conditioned: Option<Measure>,
    pub report: Option<UpdateReport>,
    pub violation: Option<Violation>,
    pub generalized_reverse_bayesian: bool,
}

/// `prior` lives on the original space, `posterior` on an expanded space whose
/// labels include every original label.
pub fn check_geb(prior: &Measure, posterior: &Measure) -> Result<GebReport> {
    let original = prior.algebra().space();
    let expanded = posterior.algebra().space();
    let mut embedding = Vec::with_capacity(original.len());
    for label in original.labels() {
        let idx = expanded
            .index_of(label)
            .ok_or_else(|| Error::Embedding(format!("state `{label}` missing")))?;
        embedding.push(idx);
    }
    let omega = Event::from_indices(expanded.len(), embedding.iter().copied())?;
    let fine = posterior.algebra();
    if !fine.is_measurable(&omega)? {
        return Err(Error::Embedding(
            "original space is not an event of the expanded algebra".into(),
        ));
    }

    let original_mass = posterior.mass(&omega)?;
    if original_mass.is_zero() {
        return Ok(GebReport {
            status: UpdateStatus::Fails,
            original_mass,
            conditioned: None,
            report: None,
            violation: Some(Violation::NullOriginalSpace),
            generalized_reverse_bayesian: false,
        });
    }

    let mut back = vec![usize::MAX; expanded.len()];
    for (i, &j) in embedding.iter().enumerate() {
        back[j] = i;
    }
    let mut blocks = Vec::new();
    let mut masses = Vec::new();
    for a in fine.atoms_within(&omega)? {
        let block = Event::from_indices(original.len(), fine.atom(a).iter().map(|s| back[s]))?;
        blocks.push(block);
        masses.push(posterior.atom_mass(a) / &original_mass);
    }
    // Canonical atom order on the original space may differ from the
    // expanded one; pair masses with their blocks before sorting.
    let mut cells: Vec<(Event, Rational)> = blocks.into_iter().zip(masses).collect();
    cells.sort_by_key(|(b, _)| b.first());
    let (blocks, masses): (Vec<_>, Vec<_>) = cells.into_iter().unzip();
    let trace = Algebra::new(original.clone(), blocks)?;
    let conditioned = Measure::new_unchecked(trace, masses);

    let pair = UpdatePair::new(prior.clone(), conditioned.clone())?;
    let report = classify_update(&pair);
    let generalized_reverse_bayesian =
        conditioned.algebra() == prior.algebra() && report.status.satisfies_eb();
    Ok(GebReport {
        status: report.status,
        original_mass,
        conditioned: Some(conditioned),
        violation: report.violation.clone(),
        report: Some(report),
        generalized_reverse_bayesian,
    })
}

/// Measures over increasingly fine algebras on one state space.
#[derive(Debug, Clone)]
pub struct Chain {
    measures: Vec<Measure>,
}

impl Chain {
    pub fn new(measures: Vec<Measure>) -> Result<Chain> {
        if measures.is_empty() {
            return Err(Error::EmptyChain);
        }
        for w in measures.windows(2) {
            if !w[1].algebra().refines(w[0].algebra())? {
                return Err(Error::NotARefinement);
            }
        }
        Ok(Chain { measures })
    }

    pub fn measures(&self) -> &[Measure] {
        &self.measures
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn pair(&self, from: usize, to: usize) -> UpdatePair {
        UpdatePair::new(self.measures[from].clone(), self.measures[to].clone())
            .expect("chain algebras are nested")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub from: usize,
    pub to: usize,
    pub report: UpdateReport,
}

/// Classifies every pair `(n, m)` with `n < m` directly.
pub fn chain_reports(chain: &Chain) -> Vec<PairReport> {
    let n = chain.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for from in 0..n {
        for to in from + 1..n {
            out.push(PairReport {
                from,
                to,
                report: classify_update(&chain.pair(from, to)),
            });
        }
    }
    out
}

/// Pairwise reports plus one measure on the finest algebra that, conditioned
/// on each period's support and restricted to that period's algebra,
/// recovers every period's measure.
///
/// Built by witnessing each link from the previous link's witness.
pub fn chain_common_witness(chain: &Chain) -> Result<(Vec<PairReport>, Measure)> {
    for i in 0..chain.len() - 1 {
        let report = classify_update(&chain.pair(i, i + 1));
        match report.status {
            UpdateStatus::EbTrivial => return Err(Error::TrivialLink { index: i }),
            UpdateStatus::Fails => {
                return Err(Error::BrokenLink {
                    index: i,
                    violation: report.violation.expect("failing reports carry a violation"),
                })
            }
            _ => {}
        }
    }

    let mut common = chain.measures()[0].clone();
    for (i, next) in chain.measures().iter().enumerate().skip(1) {
        let pair = UpdatePair::new(common, next.clone())?;
        common = match construct_witness(&pair) {
            Ok(w) => w.interim,
            Err(Error::NotCommensurate(violation)) => {
                return Err(Error::BrokenLink {
                    index: i - 1,
                    violation,
                })
            }
            Err(Error::TriviallyConditioned) => return Err(Error::TrivialLink { index: i - 1 }),
            Err(e) => return Err(e),
        };
    }
    Ok((chain_reports(chain), common))
}

/// Checks `common(· | S_n)` restricted to `Σ_n` equals `π_n` for every period.
/// Returns the first failing period.
pub fn common_witness_mismatch(chain: &Chain, common: &Measure) -> Result<Option<usize>> {
    for (n, measure) in chain.measures().iter().enumerate() {
        let support = measure.support();
        let ok = match common.conditional(&support) {
            Ok(c) => &c.restrict(measure.algebra())? == measure,
            Err(Error::ZeroMassConditioning) => false,
            Err(e) => return Err(e),
        };
        if !ok {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Lower and upper envelope of a conditional probability over all extensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub inner: Rational,
    pub outer: Rational,
}

impl Bounds {
    pub fn contains(&self, value: &Rational) -> bool {
        &self.inner <= value && value <= &self.outer
    }
}

/// Inner and outer conditional probability of `target` given `given` over
/// every extension of `prior` to `fine`.
///
/// The ratio is linear-fractional over a product of simplices, and it is
/// constant along any edge into a vertex where the denominator vanishes, so
/// the extrema sit at extension vertices with positive denominator.
pub fn conditional_bounds(
    prior: &Measure,
    fine: &Algebra,
    given: &Event,
    target: &Event,
    vertex_cap: u64,
) -> Result<Bounds> {
    if !fine.is_measurable(given)? || !fine.is_measurable(target)? {
        return Err(Error::NotMeasurable);
    }
    if prior.outer_measure(given)?.is_zero() {
        return Err(Error::TriviallyConditioned);
    }
    let both = given.intersection(target);
    let in_given: Vec<bool> = fine.atoms().iter().map(|a| a.is_subset(given)).collect();
    let in_both: Vec<bool> = fine.atoms().iter().map(|a| a.is_subset(&both)).collect();
    let p0 = prior.masses();

    let mut bounds: Option<Bounds> = None;
    for assignment in ExtensionVertices::new(prior, fine, vertex_cap)? {
        let mut den = Rational::zero();
        let mut num = Rational::zero();
        for (c, &f) in assignment.iter().enumerate() {
            if in_given[f] {
                den += &p0[c];
                if in_both[f] {
                    num += &p0[c];
                }
            }
        }
        if den.is_zero() {
            continue;
        }
        let ratio = num / den;
        bounds = Some(match bounds {
            None => Bounds {
                inner: ratio.clone(),
                outer: ratio,
            },
            Some(b) => Bounds {
                inner: b.inner.min(ratio.clone()),
                outer: b.outer.max(ratio),
            },
        });
    }
    Ok(bounds.expect("positive outer measure gives some vertex a positive denominator"))
}

/// Convenience: does every atom-level conditional of the posterior lie within
/// the envelopes of the prior given the evidence?
pub fn within_envelopes(pair: &UpdatePair, vertex_cap: u64) -> Result<bool> {
    let evidence = pair.evidence();
    for (f, atom) in pair.fine().atoms().iter().enumerate() {
        let b = conditional_bounds(pair.prior(), pair.fine(), &evidence, atom, vertex_cap)?;
        if !b.contains(pair.posterior().atom_mass(f)) {
            return Ok(false);
        }
    }
    Ok(true)
}
