//! Subjective expected utility bets and the extension-consistency test.
//!
//! A bet `x_E` pays prize `x` on `E` and the worst prize otherwise, so its
//! value under `(π, u)` is `u(x)·π(E)`. A preference reversal between bets on
//! coarse events `E` and `F` is possible iff some `λ ≥ 0` gives
//! `λ·π0(F) ≥ π0(E)` and `π1(E) > λ·π1(F)`.

use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::Event;
use crate::engine::UpdatePair;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest coarse algebra (in atoms) whose events are enumerated pairwise.
pub const MAX_CONSISTENCY_ATOMS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityIndex {
    prizes: Vec<String>,
    utils: Vec<Rational>,
    worst: usize,
}

impl UtilityIndex {
    pub fn new(prizes: Vec<(String, Rational)>, worst: &str) -> Result<UtilityIndex> {
        let mut names: Vec<String> = Vec::with_capacity(prizes.len());
        let mut utils = Vec::with_capacity(prizes.len());
        for (name, u) in prizes {
            if names.contains(&name) {
                return Err(Error::InvalidUtility(format!("duplicate prize `{name}`")));
            }
            if u < Rational::zero() {
                return Err(Error::InvalidUtility(format!("negative utility for `{name}`")));
            }
            names.push(name);
            utils.push(u);
        }
        let worst = names
            .iter()
            .position(|n| n == worst)
            .ok_or_else(|| Error::UnknownPrize(worst.to_string()))?;
        if !utils[worst].is_zero() {
            return Err(Error::InvalidUtility("the worst prize must have utility 0".into()));
        }
        if utils.iter().all(Zero::is_zero) {
            return Err(Error::InvalidUtility("some prize needs positive utility".into()));
        }
        Ok(UtilityIndex {
            prizes: names,
            utils,
            worst,
        })
    }

    pub fn prizes(&self) -> &[String] {
        &self.prizes
    }

    pub fn worst(&self) -> &str {
        &self.prizes[self.worst]
    }

    pub fn utility(&self, prize: &str) -> Result<&Rational> {
        self.prizes
            .iter()
            .position(|p| p == prize)
            .map(|i| &self.utils[i])
            .ok_or_else(|| Error::UnknownPrize(prize.to_string()))
    }
}

/// Pays `prize` on `event`, the worst prize elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bet {
    pub prize: String,
    pub event: Event,
}

pub fn bet_value(measure: &crate::measure::Measure, u: &UtilityIndex, bet: &Bet) -> Result<Rational> {
    let utility = u.utility(&bet.prize)?;
    Ok(utility * measure.mass(&bet.event)?)
}

/// The largest posterior-null sub-event of `f`, returned when its outer prior
/// measure is positive (so it is discarded).
///
/// Any discarded sub-event of `f` is posterior-null, hence inside this one,
/// and outer measure is monotone, so this certificate is maximal.
pub fn contains_discarded(pair: &UpdatePair, f: &Event) -> Result<Option<Event>> {
    let fine = pair.fine();
    if !fine.is_measurable(f)? {
        return Err(Error::NotMeasurable);
    }
    let null = fine
        .atoms_within(f)?
        .into_iter()
        .filter(|&a| pair.posterior().atom_mass(a).is_zero());
    let certificate = fine.union_of(null);
    if pair.prior().outer_measure(&certificate)?.is_zero() {
        Ok(None)
    } else {
        Ok(Some(certificate))
    }
}

/// Can some pair of prizes make `x_F ≽0 y_E` and `y_E ≻1 x_F`?
pub fn reversal_possible(pair: &UpdatePair, e: &Event, f: &Event) -> Result<bool> {
    let prior = pair.prior();
    let (p0e, p0f) = (prior.mass(e)?, prior.mass(f)?);
    let (p1e, p1f) = (pair.posterior().mass(e)?, pair.posterior().mass(f)?);
    Ok(reversal_closed_form(&p0e, &p0f, &p1e, &p1f))
}

fn reversal_closed_form<T>(p0e: &T, p0f: &T, p1e: &T, p1f: &T) -> bool
where
    T: Clone + Ord + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    p1e * p0f > p0e * p1f || (p0f.is_zero() && p0e.is_zero() && !p1e.is_zero())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReversalViolation {
    /// The event whose bet becomes strictly preferred.
    pub e: Event,
    /// The event losing appeal, which has no discarded sub-event.
    pub f: Event,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub violation: Option<ReversalViolation>,
}

/// Checks every pair of coarse events; the first violation in lexicographic
/// order (atom 0 as the lowest bit, `E` outer, `F` inner) is reported.
pub fn check_extension_consistency(pair: &UpdatePair) -> Result<ConsistencyReport> {
    let k = pair.coarse().num_atoms();
    if k > MAX_CONSISTENCY_ATOMS {
        return Err(Error::TooManyAtoms {
            atoms: k,
            cap: MAX_CONSISTENCY_ATOMS,
        });
    }
    let p0 = pair.prior().masses();
    let p1 = pair.posterior_on_coarse();

    // A coarse event holds a discarded sub-event iff one of its atoms has
    // positive prior mass and a posterior-null fine atom.
    let mut null_child = vec![false; k];
    for (f, &c) in pair.parents().iter().enumerate() {
        if pair.posterior().atom_mass(f).is_zero() {
            null_child[c] = true;
        }
    }
    let discarded_mask: usize = (0..k)
        .filter(|&c| null_child[c] && !p0[c].is_zero())
        .map(|c| 1 << c)
        .sum();

    let found = match (scaled::<i128>(p0), scaled::<i128>(&p1)) {
        (Some(a0), Some(a1)) => first_reversal(&a0, &a1, discarded_mask),
        _ => first_reversal(&scaled_big(p0), &scaled_big(&p1), discarded_mask),
    };

    Ok(match found {
        None => ConsistencyReport {
            consistent: true,
            violation: None,
        },
        Some((e, f)) => {
            let coarse = pair.coarse();
            let e = coarse.union_of((0..k).filter(|c| e >> c & 1 == 1));
            let f = coarse.union_of((0..k).filter(|c| f >> c & 1 == 1));
            let explanation = format!(
                "π0(E)={}, π0(F)={}, π1(E)={}, π1(F)={}: a bet on F can lose to a bet on E after the update, yet F has no discarded sub-event",
                pair.prior().mass(&e)?,
                pair.prior().mass(&f)?,
                pair.posterior().mass(&e)?,
                pair.posterior().mass(&f)?,
            );
            ConsistencyReport {
                consistent: false,
                violation: Some(ReversalViolation { e, f, explanation }),
            }
        }
    })
}

/// Per-mask masses over a common denominator. Comparisons in the closed form
/// are homogeneous of degree one in each measure, so the denominators cancel.
fn mask_sums<T>(atoms: &[T]) -> Vec<T>
where
    T: Clone + Zero + Add<Output = T>,
{
    let mut sums = vec![T::zero(); 1 << atoms.len()];
    for mask in 1..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)].clone() + atoms[low].clone();
    }
    sums
}

fn first_reversal<T>(atoms0: &[T], atoms1: &[T], discarded_mask: usize) -> Option<(usize, usize)>
where
    T: Clone + Ord + Zero + Add<Output = T>,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    let s0 = mask_sums(atoms0);
    let s1 = mask_sums(atoms1);
    let events = s0.len();
    for e in 0..events {
        for f in (0..events).filter(|f| f & discarded_mask == 0) {
            if reversal_closed_form(&s0[e], &s0[f], &s1[e], &s1[f]) {
                return Some((e, f));
            }
        }
    }
    None
}

fn common_denominator(masses: &[Rational]) -> BigInt {
    masses.iter().fold(BigInt::one(), |acc, m| acc.lcm(m.denom()))
}

fn scaled_big(masses: &[Rational]) -> Vec<BigInt> {
    let den = common_denominator(masses);
    masses
        .iter()
        .map(|m| (m * Rational::from_integer(den.clone())).to_integer())
        .collect()
}

/// Numerators over the common denominator, when the denominator fits in an
/// `i64` (so every pairwise product of subset sums fits in the target type).
fn scaled<T: From<i64>>(masses: &[Rational]) -> Option<Vec<T>> {
    common_denominator(masses).to_i64()?;
    scaled_big(masses)
        .iter()
        .map(|n| n.to_i64().map(T::from))
        .collect()
}
