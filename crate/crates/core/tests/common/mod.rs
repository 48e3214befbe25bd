//! Brute-force oracles shared by the integration suites. Events are `u32`
//! bitmasks over at most 32 states; nothing here calls the engine's own
//! decision procedures.

#![allow(dead_code)]

use extbayes::logic::Formula;
use extbayes::rational::{zero, Rational};
use extbayes::{Algebra, Event, Measure, UpdatePair};
use num_traits::Zero;
use rand::Rng;

pub fn mask(event: &Event) -> u32 {
    event.iter().fold(0, |m, s| m | 1 << s)
}

pub fn event(n: usize, mask: u32) -> Event {
    Event::from_indices(n, (0..n).filter(|s| mask >> s & 1 == 1)).unwrap()
}

pub fn atom_masks(algebra: &Algebra) -> Vec<u32> {
    algebra.atoms().iter().map(mask).collect()
}

/// Every union of atoms.
pub fn unions(atoms: &[u32]) -> Vec<u32> {
    (0u32..1 << atoms.len())
        .map(|pick| (0..atoms.len()).filter(|i| pick >> i & 1 == 1).fold(0, |m, i| m | atoms[i]))
        .collect()
}

/// Smallest union of atoms containing `ev`, by intersecting every union
/// that contains it.
pub fn hull(atoms: &[u32], ev: u32) -> u32 {
    unions(atoms).into_iter().filter(|u| u & ev == ev).fold(u32::MAX, |h, u| h & u)
}

/// Mass of a measurable event: atoms inside it.
pub fn mass_of(atoms: &[u32], masses: &[Rational], ev: u32) -> Rational {
    atoms
        .iter()
        .zip(masses)
        .filter(|(a, _)| *a & ev == **a)
        .map(|(_, m)| m.clone())
        .sum()
}

/// Plain-data copy of an update pair.
#[derive(Debug, Clone)]
pub struct Plain {
    pub n: usize,
    pub coarse: Vec<u32>,
    pub p0: Vec<Rational>,
    pub fine: Vec<u32>,
    pub p1: Vec<Rational>,
}

impl Plain {
    pub fn new(pair: &UpdatePair) -> Plain {
        Plain {
            n: pair.coarse().space().len(),
            coarse: atom_masks(pair.coarse()),
            p0: pair.prior().masses().to_vec(),
            fine: atom_masks(pair.fine()),
            p1: pair.posterior().masses().to_vec(),
        }
    }

    pub fn mass0(&self, ev: u32) -> Rational {
        mass_of(&self.coarse, &self.p0, ev)
    }

    pub fn mass1(&self, ev: u32) -> Rational {
        mass_of(&self.fine, &self.p1, ev)
    }

    /// Posterior support: fine atoms with positive mass.
    pub fn s1(&self) -> u32 {
        self.fine
            .iter()
            .zip(&self.p1)
            .filter(|(_, m)| !m.is_zero())
            .fold(0, |s, (a, _)| s | a)
    }

    /// Outer prior measure: least mass of a coarse event containing `ev`.
    pub fn outer0(&self, ev: u32) -> Rational {
        unions(&self.coarse)
            .into_iter()
            .filter(|u| u & ev == ev)
            .map(|u| self.mass0(u))
            .min()
            .unwrap()
    }

    /// Absolute continuity over every coarse event.
    pub fn c1(&self) -> bool {
        unions(&self.coarse)
            .into_iter()
            .all(|f| !self.mass0(f).is_zero() || self.mass1(f).is_zero())
    }

    /// Ratio condition over every pair of coarse events with `E ⊆ S1`.
    pub fn c2(&self) -> bool {
        let s1 = self.s1();
        let events = unions(&self.coarse);
        events.iter().filter(|&&e| e & s1 == e).all(|&e| {
            let (p0e, p1e) = (self.mass0(e), self.mass1(e));
            events
                .iter()
                .all(|&f| &p0e * self.mass1(f) <= &p1e * self.mass0(f))
        })
    }

    pub fn commensurate(&self) -> bool {
        self.c1() && self.c2()
    }

    /// Feasible witness masses `β = π̄(S1)`: `β·π1(B) ≤ π0(B)` for every
    /// coarse atom `B`, with equality when `B ⊆ S1`. Returns the largest
    /// feasible `β`, if any is positive.
    pub fn max_feasible_beta(&self) -> Option<Rational> {
        let s1 = self.s1();
        let mut upper: Option<Rational> = None;
        let mut fixed: Option<Rational> = None;
        for (b, p0) in self.coarse.iter().zip(&self.p0) {
            let p1 = self.mass1(*b);
            if b & s1 == *b {
                let beta = p0 / &p1;
                if fixed.as_ref().is_some_and(|f| *f != beta) {
                    return None;
                }
                fixed = Some(beta);
            } else if !p1.is_zero() {
                let ratio = p0 / &p1;
                upper = Some(match upper {
                    Some(u) if u <= ratio => u,
                    _ => ratio,
                });
            }
        }
        let beta = match (fixed, upper) {
            (Some(f), Some(u)) if f > u => return None,
            (Some(f), _) => f,
            (None, Some(u)) => u,
            (None, None) => unreachable!("posterior has mass somewhere"),
        };
        (beta > zero()).then_some(beta)
    }

    /// Does `f` contain a nonempty fine event that is posterior-null yet
    /// has positive outer prior measure?
    pub fn has_discarded(&self, f: u32) -> bool {
        let inside: Vec<u32> = self.fine.iter().copied().filter(|a| a & f == *a).collect();
        unions(&inside)
            .into_iter()
            .filter(|&g| g != 0)
            .any(|g| self.mass1(g).is_zero() && !self.outer0(g).is_zero())
    }
}

/// Reversal between bets on coarse `E` and `F` by a scan over candidate
/// prize ratios `λ`: some `λ ≥ 0` with `λ·π0(F) ≥ π0(E)` and
/// `π1(E) > λ·π1(F)`.
pub fn reversal_by_scan(p0e: &Rational, p0f: &Rational, p1e: &Rational, p1f: &Rational) -> bool {
    let mut candidates: Vec<Rational> = (0..=96).map(|j| Rational::new(j.into(), 8.into())).collect();
    if !p0f.is_zero() {
        candidates.push(p0e / p0f);
    }
    candidates
        .iter()
        .any(|l| l * p0f >= *p0e && *p1e > l * p1f)
}

/// Extrema of `π̄(target | given)` over a grid of splittings of each prior
/// atom among its fine children, `steps` per unit.
pub fn grid_bounds(prior: &Measure, fine: &Algebra, given: u32, target: u32, steps: u32) -> Option<(Rational, Rational)> {
    let coarse = atom_masks(prior.algebra());
    let fine_atoms = atom_masks(fine);
    let mut blocks: Vec<(Rational, Vec<u32>)> = Vec::new();
    for (c, m) in coarse.iter().zip(prior.masses()) {
        if m.is_zero() {
            continue;
        }
        let children: Vec<u32> = fine_atoms.iter().copied().filter(|a| a & c == *a).collect();
        blocks.push((m.clone(), children));
    }
    let splits: Vec<Vec<Vec<u32>>> = blocks
        .iter()
        .map(|(_, children)| compositions(steps, children.len()))
        .collect();

    let mut best: Option<(Rational, Rational)> = None;
    let mut pick = vec![0usize; blocks.len()];
    loop {
        let mut den = Rational::zero();
        let mut num = Rational::zero();
        for (i, (m, children)) in blocks.iter().enumerate() {
            for (a, &w) in children.iter().zip(&splits[i][pick[i]]) {
                let mass = m * Rational::new(w.into(), steps.into());
                if a & given == *a {
                    if a & target == *a {
                        num += &mass;
                    }
                    den += mass;
                }
            }
        }
        if !den.is_zero() {
            let r = num / den;
            best = Some(match best {
                None => (r.clone(), r),
                Some((lo, hi)) => (lo.min(r.clone()), hi.max(r)),
            });
        }
        // Odometer over the per-block grids.
        let mut i = 0;
        loop {
            if i == pick.len() {
                return best;
            }
            pick[i] += 1;
            if pick[i] < splits[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// All ways to write `total` as an ordered sum of `parts` naturals.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Truth-table evaluation in valuation `v` (bit `i` = proposition `i`).
pub fn holds(f: &Formula, props: &[String], v: u32) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Prop(p) => {
            let i = props.iter().position(|q| q == p).unwrap();
            v >> i & 1 == 1
        }
        Formula::Not(x) => !holds(x, props, v),
        Formula::And(a, b) => holds(a, props, v) && holds(b, props, v),
    }
}

pub fn random_formula<R: Rng>(rng: &mut R, props: &[String], depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::Prop(props[rng.gen_range(0..props.len())].clone()),
        };
    }
    match rng.gen_range(0..3) {
        0 => random_formula(rng, props, depth - 1).not(),
        _ => random_formula(rng, props, depth - 1).and(random_formula(rng, props, depth - 1)),
    }
}

pub fn prop_names(k: usize) -> Vec<String> {
    ["rain", "cold", "wind", "fog", "p4", "p5"][..k].iter().map(|s| s.to_string()).collect()
}
