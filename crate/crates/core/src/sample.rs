//! Seeded random instances for demos and property suites.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{Algebra, Event, StateSpace};
use crate::engine::{Chain, UpdatePair};
use crate::measure::Measure;
use crate::rational::{rat, zero, Rational};

/// States `w0 … w{n-1}`.
pub fn state_space(n: usize) -> Arc<StateSpace> {
    StateSpace::new((0..n).map(|i| format!("w{i}"))).expect("distinct labels")
}

pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, space: &Arc<StateSpace>) -> Algebra {
    let n = space.len();
    let k = rng.gen_range(1..=n);
    let mut blocks = vec![Event::empty(n); k];
    for s in 0..n {
        blocks[rng.gen_range(0..k)].insert(s);
    }
    blocks.retain(|b| !b.is_empty());
    Algebra::new(space.clone(), blocks).expect("a partition")
}

/// Splits each atom of `coarse` at random. With `strict`, at least one atom
/// splits; returns `None` when `coarse` is already discrete.
pub fn random_refinement<R: Rng + ?Sized>(rng: &mut R, coarse: &Algebra, strict: bool) -> Option<Algebra> {
    let n = coarse.space().len();
    let mut blocks = Vec::new();
    let mut split_any = false;
    for atom in coarse.atoms() {
        let members: Vec<usize> = atom.iter().collect();
        let j = rng.gen_range(1..=members.len());
        let mut parts = vec![Event::empty(n); j];
        for &s in &members {
            parts[rng.gen_range(0..j)].insert(s);
        }
        parts.retain(|p| !p.is_empty());
        split_any |= parts.len() > 1;
        blocks.extend(parts);
    }
    if strict && !split_any {
        let at = blocks.iter().position(|b| b.len() > 1)?;
        let s = blocks[at].first().expect("nonempty");
        blocks[at] = blocks[at].difference(&Event::singleton(n, s));
        blocks.push(Event::singleton(n, s));
    }
    Some(Algebra::new(coarse.space().clone(), blocks).expect("a partition"))
}

/// `k` masses `m_i / D` with `D ≤ max_den`, summing to one; zeros allowed.
pub fn random_masses<R: Rng + ?Sized>(rng: &mut R, k: usize, max_den: u32) -> Vec<Rational> {
    let den = rng.gen_range(1..=max_den.max(1));
    let mut units = vec![0i64; k];
    for _ in 0..den {
        units[rng.gen_range(0..k)] += 1;
    }
    units.into_iter().map(|u| rat(u, den as i64)).collect()
}

/// Like [`random_masses`] but every mass is positive; the denominator is at
/// least `k`.
pub fn random_positive_masses<R: Rng + ?Sized>(rng: &mut R, k: usize, max_den: u32) -> Vec<Rational> {
    let den = rng.gen_range(k as u32..=(max_den.max(k as u32)));
    let mut units = vec![1i64; k];
    for _ in k as u32..den {
        units[rng.gen_range(0..k)] += 1;
    }
    units.into_iter().map(|u| rat(u, den as i64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairConfig {
    pub max_states: usize,
    pub max_den: u32,
    /// Build the posterior by conditioning a random extension of the prior,
    /// so the pair is extended Bayesian by construction.
    pub planted: bool,
    /// Keep the posterior support free of any whole prior atom.
    pub completely_nonmeasurable: bool,
}

impl Default for PairConfig {
    fn default() -> Self {
        PairConfig {
            max_states: 8,
            max_den: 12,
            planted: false,
            completely_nonmeasurable: false,
        }
    }
}

/// Fine atoms allowed in the posterior support.
fn support_atoms<R: Rng + ?Sized>(rng: &mut R, coarse: &Algebra, fine: &Algebra, cnm: bool) -> Vec<usize> {
    let parents = fine.parents(coarse).expect("fine refines coarse");
    let mut chosen = Vec::new();
    for c in 0..coarse.num_atoms() {
        let children: Vec<usize> = (0..fine.num_atoms()).filter(|&f| parents[f] == c).collect();
        let keep = rng.gen_range(0.0..1.0);
        let mut picked: Vec<usize> = children.iter().copied().filter(|_| rng.gen_bool(keep)).collect();
        if cnm && picked.len() == children.len() {
            picked.remove(rng.gen_range(0..picked.len()));
        }
        chosen.extend(picked);
    }
    chosen.sort_unstable();
    chosen
}

pub fn random_pair<R: Rng + ?Sized>(rng: &mut R, cfg: &PairConfig) -> UpdatePair {
    loop {
        let n = rng.gen_range(2..=cfg.max_states.max(2));
        let space = state_space(n);
        let coarse = random_partition(rng, &space);
        let fine = random_refinement(rng, &coarse, false).expect("non-strict refinement exists");
        let support = support_atoms(rng, &coarse, &fine, cfg.completely_nonmeasurable);
        if support.is_empty() {
            continue;
        }
        let prior = Measure::new(coarse.clone(), random_masses(rng, coarse.num_atoms(), cfg.max_den))
            .expect("masses sum to one");

        let mut post = vec![zero(); fine.num_atoms()];
        let planted = cfg.planted.then(|| {
            let parents = fine.parents(&coarse).expect("fine refines coarse");
            let mut interim = vec![zero(); fine.num_atoms()];
            for c in 0..coarse.num_atoms() {
                let children: Vec<usize> = (0..fine.num_atoms()).filter(|&f| parents[f] == c).collect();
                let split = random_masses(rng, children.len(), 4);
                for (f, w) in children.into_iter().zip(split) {
                    interim[f] = prior.atom_mass(c) * w;
                }
            }
            interim
        });
        match planted {
            Some(interim) if support.iter().any(|&f| interim[f] > zero()) => {
                let total: Rational = support.iter().map(|&f| &interim[f]).sum();
                for &f in &support {
                    post[f] = &interim[f] / &total;
                }
            }
            _ => {
                for (&f, m) in support.iter().zip(random_masses(rng, support.len(), cfg.max_den)) {
                    post[f] = m;
                }
            }
        }
        let posterior = Measure::new(fine, post).expect("masses sum to one");
        return UpdatePair::new(prior, posterior).expect("nested algebras");
    }
}

/// A chain of `len` periods over strictly finer algebras, generated by
/// conditioning one positive measure on nested supports. Every consecutive
/// link is extended Bayesian with positive outer measure.
pub fn random_chain<R: Rng + ?Sized>(rng: &mut R, len: usize, max_states: usize, max_den: u32) -> Chain {
    assert!(len >= 1);
    'retry: loop {
        let n = rng.gen_range(len.max(2)..=max_states.max(len).max(2));
        let space = state_space(n);
        let mut algebras = vec![random_partition(rng, &space)];
        for _ in 1..len {
            match random_refinement(rng, algebras.last().expect("nonempty"), true) {
                Some(a) => algebras.push(a),
                None => continue 'retry,
            }
        }
        let finest = algebras.last().expect("nonempty").clone();
        let base = random_positive_masses(rng, finest.num_atoms(), max_den);
        let mass_of = |event: &Event| -> Rational {
            finest
                .atoms()
                .iter()
                .zip(&base)
                .filter(|(a, _)| a.is_subset(event))
                .map(|(_, m)| m.clone())
                .sum()
        };

        let mut support = space.full();
        let mut measures = Vec::with_capacity(len);
        for algebra in &algebras {
            let mut inside: Vec<usize> = algebra.atoms_within(&support).expect("same space");
            inside.shuffle(rng);
            let keep = rng.gen_range(1..=inside.len());
            support = algebra.union_of(inside[..keep].iter().copied());
            let total = mass_of(&support);
            let masses = algebra
                .atoms()
                .iter()
                .map(|a| {
                    if a.is_subset(&support) {
                        mass_of(a) / &total
                    } else {
                        zero()
                    }
                })
                .collect();
            measures.push(Measure::new(algebra.clone(), masses).expect("masses sum to one"));
        }
        return Chain::new(measures).expect("strictly nested algebras");
    }
}
