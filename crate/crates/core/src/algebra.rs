//! Finite state spaces, events, and sigma-algebras stored as partitions.
//!
//! On a finite space every sigma-algebra is generated by exactly one
//! partition, so an [`Algebra`] keeps only its atoms. Measurability, hulls and
//! refinement all reduce to scans over atoms.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered, distinct state labels.
#[derive(Debug, Clone)]
pub struct StateSpace {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl StateSpace {
    pub fn new<I, S>(labels: I) -> Result<Arc<StateSpace>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Arc::new(StateSpace { labels, index }))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, state: usize) -> &str {
        &self.labels[state]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn event<S: AsRef<str>>(&self, labels: &[S]) -> Result<Event> {
        let mut event = Event::empty(self.len());
        for label in labels {
            let label = label.as_ref();
            let i = self
                .index_of(label)
                .ok_or_else(|| Error::UnknownState(label.to_string()))?;
            event.insert(i);
        }
        Ok(event)
    }

    pub fn full(&self) -> Event {
        Event::full(self.len())
    }

    pub fn labels_of(&self, event: &Event) -> Vec<&str> {
        event.iter().map(|i| self.label(i)).collect()
    }
}

impl PartialEq for StateSpace {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for StateSpace {}

pub(crate) fn same_space(a: &Arc<StateSpace>, b: &Arc<StateSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

const WORD: usize = 64;

/// A set of state indices, stored as a bitset sized to its state space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Event {
    size: usize,
    words: Vec<u64>,
}

impl Event {
    pub fn empty(size: usize) -> Event {
        Event {
            size,
            words: vec![0; size.div_ceil(WORD)],
        }
    }

    pub fn full(size: usize) -> Event {
        let mut event = Event::empty(size);
        for (w, word) in event.words.iter_mut().enumerate() {
            let bits = (size - w * WORD).min(WORD);
            *word = if bits == WORD { u64::MAX } else { (1u64 << bits) - 1 };
        }
        event
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(size: usize, members: I) -> Result<Event> {
        let mut event = Event::empty(size);
        for i in members {
            if i >= size {
                return Err(Error::StateOutOfRange { index: i, size });
            }
            event.insert(i);
        }
        Ok(event)
    }

    pub fn singleton(size: usize, state: usize) -> Event {
        let mut event = Event::empty(size);
        event.insert(state);
        event
    }

    /// Number of states in the ambient space.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn insert(&mut self, state: usize) {
        assert!(state < self.size, "state {state} out of range");
        self.words[state / WORD] |= 1 << (state % WORD);
    }

    pub fn contains(&self, state: usize) -> bool {
        state < self.size && self.words[state / WORD] & (1 << (state % WORD)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.size
    }

    /// Least member, if any.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * WORD + bit)
            })
        })
    }

    fn check(&self, other: &Event) -> Result<()> {
        if self.size == other.size {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    fn zip(&self, other: &Event, op: impl Fn(u64, u64) -> u64) -> Event {
        Event {
            size: self.size,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }

    /// Panics if the operands come from spaces of different sizes; use the
    /// `try_` variants on untrusted input.
    pub fn union(&self, other: &Event) -> Event {
        self.check(other).expect("event size mismatch");
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Event) -> Event {
        self.check(other).expect("event size mismatch");
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Event) -> Event {
        self.check(other).expect("event size mismatch");
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Event {
        Event::full(self.size).difference(self)
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        self.size == other.size && self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Event) -> bool {
        self.words.iter().zip(&other.words).any(|(&a, &b)| a & b != 0)
    }

    pub fn try_union(&self, other: &Event) -> Result<Event> {
        self.check(other)?;
        Ok(self.union(other))
    }

    pub fn try_intersection(&self, other: &Event) -> Result<Event> {
        self.check(other)?;
        Ok(self.intersection(other))
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite sigma-algebra, kept as its partition into atoms.
///
/// Atoms are sorted by least member, so two algebras are equal exactly when
/// they have the same partition.
#[derive(Debug, Clone)]
pub struct Algebra {
    space: Arc<StateSpace>,
    atoms: Vec<Event>,
    atom_of: Vec<usize>,
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.atoms == other.atoms
    }
}

impl Eq for Algebra {}

impl Algebra {
    /// Validates that `blocks` partition the space and stores them canonically.
    pub fn new(space: Arc<StateSpace>, blocks: Vec<Event>) -> Result<Algebra> {
        let n = space.len();
        let mut atom_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.size() != n {
                return Err(Error::SpaceMismatch);
            }
            if block.is_empty() {
                return Err(Error::EmptyBlock);
            }
            for s in block.iter() {
                if atom_of[s] != usize::MAX {
                    return Err(Error::Overlap { state: s });
                }
                atom_of[s] = b;
            }
        }
        if let Some(state) = atom_of.iter().position(|&a| a == usize::MAX) {
            return Err(Error::Coverage { state });
        }
        Ok(Self::canonical(space, blocks))
    }

    fn canonical(space: Arc<StateSpace>, mut atoms: Vec<Event>) -> Algebra {
        atoms.sort_by_key(|a| a.first());
        let mut atom_of = vec![0; space.len()];
        for (i, atom) in atoms.iter().enumerate() {
            for s in atom.iter() {
                atom_of[s] = i;
            }
        }
        Algebra {
            space,
            atoms,
            atom_of,
        }
    }

    /// The power set: one atom per state.
    pub fn discrete(space: Arc<StateSpace>) -> Algebra {
        let n = space.len();
        let atoms = (0..n).map(|s| Event::singleton(n, s)).collect();
        Self::canonical(space, atoms)
    }

    /// `{∅, Ω}`.
    pub fn trivial(space: Arc<StateSpace>) -> Algebra {
        let full = space.full();
        Self::canonical(space, vec![full])
    }

    /// The coarsest algebra in which every input event is measurable.
    pub fn generate(space: Arc<StateSpace>, events: &[Event]) -> Result<Algebra> {
        let full = space.full();
        let mut blocks = vec![full];
        for event in events {
            if event.size() != space.len() {
                return Err(Error::SpaceMismatch);
            }
            blocks = blocks
                .into_iter()
                .flat_map(|b| [b.intersection(event), b.difference(event)])
                .filter(|b| !b.is_empty())
                .collect();
        }
        Ok(Self::canonical(space, blocks))
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn atoms(&self) -> &[Event] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, i: usize) -> &Event {
        &self.atoms[i]
    }

    /// Index of the atom containing `state`.
    pub fn atom_of(&self, state: usize) -> usize {
        self.atom_of[state]
    }

    pub fn is_discrete(&self) -> bool {
        self.atoms.len() == self.space.len()
    }

    pub(crate) fn check_event(&self, event: &Event) -> Result<()> {
        if event.size() == self.space.len() {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub(crate) fn check_space(&self, other: &Algebra) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// True iff every atom of `coarse` is a union of atoms of `self`.
    pub fn refines(&self, coarse: &Algebra) -> Result<bool> {
        self.check_space(coarse)?;
        Ok(self.coarse_parents(coarse).is_some())
    }

    /// For a refinement, maps each of our atoms to the `coarse` atom holding it.
    pub fn parents(&self, coarse: &Algebra) -> Result<Vec<usize>> {
        self.check_space(coarse)?;
        self.coarse_parents(coarse).ok_or(Error::NotARefinement)
    }

    fn coarse_parents(&self, coarse: &Algebra) -> Option<Vec<usize>> {
        self.atoms
            .iter()
            .map(|atom| {
                let mut states = atom.iter();
                let parent = coarse.atom_of(states.next()?);
                states.all(|s| coarse.atom_of(s) == parent).then_some(parent)
            })
            .collect()
    }

    /// Indices of atoms that meet `event`, ascending.
    pub fn atoms_meeting(&self, event: &Event) -> Result<Vec<usize>> {
        self.check_event(event)?;
        let mut hit = vec![false; self.atoms.len()];
        for s in event.iter() {
            hit[self.atom_of[s]] = true;
        }
        Ok(hit.iter().enumerate().filter(|(_, &h)| h).map(|(i, _)| i).collect())
    }

    /// Indices of atoms contained in `event`, ascending.
    pub fn atoms_within(&self, event: &Event) -> Result<Vec<usize>> {
        self.check_event(event)?;
        Ok((0..self.atoms.len())
            .filter(|&i| self.atoms[i].is_subset(event))
            .collect())
    }

    pub fn union_of(&self, atoms: impl IntoIterator<Item = usize>) -> Event {
        let mut event = Event::empty(self.space.len());
        for a in atoms {
            event = event.union(&self.atoms[a]);
        }
        event
    }

    /// Smallest measurable superset of `event`.
    pub fn hull(&self, event: &Event) -> Result<Event> {
        let meeting = self.atoms_meeting(event)?;
        Ok(self.union_of(meeting))
    }

    pub fn is_measurable(&self, event: &Event) -> Result<bool> {
        Ok(&self.hull(event)? == event)
    }

    /// True iff `event` contains no nonempty measurable subset, i.e. no atom.
    pub fn is_completely_nonmeasurable(&self, event: &Event) -> Result<bool> {
        self.check_event(event)?;
        if event.is_empty() {
            return Err(Error::EmptyEvent);
        }
        Ok(self.atoms.iter().all(|atom| !atom.is_subset(event)))
    }
}
