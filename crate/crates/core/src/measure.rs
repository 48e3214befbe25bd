//! Exact probability measures on finite algebras.

use num_traits::{One, Zero};

use crate::algebra::{Algebra, Event};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default bound on the number of extension vertices enumerated.
pub const DEFAULT_VERTEX_CAP: u64 = 1_000_000;

/// A probability measure: one nonnegative mass per atom, summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    algebra: Algebra,
    masses: Vec<Rational>,
}

impl Measure {
    pub fn new(algebra: Algebra, masses: Vec<Rational>) -> Result<Measure> {
        if masses.len() != algebra.num_atoms() {
            return Err(Error::InvalidMeasure(format!(
                "{} masses for {} atoms",
                masses.len(),
                algebra.num_atoms()
            )));
        }
        if let Some(m) = masses.iter().find(|m| **m < Rational::zero()) {
            return Err(Error::InvalidMeasure(format!("negative mass {m}")));
        }
        let total: Rational = masses.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!("masses sum to {total}, not 1")));
        }
        Ok(Measure { algebra, masses })
    }

    /// Builds a measure from `(event, mass)` entries. Entries must be
    /// measurable and pairwise disjoint; an entry with positive mass must be a
    /// single atom. Atoms not mentioned get mass 0.
    pub fn from_event_masses(algebra: Algebra, entries: &[(Event, Rational)]) -> Result<Measure> {
        let mut masses = vec![Rational::zero(); algebra.num_atoms()];
        let mut seen = vec![false; algebra.num_atoms()];
        for (event, mass) in entries {
            if !algebra.is_measurable(event)? {
                return Err(Error::NotMeasurable);
            }
            let atoms = algebra.atoms_within(event)?;
            if atoms.iter().any(|&a| seen[a]) {
                return Err(Error::InvalidMeasure("mass entries overlap".into()));
            }
            match atoms.as_slice() {
                [] if mass.is_zero() => {}
                [] => return Err(Error::InvalidMeasure("positive mass on the empty event".into())),
                [single] => masses[*single] = mass.clone(),
                _ if mass.is_zero() => {}
                _ => {
                    return Err(Error::InvalidMeasure(
                        "positive mass on an event spanning several atoms is ambiguous".into(),
                    ))
                }
            }
            for a in atoms {
                seen[a] = true;
            }
        }
        Measure::new(algebra, masses)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn new_unchecked(algebra: Algebra, masses: Vec<Rational>) -> Measure {
        debug_assert_eq!(masses.len(), algebra.num_atoms());
        debug_assert!(masses.iter().sum::<Rational>().is_one());
        Measure { algebra, masses }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn atom_mass(&self, atom: usize) -> &Rational {
        &self.masses[atom]
    }

    fn sum_atoms(&self, atoms: impl IntoIterator<Item = usize>) -> Rational {
        atoms.into_iter().map(|a| &self.masses[a]).sum()
    }

    pub fn mass(&self, event: &Event) -> Result<Rational> {
        if !self.algebra.is_measurable(event)? {
            return Err(Error::NotMeasurable);
        }
        Ok(self.sum_atoms(self.algebra.atoms_within(event)?))
    }

    /// Union of the atoms carrying positive mass.
    pub fn support(&self) -> Event {
        let positive = (0..self.masses.len()).filter(|&a| !self.masses[a].is_zero());
        self.algebra.union_of(positive)
    }

    /// Mass of the measurable hull; defined for every event of the space.
    pub fn outer_measure(&self, event: &Event) -> Result<Rational> {
        Ok(self.sum_atoms(self.algebra.atoms_meeting(event)?))
    }

    /// Conditioning on a measurable event of positive mass, on the same algebra.
    pub fn conditional(&self, event: &Event) -> Result<Measure> {
        let total = self.mass(event)?;
        if total.is_zero() {
            return Err(Error::ZeroMassConditioning);
        }
        let masses = self
            .algebra
            .atoms()
            .iter()
            .zip(&self.masses)
            .map(|(atom, m)| {
                if atom.is_subset(event) {
                    m / &total
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Ok(Measure::new_unchecked(self.algebra.clone(), masses))
    }

    /// The restriction to a coarser algebra.
    pub fn restrict(&self, coarse: &Algebra) -> Result<Measure> {
        let parents = self.algebra.parents(coarse)?;
        let mut masses = vec![Rational::zero(); coarse.num_atoms()];
        for (fine, parent) in parents.into_iter().enumerate() {
            masses[parent] += &self.masses[fine];
        }
        Ok(Measure::new_unchecked(coarse.clone(), masses))
    }

    /// Whether `self` restricts to `coarse_measure`.
    pub fn extends(&self, coarse_measure: &Measure) -> Result<bool> {
        Ok(&self.restrict(coarse_measure.algebra())? == coarse_measure)
    }

    /// Enumerates the extreme points of the set of extensions of `self` to
    /// `fine`, in lexicographic order of their choice functions.
    pub fn extension_vertices(&self, fine: &Algebra, cap: u64) -> Result<Vec<ExtensionVertex>> {
        ExtensionVertices::new(self, fine, cap)?
            .map(|assignment| {
                let mut masses = vec![Rational::zero(); fine.num_atoms()];
                for (coarse, &f) in assignment.iter().enumerate() {
                    masses[f] = self.masses[coarse].clone();
                }
                Ok(ExtensionVertex {
                    assignment,
                    measure: Measure::new_unchecked(fine.clone(), masses),
                })
            })
            .collect()
    }
}

/// An extension placing each coarse atom's full mass on one fine sub-atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionVertex {
    /// Fine atom index chosen for each coarse atom.
    pub assignment: Vec<usize>,
    pub measure: Measure,
}

/// Streams vertex choice functions without materializing measures.
///
/// The first coarse atom is the most significant digit.
#[derive(Debug, Clone)]
pub struct ExtensionVertices {
    children: Vec<Vec<usize>>,
    digits: Vec<usize>,
    done: bool,
}

impl ExtensionVertices {
    pub fn new(coarse: &Measure, fine: &Algebra, cap: u64) -> Result<ExtensionVertices> {
        let parents = fine.parents(coarse.algebra())?;
        let mut children = vec![Vec::new(); coarse.algebra().num_atoms()];
        for (f, p) in parents.into_iter().enumerate() {
            children[p].push(f);
        }
        let count = children
            .iter()
            .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
            .unwrap_or(u128::MAX);
        if count > cap as u128 {
            return Err(Error::Explosion { count, cap });
        }
        let digits = vec![0; children.len()];
        Ok(ExtensionVertices {
            children,
            digits,
            done: false,
        })
    }

    /// Fine sub-atoms of each coarse atom.
    pub fn children(&self) -> &[Vec<usize>] {
        &self.children
    }

    pub fn count(&self) -> u128 {
        self.children.iter().map(|c| c.len() as u128).product()
    }
}

impl Iterator for ExtensionVertices {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self
            .digits
            .iter()
            .zip(&self.children)
            .map(|(&d, c)| c[d])
            .collect();
        self.done = true;
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.children[i].len() {
                self.done = false;
                break;
            }
            self.digits[i] = 0;
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::StateSpace;
    use crate::rational::{int, rat};

    fn example_one() -> (Measure, Measure) {
        let space = StateSpace::new(["wA", "wB", "wC1", "wC2"]).unwrap();
        let sigma0 = Algebra::new(
            space.clone(),
            vec![
                space.event(&["wA"]).unwrap(),
                space.event(&["wB"]).unwrap(),
                space.event(&["wC1", "wC2"]).unwrap(),
            ],
        )
        .unwrap();
        let prior = Measure::new(sigma0, vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        let posterior = Measure::new(
            Algebra::discrete(space),
            vec![rat(4, 7), rat(2, 7), rat(1, 7), int(0)],
        )
        .unwrap();
        (prior, posterior)
    }

    fn discrete(masses: &[(i64, i64)]) -> Measure {
        let labels: Vec<String> = (1..=masses.len()).map(|i| format!("w{i}")).collect();
        let space = StateSpace::new(labels).unwrap();
        Measure::new(
            Algebra::discrete(space),
            masses.iter().map(|&(p, q)| rat(p, q)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let space = StateSpace::new(["a", "b"]).unwrap();
        let a = Algebra::discrete(space);
        assert!(Measure::new(a.clone(), vec![rat(1, 2)]).is_err());
        assert!(Measure::new(a.clone(), vec![rat(3, 2), rat(-1, 2)]).is_err());
        assert!(Measure::new(a.clone(), vec![rat(1, 2), rat(2, 5)]).is_err());
        assert!(Measure::new(a, vec![rat(1, 2), rat(1, 2)]).is_ok());
    }

    #[test]
    fn mass_examples() {
        let (prior, _) = example_one();
        let space = prior.algebra().space().clone();
        assert_eq!(prior.mass(&space.event(&["wC1", "wC2"]).unwrap()).unwrap(), rat(1, 4));
        assert_eq!(prior.mass(&space.full()).unwrap(), int(1));
        assert_eq!(prior.mass(&Event::empty(4)).unwrap(), int(0));
        assert!(matches!(
            prior.mass(&space.event(&["wC1"]).unwrap()),
            Err(Error::NotMeasurable)
        ));
    }

    #[test]
    fn supports() {
        let (_, posterior) = example_one();
        let space = posterior.algebra().space().clone();
        assert_eq!(posterior.support(), space.event(&["wA", "wB", "wC1"]).unwrap());

        let uniform = discrete(&[(1, 3), (1, 3), (1, 3)]);
        assert!(uniform.support().is_full());

        let space = StateSpace::new(["w1", "w2", "w3", "w4", "w5"]).unwrap();
        let sigma1 = Algebra::new(
            space.clone(),
            vec![
                space.event(&["w1", "w2"]).unwrap(),
                space.event(&["w3"]).unwrap(),
                space.event(&["w4", "w5"]).unwrap(),
            ],
        )
        .unwrap();
        let pi1 = Measure::new(sigma1, vec![int(0), rat(1, 3), rat(2, 3)]).unwrap();
        assert_eq!(pi1.support(), space.event(&["w3", "w4", "w5"]).unwrap());
    }

    #[test]
    fn outer_measures() {
        let (prior, _) = example_one();
        let space = prior.algebra().space().clone();
        assert_eq!(prior.outer_measure(&space.event(&["wA", "wB", "wC1"]).unwrap()).unwrap(), int(1));
        assert_eq!(prior.outer_measure(&space.event(&["wB"]).unwrap()).unwrap(), rat(1, 4));

        let pi0 = discrete(&[(0, 1), (1, 3), (2, 3)]);
        assert_eq!(pi0.outer_measure(&Event::singleton(3, 0)).unwrap(), int(0));
    }

    #[test]
    fn conditioning() {
        let (_, posterior) = example_one();
        let space = posterior.algebra().space().clone();
        let interim = Measure::new(
            posterior.algebra().clone(),
            vec![rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 8)],
        )
        .unwrap();
        let s1 = space.event(&["wA", "wB", "wC1"]).unwrap();
        assert_eq!(interim.conditional(&s1).unwrap(), posterior);
        assert_eq!(interim.conditional(&space.full()).unwrap(), interim);

        let pi0 = discrete(&[(0, 1), (1, 3), (2, 3)]);
        assert!(matches!(
            pi0.conditional(&Event::singleton(3, 0)),
            Err(Error::ZeroMassConditioning)
        ));
    }

    #[test]
    fn restriction() {
        let space = StateSpace::new(["w1", "w2", "w3", "w4", "w5"]).unwrap();
        let common = Measure::new(
            Algebra::discrete(space.clone()),
            vec![rat(1, 8), rat(1, 8), rat(1, 4), rat(1, 4), rat(1, 4)],
        )
        .unwrap();
        let sigma0 = Algebra::new(
            space.clone(),
            vec![
                space.event(&["w1", "w2", "w3"]).unwrap(),
                space.event(&["w4", "w5"]).unwrap(),
            ],
        )
        .unwrap();
        let r = common.restrict(&sigma0).unwrap();
        assert_eq!(r.masses(), [rat(1, 2), rat(1, 2)]);
        assert_eq!(common.restrict(common.algebra()).unwrap(), common);
        assert!(matches!(r.restrict(common.algebra()), Err(Error::NotARefinement)));

        let (prior, posterior) = example_one();
        let interim = Measure::new(
            posterior.algebra().clone(),
            vec![rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 8)],
        )
        .unwrap();
        assert_eq!(interim.restrict(prior.algebra()).unwrap(), prior);
    }

    #[test]
    fn vertices() {
        let (prior, posterior) = example_one();
        let fine = posterior.algebra();
        let v = prior.extension_vertices(fine, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].measure.masses(), [rat(1, 2), rat(1, 4), rat(1, 4), int(0)]);
        assert_eq!(v[1].measure.masses(), [rat(1, 2), rat(1, 4), int(0), rat(1, 4)]);
        for vertex in &v {
            assert!(vertex.measure.extends(&prior).unwrap());
        }

        let same = prior.extension_vertices(prior.algebra(), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(same.len(), 1);
        assert_eq!(same[0].measure, prior);

        let space = StateSpace::new(["HA", "HB", "TA", "TB"]).unwrap();
        let coarse = Algebra::generate(space.clone(), &[space.event(&["HA", "HB"]).unwrap()]).unwrap();
        let pi0 = Measure::new(coarse, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let v = pi0.extension_vertices(&Algebra::discrete(space), DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v.iter().map(|x| x.assignment.clone()).collect::<Vec<_>>(), [
            vec![0, 2],
            vec![0, 3],
            vec![1, 2],
            vec![1, 3]
        ]);
    }

    #[test]
    fn vertex_cap() {
        let space = StateSpace::new((0..20).map(|i| format!("s{i}"))).unwrap();
        let pairs: Vec<Event> = (0..10)
            .map(|i| Event::from_indices(20, [2 * i, 2 * i + 1]).unwrap())
            .collect();
        let coarse = Algebra::new(space.clone(), pairs).unwrap();
        let masses = vec![rat(1, 10); 10];
        let m = Measure::new(coarse, masses).unwrap();
        let fine = Algebra::discrete(space);
        assert!(matches!(
            m.extension_vertices(&fine, 1000),
            Err(Error::Explosion { count: 1024, cap: 1000 })
        ));
        assert_eq!(m.extension_vertices(&fine, 1024).unwrap().len(), 1024);
    }
}
