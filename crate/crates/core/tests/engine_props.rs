mod common;

use extbayes::engine::{
    chain_common_witness, chain_reports, common_witness_mismatch, check_geb, conditional_bounds, construct_witness, verify_witness,
    Violation,
};
use extbayes::rational::{one, zero};
use extbayes::sample::{random_chain, random_pair, state_space, PairConfig};
use extbayes::{classify_update, Algebra, Measure, Rational, UpdatePair, UpdateStatus};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{event, mask, unions, Plain};

fn pair(seed: u64) -> UpdatePair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = PairConfig {
        planted: seed % 3 != 0,
        completely_nonmeasurable: seed % 5 == 0,
        ..PairConfig::default()
    };
    random_pair(&mut rng, &cfg)
}

/// Direct reading of the witness conditions on plain masses.
fn witness_ok(p: &Plain, candidate: &[Rational]) -> bool {
    let marginal_ok = p.coarse.iter().zip(&p.p0).all(|(c, m0)| {
        let total: Rational = p.fine.iter().zip(candidate).filter(|(f, _)| *f & c == **f).map(|(_, m)| m.clone()).sum();
        total == *m0
    });
    let s1 = p.s1();
    let beta: Rational = p.fine.iter().zip(candidate).filter(|(f, _)| *f & s1 == **f).map(|(_, m)| m.clone()).sum();
    marginal_ok
        && !beta.is_zero()
        && p.fine.iter().zip(candidate).zip(&p.p1).all(|((f, m), m1)| {
            if f & s1 == *f {
                m / &beta == *m1
            } else {
                m1.is_zero()
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn status_matches_oracle(seed in any::<u64>()) {
        let pair = pair(seed);
        let p = Plain::new(&pair);
        let report = classify_update(&pair);
        let outer = p.outer0(p.s1());
        prop_assert_eq!(&report.evidence_outer_measure, &outer);
        let expected = if outer.is_zero() {
            UpdateStatus::EbTrivial
        } else if !p.commensurate() {
            UpdateStatus::Fails
        } else if p.coarse == p.fine && p.coarse.iter().zip(&p.p1).all(|(&a, m1)| p.mass0(a & p.s1()) / p.mass0(p.s1()) == *m1) {
            UpdateStatus::Bayesian
        } else {
            UpdateStatus::EbPositive
        };
        prop_assert_eq!(report.status, expected);
        prop_assert_eq!(report.witness.is_some(), expected == UpdateStatus::EbPositive || expected == UpdateStatus::Bayesian);
        let cnm = p.coarse.iter().all(|a| a & p.s1() != *a);
        prop_assert_eq!(report.completely_nonmeasurable, cnm);
        let reverse = p.coarse.iter().all(|&a| p.mass1(a) == p.mass0(a));
        prop_assert_eq!(report.reverse_bayesian, reverse);
        if let Some(w) = &report.witness {
            prop_assert!(witness_ok(&p, w.interim.masses()));
            prop_assert_eq!(Some(w.beta.clone()), p.max_feasible_beta());
        }
    }

    #[test]
    fn verifier_agrees_with_oracle(seed in any::<u64>()) {
        let pair = pair(seed);
        let p = Plain::new(&pair);
        prop_assume!(p.commensurate() && !p.outer0(p.s1()).is_zero());
        let w = construct_witness(&pair).unwrap();
        prop_assert!(verify_witness(&pair, &w.interim).unwrap().holds);

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..8 {
            let mut masses = w.interim.masses().to_vec();
            let (i, j) = (rng.gen_range(0..masses.len()), rng.gen_range(0..masses.len()));
            let delta = masses[i].clone().min(Rational::new(1.into(), rng.gen_range(2..9).into()));
            masses[i] -= &delta;
            masses[j] += delta;
            let candidate = Measure::new(pair.fine().clone(), masses.clone()).unwrap();
            let verdict = verify_witness(&pair, &candidate).unwrap();
            prop_assert_eq!(verdict.holds, witness_ok(&p, &masses), "{:?}", verdict.violation);
            prop_assert_eq!(verdict.holds, verdict.violation.is_none());
        }
    }

    #[test]
    fn geb_reduces_on_embedding(seed in any::<u64>(), extra in 0u32..=4) {
        let pair = pair(seed);
        let n = pair.coarse().space().len();
        let wide = state_space(n + 1);
        let mut blocks: Vec<_> = pair.fine().atoms().iter().map(|a| event(n + 1, mask(a))).collect();
        blocks.push(event(n + 1, 1 << n));
        let fine = Algebra::new(wide, blocks).unwrap();
        let x = Rational::new(extra.into(), 4.into());
        let mut masses: Vec<Rational> = pair.posterior().masses().iter().map(|m| m * (one() - &x)).collect();
        masses.push(x.clone());
        let posterior = Measure::new(fine, masses).unwrap();
        let geb = check_geb(pair.prior(), &posterior).unwrap();
        prop_assert_eq!(&geb.original_mass, &(one() - &x));
        if x == one() {
            prop_assert_eq!(geb.status, UpdateStatus::Fails);
            prop_assert_eq!(geb.violation, Some(Violation::NullOriginalSpace));
        } else {
            let direct = classify_update(&pair);
            prop_assert_eq!(geb.status, direct.status);
            prop_assert_eq!(geb.conditioned.as_ref(), Some(pair.posterior()));
            let same = pair.coarse() == pair.fine();
            prop_assert_eq!(geb.generalized_reverse_bayesian, same && direct.status.satisfies_eb());
        }
    }

    #[test]
    fn bounds_bracket_every_extension(seed in any::<u64>()) {
        let pair = pair(seed);
        let p = Plain::new(&pair);
        let n = p.n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fine_events = unions(&p.fine);
        let given = fine_events[rng.gen_range(0..fine_events.len())];
        let target = fine_events[rng.gen_range(0..fine_events.len())];
        let result = conditional_bounds(pair.prior(), pair.fine(), &event(n, given), &event(n, target), 1_000_000);
        if p.outer0(given).is_zero() {
            prop_assert!(result.is_err());
            return Ok(());
        }
        let b = result.unwrap();
        prop_assert!(zero() <= b.inner && b.inner <= b.outer && b.outer <= one());
        for v in pair.prior().extension_vertices(pair.fine(), 1_000_000).unwrap() {
            if let Ok(c) = v.measure.conditional(&event(n, given)) {
                prop_assert!(b.contains(&c.mass(&event(n, target)).unwrap()));
            }
        }
        if unions(&p.coarse).contains(&given) && unions(&p.coarse).contains(&target) {
            let exact = p.mass0(given & target) / p.mass0(given);
            prop_assert_eq!(&b.inner, &exact);
            prop_assert_eq!(&b.outer, &exact);
        }
    }

    #[test]
    fn chains_share_a_witness(seed in any::<u64>(), len in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = random_chain(&mut rng, len, 7, 10);
        let reports = chain_reports(&chain);
        prop_assert_eq!(reports.len(), len * (len - 1) / 2);
        prop_assert!(reports.iter().all(|r| r.from < r.to));
        let (_, common) = chain_common_witness(&chain).unwrap();
        prop_assert_eq!(common_witness_mismatch(&chain, &common).unwrap(), None);
        for r in reports.iter().filter(|r| r.from == 0) {
            let pair = chain.pair(r.from, r.to);
            let restricted = common.restrict(pair.fine()).unwrap();
            prop_assert!(verify_witness(&pair, &restricted).unwrap().holds);
        }
    }
}
