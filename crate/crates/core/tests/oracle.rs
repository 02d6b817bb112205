mod common;

use std::collections::BTreeSet;

use common::{some_efficient_tables, some_tables, tops_rule, World};
use scf_verify::classification::{
    classify_all, classify_all_definitional, dictatorial_count, ClassifyOptions,
};
use scf_verify::constructions::{census, CensusOptions, FilterSet, Mode};
use scf_verify::rules::{dictator, is_efficient, is_strategy_proof, is_tops_only, is_unanimous};
use scf_verify::{Profile, Rule};

fn bits(set: &fixedbitset::FixedBitSet) -> BTreeSet<usize> {
    set.ones().collect()
}

/// Compares every predicate and both profile sets against the oracle.
fn agree(world: &World, rule: &Rule) {
    let o = world.outcomes(rule);
    let name = rule.to_string();
    assert_eq!(is_unanimous(rule).unwrap(), o.unanimous(), "unanimous {name}");
    assert_eq!(is_tops_only(rule).unwrap(), o.tops_only(), "tops-only {name}");
    assert_eq!(is_efficient(rule).unwrap(), o.efficient(), "efficient {name}");
    assert_eq!(is_strategy_proof(rule).unwrap(), o.strategy_proof(), "sp {name}");
    assert_eq!(
        dictator(rule).unwrap(),
        o.dictators().first().copied(),
        "dictator {name}"
    );
    let d = o.dictatorial_set();
    assert_eq!(dictatorial_count(rule).unwrap(), d.len() as u64, "|D| {name}");
    if o.tops_only() {
        let m = o.manipulable_set();
        for path in [classify_all, classify_all_definitional] {
            let s = path(rule, ClassifyOptions { materialize: true }).unwrap();
            assert_eq!(s.total as usize, world.profile_count());
            assert_eq!(s.manipulable as usize, m.len(), "|M| {name}");
            assert_eq!(bits(s.manipulable_set.as_ref().unwrap()), m, "M {name}");
            assert_eq!(bits(s.dictatorial_set.as_ref().unwrap()), d, "D {name}");
        }
    }
}

#[test]
fn profile_codes_follow_lexicographic_rankings() {
    for (n, m) in [(2, 2), (2, 3), (3, 3), (2, 4)] {
        let w = World::new(n, m);
        for k in 0..w.profile_count() {
            let p = Profile::from_code(w.dims(), k as u64).unwrap();
            assert_eq!(p, w.library_profile(&w.profile(k)));
            assert_eq!(p.code(), k as u64);
        }
    }
}

#[test]
fn every_rule_at_two_by_two() {
    let w = World::new(2, 2);
    for digits in w.all_tops_tables() {
        agree(&w, &tops_rule(&w, &digits));
    }
}

#[test]
fn every_rule_at_three_agents_two_alternatives() {
    let w = World::new(3, 2);
    for digits in w.all_tops_tables() {
        agree(&w, &tops_rule(&w, &digits));
    }
}

#[test]
fn random_tables_at_two_by_three() {
    let w = World::new(2, 3);
    for digits in some_tables(&w, 150, 1).iter().chain(&some_efficient_tables(&w, 150, 2)) {
        agree(&w, &tops_rule(&w, digits));
    }
}

#[test]
fn random_efficient_tables_at_three_by_three() {
    let w = World::new(3, 3);
    for digits in some_efficient_tables(&w, 12, 3) {
        agree(&w, &tops_rule(&w, &digits));
    }
}

#[test]
fn library_rules() {
    for (n, m) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let w = World::new(n, m);
        for rule in Rule::library(w.dims()) {
            agree(&w, &rule);
        }
    }
}

#[test]
fn census_counts_at_two_by_three() {
    let w = World::new(2, 3);
    let (mut total, mut unanimous, mut te, mut dictatorial) = (0, 0, 0, 0);
    let mut sp = Vec::new();
    for digits in w.all_tops_tables() {
        let o = w.tops_outcomes(&digits);
        total += 1;
        if !o.dictators().is_empty() {
            dictatorial += 1;
        }
        if !o.unanimous() {
            continue;
        }
        unanimous += 1;
        if !o.efficient() {
            continue;
        }
        te += 1;
        if o.strategy_proof() {
            sp.push(tops_rule(&w, &digits));
        }
    }
    let report = census(w.dims(), Mode::Exhaustive, &FilterSet::default(), CensusOptions::default())
        .unwrap();
    let c = report.counts;
    assert_eq!(
        (c.total, c.unanimous, c.tops_efficient, c.strategy_proof, c.dictatorial),
        (total, unanimous, te, sp.len() as u64, dictatorial)
    );
    assert_eq!(report.strategy_proof_rules, sp);
    assert_eq!((total, unanimous, te, sp.len()), (19683, 729, 64, 2));
}
