//! Unanimity, tops-onlyness, efficiency, strategy-proofness and dictatorship
//! as exhaustive checks over the profile space. Every check that can fail
//! returns the first counterexample in ascending profile-code order.

use std::ops::ControlFlow;

use serde::Serialize;

use super::{representative, scan_space, Repr, Rule};
use crate::domain::{tops_code, Alternative, Preference, Profile};
use crate::error::{Error, Result};

/// Agent `agent` strictly gains at `profile` by reporting `misreport`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManipulationWitness {
    pub profile: Profile,
    pub agent: usize,
    pub misreport: Preference,
    pub sincere_outcome: Alternative,
    pub improved_outcome: Alternative,
}

impl ManipulationWitness {
    /// Re-checks the witness by direct evaluation.
    pub fn validate(&self, rule: &Rule) -> Result<bool> {
        let sincere = rule.evaluate(&self.profile)?;
        let deviated = rule.evaluate(&self.profile.with_replaced(self.agent, self.misreport)?)?;
        let pref = self.profile.pref(self.agent)?;
        Ok(sincere == self.sincere_outcome
            && deviated == self.improved_outcome
            && pref.prefers(deviated, sincere)?)
    }
}

/// `dominating` is preferred to `outcome` by every agent at `profile`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParetoWitness {
    pub profile: Profile,
    pub outcome: Alternative,
    pub dominating: Alternative,
}

impl ParetoWitness {
    pub fn validate(&self, rule: &Rule) -> Result<bool> {
        let outcome = rule.evaluate(&self.profile)?;
        let mut all = true;
        for p in self.profile.prefs() {
            all &= p.prefers(self.dominating, outcome)?;
        }
        Ok(outcome == self.outcome && all)
    }
}

/// A profile with a common top that the rule does not select.
pub fn unanimity_violation(rule: &Rule) -> Result<Option<Profile>> {
    let space = scan_space(rule.dims())?;
    if let Repr::TopsTable(table) = rule.repr() {
        // Diagonal tops codes; the representative is the lowest-code profile
        // of its cell, hence the first violating profile in code order too.
        let dims = rule.dims();
        let mut hit = None;
        for x in Alternative::all(dims.alts) {
            let code = (0..dims.agents).fold(0, |acc, _| acc * dims.alts + x.index());
            if table[code] != x {
                let rep = Profile::from_prefs_unchecked(&representative(dims, code));
                if hit.as_ref().map_or(true, |h: &Profile| rep.code() < h.code()) {
                    hit = Some(rep);
                }
            }
        }
        return Ok(hit);
    }
    Ok(space.for_each_in(0..space.len(), |_, prefs| {
        let t = prefs[0].top();
        if prefs.iter().all(|p| p.top() == t) && rule.eval(prefs) != t {
            ControlFlow::Break(Profile::from_prefs_unchecked(prefs))
        } else {
            ControlFlow::Continue(())
        }
    }))
}

pub fn is_unanimous(rule: &Rule) -> Result<bool> {
    Ok(unanimity_violation(rule)?.is_none())
}

/// Two profiles with equal tops and different outcomes.
pub fn tops_only_violation(rule: &Rule) -> Result<Option<(Profile, Profile)>> {
    let space = scan_space(rule.dims())?;
    if rule.is_tops_only_by_construction() {
        return Ok(None);
    }
    let mut first: Vec<Option<(u64, Alternative)>> = vec![None; rule.dims().tops_count() as usize];
    let hit = space.for_each_in(0..space.len(), |code, prefs| {
        let cell = tops_code(prefs);
        let outcome = rule.eval(prefs);
        match first[cell] {
            None => {
                first[cell] = Some((code, outcome));
                ControlFlow::Continue(())
            }
            Some((_, seen)) if seen == outcome => ControlFlow::Continue(()),
            Some((earlier, _)) => ControlFlow::Break((earlier, Profile::from_prefs_unchecked(prefs))),
        }
    });
    hit.map(|(earlier, later)| Ok((space.profile(earlier)?, later)))
        .transpose()
}

pub fn is_tops_only(rule: &Rule) -> Result<bool> {
    Ok(tops_only_violation(rule)?.is_none())
}

/// A profile whose outcome is Pareto-dominated.
pub fn efficiency_violation(rule: &Rule) -> Result<Option<ParetoWitness>> {
    let space = scan_space(rule.dims())?;
    let alts = rule.dims().alts;
    Ok(space.for_each_in(0..space.len(), |_, prefs| {
        let outcome = rule.eval(prefs);
        match Alternative::all(alts).find(|&x| prefs.iter().all(|p| p.beats(x, outcome))) {
            Some(dominating) => ControlFlow::Break(ParetoWitness {
                profile: Profile::from_prefs_unchecked(prefs),
                outcome,
                dominating,
            }),
            None => ControlFlow::Continue(()),
        }
    }))
}

pub fn is_efficient(rule: &Rule) -> Result<bool> {
    Ok(efficiency_violation(rule)?.is_none())
}

/// Tops-level efficiency: every tops profile's outcome is one of its tops.
/// Only meaningful for tops-only rules; must agree with [`is_efficient`].
pub fn efficient_via_tops(rule: &Rule) -> Result<bool> {
    if !rule.is_tops_only_by_construction() && !is_tops_only(rule)? {
        return Err(Error::NotTopsOnly(rule.to_string()));
    }
    let dims = rule.dims();
    let outcomes = rule.tops_outcomes_unchecked();
    Ok(outcomes.iter().enumerate().all(|(code, &x)| {
        crate::domain::tops_digits(dims, code).contains(&x)
    }))
}

/// First manipulation in `(profile code, agent, misreport code)` order.
pub fn find_manipulation(rule: &Rule) -> Result<Option<ManipulationWitness>> {
    let space = scan_space(rule.dims())?;
    let universe = space.preferences();
    let mut scratch: Vec<Preference> = Vec::with_capacity(rule.dims().agents);
    Ok(space.for_each_in(0..space.len(), |_, prefs| {
        let sincere = rule.eval(prefs);
        scratch.clear();
        scratch.extend_from_slice(prefs);
        for agent in 0..prefs.len() {
            let truth = prefs[agent];
            if truth.top() == sincere {
                continue;
            }
            for &lie in universe {
                scratch[agent] = lie;
                let outcome = rule.eval(&scratch);
                if truth.beats(outcome, sincere) {
                    return ControlFlow::Break(ManipulationWitness {
                        profile: Profile::from_prefs_unchecked(prefs),
                        agent,
                        misreport: lie,
                        sincere_outcome: sincere,
                        improved_outcome: outcome,
                    });
                }
            }
            scratch[agent] = truth;
        }
        ControlFlow::Continue(())
    }))
}

pub fn is_strategy_proof(rule: &Rule) -> Result<bool> {
    Ok(find_manipulation(rule)?.is_none())
}

/// The agent whose top is selected at every profile, if any.
pub fn dictator(rule: &Rule) -> Result<Option<usize>> {
    let space = scan_space(rule.dims())?;
    let mut candidates: Vec<usize> = (0..rule.dims().agents).collect();
    space.for_each_in(0..space.len(), |_, prefs| {
        let outcome = rule.eval(prefs);
        candidates.retain(|&i| prefs[i].top() == outcome);
        if candidates.is_empty() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(candidates.first().copied())
}

pub fn is_dictatorial(rule: &Rule) -> Result<bool> {
    Ok(dictator(rule)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Dims;

    fn d(n: usize, m: usize) -> Dims {
        Dims::new(n, m).unwrap()
    }

    fn alt(c: char) -> Alternative {
        Alternative::from_name(c).unwrap()
    }

    fn tops(dims: Dims, digits: &str) -> Rule {
        let table = digits
            .chars()
            .map(|c| Alternative::new(c.to_digit(10).unwrap() as usize, dims.alts).unwrap())
            .collect();
        Rule::tops_table(dims, table).unwrap()
    }

    #[test]
    fn dictators_satisfy_everything() {
        for n in 2..=3 {
            for m in 3..=4 {
                for i in 0..n {
                    let r = Rule::dictator(d(n, m), i).unwrap();
                    assert!(is_unanimous(&r).unwrap());
                    assert!(is_tops_only(&r).unwrap());
                    assert!(is_efficient(&r).unwrap());
                    assert!(is_strategy_proof(&r).unwrap());
                    assert_eq!(dictator(&r).unwrap(), Some(i));
                }
            }
        }
    }

    #[test]
    fn constant_rule_failures() {
        let c = Rule::constant(d(2, 3), alt('a')).unwrap();
        let w = unanimity_violation(&c).unwrap().unwrap();
        assert_eq!(w.unanimous_top(), Some(alt('b')));
        let e = efficiency_violation(&c).unwrap().unwrap();
        assert!(e.validate(&c).unwrap());
        assert_eq!(e.profile.to_string(), "b,a,c|b,a,c");
        assert_eq!(e.dominating, alt('b'));
        assert_eq!(dictator(&c).unwrap(), None);
        assert!(is_strategy_proof(&c).unwrap());
    }

    #[test]
    fn constant_witness_from_definition() {
        // Both agents (b,c,a): b dominates a.
        let c = Rule::constant(d(2, 3), alt('a')).unwrap();
        let w = ParetoWitness {
            profile: "b,c,a|b,c,a".parse().unwrap(),
            outcome: alt('a'),
            dominating: alt('b'),
        };
        assert!(w.validate(&c).unwrap());
    }

    #[test]
    fn borda_is_efficient_manipulable_and_not_tops_only() {
        let b = Rule::borda_lex(d(2, 3));
        assert!(is_efficient(&b).unwrap());
        assert!(is_unanimous(&b).unwrap());
        let (p, q) = tops_only_violation(&b).unwrap().unwrap();
        assert_eq!(p.tops(), q.tops());
        assert_ne!(b.evaluate(&p).unwrap(), b.evaluate(&q).unwrap());
        let w = find_manipulation(&b).unwrap().unwrap();
        assert!(w.validate(&b).unwrap());
        assert!(matches!(efficient_via_tops(&b), Err(Error::NotTopsOnly(_))));
    }

    #[test]
    fn majority_is_strategy_proof() {
        for n in [2, 3, 5] {
            let maj = Rule::majority_lex(d(n, 2)).unwrap();
            assert!(is_unanimous(&maj).unwrap());
            assert!(is_strategy_proof(&maj).unwrap());
            assert!(is_tops_only(&maj).unwrap());
            assert!(is_efficient(&maj).unwrap());
            assert_eq!(dictator(&maj).unwrap(), None);
        }
    }

    #[test]
    fn perturbed_dictator_is_not_dictatorial() {
        let r = tops(d(2, 3), "000111221");
        assert_eq!(dictator(&r).unwrap(), None);
    }

    #[test]
    fn efficient_via_tops_examples() {
        assert!(efficient_via_tops(&Rule::dictator(d(2, 3), 0).unwrap()).unwrap());
        // (a,b) -> c
        let r = tops(d(2, 3), "020111222");
        assert!(!efficient_via_tops(&r).unwrap());
        assert!(!is_efficient(&r).unwrap());
    }

    #[test]
    fn table_unanimity_fast_path_matches_scan() {
        let dims = d(2, 3);
        for digits in ["000111222", "100111222", "000101222", "000111220", "120201012"] {
            let r = tops(dims, digits);
            let fast = unanimity_violation(&r).unwrap();
            let slow = unanimity_violation(&r.tabulate().unwrap()).unwrap();
            assert_eq!(fast, slow, "{digits}");
        }
    }
}
