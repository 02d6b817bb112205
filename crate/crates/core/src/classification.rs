//! Manipulable and dictatorial profiles, and the orders built on counting them.
//!
//! For a tops-only rule `f`, a profile `P` is *manipulable* when some agent
//! `i` has a preference `P*` with the same top as `P_i` at which `i` can gain
//! by misreporting at `(P*, P_{-i})`. A profile is *dictatorial* when no agent
//! whose top was not selected can change the outcome by a unilateral
//! deviation. For tops-only rules every profile is exactly one of the two;
//! [`classify_profile`] reports a [`Error::ClassificationConflict`] if that
//! ever fails to hold.
//!
//! `M_f` and `D_f` are stored as bitsets over profile codes. `f ⪰_m g` and
//! `f ⪰_d g` compare their cardinalities.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{factorial, Alternative, Dims, Preference, Profile, ProfileSpace};
use crate::error::{Error, Result};
use crate::rules::{self, representative, scan_space, ManipulationWitness, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Dictatorial,
    Manipulable,
}

/// An agent whose top was not selected and who can move the outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violator {
    pub agent: usize,
    pub misreport: Preference,
    pub outcome: Alternative,
    pub deviated_outcome: Alternative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileClassification {
    pub profile: Profile,
    pub verdict: Verdict,
    /// Present iff the verdict is `Manipulable`; its profile is the same-top
    /// variant `(P*, P_{-i})` at which the manipulation happens.
    pub witness: Option<ManipulationWitness>,
    /// Present iff the verdict is `Manipulable`.
    pub violator: Option<Violator>,
}

/// Per-profile scans sharing one scratch buffer.
struct Scanner<'a> {
    rule: &'a Rule,
    universe: &'a [Preference],
    block: usize,
    scratch: Vec<Preference>,
}

// `agent` indexes both the profile and the scratch copy
#[allow(clippy::needless_range_loop)]
impl<'a> Scanner<'a> {
    fn new(rule: &'a Rule, space: &'a ProfileSpace) -> Self {
        Scanner {
            rule,
            universe: space.preferences(),
            block: factorial(rule.dims().alts - 1) as usize,
            scratch: Vec::with_capacity(rule.dims().agents),
        }
    }

    fn violator(&mut self, prefs: &[Preference]) -> Option<Violator> {
        let outcome = self.rule.eval(prefs);
        self.scratch.clear();
        self.scratch.extend_from_slice(prefs);
        for agent in 0..prefs.len() {
            if prefs[agent].top() == outcome {
                continue;
            }
            for &lie in self.universe {
                self.scratch[agent] = lie;
                let deviated = self.rule.eval(&self.scratch);
                if deviated != outcome {
                    return Some(Violator {
                        agent,
                        misreport: lie,
                        outcome,
                        deviated_outcome: deviated,
                    });
                }
            }
            self.scratch[agent] = prefs[agent];
        }
        None
    }

    /// Scan order: agent, same-top preference code, misreport code.
    fn witness(&mut self, prefs: &[Preference]) -> Option<ManipulationWitness> {
        self.scratch.clear();
        self.scratch.extend_from_slice(prefs);
        for agent in 0..prefs.len() {
            let top = prefs[agent].top().index();
            for &star in &self.universe[top * self.block..(top + 1) * self.block] {
                self.scratch[agent] = star;
                let sincere = self.rule.eval(&self.scratch);
                for &lie in self.universe {
                    self.scratch[agent] = lie;
                    let outcome = self.rule.eval(&self.scratch);
                    if star.beats(outcome, sincere) {
                        self.scratch[agent] = star;
                        return Some(ManipulationWitness {
                            profile: Profile::from_prefs_unchecked(&self.scratch),
                            agent,
                            misreport: lie,
                            sincere_outcome: sincere,
                            improved_outcome: outcome,
                        });
                    }
                }
            }
            self.scratch[agent] = prefs[agent];
        }
        None
    }

    fn classify(
        &mut self,
        prefs: &[Preference],
    ) -> Result<(Verdict, Option<ManipulationWitness>, Option<Violator>)> {
        let violator = self.violator(prefs);
        let witness = self.witness(prefs);
        match (&violator, &witness) {
            (None, None) => Ok((Verdict::Dictatorial, None, None)),
            (Some(_), Some(_)) => Ok((Verdict::Manipulable, witness, violator)),
            _ => Err(Error::ClassificationConflict {
                profile: Profile::from_prefs_unchecked(prefs).to_string(),
            }),
        }
    }
}

fn ensure_tops_only(rule: &Rule) -> Result<()> {
    if rule.is_tops_only_by_construction() || rules::is_tops_only(rule)? {
        Ok(())
    } else {
        Err(Error::NotTopsOnly(rule.to_string()))
    }
}

fn checked_space(rule: &Rule, profile: &Profile) -> Result<ProfileSpace> {
    rule.check_profile(profile)?;
    scan_space(rule.dims())
}

/// `None` when `profile` is dictatorial for `rule`; otherwise the first
/// deviation (by agent, then misreport code) that moves the outcome. Defined
/// for every rule.
pub fn dictatorial_violation(rule: &Rule, profile: &Profile) -> Result<Option<Violator>> {
    let space = checked_space(rule, profile)?;
    Ok(Scanner::new(rule, &space).violator(profile.prefs()))
}

pub fn is_dictatorial_profile(rule: &Rule, profile: &Profile) -> Result<bool> {
    Ok(dictatorial_violation(rule, profile)?.is_none())
}

/// A same-top manipulation certifying that `profile` is manipulable.
/// Refuses rules that are not tops-only.
pub fn manipulation_at(rule: &Rule, profile: &Profile) -> Result<Option<ManipulationWitness>> {
    let space = checked_space(rule, profile)?;
    ensure_tops_only(rule)?;
    Ok(Scanner::new(rule, &space).witness(profile.prefs()))
}

pub fn is_manipulable_profile(rule: &Rule, profile: &Profile) -> Result<bool> {
    Ok(manipulation_at(rule, profile)?.is_some())
}

pub fn classify_profile(rule: &Rule, profile: &Profile) -> Result<ProfileClassification> {
    let space = checked_space(rule, profile)?;
    ensure_tops_only(rule)?;
    let (verdict, witness, violator) = Scanner::new(rule, &space).classify(profile.prefs())?;
    Ok(ProfileClassification {
        profile: profile.clone(),
        verdict,
        witness,
        violator,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Keep `M_f` and `D_f` as bitsets, not just their sizes.
    pub materialize: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationSummary {
    pub rule: Rule,
    pub total: u64,
    /// `|M_f|`
    pub manipulable: u64,
    /// `|D_f|`
    pub dictatorial: u64,
    pub manipulable_set: Option<FixedBitSet>,
    pub dictatorial_set: Option<FixedBitSet>,
    /// Witness for the lowest-code manipulable profile.
    pub first_manipulable: Option<(Profile, ManipulationWitness)>,
    pub first_dictatorial: Option<Profile>,
}

impl ClassificationSummary {
    pub fn dims(&self) -> Dims {
        self.rule.dims()
    }

    fn empty(rule: &Rule, total: u64, opts: ClassifyOptions) -> Self {
        let set = || opts.materialize.then(|| FixedBitSet::with_capacity(total as usize));
        ClassificationSummary {
            rule: rule.clone(),
            total,
            manipulable: 0,
            dictatorial: 0,
            manipulable_set: set(),
            dictatorial_set: set(),
            first_manipulable: None,
            first_dictatorial: None,
        }
    }

    /// Records `count` profiles with the same verdict; `codes` are their
    /// profile codes in ascending order, the first being the lowest.
    fn record(
        &mut self,
        verdict: Verdict,
        witness: Option<ManipulationWitness>,
        count: u64,
        first: &Profile,
        codes: impl Iterator<Item = u64>,
    ) {
        let first_code = first.code();
        let set = match verdict {
            Verdict::Dictatorial => {
                self.dictatorial += count;
                if self.first_dictatorial.as_ref().map_or(true, |p| first_code < p.code()) {
                    self.first_dictatorial = Some(first.clone());
                }
                self.dictatorial_set.as_mut()
            }
            Verdict::Manipulable => {
                self.manipulable += count;
                if self
                    .first_manipulable
                    .as_ref()
                    .map_or(true, |(p, _)| first_code < p.code())
                {
                    self.first_manipulable = witness.map(|w| (first.clone(), w));
                }
                self.manipulable_set.as_mut()
            }
        };
        if let Some(set) = set {
            codes.for_each(|c| set.insert(c as usize));
        }
    }
}

/// Classifies every profile of a tops-only rule.
///
/// Both verdicts depend only on the tops profile when the rule is tops-only,
/// so one representative per same-tops cell is classified by the per-profile
/// definitions and the verdict is applied to the whole cell of
/// `((m-1)!)^n` profiles. [`classify_all_definitional`] is the
/// cell-free reference path.
pub fn classify_all(rule: &Rule, opts: ClassifyOptions) -> Result<ClassificationSummary> {
    ensure_tops_only(rule)?;
    let dims = rule.dims();
    let space = scan_space(dims)?;
    let cells = dims.tops_count() as usize;
    let classify_cell = |code: usize| -> Result<(Vec<Preference>, Verdict, Option<ManipulationWitness>)> {
        let rep = representative(dims, code);
        let (verdict, witness, _) = Scanner::new(rule, &space).classify(&rep)?;
        Ok((rep, verdict, witness))
    };
    let results: Vec<_> = if cells >= 64 {
        (0..cells).into_par_iter().map(classify_cell).collect::<Result<_>>()?
    } else {
        (0..cells).map(classify_cell).collect::<Result<_>>()?
    };
    let mut summary = ClassificationSummary::empty(rule, space.len(), opts);
    let cell_size = dims.tops_cell_size();
    for (rep, verdict, witness) in results {
        let first = Profile::from_prefs_unchecked(&rep);
        let codes = opts
            .materialize
            .then(|| cell_codes(dims, &rep))
            .into_iter()
            .flatten();
        summary.record(verdict, witness, cell_size, &first, codes);
    }
    Ok(summary)
}

/// Codes of every profile sharing `rep`'s tops, ascending.
fn cell_codes(dims: Dims, rep: &[Preference]) -> impl Iterator<Item = u64> {
    let block = factorial(dims.alts - 1);
    let radix = factorial(dims.alts);
    let starts: Vec<u64> = rep.iter().map(|p| p.code()).collect();
    let count = block.pow(dims.agents as u32);
    (0..count).map(move |k| {
        let mut rest = k;
        let mut offsets = vec![0u64; starts.len()];
        for o in offsets.iter_mut().rev() {
            *o = rest % block;
            rest /= block;
        }
        starts
            .iter()
            .zip(&offsets)
            .fold(0, |acc, (s, o)| acc * radix + s + o)
    })
}

/// Classifies every profile of a tops-only rule one by one.
pub fn classify_all_definitional(rule: &Rule, opts: ClassifyOptions) -> Result<ClassificationSummary> {
    ensure_tops_only(rule)?;
    let space = scan_space(rule.dims())?;
    let mut scanner = Scanner::new(rule, &space);
    let mut summary = ClassificationSummary::empty(rule, space.len(), opts);
    let failure = space.for_each_in(0..space.len(), |code, prefs| match scanner.classify(prefs) {
        Ok((verdict, witness, _)) => {
            let first = Profile::from_prefs_unchecked(prefs);
            summary.record(verdict, witness, 1, &first, std::iter::once(code));
            ControlFlow::Continue(())
        }
        Err(e) => ControlFlow::Break(e),
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(summary),
    }
}

/// `D_f` for any rule, profile by profile.
pub fn dictatorial_profiles(rule: &Rule) -> Result<FixedBitSet> {
    let space = scan_space(rule.dims())?;
    let mut scanner = Scanner::new(rule, &space);
    let mut set = FixedBitSet::with_capacity(space.len() as usize);
    space.for_each_in(0..space.len(), |code, prefs| {
        if scanner.violator(prefs).is_none() {
            set.insert(code as usize);
        }
        ControlFlow::<()>::Continue(())
    });
    Ok(set)
}

/// `|M_f|`; the rule must be tops-only.
pub fn manipulable_count(rule: &Rule) -> Result<u64> {
    Ok(classify_all(rule, ClassifyOptions::default())?.manipulable)
}

/// `|D_f|` for any rule.
pub fn dictatorial_count(rule: &Rule) -> Result<u64> {
    if rule.is_tops_only_by_construction() {
        Ok(classify_all(rule, ClassifyOptions::default())?.dictatorial)
    } else {
        Ok(dictatorial_profiles(rule)?.count_ones(..) as u64)
    }
}

/// `f ⪰_m g`: `|M_f| >= |M_g|`. Both rules must be tops-only.
pub fn at_least_as_manipulable(f: &Rule, g: &Rule) -> Result<bool> {
    f.check_same_dims(g)?;
    Ok(manipulable_count(f)? >= manipulable_count(g)?)
}

/// `f ⪰_d g`: `|D_f| >= |D_g|`. Defined for all rules.
pub fn at_least_as_dictatorial(f: &Rule, g: &Rule) -> Result<bool> {
    f.check_same_dims(g)?;
    Ok(dictatorial_count(f)? >= dictatorial_count(g)?)
}

/// Whether `f ⪰_d g ⇔ g ⪰_m f` holds for this pair.
pub fn check_duality(f: &Rule, g: &Rule) -> Result<bool> {
    f.check_same_dims(g)?;
    let sf = classify_all(f, ClassifyOptions::default())?;
    let sg = classify_all(g, ClassifyOptions::default())?;
    Ok(duality_holds((sf.manipulable, sf.dictatorial), (sg.manipulable, sg.dictatorial)))
}

/// The biconditional on `(|M|, |D|)` counts.
pub fn duality_holds(f: (u64, u64), g: (u64, u64)) -> bool {
    (f.1 >= g.1) == (g.0 >= f.0)
}

/// Extremal counts over a pool of tops-only rules, so the remarks can be
/// checked against a large pool without recomputing it per rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PoolStats {
    pub size: u64,
    pub min_manipulable: u64,
    pub max_dictatorial: u64,
}

impl PoolStats {
    pub fn from_counts(counts: impl IntoIterator<Item = (u64, u64)>) -> Option<Self> {
        counts.into_iter().fold(None, |acc, (m, d)| {
            Some(match acc {
                None => PoolStats {
                    size: 1,
                    min_manipulable: m,
                    max_dictatorial: d,
                },
                Some(s) => PoolStats {
                    size: s.size + 1,
                    min_manipulable: s.min_manipulable.min(m),
                    max_dictatorial: s.max_dictatorial.max(d),
                },
            })
        })
    }

    pub fn from_rules(rules: &[Rule]) -> Result<Option<Self>> {
        let counts = rules
            .par_iter()
            .map(|r| classify_all(r, ClassifyOptions::default()).map(|s| (s.manipulable, s.dictatorial)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_counts(counts))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RemarkCheck {
    /// The biconditional holds for this rule.
    pub holds: bool,
    /// Left side: strategy-proof (R1) or dictatorial (R2).
    pub property: bool,
    /// Right side: minimal `|M|` (R1) or maximal `|D|` (R2) in the pool.
    pub extremal: bool,
    /// `|M_f|` (R1) or `|D_f|` (R2).
    pub count: u64,
}

/// Strategy-proof iff every rule in the pool is at least as manipulable.
pub fn remark_strategyproof_minimal(f: &Rule, pool: &PoolStats) -> Result<RemarkCheck> {
    ensure_tops_only(f)?;
    let count = manipulable_count(f)?;
    let property = rules::is_strategy_proof(f)?;
    let extremal = pool.min_manipulable >= count;
    Ok(RemarkCheck {
        holds: property == extremal,
        property,
        extremal,
        count,
    })
}

/// Dictatorial iff at least as dictatorial as every rule in the pool.
/// The rule must be tops-only and efficient.
pub fn remark_dictatorial_maximal(f: &Rule, pool: &PoolStats) -> Result<RemarkCheck> {
    let tops_only = f.is_tops_only_by_construction() || rules::is_tops_only(f)?;
    if !tops_only || !rules::is_efficient(f)? {
        return Err(Error::NotTopsEfficient(f.to_string()));
    }
    let count = classify_all(f, ClassifyOptions::default())?.dictatorial;
    let property = rules::is_dictatorial(f)?;
    let extremal = count >= pool.max_dictatorial;
    Ok(RemarkCheck {
        holds: property == extremal,
        property,
        extremal,
        count,
    })
}
