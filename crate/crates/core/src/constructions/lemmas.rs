//! Quantified checks for each result, run over a rule stream.
//!
//! Every predicate here is the full-scan definition from [`crate::rules`] or
//! [`crate::classification`]; the tops-level shortcuts used by the census are
//! not trusted in this module. A failing check carries a [`Counterexample`]
//! that can be re-validated on its own.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::control::RuleCertificate;
use super::enumerate::{Mode, RuleSampler, RuleStream, SampleSpace};
use crate::classification::{
    classify_all, classify_all_definitional, dictatorial_profiles, duality_holds, remark_dictatorial_maximal,
    remark_strategyproof_minimal, ClassifyOptions, PoolStats, RemarkCheck,
};
use crate::domain::{Alternative, Dims, Profile};
use crate::error::{Error, Result};
use crate::rules::{self, scan_space, ManipulationWitness, ParetoWitness, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LemmaId {
    L1,
    L3,
    L4,
    L5,
    C1,
    C2,
    R1,
    R2,
    #[serde(rename = "THM")]
    Thm,
}

impl LemmaId {
    pub const ALL: [LemmaId; 9] = [
        LemmaId::L1,
        LemmaId::L3,
        LemmaId::L4,
        LemmaId::L5,
        LemmaId::C1,
        LemmaId::C2,
        LemmaId::R1,
        LemmaId::R2,
        LemmaId::Thm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::L1 => "L1",
            LemmaId::L3 => "L3",
            LemmaId::L4 => "L4",
            LemmaId::L5 => "L5",
            LemmaId::C1 => "C1",
            LemmaId::C2 => "C2",
            LemmaId::R1 => "R1",
            LemmaId::R2 => "R2",
            LemmaId::Thm => "THM",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            LemmaId::L1 => "unanimous strategy-proof rules are efficient",
            LemmaId::L3 => "tops-only efficient rules select some agent's top",
            LemmaId::L4 => "a tops-only efficient rule is dictatorial iff every profile is dictatorial",
            LemmaId::L5 => "for a tops-only rule every profile is dictatorial or manipulable, and not both",
            LemmaId::C1 => "unanimous strategy-proof rules are tops-only and efficient",
            LemmaId::C2 => "f is at least as dictatorial as g iff g is at least as manipulable as f",
            LemmaId::R1 => "a tops-only rule is strategy-proof iff it has the fewest manipulable profiles",
            LemmaId::R2 => "a tops-only efficient rule is dictatorial iff it has the most dictatorial profiles",
            LemmaId::Thm => "the unanimous strategy-proof rules are exactly the dictatorships",
        }
    }

    /// Family drawn from in sampled mode.
    pub fn sample_space(self) -> SampleSpace {
        match self {
            LemmaId::L1 | LemmaId::C1 => SampleSpace::Unanimous,
            LemmaId::L3 | LemmaId::L4 | LemmaId::R2 | LemmaId::Thm => SampleSpace::TopsEfficient,
            LemmaId::L5 | LemmaId::C2 | LemmaId::R1 => SampleSpace::All,
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        if let Some(id) = LemmaId::ALL.into_iter().find(|id| id.name() == upper) {
            return Ok(id);
        }
        Err(Error::UnknownLemma(if upper == "L2" {
            "L2 rests on an external theorem and quantifies over rules that cannot be enumerated \
             here; its consequences are checked by C1"
                .to_string()
        } else {
            format!("`{s}` (expected one of L1 L3 L4 L5 C1 C2 R1 R2 THM)")
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

/// Evidence that a check failed. Each variant can be re-checked with
/// [`Counterexample::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// Outcome Pareto-dominated.
    Pareto { rule: Rule, witness: ParetoWitness },
    /// Same tops, different outcomes.
    NotTopsOnly { rule: Rule, first: Profile, second: Profile },
    /// Outcome is nobody's top.
    OffTops { rule: Rule, profile: Profile, outcome: Alternative },
    /// A rule whose properties contradict the statement.
    Rule { certificate: RuleCertificate },
    /// `|D_f|` disagrees with dictatorship.
    DictatorialCount {
        rule: Rule,
        dictatorial_profiles: u64,
        total: u64,
        dictator: Option<usize>,
    },
    /// A profile classified as neither or both, or two classification
    /// paths that disagree.
    Classification { rule: Rule, detail: String },
    Duality {
        f: Rule,
        g: Rule,
        f_counts: (u64, u64),
        g_counts: (u64, u64),
    },
    /// `remark` is `R1` or `R2`.
    Remark {
        remark: LemmaId,
        rule: Rule,
        check: RemarkCheck,
        pool: PoolStats,
    },
}

impl Counterexample {
    /// Whether the evidence still demonstrates a failure.
    pub fn validate(&self) -> Result<bool> {
        match self {
            Counterexample::Pareto { rule, witness } => witness.validate(rule),
            Counterexample::NotTopsOnly { rule, first, second } => Ok(first.tops() == second.tops()
                && rule.evaluate(first)? != rule.evaluate(second)?),
            Counterexample::OffTops { rule, profile, outcome } => {
                Ok(rule.evaluate(profile)? == *outcome && profile.supporters(*outcome).is_empty())
            }
            Counterexample::Rule { certificate } => {
                let fresh = RuleCertificate::for_rule(&certificate.rule)?;
                Ok(fresh == *certificate && certificate.validate()?)
            }
            Counterexample::DictatorialCount {
                rule,
                dictatorial_profiles: d,
                total,
                dictator,
            } => {
                let count = dictatorial_profiles(rule)?.count_ones(..) as u64;
                let dict = rules::dictator(rule)?;
                Ok(count == *d && dict == *dictator && (count == *total) != dict.is_some())
            }
            Counterexample::Classification { rule, .. } => {
                let cell = classify_all(rule, ClassifyOptions::default());
                let slow = classify_all_definitional(rule, ClassifyOptions::default());
                Ok(match (cell, slow) {
                    (Ok(a), Ok(b)) => {
                        a.manipulable != b.manipulable
                            || a.dictatorial != b.dictatorial
                            || a.manipulable + a.dictatorial != a.total
                    }
                    _ => true,
                })
            }
            Counterexample::Duality { f, g, .. } => {
                let a = counts(f)?;
                let b = counts(g)?;
                Ok(!duality_holds(a, b))
            }
            Counterexample::Remark { remark, rule, pool, check } => {
                let again = match remark {
                    LemmaId::R1 => remark_strategyproof_minimal(rule, pool)?,
                    _ => remark_dictatorial_maximal(rule, pool)?,
                };
                Ok(again == *check && !again.holds)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scope {
    pub agents: usize,
    pub alts: usize,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_space: Option<SampleSpace>,
    /// Which rules were quantified over.
    pub families: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub lemma: LemmaId,
    pub statement: &'static str,
    pub scope: Scope,
    pub status: Status,
    pub checked: BTreeMap<String, u64>,
    pub counterexample: Option<Counterexample>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Per-chunk statistics and the first failure seen.
#[derive(Default)]
struct Tally {
    stats: BTreeMap<&'static str, u64>,
    fail: Option<Counterexample>,
}

impl Tally {
    fn bump(&mut self, key: &'static str) {
        self.add(key, 1);
    }

    fn add(&mut self, key: &'static str, by: u64) {
        *self.stats.entry(key).or_insert(0) += by;
    }

    fn fail(&mut self, c: Counterexample) {
        if self.fail.is_none() {
            self.fail = Some(c);
        }
    }

    fn merge(&mut self, other: Tally) {
        for (k, v) in other.stats {
            self.add(k, v);
        }
        if let Some(c) = other.fail {
            self.fail(c);
        }
    }
}

/// Applies `check` to every rule of the stream, chunks in parallel, merged
/// in stream order.
fn over_stream<F>(stream: &RuleStream, check: F) -> Result<Tally>
where
    F: Fn(&Rule, &mut Tally) -> Result<()> + Sync,
{
    let parts = stream.map_chunks(|s, range| {
        let geo = s.geometry();
        let mut tally = Tally::default();
        let err = s.for_each_in(range, |_, table| {
            let rule = geo.rule(table.to_vec());
            match check(&rule, &mut tally) {
                Ok(()) => ControlFlow::Continue(()),
                Err(e) => ControlFlow::Break(e),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(tally),
        }
    })?;
    let mut total = Tally::default();
    for p in parts {
        total.merge(p);
    }
    Ok(total)
}

fn counts(rule: &Rule) -> Result<(u64, u64)> {
    let s = classify_all(rule, ClassifyOptions::default())?;
    Ok((s.manipulable, s.dictatorial))
}

fn dictator_tables(dims: Dims) -> Result<Vec<Rule>> {
    (0..dims.agents)
        .map(|i| Rule::dictator(dims, i)?.to_tops_table())
        .collect()
}

/// Records library rules that fall outside the tops-only family, with a
/// validated manipulation when there is one.
fn note_non_tops_only(library: &[Rule], tally: &mut Tally, notes: &mut Vec<String>) -> Result<()> {
    for rule in library {
        if let Some((p, q)) = rules::tops_only_violation(rule)? {
            tally.bump("library_not_tops_only");
            let manip: Option<ManipulationWitness> = rules::find_manipulation(rule)?;
            match manip {
                Some(w) if w.validate(rule)? => {
                    tally.bump("library_manipulable_validated");
                    notes.push(format!(
                        "{rule} is not tops-only ({p} and {q} share tops); agent {} manipulates at {} via {} ({} -> {})",
                        w.agent, w.profile, w.misreport, w.sincere_outcome, w.improved_outcome
                    ));
                }
                _ => notes.push(format!("{rule} is not tops-only ({p} and {q} share tops)")),
            }
        }
    }
    Ok(())
}

fn families(mode: Mode, space: SampleSpace, with_library: bool) -> String {
    let base = match mode {
        Mode::Exhaustive => "every tops-only table".to_string(),
        Mode::Sampled { .. } => format!("sampled tops-only tables ({space})"),
    };
    if with_library {
        format!("{base}; closed-form library")
    } else {
        base
    }
}

/// Runs one check at `(n, m)`.
pub fn verify_lemma(id: LemmaId, dims: Dims, mode: Mode) -> Result<VerificationReport> {
    let space = id.sample_space();
    let mut notes = Vec::new();
    let mut with_library = false;
    let tally = match id {
        LemmaId::L1 => {
            with_library = true;
            check_l1(dims, mode, &mut notes)?
        }
        LemmaId::C1 => {
            with_library = true;
            check_c1(dims, mode, &mut notes)?
        }
        LemmaId::L3 => check_l3(dims, mode)?,
        LemmaId::L4 => {
            with_library = true;
            check_l4(dims, mode, &mut notes)?
        }
        LemmaId::L5 => check_l5(dims, mode)?,
        LemmaId::C2 => check_c2(dims, mode)?,
        LemmaId::R1 => check_r1(dims, mode, &mut notes)?,
        LemmaId::R2 => check_r2(dims, mode, &mut notes)?,
        LemmaId::Thm => {
            with_library = true;
            if dims.alts < 3 {
                notes.push(format!(
                    "m = {} is below the 3 alternatives the statement assumes; a failure here shows the assumption is needed",
                    dims.alts
                ));
            }
            check_thm(dims, mode)?
        }
    };
    if !mode.is_exhaustive() {
        notes.push(format!("sampled from the {space} family; not a proof over the whole space"));
    }
    Ok(VerificationReport {
        lemma: id,
        statement: id.statement(),
        scope: Scope {
            agents: dims.agents,
            alts: dims.alts,
            mode,
            sample_space: (!mode.is_exhaustive()).then_some(space),
            families: families(mode, space, with_library),
        },
        status: if tally.fail.is_some() { Status::Fail } else { Status::Pass },
        checked: tally.stats.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        counterexample: tally.fail,
        notes,
    })
}

/// Runs several checks in the given order.
pub fn run_suite(ids: &[LemmaId], dims: Dims, mode: Mode) -> Result<Vec<VerificationReport>> {
    ids.iter().map(|&id| verify_lemma(id, dims, mode)).collect()
}

fn l1_rule(r: &Rule, t: &mut Tally) -> Result<()> {
    t.bump("rules");
    if !rules::is_unanimous(r)? {
        return Ok(());
    }
    t.bump("unanimous");
    if !rules::is_strategy_proof(r)? {
        return Ok(());
    }
    t.bump("unanimous_strategy_proof");
    match rules::efficiency_violation(r)? {
        Some(witness) => t.fail(Counterexample::Pareto {
            rule: r.clone(),
            witness,
        }),
        None => t.bump("efficient"),
    }
    Ok(())
}

fn check_l1(dims: Dims, mode: Mode, notes: &mut Vec<String>) -> Result<Tally> {
    let library = Rule::library(dims);
    let mut tally = Tally::default();
    for r in &library {
        l1_rule(r, &mut tally)?;
    }
    note_non_tops_only(&library, &mut tally, notes)?;
    let stream = RuleStream::new(dims, mode, LemmaId::L1.sample_space())?;
    tally.merge(over_stream(&stream, l1_rule)?);
    Ok(tally)
}

fn c1_rule(r: &Rule, t: &mut Tally) -> Result<()> {
    t.bump("rules");
    if !rules::is_unanimous(r)? || !rules::is_strategy_proof(r)? {
        return Ok(());
    }
    t.bump("unanimous_strategy_proof");
    if let Some((first, second)) = rules::tops_only_violation(r)? {
        t.fail(Counterexample::NotTopsOnly {
            rule: r.clone(),
            first,
            second,
        });
        return Ok(());
    }
    match rules::efficiency_violation(r)? {
        Some(witness) => t.fail(Counterexample::Pareto {
            rule: r.clone(),
            witness,
        }),
        None => t.bump("tops_only_efficient"),
    }
    Ok(())
}

fn check_c1(dims: Dims, mode: Mode, notes: &mut Vec<String>) -> Result<Tally> {
    let library = Rule::library(dims);
    let mut tally = Tally::default();
    for r in &library {
        c1_rule(r, &mut tally)?;
    }
    note_non_tops_only(&library, &mut tally, notes)?;
    let stream = RuleStream::new(dims, mode, LemmaId::C1.sample_space())?;
    tally.merge(over_stream(&stream, c1_rule)?);
    Ok(tally)
}

fn check_l3(dims: Dims, mode: Mode) -> Result<Tally> {
    let stream = RuleStream::new(dims, mode, LemmaId::L3.sample_space())?;
    over_stream(&stream, |r, t| {
        t.bump("rules");
        if !rules::is_efficient(r)? {
            return Ok(());
        }
        t.bump("tops_efficient");
        let space = scan_space(r.dims())?;
        t.add("profiles", space.len());
        let off = space.for_each_in(0..space.len(), |_, prefs| {
            let x = r.eval(prefs);
            if prefs.iter().any(|p| p.top() == x) {
                ControlFlow::Continue(())
            } else {
                ControlFlow::Break((Profile::from_prefs_unchecked(prefs), x))
            }
        });
        if let Some((profile, outcome)) = off {
            t.fail(Counterexample::OffTops {
                rule: r.clone(),
                profile,
                outcome,
            });
        }
        Ok(())
    })
}

fn check_l4(dims: Dims, mode: Mode, notes: &mut Vec<String>) -> Result<Tally> {
    let mut tally = Tally::default();
    // Efficiency is needed: constant rules have every profile dictatorial.
    let total = dims.profile_count() as u64;
    for r in Rule::library(dims) {
        if matches!(r.repr(), crate::rules::Repr::Constant(_))
            && dictatorial_profiles(&r)?.count_ones(..) as u64 == total
        {
            tally.bump("constants_with_all_profiles_dictatorial");
        }
    }
    notes.push("constant rules have every profile dictatorial without being dictatorships; they are not efficient".into());
    let stream = RuleStream::new(dims, mode, LemmaId::L4.sample_space())?;
    tally.merge(over_stream(&stream, |r, t| {
        t.bump("rules");
        if !rules::is_efficient(r)? {
            return Ok(());
        }
        t.bump("tops_efficient");
        let d = dictatorial_profiles(r)?.count_ones(..) as u64;
        let dictator = rules::dictator(r)?;
        if d == total {
            t.bump("all_profiles_dictatorial");
        }
        if dictator.is_some() {
            t.bump("dictatorial");
        }
        if (d == total) != dictator.is_some() {
            t.fail(Counterexample::DictatorialCount {
                rule: r.clone(),
                dictatorial_profiles: d,
                total,
                dictator,
            });
        }
        Ok(())
    })?);
    Ok(tally)
}

fn check_l5(dims: Dims, mode: Mode) -> Result<Tally> {
    let stream = RuleStream::new(dims, mode, LemmaId::L5.sample_space())?;
    over_stream(&stream, |r, t| {
        t.bump("rules");
        let slow = match classify_all_definitional(r, ClassifyOptions { materialize: true }) {
            Ok(s) => s,
            Err(Error::ClassificationConflict { profile }) => {
                t.fail(Counterexample::Classification {
                    rule: r.clone(),
                    detail: format!("{profile} is neither or both"),
                });
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        t.add("classifications", slow.total);
        t.add("manipulable_profiles", slow.manipulable);
        t.add("dictatorial_profiles", slow.dictatorial);
        let (m, d) = (slow.manipulable_set.as_ref(), slow.dictatorial_set.as_ref());
        let disjoint = match (m, d) {
            (Some(m), Some(d)) => m.is_disjoint(d) && m.count_ones(..) + d.count_ones(..) == slow.total as usize,
            _ => false,
        };
        let cell = classify_all(r, ClassifyOptions::default())?;
        if !disjoint {
            t.fail(Counterexample::Classification {
                rule: r.clone(),
                detail: "manipulable and dictatorial profiles do not partition the profile space".into(),
            });
        } else if (cell.manipulable, cell.dictatorial) != (slow.manipulable, slow.dictatorial) {
            t.fail(Counterexample::Classification {
                rule: r.clone(),
                detail: format!(
                    "cell path gives ({}, {}), profile path ({}, {})",
                    cell.manipulable, cell.dictatorial, slow.manipulable, slow.dictatorial
                ),
            });
        }
        Ok(())
    })
}

fn check_c2(dims: Dims, mode: Mode) -> Result<Tally> {
    let mut tally = Tally::default();
    match mode {
        Mode::Exhaustive => {
            let stream = RuleStream::new(dims, mode, SampleSpace::All)?;
            let total = dims.profile_count() as u64;
            // Signatures in first-seen order, with multiplicity.
            let parts = stream.map_chunks(|s, range| {
                let geo = s.geometry();
                let mut sigs: Vec<((u64, u64), u64, Rule)> = Vec::new();
                let err = s.for_each_in(range, |_, table| {
                    let rule = geo.rule(table.to_vec());
                    match counts(&rule) {
                        Ok(c) => {
                            match sigs.iter_mut().find(|(k, _, _)| *k == c) {
                                Some(e) => e.1 += 1,
                                None => sigs.push((c, 1, rule)),
                            }
                            ControlFlow::Continue(())
                        }
                        Err(e) => ControlFlow::Break(e),
                    }
                });
                match err {
                    Some(e) => Err(e),
                    None => Ok(sigs),
                }
            })?;
            let mut sigs: Vec<((u64, u64), u64, Rule)> = Vec::new();
            for part in parts {
                for (k, n, rule) in part {
                    match sigs.iter_mut().find(|(s, _, _)| *s == k) {
                        Some(e) => e.1 += n,
                        None => sigs.push((k, n, rule)),
                    }
                }
            }
            let rules_seen: u64 = sigs.iter().map(|s| s.1).sum();
            tally.add("rules", rules_seen);
            tally.add("signatures", sigs.len() as u64);
            for (k, _, rule) in &sigs {
                if k.0 + k.1 != total {
                    tally.fail(Counterexample::Classification {
                        rule: rule.clone(),
                        detail: format!("|M| + |D| = {} + {} != {total}", k.0, k.1),
                    });
                }
            }
            for (a, na, fa) in &sigs {
                for (b, nb, gb) in &sigs {
                    tally.add("pairs", na * nb);
                    if !duality_holds(*a, *b) {
                        tally.fail(Counterexample::Duality {
                            f: fa.clone(),
                            g: gb.clone(),
                            f_counts: *a,
                            g_counts: *b,
                        });
                    }
                }
            }
        }
        Mode::Sampled { samples, seed } => {
            let sampler = RuleSampler::new(dims, LemmaId::C2.sample_space(), seed)?;
            let pool = sampler.sample(samples * 2);
            let results = pool
                .par_chunks(2)
                .map(|pair| {
                    let a = counts(&pair[0])?;
                    let b = counts(&pair[1])?;
                    Ok((a, b))
                })
                .collect::<Result<Vec<_>>>()?;
            tally.add("pairs", samples);
            for (pair, (a, b)) in pool.chunks(2).zip(results) {
                if !duality_holds(a, b) || !duality_holds(b, a) {
                    tally.fail(Counterexample::Duality {
                        f: pair[0].clone(),
                        g: pair[1].clone(),
                        f_counts: a,
                        g_counts: b,
                    });
                }
            }
        }
    }
    Ok(tally)
}

/// `(property, count)` pairs for a pool, in stream order, plus the
/// dictatorships when sampling so the pool holds the extremal rules.
fn pool_of(
    dims: Dims,
    mode: Mode,
    space: SampleSpace,
    member: impl Fn(&Rule) -> Result<bool> + Sync,
    measure: impl Fn(&Rule) -> Result<u64> + Sync,
) -> Result<(Vec<Rule>, Vec<u64>)> {
    let stream = RuleStream::new(dims, mode, space)?;
    let parts = stream.map_chunks(|s, range| {
        let geo = s.geometry();
        let mut out = Vec::new();
        let err = s.for_each_in(range, |_, table| {
            let rule = geo.rule(table.to_vec());
            let step = member(&rule).and_then(|keep| {
                if keep {
                    out.push((measure(&rule)?, rule));
                }
                Ok(())
            });
            match step {
                Ok(()) => ControlFlow::Continue(()),
                Err(e) => ControlFlow::Break(e),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    })?;
    let mut rules_out = Vec::new();
    let mut counts_out = Vec::new();
    for (c, r) in parts.into_iter().flatten() {
        counts_out.push(c);
        rules_out.push(r);
    }
    if !mode.is_exhaustive() {
        for r in dictator_tables(dims)? {
            counts_out.push(measure(&r)?);
            rules_out.push(r);
        }
    }
    Ok((rules_out, counts_out))
}

fn check_r1(dims: Dims, mode: Mode, notes: &mut Vec<String>) -> Result<Tally> {
    let (pool_rules, manip) = pool_of(dims, mode, SampleSpace::All, |_| Ok(true), |r| Ok(counts(r)?.0))?;
    let pool = PoolStats::from_counts(manip.iter().map(|&m| (m, 0)))
        .ok_or_else(|| Error::Config("empty rule pool".into()))?;
    if !mode.is_exhaustive() {
        notes.push("the dictatorships are added to the sampled pool".into());
    }
    remark_pass(LemmaId::R1, &pool_rules, pool, "strategy_proof", |r| remark_strategyproof_minimal(r, &pool))
}

fn check_r2(dims: Dims, mode: Mode, notes: &mut Vec<String>) -> Result<Tally> {
    let (pool_rules, dict) = pool_of(
        dims,
        mode,
        SampleSpace::TopsEfficient,
        rules::is_efficient,
        |r| Ok(counts(r)?.1),
    )?;
    let pool = PoolStats::from_counts(dict.iter().map(|&d| (0, d)))
        .ok_or_else(|| Error::Config("empty rule pool".into()))?;
    if !mode.is_exhaustive() {
        notes.push("the dictatorships are added to the sampled pool".into());
    }
    remark_pass(LemmaId::R2, &pool_rules, pool, "dictatorial", |r| remark_dictatorial_maximal(r, &pool))
}

fn remark_pass(
    remark: LemmaId,
    pool_rules: &[Rule],
    pool: PoolStats,
    property: &'static str,
    check: impl Fn(&Rule) -> Result<RemarkCheck> + Sync,
) -> Result<Tally> {
    let checks = pool_rules
        .par_iter()
        .map(&check)
        .collect::<Result<Vec<_>>>()?;
    let mut tally = Tally::default();
    tally.add("pool", pool.size);
    for (r, c) in pool_rules.iter().zip(checks) {
        tally.bump("rules");
        if c.property {
            tally.bump(property);
        }
        if c.extremal {
            tally.bump("extremal");
        }
        if !c.holds {
            tally.fail(Counterexample::Remark {
                remark,
                rule: r.clone(),
                check: c,
                pool,
            });
        }
    }
    Ok(tally)
}

fn thm_rule(r: &Rule, t: &mut Tally) -> Result<()> {
    t.bump("rules");
    let unanimous = rules::is_unanimous(r)?;
    let sp = unanimous && rules::is_strategy_proof(r)?;
    let dictatorial = rules::is_dictatorial(r)?;
    if sp {
        t.bump("unanimous_strategy_proof");
    }
    if dictatorial {
        t.bump("dictatorial");
    }
    if sp != dictatorial {
        t.fail(Counterexample::Rule {
            certificate: RuleCertificate::for_rule(r)?,
        });
    }
    Ok(())
}

fn check_thm(dims: Dims, mode: Mode) -> Result<Tally> {
    let mut tally = Tally::default();
    for r in Rule::library(dims) {
        thm_rule(&r, &mut tally)?;
    }
    let stream = RuleStream::new(dims, mode, LemmaId::Thm.sample_space())?;
    tally.merge(over_stream(&stream, thm_rule)?);
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize, m: usize) -> Dims {
        Dims::new(n, m).unwrap()
    }

    #[test]
    fn ids_parse() {
        for id in LemmaId::ALL {
            assert_eq!(id.name().parse::<LemmaId>().unwrap(), id);
            assert_eq!(id.name().to_lowercase().parse::<LemmaId>().unwrap(), id);
        }
        assert!(matches!("L2".parse::<LemmaId>(), Err(Error::UnknownLemma(_))));
        assert!(matches!("L9".parse::<LemmaId>(), Err(Error::UnknownLemma(_))));
    }

    #[test]
    fn two_alternatives() {
        let failing: Vec<LemmaId> = LemmaId::ALL
            .into_iter()
            .filter(|&id| {
                let r = verify_lemma(id, d(2, 2), Mode::Exhaustive).unwrap();
                if let Some(c) = &r.counterexample {
                    assert!(c.validate().unwrap(), "{id}");
                }
                !r.passed()
            })
            .collect();
        // Majority is efficient and tops-only with every profile dictatorial,
        // so the dictatorship characterisations need a third alternative too.
        assert_eq!(failing, [LemmaId::L4, LemmaId::R2, LemmaId::Thm]);
    }

    #[test]
    fn theorem_fails_at_two_alternatives_with_majority() {
        let r = verify_lemma(LemmaId::Thm, d(3, 2), Mode::Exhaustive).unwrap();
        assert_eq!(r.status, Status::Fail);
        let c = r.counterexample.unwrap();
        let Counterexample::Rule { certificate } = &c else { panic!("{c:?}") };
        assert_eq!(certificate.rule.to_string(), "MAJLEX");
        assert!(certificate.refutes_dictatorship());
        assert!(c.validate().unwrap());
    }

    #[test]
    fn counterexamples_revalidate() {
        let dims = d(2, 3);
        let constant = Rule::constant(dims, Alternative::of(0)).unwrap();
        let w = rules::efficiency_violation(&constant).unwrap().unwrap();
        assert!(Counterexample::Pareto { rule: constant.clone(), witness: w }.validate().unwrap());
        let c = Counterexample::DictatorialCount {
            rule: constant.clone(),
            dictatorial_profiles: 36,
            total: 36,
            dictator: None,
        };
        assert!(c.validate().unwrap());
        let dict = Rule::dictator(dims, 0).unwrap();
        let bogus = Counterexample::DictatorialCount {
            rule: dict,
            dictatorial_profiles: 36,
            total: 36,
            dictator: Some(0),
        };
        assert!(!bogus.validate().unwrap());
    }

    #[test]
    fn sampled_three_by_three_passes() {
        let mode = Mode::Sampled { samples: 200, seed: 3 };
        for id in [LemmaId::L3, LemmaId::L4, LemmaId::Thm, LemmaId::C2] {
            let r = verify_lemma(id, d(3, 3), mode).unwrap();
            assert!(r.passed(), "{id}: {r:?}");
        }
    }
}
