//! Rule certificates, and the two-alternative rule that satisfies every
//! hypothesis of the impossibility result except `m >= 3`.

use std::ops::ControlFlow;

use serde::Serialize;

use crate::domain::{Alternative, Dims, Profile};
use crate::error::{Error, Result};
use crate::rules::{self, scan_space, Rule};

/// A profile at which `agent`'s top is not selected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonDictatorWitness {
    pub agent: usize,
    pub profile: Profile,
    pub outcome: Alternative,
}

/// The five predicates of a rule, each computed by a full scan, with one
/// witness per agent when nobody dictates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleCertificate {
    pub rule: Rule,
    pub agents: usize,
    pub alts: usize,
    pub unanimous: bool,
    pub strategy_proof: bool,
    pub tops_only: bool,
    pub efficient: bool,
    pub dictator: Option<usize>,
    pub non_dictator_witnesses: Vec<NonDictatorWitness>,
}

impl RuleCertificate {
    pub fn for_rule(rule: &Rule) -> Result<Self> {
        let dims = rule.dims();
        let dictator = rules::dictator(rule)?;
        let non_dictator_witnesses = if dictator.is_none() {
            non_dictator_witnesses(rule)?
        } else {
            Vec::new()
        };
        Ok(RuleCertificate {
            rule: rule.clone(),
            agents: dims.agents,
            alts: dims.alts,
            unanimous: rules::is_unanimous(rule)?,
            strategy_proof: rules::is_strategy_proof(rule)?,
            // Scanned even for closed forms that are tops-only by construction.
            tops_only: rules::tops_only_violation(&rule.tabulate()?)?.is_none(),
            efficient: rules::is_efficient(rule)?,
            dictator,
            non_dictator_witnesses,
        })
    }

    /// Unanimous, strategy-proof, tops-only, efficient and not dictatorial.
    pub fn refutes_dictatorship(&self) -> bool {
        self.unanimous && self.strategy_proof && self.tops_only && self.efficient && self.dictator.is_none()
    }

    /// Re-evaluates the witnesses against the rule.
    pub fn validate(&self) -> Result<bool> {
        if self.dictator.is_some() {
            return Ok(self.non_dictator_witnesses.is_empty());
        }
        if self.non_dictator_witnesses.len() != self.agents {
            return Ok(false);
        }
        for (i, w) in self.non_dictator_witnesses.iter().enumerate() {
            let outcome = self.rule.evaluate(&w.profile)?;
            if w.agent != i || outcome != w.outcome || w.profile.pref(i)?.top() == outcome {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// For each agent, the lowest-code profile where its top loses.
fn non_dictator_witnesses(rule: &Rule) -> Result<Vec<NonDictatorWitness>> {
    let space = scan_space(rule.dims())?;
    let n = rule.dims().agents;
    let mut found: Vec<Option<NonDictatorWitness>> = vec![None; n];
    let mut missing = n;
    space.for_each_in(0..space.len(), |_, prefs| {
        let outcome = rule.eval(prefs);
        for (i, slot) in found.iter_mut().enumerate() {
            if slot.is_none() && prefs[i].top() != outcome {
                *slot = Some(NonDictatorWitness {
                    agent: i,
                    profile: Profile::from_prefs_unchecked(prefs),
                    outcome,
                });
                missing -= 1;
            }
        }
        if missing == 0 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(found.into_iter().flatten().collect())
}

/// Majority over two alternatives, ties to `a`, certified by full scans.
pub fn gs_counterexample_two_alternatives(agents: usize) -> Result<RuleCertificate> {
    let dims = Dims::new(agents, 2)?;
    let rule = Rule::majority_lex(dims)?;
    let cert = RuleCertificate::for_rule(&rule)?;
    if !cert.refutes_dictatorship() || !cert.validate()? {
        return Err(Error::Config(format!(
            "majority at {dims} failed its own certificate"
        )));
    }
    Ok(cert)
}
