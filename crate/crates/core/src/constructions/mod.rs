//! Rule-building operators, the rule census, the per-result checks and the
//! two-alternative control.

mod census;
mod control;
mod enumerate;
mod lemmas;
mod ops;

pub use census::{census, census_in, CensusCounts, CensusOptions, CensusReport, CensusRow, LISTED_RULES};
pub use control::{gs_counterexample_two_alternatives, NonDictatorWitness, RuleCertificate};
pub use enumerate::{
    enumerate_tops_only_rules, Filter, FilterSet, Mode, RuleSampler, RuleStream, SampleSpace, TopsGeometry,
    TopsRuleSpace, TopsRules, CHUNK,
};
pub use lemmas::{run_suite, verify_lemma, Counterexample, LemmaId, Scope, Status, VerificationReport};
pub use ops::{coalesce, restrict};
