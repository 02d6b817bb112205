//! Counting tops-only rules by axiom, and comparing the strategy-proof
//! efficient ones against the dictatorships.

use std::ops::ControlFlow;

use serde::Serialize;

use super::control::RuleCertificate;
use super::enumerate::{FilterSet, Mode, RuleStream, SampleSpace, TopsGeometry};
use crate::domain::{Alternative, Dims};
use crate::error::Result;
use crate::rules::Rule;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CensusCounts {
    pub total: u64,
    pub unanimous: u64,
    /// Unanimous and efficient.
    pub tops_efficient: u64,
    /// Strategy-proof among the tops-efficient rules.
    pub strategy_proof: u64,
    /// Dictatorial among all rules, counted on its own.
    pub dictatorial: u64,
}

impl CensusCounts {
    fn add(&mut self, o: &CensusCounts) {
        self.total += o.total;
        self.unanimous += o.unanimous;
        self.tops_efficient += o.tops_efficient;
        self.strategy_proof += o.strategy_proof;
        self.dictatorial += o.dictatorial;
    }

    /// `dictatorial <= strategy_proof <= tops_efficient <= unanimous <= total`.
    pub fn is_monotone(&self) -> bool {
        self.dictatorial <= self.strategy_proof
            && self.strategy_proof <= self.tops_efficient
            && self.tops_efficient <= self.unanimous
            && self.unanimous <= self.total
    }
}

/// One rule of a verbose census.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    /// Rule code when exhaustive, sample index when sampled.
    pub id: u64,
    pub rule: Rule,
    pub unanimous: bool,
    pub efficient: bool,
    pub strategy_proof: bool,
    pub dictatorial: bool,
    pub manipulable_profiles: u64,
    pub dictatorial_profiles: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CensusOptions {
    /// Keep one row per rule.
    pub verbose: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub agents: usize,
    pub alts: usize,
    pub mode: Mode,
    /// Family sampled from; absent when exhaustive.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_space: Option<SampleSpace>,
    pub filters: FilterSet,
    pub counts: CensusCounts,
    /// Strategy-proof tops-efficient rules, in stream order. Capped at
    /// [`LISTED_RULES`] entries; `counts.strategy_proof` is exact.
    pub strategy_proof_rules: Vec<Rule>,
    /// The tabulated dictatorships that pass the filters.
    pub dictator_rules: Vec<Rule>,
    /// Exhaustive: the strategy-proof tops-efficient rules are exactly the
    /// dictatorships. Sampled: no sampled rule is strategy-proof, efficient
    /// and not dictatorial.
    pub theorem_holds: bool,
    /// First strategy-proof tops-efficient rule with no dictator.
    pub first_counterexample: Option<RuleCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<CensusRow>>,
}

pub const LISTED_RULES: usize = 64;

#[derive(Default)]
struct Partial {
    counts: CensusCounts,
    sp: Vec<(u64, Vec<Alternative>)>,
    first_bad: Option<(u64, Vec<Alternative>)>,
    rows: Vec<CensusRow>,
}

fn scan(stream: &RuleStream, range: std::ops::Range<u64>, filters: &FilterSet, opts: CensusOptions) -> Partial {
    let geo = stream.geometry();
    let mut p = Partial::default();
    stream.for_each_in(range, |id, t| {
        if !filters.admits(geo, t) {
            return ControlFlow::<()>::Continue(());
        }
        p.counts.total += 1;
        let unanimous = geo.is_unanimous(t);
        let efficient = geo.is_efficient(t);
        let dictator = geo.dictator(t);
        let te = unanimous && efficient;
        let sp = geo.is_strategy_proof(t);
        p.counts.unanimous += unanimous as u64;
        p.counts.tops_efficient += te as u64;
        p.counts.dictatorial += dictator.is_some() as u64;
        if te && sp {
            p.counts.strategy_proof += 1;
            if p.sp.len() < LISTED_RULES {
                p.sp.push((id, t.to_vec()));
            }
            if dictator.is_none() && p.first_bad.is_none() {
                p.first_bad = Some((id, t.to_vec()));
            }
        }
        if opts.verbose {
            let (m, d) = geo.classification_counts(t);
            p.rows.push(CensusRow {
                id,
                rule: geo.rule(t.to_vec()),
                unanimous,
                efficient,
                strategy_proof: sp,
                dictatorial: dictator.is_some(),
                manipulable_profiles: m,
                dictatorial_profiles: d,
            });
        }
        ControlFlow::Continue(())
    });
    p
}

/// Runs the census. Exhaustive mode walks every tops table; sampled mode
/// draws from the tops-efficient family, where the question is sharpest.
pub fn census(dims: Dims, mode: Mode, filters: &FilterSet, opts: CensusOptions) -> Result<CensusReport> {
    census_in(dims, mode, SampleSpace::TopsEfficient, filters, opts)
}

pub fn census_in(
    dims: Dims,
    mode: Mode,
    space: SampleSpace,
    filters: &FilterSet,
    opts: CensusOptions,
) -> Result<CensusReport> {
    let stream = RuleStream::new(dims, mode, space)?;
    let parts = stream.map_chunks(|s, range| Ok(scan(s, range, filters, opts)))?;
    let geo = stream.geometry();

    let mut counts = CensusCounts::default();
    let mut sp: Vec<Rule> = Vec::new();
    let mut first_bad = None;
    let mut rows = opts.verbose.then(Vec::new);
    for p in parts {
        counts.add(&p.counts);
        for (_, t) in p.sp {
            if sp.len() < LISTED_RULES {
                sp.push(geo.rule(t));
            }
        }
        if first_bad.is_none() {
            first_bad = p.first_bad;
        }
        if let Some(rows) = rows.as_mut() {
            rows.extend(p.rows);
        }
    }

    let dictator_rules = dictator_tables(geo, filters)?;
    let theorem_holds = match mode {
        Mode::Exhaustive => {
            counts.strategy_proof == dictator_rules.len() as u64 && sp == dictator_rules
        }
        Mode::Sampled { .. } => first_bad.is_none(),
    };
    let first_counterexample = first_bad
        .map(|(_, t)| RuleCertificate::for_rule(&geo.rule(t)))
        .transpose()?;

    Ok(CensusReport {
        agents: dims.agents,
        alts: dims.alts,
        mode,
        sample_space: (!mode.is_exhaustive()).then_some(space),
        filters: filters.clone(),
        counts,
        strategy_proof_rules: sp,
        dictator_rules,
        theorem_holds,
        first_counterexample,
        rows,
    })
}

/// `Dictator(i)` as tops tables, in rule-code order, restricted by `filters`.
fn dictator_tables(geo: &TopsGeometry, filters: &FilterSet) -> Result<Vec<Rule>> {
    let dims = geo.dims();
    let mut tables = Vec::new();
    // Ascending agent is ascending rule code.
    for i in 0..dims.agents {
        let rule = Rule::dictator(dims, i)?.to_tops_table()?;
        if let crate::rules::Repr::TopsTable(t) = rule.repr() {
            if filters.admits(geo, t) {
                tables.push(rule);
            }
        }
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::Filter;

    fn d(n: usize, m: usize) -> Dims {
        Dims::new(n, m).unwrap()
    }

    #[test]
    fn two_by_three() {
        let r = census(d(2, 3), Mode::Exhaustive, &FilterSet::none(), CensusOptions::default()).unwrap();
        assert_eq!(
            r.counts,
            CensusCounts {
                total: 19683,
                unanimous: 729,
                tops_efficient: 64,
                strategy_proof: 2,
                dictatorial: 2
            }
        );
        assert!(r.theorem_holds);
        assert!(r.first_counterexample.is_none());
        let names: Vec<String> = r.strategy_proof_rules.iter().map(|r| r.to_string()).collect();
        assert_eq!(names, ["TOPS:n=2,m=3:000111222", "TOPS:n=2,m=3:012012012"]);
    }

    #[test]
    fn two_by_two_breaks() {
        let r = census(d(2, 2), Mode::Exhaustive, &FilterSet::none(), CensusOptions::default()).unwrap();
        assert_eq!(r.counts.total, 16);
        assert!(r.counts.strategy_proof > 2);
        assert_eq!(r.counts.dictatorial, 2);
        assert!(!r.theorem_holds);
        let cert = r.first_counterexample.unwrap();
        assert_eq!(cert.rule.to_string(), "TOPS:n=2,m=2:0001");
        assert!(cert.refutes_dictatorship() && cert.validate().unwrap());
    }

    #[test]
    fn filters_restrict_the_stream() {
        let f = FilterSet::new([Filter::Unanimous]);
        let r = census(d(2, 3), Mode::Exhaustive, &f, CensusOptions::default()).unwrap();
        assert_eq!(r.counts.total, 729);
        assert_eq!(r.counts.unanimous, 729);
        assert!(r.theorem_holds);
    }

    #[test]
    fn verbose_rows_and_worker_independence() {
        let opts = CensusOptions { verbose: true };
        let r = census(d(2, 2), Mode::Exhaustive, &FilterSet::none(), opts).unwrap();
        let rows = r.rows.as_ref().unwrap();
        assert_eq!(rows.len(), 16);
        assert!(rows.windows(2).all(|w| w[0].id < w[1].id));
        assert!(rows.iter().all(|row| row.manipulable_profiles + row.dictatorial_profiles == 4));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| census(d(2, 2), Mode::Exhaustive, &FilterSet::none(), opts).unwrap());
        assert_eq!(serial, r);
    }

    #[test]
    fn sampled_three_agents() {
        let mode = Mode::Sampled { samples: 5000, seed: 42 };
        let r = census(d(3, 3), mode, &FilterSet::none(), CensusOptions::default()).unwrap();
        assert_eq!(r.counts.total, 5000);
        assert_eq!(r.counts.tops_efficient, 5000);
        assert!(r.theorem_holds);
        assert!(r.counts.is_monotone());
        let again = census(d(3, 3), mode, &FilterSet::none(), CensusOptions::default()).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    }
}
