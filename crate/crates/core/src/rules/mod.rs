//! Social choice rules: maps from profiles to alternatives.

mod axioms;
mod codec;

use std::fmt;

use serde::{Serialize, Serializer};

pub use axioms::{
    dictator, efficiency_violation, efficient_via_tops, find_manipulation, is_dictatorial,
    is_efficient, is_strategy_proof, is_tops_only, is_unanimous, tops_only_violation,
    unanimity_violation, ManipulationWitness, ParetoWitness,
};
pub use codec::parse_rule;

use crate::domain::{
    profile_code, tops_code, tops_digits, Alternative, Dims, Preference, Profile, ProfileSpace,
};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Concrete representation behind a [`Rule`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Repr {
    /// One outcome per tops profile, in ascending tops-code order.
    TopsTable(Vec<Alternative>),
    /// One outcome per profile, in ascending profile-code order.
    FullTable(Vec<Alternative>),
    Dictator(usize),
    Constant(Alternative),
    /// Borda score, ties to the lowest alternative index.
    BordaLex,
    /// Two-alternative majority, ties to alternative 0.
    MajorityLex,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    dims: Dims,
    repr: Repr,
}

impl Rule {
    pub fn tops_table(dims: Dims, table: Vec<Alternative>) -> Result<Self> {
        if table.len() as u64 != dims.tops_count() {
            return Err(Error::InvalidDimensions(format!(
                "tops table for {dims} needs {} entries, got {}",
                dims.tops_count(),
                table.len()
            )));
        }
        check_outcomes(&table, dims.alts)?;
        Ok(Rule {
            dims,
            repr: Repr::TopsTable(table),
        })
    }

    pub fn full_table(dims: Dims, table: Vec<Alternative>) -> Result<Self> {
        if table.len() as u128 != dims.profile_count() {
            return Err(Error::InvalidDimensions(format!(
                "full table for {dims} needs {} entries, got {}",
                dims.profile_count(),
                table.len()
            )));
        }
        check_outcomes(&table, dims.alts)?;
        Ok(Rule {
            dims,
            repr: Repr::FullTable(table),
        })
    }

    pub fn dictator(dims: Dims, agent: usize) -> Result<Self> {
        if agent >= dims.agents {
            return Err(Error::AgentOutOfRange {
                index: agent,
                agents: dims.agents,
            });
        }
        Ok(Rule {
            dims,
            repr: Repr::Dictator(agent),
        })
    }

    pub fn constant(dims: Dims, x: Alternative) -> Result<Self> {
        Alternative::new(x.index(), dims.alts)?;
        Ok(Rule {
            dims,
            repr: Repr::Constant(x),
        })
    }

    pub fn borda_lex(dims: Dims) -> Self {
        Rule {
            dims,
            repr: Repr::BordaLex,
        }
    }

    pub fn majority_lex(dims: Dims) -> Result<Self> {
        if dims.alts != 2 {
            return Err(Error::InvalidDimensions(format!(
                "majority rule is defined for 2 alternatives, got {}",
                dims.alts
            )));
        }
        Ok(Rule {
            dims,
            repr: Repr::MajorityLex,
        })
    }

    /// Tabulates any rule into a [`Repr::FullTable`].
    pub fn tabulate(&self) -> Result<Rule> {
        let space = ProfileSpace::new(self.dims)?;
        let mut table = Vec::with_capacity(space.len() as usize);
        space.for_each_in(0..space.len(), |_, prefs| {
            table.push(self.eval(prefs));
            std::ops::ControlFlow::<()>::Continue(())
        });
        Rule::full_table(self.dims, table)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    /// True for representations that depend on tops alone by construction.
    pub fn is_tops_only_by_construction(&self) -> bool {
        matches!(
            self.repr,
            Repr::TopsTable(_) | Repr::Dictator(_) | Repr::Constant(_)
        )
    }

    pub fn evaluate(&self, profile: &Profile) -> Result<Alternative> {
        self.check_profile(profile)?;
        Ok(self.eval(profile.prefs()))
    }

    pub(crate) fn check_profile(&self, profile: &Profile) -> Result<()> {
        if profile.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                expected_agents: self.dims.agents,
                expected_alts: self.dims.alts,
                agents: profile.agents(),
                alts: profile.alts(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_same_dims(&self, other: &Rule) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected_agents: self.dims.agents,
                expected_alts: self.dims.alts,
                agents: other.dims.agents,
                alts: other.dims.alts,
            });
        }
        Ok(())
    }

    /// Unchecked evaluation; `prefs` must match the rule's dimensions.
    pub(crate) fn eval(&self, prefs: &[Preference]) -> Alternative {
        match &self.repr {
            Repr::TopsTable(table) => table[tops_code(prefs)],
            Repr::FullTable(table) => table[profile_code(prefs) as usize],
            Repr::Dictator(i) => prefs[*i].top(),
            Repr::Constant(x) => *x,
            Repr::BordaLex => borda_lex(prefs, self.dims.alts),
            Repr::MajorityLex => {
                let ones = prefs.iter().filter(|p| p.top().index() == 1).count();
                Alternative::of(usize::from(2 * ones > prefs.len()))
            }
        }
    }

    /// Outcome on each tops profile, if the rule is tops-only. Evaluates one
    /// representative profile per tops cell.
    pub fn tops_outcomes(&self) -> Result<Vec<Alternative>> {
        if let Repr::TopsTable(table) = &self.repr {
            return Ok(table.clone());
        }
        if !is_tops_only(self)? {
            return Err(Error::NotTopsOnly(self.to_string()));
        }
        Ok(self.tops_outcomes_unchecked())
    }

    pub(crate) fn tops_outcomes_unchecked(&self) -> Vec<Alternative> {
        if let Repr::TopsTable(table) = &self.repr {
            return table.clone();
        }
        (0..self.dims.tops_count() as usize)
            .map(|code| self.eval(&representative(self.dims, code)))
            .collect()
    }

    /// The same rule as a [`Repr::TopsTable`], if it is tops-only.
    pub fn to_tops_table(&self) -> Result<Rule> {
        Rule::tops_table(self.dims, self.tops_outcomes()?)
    }

    /// Extensional equality: same dimensions and same outcome on every profile.
    pub fn same_function(&self, other: &Rule) -> Result<bool> {
        if self.dims != other.dims {
            return Ok(false);
        }
        if let (Repr::TopsTable(a), Repr::TopsTable(b)) = (&self.repr, &other.repr) {
            return Ok(a == b);
        }
        let space = ProfileSpace::new(self.dims)?;
        let differs = space.for_each_in(0..space.len(), |_, prefs| {
            if self.eval(prefs) != other.eval(prefs) {
                std::ops::ControlFlow::Break(())
            } else {
                std::ops::ControlFlow::Continue(())
            }
        });
        Ok(differs.is_none())
    }

    /// Closed-form rules used as reference instances: every dictatorship,
    /// majority (two alternatives only), Borda, and every constant rule.
    pub fn library(dims: Dims) -> Vec<Rule> {
        let mut rules: Vec<Rule> = (0..dims.agents)
            .map(|i| Rule {
                dims,
                repr: Repr::Dictator(i),
            })
            .collect();
        if let Ok(maj) = Rule::majority_lex(dims) {
            rules.push(maj);
        }
        rules.push(Rule::borda_lex(dims));
        rules.extend(Alternative::all(dims.alts).map(|x| Rule {
            dims,
            repr: Repr::Constant(x),
        }));
        rules
    }
}

fn check_outcomes(table: &[Alternative], alts: usize) -> Result<()> {
    if let Some(bad) = table.iter().find(|a| a.index() >= alts) {
        return Err(Error::AlternativeOutOfRange {
            index: bad.index(),
            alts,
        });
    }
    Ok(())
}

/// Lowest-code profile in the tops cell `code`.
pub(crate) fn representative(dims: Dims, code: usize) -> Vec<Preference> {
    let block = crate::domain::factorial(dims.alts - 1);
    tops_digits(dims, code)
        .into_iter()
        .map(|t| {
            Preference::decode(t.index() as u64 * block, dims.alts)
                .expect("block start is a valid code")
        })
        .collect()
}

fn borda_lex(prefs: &[Preference], alts: usize) -> Alternative {
    let mut scores = [0usize; crate::limits::MAX_ALTS_HARD];
    for p in prefs {
        for (rank, a) in p.ranking().iter().enumerate() {
            scores[a.index()] += alts - 1 - rank;
        }
    }
    let mut best = 0;
    for x in 1..alts {
        if scores[x] > scores[best] {
            best = x;
        }
    }
    Alternative::of(best)
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        codec::write_rule(self, f)
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Checks that `dims` is within the current caps and its profile space fits
/// the profile budget.
pub(crate) fn scan_space(dims: Dims) -> Result<ProfileSpace> {
    ProfileSpace::with_limits(dims, Limits::current())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize, m: usize) -> Dims {
        Dims::new(n, m).unwrap()
    }

    fn profile(s: &str) -> Profile {
        s.parse().unwrap()
    }

    fn alt(c: char) -> Alternative {
        Alternative::from_name(c).unwrap()
    }

    #[test]
    fn closed_form_evaluation() {
        let p = profile("b,a,c|c,a,b");
        assert_eq!(Rule::dictator(d(2, 3), 0).unwrap().evaluate(&p).unwrap(), alt('b'));
        assert_eq!(Rule::dictator(d(2, 3), 1).unwrap().evaluate(&p).unwrap(), alt('c'));
        assert_eq!(Rule::constant(d(2, 3), alt('a')).unwrap().evaluate(&p).unwrap(), alt('a'));
    }

    #[test]
    fn borda_tie_breaks_to_lowest_index() {
        // a: 2+1, b: 1+2, c: 0
        let p = profile("a,b,c|b,a,c");
        assert_eq!(Rule::borda_lex(d(2, 3)).evaluate(&p).unwrap(), alt('a'));
        let q = profile("c,b,a|b,a,c");
        assert_eq!(Rule::borda_lex(d(2, 3)).evaluate(&q).unwrap(), alt('b'));
    }

    #[test]
    fn majority_with_tie_to_zero() {
        let maj = Rule::majority_lex(d(3, 2)).unwrap();
        assert_eq!(maj.evaluate(&profile("b,a|b,a|a,b")).unwrap(), alt('b'));
        assert_eq!(maj.evaluate(&profile("a,b|b,a|a,b")).unwrap(), alt('a'));
        let tie = Rule::majority_lex(d(2, 2)).unwrap();
        assert_eq!(tie.evaluate(&profile("a,b|b,a")).unwrap(), alt('a'));
        assert!(Rule::majority_lex(d(3, 3)).is_err());
    }

    #[test]
    fn dimension_checks() {
        let r = Rule::dictator(d(2, 3), 0).unwrap();
        assert!(matches!(
            r.evaluate(&profile("a,b|b,a")),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Rule::dictator(d(2, 3), 2).is_err());
        assert!(Rule::constant(d(2, 3), alt('d')).is_err());
        assert!(Rule::tops_table(d(2, 3), vec![alt('a'); 8]).is_err());
        assert!(Rule::tops_table(d(2, 3), vec![alt('d'); 9]).is_err());
    }

    #[test]
    fn tabulation_preserves_the_function() {
        for r in Rule::library(d(2, 3)) {
            let full = r.tabulate().unwrap();
            assert!(matches!(full.repr(), Repr::FullTable(_)));
            assert!(full.same_function(&r).unwrap());
        }
        let dict = Rule::dictator(d(2, 3), 1).unwrap();
        let table = dict.to_tops_table().unwrap();
        assert!(table.same_function(&dict).unwrap());
        assert!(matches!(
            Rule::borda_lex(d(2, 3)).to_tops_table(),
            Err(Error::NotTopsOnly(_))
        ));
    }

    #[test]
    fn representatives_carry_the_cell_tops() {
        let dims = d(3, 3);
        for code in 0..27 {
            let rep = representative(dims, code);
            assert_eq!(tops_code(&rep), code);
        }
    }
}
