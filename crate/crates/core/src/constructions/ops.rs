//! Rule-building devices: merging two agent slots into one, and fixing the
//! preferences of every agent past the first two.

use crate::rules::{Repr, Rule};
use crate::domain::{tops_digits, Alternative, Dims, Preference, ProfileSpace};
use crate::error::{Error, Result};

/// `g(P_1, P_3, ..., P_n) = f(P_1, P_1, P_3, ..., P_n)`.
///
/// Agent `k >= 2` of `f` becomes agent `k - 1` of `g`.
pub fn coalesce(f: &Rule) -> Result<Rule> {
    let dims = f.dims();
    if dims.agents < 3 {
        return Err(Error::InvalidDimensions(format!(
            "coalescing needs at least 3 agents, got {}",
            dims.agents
        )));
    }
    let small = Dims::new(dims.agents - 1, dims.alts)?;
    match f.repr() {
        Repr::Dictator(i) => Rule::dictator(small, i.saturating_sub(1)),
        Repr::Constant(x) => Rule::constant(small, *x),
        Repr::TopsTable(table) => {
            let outcomes = (0..small.tops_count() as usize)
                .map(|code| {
                    let tops = tops_digits(small, code);
                    let widened: Vec<Alternative> =
                        std::iter::once(tops[0]).chain(tops.iter().copied()).collect();
                    table[code_of(&widened, dims.alts)]
                })
                .collect();
            Rule::tops_table(small, outcomes)
        }
        _ => tabulate_from(small, |prefs| {
            let mut widened = Vec::with_capacity(prefs.len() + 1);
            widened.push(prefs[0]);
            widened.extend_from_slice(prefs);
            f.eval(&widened)
        }),
    }
}

/// `h(P_1, P_2) = f(P_1, P_2, fixed...)`, with `fixed` holding the
/// preferences of agents `3..n`.
pub fn restrict(f: &Rule, fixed: &[Preference]) -> Result<Rule> {
    let dims = f.dims();
    if dims.agents < 3 {
        return Err(Error::InvalidDimensions(format!(
            "restriction needs at least 3 agents, got {}",
            dims.agents
        )));
    }
    if fixed.len() != dims.agents - 2 {
        return Err(Error::InvalidDimensions(format!(
            "restriction of a {}-agent rule fixes {} preferences, got {}",
            dims.agents,
            dims.agents - 2,
            fixed.len()
        )));
    }
    if let Some(bad) = fixed.iter().find(|p| p.alts() != dims.alts) {
        return Err(Error::InvalidDimensions(format!(
            "fixed preference {bad} does not rank {} alternatives",
            dims.alts
        )));
    }
    let pair = Dims::new(2, dims.alts)?;
    match f.repr() {
        Repr::Dictator(i) if *i < 2 => Rule::dictator(pair, *i),
        Repr::Dictator(i) => Rule::constant(pair, fixed[i - 2].top()),
        Repr::Constant(x) => Rule::constant(pair, *x),
        Repr::TopsTable(table) => {
            let outcomes = (0..pair.tops_count() as usize)
                .map(|code| {
                    let mut tops = tops_digits(pair, code);
                    tops.extend(fixed.iter().map(Preference::top));
                    table[code_of(&tops, dims.alts)]
                })
                .collect();
            Rule::tops_table(pair, outcomes)
        }
        _ => tabulate_from(pair, |prefs| {
            let mut full = prefs.to_vec();
            full.extend_from_slice(fixed);
            f.eval(&full)
        }),
    }
}

fn code_of(tops: &[Alternative], alts: usize) -> usize {
    tops.iter().fold(0, |acc, a| acc * alts + a.index())
}

fn tabulate_from(dims: Dims, eval: impl Fn(&[Preference]) -> Alternative) -> Result<Rule> {
    let space = ProfileSpace::new(dims)?;
    let mut table = Vec::with_capacity(space.len() as usize);
    space.for_each_in(0..space.len(), |_, prefs| {
        table.push(eval(prefs));
        std::ops::ControlFlow::<()>::Continue(())
    });
    Rule::full_table(dims, table)
}
