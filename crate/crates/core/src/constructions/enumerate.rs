//! The space of tops-only rules as tables over tops profiles.
//!
//! A rule is a string of `m^n` base-`m` digits, one per tops code. Its rule
//! code reads that string as a base-`m` number with the first entry most
//! significant, so ascending rule code is lexicographic digit order.
//!
//! Exhaustive walks go through [`TopsRuleSpace`]; seeded draws go through
//! [`RuleSampler`]. Both are driven by [`RuleStream`], which cuts the work into
//! fixed chunks and hands them to rayon. Results are merged in chunk order so
//! the worker count never changes the output.

use std::fmt;
use std::ops::{ControlFlow, Range};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{tops_digits, Alternative, Dims};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::rules::{Repr, Rule};

/// Rules per parallel work unit, and per RNG stream when sampling.
pub const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filter {
    Unanimous,
    Efficient,
    Dictatorial,
    StrategyProof,
}

impl Filter {
    pub fn name(self) -> &'static str {
        match self {
            Filter::Unanimous => "unanimous",
            Filter::Efficient => "efficient",
            Filter::Dictatorial => "dictatorial",
            Filter::StrategyProof => "strategy-proof",
        }
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unanimous" | "u" => Ok(Filter::Unanimous),
            "efficient" | "e" => Ok(Filter::Efficient),
            "dictatorial" | "d" => Ok(Filter::Dictatorial),
            "strategy-proof" | "strategyproof" | "sp" => Ok(Filter::StrategyProof),
            _ => Err(Error::Config(format!(
                "unknown filter `{s}` (expected unanimous, efficient, strategy-proof or dictatorial)"
            ))),
        }
    }
}

/// A set of filters, kept sorted cheapest first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct FilterSet(Vec<Filter>);

impl FilterSet {
    pub fn new(filters: impl IntoIterator<Item = Filter>) -> Self {
        let mut v: Vec<Filter> = filters.into_iter().collect();
        v.sort();
        v.dedup();
        FilterSet(v)
    }

    pub fn none() -> Self {
        FilterSet(Vec::new())
    }

    pub fn filters(&self) -> &[Filter] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, f: Filter) -> bool {
        self.0.contains(&f)
    }

    /// Applies the filters in order and stops at the first failure.
    pub fn admits(&self, geo: &TopsGeometry, table: &[Alternative]) -> bool {
        self.0.iter().all(|f| match f {
            Filter::Unanimous => geo.is_unanimous(table),
            Filter::Efficient => geo.is_efficient(table),
            Filter::Dictatorial => geo.dictator(table).is_some(),
            Filter::StrategyProof => geo.is_strategy_proof(table),
        })
    }
}

/// Precomputed tops of every cell plus the per-agent code strides, so the
/// axioms can be checked on a tops table without building profiles.
///
/// The checks rely on the rule being tops-only. With that, an agent with top
/// `t_i` can gain by moving the outcome from `x` to `y` exactly when
/// `y != x` and `x != t_i`, because some preference with top `t_i` ranks `y`
/// above `x`. Efficiency reduces to selecting one of the tops.
#[derive(Debug, Clone)]
pub struct TopsGeometry {
    dims: Dims,
    tops: Vec<Alternative>,
    strides: Vec<usize>,
    distinct: Vec<Vec<Alternative>>,
}

impl TopsGeometry {
    pub fn new(dims: Dims) -> Result<Self> {
        let limits = Limits::current();
        dims.check_caps(limits)?;
        let cells = dims.tops_count() as usize;
        let mut tops = Vec::with_capacity(cells * dims.agents);
        let mut distinct = Vec::with_capacity(cells);
        for code in 0..cells {
            let t = tops_digits(dims, code);
            let mut d = t.clone();
            d.sort();
            d.dedup();
            tops.extend(t);
            distinct.push(d);
        }
        let strides = (0..dims.agents)
            .map(|i| dims.alts.pow((dims.agents - 1 - i) as u32))
            .collect();
        Ok(TopsGeometry {
            dims,
            tops,
            strides,
            distinct,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn cells(&self) -> usize {
        self.distinct.len()
    }

    pub fn tops(&self, cell: usize) -> &[Alternative] {
        let n = self.dims.agents;
        &self.tops[cell * n..(cell + 1) * n]
    }

    /// Distinct tops of a cell, ascending.
    pub fn distinct_tops(&self, cell: usize) -> &[Alternative] {
        &self.distinct[cell]
    }

    fn neighbour(&self, cell: usize, agent: usize, from: Alternative, to: Alternative) -> usize {
        cell + to.index() * self.strides[agent] - from.index() * self.strides[agent]
    }

    pub fn is_unanimous(&self, table: &[Alternative]) -> bool {
        let n = self.dims.agents;
        Alternative::all(self.dims.alts).all(|x| {
            let cell = (0..n).fold(0, |acc, _| acc * self.dims.alts + x.index());
            table[cell] == x
        })
    }

    pub fn is_efficient(&self, table: &[Alternative]) -> bool {
        table
            .iter()
            .enumerate()
            .all(|(cell, x)| self.distinct[cell].contains(x))
    }

    /// Lowest agent whose top is selected in every cell.
    pub fn dictator(&self, table: &[Alternative]) -> Option<usize> {
        (0..self.dims.agents).find(|&i| {
            table
                .iter()
                .enumerate()
                .all(|(cell, &x)| self.tops(cell)[i] == x)
        })
    }

    /// Whether the agents whose top was not selected at `cell` are all
    /// unable to move the outcome.
    pub fn is_dictatorial_cell(&self, table: &[Alternative], cell: usize) -> bool {
        let x = table[cell];
        self.tops(cell).iter().enumerate().all(|(i, &t)| {
            t == x
                || Alternative::all(self.dims.alts)
                    .all(|y| table[self.neighbour(cell, i, t, y)] == x)
        })
    }

    pub fn is_strategy_proof(&self, table: &[Alternative]) -> bool {
        (0..table.len()).all(|cell| self.is_dictatorial_cell(table, cell))
    }

    /// `(|M_f|, |D_f|)` in profiles, from the tops table alone.
    pub fn classification_counts(&self, table: &[Alternative]) -> (u64, u64) {
        let dictatorial = (0..table.len())
            .filter(|&cell| self.is_dictatorial_cell(table, cell))
            .count() as u64;
        let manipulable = table.len() as u64 - dictatorial;
        let size = self.dims.tops_cell_size();
        (manipulable * size, dictatorial * size)
    }

    pub fn rule(&self, table: Vec<Alternative>) -> Rule {
        Rule::tops_table(self.dims, table).expect("table length matches the geometry")
    }
}

/// Every tops table at fixed `(n, m)`, addressed by rule code.
#[derive(Debug, Clone)]
pub struct TopsRuleSpace {
    geo: TopsGeometry,
    len: u64,
}

impl TopsRuleSpace {
    pub fn new(dims: Dims) -> Result<Self> {
        Self::with_limits(dims, Limits::current())
    }

    pub fn with_limits(dims: Dims, limits: &Limits) -> Result<Self> {
        dims.check_caps(limits)?;
        let required = dims.tops_rule_count().unwrap_or(u128::MAX);
        if required > limits.rule_budget as u128 {
            return Err(Error::BudgetExceeded {
                what: "tops-only rules",
                required,
                budget: limits.rule_budget,
            });
        }
        Ok(TopsRuleSpace {
            geo: TopsGeometry::new(dims)?,
            len: required as u64,
        })
    }

    pub fn geometry(&self) -> &TopsGeometry {
        &self.geo
    }

    pub fn dims(&self) -> Dims {
        self.geo.dims
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn table_at(&self, code: u64) -> Result<Vec<Alternative>> {
        if code >= self.len {
            return Err(Error::CodeOutOfRange {
                code,
                limit: self.len,
            });
        }
        Ok(self.decode(code))
    }

    fn decode(&self, mut code: u64) -> Vec<Alternative> {
        let m = self.geo.dims.alts as u64;
        let mut table = vec![Alternative::of(0); self.geo.cells()];
        for slot in table.iter_mut().rev() {
            *slot = Alternative::of((code % m) as usize);
            code /= m;
        }
        table
    }

    /// Rule code of a tops table rule with these dimensions.
    pub fn code_of(&self, rule: &Rule) -> Result<u64> {
        let table = match rule.repr() {
            Repr::TopsTable(t) if rule.dims() == self.geo.dims => t,
            _ => {
                return Err(Error::Config(format!(
                    "`{rule}` is not a tops table with {}",
                    self.geo.dims
                )))
            }
        };
        let m = self.geo.dims.alts as u64;
        Ok(table.iter().fold(0, |acc, a| acc * m + a.index() as u64))
    }

    /// Walks `range` in ascending code order, advancing the table like an
    /// odometer instead of decoding each code.
    pub fn for_each_in<B>(
        &self,
        range: Range<u64>,
        mut visit: impl FnMut(u64, &[Alternative]) -> ControlFlow<B>,
    ) -> Option<B> {
        let end = range.end.min(self.len);
        if range.start >= end {
            return None;
        }
        let m = self.geo.dims.alts;
        let mut table = self.decode(range.start);
        for code in range.start..end {
            if let ControlFlow::Break(b) = visit(code, &table) {
                return Some(b);
            }
            for slot in table.iter_mut().rev() {
                let next = slot.index() + 1;
                if next < m {
                    *slot = Alternative::of(next);
                    break;
                }
                *slot = Alternative::of(0);
            }
        }
        None
    }
}

/// Which rules a sampler draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleSpace {
    /// Every digit uniform over all alternatives.
    All,
    /// Diagonal cells fixed to the common top; the rest uniform.
    Unanimous,
    /// Every cell uniform over the distinct tops of that cell.
    TopsEfficient,
}

impl SampleSpace {
    /// Restricts an exhaustive walk to the same family.
    pub fn as_filters(self) -> FilterSet {
        match self {
            SampleSpace::All => FilterSet::none(),
            SampleSpace::Unanimous => FilterSet::new([Filter::Unanimous]),
            SampleSpace::TopsEfficient => FilterSet::new([Filter::Unanimous, Filter::Efficient]),
        }
    }
}

impl fmt::Display for SampleSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SampleSpace::All => "all",
            SampleSpace::Unanimous => "unanimous",
            SampleSpace::TopsEfficient => "tops-efficient",
        })
    }
}

/// Seeded tops-table sampler. Sample `k` is drawn from ChaCha8 stream
/// `k / CHUNK`, so any range of samples can be reproduced on its own.
#[derive(Debug, Clone)]
pub struct RuleSampler {
    geo: TopsGeometry,
    space: SampleSpace,
    seed: u64,
}

impl RuleSampler {
    pub fn new(dims: Dims, space: SampleSpace, seed: u64) -> Result<Self> {
        Ok(RuleSampler {
            geo: TopsGeometry::new(dims)?,
            space,
            seed,
        })
    }

    pub fn geometry(&self) -> &TopsGeometry {
        &self.geo
    }

    pub fn space(&self) -> SampleSpace {
        self.space
    }

    fn rng_for_chunk(&self, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(chunk);
        rng
    }

    fn draw(&self, rng: &mut ChaCha8Rng, table: &mut [Alternative]) {
        let m = self.geo.dims.alts;
        for (cell, slot) in table.iter_mut().enumerate() {
            let distinct = self.geo.distinct_tops(cell);
            *slot = match self.space {
                SampleSpace::All => Alternative::of(rng.gen_range(0..m)),
                SampleSpace::Unanimous if distinct.len() == 1 => distinct[0],
                SampleSpace::Unanimous => Alternative::of(rng.gen_range(0..m)),
                SampleSpace::TopsEfficient => distinct[rng.gen_range(0..distinct.len())],
            };
        }
    }

    /// Visits samples `range` in order.
    pub fn for_each_in<B>(
        &self,
        range: Range<u64>,
        mut visit: impl FnMut(u64, &[Alternative]) -> ControlFlow<B>,
    ) -> Option<B> {
        let mut table = vec![Alternative::of(0); self.geo.cells()];
        let mut k = range.start;
        while k < range.end {
            let chunk = k / CHUNK;
            let mut rng = self.rng_for_chunk(chunk);
            // Skip the draws of earlier samples in this chunk.
            for _ in chunk * CHUNK..k {
                self.draw(&mut rng, &mut table);
            }
            let stop = range.end.min((chunk + 1) * CHUNK);
            while k < stop {
                self.draw(&mut rng, &mut table);
                if let ControlFlow::Break(b) = visit(k, &table) {
                    return Some(b);
                }
                k += 1;
            }
        }
        None
    }

    pub fn sample(&self, count: u64) -> Vec<Rule> {
        let mut out = Vec::with_capacity(count as usize);
        self.for_each_in(0..count, |_, t| {
            out.push(self.geo.rule(t.to_vec()));
            ControlFlow::<()>::Continue(())
        });
        out
    }
}

/// Exhaustive or seeded sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

impl Mode {
    pub fn is_exhaustive(self) -> bool {
        matches!(self, Mode::Exhaustive)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exhaustive => f.write_str("exhaustive"),
            Mode::Sampled { samples, seed } => write!(f, "sampled({samples}, seed {seed})"),
        }
    }
}

/// Either the whole space or a seeded sample of one family, visited in
/// parallel chunks. The id handed to visitors is the rule code when
/// exhaustive and the sample index when sampled.
#[derive(Debug, Clone)]
pub enum RuleStream {
    Exhaustive(TopsRuleSpace),
    Sampled { sampler: RuleSampler, samples: u64 },
}

impl RuleStream {
    /// `space` only matters when sampling; exhaustive walks cover everything
    /// and callers filter.
    pub fn new(dims: Dims, mode: Mode, space: SampleSpace) -> Result<Self> {
        match mode {
            Mode::Exhaustive => Ok(RuleStream::Exhaustive(TopsRuleSpace::new(dims)?)),
            Mode::Sampled { samples, seed } => Ok(RuleStream::Sampled {
                sampler: RuleSampler::new(dims, space, seed)?,
                samples,
            }),
        }
    }

    pub fn geometry(&self) -> &TopsGeometry {
        match self {
            RuleStream::Exhaustive(s) => s.geometry(),
            RuleStream::Sampled { sampler, .. } => sampler.geometry(),
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            RuleStream::Exhaustive(s) => s.len(),
            RuleStream::Sampled { samples, .. } => *samples,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn for_each_in<B>(
        &self,
        range: Range<u64>,
        visit: impl FnMut(u64, &[Alternative]) -> ControlFlow<B>,
    ) -> Option<B> {
        match self {
            RuleStream::Exhaustive(s) => s.for_each_in(range, visit),
            RuleStream::Sampled { sampler, .. } => sampler.for_each_in(range, visit),
        }
    }

    /// Runs `work` on every chunk in parallel and returns the per-chunk
    /// results in chunk order.
    pub fn map_chunks<T, F>(&self, work: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&Self, Range<u64>) -> Result<T> + Sync,
    {
        let len = self.len();
        let chunks = len.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| work(self, c * CHUNK..len.min((c + 1) * CHUNK)))
            .collect()
    }
}

/// Tops-table rules in ascending rule code that pass every filter.
pub struct TopsRules {
    space: TopsRuleSpace,
    filters: FilterSet,
    next: u64,
    table: Vec<Alternative>,
}

impl Iterator for TopsRules {
    type Item = (u64, Rule);

    fn next(&mut self) -> Option<Self::Item> {
        let m = self.space.dims().alts;
        while self.next < self.space.len() {
            let code = self.next;
            let hit = self.filters.admits(self.space.geometry(), &self.table);
            let out = hit.then(|| (code, self.space.geometry().rule(self.table.clone())));
            self.next += 1;
            for slot in self.table.iter_mut().rev() {
                let next = slot.index() + 1;
                if next < m {
                    *slot = Alternative::of(next);
                    break;
                }
                *slot = Alternative::of(0);
            }
            if out.is_some() {
                return out;
            }
        }
        None
    }
}

/// Streams the tops-only rules at `dims` in ascending rule code, keeping
/// those that pass `filters`. Fails when the space is over the rule budget.
pub fn enumerate_tops_only_rules(dims: Dims, filters: &FilterSet) -> Result<TopsRules> {
    let space = TopsRuleSpace::new(dims)?;
    let table = space.decode(0);
    Ok(TopsRules {
        space,
        filters: filters.clone(),
        next: 0,
        table,
    })
}
