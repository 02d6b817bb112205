//! Alternatives, strict preferences, profiles and preference domains.
//!
//! Alternatives and agents are dense 0-based indices. Alternatives print as
//! lowercase letters (`a` is index 0). A preference is a strict ranking,
//! best first, and carries its lexicographic permutation rank (Lehmer code)
//! as a canonical code. Profiles are coded in mixed radix `m!` with agent 0
//! as the most significant digit, so ascending code order is the
//! lexicographic order of per-agent preference codes.

use std::fmt;
use std::ops::{ControlFlow, Range};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::limits::{Limits, MAX_AGENTS_HARD, MAX_ALTS_HARD};

pub fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct Alternative(u8);

impl Alternative {
    pub fn new(index: usize, alts: usize) -> Result<Self> {
        if index >= alts {
            return Err(Error::AlternativeOutOfRange { index, alts });
        }
        Ok(Alternative(index as u8))
    }

    pub(crate) const fn of(index: usize) -> Self {
        Alternative(index as u8)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> char {
        (b'a' + self.0) as char
    }

    pub fn from_name(c: char) -> Option<Self> {
        if c.is_ascii_lowercase() && (c as u8 - b'a') < MAX_ALTS_HARD as u8 {
            Some(Alternative(c as u8 - b'a'))
        } else {
            None
        }
    }

    /// All alternatives `0..alts` in index order.
    pub fn all(alts: usize) -> impl Iterator<Item = Alternative> + Clone {
        (0..alts).map(Alternative::of)
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl Serialize for Alternative {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_char(self.name())
    }
}

/// Agent and alternative counts of a rule or profile space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Dims {
    pub agents: usize,
    pub alts: usize,
}

impl Dims {
    pub fn new(agents: usize, alts: usize) -> Result<Self> {
        if !(2..=MAX_AGENTS_HARD).contains(&agents) {
            return Err(Error::InvalidDimensions(format!(
                "agent count {agents} outside [2, {MAX_AGENTS_HARD}]"
            )));
        }
        if !(2..=MAX_ALTS_HARD).contains(&alts) {
            return Err(Error::InvalidDimensions(format!(
                "alternative count {alts} outside [2, {MAX_ALTS_HARD}]"
            )));
        }
        Ok(Dims { agents, alts })
    }

    pub fn check_caps(&self, limits: &Limits) -> Result<()> {
        limits.check_agents(self.agents)?;
        limits.check_alts(self.alts)
    }

    /// `m!`, the number of strict preferences.
    pub fn preference_count(&self) -> u64 {
        factorial(self.alts)
    }

    /// `(m!)^n`, saturating at `u128::MAX`.
    pub fn profile_count(&self) -> u128 {
        (self.preference_count() as u128)
            .checked_pow(self.agents as u32)
            .unwrap_or(u128::MAX)
    }

    /// `m^n`, the number of tops profiles.
    pub fn tops_count(&self) -> u64 {
        (self.alts as u64).pow(self.agents as u32)
    }

    /// `m^(m^n)`, the number of tops-only rules, or `None` past `u128`.
    pub fn tops_rule_count(&self) -> Option<u128> {
        u32::try_from(self.tops_count())
            .ok()
            .and_then(|e| (self.alts as u128).checked_pow(e))
    }

    /// Size of each same-tops cell of the profile space: `((m-1)!)^n`.
    pub fn tops_cell_size(&self) -> u64 {
        factorial(self.alts - 1).pow(self.agents as u32)
    }

    /// Profile-space size as `u64`, if it fits the profile budget.
    pub fn checked_profile_count(&self, limits: &Limits) -> Result<u64> {
        self.check_caps(limits)?;
        let count = self.profile_count();
        if count > limits.profile_budget as u128 {
            return Err(Error::BudgetExceeded {
                what: "profile scan",
                required: count,
                budget: limits.profile_budget,
            });
        }
        Ok(count as u64)
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={},m={}", self.agents, self.alts)
    }
}

/// A strict total order over `m` alternatives, best first.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Preference {
    alts: u8,
    code: u32,
    ranking: [Alternative; MAX_ALTS_HARD],
}

impl Preference {
    pub fn from_ranking(ranking: &[Alternative]) -> Result<Self> {
        let m = ranking.len();
        if !(2..=MAX_ALTS_HARD).contains(&m) {
            return Err(Error::InvalidDimensions(format!(
                "a preference ranks between 2 and {MAX_ALTS_HARD} alternatives, got {m}"
            )));
        }
        let mut seen = [false; MAX_ALTS_HARD];
        for &a in ranking {
            if a.index() >= m {
                return Err(Error::AlternativeOutOfRange {
                    index: a.index(),
                    alts: m,
                });
            }
            if std::mem::replace(&mut seen[a.index()], true) {
                return Err(Error::InvalidDimensions(format!(
                    "alternative {a} ranked twice"
                )));
            }
        }
        let mut buf = [Alternative(0); MAX_ALTS_HARD];
        buf[..m].copy_from_slice(ranking);
        Ok(Preference {
            alts: m as u8,
            code: lehmer_rank(&buf[..m]),
            ranking: buf,
        })
    }

    pub fn from_indices(ranking: &[usize]) -> Result<Self> {
        let m = ranking.len();
        let alts = ranking
            .iter()
            .map(|&i| Alternative::new(i, m.max(1)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_ranking(&alts)
    }

    /// Inverse of [`Preference::code`].
    pub fn decode(code: u64, alts: usize) -> Result<Self> {
        if !(2..=MAX_ALTS_HARD).contains(&alts) {
            return Err(Error::InvalidDimensions(format!(
                "alternative count {alts} outside [2, {MAX_ALTS_HARD}]"
            )));
        }
        let limit = factorial(alts);
        if code >= limit {
            return Err(Error::CodeOutOfRange { code, limit });
        }
        let mut pool: Vec<Alternative> = Alternative::all(alts).collect();
        let mut rest = code;
        let mut buf = [Alternative(0); MAX_ALTS_HARD];
        for (slot, remaining) in buf.iter_mut().zip((1..=alts).rev()) {
            let radix = factorial(remaining - 1);
            let digit = (rest / radix) as usize;
            rest %= radix;
            *slot = pool.remove(digit);
        }
        Ok(Preference {
            alts: alts as u8,
            code: code as u32,
            ranking: buf,
        })
    }

    pub fn alts(&self) -> usize {
        self.alts as usize
    }

    pub fn ranking(&self) -> &[Alternative] {
        &self.ranking[..self.alts()]
    }

    /// Lexicographic permutation rank in `[0, m!)`.
    pub fn code(&self) -> u64 {
        self.code as u64
    }

    pub fn top(&self) -> Alternative {
        self.ranking[0]
    }

    pub fn position(&self, x: Alternative) -> Result<usize> {
        self.check(x)?;
        Ok(self.pos(x))
    }

    /// Strict preference `x P y`.
    pub fn prefers(&self, x: Alternative, y: Alternative) -> Result<bool> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.beats(x, y))
    }

    /// Weak preference `x R y`: `x == y` or `x P y`.
    pub fn weakly_prefers(&self, x: Alternative, y: Alternative) -> Result<bool> {
        Ok(x == y || self.prefers(x, y)?)
    }

    fn check(&self, x: Alternative) -> Result<()> {
        if x.index() >= self.alts() {
            return Err(Error::AlternativeOutOfRange {
                index: x.index(),
                alts: self.alts(),
            });
        }
        Ok(())
    }

    pub(crate) fn pos(&self, x: Alternative) -> usize {
        self.ranking().iter().position(|&a| a == x).unwrap_or(usize::MAX)
    }

    pub(crate) fn beats(&self, x: Alternative, y: Alternative) -> bool {
        for &a in self.ranking() {
            if a == x {
                return x != y;
            }
            if a == y {
                return false;
            }
        }
        false
    }
}

fn lehmer_rank(ranking: &[Alternative]) -> u32 {
    let m = ranking.len();
    let mut code = 0u64;
    for i in 0..m {
        let smaller_later = ranking[i + 1..].iter().filter(|a| **a < ranking[i]).count() as u64;
        code += smaller_later * factorial(m - 1 - i);
    }
    code as u32
}

impl PartialOrd for Preference {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Preference {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.alts, self.code).cmp(&(other.alts, other.code))
    }
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in self.ranking().iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Preference({self})")
    }
}

impl Serialize for Preference {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn parse_preference_at(text: &str, offset: usize) -> Result<Preference> {
    let mut ranking: Vec<(usize, Alternative)> = Vec::new();
    let mut pos = offset;
    for name in text.split(',') {
        let trimmed = name.trim();
        let at = pos + (name.len() - name.trim_start().len());
        let mut chars = trimmed.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => match Alternative::from_name(c) {
                Some(a) => ranking.push((at, a)),
                None => return Err(Error::parse(at, format!("`{c}` is not an alternative name"))),
            },
            (None, _) => return Err(Error::parse(at, "empty alternative name")),
            _ => {
                return Err(Error::parse(
                    at,
                    format!("`{trimmed}` is not a single-letter alternative name"),
                ))
            }
        }
        pos += name.len() + 1;
    }
    let m = ranking.len();
    for (k, &(at, a)) in ranking.iter().enumerate() {
        if a.index() >= m {
            return Err(Error::parse(at, format!("alternative {a} out of range for {m} alternatives")));
        }
        if ranking[..k].iter().any(|&(_, b)| b == a) {
            return Err(Error::parse(at, format!("alternative {a} ranked twice")));
        }
    }
    let alts: Vec<Alternative> = ranking.into_iter().map(|(_, a)| a).collect();
    Preference::from_ranking(&alts).map_err(|e| Error::parse(offset, e.to_string()))
}

impl FromStr for Preference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_preference_at(s, 0)
    }
}

/// All `m!` strict preferences in ascending code order.
pub fn enumerate_preferences(alts: usize) -> Result<Vec<Preference>> {
    enumerate_preferences_with(alts, Limits::current())
}

pub fn enumerate_preferences_with(alts: usize, limits: &Limits) -> Result<Vec<Preference>> {
    if alts < 2 {
        return Err(Error::InvalidDimensions(format!(
            "need at least 2 alternatives, got {alts}"
        )));
    }
    limits.check_alts(alts)?;
    (0..factorial(alts)).map(|c| Preference::decode(c, alts)).collect()
}

/// One preference per agent.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    prefs: Vec<Preference>,
}

impl Profile {
    pub fn new(prefs: Vec<Preference>) -> Result<Self> {
        let Some(first) = prefs.first() else {
            return Err(Error::InvalidDimensions("empty profile".into()));
        };
        let m = first.alts();
        if let Some(bad) = prefs.iter().find(|p| p.alts() != m) {
            return Err(Error::InvalidDimensions(format!(
                "profile mixes {m} and {} alternatives",
                bad.alts()
            )));
        }
        Dims::new(prefs.len(), m)?;
        Ok(Profile { prefs })
    }

    pub fn agents(&self) -> usize {
        self.prefs.len()
    }

    pub fn alts(&self) -> usize {
        self.prefs[0].alts()
    }

    pub fn dims(&self) -> Dims {
        Dims {
            agents: self.agents(),
            alts: self.alts(),
        }
    }

    pub fn prefs(&self) -> &[Preference] {
        &self.prefs
    }

    pub fn pref(&self, agent: usize) -> Result<&Preference> {
        self.prefs.get(agent).ok_or(Error::AgentOutOfRange {
            index: agent,
            agents: self.agents(),
        })
    }

    /// The profile `(q, P_{-i})`.
    pub fn with_replaced(&self, agent: usize, q: Preference) -> Result<Profile> {
        if agent >= self.agents() {
            return Err(Error::AgentOutOfRange {
                index: agent,
                agents: self.agents(),
            });
        }
        if q.alts() != self.alts() {
            return Err(Error::InvalidDimensions(format!(
                "replacement ranks {} alternatives, profile has {}",
                q.alts(),
                self.alts()
            )));
        }
        let mut prefs = self.prefs.clone();
        prefs[agent] = q;
        Ok(Profile { prefs })
    }

    pub fn tops(&self) -> TopsProfile {
        TopsProfile {
            tops: self.prefs.iter().map(Preference::top).collect(),
        }
    }

    /// Agents whose top is `x`, ascending.
    pub fn supporters(&self, x: Alternative) -> Vec<usize> {
        supporters_of(&self.prefs, x).collect()
    }

    /// The common top when every agent shares it.
    pub fn unanimous_top(&self) -> Option<Alternative> {
        let t = self.prefs[0].top();
        self.prefs.iter().all(|p| p.top() == t).then_some(t)
    }

    pub fn code(&self) -> u64 {
        profile_code(&self.prefs)
    }

    pub fn from_code(dims: Dims, code: u64) -> Result<Profile> {
        let limit = dims.profile_count();
        if code as u128 >= limit {
            return Err(Error::CodeOutOfRange {
                code,
                limit: u64::try_from(limit).unwrap_or(u64::MAX),
            });
        }
        let radix = dims.preference_count();
        let mut prefs = vec![Preference::decode(0, dims.alts)?; dims.agents];
        let mut rest = code;
        for slot in prefs.iter_mut().rev() {
            *slot = Preference::decode(rest % radix, dims.alts)?;
            rest /= radix;
        }
        Ok(Profile { prefs })
    }

    pub(crate) fn from_prefs_unchecked(prefs: &[Preference]) -> Profile {
        Profile {
            prefs: prefs.to_vec(),
        }
    }
}

pub(crate) fn supporters_of(prefs: &[Preference], x: Alternative) -> impl Iterator<Item = usize> + '_ {
    prefs
        .iter()
        .enumerate()
        .filter(move |(_, p)| p.top() == x)
        .map(|(i, _)| i)
}

pub(crate) fn profile_code(prefs: &[Preference]) -> u64 {
    let radix = factorial(prefs[0].alts());
    prefs.iter().fold(0, |acc, p| acc * radix + p.code())
}

pub(crate) fn tops_code(prefs: &[Preference]) -> usize {
    let m = prefs[0].alts();
    prefs.iter().fold(0, |acc, p| acc * m + p.top().index())
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.prefs.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile({self})")
    }
}

impl Serialize for Profile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut prefs = Vec::new();
        let mut offset = 0;
        for part in s.split('|') {
            let p = parse_preference_at(part, offset)?;
            if let Some(first) = prefs.first().map(|q: &Preference| q.alts()) {
                if first != p.alts() {
                    return Err(Error::parse(
                        offset,
                        format!("preference ranks {} alternatives, expected {first}", p.alts()),
                    ));
                }
            }
            prefs.push(p);
            offset += part.len() + 1;
        }
        Profile::new(prefs).map_err(|e| Error::parse(0, e.to_string()))
    }
}

/// The vector of tops `(t(P_1), ..., t(P_n))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TopsProfile {
    tops: Vec<Alternative>,
}

impl TopsProfile {
    pub fn new(tops: Vec<Alternative>) -> Self {
        TopsProfile { tops }
    }

    pub fn tops(&self) -> &[Alternative] {
        &self.tops
    }

    /// Base-`m` code, agent 0 most significant.
    pub fn code(&self, alts: usize) -> u64 {
        self.tops
            .iter()
            .fold(0, |acc, a| acc * alts as u64 + a.index() as u64)
    }

    pub fn from_code(dims: Dims, code: u64) -> Result<Self> {
        let limit = dims.tops_count();
        if code >= limit {
            return Err(Error::CodeOutOfRange { code, limit });
        }
        Ok(TopsProfile {
            tops: tops_digits(dims, code as usize),
        })
    }
}

pub(crate) fn tops_digits(dims: Dims, code: usize) -> Vec<Alternative> {
    let mut tops = vec![Alternative(0); dims.agents];
    let mut rest = code;
    for slot in tops.iter_mut().rev() {
        *slot = Alternative::of(rest % dims.alts);
        rest /= dims.alts;
    }
    tops
}

impl fmt::Display for TopsProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, a) in self.tops.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// A set of admissible preferences over a fixed number of alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceDomain {
    alts: usize,
    members: Vec<Preference>,
}

impl PreferenceDomain {
    pub fn new(mut members: Vec<Preference>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::InvalidDimensions("empty preference domain".into()));
        };
        let alts = first.alts();
        if members.iter().any(|p| p.alts() != alts) {
            return Err(Error::InvalidDimensions(
                "domain members rank different alternative sets".into(),
            ));
        }
        members.sort();
        members.dedup();
        Ok(PreferenceDomain { alts, members })
    }

    /// All `m!` strict preferences.
    pub fn universal(alts: usize) -> Result<Self> {
        Self::new(enumerate_preferences(alts)?)
    }

    pub fn alts(&self) -> usize {
        self.alts
    }

    pub fn members(&self) -> &[Preference] {
        &self.members
    }

    pub fn contains(&self, p: &Preference) -> bool {
        self.members.binary_search(p).is_ok()
    }

    /// Every alternative is the top of some member.
    pub fn is_minimally_rich(&self) -> bool {
        Alternative::all(self.alts).all(|x| self.members.iter().any(|p| p.top() == x))
    }

    /// For each member `P`, each `x != t(P)` and each `y` ranked above `x`
    /// by every member sharing `P`'s top, some member with top `x` ranks `y`
    /// above everything `P` ranks below `x`.
    pub fn satisfies_property_t_star(&self) -> bool {
        let alts = || Alternative::all(self.alts);
        self.members.iter().all(|p| {
            let t = p.top();
            let same_top: Vec<&Preference> = self.members.iter().filter(|q| q.top() == t).collect();
            alts().filter(|&x| x != t).all(|x| {
                let below_x: Vec<Alternative> = alts().filter(|&z| p.beats(x, z)).collect();
                alts()
                    .filter(|&y| same_top.iter().all(|q| q.beats(y, x)))
                    .all(|y| {
                        self.members
                            .iter()
                            .any(|pb| pb.top() == x && below_x.iter().all(|&z| pb.beats(y, z)))
                    })
            })
        })
    }
}

/// The profile space `P^n` for fixed dimensions, enumerated by profile code.
#[derive(Debug, Clone)]
pub struct ProfileSpace {
    dims: Dims,
    prefs: Vec<Preference>,
    len: u64,
}

impl ProfileSpace {
    pub fn new(dims: Dims) -> Result<Self> {
        Self::with_limits(dims, Limits::current())
    }

    pub fn with_limits(dims: Dims, limits: &Limits) -> Result<Self> {
        let len = dims.checked_profile_count(limits)?;
        Ok(ProfileSpace {
            dims,
            prefs: enumerate_preferences_with(dims.alts, limits)?,
            len,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// All preferences of the universal domain, indexed by code.
    pub fn preferences(&self) -> &[Preference] {
        &self.prefs
    }

    /// Preferences whose top is `x`; a contiguous block of codes.
    pub fn with_top(&self, x: Alternative) -> &[Preference] {
        let block = factorial(self.dims.alts - 1) as usize;
        &self.prefs[x.index() * block..(x.index() + 1) * block]
    }

    pub fn profile(&self, code: u64) -> Result<Profile> {
        Profile::from_code(self.dims, code)
    }

    pub fn iter(&self) -> impl Iterator<Item = Profile> + '_ {
        let mut out = Vec::with_capacity(self.len as usize);
        self.for_each_in(0..self.len, |_, prefs| {
            out.push(Profile::from_prefs_unchecked(prefs));
            ControlFlow::<()>::Continue(())
        });
        out.into_iter()
    }

    /// Visits profiles with codes in `range` in ascending order, reusing one
    /// buffer. Stops early when `visit` breaks.
    pub(crate) fn for_each_in<B>(
        &self,
        range: Range<u64>,
        mut visit: impl FnMut(u64, &[Preference]) -> ControlFlow<B>,
    ) -> Option<B> {
        if range.is_empty() {
            return None;
        }
        let radix = self.prefs.len();
        let n = self.dims.agents;
        let mut digits = vec![0usize; n];
        let mut rest = range.start;
        for d in digits.iter_mut().rev() {
            *d = (rest % radix as u64) as usize;
            rest /= radix as u64;
        }
        let mut buf: Vec<Preference> = digits.iter().map(|&d| self.prefs[d]).collect();
        for code in range {
            if let ControlFlow::Break(b) = visit(code, &buf) {
                return Some(b);
            }
            for k in (0..n).rev() {
                digits[k] += 1;
                if digits[k] < radix {
                    buf[k] = self.prefs[digits[k]];
                    break;
                }
                digits[k] = 0;
                buf[k] = self.prefs[0];
            }
        }
        None
    }
}

/// Every profile of `P^n` in ascending code order.
pub fn enumerate_profiles(dims: Dims) -> Result<Vec<Profile>> {
    Ok(ProfileSpace::new(dims)?.iter().collect())
}
