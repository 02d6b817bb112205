//! Brute-force reference implementations, written against plain index
//! vectors and sharing no code with the library beyond rule evaluation.

#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use scf_verify::{Dims, Preference, Profile, Rule};

/// All preferences and profiles at `(n, m)`. Preferences are rankings in
/// lexicographic order; profile `k` is the mixed-radix number over
/// preference indices with agent 0 most significant.
pub struct World {
    pub n: usize,
    pub m: usize,
    pub prefs: Vec<Vec<usize>>,
}

impl World {
    pub fn new(n: usize, m: usize) -> Self {
        let prefs = (0..m).permutations(m).collect();
        World { n, m, prefs }
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.n, self.m).unwrap()
    }

    pub fn profile_count(&self) -> usize {
        self.prefs.len().pow(self.n as u32)
    }

    pub fn profile(&self, k: usize) -> Vec<usize> {
        let base = self.prefs.len();
        let mut digits = vec![0; self.n];
        let mut rest = k;
        for slot in digits.iter_mut().rev() {
            *slot = rest % base;
            rest /= base;
        }
        digits
    }

    pub fn index(&self, profile: &[usize]) -> usize {
        profile.iter().fold(0, |acc, &p| acc * self.prefs.len() + p)
    }

    pub fn top(&self, p: usize) -> usize {
        self.prefs[p][0]
    }

    pub fn tops(&self, profile: &[usize]) -> Vec<usize> {
        profile.iter().map(|&p| self.top(p)).collect()
    }

    /// `x` strictly above `y` in preference `p`.
    pub fn better(&self, p: usize, x: usize, y: usize) -> bool {
        let r = &self.prefs[p];
        r.iter().position(|&a| a == x) < r.iter().position(|&a| a == y)
    }

    pub fn library_profile(&self, profile: &[usize]) -> Profile {
        let prefs = profile
            .iter()
            .map(|&p| Preference::from_indices(&self.prefs[p]).unwrap())
            .collect();
        Profile::new(prefs).unwrap()
    }

    /// Outcome table of a library rule, by evaluation at every profile.
    pub fn outcomes(&self, rule: &Rule) -> Outcomes<'_> {
        let table = (0..self.profile_count())
            .map(|k| rule.evaluate(&self.library_profile(&self.profile(k))).unwrap().index())
            .collect();
        Outcomes { world: self, table }
    }

    /// Outcome table of a tops table given as digits, agent 0 most significant.
    pub fn tops_outcomes(&self, digits: &[usize]) -> Outcomes<'_> {
        assert_eq!(digits.len(), self.m.pow(self.n as u32));
        let table = (0..self.profile_count())
            .map(|k| {
                let code = self.tops(&self.profile(k)).iter().fold(0, |acc, &t| acc * self.m + t);
                digits[code]
            })
            .collect();
        Outcomes { world: self, table }
    }

    /// Every tops table at `(n, m)`, in ascending code order.
    pub fn all_tops_tables(&self) -> impl Iterator<Item = Vec<usize>> {
        let len = self.m.pow(self.n as u32);
        std::iter::repeat(0..self.m).take(len).multi_cartesian_product()
    }
}

pub struct Outcomes<'w> {
    pub world: &'w World,
    pub table: Vec<usize>,
}

impl Outcomes<'_> {
    fn at(&self, profile: &[usize]) -> usize {
        self.table[self.world.index(profile)]
    }

    fn profiles(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.table.len()).map(|k| self.world.profile(k))
    }

    pub fn unanimous(&self) -> bool {
        self.profiles().all(|p| {
            let tops = self.world.tops(&p);
            tops.iter().any(|&t| t != tops[0]) || self.at(&p) == tops[0]
        })
    }

    pub fn tops_only(&self) -> bool {
        let w = self.world;
        let mut seen = std::collections::HashMap::new();
        self.profiles()
            .all(|p| *seen.entry(w.tops(&p)).or_insert(self.at(&p)) == self.at(&p))
    }

    pub fn efficient(&self) -> bool {
        let w = self.world;
        self.profiles().all(|p| {
            let x = self.at(&p);
            !(0..w.m).any(|y| p.iter().all(|&q| w.better(q, y, x)))
        })
    }

    /// Can agent `i` gain at `p` by some misreport?
    pub fn gains(&self, p: &[usize], i: usize) -> bool {
        let w = self.world;
        let sincere = self.at(p);
        (0..w.prefs.len()).any(|lie| {
            let mut q = p.to_vec();
            q[i] = lie;
            w.better(p[i], self.at(&q), sincere)
        })
    }

    pub fn strategy_proof(&self) -> bool {
        self.profiles().all(|p| (0..self.world.n).all(|i| !self.gains(&p, i)))
    }

    pub fn dictators(&self) -> Vec<usize> {
        let w = self.world;
        (0..w.n)
            .filter(|&i| self.profiles().all(|p| self.at(&p) == w.top(p[i])))
            .collect()
    }

    pub fn dictatorial_at(&self, p: &[usize]) -> bool {
        let w = self.world;
        let x = self.at(p);
        (0..w.n).filter(|&i| w.top(p[i]) != x).all(|i| {
            (0..w.prefs.len()).all(|lie| {
                let mut q = p.to_vec();
                q[i] = lie;
                self.at(&q) == x
            })
        })
    }

    pub fn manipulable_at(&self, p: &[usize]) -> bool {
        let w = self.world;
        (0..w.n).any(|i| {
            (0..w.prefs.len())
                .filter(|&star| w.top(star) == w.top(p[i]))
                .any(|star| {
                    let mut q = p.to_vec();
                    q[i] = star;
                    self.gains(&q, i)
                })
        })
    }

    pub fn dictatorial_set(&self) -> BTreeSet<usize> {
        (0..self.table.len())
            .filter(|&k| self.dictatorial_at(&self.world.profile(k)))
            .collect()
    }

    pub fn manipulable_set(&self) -> BTreeSet<usize> {
        (0..self.table.len())
            .filter(|&k| self.manipulable_at(&self.world.profile(k)))
            .collect()
    }
}

/// Tops table rule from oracle digits.
pub fn tops_rule(world: &World, digits: &[usize]) -> Rule {
    let s = format!(
        "TOPS:n={},m={}:{}",
        world.n,
        world.m,
        digits.iter().map(|d| d.to_string()).collect::<String>()
    );
    scf_verify::parse_rule(&s, None).unwrap()
}

/// Deterministic pseudo-random tops tables, so oracle runs do not depend on
/// the library's sampler.
pub fn some_tables(world: &World, count: usize, seed: u64) -> Vec<Vec<usize>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let len = world.m.pow(world.n as u32);
    (0..count)
        .map(|_| (0..len).map(|_| rng.gen_range(0..world.m)).collect())
        .collect()
}

/// A random tops table that is efficient: each cell picks one of its tops.
pub fn some_efficient_tables(world: &World, count: usize, seed: u64) -> Vec<Vec<usize>> {
    use rand::{seq::SliceRandom, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let len = world.m.pow(world.n as u32);
    (0..count)
        .map(|_| {
            (0..len)
                .map(|code| {
                    let mut tops = Vec::with_capacity(world.n);
                    let mut rest = code;
                    for _ in 0..world.n {
                        tops.push(rest % world.m);
                        rest /= world.m;
                    }
                    *tops.choose(&mut rng).unwrap()
                })
                .collect()
        })
        .collect()
}
