//! Exhaustive subset enumeration and extremal profile tables.
//!
//! Proper nonempty subsets are visited by increasing popcount, then by
//! increasing bitmask. Profile extrema break ties by that same order, so a
//! table is identical no matter how the mask range was split among workers.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, MarkovChain, Result, VertexSet, MAX_ENUM_STATES};

/// Masses closer than this are reported as one profile row.
pub const MASS_MERGE_TOL: f64 = 1e-12;

pub fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_ENUM_STATES {
        Err(Error::TooManyStates { n, max: MAX_ENUM_STATES })
    } else {
        Ok(())
    }
}

/// Masks of all proper nonempty subsets of `n` states, by popcount then value.
pub fn proper_subsets(n: usize) -> impl Iterator<Item = u64> {
    assert!(n <= 63, "mask enumeration needs n <= 63");
    let limit = 1u64 << n;
    (1..n as u32).flat_map(move |k| {
        let mut next = Some((1u64 << k) - 1);
        core::iter::from_fn(move || {
            let cur = next?;
            // Gosper's hack: next mask with the same popcount
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let succ = (((r ^ cur) >> 2) / c) | r;
            next = (succ < limit).then_some(succ);
            Some(cur)
        })
    })
}

/// Masks in `[lo, hi)` that are proper nonempty subsets of `n` states, in
/// numeric order. Used to split enumeration across workers.
pub fn proper_subsets_in(n: usize, lo: u64, hi: u64) -> impl Iterator<Item = u64> {
    let full = (1u64 << n) - 1;
    (lo.max(1)..hi.min(full)).filter(move |&m| m != 0 && m != full)
}

/// Whether a profile keeps the smallest or the largest value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Direction {
    Min,
    Max,
}

impl Direction {
    /// `true` when `a` is strictly better than `b`. NaN never wins.
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Min => a < b,
            Direction::Max => a > b,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Best {
    mass: f64,
    value: f64,
    mask: u64,
}

fn enum_order(a: u64, b: u64) -> Ordering {
    (a.count_ones(), a).cmp(&(b.count_ones(), b))
}

impl Best {
    fn improves_on(&self, other: &Best, dir: Direction) -> bool {
        if dir.better(self.value, other.value) {
            return true;
        }
        let tie = self.value == other.value || (self.value.is_nan() && other.value.is_nan());
        tie && enum_order(self.mask, other.mask) == Ordering::Less
    }
}

/// Per-mass extrema collected while visiting subsets.
#[derive(Clone, Debug)]
pub struct ProfileAccumulator {
    direction: Direction,
    by_mass: BTreeMap<u64, Best>,
}

impl ProfileAccumulator {
    pub fn new(direction: Direction) -> Self {
        ProfileAccumulator { direction, by_mass: BTreeMap::new() }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn add(&mut self, mass: f64, value: f64, mask: u64) {
        let cand = Best { mass, value, mask };
        let dir = self.direction;
        self.by_mass
            .entry(mass.to_bits())
            .and_modify(|b| {
                if cand.improves_on(b, dir) {
                    *b = cand;
                }
            })
            .or_insert(cand);
    }

    pub fn merge(&mut self, other: ProfileAccumulator) {
        for (_, b) in other.by_mass {
            self.add(b.mass, b.value, b.mask);
        }
    }

    /// Groups masses within [`MASS_MERGE_TOL`] and takes running extrema over
    /// increasing mass.
    pub fn finish(self, chain: &MarkovChain) -> ProfileTable {
        let dir = self.direction;
        let mut grouped: Vec<(f64, Best)> = Vec::new();
        let mut group_start = f64::NEG_INFINITY;
        for (_, b) in self.by_mass {
            match grouped.last_mut() {
                Some((r, best)) if b.mass - group_start <= MASS_MERGE_TOL => {
                    *r = b.mass;
                    if b.improves_on(best, dir) {
                        *best = b;
                    }
                }
                _ => {
                    group_start = b.mass;
                    grouped.push((b.mass, b));
                }
            }
        }
        let mut rows = Vec::with_capacity(grouped.len());
        let mut running: Option<Best> = None;
        for (r, b) in grouped {
            let keep = match running {
                Some(cur) => b.improves_on(&cur, dir),
                None => true,
            };
            if keep {
                running = Some(b);
            }
            let cur = running.unwrap();
            rows.push(ProfileRow {
                r,
                value: cur.value,
                witness: VertexSet::from_mask(chain, cur.mask).expect("mask within chain"),
            });
        }
        ProfileTable { direction: dir, rows }
    }
}

/// One profile row: the extremal value over all sets with `pi(A) <= r`.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProfileRow {
    pub r: f64,
    pub value: f64,
    pub witness: VertexSet,
}

/// Extremal set quantity as a function of the mass bound `r`, one row per
/// achievable mass.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProfileTable {
    pub direction: Direction,
    pub rows: Vec<ProfileRow>,
}

impl ProfileTable {
    pub fn rows(&self) -> &[ProfileRow] {
        &self.rows
    }

    /// Value over `{A : pi(A) <= x}`; `None` below the smallest mass.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let idx = self.rows.partition_point(|row| row.r <= x + MASS_MERGE_TOL);
        idx.checked_sub(1).map(|i| self.rows[i].value)
    }

    /// Extremum over every enumerated set.
    pub fn overall(&self) -> Option<f64> {
        self.rows.last().map(|row| row.value)
    }

    pub fn overall_witness(&self) -> Option<&VertexSet> {
        self.rows.last().map(|row| &row.witness)
    }
}

/// Profile of `f` over all proper nonempty subsets.
pub fn profile_by<F: FnMut(&VertexSet) -> f64>(
    chain: &MarkovChain,
    direction: Direction,
    mut f: F,
) -> Result<ProfileTable> {
    check_enumerable(chain.n())?;
    let mut acc = ProfileAccumulator::new(direction);
    for mask in proper_subsets(chain.n()) {
        let a = VertexSet::from_mask(chain, mask)?;
        acc.add(a.mass(), f(&a), mask);
    }
    Ok(acc.finish(chain))
}
