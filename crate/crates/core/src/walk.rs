//! Walk paths and their occupation functionals.
//!
//! Non-integer times are handled by linear interpolation over the step in
//! progress: for `s = m + f` with `0 <= f < 1`,
//! `N_s(x) = N_m(x) + f 1{S_(m+1) = x}`, and `V_s`, `R_s` use the same rule.

use std::io::{self, Write};

use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stable::WalkIncrementLaw;

/// Seed coordinates a path was generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub replica: u64,
    pub copy: u64,
}

#[derive(Debug, Clone)]
pub struct WalkPath {
    positions: Vec<i64>,
    law: Option<WalkIncrementLaw>,
    provenance: Option<Provenance>,
}

/// Splits a time into its integer part and fractional weight.
pub(crate) fn split_time(s: f64, horizon: usize) -> Result<(usize, f64)> {
    if !(s >= 0.0 && s <= horizon as f64) {
        return Err(Error::TimeOutOfRange {
            time: s,
            horizon: horizon as f64,
        });
    }
    let m = s.floor() as usize;
    if m >= horizon {
        Ok((horizon, 0.0))
    } else {
        Ok((m, s - m as f64))
    }
}

impl WalkPath {
    /// Wraps explicit positions `S_0, ..., S_n`. `S_0` must be 0.
    pub fn from_positions(positions: Vec<i64>) -> Result<Self> {
        match positions.first() {
            Some(0) => Ok(Self {
                positions,
                law: None,
                provenance: None,
            }),
            Some(&x) => Err(Error::param("positions", format!("path must start at 0, got {x}"))),
            None => Err(Error::param("positions", "path is empty")),
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    /// Number of steps `n`.
    pub fn horizon(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn law(&self) -> Option<&WalkIncrementLaw> {
        self.law.as_ref()
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    fn check_step(&self, m: usize) -> Result<()> {
        if m > self.horizon() {
            Err(Error::TimeOutOfRange {
                time: m as f64,
                horizon: self.horizon() as f64,
            })
        } else {
            Ok(())
        }
    }

    /// Visit counts `N_m(x)` over `S_0, ..., S_m`.
    pub fn local_time_field(&self, m: usize) -> Result<LocalTimeField> {
        self.check_step(m)?;
        let prefix = &self.positions[..=m];
        let index = SiteIndex::new(prefix);
        let mut counts = vec![0u64; index.sites.len()];
        for &slot in &index.slots {
            counts[slot as usize] += 1;
        }
        Ok(LocalTimeField {
            sites: index.sites,
            counts,
        })
    }

    pub fn local_time(&self, x: i64, s: f64) -> Result<f64> {
        let (m, f) = split_time(s, self.horizon())?;
        let base = self.positions[..=m].iter().filter(|&&p| p == x).count() as f64;
        let extra = if f > 0.0 && self.positions[m + 1] == x {
            f
        } else {
            0.0
        };
        Ok(base + extra)
    }

    /// `V_s = sum_x N_s(x)^2` at integer times, interpolated in between.
    pub fn self_intersections(&self, s: f64) -> Result<f64> {
        let (m, f) = split_time(s, self.horizon())?;
        let field = self.local_time_field(m)?;
        let vm = field.self_intersections() as f64;
        if f == 0.0 {
            return Ok(vm);
        }
        let next = field.get(self.positions[m + 1]) as f64;
        Ok(vm + f * (2.0 * next + 1.0))
    }

    /// Number of distinct sites visited, interpolated between integer times.
    pub fn range(&self, s: f64) -> Result<f64> {
        let (m, f) = split_time(s, self.horizon())?;
        let field = self.local_time_field(m)?;
        let rm = field.range() as f64;
        if f > 0.0 && field.get(self.positions[m + 1]) == 0 {
            Ok(rm + f)
        } else {
            Ok(rm)
        }
    }

    /// `max_{k <= n} |S_k|`.
    pub fn max_abs(&self, n: usize) -> Result<u64> {
        self.check_step(n)?;
        Ok(self.positions[..=n]
            .iter()
            .map(|p| p.unsigned_abs())
            .max()
            .unwrap_or(0))
    }

    /// `V_m`, `R_m`, `max |S_k|` and `max_x N_m(x)` at each checkpoint in one pass.
    pub fn occupation_stats(&self, checkpoints: &[usize]) -> Result<Vec<OccupationStats>> {
        if checkpoints.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("checkpoints", "must be nondecreasing"));
        }
        if let Some(&last) = checkpoints.last() {
            self.check_step(last)?;
        }
        let index = SiteIndex::new(&self.positions);
        let mut counts = vec![0u64; index.sites.len()];
        let mut out = Vec::with_capacity(checkpoints.len());
        let (mut v, mut r, mut max_abs, mut sup) = (0u64, 0u64, 0u64, 0u64);
        let mut next = 0;
        for (k, &slot) in index.slots.iter().enumerate() {
            let c = &mut counts[slot as usize];
            v += 2 * *c + 1;
            if *c == 0 {
                r += 1;
            }
            *c += 1;
            sup = sup.max(*c);
            max_abs = max_abs.max(self.positions[k].unsigned_abs());
            while next < checkpoints.len() && checkpoints[next] == k {
                out.push(OccupationStats {
                    step: k,
                    self_intersections: v,
                    range: r,
                    max_abs,
                    max_local_time: sup,
                });
                next += 1;
            }
        }
        Ok(out)
    }

    pub fn site_index(&self) -> SiteIndex {
        SiteIndex::new(&self.positions)
    }

    /// Writes `k,S_k` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k,S_k")?;
        for (k, p) in self.positions.iter().enumerate() {
            writeln!(w, "{k},{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OccupationStats {
    pub step: usize,
    pub self_intersections: u64,
    pub range: u64,
    pub max_abs: u64,
    pub max_local_time: u64,
}

/// Draws `S_0 = 0, S_1, ..., S_n` with i.i.d. increments from `law`.
pub fn generate_walk<R: RngCore + ?Sized>(
    n: usize,
    law: &WalkIncrementLaw,
    rng: &mut R,
) -> Result<WalkPath> {
    let mut positions = Vec::with_capacity(n + 1);
    positions.push(0i64);
    match law {
        WalkIncrementLaw::SimpleSymmetric => {
            // 64 steps per generator call.
            let mut s = 0i64;
            let mut left = n;
            while left > 0 {
                let bits = rng.next_u64();
                for b in 0..left.min(64) {
                    s += if (bits >> b) & 1 == 0 { 1 } else { -1 };
                    positions.push(s);
                }
                left -= left.min(64);
            }
        }
        WalkIncrementLaw::DiscretePareto(_) => {
            let mut s = 0i64;
            for step in 1..=n {
                s = s
                    .checked_add(law.sample(rng))
                    .ok_or(Error::PositionOverflow { step })?;
                positions.push(s);
            }
        }
    }
    Ok(WalkPath {
        positions,
        law: Some(law.clone()),
        provenance: None,
    })
}

/// Sparse local-time field, sites in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTimeField {
    sites: Vec<i64>,
    counts: Vec<u64>,
}

impl LocalTimeField {
    pub fn get(&self, x: i64) -> u64 {
        self.sites
            .binary_search(&x)
            .map(|i| self.counts[i])
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.sites.iter().copied().zip(self.counts.iter().copied())
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of distinct sites.
    pub fn range(&self) -> usize {
        self.sites.len()
    }

    /// `sum_x N(x)`, which is `m + 1`.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn self_intersections(&self) -> u64 {
        self.counts.iter().map(|c| c * c).sum()
    }

    pub fn max(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Writes `x,N` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,N")?;
        for (x, n) in self.iter() {
            writeln!(w, "{x},{n}")?;
        }
        Ok(())
    }
}

/// Compact relabelling of the sites of a path: `sites` is sorted and
/// `slots[k]` is the index of `S_k` in `sites`.
#[derive(Debug, Clone)]
pub struct SiteIndex {
    pub sites: Vec<i64>,
    pub slots: Vec<u32>,
}

impl SiteIndex {
    pub fn new(positions: &[i64]) -> Self {
        let (Some(&lo), Some(&hi)) = (positions.iter().min(), positions.iter().max()) else {
            return Self {
                sites: Vec::new(),
                slots: Vec::new(),
            };
        };
        let span = (hi as i128 - lo as i128) as u128 + 1;
        if span <= 8 * (positions.len() as u128 + 1) {
            let span = span as usize;
            let mut ids = vec![u32::MAX; span];
            for &p in positions {
                ids[(p - lo) as usize] = 0;
            }
            let mut sites = Vec::new();
            for (off, id) in ids.iter_mut().enumerate() {
                if *id == 0 {
                    *id = sites.len() as u32;
                    sites.push(lo + off as i64);
                }
            }
            let slots = positions.iter().map(|&p| ids[(p - lo) as usize]).collect();
            Self { sites, slots }
        } else {
            let mut sites = positions.to_vec();
            sites.sort_unstable();
            sites.dedup();
            let slots = positions
                .iter()
                .map(|p| sites.binary_search(p).expect("site present") as u32)
                .collect();
            Self { sites, slots }
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Visit counts over `S_0..=S_m`, indexed like `sites`.
    pub fn counts_upto(&self, m: usize) -> Vec<u64> {
        let mut counts = vec![0u64; self.sites.len()];
        for &s in &self.slots[..=m] {
            counts[s as usize] += 1;
        }
        counts
    }
}
