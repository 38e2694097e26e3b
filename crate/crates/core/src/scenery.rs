//! Lazily sampled scenery fields.
//!
//! The value at site `x` is a pure function of `(law, master seed, replica,
//! copy, x)`: it is drawn from a counter-based stream keyed on the seed
//! coordinates with the site in the counter. The cache only saves work.

use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::rng::{mix_words, SiteStream, Stream};
use crate::stable::SceneryLaw;
use crate::stats::NeumaierSum;

#[derive(Debug, Clone)]
pub struct Scenery {
    law: SceneryLaw,
    master_seed: u64,
    replica: u64,
    copy: u64,
    key: u64,
    cache: BTreeMap<i64, f64>,
}

impl Scenery {
    pub fn new(law: SceneryLaw, master_seed: u64, replica: u64) -> Self {
        Self::for_copy(law, master_seed, replica, 0)
    }

    pub fn for_copy(law: SceneryLaw, master_seed: u64, replica: u64, copy: u64) -> Self {
        Self {
            law,
            master_seed,
            replica,
            copy,
            key: mix_words(&[master_seed, Stream::Scenery as u64, replica, copy]),
            cache: BTreeMap::new(),
        }
    }

    pub fn law(&self) -> &SceneryLaw {
        &self.law
    }

    pub fn seed_coordinates(&self) -> (u64, u64, u64) {
        (self.master_seed, self.replica, self.copy)
    }

    /// `xi_x`, sampled on first access and cached.
    pub fn scenery_at(&mut self, x: i64) -> f64 {
        if let Some(&v) = self.cache.get(&x) {
            return v;
        }
        let v = self.value_at(x);
        self.cache.insert(x, v);
        v
    }

    /// `xi_x` without touching the cache.
    pub fn value_at(&self, x: i64) -> f64 {
        self.law.sample(&mut SiteStream::new(self.key, x))
    }

    /// `sum_{x=0}^{n} xi_x`.
    pub fn cumulative_scenery(&mut self, n: u64) -> f64 {
        let mut acc = NeumaierSum::new();
        for x in 0..=n as i64 {
            acc.add(self.scenery_at(x));
        }
        acc.value()
    }

    pub fn cached_len(&self) -> usize {
        self.cache.len()
    }

    pub fn cached(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.cache.iter().map(|(&x, &v)| (x, v))
    }

    /// Writes `x,xi_x` rows for every cached site.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,xi_x")?;
        for (x, v) in self.cached() {
            writeln!(w, "{x},{v:e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::StableLaw;

    fn law() -> SceneryLaw {
        SceneryLaw::ExactStable(StableLaw::symmetric(1.5, 1.0).unwrap())
    }

    #[test]
    fn values_do_not_depend_on_access_order() {
        let mut a = Scenery::new(law(), 3, 1);
        let mut b = Scenery::new(law(), 3, 1);
        let fwd: Vec<f64> = (-20..=20).map(|x| a.scenery_at(x)).collect();
        let mut back: Vec<f64> = (-20..=20).rev().map(|x| b.scenery_at(x)).collect();
        back.reverse();
        assert_eq!(fwd, back);
        assert_eq!(a.cached_len(), 41);
        assert_eq!(a.scenery_at(5), a.value_at(5));
    }

    #[test]
    fn coordinates_change_values() {
        let a = Scenery::for_copy(law(), 3, 1, 0);
        let b = Scenery::for_copy(law(), 3, 1, 1);
        let c = Scenery::for_copy(law(), 3, 2, 0);
        let d = Scenery::for_copy(law(), 4, 1, 0);
        let v = a.value_at(0);
        assert_ne!(v, b.value_at(0));
        assert_ne!(v, c.value_at(0));
        assert_ne!(v, d.value_at(0));
        assert_ne!(v, a.value_at(1));
    }

    #[test]
    fn cumulative_and_zero_law() {
        let mut s = Scenery::new(law(), 1, 0);
        let want: f64 = (0..=10).map(|x| s.value_at(x)).sum();
        assert!((s.cumulative_scenery(10) - want).abs() < 1e-12);
        let mut z = Scenery::new(SceneryLaw::Zero, 1, 0);
        assert_eq!(z.cumulative_scenery(100), 0.0);
    }

    #[test]
    fn csv_lists_cached_sites_in_order() {
        let mut s = Scenery::new(SceneryLaw::Zero, 1, 0);
        s.scenery_at(2);
        s.scenery_at(-1);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,xi_x\n-1,0e0\n2,0e0\n");
    }
}
