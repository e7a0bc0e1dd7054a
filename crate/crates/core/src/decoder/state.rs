use super::bound::{BoundPair, TopTwo};
use super::layout::DecoderGraph;
use crate::error::{Error, Result};

/// All directed messages of the bound-propagation decoder.
///
/// Naming is `<from>2<to>`: `c2z` bundle-level test to bundle, `z2f` bundle
/// value to its bundle check, `f2x` bundle check to item, `x2c` item to
/// item-level test, and the reverse directions. `f2z` carries the summed
/// item bounds of a bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderState {
    pub c2z: Vec<BoundPair>,
    pub z2c: Vec<BoundPair>,
    pub z2f: Vec<BoundPair>,
    pub f2z: Vec<BoundPair>,
    pub f2x: Vec<BoundPair>,
    pub x2f: Vec<BoundPair>,
    pub x2c: Vec<BoundPair>,
    pub c2x: Vec<BoundPair>,
    pub iteration: usize,
}

fn interval(lo: i64, hi: i64, cap: i64, location: impl FnOnce() -> String) -> Result<BoundPair> {
    let lo = lo.max(0);
    let hi = hi.min(cap);
    if lo > hi {
        return Err(Error::InconsistentSyndrome {
            location: location(),
            lo,
            hi,
        });
    }
    Ok(BoundPair::new(lo as u16, hi as u16))
}

fn store(slot: &mut BoundPair, v: BoundPair, changed: &mut bool) {
    if *slot != v {
        *slot = v;
        *changed = true;
    }
}

impl DecoderState {
    /// Every bundle-side message `[0, q]`, every item-side message `[0, 1]`.
    pub fn init(g: &DecoderGraph) -> Self {
        let bundle = BoundPair::full(g.q as u16);
        let item = BoundPair::full(1);
        Self {
            c2z: vec![bundle; g.z_edges()],
            z2c: vec![bundle; g.z_edges()],
            z2f: vec![bundle; g.n_h],
            f2z: vec![bundle; g.n_h],
            f2x: vec![item; g.n],
            x2f: vec![item; g.n],
            x2c: vec![item; g.x_edges()],
            c2x: vec![item; g.x_edges()],
            iteration: 0,
        }
    }

    /// One forward sweep (tests → bundles → items → item tests) followed by
    /// the reverse sweep. Returns whether any message changed.
    pub fn iterate(&mut self, g: &DecoderGraph, s_z: &[u32], s_x: &[u32]) -> Result<bool> {
        let mut changed = false;
        changed |= self.update_cz_to_z(g, s_z)?;
        changed |= self.update_z_to_f(g)?;
        changed |= self.update_f_to_x(g)?;
        changed |= self.update_x_to_cx(g)?;
        changed |= self.update_cx_to_x(g, s_x)?;
        changed |= self.update_x_to_f(g)?;
        changed |= self.update_f_to_z(g);
        changed |= self.update_z_to_cz(g)?;
        self.iteration += 1;
        Ok(changed)
    }

    /// Bundle-level test to bundle: the outcome minus the other bundles'
    /// extreme values, clamped to `[0, q]`.
    pub fn update_cz_to_z(&mut self, g: &DecoderGraph, s_z: &[u32]) -> Result<bool> {
        let cap = g.q as i64;
        let mut changed = false;
        for (t, &s) in s_z.iter().enumerate() {
            let edges = t * g.d_cz..(t + 1) * g.d_cz;
            let (sum_lo, sum_hi) = self.z2c[edges.clone()]
                .iter()
                .fold((0i64, 0i64), |(l, h), m| (l + m.lo as i64, h + m.hi as i64));
            for e in edges {
                let m = self.z2c[e];
                let v = interval(
                    s as i64 - (sum_hi - m.hi as i64),
                    s as i64 - (sum_lo - m.lo as i64),
                    cap,
                    || format!("bundle-level test {t}"),
                )?;
                store(&mut self.c2z[e], v, &mut changed);
            }
        }
        Ok(changed)
    }

    /// Bundle value to bundle check: tightest of all test messages.
    pub fn update_z_to_f(&mut self, g: &DecoderGraph) -> Result<bool> {
        let mut changed = false;
        for b in 0..g.n_h {
            let (mut lo, mut hi) = (0i64, g.q as i64);
            for &e in g.bundle_edges(b) {
                let m = self.c2z[e as usize];
                lo = lo.max(m.lo as i64);
                hi = hi.min(m.hi as i64);
            }
            let v = interval(lo, hi, g.q as i64, || format!("bundle {b}"))?;
            store(&mut self.z2f[b], v, &mut changed);
        }
        Ok(changed)
    }

    /// Bundle check to item: bundle bounds minus the other members' bounds,
    /// clamped to `[0, 1]`.
    pub fn update_f_to_x(&mut self, g: &DecoderGraph) -> Result<bool> {
        let mut changed = false;
        for b in 0..g.n_h {
            let items = g.bundle_items(b);
            let (sum_lo, sum_hi) = items.iter().fold((0i64, 0i64), |(l, h), &i| {
                let m = self.x2f[i as usize];
                (l + m.lo as i64, h + m.hi as i64)
            });
            let z = self.z2f[b];
            for &i in items {
                let i = i as usize;
                let m = self.x2f[i];
                let v = interval(
                    z.lo as i64 - (sum_hi - m.hi as i64),
                    z.hi as i64 - (sum_lo - m.lo as i64),
                    1,
                    || format!("bundle {b} towards item {i}"),
                )?;
                store(&mut self.f2x[i], v, &mut changed);
            }
        }
        Ok(changed)
    }

    /// Item to item-level test: the other tests' messages and the bundle
    /// message, combined.
    pub fn update_x_to_cx(&mut self, g: &DecoderGraph) -> Result<bool> {
        let mut changed = false;
        for i in 0..g.n {
            let edges = g.item_edges(i);
            let mut ones_lo = 0usize;
            let mut zeros_hi = 0usize;
            for &e in edges {
                let m = self.c2x[e as usize];
                ones_lo += (m.lo == 1) as usize;
                zeros_hi += (m.hi == 0) as usize;
            }
            let f = self.f2x[i];
            for &e in edges {
                let e = e as usize;
                let m = self.c2x[e];
                let other_lo = (ones_lo - (m.lo == 1) as usize > 0) as i64;
                let other_hi = 1 - (zeros_hi - (m.hi == 0) as usize > 0) as i64;
                let v = interval(
                    other_lo.max(f.lo as i64),
                    other_hi.min(f.hi as i64),
                    1,
                    || format!("item {i}"),
                )?;
                store(&mut self.x2c[e], v, &mut changed);
            }
        }
        Ok(changed)
    }

    /// Item-level test to item: the bundle-level rule with `q = 1`.
    pub fn update_cx_to_x(&mut self, g: &DecoderGraph, s_x: &[u32]) -> Result<bool> {
        let mut changed = false;
        for (t, &s) in s_x.iter().enumerate() {
            let edges = t * g.d_c..(t + 1) * g.d_c;
            let (sum_lo, sum_hi) = self.x2c[edges.clone()]
                .iter()
                .fold((0i64, 0i64), |(l, h), m| (l + m.lo as i64, h + m.hi as i64));
            for e in edges {
                let m = self.x2c[e];
                let v = interval(
                    s as i64 - (sum_hi - m.hi as i64),
                    s as i64 - (sum_lo - m.lo as i64),
                    1,
                    || format!("item-level test {t}"),
                )?;
                store(&mut self.c2x[e], v, &mut changed);
            }
        }
        Ok(changed)
    }

    /// Item to bundle check: tightest of all item-level test messages.
    pub fn update_x_to_f(&mut self, g: &DecoderGraph) -> Result<bool> {
        let mut changed = false;
        for i in 0..g.n {
            let (mut lo, mut hi) = (0i64, 1i64);
            for &e in g.item_edges(i) {
                let m = self.c2x[e as usize];
                lo = lo.max(m.lo as i64);
                hi = hi.min(m.hi as i64);
            }
            let v = interval(lo, hi, 1, || format!("item {i}"))?;
            store(&mut self.x2f[i], v, &mut changed);
        }
        Ok(changed)
    }

    /// Bundle check to bundle value: sums of the members' bounds.
    pub fn update_f_to_z(&mut self, g: &DecoderGraph) -> bool {
        let mut changed = false;
        for b in 0..g.n_h {
            let (lo, hi) = g.bundle_items(b).iter().fold((0u16, 0u16), |(l, h), &i| {
                let m = self.x2f[i as usize];
                (l + m.lo, h + m.hi)
            });
            store(&mut self.f2z[b], BoundPair::new(lo, hi), &mut changed);
        }
        changed
    }

    /// Bundle value to bundle-level test: the other tests' messages and the
    /// summed item bounds, combined.
    pub fn update_z_to_cz(&mut self, g: &DecoderGraph) -> Result<bool> {
        let q = g.q as u16;
        let mut changed = false;
        for b in 0..g.n_h {
            let edges = g.bundle_edges(b);
            let mut lo_max = TopTwo::new(0);
            // minima via maxima of q - hi
            let mut hi_min = TopTwo::new(0);
            for &e in edges {
                let m = self.c2z[e as usize];
                lo_max.push(m.lo);
                hi_min.push(q - m.hi);
            }
            let f = self.f2z[b];
            for &e in edges {
                let e = e as usize;
                let m = self.c2z[e];
                let lo = lo_max.without(m.lo).max(f.lo);
                let hi = (q - hi_min.without(q - m.hi)).min(f.hi);
                let v = interval(lo as i64, hi as i64, q as i64, || format!("bundle {b}"))?;
                store(&mut self.z2c[e], v, &mut changed);
            }
        }
        Ok(changed)
    }

    /// Final item bounds: all item-level test messages and the bundle message.
    pub fn item_bounds(&self, g: &DecoderGraph) -> Vec<BoundPair> {
        (0..g.n)
            .map(|i| {
                let f = self.f2x[i];
                let (mut lo, mut hi) = (f.lo, f.hi);
                for &e in g.item_edges(i) {
                    let m = self.c2x[e as usize];
                    lo = lo.max(m.lo);
                    hi = hi.min(m.hi);
                }
                BoundPair::new(lo, hi)
            })
            .collect()
    }

    /// Final bundle bounds: all bundle-level test messages and the item sums.
    pub fn bundle_bounds(&self, g: &DecoderGraph) -> Vec<BoundPair> {
        (0..g.n_h)
            .map(|b| {
                let f = self.f2z[b];
                let (mut lo, mut hi) = (f.lo, f.hi);
                for &e in g.bundle_edges(b) {
                    let m = self.c2z[e as usize];
                    lo = lo.max(m.lo);
                    hi = hi.min(m.hi);
                }
                BoundPair::new(lo, hi)
            })
            .collect()
    }
}
