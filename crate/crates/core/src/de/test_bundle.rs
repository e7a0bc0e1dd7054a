//! Test-to-bundle messages by enumeration of bundle-value multisets.

use super::binom::{binomial_pmf, ln_factorials};
use super::pmf::convolve_truncated;
use super::{Averaging, CondPmf};

/// One enumerated realization of the other bundles of a test.
#[derive(Debug, Clone)]
struct Term {
    /// Target value this term scores, or every value when `None`.
    target: Option<usize>,
    /// Nonzero values of the other bundles.
    others: Vec<usize>,
    /// Number of other bundles with value zero.
    zeros: usize,
    weight: f64,
}

/// Enumeration of bundle-value realizations for one ensemble and defect
/// probability. Built once per DE run and applied every iteration.
#[derive(Debug, Clone)]
pub struct TestBundleTable {
    q: usize,
    s_max: usize,
    terms: Vec<Term>,
    /// Enumerated probability mass per target value.
    covered: Vec<f64>,
    /// Divisor turning accumulated mass into a conditional pmf.
    norm: Vec<f64>,
    max_zeros: usize,
}

/// Calls `visit` on every nonincreasing list of values in `1..=max_v` with
/// at most `slots` entries and sum at most `budget`, including the empty one.
fn multisets(
    allowed: &[bool],
    max_v: usize,
    slots: usize,
    budget: usize,
    current: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    visit(current);
    if slots == 0 {
        return;
    }
    for v in (1..=max_v.min(budget)).rev() {
        if !allowed[v] {
            continue;
        }
        current.push(v);
        multisets(allowed, v, slots - 1, budget - v, current, visit);
        current.pop();
    }
}

impl TestBundleTable {
    pub fn new(q: usize, d_cz: usize, gamma: f64, s_max: usize, averaging: Averaging) -> Self {
        let p = binomial_pmf(q, gamma);
        let lp: Vec<f64> = p.iter().map(|x| x.ln()).collect();
        let allowed: Vec<bool> = p.iter().map(|&x| x > 0.0).collect();
        let slots = match averaging {
            Averaging::Conditional => d_cz - 1,
            Averaging::DistinctValue => d_cz,
        };
        let lf = ln_factorials(slots);
        let mut terms = Vec::new();
        let mut covered = vec![0.0; q + 1];

        let log_weight = |values: &[usize]| -> f64 {
            let zeros = slots - values.len();
            let mut lw = lf[slots] - lf[zeros] + zeros as f64 * lp[0];
            let mut i = 0;
            while i < values.len() {
                let run = values[i..].iter().take_while(|&&v| v == values[i]).count();
                lw += run as f64 * lp[values[i]] - lf[run];
                i += run;
            }
            lw
        };

        let mut visit = |values: &[usize]| {
            let zeros = slots - values.len();
            if zeros > 0 && !allowed[0] {
                return;
            }
            let weight = log_weight(values).exp();
            if weight == 0.0 {
                return;
            }
            match averaging {
                Averaging::Conditional => {
                    covered.iter_mut().for_each(|c| *c += weight);
                    terms.push(Term {
                        target: None,
                        others: values.to_vec(),
                        zeros,
                        weight,
                    });
                }
                Averaging::DistinctValue => {
                    if zeros > 0 {
                        covered[0] += weight;
                        terms.push(Term {
                            target: Some(0),
                            others: values.to_vec(),
                            zeros: zeros - 1,
                            weight,
                        });
                    }
                    let mut prev = None;
                    for (i, &v) in values.iter().enumerate() {
                        if prev == Some(v) {
                            continue;
                        }
                        prev = Some(v);
                        let mut others = values.to_vec();
                        others.remove(i);
                        covered[v] += weight;
                        terms.push(Term {
                            target: Some(v),
                            others,
                            zeros,
                            weight,
                        });
                    }
                }
            }
        };
        multisets(&allowed, q, slots, s_max, &mut Vec::new(), &mut visit);

        let norm = match averaging {
            Averaging::Conditional => vec![1.0; q + 1],
            Averaging::DistinctValue => covered.clone(),
        };
        let max_zeros = terms.iter().map(|t| t.zeros).max().unwrap_or(0);
        Self {
            q,
            s_max,
            terms,
            covered,
            norm,
            max_zeros,
        }
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    /// Number of (realization, target) pairs scored per application.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Fraction of the averaging law captured for target value `z`. The
    /// rest is assigned to the uninformative message.
    pub fn captured(&self, z: usize) -> f64 {
        if self.norm[z] > 0.0 {
            (self.covered[z] / self.norm[z]).min(1.0)
        } else {
            0.0
        }
    }

    /// Computes test-to-bundle lower and upper pmfs from bundle-to-test pmfs.
    pub fn apply(&self, z2c_lo: &CondPmf, z2c_hi: &CondPmf) -> (CondPmf, CondPmf) {
        let q = self.q;
        let len = self.s_max + q + 1;
        let powers = |row: &[f64]| {
            let mut out = vec![vec![1.0]];
            for k in 1..=self.max_zeros {
                let next = convolve_truncated(&out[k - 1], row, len);
                out.push(next);
            }
            out
        };
        let (pow_lo, pow_hi) = (powers(z2c_lo.row(0)), powers(z2c_hi.row(0)));
        let mut lo = vec![vec![0.0; q + 1]; q + 1];
        let mut hi = vec![vec![0.0; q + 1]; q + 1];

        for t in &self.terms {
            let mut sl = pow_lo[t.zeros].clone();
            let mut su = pow_hi[t.zeros].clone();
            for &v in &t.others {
                sl = convolve_truncated(&sl, z2c_lo.row(v), len);
                su = convolve_truncated(&su, z2c_hi.row(v), len);
            }
            let at = |p: &[f64], k: usize| p.get(k).copied().unwrap_or(0.0);
            let rest: usize = t.others.iter().sum();
            let targets = match t.target {
                Some(z) => z..=z,
                None => 0..=q,
            };
            for z in targets {
                let s = z + rest;
                let w = t.weight;
                // L = s - sum of the others' upper bounds, clamped at 0.
                let below: f64 = su.iter().take(s).sum();
                lo[z][0] += w * (1.0 - below).max(0.0);
                for (i, l) in lo[z].iter_mut().enumerate().take(z.min(s) + 1).skip(1) {
                    *l += w * at(&su, s - i);
                }
                // U = s - sum of the others' lower bounds, clamped at q.
                if s >= q {
                    hi[z][q] += w * sl.iter().take(s - q + 1).sum::<f64>();
                }
                for (i, h) in hi[z].iter_mut().enumerate().take(q.min(s + 1)).skip(z) {
                    *h += w * at(&sl, s - i);
                }
            }
        }

        for z in 0..=q {
            let captured = self.captured(z);
            for v in 0..=q {
                if self.norm[z] > 0.0 {
                    lo[z][v] /= self.norm[z];
                    hi[z][v] /= self.norm[z];
                }
            }
            lo[z][0] += 1.0 - captured;
            hi[z][q] += 1.0 - captured;
        }
        let mut lo = CondPmf::from_rows(lo).expect("square table");
        let mut hi = CondPmf::from_rows(hi).expect("square table");
        lo.normalize();
        hi.normalize();
        (lo, hi)
    }
}
