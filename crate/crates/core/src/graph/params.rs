use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a regular q-bundle ensemble, with every derived count.
///
/// Items are grouped into `n_h = n / q` bundles. Each item takes part in
/// `d_vx` item-level tests (CN_x) and, through its bundle, in `d_vz`
/// bundle-level tests (CN_z). Every test covers `d_c` items; a bundle-level
/// test does so through `d_cz = d_c / q` whole bundles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GtParams {
    pub n: usize,
    pub q: usize,
    pub d_v: usize,
    pub d_vx: usize,
    pub d_vz: usize,
    pub d_c: usize,
    pub d_cz: usize,
    pub m_x: usize,
    pub m_z: usize,
    pub n_h: usize,
}

impl GtParams {
    /// Validates `(n, q, d_v, d_vx, d_c)` and derives the remaining counts.
    pub fn derive(n: usize, q: usize, d_v: usize, d_vx: usize, d_c: usize) -> Result<Self> {
        for (name, v) in [("n", n), ("q", q), ("d_v", d_v), ("d_vx", d_vx), ("d_c", d_c)] {
            if v == 0 {
                return Err(Error::InvalidParam(format!("{name} must be positive")));
            }
        }
        if d_vx > d_v {
            return Err(Error::InvalidParam(format!(
                "d_vx = {d_vx} exceeds d_v = {d_v}"
            )));
        }
        if !d_c.is_multiple_of(q) {
            return Err(Error::Divisibility(format!(
                "q = {q} must divide d_c = {d_c}"
            )));
        }
        if !n.is_multiple_of(q) {
            return Err(Error::Divisibility(format!("q = {q} must divide n = {n}")));
        }
        if !(n * d_vx).is_multiple_of(d_c) {
            return Err(Error::Divisibility(format!(
                "d_c = {d_c} must divide n * d_vx = {}",
                n * d_vx
            )));
        }
        let d_vz = d_v - d_vx;
        let d_cz = d_c / q;
        let n_h = n / q;
        if !(n_h * d_vz).is_multiple_of(d_cz) {
            return Err(Error::Divisibility(format!(
                "d_cz = {d_cz} must divide n_h * d_vz = {}",
                n_h * d_vz
            )));
        }
        let p = GtParams {
            n,
            q,
            d_v,
            d_vx,
            d_vz,
            d_c,
            d_cz,
            m_x: n * d_vx / d_c,
            m_z: n_h * d_vz / d_cz,
            n_h,
        };
        if p.d_c > p.n {
            return Err(Error::InvalidParam(format!(
                "d_c = {d_c} exceeds the number of items n = {n}"
            )));
        }
        if p.d_vz > 0 && p.d_cz > p.n_h {
            return Err(Error::InvalidParam(format!(
                "d_cz = {} exceeds the number of bundles n_h = {}",
                p.d_cz, p.n_h
            )));
        }
        Ok(p)
    }

    /// Checks that a deserialized parameter set is internally consistent.
    pub fn check(&self) -> Result<()> {
        let fresh = Self::derive(self.n, self.q, self.d_v, self.d_vx, self.d_c)?;
        if fresh != *self {
            return Err(Error::Malformed(
                "derived counts do not match (n, q, d_v, d_vx, d_c)".into(),
            ));
        }
        Ok(())
    }

    /// Total number of tests.
    pub fn m(&self) -> usize {
        self.m_x + self.m_z
    }

    /// Rate m/n as an exact fraction `(m, n)`.
    pub fn omega_ratio(&self) -> (usize, usize) {
        (self.m(), self.n)
    }

    /// Rate m/n as a float (not in percent).
    pub fn omega(&self) -> f64 {
        self.m() as f64 / self.n as f64
    }

    /// Number of item-level test edges.
    pub fn x_edges(&self) -> usize {
        self.n * self.d_vx
    }

    /// Number of bundle-level test edges.
    pub fn z_edges(&self) -> usize {
        self.n_h * self.d_vz
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_example_counts() {
        let p = GtParams::derive(8, 2, 3, 1, 4).unwrap();
        assert_eq!((p.d_vz, p.d_cz, p.n_h, p.m_z, p.m_x), (2, 2, 4, 4, 2));
        assert_eq!(p.m(), 6);
    }

    #[test]
    fn large_ensemble_rate() {
        let p = GtParams::derive(210_000, 5, 7, 2, 140).unwrap();
        assert_eq!(p.m(), 10_500);
        assert_eq!(p.omega_ratio(), (10_500, 210_000));
        assert!((p.omega() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn bundle_size_must_divide_test_degree() {
        let err = GtParams::derive(8, 3, 3, 1, 4).unwrap_err();
        assert!(matches!(err, Error::Divisibility(ref m) if m.contains("d_c")), "{err}");
    }

    #[test]
    fn other_divisibility_failures_name_the_constraint() {
        let e = GtParams::derive(9, 2, 3, 1, 4).unwrap_err();
        assert!(e.to_string().contains("divide n"), "{e}");
        let e = GtParams::derive(10, 2, 3, 1, 4).unwrap_err();
        assert!(e.to_string().contains("n * d_vx"), "{e}");
        // n_h * d_vz = 10 * 1 while d_cz = 4
        let e = GtParams::derive(40, 4, 3, 2, 16).unwrap_err();
        assert!(e.to_string().contains("n_h * d_vz"), "{e}");
    }

    #[test]
    fn zero_and_range_checks() {
        assert!(matches!(
            GtParams::derive(8, 2, 3, 0, 4),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            GtParams::derive(8, 2, 3, 4, 4),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn q_one_without_bundle_tests() {
        let p = GtParams::derive(240, 1, 6, 6, 120).unwrap();
        assert_eq!((p.d_vz, p.m_z, p.m_x), (0, 0, 12));
    }
}
