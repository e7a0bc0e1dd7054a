//! Binomial helpers evaluated in log space.

/// `ln k!` for `k = 0..=n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(acc);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Full pmf of `Bino(n, p)`.
pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    if p <= 0.0 {
        return super::pmf::delta(n + 1, 0);
    }
    if p >= 1.0 {
        return super::pmf::delta(n + 1, n);
    }
    let lf = ln_factorials(n);
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    (0..=n)
        .map(|k| (lf[n] - lf[k] - lf[n - k] + k as f64 * lp + (n - k) as f64 * lq).exp())
        .collect()
}

/// Smallest `s` such that `P(S > s) < eps` for `S ~ Bino(d_c, gamma)`.
///
/// Syndromes above this value are dropped from the test-bundle average.
pub fn syndrome_cutoff(d_c: usize, gamma: f64, eps: f64) -> usize {
    let pmf = binomial_pmf(d_c, gamma);
    // tail = P(S > s), accumulated from the top so it stays accurate.
    let mut tails = vec![0.0; d_c + 1];
    for s in (0..d_c).rev() {
        tails[s] = tails[s + 1] + pmf[s + 1];
    }
    tails.iter().position(|&t| t < eps).unwrap_or(d_c)
}
