//! Operations on probability mass functions over `{0, 1, ..., len-1}`.

/// Point mass at `at` on a support of size `len`.
pub fn delta(len: usize, at: usize) -> Vec<f64> {
    let mut p = vec![0.0; len];
    p[at] = 1.0;
    p
}

/// Law of the sum of two independent variables.
pub fn pmf_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    convolve_truncated(a, b, a.len() + b.len() - 1)
}

/// Convolution keeping only the first `len` entries.
pub(crate) fn convolve_truncated(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len.min(a.len() + b.len() - 1)];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 || i >= out.len() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(out.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn cdf(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|&x| {
            acc += x;
            acc
        })
        .collect()
}

/// `sf[y] = P(X >= y)`, summed from the top to keep small tails accurate.
fn survival(p: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; p.len() + 1];
    for y in (0..p.len()).rev() {
        s[y] = s[y + 1] + p[y];
    }
    s
}

fn padded(p: &[f64], len: usize) -> Vec<f64> {
    let mut v = p.to_vec();
    v.resize(len, 0.0);
    v
}

/// Law of `max(A, B)` for independent `A ~ a`, `B ~ b`.
pub fn pmf_max2(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len().max(b.len());
    let (a, b) = (padded(a, len), padded(b, len));
    let (fa, fb) = (cdf(&a), cdf(&b));
    (0..len)
        .map(|i| {
            let fa_prev = if i > 0 { fa[i - 1] } else { 0.0 };
            a[i] * fb[i] + fa_prev * b[i]
        })
        .collect()
}

/// Law of `min(A, B)` for independent `A ~ a`, `B ~ b`.
pub fn pmf_min2(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len().max(b.len());
    let (a, b) = (padded(a, len), padded(b, len));
    let (sa, sb) = (survival(&a), survival(&b));
    (0..len).map(|i| a[i] * sb[i] + sa[i + 1] * b[i]).collect()
}

/// Law of the maximum of `k` i.i.d. draws. `k = 0` gives a point mass at 0.
pub fn order_stat_max(p: &[f64], k: usize) -> Vec<f64> {
    if k == 0 {
        return delta(p.len(), 0);
    }
    let f = cdf(p);
    let k = k as i32;
    (0..p.len())
        .map(|y| {
            let prev = if y > 0 { f[y - 1].powi(k) } else { 0.0 };
            (f[y].powi(k) - prev).max(0.0)
        })
        .collect()
}

/// Law of the minimum of `k` i.i.d. draws. `k = 0` gives a point mass at
/// the top of the support.
pub fn order_stat_min(p: &[f64], k: usize) -> Vec<f64> {
    if k == 0 {
        return delta(p.len(), p.len() - 1);
    }
    let s = survival(p);
    let k = k as i32;
    (0..p.len())
        .map(|y| (s[y].powi(k) - s[y + 1].powi(k)).max(0.0))
        .collect()
}

/// Rescales to unit mass. A zero vector is left unchanged.
pub(crate) fn normalize(p: &mut [f64]) {
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        p.iter_mut().for_each(|x| *x /= total);
    }
}
