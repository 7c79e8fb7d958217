//! White-noise criteria applied to one flattened whitened piece.

use std::fmt;
use std::str::FromStr;

/// Two-sided 5% normal quantile used by the mean criterion.
pub const MEAN_BOUND: f64 = 1.96;
/// Bound on the studentized sum of `xi^2 - 1`.
pub const VARIANCE_BOUND: f64 = 2.2414;
/// Per-lag bound of the orthogonality statistic.
pub const ORTHOGONALITY_BOUND: f64 = 1.96;
/// Fraction of lag pairs that must satisfy the orthogonality bound.
pub const ORTHOGONALITY_RATE: f64 = 0.90;

/// `sqrt(len) * |mean(xi)| < 1.96`. With `len = 2(M+1)` this is the
/// standardized sample mean.
pub fn criterion_mean(xi: &[f64]) -> bool {
    let len = xi.len() as f64;
    let mean = xi.iter().sum::<f64>() / len;
    len.sqrt() * mean.abs() < MEAN_BOUND
}

/// `|sum(xi^2 - 1) / sqrt(sum((xi^2 - 1)^2))| < 2.2414`; a zero denominator
/// (every `xi^2` exactly 1) passes.
pub fn criterion_variance(xi: &[f64]) -> bool {
    let (sum, sum_sq) = xi.iter().fold((0.0, 0.0), |(s, q), x| {
        let e = x * x - 1.0;
        (s + e, q + e * e)
    });
    if sum_sq == 0.0 {
        return true;
    }
    (sum / sum_sq.sqrt()).abs() < VARIANCE_BOUND
}

/// How the two block counts combine into the orthogonality denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrthogonalityMode {
    /// `sqrt(L1) + sqrt(L2)`.
    #[default]
    Sum,
    /// `|sqrt(L1) - sqrt(L2)|`, with near-zero denominators left out of the rate.
    Literal,
}

impl fmt::Display for OrthogonalityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrthogonalityMode::Sum => "sum",
            OrthogonalityMode::Literal => "literal",
        })
    }
}

impl FromStr for OrthogonalityMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(OrthogonalityMode::Sum),
            "literal" => Ok(OrthogonalityMode::Literal),
            other => Err(format!("expected `sum` or `literal`, got `{other}`")),
        }
    }
}

/// Block counts `(L1, L2)` of the lag-`n` products `xi(k) xi(k+n)`,
/// `k = m..len-n`, split by alternating blocks of length `n`.
///
/// With `len - 1 = q(2n) + r` and `m = u(2n) + t`, the branch on `r` uses
/// `0 <= r <= n` and `n+1 <= r <= 2n-1`. `L1 + L2` always equals the number
/// of products `len - n - m`.
pub fn block_counts(len: usize, n: usize, m: usize) -> (i64, i64) {
    assert!(n >= 1 && m + n < len, "need n >= 1 and m + n < len");
    let (len, n, m) = (len as i64, n as i64, m as i64);
    let (q, r) = ((len - 1) / (2 * n), (len - 1) % (2 * n));
    let (u, t) = (m / (2 * n), m % (2 * n));
    let low_t = t < n;
    if r <= n {
        if low_t {
            (n * (q + u) - m, n * (q - u - 1) + r + 1)
        } else {
            (n * (q - u - 1), n * (q + u) + r + 1 - m)
        }
    } else if low_t {
        (n * (q + u - 1) + r + 1 - m, n * (q - u))
    } else {
        (n * (q - u - 2) + r + 1, n * (q + u + 1) - m)
    }
}

/// `floor(3 sqrt(len))`, capped so every lag pair has at least one product.
pub fn default_lag_budget(len: usize) -> usize {
    let budget = (3.0 * (len as f64).sqrt()).floor() as usize;
    budget.clamp(1, len.saturating_sub(1).max(1))
}

/// Fraction of lag pairs `(n, m)`, `1 <= n <= L`, `0 <= m <= L - n`, whose
/// statistic `len |R(n, m)| / D` stays under 1.96, where
/// `R(n, m) = (1/len) sum_{k=m}^{len-1-n} xi(k) xi(k+n)`.
///
/// `None` when every pair was excluded (literal mode only).
pub fn orthogonality_rate(xi: &[f64], lag_budget: usize, mode: OrthogonalityMode) -> Option<f64> {
    let len = xi.len();
    assert!(lag_budget >= 1 && lag_budget < len, "lag budget must lie in 1..len");
    let mut satisfied = 0usize;
    let mut counted = 0usize;
    let mut products = Vec::with_capacity(len);
    for n in 1..=lag_budget {
        products.clear();
        products.extend((0..len - n).map(|k| xi[k] * xi[k + n]));
        // len * R(n, m) is the tail sum of products from m
        let mut tail: f64 = products.iter().sum();
        for m in 0..=lag_budget - n {
            if m > 0 {
                tail -= products[m - 1];
            }
            let (l1, l2) = block_counts(len, n, m);
            let (s1, s2) = ((l1.max(0) as f64).sqrt(), (l2.max(0) as f64).sqrt());
            let denom = match mode {
                OrthogonalityMode::Sum => s1 + s2,
                OrthogonalityMode::Literal => (s1 - s2).abs(),
            };
            if denom < 1e-9 {
                continue;
            }
            counted += 1;
            if tail.abs() / denom < ORTHOGONALITY_BOUND {
                satisfied += 1;
            }
        }
    }
    (counted > 0).then(|| satisfied as f64 / counted as f64)
}

/// Passes when more than 90% of the lag pairs are satisfied.
pub fn criterion_orthogonality(xi: &[f64], lag_budget: usize, mode: OrthogonalityMode) -> bool {
    orthogonality_rate(xi, lag_budget, mode).is_some_and(|rate| rate > ORTHOGONALITY_RATE)
}
