//! Log-returns, normalized windows, the 19 nonlinear transforms and the
//! 171 two-channel pair series built from them.

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::market_data::PriceSeries;

/// Default window length; each window holds `N + 1` log-returns.
pub const DEFAULT_WINDOW: usize = 100;

pub const TRANSFORM_COUNT: usize = 19;

/// C(19, 2).
pub const PAIR_COUNT: usize = TRANSFORM_COUNT * (TRANSFORM_COUNT - 1) / 2;

/// Daily log-returns. `values[k]` belongs to the date of price `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CcrSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl CcrSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn to_ccr(prices: &PriceSeries) -> CcrSeries {
    let pts = prices.points();
    let values = pts.windows(2).map(|w| w[1].close.ln() - w[0].close.ln()).collect();
    let dates = pts[1..].iter().map(|p| p.date).collect();
    CcrSeries { dates, values }
}

/// The `window + 1` values `x(i - N), ..., x(i)` ending at `anchor`.
pub fn cut_window(ccr: &[f64], anchor: usize, window: usize) -> Result<&[f64]> {
    if anchor < window {
        return Err(Error::InsufficientHistory {
            needed: window,
            index: anchor,
        });
    }
    if anchor >= ccr.len() {
        return Err(Error::invalid(
            "anchor",
            format!("index {anchor} is past the end of a series of length {}", ccr.len()),
        ));
    }
    Ok(&ccr[anchor - window..=anchor])
}

/// A window rescaled to mean 0 and variance 1, both with denominator `N + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWindow {
    values: Vec<f64>,
}

impl NormalizedWindow {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Window length `N` (one less than the number of values).
    pub fn window(&self) -> usize {
        self.values.len() - 1
    }

    /// Wraps values without rescaling. Used to probe the transform algebra
    /// on inputs that are not themselves normalized.
    pub fn from_raw(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "window must be non-empty");
        Self { values }
    }
}

/// Centers and scales a raw window. A constant window is degenerate.
pub fn normalize(raw: &[f64]) -> Result<NormalizedWindow> {
    if raw.is_empty() {
        return Err(Error::DegenerateWindow);
    }
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let var = raw.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let scale = raw.iter().map(|x| x * x).sum::<f64>() / n;
    if !(var > 1e-24 * scale) || !var.is_finite() {
        return Err(Error::DegenerateWindow);
    }
    let sd = var.sqrt();
    Ok(NormalizedWindow {
        values: raw.iter().map(|x| (x - mean) / sd).collect(),
    })
}

/// Monomials in lagged values: `(lag, exponent)` factors evaluated at n.
const TRANSFORMS: [&[(usize, i32)]; TRANSFORM_COUNT] = [
    &[(0, 1)],
    &[(0, 2)],
    &[(0, 3)],
    &[(0, 1), (1, 1)],
    &[(0, 4)],
    &[(0, 2), (1, 1)],
    &[(0, 1), (2, 1)],
    &[(0, 5)],
    &[(0, 3), (1, 1)],
    &[(0, 2), (2, 1)],
    &[(0, 1), (1, 2)],
    &[(0, 1), (3, 1)],
    &[(0, 6)],
    &[(0, 4), (1, 1)],
    &[(0, 3), (2, 1)],
    &[(0, 2), (1, 2)],
    &[(0, 2), (3, 1)],
    &[(0, 1), (1, 1), (2, 1)],
    &[(0, 1), (4, 1)],
];

/// First valid index of each transform (its largest lag).
pub const OFFSETS: [usize; TRANSFORM_COUNT] = [0, 0, 0, 1, 0, 1, 2, 0, 1, 2, 1, 3, 0, 1, 2, 1, 3, 2, 4];

/// Total polynomial degree of transform `k`.
pub fn transform_degree(k: usize) -> i32 {
    TRANSFORMS[k].iter().map(|&(_, e)| e).sum()
}

/// One transformed sequence; `values[j]` is the value at `n = offset + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub offset: usize,
    pub values: Vec<f64>,
}

pub fn apply_transforms(w: &NormalizedWindow) -> Vec<Component> {
    let x = w.values();
    TRANSFORMS
        .iter()
        .zip(OFFSETS)
        .map(|(factors, offset)| {
            let values = (offset..x.len())
                .map(|n| factors.iter().map(|&(lag, e)| x[n - lag].powi(e)).product())
                .collect();
            Component { offset, values }
        })
        .collect()
}

/// Two transforms aligned on their common support `n = offset..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSeries {
    pub id: (usize, usize),
    pub offset: usize,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl PairSeries {
    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    /// The same pair with its channels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            id: (self.id.1, self.id.0),
            offset: self.offset,
            first: self.second.clone(),
            second: self.first.clone(),
        }
    }
}

/// All pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn pair_ids() -> impl Iterator<Item = (usize, usize)> {
    (0..TRANSFORM_COUNT).flat_map(|i| (i + 1..TRANSFORM_COUNT).map(move |j| (i, j)))
}

pub fn build_pair(components: &[Component], i: usize, j: usize) -> PairSeries {
    let (a, b) = (&components[i], &components[j]);
    let offset = a.offset.max(b.offset);
    PairSeries {
        id: (i, j),
        offset,
        first: a.values[offset - a.offset..].to_vec(),
        second: b.values[offset - b.offset..].to_vec(),
    }
}

pub fn build_pairs(components: &[Component]) -> Vec<PairSeries> {
    assert_eq!(components.len(), TRANSFORM_COUNT, "expected 19 components");
    pair_ids().map(|(i, j)| build_pair(components, i, j)).collect()
}

/// Window → normalization → transforms → pairs, for the window ending at `anchor`.
pub fn window_pairs(ccr: &[f64], anchor: usize, window: usize) -> Result<Vec<PairSeries>> {
    let raw = cut_window(ccr, anchor, window)?;
    let w = normalize(raw)?;
    Ok(build_pairs(&apply_transforms(&w)))
}
