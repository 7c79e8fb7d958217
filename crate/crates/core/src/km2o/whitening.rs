use crate::error::{Error, Result};

use super::{Km2oSystem, Mat2, StandardizedPair, Vec2};

/// Lower-triangular `W` with `W W^T = v`, written out for the 2x2 case.
pub fn whitening_factor(v: &Mat2) -> Option<Mat2> {
    let (v11, v12, v22) = (v[(0, 0)], v[(0, 1)], v[(1, 1)]);
    let det = v11 * v22 - v12 * v12;
    if !(v11 > 0.0) || !(det > 0.0) {
        return None;
    }
    let s11 = v11.sqrt();
    Some(Mat2::new(s11, 0.0, v12 / s11, det.sqrt() / s11))
}

/// `nu(n) = Z(n) + sum_{k<n} gamma_fwd(n, k) Z(k)` over one piece.
pub fn fluctuations(piece: &[Vec2], sys: &Km2oSystem) -> Vec<Vec2> {
    assert!(piece.len() <= sys.order() + 1, "piece longer than the system order allows");
    (0..piece.len())
        .map(|n| {
            sys.gamma_fwd_row(n)
                .iter()
                .zip(piece)
                .fold(piece[n], |acc, (g, z)| acc + g * z)
        })
        .collect()
}

/// Flattened whitened pieces `xi^(s)`, one per starting offset `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhitenedPieces {
    piece_len: usize,
    data: Vec<f64>,
}

impl WhitenedPieces {
    /// Number of time points `M + 1` per piece; each flattened piece has
    /// twice as many values.
    pub fn piece_len(&self) -> usize {
        self.piece_len
    }

    pub fn count(&self) -> usize {
        self.data.len() / (2 * self.piece_len)
    }

    pub fn get(&self, s: usize) -> &[f64] {
        let w = 2 * self.piece_len;
        &self.data[s * w..(s + 1) * w]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(2 * self.piece_len)
    }
}

/// Whitens every length-`M + 1` piece of `z` with the global system of
/// order `M`, flattening as `(xi_1(0), xi_2(0), xi_1(1), ...)`.
pub fn extract_pieces(z: &StandardizedPair, sys: &Km2oSystem) -> Result<WhitenedPieces> {
    if sys.is_degenerate() {
        return Err(Error::Degenerate("KM2O system is degenerate".into()));
    }
    let order = sys.order();
    let piece_len = order + 1;
    if z.len() < piece_len {
        return Err(Error::invalid(
            "order",
            format!("series of length {} is shorter than one piece of {piece_len}", z.len()),
        ));
    }
    // W(n)^-1 once per order
    let inv: Vec<Mat2> = (0..piece_len)
        .map(|n| {
            whitening_factor(&sys.v_fwd(n))
                .and_then(|w| w.try_inverse())
                .ok_or_else(|| Error::Degenerate(format!("V_+({n}) is not positive definite")))
        })
        .collect::<Result<_>>()?;

    let count = z.len() - order;
    let mut data = Vec::with_capacity(count * 2 * piece_len);
    for s in 0..count {
        let piece = &z.samples[s..s + piece_len];
        for (nu, w_inv) in fluctuations(piece, sys).iter().zip(&inv) {
            let xi = w_inv * nu;
            data.push(xi[0]);
            data.push(xi[1]);
        }
    }
    Ok(WhitenedPieces { piece_len, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::km2o::{levinson, CovSequence};
    use approx::assert_abs_diff_eq;

    #[test]
    fn hand_factorization() {
        let v = Mat2::new(4.0, 2.0, 2.0, 5.0);
        let w = whitening_factor(&v).unwrap();
        assert_eq!(w, Mat2::new(2.0, 0.0, 1.0, 2.0));
        assert_eq!(w * w.transpose(), v);
    }

    #[test]
    fn factor_rejects_non_pd() {
        assert!(whitening_factor(&Mat2::new(0.0, 0.0, 0.0, 1.0)).is_none());
        assert!(whitening_factor(&Mat2::new(1.0, 1.0, 1.0, 1.0)).is_none());
    }

    fn white_system(order: usize) -> Km2oSystem {
        let mut lags = vec![Mat2::identity()];
        lags.extend(std::iter::repeat(Mat2::zeros()).take(order));
        levinson(&CovSequence::new(lags, 100), order)
    }

    #[test]
    fn identity_whitening_flattens_pieces() {
        let samples: Vec<Vec2> = (0..10).map(|k| Vec2::new(k as f64, -(k as f64) * 0.5)).collect();
        let z = StandardizedPair { samples: samples.clone() };
        let pieces = extract_pieces(&z, &white_system(3)).unwrap();
        assert_eq!(pieces.count(), 7);
        for s in 0..pieces.count() {
            let expect: Vec<f64> = samples[s..s + 4].iter().flat_map(|v| [v[0], v[1]]).collect();
            assert_eq!(pieces.get(s), expect.as_slice());
        }
    }

    #[test]
    fn piece_count_is_len_minus_order() {
        let z = StandardizedPair {
            samples: (0..101).map(|k| Vec2::new((k as f64).sin(), (k as f64).cos())).collect(),
        };
        let pieces = extract_pieces(&z, &white_system(14)).unwrap();
        assert_eq!(pieces.count(), 87);
        assert_eq!(pieces.get(0).len(), 30);
    }

    #[test]
    fn first_fluctuation_is_the_sample() {
        let shape = Mat2::new(0.6, 0.1, -0.2, 0.4);
        let mut lags = vec![Mat2::new(1.0, 0.2, 0.2, 1.0)];
        lags.extend((1..5).map(|n| shape * 0.3 * 0.7f64.powi(n)));
        let sys = levinson(&CovSequence::new(lags, 50), 4);
        assert!(!sys.is_degenerate());
        let piece: Vec<Vec2> = (0..5).map(|k| Vec2::new(0.3 * k as f64 - 0.4, 1.1 - 0.2 * k as f64)).collect();
        let nu = fluctuations(&piece, &sys);
        assert_eq!(nu[0], piece[0]);
        // nu(1) = Z(1) + gamma(1, 0) Z(0)
        let expect = piece[1] + sys.gamma_fwd(1, 0) * piece[0];
        assert_abs_diff_eq!(nu[1][0], expect[0], epsilon = 1e-15);
        assert_abs_diff_eq!(nu[1][1], expect[1], epsilon = 1e-15);
    }
}
