use crate::error::{Error, Result};

/// Mean close over days `i - n + 1 ..= i`.
pub fn moving_average(closes: &[f64], n: usize, i: usize) -> Result<f64> {
    if n == 0 || i + 1 < n {
        return Err(Error::InsufficientHistory {
            needed: n.saturating_sub(1),
            index: i,
        });
    }
    if i >= closes.len() {
        return Err(Error::invalid("day", format!("index {i} past end of {} closes", closes.len())));
    }
    Ok(closes[i + 1 - n..=i].iter().sum::<f64>() / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Up,
    Down,
}

/// Sign of `MA(n, i) - MA(n, i - n)`; a flat slope counts as up.
pub fn ma_trend(closes: &[f64], n: usize, i: usize) -> Result<Trend> {
    if i + 1 < 2 * n {
        return Err(Error::InsufficientHistory {
            needed: 2 * n - 1,
            index: i,
        });
    }
    let slope = moving_average(closes, n, i)? - moving_average(closes, n, i - n)?;
    Ok(if slope >= 0.0 { Trend::Up } else { Trend::Down })
}

/// Number of strict increases among the last `n` daily changes ending at `i`.
pub fn up_moves(closes: &[f64], n: usize, i: usize) -> Result<usize> {
    if n == 0 || i < n {
        return Err(Error::InsufficientHistory { needed: n, index: i });
    }
    if i >= closes.len() {
        return Err(Error::invalid("day", format!("index {i} past end of {} closes", closes.len())));
    }
    Ok((i + 1 - n..=i).filter(|&k| closes[k] > closes[k - 1]).count())
}

/// Fraction of up-days among the last `n` changes, in [0, 1].
pub fn psych_line(closes: &[f64], n: usize, i: usize) -> Result<f64> {
    Ok(up_moves(closes, n, i)? as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moving_average_examples() {
        assert_eq!(moving_average(&[7.0; 10], 4, 9).unwrap(), 7.0);
        let c = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(moving_average(&c, 5, 4).unwrap(), 3.0);
        assert!(moving_average(&c, 5, 3).is_err());
    }

    #[test]
    fn moving_average_telescopes() {
        let c: Vec<f64> = (0..30).map(|k| ((k * 13 % 7) as f64) + 100.0).collect();
        for i in 5..29 {
            let d = moving_average(&c, 6, i + 1).unwrap() - moving_average(&c, 6, i).unwrap();
            assert!((d - (c[i + 1] - c[i + 1 - 6]) / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trend_examples() {
        let up: Vec<f64> = (0..20).map(|k| 100.0 + k as f64).collect();
        let down: Vec<f64> = up.iter().rev().cloned().collect();
        assert_eq!(ma_trend(&up, 5, 19).unwrap(), Trend::Up);
        assert_eq!(ma_trend(&down, 5, 19).unwrap(), Trend::Down);
        assert_eq!(ma_trend(&[50.0; 20], 5, 19).unwrap(), Trend::Up);
        assert!(ma_trend(&up, 5, 8).is_err());
        assert!(ma_trend(&up, 5, 9).is_ok());
    }

    #[test]
    fn psych_line_examples() {
        let up: Vec<f64> = (0..20).map(|k| k as f64).collect();
        let down: Vec<f64> = up.iter().rev().cloned().collect();
        assert_eq!(psych_line(&up, 9, 19).unwrap(), 1.0);
        assert_eq!(psych_line(&down, 9, 19).unwrap(), 0.0);
        // changes: + - + - + - + + -, five ups in nine
        let c = [10.0, 11.0, 10.0, 11.0, 10.0, 11.0, 10.0, 11.0, 12.0, 11.0];
        assert_eq!(up_moves(&c, 9, 9).unwrap(), 5);
        assert_eq!(psych_line(&c, 9, 9).unwrap(), 5.0 / 9.0);
        assert!(psych_line(&c, 9, 8).is_err());
        // unchanged closes are not increases
        assert_eq!(up_moves(&[1.0, 1.0, 1.0], 2, 2).unwrap(), 0);
    }
}
