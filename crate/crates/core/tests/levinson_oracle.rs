//! The order recursion checked against a direct solve of the block-Toeplitz
//! normal equations.

use km2o_core::km2o::{levinson, sample_covariance, CovSequence, Mat2};
use km2o_core::transforms::PairSeries;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Exact covariance of `X(t) = sum_j theta_j e(t - j)` with unit white `e`.
fn vma_covariance(theta: &[Mat2], max_lag: usize) -> CovSequence {
    let lags = (0..=max_lag)
        .map(|m| {
            (0..theta.len())
                .filter(|j| j + m < theta.len())
                .map(|j| theta[j + m] * theta[j].transpose())
                .fold(Mat2::zeros(), |a, b| a + b)
        })
        .collect();
    CovSequence::new(lags, usize::MAX)
}

fn random_mat(rng: &mut ChaCha8Rng, scale: f64) -> Mat2 {
    Mat2::from_fn(|_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

fn random_vma(rng: &mut ChaCha8Rng, max_lag: usize) -> CovSequence {
    let q = rng.random_range(1..=6);
    let mut theta = vec![Mat2::identity() + random_mat(rng, 0.3)];
    for _ in 0..q {
        theta.push(random_mat(rng, 0.5));
    }
    vma_covariance(&theta, max_lag)
}

fn random_sample_cov(rng: &mut ChaCha8Rng, max_lag: usize) -> CovSequence {
    let len = rng.random_range(97..=101);
    let first: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    let noise: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    let rho: f64 = rng.random_range(-0.8..0.8);
    // correlated, autocorrelated second channel
    let second: Vec<f64> = (0..len)
        .map(|k| rho * first[k] + noise[k] + if k > 0 { 0.4 * noise[k - 1] } else { 0.0 })
        .collect();
    let pair = PairSeries {
        id: (0, 1),
        offset: 0,
        first,
        second,
    };
    sample_covariance(&pair, max_lag).unwrap()
}

struct Direct {
    /// `gamma(n, k)` for `k < n`.
    gamma: Vec<Mat2>,
    v: Mat2,
}

fn direct_solve(cov: &CovSequence, n: usize) -> Direct {
    if n == 0 {
        return Direct {
            gamma: vec![],
            v: cov.at(0),
        };
    }
    let mut t = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let mut r = DMatrix::<f64>::zeros(2, 2 * n);
    for k in 0..n {
        for j in 0..n {
            let b = cov.at(k as isize - j as isize);
            t.fixed_view_mut::<2, 2>(2 * k, 2 * j).copy_from(&b);
        }
        r.fixed_view_mut::<2, 2>(0, 2 * k).copy_from(&cov.at((n - k) as isize));
    }
    let t_inv = t.try_inverse().expect("block Toeplitz matrix is invertible");
    let a = &r * t_inv;
    let mut gamma = Vec::with_capacity(n);
    let mut v = cov.at(0);
    for k in 0..n {
        let ak: Mat2 = a.fixed_view::<2, 2>(0, 2 * k).into_owned();
        gamma.push(-ak);
        v += -ak * cov.at(k as isize - n as isize);
    }
    Direct { gamma, v }
}

fn max_abs(m: &Mat2) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn check_against_direct(cov: &CovSequence, order: usize, tol: f64) -> Result<(), String> {
    let sys = levinson(cov, order);
    if sys.is_degenerate() {
        return Err("recursion reported a degenerate system".into());
    }
    for n in 0..=order {
        let d = direct_solve(cov, n);
        let scale = 1.0f64.max(max_abs(&cov.at(0)));
        for k in 0..n {
            let err = max_abs(&(sys.gamma_fwd(n, k) - d.gamma[k]));
            if err > tol * scale {
                return Err(format!("gamma({n},{k}) off by {err:e}"));
            }
        }
        let err = max_abs(&(sys.v_fwd(n) - d.v));
        if err > tol * scale {
            return Err(format!("V({n}) off by {err:e}"));
        }
    }
    Ok(())
}

#[test]
fn hundred_random_covariances_match_direct_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..100 {
        let order = rng.random_range(1..=14);
        let cov = if case % 2 == 0 {
            random_vma(&mut rng, order)
        } else {
            random_sample_cov(&mut rng, order)
        };
        if let Err(e) = check_against_direct(&cov, order, 1e-8) {
            panic!("case {case}, order {order}: {e}");
        }
    }
}

#[test]
fn backward_system_matches_swapped_time() {
    // the backward predictor of X(0) from X(1..=n) is the forward predictor of
    // the time-reversed process, whose covariance is R(n)^T
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let order = 8;
        let cov = random_vma(&mut rng, order);
        let reversed = CovSequence::new(cov.lags().iter().map(|m| m.transpose()).collect(), usize::MAX);
        let fwd = levinson(&reversed, order);
        let bwd = levinson(&cov, order);
        for n in 0..=order {
            assert!(max_abs(&(fwd.v_fwd(n) - bwd.v_bwd(n))) < 1e-9);
        }
    }
}

#[test]
fn fluctuation_variance_never_grows() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let cov = random_sample_cov(&mut rng, 14);
        let sys = levinson(&cov, 14);
        for n in 1..=sys.order() {
            assert!(sys.v_fwd(n).trace() <= sys.v_fwd(n - 1).trace() + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recursion_solves_normal_equations(seed in any::<u64>(), order in 1usize..=10, vma in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cov = if vma { random_vma(&mut rng, order) } else { random_sample_cov(&mut rng, order) };
        prop_assert!(check_against_direct(&cov, order, 1e-8).is_ok());
    }

    #[test]
    fn fluctuation_covariances_are_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cov = random_sample_cov(&mut rng, 14);
        let sys = levinson(&cov, 14);
        for n in 0..=sys.order() {
            let v = sys.v_fwd(n);
            prop_assert!((v[(0, 1)] - v[(1, 0)]).abs() < 1e-12);
        }
    }
}
