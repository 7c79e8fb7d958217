use km2o_core::km2o::{
    extract_pieces, fluctuations, levinson, sample_covariance, whitening_factor, CovSequence, Mat2, StandardizedPair,
    Vec2,
};
use km2o_core::transforms::PairSeries;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn theta() -> [Mat2; 2] {
    [Mat2::new(1.0, 0.0, 0.5, 1.0), Mat2::new(0.6, 0.2, 0.0, 0.4)]
}

fn exact_cov(max_lag: usize) -> CovSequence {
    let [t0, t1] = theta();
    let mut lags = vec![Mat2::zeros(); max_lag + 1];
    lags[0] = t0 * t0.transpose() + t1 * t1.transpose();
    lags[1] = t1 * t0.transpose();
    CovSequence::new(lags, usize::MAX)
}

fn simulate(len: usize, seed: u64) -> Vec<Vec2> {
    let [t0, t1] = theta();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = || Vec2::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let mut prev = e();
    (0..len)
        .map(|_| {
            let cur = e();
            let x = t0 * cur + t1 * prev;
            prev = cur;
            x
        })
        .collect()
}

#[test]
fn whitened_pieces_have_identity_covariance() {
    let order = 6;
    let sys = levinson(&exact_cov(order), order);
    assert!(!sys.is_degenerate());
    let z = StandardizedPair {
        samples: simulate(40_000, 5),
    };
    let pieces = extract_pieces(&z, &sys).unwrap();
    let count = pieces.count() as f64;
    let dim = 2 * (order + 1);
    let mut cov = vec![0.0; dim * dim];
    for xi in pieces.iter() {
        for a in 0..dim {
            for b in 0..dim {
                cov[a * dim + b] += xi[a] * xi[b] / count;
            }
        }
    }
    // standard error of each entry is about 1/sqrt(count) = 0.005, inflated by
    // the overlap of neighbouring pieces
    for a in 0..dim {
        for b in 0..dim {
            let want = if a == b { 1.0 } else { 0.0 };
            let got = cov[a * dim + b];
            assert!((got - want).abs() < 0.05, "entry ({a},{b}) = {got}");
        }
    }
}

#[test]
fn first_fluctuation_is_the_sample_itself() {
    let z = simulate(50, 9);
    let sys = levinson(&exact_cov(4), 4);
    for s in 0..z.len() - 5 {
        let nu = fluctuations(&z[s..s + 5], &sys);
        assert_eq!(nu[0], z[s]);
    }
}

fn random_pair(seed: u64) -> PairSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first: Vec<f64> = (0..101).map(|_| rng.sample(StandardNormal)).collect();
    let rho: f64 = rng.random_range(-0.9..0.9);
    let second = first
        .iter()
        .map(|&x| rho * x + rng.sample::<f64, _>(StandardNormal))
        .collect();
    PairSeries {
        id: (0, 1),
        offset: 0,
        first,
        second,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factor_reproduces_fluctuation_covariance(seed in any::<u64>()) {
        let cov = sample_covariance(&random_pair(seed), 14).unwrap();
        let sys = levinson(&cov, 14);
        for n in 0..=sys.order() {
            let v = sys.v_fwd(n);
            let w = whitening_factor(&v).unwrap();
            prop_assert_eq!(w[(0, 1)], 0.0);
            let err = (w * w.transpose() - v).abs().max();
            prop_assert!(err < 1e-10, "n = {}, err = {:e}", n, err);
        }
    }

    #[test]
    fn whitened_values_are_finite(seed in any::<u64>()) {
        let pair = random_pair(seed);
        let cov = sample_covariance(&pair, 14).unwrap();
        let sys = levinson(&cov, 14);
        let z = km2o_core::km2o::standardize(&pair).unwrap();
        let pieces = extract_pieces(&z, &sys).unwrap();
        prop_assert_eq!(pieces.count(), 101 - 14);
        prop_assert!(pieces.iter().all(|xi| xi.iter().all(|v| v.is_finite())));
    }
}
