use km2o_core::market_data::{load_csv, parse_csv, PricePoint};
use km2o_core::regime::{classify, lambda_series, ClassifierConfig, Thresholds};
use km2o_core::report::{render, write_report, Format};
use km2o_core::synth::{generate, weekday_calendar, SynthSpec};
use km2o_core::transforms::to_ccr;
use km2o_core::{Error, PriceSeries};
use proptest::prelude::*;

proptest! {
    #[test]
    fn price_csv_round_trips(closes in prop::collection::vec(1e-3f64..1e6, 2..60)) {
        let points = weekday_calendar(closes.len())
            .into_iter()
            .zip(&closes)
            .map(|(date, &close)| PricePoint { date, close })
            .collect();
        let s = PriceSeries::new(points).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let (back, warnings) = parse_csv(buf.as_slice()).unwrap();
        prop_assert!(warnings.is_empty());
        prop_assert_eq!(back, s);
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_csv("/nonexistent/prices.csv").unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.is_io());
}

#[test]
fn classification_output_is_byte_stable() {
    let prices = generate(&SynthSpec::variance_switch(106, 0.01, 0.05, 100, 12)).unwrap();
    let run = || {
        let ccr = to_ccr(&prices);
        let lambdas = lambda_series(&ccr, &ClassifierConfig::default()).unwrap();
        let regimes = classify(&lambdas, Thresholds::default()).unwrap();
        let mut csv = Vec::new();
        let mut json = Vec::new();
        render(&regimes, Format::Csv, &mut csv).unwrap();
        render(&regimes, Format::Json, &mut json).unwrap();
        (csv, json)
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let text = String::from_utf8(a.0).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("date,lambda,regime"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn reports_land_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let prices = generate(&SynthSpec::gaussian_walk(20, 0.0, 0.01, 1)).unwrap();
    let path = dir.path().join("ccr.csv");
    write_report(&to_ccr(&prices), Format::Csv, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 20);
    let bad = write_report(&to_ccr(&prices), Format::Csv, dir.path().join("missing/ccr.csv"));
    assert!(matches!(bad, Err(Error::Io { .. })));
}
