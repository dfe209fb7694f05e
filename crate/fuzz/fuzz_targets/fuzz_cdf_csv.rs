#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    // The CDF CSV reader must never panic; accepted curves are monotone, so
    // the self-distance is exactly zero and distances are well-defined.
    if let Ok(curve) = lyfq::io::parse_cdf_csv(data) {
        assert_eq!(curve.ks(&curve), 0.0);
        let w = curve.wasserstein1(&curve);
        assert!(w == 0.0);
        let _ = curve.value(0.5);
    }
});
