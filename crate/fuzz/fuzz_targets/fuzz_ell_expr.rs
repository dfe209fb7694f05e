#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    // The direction-expression grammar must reject garbage gracefully; an
    // accepted direction is finite and strictly positive in every entry.
    if let Ok(v) = lyfq::ellexpr::parse_direction(data) {
        assert!(!v.is_empty());
        assert!(v.iter().all(|&x| x.is_finite() && x > 0.0));
    }
    let _ = lyfq::ellexpr::parse_scalar(data);
});
