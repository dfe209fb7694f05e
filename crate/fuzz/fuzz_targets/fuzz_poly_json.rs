#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // The polynomial JSON parser must never panic on arbitrary input, and an
    // accepted polynomial must be safe to evaluate and reflect.
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = lyfq::io::poly_from_json_str(text) {
        let z = vec![num_complex::Complex64::new(0.5, 0.25); p.n()];
        let _ = p.eval(&z);
        let q = p.involution();
        assert_eq!(q.involution(), p);
        let _ = p.self_inversive_factor(1e-10);
        let back = lyfq::io::poly_from_json_str(&lyfq::io::poly_to_json_string(&p))
            .expect("serialized polynomial reparses");
        assert_eq!(back, p);
    }
});
