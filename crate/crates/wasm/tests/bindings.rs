use decay_wasm::{boost_curves, regime_json, wavepacket_curves};

#[test]
fn boost_layout_and_values() {
    let n = 5;
    let out = boost_curves("breit_wigner", 1.0, 1.0, 0.0, 0.6, 4.0, n).unwrap();
    assert_eq!(out.len(), 4 * n);
    let (t, rest) = (&out[..n], &out[n..2 * n]);
    let (naive, heuristic) = (&out[2 * n..3 * n], &out[3 * n..]);
    for i in 0..n {
        assert!((rest[i] - (-t[i]).exp()).abs() < 1e-12);
        assert!((naive[i] - (-1.25 * t[i]).exp()).abs() < 1e-12);
        assert!((heuristic[i] - (-0.8 * t[i]).exp()).abs() < 1e-12);
    }
}

#[test]
fn wavepacket_layout() {
    let n = 4;
    let out =
        wavepacket_curves("breit_wigner_truncated", 10.0, 0.1, 0.0, 1.0, 0.5, 30.0, n).unwrap();
    assert_eq!(out.len(), 3 * n);
    assert_eq!((out[n], out[2 * n]), (1.0, 1.0));
    for i in 1..n {
        assert!((out[n + i] - out[2 * n + i]).abs() < 0.05);
    }
}

#[test]
fn rejects_bad_input() {
    assert!(boost_curves("lorentz", 1.0, 1.0, 0.0, 0.5, 1.0, 3)
        .unwrap_err()
        .contains("unknown family"));
    assert!(boost_curves("gaussian", 1.0, 1.0, 0.0, 1.2, 1.0, 3).is_err());
    assert!(boost_curves("gaussian", 1.0, 1.0, 0.0, 0.2, 1.0, 1_000_000).is_err());
}

#[test]
fn regime_is_json() {
    let s = regime_json(1000.0, 1e-3, 1.0, 0.5).unwrap();
    assert!(s.contains("\"verdict\":\"ok\""), "{s}");
}
