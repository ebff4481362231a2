// JsError needs a JS host, so only the success paths run natively.

use palsqf_web::{phi_curve, residue_profile, spacing_profile};

#[test]
fn phi_curve_peaks_at_zero() {
    let ys = phi_curve(10, 3, 8).ok().unwrap();
    assert_eq!(ys.len(), 8);
    assert!((ys[0] - 100.0).abs() < 1e-9);
    assert!(ys.iter().all(|&y| y <= ys[0] + 1e-9));
}

#[test]
fn residue_profile_matches_core() {
    let ys = residue_profile(10, 4, 7).ok().unwrap();
    let hist = palsqf::palsets::residue_histogram(10, 4, 7, true).unwrap();
    assert_eq!(ys, hist.iter().map(|&c| c as f64).collect::<Vec<_>>());
    // five-digit palindromes ending in 1, 3, 7 or 9
    assert_eq!(ys.iter().sum::<f64>(), 400.0);
}

#[test]
fn spacing_profile_positive() {
    let ys = spacing_profile(3, 2, 20).ok().unwrap();
    assert_eq!(ys.len(), 20);
    assert!(ys.iter().all(|&y| y > 0.0 && y.is_finite()));
}
