use zetalab::correlation::{theorem21_report, theorem21_report_with_catalog, zero_sum, ReportOptions, ShiftParams};
use zetalab::zeros::{find_zeros, import_zeros, load_cache, save_cache};
use zetalab::LabError;

fn pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()
}

#[test]
fn cache_file_round_trip_preserves_zero_sum() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.zcat");
    let cat = find_zeros(100.0, 300.0).unwrap();
    save_cache(&cat, &path).unwrap();
    let back = load_cache(&path).unwrap();
    assert!(cat.payload_eq(&back));
    let s = ShiftParams::new(1.0, 2.0, 1.0).unwrap();
    let a = zero_sum(&cat, &s, 5, 110.0, 290.0).unwrap();
    let b = zero_sum(&back, &s, 5, 110.0, 290.0).unwrap();
    assert_eq!(a.value, b.value);
}

#[test]
fn zero_sum_independent_of_thread_count() {
    let cat = find_zeros(1000.0, 1400.0).unwrap();
    let s = ShiftParams::new(-0.5, 1.5, 1.0).unwrap();
    let one = pool(1).install(|| zero_sum(&cat, &s, 11, 1000.5, 1399.5).unwrap());
    let four = pool(4).install(|| zero_sum(&cat, &s, 11, 1000.5, 1399.5).unwrap());
    assert!(one.zeros_used > 64 * 3);
    assert_eq!(one.value.re.to_bits(), four.value.re.to_bits());
    assert_eq!(one.value.im.to_bits(), four.value.im.to_bits());
}

#[test]
fn report_from_catalog_matches_computed() {
    let s = ShiftParams::new(1.0, 2.0, 1.0).unwrap();
    let computed = theorem21_report(&s, 2000.0, ReportOptions { pad: false }).unwrap();
    let cat = find_zeros(1990.0, 2400.0).unwrap();
    let cached = theorem21_report_with_catalog(&cat, &s, 2000.0, ReportOptions { pad: false }).unwrap();
    assert_eq!(computed.zeros_used, cached.zeros_used);
    // ordinates located on different scan grids agree to their stated accuracy
    assert!((computed.zero_sum - cached.zero_sum).norm() <= computed.zero_sum_error + cached.zero_sum_error);
    assert_eq!(computed.main_term, cached.main_term);
}

#[test]
fn imported_catalog_gap_detected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sparse.txt");
    // endpoints only: the seventeen zeros between them are missing
    std::fs::write(&path, "14.134725142\n72.067157674\n").unwrap();
    let cat = import_zeros(&path).unwrap();
    let s = ShiftParams::new(1.0, 2.0, 1.0).unwrap();
    let r = zero_sum(&cat, &s, 2, cat.t_min, cat.t_max);
    assert!(matches!(r, Err(LabError::CatalogGap { .. })), "{r:?}");
}

#[test]
fn uncovered_window_rejected() {
    let cat = find_zeros(100.0, 200.0).unwrap();
    let s = ShiftParams::new(1.0, 2.0, 1.0).unwrap();
    assert!(matches!(zero_sum(&cat, &s, 2, 150.0, 250.0), Err(LabError::CatalogGap { .. })));
}
