use std::io::Write;

use corn_core::market::{load_csv, load_price_csv, MarketError};

fn file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn relatives_file_round_trips() {
    let f = file("a,b\n1.01,0.99\n0.98,1.02\n");
    let seq = load_csv(f.path()).unwrap();
    assert_eq!(seq.len(), 2);
    assert_eq!(seq.asset_names(), ["a", "b"]);
    assert_eq!(seq.period(2).as_slice(), [0.98, 1.02]);
}

#[test]
fn price_file_becomes_ratios() {
    let f = file("x,y\n10,20\n11,18\n");
    let seq = load_price_csv(f.path()).unwrap();
    assert_eq!(seq.len(), 1);
    assert!((seq.period(1)[0] - 1.1).abs() < 1e-12);
    assert!((seq.period(1)[1] - 0.9).abs() < 1e-12);
}

#[test]
fn bad_files_report_the_line() {
    let f = file("a,b\n1.0,1.0\n1.0,-2\n");
    assert!(matches!(
        load_csv(f.path()),
        Err(MarketError::NonPositivePrice { line: 3, column: 2 })
    ));
    let f = file("a,b\n1.0\n");
    assert!(matches!(
        load_csv(f.path()),
        Err(MarketError::MalformedRow { line: 2, .. })
    ));
    assert!(matches!(
        load_csv("/nonexistent/relatives.csv"),
        Err(MarketError::Io(_))
    ));
}
