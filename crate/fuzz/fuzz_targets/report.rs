#![no_main]

use libfuzzer_sys::fuzz_target;
use sigmak::cli::parse_report;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = parse_report(text) {
        let json = report.to_json().expect("accepted reports serialize");
        let again = parse_report(&json).expect("serialized reports parse");
        assert_eq!(again.to_json().unwrap(), json);
    }
});
