#![no_main]

use exp_cli::ResultTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(t) = ResultTable::from_csv(text) {
        let again = t.to_csv();
        let back = ResultTable::from_csv(&again).expect("own output parses");
        assert!(back.same(&t));
        assert_eq!(back.to_csv(), again);
    }
});
