#![no_main]

use exp_cli::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::parse(text) {
        let _ = cfg.validate();
        let _ = exp_cli::sweep::expand(&cfg).map(|p| p.len());
        assert_eq!(cfg.hash(), cfg.clone().hash());
    }
});
