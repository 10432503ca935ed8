#![no_main]

use libfuzzer_sys::fuzz_target;
use sigmak::cli::{parse_config, Command};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config(text) {
        for cmd in [Command::Canonical, Command::Identities, Command::Sweep, Command::Cone] {
            let _ = cfg.validate_for(cmd);
        }
    }
});
