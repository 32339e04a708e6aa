#![no_main]

use libfuzzer_sys::fuzz_target;
use sqcomb_cli::config::ConfigFile;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(file) = ConfigFile::parse(text) {
            let _ = file.validate();
        }
    }
});
