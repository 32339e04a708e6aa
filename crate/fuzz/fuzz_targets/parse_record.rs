#![no_main]

use libfuzzer_sys::fuzz_target;
use sqcomb::hitran::parse_record_bytes;

fuzz_target!(|data: &[u8]| {
    if let Ok(line) = parse_record_bytes(data) {
        if let Ok(record) = line.to_record() {
            let _ = parse_record_bytes(record.as_bytes());
        }
    }
});
