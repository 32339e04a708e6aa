#![no_main]

use libfuzzer_sys::fuzz_target;
use sqcomb::hitran::LineList;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(list) = LineList::from_par_str(text) {
            let _ = list.select_window(0.0, 1.0e5, 26);
            let _ = list.nearest(6534.0);
        }
    }
});
