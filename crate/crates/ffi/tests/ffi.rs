use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use hotel_auction_ffi::*;

const SHOWCASE: &str = r#"{
    "horizon": {"start_date": "2023-06-01", "length": 15},
    "room_types": [{"id": 1, "auctioned_count": 2, "min_price": 6500, "operating_cost": 2500}],
    "bids": [
        {"customer_id": 1, "lines": [{"room_type": 1, "rooms_requested": 1, "price_per_night": 7000}],
         "window_lo": "2023-06-02", "window_hi": "2023-06-04", "nights": 3},
        {"customer_id": 2, "lines": [{"room_type": 1, "rooms_requested": 1, "price_per_night": 6500}],
         "window_lo": "2023-06-02", "window_hi": "2023-06-12", "nights": 9},
        {"customer_id": 3, "lines": [{"room_type": 1, "rooms_requested": 2, "price_per_night": 7500}],
         "window_lo": "2023-06-10", "window_hi": "2023-06-13", "nights": 3}
    ]
}"#;

fn last_error() -> String {
    let p = ha_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn distribution_round_trip() {
    let prices: [i64; 10] = [3000, 4000, 4000, 4000, 4500, 4500, 4800, 5000, 5000, 5000];
    let mut dist = ptr::null_mut();
    unsafe {
        assert_eq!(ha_distribution_new(prices.as_ptr(), prices.len(), &mut dist), HaStatus::Ok);
        let mut d = std::mem::zeroed::<HaPricingDecision>();
        assert_eq!(ha_distribution_optimize(dist, 1000, &mut d), HaStatus::Ok);
        assert_eq!(d.price_cents, 4000);
        assert_eq!((d.expected_profit_cents_num, d.expected_profit_cents_den), (2700, 1));
        assert_eq!((d.acceptance_num, d.acceptance_den), (9, 10));
        assert!(!d.abstain);

        let (mut num, mut den) = (0, 0);
        assert_eq!(ha_distribution_expected_profit(dist, 1000, 5000, &mut num, &mut den), HaStatus::Ok);
        assert_eq!((num, den), (1200, 1));
        ha_distribution_free(dist);
    }
}

#[test]
fn errors_are_reported() {
    let mut dist = ptr::null_mut();
    unsafe {
        assert_eq!(ha_distribution_new(ptr::null(), 0, &mut dist), HaStatus::InvalidInput);
        assert!(last_error().contains("must not be empty"));
        assert_eq!(ha_distribution_new(ptr::null(), 3, &mut dist), HaStatus::NullPointer);
        assert_eq!(ha_distribution_optimize(ptr::null(), 0, ptr::null_mut()), HaStatus::NullPointer);

        let bad = CString::new("{\"horizon\": 3}").unwrap();
        let mut inst = ptr::null_mut();
        assert_eq!(ha_instance_from_json(bad.as_ptr(), &mut inst), HaStatus::Parse);
        assert!(inst.is_null());
        ha_distribution_free(ptr::null_mut());
        ha_instance_free(ptr::null_mut());
        ha_string_free(ptr::null_mut());
    }
}

#[test]
fn solves_and_exports() {
    let json = CString::new(SHOWCASE).unwrap();
    let mut inst = ptr::null_mut();
    unsafe {
        assert_eq!(ha_instance_from_json(json.as_ptr(), &mut inst), HaStatus::Ok);
        let mut out = ptr::null_mut();
        let status = ha_instance_solve(inst, HaSolver::Exact, HaObjective::Income, 0, &mut out);
        assert_eq!(status, HaStatus::Ok);
        let doc: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        ha_string_free(out);
        assert_eq!(doc["status"], "optimal");
        assert_eq!(doc["accepted"], serde_json::json!({"1": 2, "2": 2, "3": 11}));

        let mut lp = ptr::null_mut();
        assert_eq!(ha_instance_export_lp(inst, HaObjective::Profit, &mut lp), HaStatus::Ok);
        let text = CStr::from_ptr(lp).to_str().unwrap().to_owned();
        ha_string_free(lp);
        assert!(text.starts_with("\\") || text.contains("Maximize"));
        assert!(text.contains("Binaries"));
        ha_instance_free(inst);
    }
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hotel_auction.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "ha_distribution_new",
        "ha_distribution_free",
        "ha_distribution_optimize",
        "ha_distribution_expected_profit",
        "ha_instance_from_json",
        "ha_instance_free",
        "ha_instance_solve",
        "ha_instance_export_lp",
        "ha_string_free",
        "ha_last_error_message",
        "typedef struct HaInstance HaInstance",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }

    let dir = tempfile_dir();
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        "#include \"hotel_auction.h\"\n\
         int main(void) { HaDistribution *d = 0; HaPricingDecision p;\n\
         int64_t prices[1] = {4000};\n\
         if (ha_distribution_new(prices, 1, &d) != HA_STATUS_OK) return 1;\n\
         ha_distribution_optimize(d, 1000, &p); ha_distribution_free(d); return 0; }\n",
    )
    .unwrap();
    let Ok(status) = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler; skipped syntax check");
        return;
    };
    assert!(status.success());
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("hotel-auction-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
