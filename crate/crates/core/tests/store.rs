use std::sync::{Arc, Barrier};

use hotel_auction::fixtures::{greedy_counterexample, three_bid_showcase};
use hotel_auction::forward::{build_model, solve_exact, ObjectiveMode, SolveLimits};
use hotel_auction::rules::{generate_synthetic, HotelProfile};
use hotel_auction::store::{self, AuctionEntry, StoreRoot};
use hotel_auction::{Error, Money};

fn populated() -> StoreRoot {
    let mut root = StoreRoot::default();
    for (id, instance) in [(1, three_bid_showcase()), (2, greedy_counterexample())] {
        let model = build_model(&instance.auction, &instance.bids, ObjectiveMode::Profit).unwrap();
        let result = solve_exact(&model, SolveLimits::default());
        root.forward_auctions.insert(
            id,
            AuctionEntry {
                instance,
                latest_result: Some(result),
            },
        );
    }
    root.reverse_history = generate_synthetic(30, 1);
    root.hotel_profiles.insert(
        "seaside".into(),
        HotelProfile::new(4.0, 100.0, Money::from_units(20)).with_breakfast(1, Money::from_units(3)),
    );
    root
}

#[test]
fn round_trip_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.json");
    let root = populated();
    store::save(&root, &path).unwrap();
    let back = store::load(&path).unwrap();
    assert_eq!(back, root);
    store::save(&back, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{}\n", root.to_json()));
}

#[test]
fn empty_document_loads_as_empty_store() {
    let root = StoreRoot::from_json(r#"{"schema_version": 1, "currency": "EUR"}"#).unwrap();
    assert!(root.forward_auctions.is_empty());
    assert!(root.reverse_history.is_empty());
    assert!(root.hotel_profiles.is_empty());
}

#[test]
fn documents_use_iso_dates_and_cents() {
    let text = populated().to_json();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["currency"], "EUR");
    let auction = &doc["forward_auctions"]["1"]["instance"];
    assert_eq!(auction["horizon"]["start_date"], "2023-06-01");
    assert_eq!(auction["bids"][0]["window_lo"], "2023-06-02");
    assert_eq!(auction["room_types"][0]["min_price"], 6500);
}

#[test]
fn bid_below_the_floor_fails_validation_with_its_location() {
    let mut root = StoreRoot::default();
    let mut inst = three_bid_showcase();
    inst.bids[1].lines[0].price_per_night = Money::from_units(60);
    root.forward_auctions.insert(
        9,
        AuctionEntry {
            instance: inst,
            latest_result: None,
        },
    );
    let text = root.to_json();
    match StoreRoot::from_json(&text) {
        Err(Error::StoreValidation(v)) => {
            assert_eq!(v.len(), 1);
            assert!(v[0].starts_with("forward_auctions.9.bids"), "{v:?}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn stored_results_must_fit_their_auction() {
    let mut root = populated();
    let entry = root.forward_auctions.get_mut(&1).unwrap();
    let result = entry.latest_result.as_mut().unwrap();
    // Move bid 3 to an arrival outside its window.
    let first = *result.solution.accepted.keys().last().unwrap();
    result.solution.accepted.insert(first, 1);
    assert!(matches!(root.validate(), Err(Error::StoreValidation(_))));
}

#[test]
fn parse_errors_name_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.json");
    std::fs::write(&path, "{\"schema_version\": 1,\n \"currency\": }").unwrap();
    match store::load(&path) {
        Err(Error::Parse { location, .. }) => {
            assert!(location.contains("store.json") && location.contains("line 2"), "{location}")
        }
        other => panic!("{other:?}"),
    }
    std::fs::write(&path, r#"{"schema_version": 1, "currency": "EUR", "extra": 1}"#).unwrap();
    assert!(matches!(store::load(&path), Err(Error::Parse { .. })));
}

#[test]
fn failed_save_leaves_the_previous_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.json");
    store::save(&populated(), &path).unwrap();
    let before = std::fs::read(&path).unwrap();
    let mut bad = populated();
    bad.reverse_history[0].accepted_price = Money::from_units(5000);
    assert!(store::save(&bad, &path).is_err());
    assert_eq!(std::fs::read(&path).unwrap(), before);

    let missing_dir = dir.path().join("nope").join("store.json");
    assert!(matches!(store::save(&populated(), &missing_dir), Err(Error::Io { .. })));
}

#[test]
fn concurrent_saves_never_tear_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = Arc::new(dir.path().join("store.json"));
    store::save(&StoreRoot::default(), &path).unwrap();

    // Each writer saves a distinct history length; any reader must see one
    // of them in full.
    let writers = 6;
    let barrier = Arc::new(Barrier::new(writers + 1));
    let candidates: Vec<StoreRoot> = (0..writers)
        .map(|i| {
            let mut root = populated();
            root.reverse_history.truncate(5 + i);
            root
        })
        .collect();
    let handles: Vec<_> = candidates
        .iter()
        .cloned()
        .map(|root| {
            let path = Arc::clone(&path);
            let barrier = Arc::clone(&barrier);
            std::thread::spawn(move || {
                barrier.wait();
                for _ in 0..5 {
                    store::save(&root, &path).unwrap();
                }
            })
        })
        .collect();
    barrier.wait();
    let mut reads = 0;
    while handles.iter().any(|h| !h.is_finished()) || reads == 0 {
        let seen = store::load(&path).unwrap();
        assert!(seen == StoreRoot::default() || candidates.contains(&seen));
        reads += 1;
    }
    for h in handles {
        h.join().unwrap();
    }
    let last = store::load(&path).unwrap();
    assert!(candidates.contains(&last));
    // No temporary files are left behind.
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn reload_after_interrupted_write_sees_the_last_commit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.json");
    let committed = StoreRoot {
        reverse_history: generate_synthetic(10, 3),
        ..StoreRoot::default()
    };
    store::save(&committed, &path).unwrap();

    // A writer that died mid-way leaves a partial temporary file next to the
    // store, never a partial store.
    let partial = committed.to_json();
    std::fs::write(dir.path().join(".store-crashed.tmp"), &partial[..partial.len() / 2]).unwrap();
    assert_eq!(store::load(&path).unwrap(), committed);

    let mut next = committed.clone();
    next.reverse_history.truncate(4);
    store::save(&next, &path).unwrap();
    assert_eq!(store::load(&path).unwrap(), next);
}
