use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use hotel_auction::auction::{Bid, BidLine, CustomerId, RoomTypeId};
use hotel_auction::cli;
use hotel_auction::fixtures::{ten_auction_accepted_prices, three_bid_showcase};
use hotel_auction::forward::random::{random_instance, RandomSpec};
use hotel_auction::forward::{brute_force, build_model, ObjectiveMode};
use hotel_auction::rules::OfferRecord;
use hotel_auction::service::Service;
use hotel_auction::store::{self, AuctionEntry, StoreRoot};
use hotel_auction::Money;

const GOLDEN: &str = r#"[{"bidid":1,"arrival-date (YYYY-mm-dd)":"2023-6-2"},{"bidid":2,"arrival-date (YYYY-mm-dd)":"2023-6-2"},{"bidid":3,"arrival-date (YYYY-mm-dd)":"2023-6-11"}]"#;

fn with_auction(id: u64, instance: hotel_auction::auction::Instance) -> StoreRoot {
    let mut root = StoreRoot::default();
    root.forward_auctions.insert(
        id,
        AuctionEntry {
            instance,
            latest_result: None,
        },
    );
    root
}

async fn send(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, String) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn get(app: &Router, uri: &str) -> (StatusCode, String) {
    send(app, Method::GET, uri, None).await
}

fn parse(body: &str) -> Value {
    serde_json::from_str(body).unwrap_or_else(|e| panic!("{e}: {body}"))
}

#[tokio::test]
async fn optimize_endpoint_returns_the_golden_body() {
    let app = Service::in_memory(with_auction(1, three_bid_showcase())).router();
    let (status, body) = get(&app, "/api/optimize_auction/1").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, GOLDEN);

    // Canonical comparison as well, in case of key reordering.
    let canonical = |s: &str| serde_json::to_string(&parse(s)).unwrap();
    assert_eq!(canonical(&body), canonical(GOLDEN));
    for entry in parse(&body).as_array().unwrap() {
        let keys: Vec<_> = entry.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["arrival-date (YYYY-mm-dd)", "bidid"]);
    }
}

#[tokio::test]
async fn optimize_is_idempotent_and_stores_the_result() {
    let svc = Service::in_memory(with_auction(1, three_bid_showcase()));
    let app = svc.router();
    let first = get(&app, "/api/optimize_auction/1").await;
    let second = get(&app, "/api/optimize_auction/1").await;
    assert_eq!(first, second);
    let alias = send(&app, Method::POST, "/api/auctions/1/optimize", None).await;
    assert_eq!(alias, first);

    let stored = svc.snapshot().forward_auctions[&1].latest_result.clone().unwrap();
    assert_eq!(stored.solution.accepted.len(), 3);

    let (status, body) = get(&app, "/api/auctions/1").await;
    assert_eq!(status, StatusCode::OK);
    let doc = parse(&body);
    assert_eq!(doc["latest_result"]["status"], "optimal");
    assert_eq!(doc["instance"]["bids"].as_array().unwrap().len(), 3);
    assert_eq!(doc["instance"]["horizon"]["start_date"], "2023-06-01");
}

#[tokio::test]
async fn concurrent_optimize_calls_agree() {
    let app = Service::in_memory(with_auction(1, three_bid_showcase())).router();
    let calls = (0..8).map(|_| {
        let app = app.clone();
        tokio::spawn(async move { get(&app, "/api/optimize_auction/1").await })
    });
    for call in calls {
        assert_eq!(call.await.unwrap(), (StatusCode::OK, GOLDEN.to_owned()));
    }
}

#[tokio::test]
async fn unknown_and_empty_auctions() {
    let mut empty = three_bid_showcase();
    empty.bids.clear();
    let app = Service::in_memory(with_auction(7, empty)).router();
    assert_eq!(get(&app, "/api/optimize_auction/7").await, (StatusCode::OK, "[]".to_owned()));
    let (status, body) = get(&app, "/api/optimize_auction/8").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(parse(&body)["error"].as_str().is_some());
    assert_eq!(get(&app, "/api/auctions/8").await.0, StatusCode::NOT_FOUND);
    let (status, _) = get(&app, "/api/optimize_auction/1?objective=sideways").await;
    assert_ne!(status, StatusCode::OK);
}

#[tokio::test]
async fn single_bid_lands_on_its_earliest_optimal_arrival() {
    let mut inst = three_bid_showcase();
    inst.bids = vec![Bid {
        customer_id: CustomerId(42),
        lines: vec![BidLine {
            room_type: RoomTypeId(1),
            rooms_requested: 2,
            price_per_night: Money::from_units(80),
        }],
        window_lo: 4,
        window_hi: 9,
        nights: 5,
        blackout_days: Default::default(),
    }];
    let model = build_model(&inst.auction, &inst.bids, ObjectiveMode::Income).unwrap();
    let oracle = brute_force(&model).unwrap();
    assert_eq!(oracle.solution.accepted[&CustomerId(42)], 4);

    let app = Service::in_memory(with_auction(1, inst)).router();
    let (_, body) = get(&app, "/api/optimize_auction/1").await;
    assert_eq!(body, r#"[{"bidid":42,"arrival-date (YYYY-mm-dd)":"2023-6-4"}]"#);
}

#[tokio::test]
async fn cli_and_service_agree_on_random_instances() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..5 {
        let inst = random_instance(&RandomSpec::new(15, 20, vec![3, 2]), seed);
        let path = dir.path().join(format!("r{seed}.json"));
        std::fs::write(&path, inst.to_json_pretty()).unwrap();
        let mut out = Vec::new();
        let code = cli::run(
            ["hotel-auction", "optimize-forward", path.to_str().unwrap()],
            &mut out,
            &mut Vec::new(),
        );
        assert_eq!(code, cli::EXIT_OK);
        let from_cli = parse(std::str::from_utf8(&out).unwrap())["response"].clone();

        let app = Service::in_memory(with_auction(1, inst)).router();
        let (_, body) = get(&app, "/api/optimize_auction/1").await;
        assert_eq!(parse(&body), from_cli, "seed {seed}");
    }
}

#[tokio::test]
async fn put_auction_validates_bids() {
    let app = Service::in_memory(StoreRoot::default()).router();
    let doc = serde_json::to_value(three_bid_showcase().to_doc()).unwrap();
    let (status, body) = send(&app, Method::PUT, "/api/auctions/3", Some(doc.clone())).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(parse(&body)["bids"], 3);
    assert_eq!(get(&app, "/api/optimize_auction/3").await.1, GOLDEN);

    let mut cheap = doc;
    cheap["bids"][0]["lines"][0]["price_per_night"] = json!(6000);
    let (status, body) = send(&app, Method::PUT, "/api/auctions/4", Some(cheap)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(parse(&body)["error"].as_str().is_some());
    assert_eq!(get(&app, "/api/auctions/4").await.0, StatusCode::NOT_FOUND);
}

fn record(period: u8, bf: u8, price: Money) -> OfferRecord {
    OfferRecord {
        period_visiting: period,
        hotel_rating: 3.0,
        distance_to_sea: 200.0,
        beds_requested: 2,
        breakfast_type: bf,
        sites_within_10km: 3,
        accepted_price: price,
    }
}

/// The ten past auctions, all for the same request.
fn ten_auctions() -> Vec<OfferRecord> {
    ten_auction_accepted_prices().into_iter().map(|p| record(1, 1, p)).collect()
}

async fn reverse_app(history: Vec<OfferRecord>) -> Router {
    let app = Service::in_memory(StoreRoot::default()).router();
    let (status, body) = send(&app, Method::POST, "/api/reverse/history", Some(json!(history))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let profile = json!({
        "hotel_rating": 3.0,
        "distance_to_sea": 200.0,
        "breakfast_costs": { "1": 300, "2": 500 },
        "base_cost": 1000,
    });
    let (status, body) = send(&app, Method::PUT, "/api/profiles/seaside", Some(profile)).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    app
}

#[tokio::test]
async fn estimate_falls_back_to_the_distribution_optimum() {
    let app = reverse_app(ten_auctions()).await;
    let req = json!({
        "profile_id": "seaside",
        "cost": 1000,
        "request": { "period_visiting": 2, "breakfast_type": 2 },
    });
    let (status, body) = send(&app, Method::POST, "/api/reverse/estimate", Some(req)).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let doc = parse(&body);
    assert_eq!(doc["source"], "fallback");
    assert_eq!(doc["price"], 4000);
    assert_eq!(doc["expected_profit"], 2700.0);
    assert_eq!(doc["acceptance_probability"], 0.9);
    assert_eq!(doc["abstain"], false);
    assert_eq!(doc["applicable_rules"], json!([]));

    let req = json!({
        "profile_id": "seaside",
        "cost": 6000,
        "request": { "period_visiting": 2, "breakfast_type": 2 },
    });
    let (_, body) = send(&app, Method::POST, "/api/reverse/estimate", Some(req)).await;
    assert_eq!(parse(&body)["abstain"], true);
}

#[tokio::test]
async fn estimate_echoes_the_rule_it_used() {
    let mut history = ten_auctions();
    history.extend((0..6).map(|i| record(3, 2, Money::from_units(90 + i))));
    let app = reverse_app(history).await;
    let req = json!({
        "profile_id": "seaside",
        "request": { "period_visiting": 3, "breakfast_type": 2 },
    });
    let (status, body) = send(&app, Method::POST, "/api/reverse/estimate", Some(req)).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let doc = parse(&body);
    assert_eq!(doc["source"], "rules");
    assert_eq!(doc["price"], 9000);
    assert_eq!(doc["expected_profit"], Value::Null);
    assert!(!doc["applicable_rules"].as_array().unwrap().is_empty());
    let rule = &doc["rule"];
    assert!(rule["text"].as_str().unwrap().contains("→ p"));
    // The cheapest way to back the price needs no breakfast upgrade if a
    // period rule admits it.
    assert_eq!(doc["amenities"]["breakfast_type"], 0);
    assert_eq!(doc["margin"], 9000 - 1000);
}

#[tokio::test]
async fn conflicting_rules_return_both_sides() {
    let mut history: Vec<OfferRecord> = (0..4).map(|i| record(1, 0, Money::from_units(30 + i))).collect();
    history.extend((0..4).map(|i| record(3, 2, Money::from_units(100 + i))));
    let app = reverse_app(history).await;
    let req = json!({
        "profile_id": "seaside",
        "request": { "period_visiting": 1, "breakfast_type": 2 },
    });
    let (status, body) = send(&app, Method::POST, "/api/reverse/estimate", Some(req)).await;
    assert_eq!(status, StatusCode::CONFLICT, "{body}");
    let doc = parse(&body);
    assert!(doc["lower_bound"].as_i64().unwrap() > doc["upper_bound"].as_i64().unwrap());
    assert!(!doc["lower_rules"].as_array().unwrap().is_empty());
    assert!(!doc["upper_rules"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn estimate_rejects_unknown_profiles_and_bad_requests() {
    let app = reverse_app(ten_auctions()).await;
    let req = json!({ "profile_id": "nowhere", "request": {} });
    let (status, _) = send(&app, Method::POST, "/api/reverse/estimate", Some(req)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let req = json!({ "profile_id": "seaside", "request": { "beds_requested": 9 } });
    let (status, _) = send(&app, Method::POST, "/api/reverse/estimate", Some(req)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let bad_profile = json!({ "hotel_rating": 9.0, "distance_to_sea": 1.0, "base_cost": 0 });
    let (status, _) = send(&app, Method::PUT, "/api/profiles/x", Some(bad_profile)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn profit_curve_peaks_at_forty() {
    let app = reverse_app(ten_auctions()).await;
    let (status, body) = get(&app, "/api/reverse/profit_curve?cost=10").await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let doc = parse(&body);
    assert_eq!(doc["optimum"]["price"], 4000);
    assert_eq!(doc["optimum"]["expected_profit"], 2700.0);
    assert_eq!(doc["optimum"]["abstain"], false);
    assert_eq!(doc["cost"], 1000);
    let points = doc["points"].as_array().unwrap();
    assert!(points.windows(2).all(|w| w[0]["price"].as_i64() < w[1]["price"].as_i64()));
    let (status, _) = get(&app, "/api/reverse/profit_curve?cost=abc").await;
    assert_ne!(status, StatusCode::OK);
}

#[tokio::test]
async fn changes_persist_to_the_store_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.json");
    let svc = Service::open(&path).unwrap();
    assert!(path.exists());
    let app = svc.router();
    let doc = serde_json::to_value(three_bid_showcase().to_doc()).unwrap();
    assert_eq!(send(&app, Method::PUT, "/api/auctions/1", Some(doc)).await.0, StatusCode::OK);
    assert_eq!(get(&app, "/api/optimize_auction/1").await.1, GOLDEN);

    let on_disk = store::load(&path).unwrap();
    assert_eq!(on_disk, *svc.snapshot());
    let result = on_disk.forward_auctions[&1].latest_result.as_ref().unwrap();
    assert_eq!(result.solution.accepted.len(), 3);

    // A restarted service answers the same.
    let again = Service::open(&path).unwrap().router();
    assert_eq!(get(&again, "/api/optimize_auction/1").await.1, GOLDEN);
}
