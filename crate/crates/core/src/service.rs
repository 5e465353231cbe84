//! HTTP interface.
//!
//! | Method | Path | |
//! |---|---|---|
//! | GET | `/api/optimize_auction/{id}` | clear auction `id`, store and return the arrivals |
//! | POST | `/api/auctions/{id}/optimize` | same as above |
//! | GET | `/api/auctions/{id}` | auction definition, bids and latest result |
//! | PUT | `/api/auctions/{id}` | create or replace an auction |
//! | PUT | `/api/profiles/{id}` | create or replace a hotel profile |
//! | POST | `/api/reverse/history` | append accepted offers |
//! | POST | `/api/reverse/estimate` | price a reverse-auction request |
//! | GET | `/api/reverse/profit_curve?cost=` | expected profit over offer prices |
//!
//! The optimize endpoint answers with a bare list such as
//! `[{"bidid":1,"arrival-date (YYYY-mm-dd)":"2023-6-2"}]`; dates there are not
//! zero padded. Every other document uses ISO dates and integer cents.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path as FsPath, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use chrono::Datelike;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::auction::{validate_bid, Instance, InstanceDoc};
use crate::error::{Error, Result};
use crate::forward::{
    build_model, solve_exact, ClearingSolution, ObjectiveMode, SolveLimits, SolveResult,
};
use crate::money::Money;
use crate::reverse::{
    empirical_distribution, expected_profit, optimize_price, profit_curve, ratio_f64, CurvePoint,
};
use crate::rules::{
    estimate_price, filter_feasible, mine_rules, select_offer, AmenityConfig, EstimateSource,
    HotelProfile, MinerConfig, OfferRecord, PriceRule, RequestAttributes,
};
use crate::store::{self, AuctionEntry, StoreRoot};

/// Shared service state: the current store snapshot and its backing file.
#[derive(Clone)]
pub struct Service {
    inner: Arc<Inner>,
}

struct Inner {
    path: Option<PathBuf>,
    snapshot: RwLock<Arc<StoreRoot>>,
    writer: tokio::sync::Mutex<()>,
    auction_locks: Mutex<HashMap<u64, Arc<tokio::sync::Mutex<()>>>>,
    limits: SolveLimits,
    miner: MinerConfig,
}

impl Service {
    /// Serves the store at `path`, creating an empty one if the file is missing.
    pub fn open(path: &FsPath) -> Result<Self> {
        let root = if path.exists() {
            store::load(path)?
        } else {
            let root = StoreRoot::default();
            store::save(&root, path)?;
            root
        };
        Ok(Self::build(Some(path.to_owned()), root))
    }

    /// A service whose changes are never written to disk.
    pub fn in_memory(root: StoreRoot) -> Self {
        Self::build(None, root)
    }

    fn build(path: Option<PathBuf>, root: StoreRoot) -> Self {
        Service {
            inner: Arc::new(Inner {
                path,
                snapshot: RwLock::new(Arc::new(root)),
                writer: tokio::sync::Mutex::new(()),
                auction_locks: Mutex::new(HashMap::new()),
                limits: SolveLimits::default(),
                miner: MinerConfig::default(),
            }),
        }
    }

    pub fn with_limits(self, limits: SolveLimits) -> Self {
        let inner = Arc::try_unwrap(self.inner).unwrap_or_else(|_| panic!("configure before sharing"));
        Service {
            inner: Arc::new(Inner { limits, ..inner }),
        }
    }

    pub fn snapshot(&self) -> Arc<StoreRoot> {
        self.inner.snapshot.read().expect("snapshot lock").clone()
    }

    pub fn router(&self) -> Router {
        Router::new()
            .route("/api/optimize_auction/{id}", get(optimize_auction))
            .route("/api/auctions/{id}/optimize", post(optimize_auction))
            .route("/api/auctions/{id}", get(get_auction).put(put_auction))
            .route("/api/profiles/{id}", put(put_profile))
            .route("/api/reverse/history", post(append_history))
            .route("/api/reverse/estimate", post(estimate))
            .route("/api/reverse/profit_curve", get(curve))
            .with_state(self.clone())
    }

    /// Applies `change` to a copy of the store, validates and persists it,
    /// then publishes it as the new snapshot. Writers are serialized.
    async fn mutate<T>(&self, change: impl FnOnce(&mut StoreRoot) -> Result<T>) -> Result<T> {
        let _w = self.inner.writer.lock().await;
        let mut next = (*self.snapshot()).clone();
        let out = change(&mut next)?;
        match &self.inner.path {
            Some(p) => store::save(&next, p)?,
            None => next.validate()?,
        }
        *self.inner.snapshot.write().expect("snapshot lock") = Arc::new(next);
        Ok(out)
    }

    fn auction_lock(&self, id: u64) -> Arc<tokio::sync::Mutex<()>> {
        self.inner
            .auction_locks
            .lock()
            .expect("auction lock table")
            .entry(id)
            .or_default()
            .clone()
    }

    /// Clears auction `id` with the exact solver and stores the result.
    /// Returns the auction as solved together with the result.
    pub async fn optimize(&self, id: u64, mode: ObjectiveMode) -> Result<(Instance, SolveResult)> {
        let lock = self.auction_lock(id);
        let _guard = lock.lock().await;
        let snapshot = self.snapshot();
        let entry = snapshot
            .forward_auctions
            .get(&id)
            .ok_or_else(|| Error::NotFound(format!("auction {id}")))?;
        let instance = entry.instance.clone();
        let limits = self.inner.limits;
        let result = tokio::task::spawn_blocking(move || {
            let model = build_model(&instance.auction, &instance.bids, mode)?;
            Ok::<_, Error>(solve_exact(&model, limits))
        })
        .await
        .map_err(|e| Error::InvalidInstance(format!("solver task failed: {e}")))??;

        let stored = result.clone();
        let original = entry.instance.clone();
        let solved = original.clone();
        self.mutate(move |root| {
            let entry = root
                .forward_auctions
                .get_mut(&id)
                .ok_or_else(|| Error::NotFound(format!("auction {id}")))?;
            // The auction may have been replaced while solving.
            if entry.instance == original {
                entry.latest_result = Some(stored);
            }
            Ok(())
        })
        .await?;
        Ok((solved, result))
    }
}

pub async fn serve(service: Service, addr: SocketAddr) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| Error::io(addr.to_string(), e))?;
    axum::serve(listener, service.router())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| Error::io(addr.to_string(), e))
}

/// One accepted bid in the optimize response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrivalEntry {
    pub bidid: u64,
    #[serde(rename = "arrival-date (YYYY-mm-dd)")]
    pub arrival_date: String,
}

/// Accepted bids by ascending id, with dates rendered without zero padding.
pub fn arrival_entries(instance: &Instance, solution: &ClearingSolution) -> Vec<ArrivalEntry> {
    let horizon = instance.auction.horizon();
    solution
        .accepted
        .iter()
        .map(|(customer, &arrival)| {
            let d = horizon
                .date_at(arrival)
                .expect("validated solutions stay inside the horizon");
            ArrivalEntry {
                bidid: customer.0,
                arrival_date: format!("{}-{}-{}", d.year(), d.month(), d.day()),
            }
        })
        .collect()
}

pub struct ApiError(Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

fn rule_views(rules: &[PriceRule]) -> Vec<serde_json::Value> {
    rules
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("rules serialize");
            v["text"] = json!(r.to_string());
            v
        })
        .collect()
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let e = self.0;
        let status = match &e {
            Error::NotFound(_) => StatusCode::NOT_FOUND,
            Error::RuleConflict { .. } => StatusCode::CONFLICT,
            Error::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        let mut body = json!({ "error": e.kind(), "message": e.to_string() });
        if let Error::RuleConflict {
            lower_bound,
            upper_bound,
            lower,
            upper,
        } = &e
        {
            body["lower_bound"] = json!(lower_bound);
            body["upper_bound"] = json!(upper_bound);
            body["lower_rules"] = json!(rule_views(lower));
            body["upper_rules"] = json!(rule_views(upper));
        }
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

#[derive(Deserialize)]
struct OptimizeQuery {
    #[serde(default)]
    objective: Option<String>,
}

async fn optimize_auction(
    State(svc): State<Service>,
    Path(id): Path<u64>,
    Query(q): Query<OptimizeQuery>,
) -> ApiResult<Response> {
    let mode = match q.objective.as_deref() {
        None => ObjectiveMode::default(),
        Some(s) => s.parse().map_err(Error::InvalidParameter)?,
    };
    let (instance, result) = svc.optimize(id, mode).await?;
    let body = serde_json::to_string(&arrival_entries(&instance, &result.solution)).map_err(Error::from)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}

async fn get_auction(State(svc): State<Service>, Path(id): Path<u64>) -> ApiResult<Json<serde_json::Value>> {
    let snapshot = svc.snapshot();
    let entry = snapshot
        .forward_auctions
        .get(&id)
        .ok_or_else(|| Error::NotFound(format!("auction {id}")))?;
    Ok(Json(json!({
        "id": id,
        "instance": entry.instance.to_doc(),
        "latest_result": entry.latest_result,
    })))
}

async fn put_auction(
    State(svc): State<Service>,
    Path(id): Path<u64>,
    Json(doc): Json<InstanceDoc>,
) -> ApiResult<Json<serde_json::Value>> {
    let instance = Instance::from_doc(doc)?;
    let reports: Vec<_> = instance
        .bids
        .iter()
        .map(|b| validate_bid(b, &instance.auction))
        .filter(|r| !r.is_clean())
        .collect();
    if !reports.is_empty() {
        return Err(Error::InvalidBids(reports).into());
    }
    let bids = instance.bids.len();
    svc.mutate(move |root| {
        root.forward_auctions.insert(
            id,
            AuctionEntry {
                instance,
                latest_result: None,
            },
        );
        Ok(())
    })
    .await?;
    Ok(Json(json!({ "id": id, "bids": bids })))
}

async fn put_profile(
    State(svc): State<Service>,
    Path(id): Path<String>,
    Json(profile): Json<HotelProfile>,
) -> ApiResult<Json<serde_json::Value>> {
    let problems = profile.violations();
    if !problems.is_empty() {
        return Err(Error::InvalidParameter(problems.join("; ")).into());
    }
    let echo = id.clone();
    svc.mutate(move |root| {
        root.hotel_profiles.insert(id, profile);
        Ok(())
    })
    .await?;
    Ok(Json(json!({ "id": echo })))
}

async fn append_history(
    State(svc): State<Service>,
    Json(records): Json<Vec<OfferRecord>>,
) -> ApiResult<Json<serde_json::Value>> {
    let total = svc
        .mutate(move |root| {
            root.reverse_history.extend(records);
            Ok(root.reverse_history.len())
        })
        .await?;
    Ok(Json(json!({ "records": total })))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimateRequest {
    profile_id: String,
    /// Cents per night; defaults to the profile's base cost.
    #[serde(default)]
    cost: Option<Money>,
    #[serde(default)]
    request: RequestAttributes,
}

#[derive(Debug, Serialize)]
struct EstimateResponse {
    currency: String,
    price: Money,
    source: EstimateSource,
    amenities: AmenityConfig,
    amenity_cost: Money,
    /// `price - cost - amenity_cost`.
    margin: Money,
    /// From the accepted-price distribution, when it was consulted.
    acceptance_probability: Option<f64>,
    /// Cents, from the accepted-price distribution, when it was consulted.
    expected_profit: Option<f64>,
    abstain: bool,
    defaults_used: bool,
    rule: Option<serde_json::Value>,
    applicable_rules: Vec<serde_json::Value>,
}

/// Past offers matching every attribute the request sets, or all of them
/// when none match.
fn comparable_history<'a>(history: &'a [OfferRecord], request: &RequestAttributes) -> Vec<&'a OfferRecord> {
    let matching: Vec<_> = history
        .iter()
        .filter(|r| {
            crate::rules::Attribute::ALL
                .iter()
                .all(|&a| request.get(a).is_none_or(|v| r.value(a) == v))
        })
        .collect();
    if matching.is_empty() {
        history.iter().collect()
    } else {
        matching
    }
}

async fn estimate(
    State(svc): State<Service>,
    Json(req): Json<EstimateRequest>,
) -> ApiResult<Json<EstimateResponse>> {
    let snapshot = svc.snapshot();
    let profile = snapshot
        .hotel_profiles
        .get(&req.profile_id)
        .ok_or_else(|| Error::NotFound(format!("hotel profile {:?}", req.profile_id)))?;
    let problems = req.request.violations();
    if !problems.is_empty() {
        return Err(Error::InvalidParameter(problems.join("; ")).into());
    }
    let cost = req.cost.unwrap_or(profile.base_cost);
    let history = &snapshot.reverse_history;
    let rules = mine_rules(history, &svc.inner.miner)?;
    let feasible = filter_feasible(&rules, profile);
    let prices: Vec<Money> = comparable_history(history, &req.request)
        .iter()
        .map(|r| r.accepted_price)
        .collect();
    let fallback = empirical_distribution(&prices)?;
    let est = estimate_price(&feasible, &req.request, &fallback, cost)?;
    let offer = select_offer(&est.applicable, est.price, profile);

    let margin = est.price - cost - offer.amenity_cost;
    let (acceptance, profit) = match est.fallback {
        Some(_) => (
            Some(ratio_f64(fallback.acceptance_probability(est.price))),
            Some(ratio_f64(expected_profit(&fallback, cost, est.price))),
        ),
        None => (None, None),
    };
    let abstain = match profit {
        Some(p) => p <= 0.0,
        None => margin <= Money::ZERO,
    };
    Ok(Json(EstimateResponse {
        currency: snapshot.currency.clone(),
        price: est.price,
        source: est.source,
        amenities: offer.amenities,
        amenity_cost: offer.amenity_cost,
        margin,
        acceptance_probability: acceptance,
        expected_profit: profit,
        abstain,
        defaults_used: offer.defaults_used,
        rule: offer.rule.as_ref().map(|r| rule_views(std::slice::from_ref(r)).remove(0)),
        applicable_rules: rule_views(&est.applicable),
    }))
}

#[derive(Deserialize)]
struct CurveQuery {
    /// Decimal currency units, e.g. `10` or `10.50`.
    cost: String,
}

#[derive(Serialize)]
struct CurveResponse {
    currency: String,
    cost: Money,
    points: Vec<CurvePoint>,
    optimum: CurveOptimum,
}

#[derive(Serialize)]
struct CurveOptimum {
    price: Money,
    /// Cents.
    expected_profit: f64,
    acceptance_probability: f64,
    abstain: bool,
}

async fn curve(State(svc): State<Service>, Query(q): Query<CurveQuery>) -> ApiResult<Json<CurveResponse>> {
    let cost: Money = q
        .cost
        .parse()
        .map_err(|e| Error::InvalidParameter(format!("cost: {e}")))?;
    let snapshot = svc.snapshot();
    let prices: Vec<Money> = snapshot.reverse_history.iter().map(|r| r.accepted_price).collect();
    let dist = empirical_distribution(&prices)?;
    let best = optimize_price(&dist, cost);
    Ok(Json(CurveResponse {
        currency: snapshot.currency.clone(),
        cost,
        points: profit_curve(&dist, cost),
        optimum: CurveOptimum {
            price: best.price,
            expected_profit: ratio_f64(best.expected_profit),
            acceptance_probability: ratio_f64(best.acceptance_probability),
            abstain: best.abstain,
        },
    }))
}
