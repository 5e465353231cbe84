//! C ABI over the hotel auction engine.
//!
//! Conventions:
//!
//! * Every fallible function returns an [`HaStatus`]; results go through out
//!   pointers. On failure, [`ha_last_error_message`] describes the error.
//! * Handles are opaque and owned by the caller once returned; release them
//!   with the matching `_free` function. Strings returned by the library are
//!   released with [`ha_string_free`].
//! * Money is integer cents.
//!
//! The C header is generated into `include/hotel_auction.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use hotel_auction::auction::Instance;
use hotel_auction::forward::{build_model, export_lp, ObjectiveMode, SolveLimits, SolverKind};
use hotel_auction::reverse::{
    empirical_distribution, expected_profit, optimize_price, AcceptedPriceDistribution,
};
use hotel_auction::{Error, Money};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    /// The request was well formed but cannot be carried out, for example
    /// brute force on an instance above its enumeration cap.
    Refused = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaSolver {
    Exact = 0,
    Greedy = 1,
    Fcfs = 2,
    Brute = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaObjective {
    Income = 0,
    Profit = 1,
}

/// Expected profit and acceptance probability are exact fractions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HaPricingDecision {
    pub price_cents: i64,
    pub expected_profit_cents_num: i64,
    pub expected_profit_cents_den: i64,
    pub acceptance_num: i64,
    pub acceptance_den: i64,
    pub abstain: bool,
}

/// Accepted-price distribution.
pub struct HaDistribution {
    inner: AcceptedPriceDistribution,
}

/// Forward auction with its bids.
pub struct HaInstance {
    inner: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> HaStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => HaStatus::Parse,
        Error::EnumerationCapExceeded { .. } => HaStatus::Refused,
        _ => HaStatus::InvalidInput,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (HaStatus, String)>) -> HaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HaStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HaStatus::Panic
        }
    }
}

fn fail(e: Error) -> (HaStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (HaStatus, String) {
    (HaStatus::NullPointer, format!("{what} is null"))
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ha_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a distribution from `len` accepted prices in cents.
///
/// # Safety
/// `prices_cents` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ha_distribution_new(
    prices_cents: *const i64,
    len: usize,
    out: *mut *mut HaDistribution,
) -> HaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if prices_cents.is_null() && len > 0 {
            return Err(null("prices_cents"));
        }
        let prices: Vec<Money> = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(prices_cents, len)
                .iter()
                .map(|&c| Money::from_cents(c))
                .collect()
        };
        let dist = empirical_distribution(&prices).map_err(fail)?;
        *out = Box::into_raw(Box::new(HaDistribution { inner: dist }));
        Ok(())
    })
}

/// # Safety
/// `dist` must come from [`ha_distribution_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ha_distribution_free(dist: *mut HaDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Expected-profit maximizing offer for a hotel with per-night `cost_cents`.
///
/// # Safety
/// `dist` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_distribution_optimize(
    dist: *const HaDistribution,
    cost_cents: i64,
    out: *mut HaPricingDecision,
) -> HaStatus {
    guard(|| {
        let dist = dist.as_ref().ok_or_else(|| null("dist"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = optimize_price(&dist.inner, Money::from_cents(cost_cents));
        *out = HaPricingDecision {
            price_cents: d.price.cents(),
            expected_profit_cents_num: *d.expected_profit.numer(),
            expected_profit_cents_den: *d.expected_profit.denom(),
            acceptance_num: *d.acceptance_probability.numer(),
            acceptance_den: *d.acceptance_probability.denom(),
            abstain: d.abstain,
        };
        Ok(())
    })
}

/// Expected profit in cents of offering `price_cents`, as `num / den`.
///
/// # Safety
/// `dist` must be a live handle; `num` and `den` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_distribution_expected_profit(
    dist: *const HaDistribution,
    cost_cents: i64,
    price_cents: i64,
    num: *mut i64,
    den: *mut i64,
) -> HaStatus {
    guard(|| {
        let dist = dist.as_ref().ok_or_else(|| null("dist"))?;
        if num.is_null() || den.is_null() {
            return Err(null("num/den"));
        }
        let e = expected_profit(
            &dist.inner,
            Money::from_cents(cost_cents),
            Money::from_cents(price_cents),
        );
        *num = *e.numer();
        *den = *e.denom();
        Ok(())
    })
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (HaStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (HaStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("interior nuls removed")
        .into_raw()
}

/// Parses a JSON instance document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ha_instance_from_json(
    json: *const c_char,
    out: *mut *mut HaInstance,
) -> HaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(json, "json")?;
        let inner = Instance::from_json(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(HaInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `inst` must come from [`ha_instance_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ha_instance_free(inst: *mut HaInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

fn objective(o: HaObjective) -> ObjectiveMode {
    match o {
        HaObjective::Income => ObjectiveMode::Income,
        HaObjective::Profit => ObjectiveMode::Profit,
    }
}

/// Clears the auction and writes a JSON result document to `out_json`:
/// `{"status", "objective", "best_bound", "nodes_explored", "accepted": {"<id>": arrival_night}}`.
///
/// `time_limit_ms` of 0 keeps the default budget.
///
/// # Safety
/// `inst` must be a live handle; `out_json` writable. Free the string with
/// [`ha_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ha_instance_solve(
    inst: *const HaInstance,
    solver: HaSolver,
    objective_mode: HaObjective,
    time_limit_ms: u64,
    out_json: *mut *mut c_char,
) -> HaStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let inst = &inst.inner;
        let model =
            build_model(&inst.auction, &inst.bids, objective(objective_mode)).map_err(fail)?;
        let mut limits = SolveLimits::default();
        if time_limit_ms > 0 {
            limits = limits.with_time_budget(Duration::from_millis(time_limit_ms));
        }
        let kind = match solver {
            HaSolver::Exact => SolverKind::Exact,
            HaSolver::Greedy => SolverKind::Greedy,
            HaSolver::Fcfs => SolverKind::Fcfs,
            HaSolver::Brute => SolverKind::Brute,
        };
        let result = kind.solve(&model, inst, limits).map_err(fail)?;
        let doc = serde_json::json!({
            "status": result.status,
            "objective": result.solution.objective,
            "best_bound": result.best_bound,
            "nodes_explored": result.nodes_explored,
            "accepted": result.solution.accepted,
        });
        *out_json = into_c_string(doc.to_string());
        Ok(())
    })
}

/// Writes the CPLEX LP model of the auction to `out_lp`.
///
/// # Safety
/// `inst` must be a live handle; `out_lp` writable. Free the string with
/// [`ha_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ha_instance_export_lp(
    inst: *const HaInstance,
    objective_mode: HaObjective,
    out_lp: *mut *mut c_char,
) -> HaStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        if out_lp.is_null() {
            return Err(null("out_lp"));
        }
        let model = build_model(&inst.inner.auction, &inst.inner.bids, objective(objective_mode))
            .map_err(fail)?;
        *out_lp = into_c_string(export_lp(&model));
        Ok(())
    })
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn ha_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
