use std::path::{Path, PathBuf};

use hotel_auction::cli::{run, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use hotel_auction::fixtures::{greedy_counterexample, ten_auction_accepted_prices, three_bid_showcase};
use serde_json::Value;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hotel-auction").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn table_history(dir: &Path) -> PathBuf {
    let mut text = String::from("auction\taccepted_price\n");
    for (i, p) in ten_auction_accepted_prices().iter().enumerate() {
        text.push_str(&format!("{}\t{p}\n", i + 1));
    }
    write(dir, "table1.tsv", &text)
}

#[test]
fn reverse_price_on_the_ten_auction_history() {
    let dir = tempfile::tempdir().unwrap();
    let history = table_history(dir.path());
    let r = cli(&["reverse-price", s(&history), "--cost", "10", "--curve"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let doc = json(&r.out);
    assert_eq!(doc["price"], 4000);
    assert_eq!(doc["expected_profit"], 2700.0);
    assert_eq!(doc["acceptance_probability"], 0.9);
    assert_eq!(doc["abstain"], false);
    assert_eq!(doc["summary"], "π*=40.00 E[P]=27.00");
    // Five breakpoints and the four midpoints between them.
    let curve = doc["curve"].as_array().unwrap();
    assert_eq!(curve.len(), 9);
    let top = curve
        .iter()
        .max_by(|a, b| a["expected_profit"].as_f64().unwrap().total_cmp(&b["expected_profit"].as_f64().unwrap()))
        .unwrap();
    assert_eq!((top["price"].as_i64(), top["expected_profit"].as_f64()), (Some(4000), Some(2700.0)));

    let r = cli(&["reverse-price", s(&history), "--cost", "60"]);
    assert_eq!(json(&r.out)["abstain"], true);
}

#[test]
fn optimize_forward_reports_the_showcase_arrivals() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "showcase.json", &three_bid_showcase().to_json_pretty());
    let r = cli(&["optimize-forward", s(&inst)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let doc = json(&r.out);
    assert_eq!(doc["status"], "optimal");
    let dates: Vec<&str> = doc["response"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["arrival-date (YYYY-mm-dd)"].as_str().unwrap())
        .collect();
    assert_eq!(dates, ["2023-6-2", "2023-6-2", "2023-6-11"]);
    assert_eq!(doc["accepted"][2]["arrival"], "2023-06-11");
    // 3 nights at 70, 9 at 65 and 3 of two rooms at 75.
    assert_eq!(doc["objective"], (3 * 70 + 9 * 65 + 3 * 2 * 75) * 100);

    for solver in ["greedy", "fcfs", "brute"] {
        let r = cli(&["optimize-forward", s(&inst), "--solver", solver, "--objective", "profit"]);
        assert_eq!(r.code, EXIT_OK, "{solver}: {}", r.err);
        assert_eq!(json(&r.out)["objective_mode"], "profit");
    }
}

#[test]
fn greedy_and_exact_differ_on_the_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "ab.json", &greedy_counterexample().to_json_pretty());
    let exact = json(&cli(&["optimize-forward", s(&inst)]).out);
    let greedy = json(&cli(&["optimize-forward", s(&inst), "--solver", "greedy"]).out);
    assert_eq!(exact["objective"], 12000);
    assert_eq!(greedy["objective"], 10000);
}

#[test]
fn empty_auction_clears_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let mut inst = three_bid_showcase();
    inst.bids.clear();
    let path = write(dir.path(), "empty.json", &inst.to_json_pretty());
    let r = cli(&["optimize-forward", s(&path)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let doc = json(&r.out);
    assert_eq!(doc["objective"], 0);
    assert_eq!(doc["response"], Value::Array(vec![]));
}

#[test]
fn export_lp_to_file_and_stdout_agree() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "showcase.json", &three_bid_showcase().to_json_pretty());
    let lp = dir.path().join("model.lp");
    let r = cli(&["export-lp", s(&inst), "-o", s(&lp)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(r.out, "");
    let on_disk = std::fs::read_to_string(&lp).unwrap();
    assert_eq!(cli(&["export-lp", s(&inst)]).out, on_disk);
    assert!(on_disk.starts_with("\\") || on_disk.contains("Maximize"));
    assert!(on_disk.trim_end().ends_with("End"));
}

#[test]
fn synthetic_data_round_trips_through_mining_and_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.tsv");
    let test = dir.path().join("test.tsv");
    assert_eq!(cli(&["gen-synthetic", "--n", "100", "--seed", "5", "-o", s(&train)]).code, EXIT_OK);
    assert_eq!(cli(&["gen-synthetic", "--n", "20", "--seed", "6", "-o", s(&test)]).code, EXIT_OK);
    // Same seed, same bytes.
    let again = cli(&["gen-synthetic", "--n", "100", "--seed", "5"]);
    assert_eq!(again.out, std::fs::read_to_string(&train).unwrap());
    assert!(again.out.starts_with("period_visiting\t"));

    let rules = dir.path().join("rules.txt");
    let r = cli(&[
        "mine-rules",
        s(&train),
        "--support",
        "0.15",
        "--confidence",
        "0.9",
        "--max-antecedents",
        "3",
        "-o",
        s(&rules),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let text = std::fs::read_to_string(&rules).unwrap();
    assert!(text.lines().count() > 0);
    assert!(text.lines().all(|l| l.contains(" → p ") && l.contains("sup=")));

    let r = cli(&["mine-rules", s(&train), "--json"]);
    let mined: Vec<Value> = serde_json::from_str(&r.out).unwrap();
    assert_eq!(mined.len(), text.lines().count());

    let r = cli(&["evaluate", s(&train), s(&test), "--cost", "10"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("\nMAE\t"));
    assert_eq!(r.out.lines().skip(1).filter(|l| l.ends_with(')')).count(), 20);
    let r = cli(&["evaluate", s(&train), s(&test), "--json"]);
    assert_eq!(json(&r.out)["cases"].as_array().unwrap().len(), 20);
}

#[test]
fn gen_forward_writes_a_loadable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let r = cli(&["gen-forward", "--customers", "12", "--days", "10", "--capacities", "3,2", "--seed", "4", "-o", s(&path)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let doc = json(&cli(&["optimize-forward", s(&path)]).out);
    assert_eq!(doc["status"], "optimal");
}

#[test]
fn exit_codes_and_error_documents() {
    let r = cli(&["optimize-forward"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert_eq!(json(r.err.trim())["error"], "usage");

    let r = cli(&["no-such-command"]);
    assert_eq!(r.code, EXIT_USAGE);

    let r = cli(&["optimize-forward", "/nonexistent/instance.json"]);
    assert_eq!(r.code, EXIT_DOMAIN);
    let doc = json(r.err.trim());
    assert!(doc["error"].is_string() && doc["message"].is_string());

    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "showcase.json", &three_bid_showcase().to_json_pretty());
    let r = cli(&["optimize-forward", s(&inst), "--time-limit", "0"]);
    assert_eq!(r.code, EXIT_DOMAIN);

    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(cli(&["optimize-forward", s(&bad)]).code, EXIT_DOMAIN);

    let r = cli(&["gen-synthetic", "--n", "0"]);
    assert_eq!(r.code, EXIT_DOMAIN);

    let r = cli(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("optimize-forward"));
}
