mod support;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use funnel::cli::IngestSummary;
use funnel::gexf::parse_gexf;
use funnel_core::RawTweet;

fn funnel(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_funnel")).args(args).current_dir(dir).output().unwrap()
}

fn summary(out: &Output) -> IngestSummary {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn line(id: &str, user: &str, text: &str, at: i64) -> String {
    funnel::record::to_record(&RawTweet::new(id, user, text, at)).to_string()
}

#[test]
fn ingest_counts_matches() {
    let dir = tempfile::tempdir().unwrap();
    let lines: Vec<String> = (0..10)
        .map(|i| line(&i.to_string(), "u", if i < 6 { "praying for #MH370" } else { "lunch" }, i))
        .collect();
    fs::write(dir.path().join("in.jsonl"), lines.join("\n")).unwrap();
    let s = summary(&funnel(&["ingest", "--topic", "mh370", "--input", "in.jsonl"], dir.path()));
    assert_eq!((s.parsed, s.matched, s.stored), (10, 6, 6));
}

#[test]
fn ingest_empty_and_malformed() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.jsonl"), "").unwrap();
    let s = summary(&funnel(&["ingest", "--topic", "mh370", "--input", "empty.jsonl"], dir.path()));
    assert_eq!(s, IngestSummary::default());

    let mut lines: Vec<String> = (0..4).map(|i| line(&i.to_string(), "u", "#mh370", i)).collect();
    lines.insert(2, "{\"id\": ".into());
    fs::write(dir.path().join("bad.jsonl"), lines.join("\n")).unwrap();
    let s = summary(&funnel(&["ingest", "--topic", "mh370", "--input", "bad.jsonl"], dir.path()));
    assert_eq!(s.parse_errors, 1);
    assert!(s.stored <= 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(funnel(&["ingest", "--topic", "t", "--input", "missing.jsonl"], dir.path()).status.code(), Some(3));
    assert_eq!(funnel(&["ingest", "--input", "x"], dir.path()).status.code(), Some(1));
    assert_eq!(funnel(&["nonsense"], dir.path()).status.code(), Some(1));
    assert_eq!(funnel(&["bucket", "--topic", "t", "--bucket-hours", "-1"], dir.path()).status.code(), Some(1));
    assert_eq!(funnel(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn pipeline_single_tweet() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.jsonl"), line("TweetA", "UserA", "@UserB @UserC #MH370", 1_395_000_000)).unwrap();
    let out = funnel(&["pipeline", "--topic", "mh370", "--input", "in.jsonl", "--out", "out"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let gexf: Vec<_> = fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "gexf"))
        .collect();
    assert_eq!(gexf.len(), 1);
    let parsed = parse_gexf(&fs::read_to_string(&gexf[0]).unwrap()).unwrap();
    assert_eq!((parsed.graph.node_count(), parsed.graph.edge_count()), (4, 5));
    assert_eq!(parsed.positions.len(), 4);
}

#[test]
fn pipeline_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.jsonl"), "").unwrap();
    let out = funnel(&["pipeline", "--topic", "mh370", "--input", "in.jsonl", "--out", "out"], dir.path());
    assert!(out.status.success());
    let files: Vec<String> = fs::read_dir(dir.path().join("out")).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert_eq!(files, ["signature.csv"]);
    assert_eq!(fs::read_to_string(dir.path().join("out/signature.csv")).unwrap(), "bucket_start_iso,bucket_start_epoch,tweets,actors,mentions\n");
}

#[test]
fn pipeline_six_weeks_one_gexf_per_bucket() {
    let dir = tempfile::tempdir().unwrap();
    let tweets = support::corpus(21, 2500, support::SIX_WEEKS);
    fs::write(dir.path().join("in.jsonl"), support::jsonl(&tweets)).unwrap();
    let out = funnel(&["pipeline", "--topic", "mh370", "--input", "in.jsonl", "--out", "out", "--iterations", "10"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let buckets: std::collections::BTreeSet<i64> = tweets
        .iter()
        .filter(|t| t.text.to_lowercase().contains("mh370"))
        .map(|t| t.created_at / 18_000 * 18_000)
        .collect();
    let gexf = fs::read_dir(dir.path().join("out")).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "gexf")).count();
    assert!(buckets.len() > 150);
    assert_eq!(gexf, buckets.len());
    for b in &buckets {
        assert!(dir.path().join(format!("out/bucket-{b}.gexf")).exists());
        assert!(dir.path().join(format!("out/bucket-{b}-metrics.csv")).exists());
    }
}

#[test]
fn stage_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let lines = [
        line("1", "UserA", "@UserB @UserC #mh370", 0),
        line("2", "UserB", "RT @UserA: #mh370", 10),
        line("3", "UserC", "@UserA #mh370", 20_000),
    ];
    fs::write(dir.path().join("in.jsonl"), lines.join("\n")).unwrap();
    summary(&funnel(&["ingest", "--topic", "mh370", "--input", "in.jsonl"], dir.path()));

    let sig = funnel(&["bucket", "--topic", "mh370"], dir.path());
    assert_eq!(String::from_utf8(sig.stdout).unwrap().lines().count(), 3);

    let build = funnel(&["build", "--topic", "mh370", "--bucket-start", "1970-01-01T00:00:00Z"], dir.path());
    let g = parse_gexf(&String::from_utf8(build.stdout).unwrap()).unwrap().graph;
    assert_eq!(g.node_count(), 5);

    let filt = funnel(&["filter", "--topic", "mh370", "--min-degree", "2", "--drop-retweets"], dir.path());
    let g = parse_gexf(&String::from_utf8(filt.stdout).unwrap()).unwrap().graph;
    assert!(g.nodes().all(|(_, n)| !n.is_retweet));

    let metrics = funnel(&["metrics", "--topic", "mh370"], dir.path());
    let text = String::from_utf8(metrics.stdout).unwrap();
    assert!(text.starts_with("node_id,kind,label,in_deg,out_deg,betweenness,closeness,eigenvector\n"));
    let layout = funnel(&["layout", "--topic", "mh370", "--seed", "3"], dir.path());
    assert!(String::from_utf8(layout.stdout).unwrap().starts_with("node_id,kind,label,in_deg,out_deg,betweenness,closeness,eigenvector,x,y\n"));

    let export = funnel(&["export", "--topic", "mh370", "--format", "gexf", "--dynamic", "--out", "g.gexf"], dir.path());
    assert!(export.status.success());
    assert!(fs::read_to_string(dir.path().join("g.gexf")).unwrap().contains("mode=\"dynamic\""));
    let export = funnel(&["export", "--topic", "mh370", "--format", "csv", "--out", "s.csv"], dir.path());
    assert!(export.status.success());
    assert!(fs::read_to_string(dir.path().join("s.csv")).unwrap().starts_with("bucket_start_iso,"));

    let unknown = funnel(&["build", "--topic", "nsa"], dir.path());
    assert_eq!(unknown.status.code(), Some(3));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.jsonl"), line("1", "UserA", "@UserB snowden", 0)).unwrap();
    fs::write(dir.path().join("cfg.json"), r#"{"topic": "nsa", "keywords": ["snowden"], "store_root": "s1"}"#).unwrap();
    let s = summary(&funnel(&["ingest", "--config", "cfg.json", "--input", "in.jsonl", "--store", "s2"], dir.path()));
    assert_eq!(s.stored, 1);
    assert!(dir.path().join("s2/manifest.json").exists());
    assert!(!dir.path().join("s1").exists());
}

#[test]
fn ingest_from_tcp_stream() {
    let dir = tempfile::tempdir().unwrap();
    let lines: Vec<String> = (0..25).map(|i| line(&i.to_string(), "u", "#mh370", i)).collect();
    let server = funnel::MockStream::serve(lines).unwrap();
    let addr = format!("tcp://{}", server.addr());
    let s = summary(&funnel(&["ingest", "--topic", "mh370", "--input", &addr], dir.path()));
    server.finish().unwrap();
    assert_eq!(s.stored, 25);
}
