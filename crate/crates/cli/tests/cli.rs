use std::path::Path;
use std::process::{Command, Output};

fn tollnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tollnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn flows(csv: &str) -> Vec<f64> {
    csv.lines()
        .filter(|l| l.starts_with("flow,"))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn simulate_baseline_converges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = tollnet(&["simulate", "--scenario", "fig4", "--beta", "5", "--tolls", "marginal", "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).trim_end().ends_with("converged"), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with(
        "t,x_i1,x_i2,x_i3,x_i4,x_i5,z_0,z_1,z_2,y_i1,y_i2,y_i3,y_i4,y_i5,w_i1,w_i2,w_i3,w_i4,w_i5,l1_dist,total_latency\n"
    ));
    assert_eq!(csv.lines().count(), 1 + 1 + 35_000 / 10);
}

#[test]
fn long_delay_oscillates_under_feedback_tolls_only() {
    let o = tollnet(&["simulate", "--delay", "20", "--out", "/dev/null"]);
    assert!(o.status.success());
    assert!(stderr(&o).trim_end().ends_with("oscillating"), "{}", stderr(&o));
    let o = tollnet(&["simulate", "--delay", "20", "--tolls", "constant", "--out", "/dev/null"]);
    assert!(o.status.success());
    assert!(stderr(&o).trim_end().ends_with("converged"), "{}", stderr(&o));
}

#[test]
fn identical_flags_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = tollnet(&["simulate", "--horizon", "30", "--delay", "3", "--out", p(out)]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn equilibrium_kinds() {
    let o = tollnet(&["equilibrium", "--scenario", "fig4", "--kind", "social"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let y = flows(&String::from_utf8(o.stdout).unwrap());
    let expect = [0.5, 0.5, 0.0, 0.5, 0.5];
    assert!(y.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-6), "{y:?}");

    let o = tollnet(&["equilibrium", "--kind", "perturbed", "--beta", "20", "--tolls", "marginal"]);
    assert!(o.status.success());
    let yp = flows(&String::from_utf8(o.stdout.clone()).unwrap());
    let d: f64 = yp.iter().zip(expect).map(|(a, b)| (a - b).abs()).sum();
    assert!(d < 0.05, "{d}");
    assert!(stderr(&o).contains("fixed_point_residual"));
}

#[test]
fn single_link_wardrop_carries_all_flow() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    std::fs::write(
        &path,
        r#"{"name": "one", "nodes": ["o", "d"], "origin": "o", "destination": "d",
            "links": [{"id": "e", "tail": "o", "head": "d", "cell": {"family": "exponential", "capacity": 3.0}}],
            "lambda": 1.25,
            "defaults": {"eta": 0.1, "beta": 5.0, "dt": 0.01, "horizon": 10.0, "delay": 0.0, "tolls": "none"}}"#,
    )
    .unwrap();
    let o = tollnet(&["equilibrium", "--scenario", p(&path), "--kind", "wardrop"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(flows(&String::from_utf8(o.stdout).unwrap()), vec![1.25]);
}

#[test]
fn toll_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let eq = dir.path().join("eq.csv");
    let o = tollnet(&["equilibrium", "--kind", "social", "--tolls", "marginal", "--out", p(&eq)]);
    assert!(o.status.success());
    let o = tollnet(&["equilibrium", "--kind", "wardrop", "--tolls", "file", "--toll-file", p(&eq)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let y = flows(&String::from_utf8(o.stdout).unwrap());
    assert!(y.iter().zip([0.5, 0.5, 0.0, 0.5, 0.5]).all(|(a, b)| (a - b).abs() < 1e-6), "{y:?}");
    let o = tollnet(&["simulate", "--tolls", "file"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn exit_codes() {
    let o = tollnet(&["simulate", "--lambda", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not covered"), "{}", stderr(&o));
    let o = tollnet(&["equilibrium", "--scenario", "fig1", "--lambda", "3.5"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"name": "bad", "nodes": ["o", "d"], "origin": "o", "destination": "d",
            "links": [{"id": "e", "tail": "o", "head": "d", "cell": {"family": "exponential"}}],
            "lambda": 1.0,
            "defaults": {"eta": 0.1, "beta": 5.0, "dt": 0.01, "horizon": 10.0, "delay": 0.0, "tolls": "none"}}"#,
    )
    .unwrap();
    let o = tollnet(&["simulate", "--scenario", p(&path)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("capacity"), "{}", stderr(&o));
    assert_eq!(tollnet(&["simulate", "--no-such-flag"]).status.code(), Some(4));
    assert_eq!(tollnet(&["simulate", "--scenario", "/no/such/file.json"]).status.code(), Some(4));
    assert_eq!(tollnet(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("delay.csv");
    let plots = dir.path().join("plots");
    let o = tollnet(&["sweep", "--delay-grid", "0,5,9,10,15,20", "--out", p(&out), "--plot-dir", p(&plots)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    let class = |tolls: &str| -> Vec<&str> { rows.iter().filter(|r| r[2] == tolls).map(|r| r[5]).collect() };
    assert_eq!(
        class("marginal"),
        ["converged", "converged", "converged", "oscillating", "oscillating", "oscillating"]
    );
    assert!(class("constant").iter().all(|c| *c == "converged"));
    assert!(plots.join("sweep.svg").exists());

    let o = tollnet(&["sweep", "--beta-grid", "1,2,5,10,20", "--mode", "perturbed", "--tolls", "marginal"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let d: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert!(d.windows(2).all(|w| w[1] <= w[0]), "{d:?}");
    assert_eq!(tollnet(&["sweep"]).status.code(), Some(4));
}
