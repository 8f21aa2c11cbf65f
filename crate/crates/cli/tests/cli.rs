use std::fs;
use std::process::{Command, Output};

fn heatreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatreg")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn kernel_check_passes_on_every_manifold() {
    for m in ["circle", "torus2", "sphere2"] {
        let o = heatreg(&["kernel-check", "--manifold", m, "--pairs", "50", "--assert"]);
        assert_eq!(code(&o), 0, "{m}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn sweep_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = heatreg(&[
        "rate-sweep", "--n-grid", "32,64,128", "--seeds", "2", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "manifold,m,t,filter,beta,gamma,R,sigma,n,seed,lambda,error_sq,status,runtime_ms"
    );
    assert_eq!(lines.count(), 6);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("rows.csv");
    fs::write(
        &cfg,
        format!("manifold = \"sphere2\"\nn_grid = [32, 64, 128]\nseeds = 1\nbeta = 0.9\noutput = {:?}\n", out),
    )
    .unwrap();
    let o = heatreg(&["rate-sweep", "--config", cfg.to_str().unwrap(), "--beta", "0.7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("sphere2,2,0.5,"), "{row}");
    assert!(row.contains(",0.7,"), "{row}");
}

#[test]
fn invalid_configuration_exits_with_two() {
    assert_eq!(code(&heatreg(&["rate-sweep", "--beta", "0.2", "--gamma", "0.5"])), 2);
    assert_eq!(code(&heatreg(&["rate-sweep", "--manifold", "klein"])), 2);
    assert_eq!(code(&heatreg(&["effdim", "--t", "-1"])), 2);
    assert_eq!(code(&heatreg(&["minimax-audit", "--a", "0.5"])), 2);
    assert_eq!(code(&heatreg(&["no-such-command"])), 2);
}

#[test]
fn failed_assertion_exits_with_three() {
    let o = heatreg(&["rate-sweep", "--n-grid", "32,64,128", "--seeds", "1", "--slope-tol", "0", "--assert"]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&heatreg(&["effdim", "--manifold", "torus2", "--assert"])), 3);
}

#[test]
fn filter_audit_holds_for_all_families() {
    let o = heatreg(&["filter-audit", "--assert"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("filter,check,value,holds"));
    for fam in ["tikhonov", "cutoff", "landweber"] {
        assert!(text.lines().any(|l| l.starts_with(fam)), "{fam} missing");
    }
}

#[test]
fn minimax_audit_writes_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pairs.csv");
    let o = heatreg(&["minimax-audit", "--assert", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "i,j,hamming,distance_sq,kl");
    assert!(text.lines().count() >= 2);
}

#[test]
fn plot_renders_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let svg = dir.path().join("a.svg");
    let o = heatreg(&["rate-sweep", "--n-grid", "32,64,128", "--seeds", "2", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = heatreg(&["plot", "--input", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert!(text.contains("polyline"));
}
