use std::path::Path;
use std::process::{Command, Output};

fn hexjet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexjet"))
        .current_dir(dir)
        .env_remove("HEXJET_OUT")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

#[test]
fn models_lists_the_catalogue() {
    let dir = tempfile::tempdir().unwrap();
    let o = hexjet(dir.path(), &["models"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let turbo = s.split("# g_edf").next().unwrap();
    assert!(turbo.contains("numerator = [0.01866]"));
    assert!(turbo.contains("denominator = [1.0, -0.9879]"));
    assert!(turbo.contains("delay_samples = 25"));
    assert!(turbo.contains("sample_time = 0.004"));
    assert!(s.contains("a = [[0.9991, 0.0023], [-0.6953, 0.8777]]"));
}

#[test]
fn bench_step_reports_unstable_runs_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = hexjet(dir.path(), &["bench-step"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let out = dir.path().join("out/bench-step");
    for f in ["metrics.jsonl", "report.csv", "report.txt", "plot.gp", "traces/step-smith-h25.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let metrics = std::fs::read_to_string(out.join("metrics.jsonl")).unwrap();
    assert_eq!(metrics.lines().count(), 12);
    assert!(stdout(&o).contains("UNSTABLE"));
}

#[test]
fn out_env_sets_the_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hexjet"))
        .current_dir(dir.path())
        .env("HEXJET_OUT", dir.path().join("elsewhere"))
        .args(["bench-step", "--set", "matrix.delays=[0]", "--set", "matrix.variants=[\"smith\"]"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("elsewhere/bench-step/metrics.jsonl").is_file());
}

#[test]
fn empty_matrix_warns_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = hexjet(dir.path(), &["bench-dist", "--set", "matrix.delays=[]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    assert!(!dir.path().join("out/bench-dist").exists());
}

#[test]
fn schema_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[experiment]\nkind = \"tracking\"\nduration = \"long\"\n").unwrap();
    let o = hexjet(dir.path(), &["simulate", "--config", "bad.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("line 3"), "{e}");
    assert!(e.contains("expected f64"), "{e}");
}

#[test]
fn unknown_override_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = hexjet(dir.path(), &["bench-step", "--set", "controller.rate.kq=1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("controller.rate.kq"), "{}", stderr(&o));
    let o = hexjet(dir.path(), &["bench-step", "--set", "controller.katt"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_config_is_a_tool_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = hexjet(dir.path(), &["simulate", "--config", "nope.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let o = hexjet(dir.path(), &["margins"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let sim = configs().join("simulate.toml");
    let sim = sim.to_str().unwrap();
    let a = hexjet(dir.path(), &["simulate", "--config", sim, "--out", "a", "--jobs", "1"]);
    let b = hexjet(dir.path(), &["simulate", "--config", sim, "--out", "b", "--jobs", "4"]);
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(stdout(&a).replace("to a", ""), stdout(&b).replace("to b", ""));
    for f in ["metrics.jsonl", "traces/state-h5-noisy.csv", "traces/smith-h25-doublet.csv", "plot.gp"] {
        let x = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn seed_flag_changes_noisy_runs() {
    let dir = tempfile::tempdir().unwrap();
    let sim = configs().join("simulate.toml");
    let sim = sim.to_str().unwrap();
    hexjet(dir.path(), &["simulate", "--config", sim, "--out", "a", "--seed", "1"]);
    hexjet(dir.path(), &["simulate", "--config", sim, "--out", "b", "--seed", "2"]);
    let x = std::fs::read(dir.path().join("a/traces/state-h5-noisy.csv")).unwrap();
    let y = std::fs::read(dir.path().join("b/traces/state-h5-noisy.csv")).unwrap();
    assert!(x != y);
}

#[test]
fn sweep_fit_margins_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("sweep.toml"),
        "seed = 3\n[model]\nbuiltin = \"g_edf\"\n[sweep]\nf_start = 0.5\nf_end = 100.0\nduration = 120.0\namplitude = 1.0\nsample_time = 0.004\ntaper_fraction = 0.02\n",
    )
    .unwrap();
    let o = hexjet(d, &["sysid-sweep", "--config", "sweep.toml", "--out", "sweep"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    std::fs::write(
        d.join("fit.toml"),
        "log = \"sweep/sweep.csv\"\nname = \"edf\"\n[estimate]\nnperseg = 2048\n[fit]\nnum_order = 0\nden_order = 1\nh_min = 0\nh_max = 10\ncoherence_threshold = 0.9\nband = [1.0, 90.0]\n",
    )
    .unwrap();
    let o = hexjet(d, &["sysid-fit", "--config", "fit.toml", "--out", "fit"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let model = std::fs::read_to_string(d.join("fit/model.toml")).unwrap();
    assert!(model.contains("delay_samples = 0"), "{model}");
    let fit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("fit/fit.json")).unwrap()).unwrap();
    let pole = fit["poles"][0][0].as_f64().unwrap();
    assert!((pole - 0.8748).abs() / 0.8748 < 0.01, "pole {pole}");

    std::fs::write(d.join("margins.toml"), "gain = 0.3\nadded_delay = 25\n[model]\nfile = \"fit/model.toml\"\n").unwrap();
    let o = hexjet(d, &["margins", "--config", "margins.toml", "--out", "m"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("delay 25 samples"));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("m/margins.json")).unwrap()).unwrap();
    // DC loop gain 0.3 * 2.04 < 1: no crossover, positive gain margin.
    assert!(m["crossover_hz"].is_null());
    assert!(m["gain_margin_db"].as_f64().unwrap() > 0.0);
    assert!(d.join("m/bode.csv").is_file());
}

#[test]
fn report_recomputes_tables_from_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = hexjet(d, &["bench-payload", "--set", "matrix.delays=[5]", "--out", "p"]);
    assert!(matches!(o.status.code(), Some(0 | 2)), "{}", stderr(&o));
    assert!(d.join("p/payload_report.txt").is_file());
    let o = hexjet(d, &["report", "--input", "p/metrics.jsonl", "--payload", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        std::fs::read(d.join("r/report.csv")).unwrap(),
        std::fs::read(d.join("p/payload_report.csv")).unwrap()
    );
    let o = hexjet(d, &["report", "--input", "p/metrics.jsonl", "--baseline", "no-such-run", "--out", "r"]);
    assert_eq!(o.status.code(), Some(1));
}
