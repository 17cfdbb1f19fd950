use std::path::Path;
use std::process::{Command, Output};

use uav_aoi::experiments::{load_checkpoint, Checkpoint, RunRecord};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uav-aoi")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = "[run]\nmode = \"train\"\neval_episodes = 30\nseed = 3\n\n[env]\ndevices = 4\n\n[agent]\nepisodes = 120\nbatch = 16\n";

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.ends_with('\n'));
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn train_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("run");
    let o = cli(&["train", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));

    let rows = csv_rows(&out.join("learning_curve.csv"));
    assert_eq!(rows[0], ["episode", "return", "loss", "epsilon"]);
    assert_eq!(rows.len(), 121);
    assert_eq!(rows[1][3], "1");

    let record: RunRecord =
        serde_json::from_str(&std::fs::read_to_string(out.join("run_record.json")).unwrap()).unwrap();
    let learning = record.learning.unwrap();
    assert_eq!(rows[120][1], format!("{}", learning.returns[119]));
    assert_eq!(record.seed, 3);

    // the snapshot reproduces the run configuration
    let snapshot = out.join("resolved_config.toml").to_str().unwrap().to_string();
    let cp = out.join("checkpoint.aoiq");
    let eval_out = dir.path().join("eval");
    let o = cli(&[
        "eval",
        "--checkpoint",
        cp.to_str().unwrap(),
        "--config",
        &snapshot,
        "--episodes",
        "30",
        "--out",
        eval_out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let age = csv_rows(&eval_out.join("age_curve.csv"));
    assert_eq!(age[0], ["slot", "mean_age_dqn", "mean_age_rw"]);
    assert_eq!(age[1], ["0", "1", "1"]);
    let rw: Vec<f64> = age[1..].iter().map(|r| r[2].parse().unwrap()).collect();
    // late slots average fewer surviving episodes, so only the early trend is strict
    let half = rw.len() / 2;
    assert!(
        rw[..=half].windows(2).all(|w| w[1] > w[0]),
        "random-walk age should rise: {rw:?}"
    );
    assert!(rw[rw.len() - 1] > rw[half], "{rw:?}");

    let energy = csv_rows(&eval_out.join("energy_curve.csv"));
    assert_eq!(energy[0], ["slot", "mean_quanta_dqn", "mean_quanta_rw"]);
    for col in [1, 2] {
        let v: Vec<f64> = energy[1..].iter().map(|r| r[col].parse().unwrap()).collect();
        assert_eq!(v[0], 200.0);
        assert!(v.windows(2).all(|w| w[1] < w[0]), "energy must fall every slot: {v:?}");
    }

    // save -> load -> save is byte-identical
    let bytes = std::fs::read(&cp).unwrap();
    assert_eq!(load_checkpoint(&cp).unwrap().encode(), bytes);
}

#[test]
fn mode_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        "[run]\nmode = \"sweep\"\n[sweep]\naxis = \"device_count\"\nvalues = [2]\n",
    );
    let o = cli(&["train", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("run.mode"), "{}", stderr(&o));

    let cfg = write(dir.path(), "train.toml", SMALL);
    let o = cli(&["sweep", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_config_reports_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "[env]\ndevices = 4\n\n[env.grid]\ncells_x = 12\n",
    );
    let o = cli(&["train", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("bad.toml:5: env.grid.cells_x"), "{msg}");

    let cfg = write(dir.path(), "typo.toml", "[agent]\nepisodes = 10\nbatchsize = 4\n");
    let o = cli(&["train", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("typo.toml:3:") && msg.contains("batchsize"), "{msg}");

    let o = cli(&["train"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn incompatible_and_damaged_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(
        dir.path(),
        "two.toml",
        "[run]\nseed = 1\n[env]\nuavs = 2\ndevices = 2\n[agent]\nepisodes = 3\nbatch = 4\nhidden = [8]\nbuffer_capacity = 100\n",
    );
    let out = dir.path().join("two");
    let o = cli(&["train", "--config", &two, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cp = out.join("checkpoint.aoiq");

    let one = write(dir.path(), "one.toml", "[env]\ndevices = 2\n");
    let o = cli(&[
        "eval",
        "--checkpoint",
        cp.to_str().unwrap(),
        "--config",
        &one,
        "--episodes",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("U=2 D=2") && msg.contains("U=1 D=2"), "{msg}");

    let bytes = std::fs::read(&cp).unwrap();
    let cut = dir.path().join("cut.aoiq");
    std::fs::write(&cut, &bytes[..bytes.len() - 3]).unwrap();
    let o = cli(&[
        "eval",
        "--checkpoint",
        cut.to_str().unwrap(),
        "--config",
        &two,
        "--episodes",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("truncated"), "{}", stderr(&o));
    assert!(Checkpoint::decode(&bytes[..bytes.len() - 3]).is_err());
}

#[test]
fn single_value_sweep_matches_eval() {
    let dir = tempfile::tempdir().unwrap();
    let base = "eval_episodes = 25\nseed = 8\n\n[env]\ndevices = 3\n\n[agent]\nepisodes = 80\nbatch = 16\n";
    let train_cfg = write(dir.path(), "t.toml", &format!("[run]\nmode = \"train\"\n{base}"));
    let sweep_cfg = write(
        dir.path(),
        "s.toml",
        &format!("[run]\nmode = \"sweep\"\n{base}\n[sweep]\naxis = \"device_count\"\nvalues = [3]\n"),
    );
    let t = dir.path().join("t");
    let s = dir.path().join("s");
    assert!(cli(&["train", "--config", &train_cfg, "--out", t.to_str().unwrap()])
        .status
        .success());
    let cp = t.join("checkpoint.aoiq");
    let o = cli(&[
        "eval",
        "--checkpoint",
        cp.to_str().unwrap(),
        "--config",
        &train_cfg,
        "--out",
        t.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = cli(&["sweep", "--config", &sweep_cfg, "--out", s.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));

    let eval: RunRecord = serde_json::from_str(&std::fs::read_to_string(t.join("eval_record.json")).unwrap()).unwrap();
    let rows = csv_rows(&s.join("sweep.csv"));
    assert_eq!(
        rows[0],
        ["axis_value", "policy", "uavs", "mean_aoi", "mean_final_energy", "seed"]
    );
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let p = eval.policy(&row[1]).unwrap();
        assert_eq!(row[0], "3");
        assert_eq!(row[3], format!("{}", p.time_avg_aoi));
        assert_eq!(row[4], format!("{}", p.mean_final_energy));
        assert_eq!(row[5], "8");
    }

    // the cached network is the one `train` produced
    let cached: Vec<_> = std::fs::read_dir(s.join("cache")).unwrap().collect();
    assert_eq!(cached.len(), 1);
    let cached = cached[0].as_ref().unwrap().path();
    assert_eq!(std::fs::read(cached).unwrap(), std::fs::read(&cp).unwrap());

    // a second sweep reuses the cache and reproduces the table
    let first = std::fs::read(s.join("sweep.csv")).unwrap();
    assert!(cli(&["sweep", "--config", &sweep_cfg, "--out", s.to_str().unwrap()])
        .status
        .success());
    assert_eq!(std::fs::read(s.join("sweep.csv")).unwrap(), first);
}

#[test]
fn verify_passes() {
    let o = cli(&["verify", "--steps", "5000"]);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{out}");
    assert!(out.contains("PASS  rotor_power"));
    assert!(out.contains("oracle_dp_vs_exhaustive[9]"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            uav_aoi::experiments::ExperimentConfig::load(&path).unwrap();
            n += 1;
        }
    }
    assert!(n >= 5);
}
