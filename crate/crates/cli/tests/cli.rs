use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn robnet(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_robnet"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "robnet {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn single_graph_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    robnet(d, &["gen", "--model", "ER", "--nodes", "30", "--edges", "60", "--seed", "4"]);
    let graph = d.join("graph.txt");
    assert!(fs::read_to_string(&graph).unwrap().starts_with("#robnet-graph v1"));
    let g = graph.to_str().unwrap();

    let out = robnet(d, &["simulate", g, "--attack", "td", "--metric", "ctrl"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("delta,value\n"));
    assert_eq!(csv.lines().count(), 1 + 30);

    robnet(d, &["lfr", g, "--w", "10", "--g", "4", "--labeling", "betweenness", "--attrs", "deg,cc,bet"]);
    let bytes = fs::read(d.join("fields.lfr")).unwrap();
    assert_eq!(&bytes[..8], b"RNETLFR1");
    assert_eq!(bytes.len(), 8 + 12 + 4 * 10 * 4 * 3);

    let out = robnet(d, &["spectral", g]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("ac,ef,nc,sg,sr,st_log\n"));
}

#[test]
fn dataset_train_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let data = d.join("data");
    let data_s = data.to_str().unwrap();
    robnet(
        d,
        &[
            "gen", "--models", "ER,BA", "--n-min", "20", "--n-max", "25", "--train", "4",
            "--validation", "2", "--test", "2", "--out-dir", data_s,
        ],
    );
    let manifest = data.join("manifest.tsv");
    let m = manifest.to_str().unwrap();
    robnet(
        d,
        &[
            "train", "--manifest", m, "--w", "10", "--g", "4", "--width", "0.1", "--output-len", "10",
            "--epochs", "2",
        ],
    );
    let ckpt = d.join("lfr-cnn.ckpt");
    assert_eq!(&fs::read(&ckpt).unwrap()[..8], b"RNETCNN1");
    let c = ckpt.to_str().unwrap();

    robnet(d, &["evaluate", "--manifest", m, "--checkpoint", c]);
    let errors = fs::read_to_string(d.join("errors.csv")).unwrap();
    assert!(errors.starts_with("model,lfr-cnn,mean-curve,kw_h,kw_significant\n"));
    assert_eq!(errors.lines().count(), 1 + 3);

    robnet(d, &["rank-table", "--manifest", m, "--checkpoint", c]);
    let rank = fs::read_to_string(d.join("rank.csv")).unwrap();
    assert!(rank.starts_with("model,lfr-cnn,mean-curve,AC,EF,NC,SG,SR,ST,undefined\n"));

    robnet(d, &["plots", "--manifest", m, "--checkpoint", c, "--out-dir", d.join("plots").to_str().unwrap()]);
    assert!(d.join("plots/ra_conn.csv").exists());

    let out = robnet(d, &["bench", "--manifest", m, "--checkpoint", c, "--runs", "2"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("lfr-cnn/lfr,"));

    let out = robnet(d, &["predict", "--checkpoint", c, data.join("graphs/ER-test-0000.graph").to_str().unwrap()]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 10);
}

#[test]
fn bad_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.graph");
    let out = Command::new(env!("CARGO_BIN_EXE_robnet"))
        .args(["simulate", missing.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: opening"));
}
