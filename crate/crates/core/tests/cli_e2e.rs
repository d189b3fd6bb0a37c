use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_circle-distortion"))
}

#[test]
fn verify_and_expand() {
    let out = bin().args(["verify", "--beta", "1/4096", "--json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["overall"], serde_json::json!(true));

    let out = bin().args(["verify", "--beta", "1/999"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    assert_eq!(bin().arg("expand").status().unwrap().code(), Some(0));
    assert_eq!(bin().arg("bogus").status().unwrap().code(), Some(2));
}

#[test]
fn lemma1_dump() {
    let out = bin().args(["lemma1", "--n", "12", "--dump"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n=12 "));
    assert!(text.contains("# word") && text.contains("# map"));
}

#[test]
fn distortion_files_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, svg) = (dir.path().join("a.csv"), dir.path().join("b.csv"), dir.path().join("g.svg"));
    let run = |csv: &std::path::Path, seq: bool| {
        let mut c = bin();
        c.args(["distortion", "--count", "1", "--csv"]).arg(csv).arg("--svg").arg(&svg);
        if seq {
            c.arg("--sequential");
        }
        c.status().unwrap().code()
    };
    assert_eq!(run(&a, false), Some(0));
    assert_eq!(run(&b, true), Some(0));
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("n,frac_n_alpha_decimal,"));
    assert!(text.lines().nth(1).unwrap().starts_with("985,0.000358937498"));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));

    let missing = dir.path().join("no/such/dir/out.csv");
    assert_eq!(bin().args(["distortion", "--count", "1", "--csv"]).arg(&missing).status().unwrap().code(), Some(3));
}

#[test]
fn distortion_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let status = bin().args(["distortion", "--count", "3", "--csv"]).arg(&csv).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let ns: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["985", "5741", "33461"]);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}
