//! Driving the command line end to end: generate data, train, evaluate and
//! export box outlines plus a decision grid for plotting.

use morphbox::cli::run;

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let steps: [Vec<String>; 4] = [
        vec![
            "gen".into(),
            "--samples".into(),
            "300".into(),
            "--centers".into(),
            "6".into(),
            "-o".into(),
            p("data.csv"),
        ],
        vec![
            "train".into(),
            p("data.csv"),
            "--boxes".into(),
            "2".into(),
            "-o".into(),
            p("model.json"),
        ],
        vec!["eval".into(), p("model.json"), p("data.csv")],
        vec![
            "export-plot-data".into(),
            p("model.json"),
            p("data.csv"),
            "--resolution".into(),
            "40".into(),
            "--out-dir".into(),
            p(""),
        ],
    ];
    for args in steps {
        let code = run(std::iter::once("morphbox".to_string()).chain(args.clone()));
        assert_eq!(code, 0, "{args:?} failed");
    }
    let boxes = std::fs::read_to_string(dir.path().join("hyperboxes.csv")).unwrap();
    print!("{boxes}");
    let grid = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    println!("grid.csv: {} rows", grid.lines().count() - 1);
}
