use std::path::Path;
use std::process::{Command, Output};

fn delineate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delineate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn single_pixel_wkt() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("one.pbm");
    std::fs::write(&mask, "P1\n1 1\n1\n").unwrap();
    let out = delineate(&["delineate", "--input", path(&mask), "--format", "wkt"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))\n");
}

#[test]
fn missing_input_exits_one() {
    let out = delineate(&["delineate", "--input", "/nonexistent/mask.pbm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("bad.pbm");
    std::fs::write(&mask, "P1\n2 2\n1 0 1").unwrap();
    let out = delineate(&["delineate", "--input", path(&mask)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncated"));

    std::fs::write(&mask, "P1\n1 1\n1\n").unwrap();
    let world = dir.path().join("bad.wld");
    std::fs::write(&world, "1\n0\n0\n-1\n0.5\n").unwrap();
    let out = delineate(&["delineate", "--input", path(&mask), "--world", path(&world)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn empty_mask_gives_empty_collection() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("empty.txt");
    std::fs::write(&mask, "000\n000\n").unwrap();
    let out = delineate(&["delineate", "--input", path(&mask)]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "{\"type\":\"FeatureCollection\",\"features\":[]}\n");
}

#[test]
fn world_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("frame.txt");
    std::fs::write(&mask, "111\n101\n111\n").unwrap();
    let world = dir.path().join("frame.wld");
    std::fs::write(&world, "2\n0\n0\n-2\n101\n49\n").unwrap();
    let geojson = dir.path().join("out.geojson");
    let out = delineate(&[
        "delineate", "--input", path(&mask), "--world", path(&world),
        "--crs", "EPSG:3857", "--output", path(&geojson),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&geojson).unwrap();
    assert_eq!(
        text,
        concat!(
            r#"{"type":"FeatureCollection","crs":{"type":"name","properties":{"name":"EPSG:3857"}},"#,
            r#""features":[{"type":"Feature","geometry":{"type":"Polygon","coordinates":"#,
            r#"[[[100,50],[100,44],[106,44],[106,50],[100,50]],[[102,48],[104,48],[104,46],[102,46],[102,48]]]},"#,
            r#""properties":{}}]}"#,
            "\n"
        )
    );

    let rings = delineate(&["delineate", "--input", path(&mask), "--format", "rings-geojson"]);
    assert_eq!(stdout(&rings).matches("LineString").count(), 2);
    let split = delineate(&["delineate", "--input", path(&mask), "--no-assemble", "--format", "wkt"]);
    assert!(stdout(&split).starts_with("MULTIPOLYGON"));
    let both = delineate(&["delineate", "--input", path(&mask), "--no-assemble", "--assemble", "--format", "wkt"]);
    assert!(stdout(&both).starts_with("POLYGON"));
}

#[test]
fn gen_extremes_and_determinism() {
    let zero = delineate(&["gen", "--width", "4", "--height", "2", "--p", "0", "--ascii"]);
    assert_eq!(stdout(&zero), "P1\n4 2\n0000\n0000\n");
    let one = delineate(&["gen", "--width", "4", "--height", "2", "--p", "1", "--ascii"]);
    assert_eq!(stdout(&one), "P1\n4 2\n1111\n1111\n");

    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.pbm"), dir.path().join("b.pbm"));
    for target in [&a, &b] {
        let out = delineate(&[
            "gen", "--width", "100", "--height", "80", "--p", "0.4", "--seed", "17",
            "--output", path(target),
        ]);
        assert!(out.status.success());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert!(bytes.starts_with(b"P4\n100 80\n"));
    assert_eq!(bytes, std::fs::read(&b).unwrap());

    let bad = delineate(&["gen", "--width", "4", "--height", "2", "--p", "1.5"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn bench_rejects_zero_size() {
    let out = delineate(&["bench", "--sizes", "0"]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn bench_small_grid() {
    let out = delineate(&["bench", "--sizes", "8,16", "--p-steps", "2", "--trials", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "size,p,trials,mean_seconds,stddev_seconds");
    assert!(lines[1].starts_with("8,0,1,"));
    assert!(lines[4].starts_with("16,1,1,"));
}

#[test]
fn bench_defaults_pass_shape_check() {
    let out = delineate(&["bench", "--check-shape"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout(&out).lines().count(), 34);
}
