use std::process::{Command, Output};

fn polyfe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyfe")).args(args).output().expect("run polyfe")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

/// `(basis, x, y, qx, qy)` rows of a basis-dump CSV.
fn dump_rows(text: &str) -> Vec<(usize, f64, f64, f64, f64)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect()
}

/// Last row's value in `column` of a convergence CSV.
fn last_order(csv: &str, column: &str) -> f64 {
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == column).unwrap();
    csv.lines().last().unwrap().split(',').nth(k).unwrap().parse().unwrap()
}

#[test]
fn verify_octahedron_is_type_ii() {
    let out = polyfe(&["verify", "--shape", "octahedron"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"][0]["classification"]["kind"], "TypeII");
}

#[test]
fn verify_cube_dimensions() {
    let out = polyfe(&["verify", "--shape", "cube"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["reports"][0]["dims"], serde_json::json!([8, 12, 6]));
}

#[test]
fn verify_all_builtin_shapes() {
    let out = polyfe(&["verify", "--all"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["reports"].as_array().unwrap().len(), 7);
}

#[test]
fn malformed_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.poly");
    std::fs::write(&path, "POLYMESH 3\nVERTICES 2\n0 0 0\n").unwrap();
    let out = polyfe(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn non_planar_face_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("warped.poly");
    let text = "POLYMESH 3\nVERTICES 8\n0 0 0\n1 0 0\n1 1 0.2\n0 1 0\n0 0 1\n1 0 1\n1 1 1\n0 1 1\nCELLS 1\nCELL 6\n\
                4 0 3 2 1\n4 4 5 6 7\n4 0 1 5 4\n4 1 2 6 5\n4 2 3 7 6\n4 3 0 4 7\n";
    std::fs::write(&path, text).unwrap();
    let out = polyfe(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("face"));
}

#[test]
fn tightened_tolerance_reports_failure() {
    let out = polyfe(&["verify", "--shape", "cube", "--duality-tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn unknown_flag_is_rejected() {
    assert_eq!(polyfe(&["verify", "--shape", "cube", "--bogus"]).status.code(), Some(2));
    assert_eq!(polyfe(&["verify", "--shape", "dodecahedron"]).status.code(), Some(2));
}

#[test]
fn basis_dump_pentagon_has_five_tables() {
    let out = polyfe(&["basis-dump", "--shape", "pentagon", "--grid", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = dump_rows(&stdout(&out));
    let per: Vec<usize> = (0..5).map(|i| rows.iter().filter(|r| r.0 == i).count()).collect();
    assert!(per[0] > 100 && per.iter().all(|&c| c == per[0]), "{per:?}");
    assert_eq!(rows.len(), 5 * per[0]);
}

#[test]
fn basis_dump_triangle_matches_rt0() {
    let out = polyfe(&["basis-dump", "--shape", "triangle"]);
    let v = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
    let len = [1.0, 2f64.sqrt(), 1.0];
    for (i, x, y, qx, qy) in dump_rows(&stdout(&out)) {
        // q_i = |e_i| / (2|T|) (x - v_{i+2}) with |T| = 1/2.
        let o = v[(i + 2) % 3];
        assert!((qx - len[i] * (x - o.0)).abs() < 1e-12 && (qy - len[i] * (y - o.1)).abs() < 1e-12);
    }
}

#[test]
fn basis_dump_square_matches_rectangular_rt() {
    let out = polyfe(&["basis-dump", "--shape", "square", "--format", "json"]);
    let v = json(&out);
    let exact = |i: u64, x: f64, y: f64| match i {
        0 => (0.0, y - 1.0),
        1 => (x, 0.0),
        2 => (0.0, y),
        _ => (x - 1.0, 0.0),
    };
    for s in v["samples"].as_array().unwrap() {
        let (x, y) = (s["x"].as_f64().unwrap(), s["y"].as_f64().unwrap());
        let e = exact(s["basis"].as_u64().unwrap(), x, y);
        assert!((s["qx"].as_f64().unwrap() - e.0).abs() < 1e-12);
        assert!((s["qy"].as_f64().unwrap() - e.1).abs() < 1e-12);
    }
}

#[test]
fn convergence_quad_smooth() {
    let out = polyfe(&["convergence", "--family", "quad", "--levels", "4,8,16,32", "--problem", "smooth"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert!(csv.starts_with("N,h,err_p,ord_p,err_divp,ord_divp,err_u,ord_u\n"));
    let o = last_order(&csv, "ord_p");
    assert!((0.85..=1.15).contains(&o), "{csv}");
}

#[test]
fn convergence_cvt_smooth_u_order() {
    let out = polyfe(&["convergence", "--family", "cvt", "--seed", "1", "--problem", "smooth"]);
    let o = last_order(&stdout(&out), "ord_u");
    assert!((0.85..=1.15).contains(&o), "{o}");
}

#[test]
fn convergence_rough_flux_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = polyfe(&["convergence", "--family", "quad", "--problem", "rough", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!((0.4..=0.6).contains(&last_order(&csv, "ord_p")), "{csv}");
    // The divergence columns stay empty.
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(4) == Some("")));
}

#[test]
fn output_is_deterministic() {
    let args = ["convergence", "--family", "cvt", "--levels", "4,8", "--seed", "3"];
    assert_eq!(polyfe(&args).stdout, polyfe(&args).stdout);
    let mesh = ["meshgen", "--family", "cvt", "-n", "6", "--seed", "3"];
    assert_eq!(polyfe(&mesh).stdout, polyfe(&mesh).stdout);
}

#[test]
fn meshgen_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hex.poly");
    let out = polyfe(&["meshgen", "--family", "hexdual", "-n", "4", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = polyfe(&["basis2d", "--input", path.to_str().unwrap(), "--cell", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["duality_residual"].as_f64().unwrap() < 1e-6);
    let out = polyfe(&["basis2d", "--input", path.to_str().unwrap(), "--cell", "999"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gbc_eval_cube_center() {
    let out = polyfe(&["gbc-eval", "--solid", "--shape", "cube", "--point", "0.5,0.5,0.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for l in v[0]["values"].as_array().unwrap() {
        assert!((l.as_f64().unwrap() - 0.125).abs() < 1e-14);
    }
    let out = polyfe(&["gbc-eval", "--shape", "square", "--point", "2,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn basis3d_reports_duality() {
    let out = polyfe(&["basis3d", "--shape", "prism"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dims"], serde_json::json!([6, 9, 5]));
    assert!(v["face_duality"].as_f64().unwrap() < 1e-4 && v["edge_duality"].as_f64().unwrap() < 1e-4);
}
