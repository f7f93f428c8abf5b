use proptest::prelude::*;
use tvfrft::io::{self, IoError};
use tvfrft_core::graph::build_cycle_time_graph;
use tvfrft_core::linalg::{C64, CMat};
use tvfrft_core::spectral::TimeVertexSignal;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3f64..1e3, any::<f64>().prop_filter("finite", |v| v.is_finite())]
}

proptest! {
    #[test]
    fn random_complex_tables_round_trip_exactly(
        rows in 1usize..6,
        cols in 1usize..6,
        values in proptest::collection::vec((finite(), finite()), 36),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = CMat::from_fn(rows, cols, |i, j| {
            let (re, im) = values[i * cols + j];
            C64::new(re, im)
        });
        io::write_matrix(&path, &m).unwrap();
        let back = io::read_matrix(&path).unwrap();
        let diff = m.iter().zip(back.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert_eq!(back.shape(), m.shape());
        prop_assert_eq!(diff, 0.0);
    }
}

#[test]
fn signal_of_48_vertices_and_4_instants() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let rows: Vec<String> = (0..48).map(|v| (0..4).map(|t| format!("{}.5", v * 4 + t)).collect::<Vec<_>>().join(",")).collect();
    std::fs::write(&path, rows.join("\n") + "\n").unwrap();
    let x = io::read_signal(&path).unwrap();
    assert_eq!((x.n_vertices(), x.n_times()), (48, 4));
    assert_eq!(x.data[(2, 3)], C64::new(11.5, 0.0));
    // Column stacking: vertex 2 at time 3 sits at 3·48 + 2.
    assert_eq!(x.vec()[3 * 48 + 2], C64::new(11.5, 0.0));
}

#[test]
fn signal_round_trip_keeps_complex_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let x = TimeVertexSignal::new(CMat::from_fn(3, 2, |i, j| C64::new(i as f64 / 3.0, -(j as f64) / 7.0)));
    io::write_signal(&path, &x).unwrap();
    assert_eq!(io::read_signal(&path).unwrap(), x);
}

#[test]
fn empty_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    std::fs::write(&path, "").unwrap();
    assert!(matches!(io::read_signal(&path), Err(IoError::Empty { .. })));
    assert!(matches!(io::read_edges(&path, None, false), Err(IoError::Empty { .. }) | Err(IoError::Header { .. })));
}

#[test]
fn malformed_rows_report_their_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "1,2\n3,x\n").unwrap();
    match io::read_signal(&path) {
        Err(IoError::Malformed { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    std::fs::write(&path, "1,2\n3\n").unwrap();
    match io::read_signal(&path) {
        Err(IoError::Malformed { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    std::fs::write(&path, "src,dst,weight\n0,1,1.0\n1,two,1.0\n").unwrap();
    let err = io::read_edges(&path, None, false).unwrap_err();
    assert!(matches!(err, IoError::Malformed { line: 3, .. }), "{err}");
    assert!(err.to_string().contains("line 3"));
}

#[test]
fn headers_are_checked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    std::fs::write(&path, "a,b,c\n0,1,1\n").unwrap();
    assert!(matches!(io::read_edges(&path, None, false), Err(IoError::Header { .. })));
    std::fs::write(&path, "x1,x3\n0,1\n").unwrap();
    assert!(matches!(io::read_points(&path, 0.5, 0.0), Err(IoError::Header { .. })));
}

#[test]
fn edge_lists_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let g = build_cycle_time_graph(5, false).unwrap();
    io::write_edges(&path, &g).unwrap();
    let back = io::read_edges(&path, None, false).unwrap();
    assert_eq!(back.adjacency, g.adjacency);
    let padded = io::read_edges(&path, Some(7), false).unwrap();
    assert_eq!(padded.num_vertices, 7);
}

#[test]
fn point_clouds_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    std::fs::write(&path, "x1,x2\n0,0\n0,0.1\n3,3\n").unwrap();
    let cloud = io::read_points(&path, 0.2, 0.01).unwrap();
    assert_eq!(cloud.points.len(), 3);
    assert_eq!(cloud.points[1], vec![0.0, 0.1]);
}
