use swed::interface::InterfaceState;
use swed::mesh::{Bathymetry, TriMesh};
use swed::output::{SnapshotView, CSV_HEADER};
use swed::reconstruction::Desingularization;
use swed::scenario::{OutputFormat, ScenarioConfig, ScenarioId};
use swed::state::{PhysicsParams, State};
use vtkio::model::{Attribute, DataSet, Piece, VertexNumbers};

fn two_cells() -> (TriMesh, Bathymetry, State) {
    let mesh = TriMesh::from_cells(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![[0, 1, 2], [0, 2, 3]]).unwrap();
    let bathy = Bathymetry::from_vertex_values(&mesh, vec![0.0, 0.1, 0.2, 0.1]).unwrap();
    let mut state = State::zeros(2);
    state.u[0] = [1.0 / 3.0, 0.1, -0.2, 997.0 / 7.0, 0.25, 1.0];
    state.u[1] = [1.25, 1e-17, 3.0, 1234.5, -0.5, 0.0];
    (mesh, bathy, state)
}

fn view_csv(mesh: &TriMesh, bathy: &Bathymetry, state: &State) -> String {
    let iface = InterfaceState::build(mesh, state);
    let desing = Desingularization::new(mesh.max_area(), &PhysicsParams::default());
    let mut buf = Vec::new();
    SnapshotView { mesh, bathy, state, interface: &iface, desing: &desing, time: 0.0 }.write_csv(&mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn csv_has_header_and_one_row_per_cell() {
    let (mesh, bathy, state) = two_cells();
    let text = view_csv(&mesh, &bathy, &state);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], CSV_HEADER);
    let ncol = CSV_HEADER.split(',').count();
    assert!(lines[1..].iter().all(|l| l.split(',').count() == ncol));
}

#[test]
fn csv_values_round_trip_exactly() {
    let (mesh, bathy, state) = two_cells();
    let text = view_csv(&mesh, &bathy, &state);
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    for (j, line) in text.lines().skip(1).enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        for (name, m) in [("w", 0), ("hu", 1), ("hv", 2), ("hrho", 3), ("phi", 4), ("f", 5)] {
            let v: f64 = f[col(name)].parse().unwrap();
            assert_eq!(v.to_bits(), state.u[j][m].to_bits(), "cell {j} column {name}");
        }
        let x: f64 = f[col("x")].parse().unwrap();
        assert_eq!(x, mesh.geom[j].centroid[0]);
    }
}

#[test]
fn mixed_cells_carry_chord_endpoints() {
    let (mesh, bathy, state) = two_cells();
    let iface = InterfaceState::build(&mesh, &state);
    let text = view_csv(&mesh, &bathy, &state);
    for (j, line) in text.lines().skip(1).enumerate() {
        let last = line.rsplit(',').next().unwrap();
        assert_eq!(iface.segments[j].is_some(), !last.is_empty(), "cell {j}: {line}");
    }
}

#[test]
fn vtk_is_read_back_by_an_independent_parser() {
    let cfg = ScenarioConfig { nx: 4, ny: 3, end_time: 0.0, ..ScenarioConfig::preset(ScenarioId::Example1Flat) };
    let sim = cfg.simulation().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap.vtk");
    swed::output::write_snapshot(&sim, &path, OutputFormat::Vtk).unwrap();

    let vtk = vtkio::Vtk::import(&path).unwrap();
    let DataSet::UnstructuredGrid { pieces, .. } = vtk.data else { panic!("not an unstructured grid") };
    let Piece::Inline(piece) = &pieces[0] else { panic!("piece not inline") };
    let n = sim.mesh.n_cells();
    assert_eq!(piece.num_points(), sim.mesh.n_vertices());
    assert_eq!(piece.cells.types.len(), n);
    match &piece.cells.cell_verts {
        VertexNumbers::Legacy { num_cells, vertices } => {
            assert_eq!(*num_cells as usize, n);
            let c = sim.mesh.cells[n - 1];
            assert_eq!(&vertices[4 * (n - 1)..], &[3, c[0] as u32, c[1] as u32, c[2] as u32]);
        }
        other => panic!("unexpected connectivity {other:?}"),
    }
    let w = piece
        .data
        .cell
        .iter()
        .find_map(|a| match a {
            Attribute::DataArray(d) if d.name == "w" => d.data.clone().cast_into::<f64>(),
            _ => None,
        })
        .expect("w array");
    let expect: Vec<f64> = sim.state.u.iter().map(|v| v[0]).collect();
    assert_eq!(w, expect);
}

#[test]
fn unwritable_path_is_an_io_error() {
    let cfg = ScenarioConfig { nx: 2, ny: 2, ..ScenarioConfig::preset(ScenarioId::Custom) };
    let sim = cfg.simulation().unwrap();
    let err = swed::output::write_snapshot(&sim, std::path::Path::new("/nonexistent/dir/x.csv"), OutputFormat::Csv).unwrap_err();
    assert!(matches!(err, swed::SwedError::Io(_)), "{err}");
}
