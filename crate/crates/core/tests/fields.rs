use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C;
use radpol::algebra::Complex2x2;
use radpol::fields::{
    emit_map, hg_mode, read_csv, render, spatial_mode, Grid, MapFormat, MapLayer, ModeMap, SpatialMode,
};
use radpol::states::{radial_beam, TwoQubitAmplitudes};

#[test]
fn csv_round_trip_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("radial.csv");
    let g = Grid::new(40, 30, 2.5, 1.0).unwrap();
    let map = render(&radial_beam(), &g);
    emit_map(&map, &path, MapFormat::Csv).unwrap();
    let back = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!((back.grid.nx, back.grid.ny), (40, 30));
    assert!((back.grid.extent - 2.5).abs() < 1e-9);
    assert!(back.max_abs_diff(&map) < 1e-9);
}

#[test]
fn pixmap_matches_grid() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(33, 17, 3.0, 1.0).unwrap();
    let map = render(&radial_beam(), &g);
    for layer in [MapLayer::Intensity, MapLayer::PhaseX, MapLayer::PhaseY] {
        let path = dir.path().join("m.ppm");
        emit_map(&map, &path, MapFormat::Pixmap(layer)).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header = b"P6\n33 17\n255\n";
        assert!(bytes.starts_with(header));
        assert_eq!(bytes.len(), header.len() + 33 * 17 * 3);
    }
}

#[test]
fn unwritable_path_is_io_error() {
    let g = Grid::square(4, 1.0).unwrap();
    let err = emit_map(&render(&radial_beam(), &g), std::path::Path::new("/nonexistent/dir/x.csv"), MapFormat::Csv);
    assert!(matches!(err, Err(radpol::Error::Io(_))));
}

#[test]
fn hg_modes_are_orthonormal() {
    let g = Grid::default();
    let modes = [hg_mode(0, 0, &g), hg_mode(1, 0, &g), hg_mode(0, 1, &g)];
    for (i, a) in modes.iter().enumerate() {
        for (j, b) in modes.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((a.overlap(b) - want).norm() < 1e-6, "({i}, {j})");
        }
    }
    assert!(modes[1].overlap(&modes[2]).norm() < 1e-10);
}

#[test]
fn rotated_and_doughnut_modes_decompose() {
    let g = Grid::square(128, 3.0).unwrap();
    let p10 = spatial_mode(SpatialMode::Hg10, &g);
    let p01 = spatial_mode(SpatialMode::Hg01, &g);
    let h = C::new(FRAC_1_SQRT_2, 0.0);
    let ih = C::new(0.0, FRAC_1_SQRT_2);
    let cases = [
        (SpatialMode::Plus, h, h),
        (SpatialMode::Minus, h, -h),
        (SpatialMode::Left, h, ih),
        (SpatialMode::Right, h, -ih),
    ];
    for (mode, a, b) in cases {
        let direct = spatial_mode(mode, &g);
        let combined = ModeMap::combine(a, &p10, b, &p01);
        assert!(direct.max_abs_diff(&combined) < 1e-13, "{mode:?}");
    }
}

#[test]
fn radial_beam_polarization_is_unpolarized_on_average() {
    let g = Grid::default();
    let rho = render(&radial_beam(), &g).polarization_coherency();
    let half = Complex2x2::identity().scale(C::new(0.5, 0.0));
    assert!(rho.0.max_abs_diff(&half) < 1e-4);
}

#[test]
fn hg10_input_is_uniformly_horizontal() {
    let g = Grid::square(32, 3.0).unwrap();
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let map = render(&TwoQubitAmplitudes([one, zero, zero, zero]), &g);
    assert!(map.ey.iter().all(|v| v.norm() == 0.0));
    for s in map.local_stokes() {
        if s.0[0] > 1e-12 {
            assert!((s.0[3] / s.0[0] - 1.0).abs() < 1e-12);
        }
    }
    assert!((map.total_power() - 1.0).abs() < 1e-3);
}

#[test]
fn radial_local_polarization_points_outward() {
    let g = Grid::square(64, 3.0).unwrap();
    let map = render(&radial_beam(), &g);
    for (k, (x, y)) in g.coords().enumerate() {
        let [ex, ey] = map.jones(k);
        // Local field is real and parallel to (x, y).
        assert!((ex.re * y - ey.re * x).abs() < 1e-12);
        assert!(ex.im == 0.0 && ey.im == 0.0);
    }
}
