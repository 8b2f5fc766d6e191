//! Cross-checks between the grid solver, the Fourier-side integrals and the
//! grid file format.

use std::f64::consts::PI;

use strongdamp::analysis::{solution_l2_sq, DataPair};
use strongdamp::data::InitialDatumSpec;
use strongdamp::oracle::{grid_evolve, read_grid, read_sidecar, write_grid, GridField, GridSpec};

fn evolve_norm(u0: &InitialDatumSpec, u1: &InitialDatumSpec, spec: GridSpec, t: f64) -> f64 {
    let a = GridField::from_datum(u0, spec).unwrap();
    let b = GridField::from_datum(u1, spec).unwrap();
    grid_evolve(&a, &b, t).unwrap().l2_norm()
}

#[test]
fn grid_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = GridSpec::new(2, 16.0, 32).unwrap();
    let d = InitialDatumSpec::gaussian(2, 1.5, vec![0.5, -1.0], 0.8).unwrap();
    let field = GridField::from_datum(&d, spec).unwrap();
    let path = dir.path().join("u0.bin");
    write_grid(&path, &field).unwrap();

    let back = read_grid(&path).unwrap();
    assert_eq!(back.spec(), spec);
    assert_eq!(back.values(), field.values());
    let meta = read_sidecar(&path).unwrap();
    assert_eq!((meta.dimension, meta.points, meta.samples), (2, 32, 1024));
    assert_eq!(meta.l2_norm, field.l2_norm());
}

#[test]
fn truncated_grid_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = GridSpec::new(1, 8.0, 16).unwrap();
    let field = GridField::from_datum(
        &InitialDatumSpec::centered_gaussian(1, 1.0, 1.0).unwrap(),
        spec,
    )
    .unwrap();
    let path = dir.path().join("u.bin");
    write_grid(&path, &field).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
    assert!(read_grid(&path).is_err());
    std::fs::write(&path, &bytes[..10]).unwrap();
    assert!(read_grid(&path).is_err());
}

#[test]
fn grid_norm_matches_fourier_side() {
    let u0 = InitialDatumSpec::gaussian(1, 1.0, vec![0.4], 1.0).unwrap();
    let u1 = InitialDatumSpec::gaussian(1, -0.5, vec![0.4], 0.8).unwrap();
    let spec = GridSpec::new(1, 256.0, 4096).unwrap();
    let pair = DataPair::new(u0.clone(), u1.clone()).unwrap();
    for t in [5.0, 40.0] {
        let grid = evolve_norm(&u0, &u1, spec, t).powi(2);
        let fourier = solution_l2_sq(&pair, t, 1e-11).unwrap() / (2.0 * PI);
        assert!(
            (grid - fourier).abs() <= 1e-6 * fourier,
            "t={t}: {grid} vs {fourier}"
        );
    }
}

#[test]
fn dipole_velocity_decays_faster_than_gaussian() {
    let spec = GridSpec::new(1, 512.0, 4096).unwrap();
    let zero = InitialDatumSpec::zero(1);
    let gauss = InitialDatumSpec::centered_gaussian(1, 1.0, 1.0).unwrap();
    let dipole = InitialDatumSpec::dipole(1, 1.0, vec![1.0], 1.0).unwrap();
    let (t1, t2) = (25.0, 100.0);

    let g = [
        evolve_norm(&zero, &gauss, spec, t1),
        evolve_norm(&zero, &gauss, spec, t2),
    ];
    let d = [
        evolve_norm(&zero, &dipole, spec, t1),
        evolve_norm(&zero, &dipole, spec, t2),
    ];
    assert!(d[1] < g[1]);
    // Local exponents of the L² norm over [25, 100].
    let slope = |v: [f64; 2]| (v[1] / v[0]).ln() / (t2 / t1).ln();
    assert!(
        slope(d) < slope(g) - 0.5,
        "dipole {} vs gaussian {}",
        slope(d),
        slope(g)
    );

    // Same ordering from the Fourier side.
    let fourier = |u1: &InitialDatumSpec| {
        let pair = DataPair::new(zero.clone(), u1.clone()).unwrap();
        solution_l2_sq(&pair, t2, 1e-11).unwrap()
    };
    let (fg, fd) = (fourier(&gauss), fourier(&dipole));
    assert!(fd < fg);
    assert!((fd / (2.0 * PI) - d[1] * d[1]).abs() <= 1e-6 * fd / (2.0 * PI));
}
