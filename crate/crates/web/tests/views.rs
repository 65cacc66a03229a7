use graphcalc_web::{disk_map, fixture_names, spectrum_view, GridHeat};

#[test]
fn spectrum_of_c4() {
    let v = spectrum_view("c4", &[], "none").unwrap();
    for (a, b) in v.values.iter().zip([0.0, 1.0, 1.0, 2.0]) {
        assert!((a - b).abs() < 1e-10);
    }
    assert_eq!(v.functions.len(), 4);
    assert_eq!(v.vertices, ["1", "2", "3", "4"]);
    let w = spectrum_view("p5", &["b", "c", "d"], "dirichlet").unwrap();
    assert_eq!(w.vertices, ["a", "b", "c", "d", "e"]);
    assert!(spectrum_view("nope", &[], "none").is_err());
    assert!(spectrum_view("c4", &[], "sideways").is_err());
    assert!(fixture_names().contains("octahedron"));
}

#[test]
fn grid_heat_decays_and_conserves() {
    let hot = GridHeat::build(6, 6, 2, 3, true).unwrap();
    let u0 = hot.values(0.0).unwrap();
    assert_eq!(u0.iter().filter(|&&x| (x - 1.0).abs() < 1e-12).count(), 1);
    assert!(u0.iter().all(|x| x.abs() < 1e-12 || (x - 1.0).abs() < 1e-12));
    let total = |t: f64| hot.values(t).unwrap().iter().sum::<f64>();
    assert!(total(0.5) < total(0.1));
    assert!(total(0.5) > 0.0);

    // insulated grid: the degree-weighted mass is conserved
    let cold = GridHeat::build(5, 7, 0, 0, false).unwrap();
    let g = graphcalc::fixtures::grid(5, 7);
    let mass = |t: f64| -> f64 {
        cold.values(t).unwrap().iter().enumerate().map(|(v, x)| g.degree(v) as f64 * x).sum()
    };
    assert!((mass(2.0) - mass(0.0)).abs() < 1e-12);
    assert!(GridHeat::build(2, 5, 0, 0, true).is_err());
    assert!(GridHeat::build(5, 5, 5, 0, true).is_err());
}

#[test]
fn disk_map_is_unit_and_settles() {
    let m = disk_map(6, 0.3, 1).unwrap();
    assert_eq!(m.points.len(), 36);
    for p in &m.points {
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        assert!((n - 1.0).abs() < 1e-12);
    }
    assert!(m.energy.is_finite() && m.energy > 0.0);
    assert!(disk_map(6, 1.0, 1).is_err());
}
