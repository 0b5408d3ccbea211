use pyrafem::element::{CoefficientTensor, FnField};
use pyrafem::meshfem::*;
use pyrafem::spaces::Family;

#[test]
fn single_cube_counts() {
    let mesh = build_cube_mesh(1).unwrap();
    assert_eq!(mesh.elements.len(), 6);
    assert_eq!(mesh.vertices.len(), 9);
    assert!((mesh.volume() - 1.0).abs() < 1e-14);
    assert_eq!(mesh.boundary_faces().count(), 6);
    for n in 2..=3 {
        let m = build_cube_mesh(n).unwrap();
        assert!((m.volume() - 1.0).abs() < 1e-14);
        assert_eq!(m.elements.len(), 6 * n * n * n);
        assert_eq!(m.boundary_faces().count(), 6 * n * n);
        assert!(m.faces.iter().all(|f| f.elements.len() <= 2));
    }
}

#[test]
fn zero_subdivisions_rejected() {
    assert!(build_cube_mesh(0).is_err());
}

#[test]
fn shape_parameter_is_scale_free() {
    let a = build_cube_mesh(1).unwrap();
    let b = build_cube_mesh(4).unwrap();
    assert_eq!(a.rho_max, b.rho_max);
    assert!((a.h / b.h - 4.0).abs() < 1e-14);
}

#[test]
fn mesh_json_layout() {
    let v = build_cube_mesh(1).unwrap().to_json();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 9);
    let e = &v["elements"][0];
    for key in ["v0", "e1", "e2", "apex", "global_vertex_ids"] {
        assert!(e.get(key).is_some(), "{key}");
    }
}

#[test]
fn lowest_order_has_vertex_dofs() {
    let mesh = build_cube_mesh(1).unwrap();
    let space = GlobalSpace::new(&mesh, 1, Family::Conforming).unwrap();
    assert_eq!(space.n_dofs, 9);
    assert_eq!(space.boundary.iter().filter(|b| !**b).count(), 1);
}

#[test]
fn zero_source_gives_zero_solution() {
    let mesh = build_cube_mesh(1).unwrap();
    let sys = assemble_poisson(&mesh, 1, &CoefficientTensor::identity(1), &|_| 0.0, 1).unwrap();
    assert!(sys.solve().unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn galerkin_residual() {
    let mesh = build_cube_mesh(2).unwrap();
    let a = coefficient_preset("poly1").unwrap();
    let u = solution_preset("sin3").unwrap();
    for k in 1..=2 {
        let sys = assemble_poisson(&mesh, k, &a.tensor(1), &u.source(&a), k).unwrap();
        let uh = sys.solve().unwrap();
        let r = sys.relative_residual(&uh);
        assert!(r <= 1e-10, "k = {k}: {r:e}");
    }
}

#[test]
fn stiffness_is_symmetric_and_rule_independent() {
    let mesh = build_cube_mesh(2).unwrap();
    for k in 1..=2 {
        let space = GlobalSpace::new(&mesh, k, Family::Conforming).unwrap();
        let a = CoefficientTensor::identity(1);
        let m = nalgebra::DMatrix::from(&assemble_stiffness(&mesh, &space, &a, k).unwrap());
        let m2 = nalgebra::DMatrix::from(&assemble_stiffness(&mesh, &space, &a, k + 3).unwrap());
        let scale = m.amax();
        assert!((&m - m.transpose()).amax() <= 1e-13 * scale);
        assert!((&m - &m2).amax() <= 1e-12 * scale, "k = {k}");
    }
}

#[test]
fn constants_are_reproduced() {
    let mesh = build_cube_mesh(2).unwrap();
    let one = FnField::new(0, |_: &[f64; 3]| vec![1.0], |_: &[f64; 3]| vec![0.0; 3]);
    for k in 1..=2 {
        let space = GlobalSpace::new(&mesh, k, Family::Conforming).unwrap();
        let c = space.interpolate(&mesh, &one).unwrap();
        let (l2, h1) = error_norms(&mesh, &space, &c, &|_| 1.0, &|_| [0.0; 3]).unwrap();
        assert!(l2 <= 1e-11 && h1 <= 1e-11, "k = {k}: {l2:e} {h1:e}");
    }
}

#[test]
fn interpolant_of_space_member_is_exact() {
    // quadratic polynomials lie in the k = 2 space
    let mesh = build_cube_mesh(2).unwrap();
    let u = |x: &[f64; 3]| x[0] * x[1] + x[2] * x[2] - 0.5 * x[0];
    let g = |x: &[f64; 3]| [x[1] - 0.5, x[0], 2.0 * x[2]];
    let field = FnField::new(0, move |x: &[f64; 3]| vec![u(x)], move |x: &[f64; 3]| g(x).to_vec());
    let space = GlobalSpace::new(&mesh, 2, Family::Conforming).unwrap();
    let c = space.interpolate(&mesh, &field).unwrap();
    let (l2, h1) = error_norms(&mesh, &space, &c, &u, &g).unwrap();
    assert!(l2 <= 1e-11 && h1 <= 1e-11, "{l2:e} {h1:e}");
}

#[test]
fn zero_exact_solution_gives_solution_norms() {
    let mesh = build_cube_mesh(1).unwrap();
    let space = GlobalSpace::new(&mesh, 1, Family::Conforming).unwrap();
    let mut c = vec![0.0; space.n_dofs];
    let centre = space.boundary.iter().position(|b| !*b).unwrap();
    c[centre] = 1.0;
    let (l2, h1) = error_norms(&mesh, &space, &c, &|_| 0.0, &|_| [0.0; 3]).unwrap();
    let rule = pyrafem::quadrature::conical_rule::<f64>(4).unwrap();
    let (mut m, mut s) = (0.0, 0.0);
    for (e, el) in mesh.elements.iter().enumerate() {
        let coeffs = space.element.coefficients(&space.local_dofs(e, &c));
        let f = pyrafem::element::ElementFunction::new(space.element.basis.clone(), coeffs, el.pyramid.clone()).unwrap();
        use pyrafem::element::FormField;
        m += rule.integrate_on_pyramid(&el.pyramid, |x| f.value(x)[0].powi(2));
        s += rule.integrate_on_pyramid(&el.pyramid, |x| f.derivative(x).iter().map(|v| v * v).sum());
    }
    assert!((l2 - m.sqrt()).abs() < 1e-13 && (h1 - s.sqrt()).abs() < 1e-13, "{l2} {m} {h1} {s}");
}

#[test]
fn unknown_presets_rejected() {
    assert!(coefficient_preset("nope").is_err());
    assert!(solution_preset("nope").is_err());
}

#[test]
fn manufactured_sources() {
    let a = coefficient_preset("smooth").unwrap();
    let u = solution_preset("poly_bubble").unwrap();
    let f = u.source(&a);
    // central differences of a grad u
    let x = [0.3, 0.6, 0.2];
    let h = 1e-4;
    let mut div = 0.0;
    for t in 0..3 {
        let mut p = x;
        let mut m = x;
        p[t] += h;
        m[t] -= h;
        div += ((a.value)(&p) * (u.gradient)(&p)[t] - (a.value)(&m) * (u.gradient)(&m)[t]) / (2.0 * h);
    }
    assert!((f(&x) + div).abs() < 1e-7);
}

#[test]
fn rates_fit_power_laws() {
    let h = [1.0, 0.5, 0.25];
    let v: Vec<f64> = h.iter().map(|h: &f64| 3.0 * h.powi(2)).collect();
    assert!((fitted_rate(&h, &v).unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(fitted_rate(&[1.0], &[1.0]), None);
}

#[test]
fn convergence_csv_layout() {
    let a = coefficient_preset("identity").unwrap();
    let u = solution_preset("sin3").unwrap();
    let r = convergence_study(1, 1, &[1, 2], &a, &u).unwrap();
    let csv = r.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    let cells: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(cells.len(), 9);
    assert_eq!(cells[5], "");
    assert!(!cells[7].is_empty());
    assert!(lines[1].ends_with(",,,"));
    assert_eq!(r.rows[1].h * 2.0, r.rows[0].h);
    assert!(convergence_study(1, 1, &[], &a, &u).is_err());
}
