use fracture_ls::contact::{gap, RegimeCensus};
use fracture_ls::linalg::{is_positive_definite, linear_solve, DenseMatrix};
use fracture_ls::line_search::Strategy;
use fracture_ls::model::{
    make_multi_fracture, make_single_fracture, make_single_fracture_with, preset, FractureAssembly, Physics,
    SingleFractureLoading, PRESET_NAMES,
};
use fracture_ls::newton::{contact_violation, solve, ConvergenceCriterion, NewtonConfig, NonlinearSystem, Status};
use fracture_ls::solution::Field;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn residual(model: &FractureAssembly<f64>, x: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; model.dimension()];
    model.residual(x, &mut r);
    r
}

fn converge(model: &FractureAssembly<f64>, strategy: Strategy) -> Vec<f64> {
    let report =
        solve(model, &model.initial_guess(), &NewtonConfig::new(strategy, ConvergenceCriterion::increment())).unwrap();
    assert_eq!(report.status, Status::Converged, "{:?}", report.divergence);
    report.solution
}

fn loading(normal_mean: f64, shear: f64) -> SingleFractureLoading {
    SingleFractureLoading { normal_mean, normal_ramp: 0.0, shear, shear_angle: 0.0 }
}

#[test]
fn presets_resolve_by_name() {
    for name in PRESET_NAMES {
        let p = preset(name).unwrap();
        assert_eq!(p.name, name);
        let m: FractureAssembly<f64> = p.build(3, 0.1, 0.01, 0).unwrap();
        assert!(m.flow.is_some());
        assert_eq!(m.layout.has(Field::Temperature), name.ends_with("tpm"));
    }
    assert!(preset("single").is_err());
    assert!(make_single_fracture(1, 0.1_f64, 0.01, Physics::Poro).is_err());
    assert!(make_single_fracture(4, 0.1_f64, 0.0, Physics::Poro).is_err());
    assert!(make_single_fracture(4, 2.0_f64, 0.01, Physics::Poro).is_err());
    assert!(make_multi_fracture(0, 0, 0.1_f64, 0.01, Physics::Poro).is_err());
}

#[test]
fn zero_state_residual_is_the_scaled_load() {
    let m = make_single_fracture(4, 0.1_f64, 0.01, Physics::Elastic).unwrap();
    let r = residual(&m, &vec![0.0; m.dimension()]);
    for cell in 0..m.cells() {
        for comp in 0..3 {
            let i = m.layout.index(Field::Traction, cell, comp).unwrap();
            assert!((r[i] + m.external_traction[cell][comp] / m.scales.sigma_c).abs() < 1e-14);
            // Closed, unloaded contact satisfies both complementarity functions.
            assert_eq!(r[m.layout.index(Field::Jump, cell, comp).unwrap()], 0.0);
        }
    }
}

#[test]
fn uniform_compression_sticks_without_slip() {
    let m = make_single_fracture_with(3, 0.1_f64, 0.01, Physics::Elastic, loading(-1.0, 0.3)).unwrap();
    let x = converge(&m, Strategy::ConstraintAdaptive);
    for (cell, s) in m.states(&x).iter().enumerate() {
        let load = m.external_traction[cell];
        assert!(s.jump_n.abs() < 1e-12 && s.jump_t.iter().all(|u| u.abs() < 1e-12));
        assert!((s.traction_n - load[0] / m.scales.sigma_c).abs() < 1e-10);
        assert!((s.traction_t[0] - load[1] / m.scales.sigma_c).abs() < 1e-10);
    }
    assert_eq!(RegimeCensus::from_states_tolerant(&m.states(&x), &m.contact).sticking, m.cells());
}

#[test]
fn uniform_tension_opens_against_the_stiffness() {
    let m = make_single_fracture_with(3, 0.1_f64, 0.01, Physics::Elastic, loading(0.5, 0.2)).unwrap();
    let x = converge(&m, Strategy::None);
    for comp in 0..3 {
        let k = m.stiffness_matrix(comp > 0);
        let rhs: Vec<f64> = m.external_traction.iter().map(|t| t[comp]).collect();
        let u = linear_solve(&k, &rhs).unwrap();
        for cell in 0..m.cells() {
            assert!((x[m.layout.index(Field::Jump, cell, comp).unwrap()] - u[cell]).abs() < 1e-12);
            assert!(x[m.layout.index(Field::Traction, cell, comp).unwrap()].abs() < 1e-12);
        }
    }
}

#[test]
fn influence_operators_are_spd() {
    let single = make_single_fracture(5, 0.1_f64, 0.01, Physics::Poro).unwrap();
    let multi = make_multi_fracture(4, 3, 0.1_f64, 0.01, Physics::Poro).unwrap();
    for m in [&single, &multi] {
        for tangential in [false, true] {
            let k: DenseMatrix<f64> = m.stiffness_matrix(tangential);
            assert!(k.is_symmetric(1e-9));
            assert!(is_positive_definite(&k));
        }
    }
}

#[test]
fn physics_nest_on_mechanics_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let elastic = make_single_fracture(3, 0.1_f64, 0.01, Physics::Elastic).unwrap();
    let mut poro = make_single_fracture(3, 0.1_f64, 0.01, Physics::Poro).unwrap();
    let mut thermo = make_single_fracture(3, 0.1_f64, 0.01, Physics::ThermoPoro).unwrap();
    poro.couplings.biot_coeff = 0.0;
    poro.couplings.fluid_compressibility = 0.0;
    thermo.couplings.solid_thermal_expansion = 0.0;
    let xt: Vec<f64> = (0..thermo.dimension()).map(|_| rng.gen_range(-0.01..0.01)).collect();
    let project = |target: &FractureAssembly<f64>| {
        let mut x = vec![0.0; target.dimension()];
        for (i, v) in x.iter_mut().enumerate() {
            let (field, cell, comp) = target.layout.locate(i).unwrap();
            *v = xt[thermo.layout.index(field, cell, comp).unwrap()];
        }
        x
    };
    thermo.couplings.biot_coeff = 0.0;
    let (re, rp, rt0) =
        (residual(&elastic, &project(&elastic)), residual(&poro, &project(&poro)), residual(&thermo, &xt));
    for cell in 0..elastic.cells() {
        for comp in 0..3 {
            let row = |m: &FractureAssembly<f64>| m.layout.index(Field::Traction, cell, comp).unwrap();
            assert_eq!(rp[row(&poro)], re[row(&elastic)]);
            assert_eq!(rt0[row(&thermo)], re[row(&elastic)]);
        }
    }
    // With Biot coupling restored, thermo-poro without expansion matches poro.
    thermo.couplings.biot_coeff = 0.8;
    poro.couplings.biot_coeff = 0.8;
    let (rp, rt) = (residual(&poro, &project(&poro)), residual(&thermo, &xt));
    for cell in 0..elastic.cells() {
        let row = |m: &FractureAssembly<f64>| m.layout.index(Field::Traction, cell, 0).unwrap();
        assert_eq!(rp[row(&poro)], rt[row(&thermo)]);
    }
}

#[test]
fn multi_fracture_geometry_is_seeded_and_nested() {
    let a = make_multi_fracture(4, 7, 0.1_f64, 0.01, Physics::Poro).unwrap();
    let b = make_multi_fracture(4, 7, 0.1_f64, 0.01, Physics::Poro).unwrap();
    let c = make_multi_fracture(8, 7, 0.1_f64, 0.01, Physics::Poro).unwrap();
    let d = make_multi_fracture(4, 8, 0.1_f64, 0.01, Physics::Poro).unwrap();
    assert_eq!(a, b);
    assert_eq!(c.fractures.len(), 8);
    for f in 0..4 {
        assert_eq!(a.fractures[f], c.fractures[f]);
        let n = a.fractures[f].normal;
        assert!(((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt() - 1.0).abs() < 1e-12);
        assert!(a.fractures[f].cells.len() >= 9);
    }
    assert_eq!(a.external_traction[..], c.external_traction[..a.cells()]);
    assert_ne!(a.fractures[0].normal, d.fractures[0].normal);
    let flow = a.flow.as_ref().unwrap();
    assert_eq!(flow.wells.len(), 4);
    assert!(flow.wells[0].pressure > 0.0 && flow.wells[1].pressure < 0.0);
}

#[test]
fn single_fracture_converges_to_mixed_regimes() {
    for physics in [Physics::Poro, Physics::ThermoPoro] {
        let m = make_single_fracture(6, 0.1_f64, 0.01, physics).unwrap();
        let x = converge(&m, Strategy::ConstraintAdaptive);
        let states = m.states(&x);
        let census = RegimeCensus::from_states_tolerant(&states, &m.contact);
        assert!(census.open > 0 && census.sticking > 0 && census.sliding > 0, "{census:?}");
        let v = contact_violation(&m, &x).unwrap();
        assert!(v < 1e-8, "{v}");
        for s in &states {
            assert!(m.contact.residual_aperture + s.jump_n >= m.contact.residual_aperture - 1e-8);
            assert!(s.jump_n - gap(s, &m.contact) >= -1e-8);
        }
    }
}

#[test]
fn multi_fracture_converges_to_mixed_regimes() {
    let m = make_multi_fracture(8, 0, 0.1_f64, 0.01, Physics::Poro).unwrap();
    let report = solve(
        &m,
        &m.initial_guess(),
        &NewtonConfig::new(Strategy::ConstraintAdaptive, ConvergenceCriterion::residual()),
    )
    .unwrap();
    assert_eq!(report.status, Status::Converged);
    let census = RegimeCensus::from_states_tolerant(&m.states(&report.solution), &m.contact);
    assert!(census.open > 0 && census.sticking > 0 && census.sliding > 0, "{census:?}");
    assert!(contact_violation(&m, &report.solution).unwrap() < 1e-8);
}

#[test]
fn single_precision_assembly_solves() {
    let m = make_single_fracture(3, 0.1_f32, 0.01, Physics::Elastic).unwrap();
    let mut config = NewtonConfig::new(Strategy::ConstraintAdaptive, ConvergenceCriterion::residual());
    config.criterion.tolerance = 1e-5;
    let report = solve(&m, &m.initial_guess(), &config).unwrap();
    assert_eq!(report.status, Status::Converged);
}
