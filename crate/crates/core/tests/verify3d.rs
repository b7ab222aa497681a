use rodtaper::fem2d::mesh_inertia;
use rodtaper::geometry::{principal_frame, shapes, CrossSection, Material, RodProfile};
use rodtaper::mesh::{triangulate_levels, TriMesh};
use rodtaper::ode1d::{ForceProfile, LimitField, LimitModel, LoadCase, PiecewisePoly, SectionConstants};
use rodtaper::verify3d::*;

fn square() -> CrossSection {
    principal_frame(&shapes::rectangle(1.0, 1.0).unwrap()).unwrap()
}

fn coarse(order: ElementOrder, eps: f64) -> TaperedMesh3D {
    let base = triangulate_levels(&square(), 1).unwrap();
    build_tapered_mesh(&base, RodProfile::new(1.0, eps).unwrap(), LayerSpec::Uniform { n: 8 }, order).unwrap()
}

fn mixed_forces() -> ForceProfile {
    ForceProfile {
        f1: PiecewisePoly::polynomial(1.0, vec![1.0, -0.5]),
        f2: PiecewisePoly::constant(1.0, 0.3),
        f3: PiecewisePoly::polynomial(1.0, vec![0.0, 0.0, 2.0]),
        g1: PiecewisePoly::constant(1.0, 0.2),
        g2: PiecewisePoly::zero(),
        g3: PiecewisePoly::polynomial(1.0, vec![1.0, 1.0]),
    }
}

#[test]
fn zero_forces_give_zero_solution() {
    for order in [ElementOrder::Linear, ElementOrder::Quadratic] {
        let sol = solve_elasticity_3d(coarse(order, 0.1), Material::new(1.0, 1.0).unwrap(), &ForceProfile::default())
            .unwrap();
        assert!(sol.displacement.iter().all(|d| *d == [0.0; 3]));
        assert_eq!(sol.energy, 0.0);
        assert_eq!(sol.work, 0.0);
    }
}

#[test]
fn energy_relation_and_coercivity() {
    let mat = Material::new(0.7, 1.3).unwrap();
    for order in [ElementOrder::Linear, ElementOrder::Quadratic] {
        let sys = Elastic3DSystem::assemble(coarse(order, 0.2), mat).unwrap();
        let sol = sys.solve(&mixed_forces()).unwrap();
        assert!(sol.residual <= 1e-9);
        assert!(sol.energy_gap() <= 1e-9, "{order:?}: {}", sol.energy_gap());
        assert!(sol.energy > 0.0);
        // ℰ = ∫λ(tr γ)² + 2μ|γ|² ≥ 2μ|γ|² for λ ≥ 0
        assert!(sol.energy >= 2.0 * mat.mu * sol.strain_norm_sq * (1.0 - 1e-10));
        for i in sys.mesh.clamped_nodes() {
            assert_eq!(sol.displacement[i], [0.0; 3]);
        }
    }
}

#[test]
fn quadratic_space_is_more_flexible() {
    // P1 ⊂ P2 on the same mesh, so the Galerkin compliance ∫F·u can only grow
    let mat = Material::new(1.0, 1.0).unwrap();
    for case in LoadCase::ALL {
        let f = case.unit_forces(1.0);
        let e1 = solve_elasticity_3d(coarse(ElementOrder::Linear, 0.1), mat, &f).unwrap().energy;
        let e2 = solve_elasticity_3d(coarse(ElementOrder::Quadratic, 0.1), mat, &f).unwrap().energy;
        assert!(e2 >= e1 * (1.0 - 1e-10), "{case:?}: {e2} < {e1}");
    }
}

/// Nodal interpolant of the Bernoulli–Navier field with twist built from a
/// limit solution: u₁ = U₁ − x₂R₃, u₂ = U₂ + x₁R₃, u₃ = εU₃ − x₁U₁' − x₂U₂'.
fn ansatz(mesh: &TaperedMesh3D, limit: &dyn LimitField) -> Vec<[f64; 3]> {
    let eps = mesh.profile.epsilon;
    mesh.nodes
        .iter()
        .map(|&[x1, x2, z]| {
            let s = limit.state(z).unwrap();
            [s.u[0] - x2 * s.r3, s.u[1] + x1 * s.r3, eps * s.u[2] - x1 * s.du[0] - x2 * s.du[1]]
        })
        .collect()
}

fn limit_for(base: &TriMesh, forces: &ForceProfile) -> rodtaper::ode1d::LimitSolution {
    let (i1, i2) = mesh_inertia(base);
    let c = SectionConstants { area: base.area(), inertia1: i1, inertia2: i2, stiffness: 0.8 * (i1 + i2) };
    LimitModel::new(1.0, Material::new(1.0, 1.0).unwrap(), c).unwrap().solve(forces).unwrap()
}

#[test]
fn manufactured_field_has_no_discrepancy() {
    let base = triangulate_levels(&principal_frame(&shapes::ellipse(1.0, 0.6, 24).unwrap()).unwrap(), 1).unwrap();
    let limit = limit_for(&base, &mixed_forces());
    for order in [ElementOrder::Linear, ElementOrder::Quadratic] {
        let mesh = build_tapered_mesh(
            &base,
            RodProfile::new(1.0, 0.1).unwrap(),
            LayerSpec::GradedAspect { aspect: 2.0, min_layers: 8 },
            order,
        )
        .unwrap();
        let layers = extract_layers(&mesh, &ansatz(&mesh, &limit));
        for st in &layers {
            let s = limit.state(st.z).unwrap();
            assert!((st.ucal[0] - s.u[0]).abs() < 1e-12);
            assert!((st.ucal[2] / 0.1 - s.u[2]).abs() < 1e-12);
            assert!((st.rcal[2] - s.r3).abs() < 1e-12);
        }
        for case in LoadCase::ALL {
            let d = slope_discrepancy(case, &mesh, &layers, &limit).unwrap();
            assert!(d < 1e-9, "{order:?} {case:?}: {d}");
        }
    }
}

#[test]
fn mismatched_length_is_rejected() {
    let mesh = coarse(ElementOrder::Linear, 0.1);
    let (i1, i2) = mesh_inertia(&mesh.base);
    let c = SectionConstants { area: 1.0, inertia1: i1, inertia2: i2, stiffness: 0.1 };
    let limit = LimitModel::new(2.0, Material::new(1.0, 1.0).unwrap(), c)
        .unwrap()
        .solve(&LoadCase::Stretch.unit_forces(2.0))
        .unwrap();
    let layers = extract_layers(&mesh, &vec![[0.0; 3]; mesh.node_count()]);
    assert!(slope_discrepancy(LoadCase::Stretch, &mesh, &layers, &limit).is_err());
}

#[test]
fn coarse_study_trends() {
    let setup = ConvergenceSetup::new(&square(), Material::new(1.0, 1.0).unwrap(), 1.0, 1).unwrap();
    let report = setup.run(&[0.2, 0.1, 0.05], &LoadCase::ALL).unwrap();
    assert_eq!(report.rows.len(), 12);
    for case in LoadCase::ALL {
        assert!(report.monotone(case), "{case:?}: {:?}", report.case_rows(case));
    }
    for r in &report.rows {
        assert!(r.energy_relation_gap <= 1e-9);
        assert!(r.coercivity_ratio >= 1.0 - 1e-10);
        assert!(r.scaled_energy.is_finite() && r.scaled_energy > 0.0);
    }
    assert_eq!(report.to_csv().lines().count(), 13);
}
