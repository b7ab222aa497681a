//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rodtaper::decomposition::*;
use rodtaper::fem2d::{energy_density, energy_density_split, solve_torsion, LimitStressT};
use rodtaper::geometry::{principal_frame, shapes, CrossSection, Material, RodProfile};
use rodtaper::mesh::triangulate_levels;
use rodtaper::ode1d::*;
use rodtaper::verify3d::ConvergenceSetup;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn square() -> CrossSection {
    principal_frame(&shapes::rectangle(1.0, 1.0).unwrap()).unwrap()
}

fn torsion_oracles() -> Outcome {
    let t = Instant::now();
    let cases = [
        ("disc", shapes::disc(1.0, 256).unwrap(), 3, PI / 2.0, 0.005),
        ("ellipse", shapes::ellipse(2.0, 1.0, 256).unwrap(), 4, 8.0 * PI / 5.0, 0.01),
        ("square", shapes::rectangle(1.0, 1.0).unwrap(), 5, 0.140577, 0.01),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, poly, levels, want, tol) in cases {
        let s = principal_frame(&poly).map_err(|e| e.to_string())?;
        let k = solve_torsion(&triangulate_levels(&s, levels).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .stiffness;
        let rel = (k - want) / want;
        ok &= rel.abs() <= tol;
        parts.push(format!("{name} K={k:.5} ({:+.2}%)", 100.0 * rel));
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs <= 60.0;
    check(ok, format!("{}; {secs:.1} s", parts.join(", ")))
}

fn grid() -> impl Iterator<Item = f64> {
    (0..=200).map(|i| i as f64 / 200.0)
}

fn closed_form_benchmarks() -> Outcome {
    let one = PiecewisePoly::constant(1.0, 1.0);
    // E = 1, |ω| = I_α = 1
    let unit = |stiffness: f64, i: f64| {
        let c = SectionConstants { area: 1.0, inertia1: i, inertia2: i, stiffness };
        LimitModel::new(1.0, Material::new(0.0, 0.5).unwrap(), c).unwrap()
    };
    let m = unit(1.0, 1.0);
    let u3 = m.stretch(&one).map_err(|e| e.to_string())?;
    let u1 = m.bending(1, &one, &PiecewisePoly::zero()).map_err(|e| e.to_string())?;
    // torsional rigidity 1 with I₁ + I₂ = 1, once as Kμ (μ = 1/2, K = 2) and
    // once as Kμ/2 (K = 4)
    let r_full = unit(2.0, 0.5).torsion_rotation(&one).map_err(|e| e.to_string())?;
    let r_half = unit(4.0, 0.5)
        .with_torsion_coefficient(TorsionCoefficient::Half)
        .torsion_rotation(&one)
        .map_err(|e| e.to_string())?;
    let (mut e3, mut e1, mut er) = (0.0f64, 0.0f64, 0.0f64);
    for x in grid() {
        e3 = e3.max((u3.value.eval(x) - (x - x * x / 2.0) / 3.0).abs());
        e1 = e1.max((u1.value.eval(x) - x * x / 24.0).abs());
        let r = (2.0 * x - x * x) / 10.0;
        er = er.max((r_full.value.eval(x) - r).abs()).max((r_half.value.eval(x) - r).abs());
    }
    let forces = LoadCase::Stretch.unit_forces(1.0);
    let fem_err = |n: usize| -> Result<f64, String> {
        let s = solve_weighted_fem_1d(Problem1D::Stretch, &m, &forces, n).map_err(|e| e.to_string())?;
        Ok(s.grid.iter().zip(&s.u3).map(|(&x, &u)| (u - (x - x * x / 2.0) / 3.0).abs()).fold(0.0, f64::max))
    };
    let (a, b) = (fem_err(32)?, fem_err(64)?);
    let order = (a / b).log2();
    check(
        e3 <= 1e-10 && e1 <= 1e-10 && er <= 1e-10 && order >= 1.9,
        format!("stretch {e3:.1e}, bending {e1:.1e}, torsion {er:.1e}; FEM stretch order {order:.2}"),
    )
}

fn energy_identity_cases() -> Outcome {
    let s = square();
    let k = solve_torsion(&triangulate_levels(&s, 4).unwrap()).map_err(|e| e.to_string())?.stiffness;
    let m = LimitModel::new(1.0, Material::new(1.0, 1.0).unwrap(), SectionConstants::new(&s, k)).unwrap();
    let one = PiecewisePoly::constant(1.0, 1.0);
    let mut cases: Vec<(String, ForceProfile)> =
        LoadCase::ALL.iter().map(|c| (c.name().to_string(), c.unit_forces(1.0))).collect();
    cases.push(("f1+g3".into(), ForceProfile { f1: one.clone(), g3: one, ..Default::default() }));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..20 {
        let mut p = || PiecewisePoly::polynomial(1.0, (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect());
        cases.push((format!("random{i}"), ForceProfile { f1: p(), f2: p(), f3: p(), g1: p(), g2: p(), g3: p() }));
    }
    let mut worst = 0.0f64;
    for (name, f) in &cases {
        let e = m.solve(f).and_then(|s| s.energy()).map_err(|e| format!("{name}: {e}"))?;
        worst = worst.max(e.relative_gap);
    }
    check(worst <= 1e-8, format!("{} load cases, worst relative gap {worst:.1e}", cases.len()))
}

fn weighted_inequalities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut parts = Vec::new();
    let mut violations = 0;
    for which in [WeightedInequality::H1Rho, WeightedInequality::H1Rho2, WeightedInequality::H2Rho2] {
        let mut max_ratio = 0.0f64;
        for _ in 0..100 {
            let mut c: Vec<f64> = (0..=4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            c[0] = 0.0;
            if which == WeightedInequality::H2Rho2 {
                c[1] = 0.0;
            }
            let r =
                check_weighted_inequality(which, &PiecewisePoly::polynomial(1.0, c), 1.0).map_err(|e| e.to_string())?;
            violations += usize::from(!r.holds);
            max_ratio = max_ratio.max(r.ratio);
        }
        parts.push(format!("{which:?} max ratio {max_ratio:.3}"));
    }
    check(violations == 0, format!("{violations} violations in 300 trials; {}", parts.join(", ")))
}

fn decomposition_exactness() -> Outcome {
    let sq = square();
    let ell = principal_frame(&shapes::ellipse(2.0, 1.0, 64).unwrap()).unwrap();
    let grid = [0.0, 0.13, 0.4, 0.71, 1.0];
    let mut warp = 0.0f64;
    for fam in [FieldFamily::Torsion, FieldFamily::Rigid { translation: [0.3, -0.2, 0.1], rotation: [0.5, 0.7, -0.4] }]
    {
        let f = fam.field().map_err(|e| e.to_string())?;
        for sec in [&sq, &ell] {
            let d = RodDomain::standard(RodProfile::new(1.0, 0.1).unwrap(), sec).map_err(|e| e.to_string())?;
            let e = elementary_decompose(&f, &d);
            for &x3 in &grid {
                let s = d.profile.scale(x3);
                for q in &sec.polygon.vertices()[..4] {
                    let w = e.warping([0.5 * s * q[0], 0.5 * s * q[1], x3]);
                    warp = warp.max(w.iter().fold(0.0, |a, v| a.max(v.abs())));
                }
            }
        }
    }
    let mut orth = 0.0f64;
    let mut gap = 0.0f64;
    for seed in 0..10 {
        let f = FieldFamily::RandomPolynomial { seed, degree: 3, clamped: seed % 2 == 0 }.field().unwrap();
        for sec in [&sq, &ell] {
            let p = RodProfile::new(1.0, 0.1).unwrap();
            let d = RodDomain::standard(p, sec).map_err(|e| e.to_string())?;
            let e = elementary_decompose(&f, &d);
            orth = warping_orthogonality(&e, &grid).iter().fold(orth, |a, r| a.max(r.max()));
            let physical = RodDomain::new(p, sec, 8, 24, 10).map_err(|e| e.to_string())?;
            gap = gap.max(norm_identity(&f, &d, &physical).relative_gap);
        }
    }
    check(
        warp <= 1e-10 && orth <= 1e-10 && gap <= 1e-10,
        format!("rigid/torsion warping {warp:.1e}, orthogonality {orth:.1e}, norm identity {gap:.1e}"),
    )
}

fn estimate_probes() -> Outcome {
    let sq = square();
    let mut parts = Vec::new();
    let mut ok = true;
    for fam in FieldFamily::clamped_builtins(0.25) {
        let p = probe_estimates(fam.name(), |_| fam.field(), &sq, 1.0, &[0.2, 0.1, 0.05]).map_err(|e| e.to_string())?;
        let finite = p.rows.iter().all(|r| r.ratio.is_none_or(f64::is_finite));
        let growth = p.summary.iter().filter_map(|s| s.growth).fold(1.0, f64::max);
        ok &= finite && p.bounded(4.0);
        parts.push(format!("{} growth {growth:.2}", fam.name()));
    }
    check(ok, parts.join(", "))
}

fn convergence_3d() -> Outcome {
    let t = Instant::now();
    let setup =
        ConvergenceSetup::new(&square(), Material::new(1.0, 1.0).unwrap(), 1.0, 2).map_err(|e| e.to_string())?;
    let report = setup.run(&[0.2, 0.1, 0.05], &LoadCase::ALL).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for case in LoadCase::ALL {
        let rows = report.case_rows(case);
        let last = rows.last().ok_or("no rows")?;
        let monotone = report.monotone(case);
        let in_band = (0.5..=2.0).contains(&last.energy_ratio);
        ok &= monotone && in_band;
        let d: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.discrepancy)).collect();
        parts.push(format!("{} d=[{}] E-ratio {:.3}", case.name(), d.join(" "), last.energy_ratio));
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs <= 600.0;
    check(ok, format!("{}; {secs:.1} s", parts.join("; ")))
}

fn stress_algebra() -> Outcome {
    let s = square();
    let tor = solve_torsion(&triangulate_levels(&s, 3).unwrap()).map_err(|e| e.to_string())?;
    let mat = Material::new(1.3, 0.7).unwrap();
    let nu = mat.poisson();
    let m = LimitModel::new(1.0, mat, SectionConstants::new(&s, tor.stiffness)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut p = || PiecewisePoly::polynomial(1.0, (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let forces = ForceProfile { f1: p(), f2: p(), f3: p(), g1: p(), g2: p(), g3: p() };
    let sol = m.solve(&forces).map_err(|e| e.to_string())?;
    let eval = LimitStressT::new(&sol, &tor, &mat, &s);
    let mut structural = true;
    for _ in 0..1000 {
        let x = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(0.0..1.0)];
        let t = eval.eval(x).map_err(|e| e.to_string())?;
        structural &= t[0][1] == 0.0 && t[0][0] == -nu * t[2][2] && t[1][1] == -nu * t[2][2];
    }
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mat = Material::new(rng.gen_range(0.0..5.0), rng.gen_range(0.1..5.0)).unwrap();
        let nu = mat.poisson();
        let (t33, t13, t23) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let t = [[-nu * t33, 0.0, t13], [0.0, -nu * t33, t23], [t13, t23, t33]];
        let (a, b) = (energy_density(&t, &mat), energy_density_split(&t, &mat));
        worst = worst.max((a - b).abs() / a.abs().max(f64::MIN_POSITIVE));
    }
    check(
        structural && worst <= 1e-12,
        format!(
            "structure {}, energy identity worst relative error {worst:.1e} on 1000 matrices",
            if structural { "exact" } else { "violated" }
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("torsion stiffness oracles", torsion_oracles),
        ("1D closed-form benchmarks", closed_form_benchmarks),
        ("limit energy identity", energy_identity_cases),
        ("weighted inequalities", weighted_inequalities),
        ("decomposition exactness", decomposition_exactness),
        ("estimate probes", estimate_probes),
        ("3D convergence trend", convergence_3d),
        ("limit stress algebra", stress_algebra),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => println!("criterion {} {name}: PASS ({d})", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({d})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
