use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use gapforge::estimator::{
    estimate_d, estimate_m, orbit_distance_trace, sup_overlap, OptimizerConfig,
};
use gapforge::liealg::{
    bracket_closure, cyclic_subspace, orbit_tangent_dim, profile, LieAlgebraBasis,
};
use gapforge::numkernel::random::{random_skew_hermitian, stream_rng};
use gapforge::numkernel::{
    hermitian_inner, operator_norm, ComplexMatrix, ComplexVector, DEFAULT_RANK_TOL,
};
use gapforge::pipeline::{analyze, AnalysisOptions, DeclaredStructure, TimeBound};
use gapforge::repkit::{product_lift, so_embedded, su_standard, sym_power_su2, wedge_lift_algebra};
use gapforge::system::{ControlSchedule, QuantumSystem, Segment, SystemFile};
use gapforge::witness::{
    cartan_witness, det_sum_oracle, det_sum_profile, dimension_class, dimension_notes,
    tensor_bound_oracle, wedge_witness, DimensionClass,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    check(
        elapsed.as_secs_f64() < limit_s,
        format!(
            "{what} took {:.2} s, limit {limit_s} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn traceless(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let shift = m.trace() / n as f64;
    let mut out = m.clone();
    out.axpy(-shift, &ComplexMatrix::identity(n));
    out
}

/// Unit-norm drift taken from the first generator.
fn system_over(controls: Vec<ComplexMatrix>) -> Result<QuantumSystem, String> {
    let norm = operator_norm(&controls[0]).map_err(err)?;
    let drift = controls[0].scale_real(1.0 / norm);
    QuantumSystem::new(drift, controls).map_err(err)
}

fn closure(generators: &[ComplexMatrix]) -> Result<LieAlgebraBasis, String> {
    bracket_closure(generators, DEFAULT_RANK_TOL).map_err(err)
}

fn criterion_1() -> Outcome {
    let mut parts = Vec::new();
    for (n, expected) in [(3usize, 8usize), (4, 15)] {
        let mut rng = stream_rng(0, n as u64);
        let a = traceless(&random_skew_hermitian(n, &mut rng));
        let b = traceless(&random_skew_hermitian(n, &mut rng));
        let start = Instant::now();
        let basis = closure(&[a, b])?;
        let elapsed = start.elapsed();
        check(
            basis.dim() == expected,
            format!("su({n}) closed to {}, expected {expected}", basis.dim()),
        )?;
        within(elapsed, 1.0, &format!("su({n}) closure"))?;
        parts.push(format!(
            "su({n}) dim {} in {:.3} s",
            basis.dim(),
            elapsed.as_secs_f64()
        ));
    }
    Ok(parts.join(", "))
}

fn criterion_2() -> Outcome {
    let mut dims = Vec::new();
    for n in 2..=5 {
        let basis = closure(&su_standard(n).map_err(err)?)?;
        let p = profile(&basis, 8, 0).map_err(err)?;
        check(p.transitive, format!("su({n}) reported non-transitive"))?;
        check(
            p.orbit_tangent_dim == 2 * n - 1,
            format!(
                "su({n}) orbit tangent dim {}, expected {}",
                p.orbit_tangent_dim,
                2 * n - 1
            ),
        )?;
        dims.push(p.orbit_tangent_dim.to_string());
    }
    let so3 = closure(&so_embedded(3).map_err(err)?)?;
    let p = profile(&so3, 8, 0).map_err(err)?;
    check(!p.transitive, "so(3) reported transitive".into())?;
    let at_e1 = orbit_tangent_dim(&so3, &ComplexVector::basis(3, 0)).map_err(err)?;
    check(
        at_e1 == 2,
        format!("so(3) orbit tangent dim at e1 is {at_e1}, expected 2"),
    )?;
    Ok(format!(
        "su(2..5) orbit dims [{}], so(3) non-transitive with dim {at_e1} at e1",
        dims.join(", ")
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let controls = so_embedded(3).map_err(err)?;
    let basis = closure(&controls)?;
    let system = system_over(controls)?;
    let report = analyze(
        &system,
        &OptimizerConfig::default(),
        &AnalysisOptions::default(),
    )
    .map_err(err)?;
    let cert = report.certificate.ok_or("no certificate for so(3)")?;
    check(
        cert.diameter_bound == SQRT_2,
        format!("diameter_bound {:.17} is not √2", cert.diameter_bound),
    )?;
    let mut rng = stream_rng(3, 0);
    let mut min_dist = f64::INFINITY;
    let mut max_dist: f64 = 0.0;
    for _ in 0..10_000 {
        let g = basis.random_group_element(&mut rng);
        let d = g.apply(&cert.x).distance(&cert.y);
        min_dist = min_dist.min(d);
        max_dist = max_dist.max(d);
    }
    check(
        (min_dist - SQRT_2).abs() <= 1e-8 && (max_dist - SQRT_2).abs() <= 1e-8,
        format!("Monte Carlo ‖gX−Y‖ in [{min_dist:.12}, {max_dist:.12}]"),
    )?;
    let d_est = report.estimate.ok_or("estimate missing")?.d_est;
    check(
        d_est >= SQRT_2 - 1e-2,
        format!("estimate_D = {d_est:.6} < √2 − 1e-2"),
    )?;
    within(start.elapsed(), 30.0, "so(3) analysis")?;
    Ok(format!(
        "bound √2, MC min ‖gX−Y‖ = {min_dist:.12}, D_est = {d_est:.6}, {:.1} s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let lifted = su_standard(4)
        .map_err(err)?
        .iter()
        .map(|l| wedge_lift_algebra(l, 2))
        .collect::<gapforge::Result<Vec<_>>>()
        .map_err(err)?;
    let basis = closure(&lifted)?;
    let witness = wedge_witness(4, 2).map_err(err)?;
    let opt =
        sup_overlap(&basis, &witness.x, &witness.y, &OptimizerConfig::default()).map_err(err)?;
    check(
        opt.abs_max >= FRAC_1_SQRT_2 - 1e-6 && opt.abs_max <= FRAC_1_SQRT_2 + 1e-3,
        format!(
            "sup_overlap {:.9} outside [1/√2 − 1e-6, 1/√2 + 1e-3]",
            opt.abs_max
        ),
    )?;
    let system = system_over(lifted)?;
    let options = AnalysisOptions {
        structure: Some(DeclaredStructure::Wedge { n: 4, k: 2 }),
        ..Default::default()
    };
    let report = analyze(&system, &OptimizerConfig::default(), &options).map_err(err)?;
    let cert = report.certificate.ok_or("no certificate for Λ²SU(4)")?;
    check(
        (cert.diameter_bound - 0.765367).abs() <= 1e-6,
        format!("diameter_bound {:.9}", cert.diameter_bound),
    )?;
    let t = match report.t_lower {
        TimeBound::Certified(t) => t,
        other => return Err(format!("T_lower is {other:?}")),
    };
    check(
        (t - FRAC_PI_4).abs() <= 1e-9,
        format!("T_lower {t:.12} is not π/4"),
    )?;
    within(start.elapsed(), 60.0, "Λ²SU(4) analysis")?;
    Ok(format!(
        "sup_overlap {:.9}, D ≥ {:.9}, T_lower {t:.12}, {:.1} s",
        opt.abs_max,
        cert.diameter_bound,
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_5() -> Outcome {
    let su2 = su_standard(2).map_err(err)?;
    let basis = closure(&product_lift(&su2, &su2).map_err(err)?)?;
    let m = estimate_m(&basis, &OptimizerConfig::default()).map_err(err)?;
    check(
        m <= FRAC_1_SQRT_2 + 1e-3,
        format!("estimate_M = {m:.9} > 1/√2 + 1e-3"),
    )?;
    let oracle = tensor_bound_oracle(2, 2, 100_000, 0).map_err(err)?;
    check(
        oracle <= FRAC_1_SQRT_2 + 1e-12,
        format!("oracle max {oracle:.15} > 1/√2 + 1e-12"),
    )?;
    Ok(format!(
        "estimate_M = {m:.9}, oracle max over 1e5 = {oracle:.12}"
    ))
}

fn criterion_6() -> Outcome {
    let cfg = OptimizerConfig::default();
    let su2 = su_standard(2).map_err(err)?;
    let d2 = estimate_d(&closure(&su2)?, &cfg).map_err(err)?.d_est;
    check(d2 <= 0.05, format!("su(2) estimate_D = {d2:.6}"))?;
    let options = AnalysisOptions {
        skip_estimate: true,
        ..Default::default()
    };
    let report = analyze(&system_over(su2)?, &cfg, &options).map_err(err)?;
    check(
        report.t_lower == TimeBound::Zero,
        format!("su(2) T_lower is {:?}", report.t_lower),
    )?;
    let d4 = estimate_d(&closure(&su_standard(4).map_err(err)?)?, &cfg)
        .map_err(err)?
        .d_est;
    check(d4 <= 0.05, format!("su(4) estimate_D = {d4:.6}"))?;
    Ok(format!(
        "su(2) D_est = {d2:.2e}, T_lower = 0; su(4) D_est = {d4:.2e}"
    ))
}

fn criterion_7() -> Outcome {
    let mut parts = Vec::new();
    for (k, grid) in [(2usize, 1001usize), (3, 201), (4, 101)] {
        let target = 1f64.max(2f64.powf(1.0 - k as f64 / 2.0));
        let o = det_sum_oracle(k, 100_000, grid, 0).map_err(err)?;
        check(
            (o.grid_max - target).abs() <= 1e-3,
            format!("k = {k}: grid_max {:.9}, expected {target:.9}", o.grid_max),
        )?;
        let interior = det_sum_profile(&vec![FRAC_1_SQRT_2; k]);
        let expected = 2f64.powf(1.0 - k as f64 / 2.0);
        check(
            (interior - expected).abs() <= 1e-12,
            format!("k = {k}: interior value {interior:.15}, expected {expected:.15}"),
        )?;
        check(
            o.sampled_max <= 1.0 + 1e-9,
            format!("k = {k}: sampled_max {:.12} > 1 + 1e-9", o.sampled_max),
        )?;
        parts.push(format!(
            "k={k} grid {:.6} sampled {:.6}",
            o.grid_max, o.sampled_max
        ));
    }
    Ok(parts.join("; "))
}

fn criterion_8() -> Outcome {
    let cfg = OptimizerConfig {
        starts: 8,
        ..Default::default()
    };
    let horizon = 2.0;
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut largest_d: f64 = 0.0;
    for s in 0..20u64 {
        let mut rng = stream_rng(8, s);
        let a = traceless(&random_skew_hermitian(2, &mut rng));
        let a = a.scale_real(1.0 / operator_norm(&a).map_err(err)?);
        let b = traceless(&random_skew_hermitian(2, &mut rng));
        let system = QuantumSystem::new(a, vec![b]).map_err(err)?;
        let mut segments = Vec::new();
        let mut covered = 0.0;
        while covered < horizon {
            let duration = rng.random_range(0.05..0.4);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            segments.push(Segment {
                duration,
                controls: vec![3.0 * sign],
            });
            covered += duration;
        }
        let schedule = ControlSchedule { segments };
        let x0 = ComplexVector::basis(2, 0);
        let trace =
            orbit_distance_trace(&system, &schedule, &x0, horizon, 21, &cfg).map_err(err)?;
        for p in &trace {
            worst = worst.max(p.d_numeric - p.t);
            largest_d = largest_d.max(p.d_numeric);
            check(
                p.within_bound(),
                format!(
                    "schedule {s}: d({:.3}) = {:.6} exceeds t + 0.01",
                    p.t, p.d_numeric
                ),
            )?;
        }
    }
    Ok(format!(
        "20 schedules, max d(t) − t = {worst:.3e}, max d = {largest_d:.4}"
    ))
}

fn criterion_9() -> Outcome {
    let spin_half = sym_power_su2(1).map_err(err)?;
    let id = ComplexMatrix::identity(2);
    let diagonal: Vec<ComplexMatrix> = spin_half
        .iter()
        .map(|l| &l.kron(&id) + &id.kron(l))
        .collect();
    let basis = closure(&diagonal)?;
    let h = ComplexVector::basis(2, 0);
    let l = ComplexVector::basis(2, 1);
    let component = cyclic_subspace(&basis, &h.kron(&h)).map_err(err)?;
    let ll = l.kron(&l);
    let mut proj_sq = 0.0;
    for u in &component {
        proj_sq += hermitian_inner(&ll, u).map_err(err)?.norm_sqr();
    }
    let proj = proj_sq.sqrt();
    check(
        (proj - 1.0).abs() <= 1e-10,
        format!("projection norm {proj:.15} is not 1 ± 1e-10"),
    )?;
    let witness = cartan_witness(&h, &l, &h, &l).map_err(err)?;
    let opt =
        sup_overlap(&basis, &witness.x, &witness.y, &OptimizerConfig::default()).map_err(err)?;
    check(
        opt.abs_max <= FRAC_1_SQRT_2 + 1e-3,
        format!("sup_overlap {:.9} > 1/√2 + 1e-3", opt.abs_max),
    )?;
    Ok(format!(
        "component dim {}, projection norm {proj:.15}, sup_overlap {:.9}",
        component.len(),
        opt.abs_max
    ))
}

fn criterion_10() -> Outcome {
    for (n, expected) in [
        (26, DimensionClass::ExceptionalE),
        (64, DimensionClass::PowerOfTwo),
        (6, DimensionClass::Generic),
    ] {
        let got = dimension_class(n).map_err(err)?;
        check(
            got == expected,
            format!("{n} classified as {}", got.as_str()),
        )?;
    }
    for n in [24_502_400u64, 24_502_500] {
        let notes = dimension_notes(n).map_err(err)?;
        check(
            notes
                .iter()
                .any(|s| s.contains("24502400") && s.contains("24502500")),
            format!("no discrepancy note for {n}"),
        )?;
    }
    Ok("26 exceptional_E, 64 power_of_two, 6 generic, discrepancy noted for both values".into())
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let system = system_over(so_embedded(3).map_err(err)?)?;
    let system_path = dir.path().join("so3.json");
    let file = SystemFile::from_system(&system);
    std::fs::write(&system_path, serde_json::to_string(&file).map_err(err)?).map_err(err)?;
    let mut reports = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("report{run}.json"));
        let output = Command::new(env!("CARGO_BIN_EXE_gapforge"))
            .args([
                "analyze",
                system_path.to_str().unwrap(),
                "--seed",
                "11",
                "--report",
            ])
            .arg(&out)
            .output()
            .map_err(err)?;
        check(
            output.status.success(),
            format!("analyze run {run} exited with {}", output.status),
        )?;
        reports.push(std::fs::read(&out).map_err(err)?);
    }
    check(
        reports[0] == reports[1],
        "reports differ between runs".into(),
    )?;
    Ok(format!(
        "two CLI runs, {} identical bytes",
        reports[0].len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("closure correctness", criterion_1),
        ("transitivity", criterion_2),
        ("reducible gap", criterion_3),
        ("wedge bound", criterion_4),
        ("tensor bound", criterion_5),
        ("transitive collapse", criterion_6),
        ("determinant oracle", criterion_7),
        ("drift-speed property", criterion_8),
        ("Cartan witness", criterion_9),
        ("dimension classifier", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {:>2} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} ({name}): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
