//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is printed by a plain
//! `cargo test`. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;

use gamcal::calculus::{multivector_derivative, StepSize};
use gamcal::chain::SimplexChain;
use gamcal::hamilton_jacobi::{conserved_quantity, motion_from_hj, HjFunction};
use gamcal::hamiltonian::{
    dw_hamiltonian, mechanics_hamiltonian, string_hamiltonian, Potential, SeparableH0, SplitFrame,
};
use gamcal::identities::{random_homogeneous, random_vector, run_identity, Identity};
use gamcal::solver::{
    action_value, constraint_residual, continuity_residual, dw_equation_residuals, energy_momentum_tensor,
    line_deviation, solve_geodesic, solve_mechanics, solve_scalar_field, spur_residual, FieldGrid,
    MotionCurve, RelaxationOptions, SurfaceMesh,
};
use gamcal::Multivector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

fn fmt_orders(orders: &[f64]) -> String {
    orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>().join(", ")
}

fn ga_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut uniform = move || rng.gen::<f64>();
    let mut worst = (0.0f64, "");
    for dim in 3..=5 {
        for identity in Identity::ALL {
            let report = run_identity(identity, dim, 1000, &mut uniform).expect("identity evaluation");
            if report.max_error >= worst.0 {
                worst = (report.max_error, identity.name());
            }
        }
    }
    outcome(
        worst.0 <= 1e-12,
        format!("10 identities x 1000 cases x n=3,4,5; worst relative error {:.2e} ({})", worst.0, worst.1),
    )
}

fn multivector_derivative_of_square() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut uniform = move || rng.gen::<f64>();
    let h = StepSize::new(1e-5).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = random_homogeneous(&mut uniform, 4, 2);
        let d = multivector_derivative(|x| x.magnitude_squared(), &p, 2, h).unwrap();
        worst = worst.max(d.max_abs_diff(&p.reverse().scale(2.0)));
    }
    outcome(worst <= 1e-5, format!("max |d|P|^2 - 2 reverse(P)| = {worst:.2e} over 100 bivectors, n=4"))
}

/// `F(q)` for the fundamental-theorem check: smooth, mixed-grade, nonlinear.
fn ft_field(q: &Multivector) -> Multivector {
    let (x, y, z) = (q.coeff(0b001), q.coeff(0b010), q.coeff(0b100));
    let mut f = Multivector::zero(3);
    f.set_coeff(0b000, (x * y).sin() + z);
    f.set_coeff(0b001, x * x * y);
    f.set_coeff(0b010, (x - z).cos());
    f.set_coeff(0b100, y.exp() * 0.5);
    f.set_coeff(0b011, x * y * z + y);
    f.set_coeff(0b110, (2.0 * x).sin());
    f
}

fn ft_mismatch(cells: usize, embed: &dyn Fn(f64, f64) -> Vec<f64>) -> f64 {
    let patch = SimplexChain::triangulated_patch(cells, cells, (0.0, 1.0), (0.0, 1.0), embed).unwrap();
    let integrand = |dg: &Multivector, q: &Multivector| &ft_field(q) * dg;
    let boundary = patch.boundary().unwrap().directed_integral(integrand).unwrap();
    let interior = patch.derivative_integral(integrand, StepSize::new(1e-5).unwrap()).unwrap();
    boundary.try_sub(&interior).unwrap().magnitude()
}

fn fundamental_theorem() -> Outcome {
    let flat = |u: f64, v: f64| vec![u, v, 0.0];
    let graph = |u: f64, v: f64| vec![u, v, 0.3 * (2.0 * u).sin() * v.cos() + 0.2 * u * v];
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, embed) in [("flat square", &flat as &dyn Fn(f64, f64) -> Vec<f64>), ("graph surface", &graph)] {
        let errors: Vec<f64> = [8, 16, 32].iter().map(|n| ft_mismatch(*n, embed)).collect();
        let orders = [order(errors[0], errors[1]), order(errors[1], errors[2])];
        pass &= orders.iter().all(|o| *o >= 1.9);
        lines.push(format!("{name}: mismatch {:.2e} -> {:.2e}, orders {}", errors[0], errors[2], fmt_orders(&orders)));
    }
    outcome(pass, lines.join("; "))
}

fn mechanics() -> Outcome {
    let h = mechanics_hamiltonian(
        SeparableH0::new(1.0, Potential::harmonic(1.0)).unwrap(),
        SplitFrame::mechanics(2, 0).unwrap(),
    )
    .unwrap();
    let q0 = Multivector::vector(&[0.0, 1.0]);
    let p0 = Multivector::zero(2);
    let one = solve_mechanics(&h, &q0, &p0, 2.0 * PI, 1e-3).unwrap();
    let x_end = one.points().last().unwrap().coeff(0b10);
    let ten = solve_mechanics(&h, &q0, &p0, 20.0 * PI, 1e-3).unwrap();
    let drift = ten.energy_drift();
    let residual = constraint_residual(&h, &ten).unwrap();
    let pass = (x_end - 1.0).abs() <= 1e-6 && drift <= 1e-8 && residual <= 1e-8;
    outcome(
        pass,
        format!(
            "|x(2pi) - 1| = {:.2e}; energy drift over 10 periods {drift:.2e}; max |H| {residual:.2e}",
            (x_end - 1.0).abs()
        ),
    )
}

struct HelmholtzRun {
    spacing: f64,
    error: f64,
    momentum_relation: f64,
    continuity: f64,
}

fn helmholtz(nx: usize, ny: usize) -> HelmholtzRun {
    let h = dw_hamiltonian(Potential::harmonic(1.0), SplitFrame::field(2).unwrap()).unwrap();
    let mut grid = FieldGrid::new(vec![0.0, 0.0], vec![PI, 1.0], vec![nx, ny]).unwrap();
    grid.set_boundary(|x| x[0].sin());
    let options = RelaxationOptions {
        tol: 1e-11,
        relaxation: 1.9,
        ..RelaxationOptions::default()
    };
    let solved = solve_scalar_field(&h, &grid, options).unwrap();
    let error = (0..solved.len())
        .map(|n| (solved.phi()[n] - solved.coords(n)[0].sin()).abs())
        .fold(0.0, f64::max);
    let residuals = dw_equation_residuals(&h, &solved).unwrap();
    let t = energy_momentum_tensor(&solved, h.potential());
    HelmholtzRun {
        spacing: solved.spacing()[0],
        error,
        momentum_relation: residuals.momentum_relation,
        continuity: continuity_residual(&t).unwrap(),
    }
}

fn scalar_field() -> Outcome {
    let runs: Vec<HelmholtzRun> = [(16, 8), (32, 16), (64, 32), (128, 64)]
        .iter()
        .map(|(nx, ny)| helmholtz(*nx, *ny))
        .collect();
    let constant = runs[0].error / (runs[0].spacing * runs[0].spacing);
    let within_bound = runs.iter().all(|r| r.error <= 2.0 * constant * r.spacing * r.spacing);
    let error_orders: Vec<f64> = runs.windows(2).map(|w| order(w[0].error, w[1].error)).collect();
    let continuity_orders: Vec<f64> = runs.windows(2).map(|w| order(w[0].continuity, w[1].continuity)).collect();
    let momentum = runs.iter().map(|r| r.momentum_relation).fold(0.0, f64::max);
    let pass = within_bound
        && error_orders.iter().all(|o| *o >= 1.9)
        && continuity_orders.iter().all(|o| *o >= 1.9)
        && momentum <= 1e-12;
    outcome(
        pass,
        format!(
            "max error {:.2e} -> {:.2e} (C = {constant:.3e}, within 2C h^2: {within_bound}), orders {}; \
             momentum relation {momentum:.1e}; continuity {:.2e} -> {:.2e}, orders {}",
            runs[0].error,
            runs[3].error,
            fmt_orders(&error_orders),
            runs[0].continuity,
            runs[3].continuity,
            fmt_orders(&continuity_orders)
        ),
    )
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Multivector {
    let mut uniform = || rng.gen::<f64>();
    let v = random_vector(&mut uniform, dim);
    v.scale(1.0 / v.magnitude())
}

fn string_geodesics_and_spur() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let tension = 1.7;
    let s_end = 5.0;
    let h = string_hamiltonian(tension, 1, 4).unwrap();
    let (mut collinear, mut momentum, mut action) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let q0 = random_vector(&mut || rng.gen::<f64>(), 4).scale(3.0);
        let v0 = unit_vector(&mut rng, 4);
        let curve = solve_geodesic(&h, &q0, &v0, s_end, 1e-2).unwrap();
        collinear = collinear.max(line_deviation(&curve, &q0, &v0).unwrap());
        momentum = momentum.max(curve.energy().iter().map(|p| (p - tension).abs()).fold(0.0, f64::max));
        action = action.max((action_value(&curve).unwrap() - tension * s_end).abs());
    }

    let plane = SurfaceMesh::from_fn(16, 16, (-1.0, 1.0), (-1.0, 1.0), |u, v| {
        vec![u + 0.2 * v, v - 0.5 * u, 0.3 * u + 0.1 * v, 0.7 * v]
    })
    .unwrap();
    let plane_spur = spur_residual(&plane).unwrap().max();

    let catenoid = |n: usize| {
        SurfaceMesh::from_fn(n, n, (0.0, PI / 2.0), (-0.6, 0.6), |u, v| vec![v.cosh() * u.cos(), v.cosh() * u.sin(), v])
            .unwrap()
    };
    let cat: Vec<f64> = [16, 32, 64].iter().map(|n| spur_residual(&catenoid(*n)).unwrap().max()).collect();
    let cat_orders = [order(cat[0], cat[1]), order(cat[1], cat[2])];

    let mut sphere_error = 0.0f64;
    for radius in [1.0, 2.5] {
        let mesh = SurfaceMesh::from_fn(64, 64, (0.5, PI - 0.5), (0.0, 2.0), |th, ph| {
            vec![radius * th.sin() * ph.cos(), radius * th.sin() * ph.sin(), radius * th.cos()]
        })
        .unwrap();
        let report = spur_residual(&mesh).unwrap();
        for n in report.interior() {
            sphere_error = sphere_error.max((report.values()[*n] * radius / 2.0 - 1.0).abs());
        }
    }

    let pass = collinear <= 1e-10
        && momentum <= 1e-12
        && action <= 1e-8
        && plane_spur <= 1e-10
        && cat_orders.iter().all(|o| *o >= 1.9)
        && sphere_error <= 0.05;
    outcome(
        pass,
        format!(
            "collinearity {collinear:.1e}; ||P| - L| {momentum:.1e}; |action - L s| {action:.1e}; plane spur {plane_spur:.1e}; \
             catenoid spur {:.2e} -> {:.2e}, orders {}; sphere relative deviation from 2/R {sphere_error:.2e}",
            cat[0],
            cat[2],
            fmt_orders(&cat_orders)
        ),
    )
}

fn hamilton_jacobi() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let tension = 1.3;
    let n = 4;
    let q0 = Multivector::vector(&[0.2, -0.1, 0.4, 0.0]);
    let s = HjFunction::relativistic_particle(tension, q0.clone()).unwrap();
    let h = StepSize::new(1e-5).unwrap();
    let mut magnitude = 0.0f64;
    let mut sampled = 0;
    while sampled < 1000 {
        let q = random_vector(&mut || rng.gen::<f64>(), n).scale(2.0);
        if q.try_sub(&q0).unwrap().magnitude() < 10.0 * h.get() {
            continue;
        }
        let p = s.momentum(&q, h).unwrap();
        magnitude = magnitude.max((p.magnitude() - tension).abs());
        sampled += 1;
    }

    let string = string_hamiltonian(tension, 1, n).unwrap();
    let mut geodesic_spread = 0.0f64;
    let mut agreement = 0.0f64;
    for _ in 0..10 {
        let v = unit_vector(&mut rng, n);
        let start = &q0 + &v.scale(0.5);
        let curve = solve_geodesic(&string, &start, &v, 4.0, 1e-2).unwrap();
        geodesic_spread = geodesic_spread.max(conserved_quantity(&s, &curve, 0).unwrap().spread);
        let from_q0 = solve_geodesic(&string, &q0, &v, 4.0, 1e-2).unwrap();
        let level = motion_from_hj(&q0, &v, 4.0, 1e-2).unwrap();
        for (a, b) in from_q0.points().iter().zip(level.points()) {
            agreement = agreement.max(a.try_sub(b).unwrap().magnitude());
        }
        geodesic_spread = geodesic_spread.max(conserved_quantity(&s, &level, 1).unwrap().spread);
    }

    let taus: Vec<f64> = (0..=100).map(|i| i as f64 * 0.02).collect();
    let arc_points = taus
        .iter()
        .map(|t| Multivector::vector(&[1.0 + t.cos(), t.sin(), 0.4, 0.0]))
        .collect();
    let arc = MotionCurve::new(taus, arc_points, Vec::new()).unwrap();
    let arc_spread = conserved_quantity(&s, &arc, 0).unwrap().spread;

    let pass = magnitude <= 1e-6 && geodesic_spread <= 1e-8 && arc_spread >= 0.01 && agreement <= 1e-10;
    outcome(
        pass,
        format!(
            "||d^S| - L| {magnitude:.1e} over 1000 points; spread on geodesics {geodesic_spread:.1e}, \
             on circular arc {arc_spread:.3}; level-set vs integrator {agreement:.1e}"
        ),
    )
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Builds the command-line binary and returns its path.
fn build_cli() -> Result<PathBuf, String> {
    let cargo = option_env!("CARGO").unwrap_or("cargo");
    let output = Command::new(cargo)
        .args(["build", "--quiet", "-p", "gamcal-cli", "--bin", "gamcal", "--message-format=json"])
        .current_dir(workspace_root())
        .output()
        .map_err(|e| format!("cannot run cargo: {e}"))?;
    if !output.status.success() {
        return Err(format!("cargo build failed: {}", String::from_utf8_lossy(&output.stderr)));
    }
    for line in String::from_utf8_lossy(&output.stdout).lines() {
        let Ok(msg) = serde_json::from_str::<serde_json::Value>(line) else {
            continue;
        };
        if msg["reason"] == "compiler-artifact" && msg["target"]["name"] == "gamcal" {
            if let Some(exe) = msg["executable"].as_str() {
                return Ok(PathBuf::from(exe));
            }
        }
    }
    Err("cargo did not report the gamcal executable".into())
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gamcal-acceptance-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(exe: &Path, args: &[&str]) -> Result<i32, String> {
    let status = Command::new(exe)
        .args(args)
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| format!("cannot run {}: {e}", exe.display()))?;
    Ok(status.code().unwrap_or(-1))
}

fn directory_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn cli_determinism() -> Result<Outcome, String> {
    let exe = build_cli()?;
    let scenarios = [
        ("mechanics", vec!["trajectory.csv"]),
        ("scalar-field", vec!["field.csv", "tensor.csv"]),
        ("geodesic", vec!["geodesic.csv"]),
        ("hj-check", vec!["hj_samples.csv"]),
        ("ga-selftest", vec!["selftest.csv"]),
    ];
    let mut problems = Vec::new();
    let mut verified = 0;
    for (scenario, data_files) in &scenarios {
        let first = scratch_dir(&format!("{scenario}-a"));
        let second = scratch_dir(&format!("{scenario}-b"));
        for dir in [&first, &second] {
            let code = run(&exe, &[scenario, "--out", dir.to_str().unwrap(), "--seed", "42"])?;
            if code != 0 {
                problems.push(format!("{scenario} exited {code}"));
            }
        }
        if directory_bytes(&first) != directory_bytes(&second) {
            problems.push(format!("{scenario} outputs differ between runs"));
        }
        let config = first.join("config.json");
        for data in data_files {
            let code = run(&exe, &["verify", "--config", config.to_str().unwrap(), "--data", first.join(data).to_str().unwrap()])?;
            if code == 0 {
                verified += 1;
            } else {
                problems.push(format!("verify {scenario}/{data} exited {code}"));
            }
        }
    }

    let dir = scratch_dir("mechanics-a");
    run(&exe, &["mechanics", "--out", dir.to_str().unwrap()])?;
    let text = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let column = lines[0].split(',').position(|c| c == "p_2").unwrap();
    let mut fields: Vec<String> = lines[10].split(',').map(str::to_owned).collect();
    fields[column] = (fields[column].parse::<f64>().unwrap() + 0.1).to_string();
    lines[10] = fields.join(",");
    let corrupted = dir.join("corrupted.csv");
    std::fs::write(&corrupted, lines.join("\n") + "\n").unwrap();
    let code = run(&exe, &["verify", "--config", dir.join("config.json").to_str().unwrap(), "--data", corrupted.to_str().unwrap()])?;
    if code == 0 {
        problems.push("verify accepted a corrupted momentum column".into());
    }
    for (scenario, _) in &scenarios {
        let _ = std::fs::remove_dir_all(scratch_dir(&format!("{scenario}-a")));
        let _ = std::fs::remove_dir_all(scratch_dir(&format!("{scenario}-b")));
    }

    let detail = if problems.is_empty() {
        format!("5 scenarios byte-identical across runs; {verified} artifacts verified; corrupted momentum rejected (exit {code})")
    } else {
        problems.join("; ")
    };
    Ok(outcome(problems.is_empty(), detail))
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("GA identity suite", Box::new(ga_identities)),
        ("multivector derivative", Box::new(multivector_derivative_of_square)),
        ("fundamental theorem", Box::new(fundamental_theorem)),
        ("mechanics", Box::new(mechanics)),
        ("scalar field", Box::new(scalar_field)),
        ("string", Box::new(string_geodesics_and_spur)),
        ("Hamilton-Jacobi", Box::new(hamilton_jacobi)),
        (
            "CLI determinism",
            Box::new(|| cli_determinism().unwrap_or_else(|e| outcome(false, e))),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {} ({name}): {verdict}: {}", i + 1, result.detail);
        if !result.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
