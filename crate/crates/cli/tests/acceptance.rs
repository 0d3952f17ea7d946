//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the test harness so that every line is printed. The process
//! fails if a criterion fails that is not listed in `KNOWN_GAPS`; a known
//! gap still prints FAIL with its measured value.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use flexbeam_cli::ProblemSpec;
use flexbeam_core::quadrature::GaussRule;
use flexbeam_core::verify::{check_threshold, POINCARE_RESOLUTION};
use flexbeam_core::{
    build_mesh, eval_energy, poincare_constant, search, solve_fixed, verify_solution, BreakConfig, BreakKind,
    Certificate, DirichletDatum, Discretization, LoadField, Loads, ModelParams, Problem, ProblemKind, SearchPolicy,
    SolveReport,
};

/// Criteria whose measured values are known to miss the target; see README.
const KNOWN_GAPS: &[usize] = &[3];

const CLAMPED_ROOT: f64 = 4.730040744862704;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn params(eta: f64, mu: f64, gamma: f64, alpha: f64, beta: f64, sigma: f64) -> ModelParams {
    ModelParams {
        eta,
        mu,
        gamma,
        alpha,
        beta,
        sigma,
    }
}

fn expr(s: &str) -> LoadField {
    LoadField::expression(s).unwrap()
}

fn solve(problem: &Problem, n: usize, k: &BreakConfig) -> SolveReport {
    solve_fixed(problem, &build_mesh(n, k).unwrap()).unwrap()
}

/// Least-squares slope of `-log2(e)` against `log2(n)`.
fn fitted_order(ns: &[usize], es: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).log2()).collect();
    let ys: Vec<f64> = es.iter().map(|e| -e.log2()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn decreasing(es: &[f64]) -> bool {
    es.windows(2).all(|w| w[1] < w[0])
}

fn fmt(es: &[f64]) -> String {
    es.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" ")
}

fn manufactured() -> Problem {
    Problem::new(
        ProblemKind::E1,
        params(1.0, 1.0, 1.0, 1.0, 1.0, 0.0),
        DirichletDatum::zero(),
        Loads::single(expr("48 + 2*(1 - x*x)*(1 - x*x)")),
    )
}

fn exact(x: f64) -> f64 {
    (1.0 - x * x).powi(2)
}

fn criterion_1() -> Outcome {
    let problem = manufactured();
    let rule = GaussRule::new(8);
    let ns = [32, 64, 128];
    let start = Instant::now();
    let errors: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let r = solve(&problem, n, &BreakConfig::empty());
            let u = r.fields.primary();
            let mesh = u.mesh();
            (0..mesh.element_count())
                .map(|e| {
                    let (a, b) = mesh.element(e);
                    let c = u.element(e);
                    rule.mapped(a, b).map(|(x, w)| w * (c.value(x) - exact(x)).powi(2)).sum::<f64>()
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let elapsed = start.elapsed().as_secs_f64();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let pass = orders.iter().all(|&p| p >= 3.5) && elapsed < 1.0;
    outcome(
        pass,
        format!("L2 errors {} orders {:.2?} in {elapsed:.3}s", fmt(&errors), orders),
    )
}

fn shipped(name: &str) -> ProblemSpec {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(format!("{name}.toml"));
    ProblemSpec::from_toml(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn criterion_2() -> Outcome {
    let ns = [32, 64, 128, 256];
    let mut pass = true;
    let mut lines = Vec::new();
    for name in ["smooth", "crack", "crease"] {
        let spec = shipped(name);
        let problem = spec.problem().unwrap();
        let k = spec.breaks().unwrap();
        let gaps: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let r = solve(&problem, n, &k);
                let v = verify_solution(&problem, &r).unwrap();
                v.compliance.expect("compliance applies").relative_gap
            })
            .collect();
        let order = fitted_order(&ns, &gaps);
        let ok = gaps[3] <= 5e-3 && decreasing(&gaps) && order >= 1.0;
        pass &= ok;
        lines.push(format!("{name}: {} (order {order:.2})", fmt(&gaps)));
    }
    outcome(pass, lines.join("; "))
}

fn condition(problem: &Problem, r: &SolveReport, name: &str) -> f64 {
    verify_solution(problem, r)
        .unwrap()
        .condition(name)
        .unwrap_or_else(|| panic!("{name} not reported"))
        .value
}

fn euler_residual(problem: &Problem, n: usize) -> f64 {
    let r = solve(problem, n, &BreakConfig::empty());
    let v = verify_solution(problem, &r).unwrap();
    v.euler.iter().map(|e| e.residual).fold(0.0, f64::max)
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();

    // weak residual against smooth test functions
    let problem = manufactured();
    let (r128, r256) = (euler_residual(&problem, 128), euler_residual(&problem, 256));
    let ok = r128 <= 1e-8;
    pass &= ok;
    lines.push(format!(
        "weak residual {r128:.2e} at n=128 ({}; {r256:.2e} at n=256)",
        if ok { "ok" } else { "target 1e-8 missed" }
    ));

    // natural conditions at the breaks chosen by a search
    let spec = shipped("search");
    let problem = spec.problem().unwrap();
    let base = build_mesh(32, &BreakConfig::empty()).unwrap();
    let found = search(&problem, &base, &spec.policy()).unwrap().best.breaks;
    let ns = [32, 64, 128, 256];
    let reports: Vec<SolveReport> = ns.iter().map(|&n| solve(&problem, n, &found)).collect();
    for (kind, name) in [(BreakKind::Crack, "crack_interior_traces"), (BreakKind::Crease, "crease_interior_traces")] {
        if found.count(kind) == 0 {
            pass = false;
            lines.push(format!("search found no {kind:?}"));
            continue;
        }
        let vals: Vec<f64> = reports.iter().map(|r| condition(&problem, r, name)).collect();
        let order = fitted_order(&ns, &vals);
        pass &= decreasing(&vals) && order >= 1.0;
        lines.push(format!("{name} at {found}: {} (order {order:.2})", fmt(&vals)));
    }

    // equal prices: an optimal crease also satisfies the crack conditions
    let even = Problem::new(
        ProblemKind::E1,
        params(1.0, 50.0, 1.0, 0.3, 0.3, 0.0),
        DirichletDatum::expression("0.5*cos(3*x)").unwrap(),
        Loads::single(LoadField::Constant(0.5)),
    );
    let crease = BreakConfig::single(0.0, BreakKind::Crease).unwrap();
    let crack = BreakConfig::single(0.0, BreakKind::Crack).unwrap();
    let mut vals = Vec::new();
    let mut tie = 0.0_f64;
    for &n in &ns {
        let a = solve(&even, n, &crease);
        let b = solve(&even, n, &crack);
        tie = tie.max((a.energy.total - b.energy.total).abs());
        vals.push(condition(&even, &a, "equal_release_traces"));
    }
    let order = fitted_order(&ns, &vals);
    pass &= decreasing(&vals) && order >= 1.0 && tie <= 1e-9;
    lines.push(format!(
        "equal_release_traces: {} (order {order:.2}, crack/crease energy gap {tie:.1e})",
        fmt(&vals)
    ));
    outcome(pass, lines.join("; "))
}

fn criterion_4() -> Outcome {
    let lambda = (CLAMPED_ROOT / 2.0).powi(4);
    let ns = [16, 32, 64, 128, 256, POINCARE_RESOLUTION];
    let cs: Vec<f64> = ns.iter().map(|&n| poincare_constant(n).unwrap()).collect();
    let c = *cs.last().unwrap();
    let rel = (c - 1.0 / lambda).abs() * lambda;
    let mono = cs.windows(2).all(|w| w[1] > w[0]);
    outcome(
        rel <= 1e-4 && mono,
        format!("C_P(512) = {c:.10} vs {:.10} (rel {rel:.1e}); increasing in n: {mono}", 1.0 / lambda),
    )
}

fn random_small_load(rng: &mut StdRng, kind: ProblemKind) -> Problem {
    let beta: f64 = rng.gen_range(0.5..2.0);
    let p = params(
        rng.gen_range(0.5..2.0),
        rng.gen_range(1.0..20.0),
        rng.gen_range(1.0..5.0),
        beta * rng.gen_range(1.0..2.0),
        beta,
        0.0,
    );
    let w = DirichletDatum::expression(&format!(
        "{} + {}*x + {}*sin(3*x)",
        rng.gen_range(-0.2..0.2),
        rng.gen_range(-0.2..0.2),
        rng.gen_range(-0.2..0.2)
    ))
    .unwrap();
    let f_r = expr(&format!("{} + {}*x", rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)));
    let loads = match kind {
        ProblemKind::E1 => Loads::single(f_r),
        _ => Loads::pair(f_r, LoadField::Constant(rng.gen_range(-0.3..0.3))),
    };
    Problem::new(kind, p, w, loads)
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let n = 16;
    let base = build_mesh(n, &BreakConfig::empty()).unwrap();
    let policy = SearchPolicy {
        k_max: 2,
        ..Default::default()
    };
    let start = Instant::now();
    let (mut accepted, mut drawn, mut unbroken) = (0, 0, 0);
    let mut exhaustive = true;
    while accepted < 50 && drawn < 5000 {
        drawn += 1;
        let kind = if drawn % 2 == 0 { ProblemKind::E1 } else { ProblemKind::F1 };
        let problem = random_small_load(&mut rng, kind);
        if !check_threshold(&problem, &base).unwrap().holds {
            continue;
        }
        accepted += 1;
        let s = search(&problem, &base, &policy).unwrap();
        exhaustive &= s.certificate == Certificate::Exhaustive;
        if s.best.breaks.is_empty() {
            unbroken += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        accepted == 50 && unbroken == 50 && exhaustive && elapsed < 60.0,
        format!("{unbroken}/{accepted} unbroken ({drawn} instances drawn, exhaustive {exhaustive}) in {elapsed:.1}s"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let n = 32;
    let base = build_mesh(n, &BreakConfig::empty()).unwrap();
    let (mut agree, mut greedy_below, mut beaten) = (0, 0, 0);
    let kinds = BreakKind::admissible_for(ProblemKind::E1);
    for _ in 0..50 {
        let beta: f64 = rng.gen_range(0.05..0.4);
        let alpha = beta * rng.gen_range(1.0..2.0);
        let c: f64 = rng.gen_range(-0.6..0.6);
        let a: f64 = rng.gen_range(0.3..1.0);
        let s: f64 = rng.gen_range(10.0..40.0);
        let mu: f64 = rng.gen_range(20.0..200.0);
        let w = DirichletDatum::expression(&format!("{a}*tanh({s}*(x - {c}))")).unwrap();
        let f = expr(&format!("{}*x", rng.gen_range(-2.0..2.0)));
        let problem = Problem::new(ProblemKind::E1, params(1.0, mu, 1.0, alpha, beta, 0.0), w, Loads::single(f));
        let ex = search(&problem, &base, &SearchPolicy { k_max: 2, ..Default::default() }).unwrap();
        let gr = search(
            &problem,
            &base,
            &SearchPolicy {
                k_max: 2,
                exhaustive_cap: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(ex.certificate, Certificate::Exhaustive);
        assert_eq!(gr.certificate, Certificate::Greedy);
        let (e, g) = (ex.best.energy.total, gr.best.energy.total);
        let tol = 1e-9 * (1.0 + e.abs());
        if (g - e).abs() <= tol {
            agree += 1;
        }
        if g < e - tol {
            greedy_below += 1;
        }
        for _ in 0..100 {
            let count = rng.gen_range(0..=2);
            let mut nodes: Vec<usize> = Vec::new();
            while nodes.len() < count {
                let i = rng.gen_range(0..=n);
                if !nodes.contains(&i) {
                    nodes.push(i);
                }
            }
            let list = nodes
                .iter()
                .map(|&i| flexbeam_core::Break::new(base.nodes()[i], kinds[rng.gen_range(0..kinds.len())]))
                .collect();
            let k = BreakConfig::new(list).unwrap();
            if solve(&problem, n, &k).energy.total < e - tol {
                beaten += 1;
            }
        }
    }
    outcome(
        agree >= 45 && greedy_below == 0 && beaten == 0,
        format!("greedy = exhaustive on {agree}/50, greedy below exhaustive {greedy_below}, random configurations beating exhaustive {beaten}/5000"),
    )
}

/// Projected gradient with momentum and adaptive restart on the
/// Jacobi-scaled box-constrained quadratic of `d`.
fn projected_gradient(d: &Discretization) -> Vec<f64> {
    let h = &d.form.h;
    let n = h.dim();
    let s: Vec<f64> = h.diagonal().iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut lo = vec![f64::NEG_INFINITY; n];
    for b in &d.layout.bounds {
        lo[b.dof] = b.bound / s[b.dof];
    }
    // scaled Hessian S H S and gradient S g
    let grad = |y: &[f64]| -> Vec<f64> {
        let x: Vec<f64> = y.iter().zip(&s).map(|(y, s)| y * s).collect();
        h.mul_vec(&x)
            .iter()
            .zip(&d.form.g)
            .zip(&s)
            .map(|((hx, g), s)| s * (hx - g))
            .collect()
    };
    let scaled = {
        let dense = h.to_dense();
        (0..n)
            .map(|i| (0..n).map(|j| (dense[i][j] * s[i] * s[j]).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let step = 1.0 / scaled;
    let project = |y: &mut Vec<f64>| {
        for (v, l) in y.iter_mut().zip(&lo) {
            *v = v.max(*l);
        }
    };
    let mut y: Vec<f64> = lo.iter().map(|l| if l.is_finite() { *l } else { 0.0 }).collect();
    let mut z = y.clone();
    let mut t = 1.0_f64;
    for _ in 0..2_000_000 {
        let gz = grad(&z);
        let mut next: Vec<f64> = z.iter().zip(&gz).map(|(z, g)| z - step * g).collect();
        project(&mut next);
        let moved = next.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        // restart when the momentum points uphill
        let uphill: f64 = gz.iter().zip(next.iter().zip(&y)).map(|(g, (a, b))| g * (a - b)).sum();
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if uphill > 0.0 {
            t = 1.0;
            z = y.clone();
            continue;
        }
        z = next
            .iter()
            .zip(&y)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        t = t_next;
        y = next;
        if moved < 1e-15 {
            break;
        }
    }
    y.iter().zip(&s).map(|(y, s)| y * s).collect()
}

fn criterion_7() -> Outcome {
    let n = 32;
    let e1 = |f: &str| {
        Problem::new(
            ProblemKind::E1,
            params(1.0, 1.0, 1.0, 1.0, 1.0, 0.0),
            DirichletDatum::zero(),
            Loads::single(expr(f)),
        )
        .with_constraint(true)
    };
    let f1 = Problem::new(
        ProblemKind::F1,
        params(1.0, 5.0, 2.0, 1.0, 1.0, 0.0),
        DirichletDatum::polynomial(vec![0.0, 0.1]),
        Loads::pair(expr("-30*x"), LoadField::Constant(2.0)),
    )
    .with_constraint(true);
    let cases = [
        ("E1 crack@0 f=-40x", e1("-40*x"), BreakConfig::single(0.0, BreakKind::Crack).unwrap()),
        ("E1 crease@0 f=-40", e1("-40"), BreakConfig::single(0.0, BreakKind::Crease).unwrap()),
        ("F1 crack@0.25", f1, BreakConfig::single(0.25, BreakKind::Crack).unwrap()),
    ];
    let mut pass = true;
    let mut lines = Vec::new();
    for (label, problem, k) in cases {
        let mesh = build_mesh(n, &k).unwrap();
        let r = solve_fixed(&problem, &mesh).unwrap();
        let v = verify_solution(&problem, &r).unwrap();
        let vi = v.vi.as_ref().unwrap();
        // one-sided curvature just past each contact break
        let breaks: Vec<usize> = mesh.break_nodes().map(|(i, _)| i).collect();
        let min_d2 = vi
            .contact_traces
            .iter()
            .filter(|t| t.side == flexbeam_core::Side::Right && breaks.contains(&t.node))
            .map(|t| t.d2)
            .fold(f64::INFINITY, f64::min);
        let d = Discretization::new(&problem, &mesh).unwrap();
        let oracle = projected_gradient(&d);
        let scale = 1.0 + r.dofs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let diff = r.dofs.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        let ok = vi.complementarity <= 1e-9 && vi.active > 0 && (min_d2 >= -1e-6) && diff <= 1e-8;
        pass &= ok;
        lines.push(format!(
            "{label}: {} active, complementarity {:.1e}, min contact ü⁺ {}, oracle gap {diff:.1e}",
            vi.active,
            vi.complementarity,
            if min_d2.is_finite() { format!("{min_d2:.2e}") } else { "n/a".into() },
        ));
    }
    outcome(pass, lines.join("; "))
}

fn hinge_problem(sigma: f64) -> Problem {
    Problem::new(
        ProblemKind::G1,
        params(1.0, 10.0, 2.0, 1.0, 0.5, sigma),
        DirichletDatum::expression("0.2*sin(2*x)").unwrap(),
        Loads::pair(expr("4 + 6*x"), LoadField::Constant(1.0)),
    )
}

fn criterion_8() -> Outcome {
    let n = 32;
    let k = BreakConfig::single(0.25, BreakKind::Hinge).unwrap();
    let mesh = build_mesh(n, &k).unwrap();
    let problem = hinge_problem(0.05);
    let r = solve_fixed(&problem, &mesh).unwrap();

    // energy along the jump: the rest of the unknowns minimize exactly
    let d = Discretization::new(&problem, &mesh).unwrap();
    let j = d.layout.jumps[0].dof;
    let dense = d.form.h.to_dense();
    let m = dense.len();
    let rest: Vec<usize> = (0..m).filter(|&i| i != j).collect();
    let h_rr = DMatrix::from_fn(rest.len(), rest.len(), |a, b| dense[rest[a]][rest[b]]);
    let h_rj = DVector::from_fn(rest.len(), |a, _| dense[rest[a]][j]);
    let g_r = DVector::from_fn(rest.len(), |a, _| d.form.g[rest[a]]);
    let chol = h_rr.clone().cholesky().expect("positive definite");
    let base = chol.solve(&g_r);
    let dir = chol.solve(&h_rj);
    let full = |t: f64| -> Vec<f64> {
        let mut x = vec![0.0; m];
        for (a, &i) in rest.iter().enumerate() {
            x[i] = base[a] - t * dir[a];
        }
        x[j] = t;
        x
    };
    let sigma = problem.params.sigma;
    let objective = |x: &[f64]| {
        let hx = d.form.h.mul_vec(x);
        0.5 * hx.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            - d.form.g.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            + sigma * x[j].abs()
    };
    // unpriced optimum of the jump, from the reduced quadratic
    let curvature = dense[j][j] - h_rj.dot(&dir);
    let t0 = (d.form.g[j] - h_rj.dot(&base)) / curvature;
    let reach = 1.5 * t0.abs().max(1e-3);
    let grid: Vec<f64> = (0..2001).map(|i| -reach + 2.0 * reach * i as f64 / 2000.0).collect();
    let best_t = grid
        .iter()
        .copied()
        .min_by(|a, b| objective(&full(*a)).total_cmp(&objective(&full(*b))))
        .unwrap();
    let fields = d.fields(&full(best_t)).unwrap();
    let grid_energy = eval_energy(problem.kind, &problem.params, &problem.w, &problem.loads, &k, &fields)
        .unwrap()
        .total;
    let gap = (grid_energy - r.energy.total).abs();
    let jump = r.fields.primary().jump(mesh.node_at(0.25).unwrap()).slope;

    // without plastic work the hinge is a crease
    let g0 = solve_fixed(&hinge_problem(0.0), &mesh).unwrap();
    let mut f1 = hinge_problem(0.0);
    f1.kind = ProblemKind::F1;
    let crease = BreakConfig::single(0.25, BreakKind::Crease).unwrap();
    let c = solve(&f1, n, &crease);
    let reduction = (g0.energy.total - c.energy.total).abs();
    let ok = gap <= 1e-6 && r.energy.total <= grid_energy + 1e-10 && reduction <= 1e-9 && jump.abs() > 0.0;
    outcome(
        ok,
        format!(
            "σ=0.05: solver {:.10} vs grid {:.10} (gap {gap:.1e}, jump {jump:.4} vs unpriced {t0:.4}); σ=0 vs crease gap {reduction:.1e}",
            r.energy.total, grid_energy
        ),
    )
}

fn criterion_9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_flexbeam");
    let specs = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs");
    let mut pass = true;
    let mut lines = Vec::new();
    for (command, name) in [("search", "search"), ("solve", "strengthening"), ("solve", "crack")] {
        let runs: Vec<Vec<u8>> = ["1", "1", "4"]
            .iter()
            .map(|jobs| {
                let dir = tempfile::tempdir().unwrap();
                let status = Command::new(bin)
                    .args([command, "--spec"])
                    .arg(specs.join(format!("{name}.toml")))
                    .arg("--out")
                    .arg(dir.path())
                    .args(["--jobs", jobs])
                    .output()
                    .unwrap();
                assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
                std::fs::read(dir.path().join(format!("{name}.json"))).unwrap()
            })
            .collect();
        let same = runs[0] == runs[1] && runs[0] == runs[2];
        pass &= same;
        lines.push(format!("{command} {name}: {}", if same { "identical" } else { "differ" }));
    }
    outcome(pass, lines.join("; "))
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 9] = [
        (1, "manufactured convergence", criterion_1),
        (2, "compliance identity", criterion_2),
        (3, "Euler and natural conditions", criterion_3),
        (4, "Poincaré constant", criterion_4),
        (5, "uniqueness threshold", criterion_5),
        (6, "search optimality", criterion_6),
        (7, "obstacle KKT", criterion_7),
        (8, "elastic-plastic oracle", criterion_8),
        (9, "determinism", criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (id, title, run) in criteria {
        let start = Instant::now();
        let o = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_GAPS.contains(&id) { " [known gap]" } else { "" };
        println!(
            "{verdict} criterion {id} ({title}){note}: {} [{:.1}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass && !KNOWN_GAPS.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
