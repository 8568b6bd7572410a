//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Oracles are computed here from first principles.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavegap::{parse_config, run_pipeline, RunOptions};
use wavegap_core::analytic::*;
use wavegap_core::explorer::*;
use wavegap_core::fem::*;

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.pass &= ok;
        self.lines.push(format!("    [{}] {what}", if ok { "ok" } else { "FAIL" }));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

// ---------------------------------------------------------------- oracles

/// Eigenvalues of a real 2x2 matrix with real spectrum, larger first, via
/// the cancellation-free quadratic formula.
fn eig2(m: [[f64; 2]; 2]) -> (f64, f64) {
    let b = -(m[0][0] + m[1][1]);
    let c = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (b * b - 4.0 * c).max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * disc);
    let (x, y) = if q != 0.0 { (q, c / q) } else { (0.0, 0.0) };
    (x.max(y), x.min(y))
}

/// `f_j(t) = 2 eig_j(M(t))` for the coupling matrix built from scratch.
fn f_oracle(beta1: f64, beta2: f64, zeta: f64, t: f64) -> (f64, f64) {
    let m = [[t * beta1 - 1.0, 1.0], [zeta, -zeta - t * beta2]];
    let (a, b) = eig2(m);
    (2.0 * a, 2.0 * b)
}

/// Bisection on a sign change of `g` in `[lo, hi]` down to adjacent doubles.
fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let glo = g(lo);
    assert!(glo * g(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) > 0.0) == (glo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimum of a unimodal function.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a < 1e-13 {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Stationary point of `f1` (minimum) or `f2` (maximum), by bisection on the
/// derivative of the eigenvalue branch.
fn stationary(beta1: f64, beta2: f64, zeta: f64, upper: bool) -> f64 {
    // d/dt of 2 eig: (β1 - β2) ± s (β1 + β2) / sqrt(s² + 4ζ), s = t(β1 + β2) + ζ - 1.
    let g = |t: f64| {
        let s = t * (beta1 + beta2) + zeta - 1.0;
        let sign = if upper { -1.0 } else { 1.0 };
        (beta1 - beta2) + sign * s * (beta1 + beta2) / (s * s + 4.0 * zeta).sqrt()
    };
    let mut w = 1.0;
    while g(-w) * g(w) > 0.0 {
        w *= 2.0;
    }
    bisect(g, -w, w)
}

// ---------------------------------------------------------------- criteria

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    let mut cases = 0usize;
    let (mut eig, mut sig, mut tau, mut split, mut zero) = (0f64, 0f64, 0f64, 0f64, 0f64);
    let mut attempts = 0;
    while cases < 1000 && attempts < 100_000 {
        attempts += 1;
        let d = rng.random_range(0.3..3.1);
        let h = rng.random_range(0.8..8.0);
        let Ok(g) = WaveguideGeometry::new(d, h, 0.0) else { continue };
        let Ok(list) = find_crossings(&g, DEFAULT_ENERGY_CAP) else { continue };
        if list.is_empty() {
            continue;
        }
        let c = list[rng.random_range(0..list.len())];
        let Ok(f) = GapForecast::new(&c, &g) else { continue };
        cases += 1;
        // Constants from scratch.
        let b1 = (2.0 * PI * c.n as f64 + c.k0) / h;
        let b2 = -(2.0 * PI * c.m as f64 + c.k0) / h;
        let z = PI / d;
        let beta = (b1 - b2) / (b1 + b2);

        let t = rng.random_range(-10.0..10.0);
        let (o1, o2) = f_oracle(b1, b2, z, t);
        let (r1, r2) = c.correction_roots(t);
        let m = c.coupling_matrix(t);
        let (l1, l2) = eig2(m);
        let scale = l1.abs().max(l2.abs());
        eig = eig.max(((l1 - r1 / 2.0).abs()).max((l2 - r2 / 2.0).abs()) / scale);
        eig = eig.max(((o1 - r1).abs()).max((o2 - r2).abs()) / (2.0 * scale));

        let t_min = stationary(b1, b2, z, false);
        let t_max = stationary(b1, b2, z, true);
        sig = sig.max(rel(f.sigma_l, t_min)).max(rel(f.sigma_r, t_max));
        tau = tau.max(rel(f.tau_l, f_oracle(b1, b2, z, t_min).0)).max(rel(f.tau_r, f_oracle(b1, b2, z, t_max).1));
        split = split.max(rel(f.tau_l - f.tau_r, 4.0 * (z * (1.0 - beta * beta)).sqrt()));
        let (z1, z2) = c.correction_roots(0.0);
        zero = zero.max(z1.abs() / (z + 1.0)).max((z2 + 2.0 * (z + 1.0)).abs() / (z + 1.0));
    }
    let elapsed = started.elapsed();
    o.check(cases == 1000, format!("{cases} random crossings from {attempts} geometries"));
    o.check(eig <= 1e-12, format!("eig(M) = f/2: worst relative {eig:.2e} (tol 1e-12)"));
    o.check(sig <= 1e-12, format!("sigma = t_min/t_max: worst {sig:.2e} (tol 1e-12)"));
    o.check(tau <= 1e-12, format!("tau = f(t*): worst {tau:.2e} (tol 1e-12)"));
    o.check(split <= 1e-12, format!("tau_l - tau_r = 4 sqrt(zeta(1 - beta^2)): worst {split:.2e} (tol 1e-12)"));
    o.check(zero <= 4.0 * f64::EPSILON, format!("f1(0) = 0, f2(0) = -2(zeta+1): worst {zero:.2e} (tol 4 ulp)"));
    o.check(elapsed < Duration::from_secs(1), format!("runtime {elapsed:.2?} (< 1 s)"));
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let started = Instant::now();
    let (d, h) = (2.0, 2.3);
    let g = WaveguideGeometry::new(d, h, 0.0).unwrap();
    let list = find_crossings(&g, DEFAULT_ENERGY_CAP).unwrap();
    o.check(list.len() == 1, format!("(d, h) = (2, 2.3): {} crossing(s)", list.len()));
    let Some(c) = list.first() else { return o };
    o.check((c.n, c.m) == (-1, 0), format!("indices (n, m) = ({}, {})", c.n, c.m));

    // Equal energies of E+_{-1,0} and E-_{0,0}, by bisection.
    let e_plus = |k: f64| ((k - 2.0 * PI) / (2.0 * h)).powi(2) + 0.25;
    let e_minus = |k: f64| (k / (2.0 * h)).powi(2) + (PI / (2.0 * d)).powi(2);
    let k0 = bisect(|k| e_plus(k) - e_minus(k), 1e-9, PI);
    let e0 = e_plus(k0);
    let b1 = (k0 - 2.0 * PI) / h;
    let b2 = -k0 / h;
    let z = PI / d;
    let t_min = golden_min(|t| f_oracle(b1, b2, z, t).0, -20.0, 20.0);
    let t_max = golden_min(|t| -f_oracle(b1, b2, z, t).1, -20.0, 20.0);
    let tau_l = f_oracle(b1, b2, z, t_min).0;
    let tau_r = f_oracle(b1, b2, z, t_max).1;
    let f = GapForecast::new(c, &g).unwrap();
    for (name, got, oracle, quoted) in [
        ("k0", c.k0, k0, 2.523866),
        ("E0", c.e0, e0, 0.917886),
        ("tau_l", f.tau_l, tau_l, -0.225337),
        ("tau_r", f.tau_r, tau_r, -5.140725),
        ("sigma_l", f.sigma_l, t_min, 0.392957),
        ("sigma_r", f.sigma_r, t_max, 0.024931),
    ] {
        o.check(
            (got - oracle).abs() <= 1e-6,
            format!("{name} = {got:.9} vs oracle {oracle:.9} (|diff| {:.1e}; quoted {quoted})", (got - oracle).abs()),
        );
    }

    // κ(E0) by enumerating band ranges over a dense k sample.
    let ks: Vec<f64> = (0..=4000).map(|i| -PI + 2.0 * PI * i as f64 / 4000.0).collect();
    let mut kappa = 0;
    for (width, w) in [(PI, 0), (d, 1)] {
        let _ = w;
        for p in 0..4u32 {
            for m in -6i64..=6 {
                let e = |k: f64| ((k + 2.0 * PI * m as f64) / (2.0 * h)).powi(2) + (PI / width * (p as f64 + 0.5)).powi(2);
                let lo = ks.iter().map(|&k| e(k)).fold(f64::INFINITY, f64::min);
                let hi = ks.iter().map(|&k| e(k)).fold(f64::NEG_INFINITY, f64::max);
                if lo <= e0 && e0 <= hi {
                    kappa += 1;
                }
            }
        }
    }
    o.check(c.kappa == 3 && kappa == 3, format!("kappa(E0) = {} (enumeration {kappa})", c.kappa));

    let none = find_crossings(&WaveguideGeometry::new(2.0, 1.0, 0.0).unwrap(), 2.25).unwrap();
    o.check(none.is_empty(), format!("(d, h) = (2, 1.0): {} crossings below 9/4", none.len()));
    let elapsed = started.elapsed();
    o.check(elapsed < Duration::from_secs(1), format!("runtime {elapsed:.2?} (< 1 s)"));
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    o.check(corollary_holds(2.3, 2.0), "(h, d) = (2.3, 2.0) eligible".into());
    o.check(!corollary_holds(1.0, 2.0), "(h, d) = (1.0, 2.0) not eligible".into());
    o.check(!corollary_holds(2.3, PI), "(h, d) = (2.3, pi) not eligible".into());
    let has = |h: f64, d: f64| {
        WaveguideGeometry::new(d, h, 0.0)
            .ok()
            .and_then(|g| find_crossings(&g, DEFAULT_ENERGY_CAP).ok())
            .is_some_and(|l| l.iter().any(|c| (c.n, c.m) == (-1, 0)))
    };
    o.check(has(2.3, 2.0) && !has(1.0, 2.0), "consistent with crossing enumeration".into());
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let g = WaveguideGeometry::new(2.0, 2.3, 0.0).unwrap();
    let solver = SolverConfig::default();
    let base = MeshConfig::default();
    for k in [0.0, 1.0, PI] {
        let started = Instant::now();
        let mesh = build_mesh(&g, &base).unwrap();
        let form = assemble(&mesh, k);
        let r = solve_lowest(&form, 6, &solver).unwrap();
        let reference = reference_spectrum(&g, k, 6);
        let worst = r.eigenvalues.iter().zip(&reference).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
        o.check(worst <= 1e-3, format!("eps = 0, k = {k:.4}: worst relative error {worst:.2e} on {} dofs (tol 1e-3)", form.dof_count()));
        let t = convergence_study(&g, InterfaceState::Closed, k, 6, 3, &base, &solver).unwrap();
        let min_order = t.orders.iter().copied().fold(f64::INFINITY, f64::min);
        o.check(min_order >= 1.8, format!("eps = 0, k = {k:.4}: observed order >= {min_order:.2} over 3 levels (>= 1.8)"));
        let elapsed = started.elapsed();
        o.check(elapsed <= Duration::from_secs(60), format!("k = {k:.4}: runtime {elapsed:.1?} (<= 1 min)"));
    }
    let started = Instant::now();
    let full = WaveguideGeometry::new(2.0, 2.3, 0.0).unwrap();
    let mesh = CellMesh::build_layout(&full, &[], &base).unwrap().with_interface(InterfaceState::Open).unwrap();
    let mut worst: f64 = 0.0;
    for k in [0.0, 1.0, PI] {
        let r = solve_lowest(&assemble(&mesh, k), 6, &solver).unwrap();
        // Dirichlet strip of width d + π: (π/(d+π))² (p+1)² + ((k + 2πm)/(2h))².
        let mut oracle: Vec<f64> = Vec::new();
        for p in 0..8 {
            for m in -8i64..=8 {
                oracle.push((PI / (2.0 + PI) * (p + 1) as f64).powi(2) + ((k + 2.0 * PI * m as f64) / 4.6).powi(2));
            }
        }
        oracle.sort_by(f64::total_cmp);
        for (a, b) in r.eigenvalues.iter().zip(&oracle) {
            worst = worst.max((a - b).abs() / b);
        }
    }
    o.check(worst <= 1e-3, format!("eps = h (open interface): worst relative error {worst:.2e} vs full strip (tol 1e-3)"));
    o.check(started.elapsed() <= Duration::from_secs(60), format!("open interface runtime {:.1?}", started.elapsed()));
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let started = Instant::now();
    let g = WaveguideGeometry::new(2.0, 2.3, 0.0).unwrap();
    let mesh = MeshConfig { n1: 16, n2: 6, grading: 0.3, ..MeshConfig::default() };
    let r = verify_shift_bound(&g, &DEFAULT_EPSILONS, &linspace(0.0, PI, 33), 6, &mesh, &SolverConfig::default()).unwrap();
    let elapsed = started.elapsed();
    o.check(r.nonnegative, format!("min shift {:.3e} over {} samples (>= -1e-10), {} dofs", r.min_shift, r.samples.len(), r.dofs));
    let scaled: Vec<String> = r.max_scaled.iter().map(|(e, v)| format!("{e:e}: {v:.4}")).collect();
    o.check(r.bounded, format!("scaled shift bounded: {}", scaled.join(", ")));
    o.check(r.monotone, "shift nonincreasing as the window shrinks".into());
    o.check(elapsed <= Duration::from_secs(300), format!("runtime {elapsed:.1?} (<= 5 min)"));
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let started = Instant::now();
    let g = WaveguideGeometry::new(2.0, 2.3, 0.0).unwrap();
    o.check(g.satisfies_corollary(), "corollary geometry (d, h) = (2, 2.3)".into());
    let c = find_crossings(&g, DEFAULT_ENERGY_CAP).unwrap()[0];
    let study = epsilon_study(&g, &c, &StudyConfig::default()).unwrap();
    let f = &study.forecast;

    for r in &study.rows {
        let single = r.gap.is_some() && r.nearby == 1 && !r.ambiguous;
        let detail = match &r.gap {
            Some(gap) => format!(
                "eps {:e}: alpha_l {:.6} alpha_r {:.6} k_l {:.4} k_r {:.4}, {} gap(s) near E0",
                r.epsilon, gap.alpha_l, gap.alpha_r, gap.k_l, gap.k_r, r.nearby
            ),
            None => format!("eps {:e}: {:?}", r.epsilon, r.status),
        };
        o.check(single, format!("single gap near E0 at {detail}"));
    }
    let Some(fits) = &study.fits else {
        o.check(false, "fewer than three windows found the gap; no fits".into());
        return o;
    };
    for (name, fit) in [("alpha_l", &fits.alpha_l), ("alpha_r", &fits.alpha_r)] {
        let d = (fit.intercept - f.e0).abs();
        o.check(d <= 2e-2, format!("{name} intercept {:.5} vs E0 {:.5} (|diff| {d:.2e}, tol 2e-2)", fit.intercept, f.e0));
    }
    for (name, fit, target) in [
        ("alpha_l", &fits.alpha_l, f.edge_slope(GapEdge::Lower)),
        ("alpha_r", &fits.alpha_r, f.edge_slope(GapEdge::Upper)),
        ("k_l", &fits.k_l, f.location_slope(GapEdge::Lower)),
        ("k_r", &fits.k_r, f.location_slope(GapEdge::Upper)),
    ] {
        let e = (fit.slope - target).abs() / target.abs();
        o.check(e <= 0.25, format!("{name} slope {:.5} vs {:.5} (rel error {:.1}%, tol 25%)", fit.slope, target, 100.0 * e));
    }
    let mut far = f64::INFINITY;
    for (_, gap) in study.found() {
        for k in [gap.k_l, gap.k_r] {
            far = far.min(k.abs()).min((PI - k.abs()).abs());
        }
    }
    o.check(far > 0.1, format!("refined extrema at distance >= {far:.3} from 0 and pi (> 0.1)"));
    let target = f.width_slope();
    for (eps, w) in study.scaled_widths() {
        let e = (w - target).abs() / target;
        o.check(e <= 0.25, format!("eps {eps:e}: width |ln eps| = {w:.4} vs {target:.4} (rel error {:.1}%, tol 25%)", 100.0 * e));
    }
    if let Some(q) = &fits.corrected {
        o.lines.push(format!(
            "    [info] with a c2/ln^2 eps term: alpha_l {:.4}, alpha_r {:.4}, k_l {:.4}, k_r {:.4}, width {:.4}",
            q.alpha_l.slope, q.alpha_r.slope, q.k_l.slope, q.k_r.slope, q.width.slope
        ));
    }
    let elapsed = started.elapsed();
    o.check(elapsed <= Duration::from_secs(1800), format!("runtime {elapsed:.1?} (<= 30 min)"));
    o
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let root = tempfile::tempdir().unwrap();
    let doc = |dir: &Path| {
        format!(
            r#"{{"geometry":{{"d":2.0,"h":2.3}},"epsilons":[0.01,0.001],"k_grid":{{"count":17}},"bands":4,
               "mesh":{{"n1":8,"n2":4}},"energy_window":{{"lo":0.2,"hi":1.6}},
               "tasks":["analytic","sweep","gaps","study","report"],"output_dir":{}}}"#,
            serde_json::to_string(dir).unwrap()
        )
    };
    let (a, b) = (root.path().join("a"), root.path().join("b"));
    let cfg_a = parse_config(&doc(&a)).unwrap();
    let cfg_b = parse_config(&doc(&b)).unwrap();
    let opts = RunOptions::default();

    let t0 = Instant::now();
    let ma = run_pipeline(&cfg_a, &opts).unwrap();
    let cold = t0.elapsed();
    let mb = run_pipeline(&cfg_b, &opts).unwrap();
    o.check(ma.succeeded() && mb.succeeded(), "both cold runs succeeded".into());
    let (fa, fb) = (csv_files(&a), csv_files(&b));
    let same = fa == fb && !fa.is_empty();
    o.check(same, format!("{} CSV files byte-identical across independent runs", fa.len()));
    o.check(ma.config_hash == mb.config_hash, format!("config hash {}", &ma.config_hash[..16]));

    let t1 = Instant::now();
    let warm = run_pipeline(&cfg_a, &opts).unwrap();
    let hot = t1.elapsed();
    o.check(csv_files(&a) == fa, "cache-served rerun reproduces the CSVs".into());
    o.check(
        warm.cache.misses == 0 && warm.cache.hits > 0,
        format!("rerun cache: {} hits, {} misses", warm.cache.hits, warm.cache.misses),
    );
    let speedup = cold.as_secs_f64() / hot.as_secs_f64().max(1e-9);
    o.check(speedup >= 10.0, format!("cold {cold:.2?}, cached {hot:.2?}: {speedup:.0}x (>= 10x)"));
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("analytic identity suite", criterion_1),
        ("crossing reproduction", criterion_2),
        ("corollary region", criterion_3),
        ("FEM oracle equivalence", criterion_4),
        ("discrete shift bound", criterion_5),
        ("gap opening and split band edge", criterion_6),
        ("pipeline determinism", criterion_7),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let started = Instant::now();
        let out = run();
        println!(
            "criterion {id} ({name}): {} [{:.1?}]",
            if out.pass { "PASS" } else { "FAIL" },
            started.elapsed()
        );
        for l in &out.lines {
            println!("{l}");
        }
        if !out.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
