//! Acceptance criteria 1–9. Each test prints one `PASS`/`FAIL` line and then
//! asserts it.

mod common;

use std::f64::consts::{E, LN_2, TAU};
use std::io::Write;
use std::process::Command;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistlab::blocks::{band_sweep, block_combination_norm, random_coefficients, BandSweep, BlockBasis};
use twistlab::classify::{
    class_report, kalton_peck_detector, uniform_defect_routes, ClassConfig, DetectorConfig, DetectorVerdict,
};
use twistlab::cone::{
    beta_hat, cone_element, covering_radius, find_sign_pattern, independence_gram_rank, kronecker_orbit, make_sinlog,
    prime_root_betas, trig_identity_check, ConeSpec, ConeTerm, SignSearch,
};
use twistlab::funcs::{
    lipschitz_bounds, projective_equivalence_test, FuncDescriptor, GrowthConfig, LipschitzOptions, LogGrid, Verdict,
};
use twistlab::twist::sample::{random_entries, random_vec};
use twistlab::twist::{
    dyadic_sweep, growth_eta, growth_lambda_sigma, growth_lambda_sigma_routes, omega, Matrix2, RandomVecConfig,
    SparseVec,
};

use common::{fixture, frac_sqrt};

static SERIAL: Mutex<()> = Mutex::new(());

struct Outcome {
    failures: Vec<String>,
    start: Instant,
    _serial: MutexGuard<'static, ()>,
}

impl Outcome {
    fn new() -> Self {
        let serial = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
        Outcome {
            failures: Vec::new(),
            start: Instant::now(),
            _serial: serial,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self, number: u32, title: &str, budget: Duration) {
        let elapsed = self.start.elapsed();
        let mut failures = self.failures;
        if elapsed > budget {
            failures.push(format!("runtime {elapsed:.2?} over budget {budget:?}"));
        }
        let status = if failures.is_empty() { "PASS" } else { "FAIL" };
        // Written to the handle directly so the line survives output capture.
        let mut line = format!("{status} criterion {number}: {title} ({elapsed:.2?})\n");
        for f in &failures {
            line.push_str(&format!("    {f}\n"));
        }
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(line.as_bytes()).unwrap();
        stdout.flush().unwrap();
        assert!(failures.is_empty(), "criterion {number} failed: {failures:#?}");
    }
}

fn identity_maps() -> Vec<FuncDescriptor> {
    vec![
        FuncDescriptor::linear(1.0),
        FuncDescriptor::sin_log(0.1, 1.0).unwrap(),
        FuncDescriptor::power_phase(1.0).unwrap(),
        common::example_sinlog(),
        FuncDescriptor::sum(vec![FuncDescriptor::linear(1.0), FuncDescriptor::sin_plain()]).unwrap(),
    ]
}

const CASES: usize = 1000;

#[test]
fn criterion_1_exact_identities() {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let maps = identity_maps();
    let cfg = RandomVecConfig::default();

    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let phi = &maps[rng.gen_range(0..maps.len())];
        let x = random_vec(&mut rng, &cfg);
        let c = Complex64::from_polar((rng.gen::<f64>() * 20.0 - 10.0).exp(), TAU * rng.gen::<f64>());
        let d = omega(phi, &x.scale(c)).sub(&omega(phi, &x).scale(c)).norm();
        worst = worst.max(d / (c.norm() * omega(phi, &x).norm().max(x.norm())));
    }
    out.check(worst <= 1e-10, || format!("homogeneity relative error {worst:e}"));

    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let phi = &maps[rng.gen_range(0..maps.len())];
        let n = (rng.gen::<f64>() * 20.0 * LN_2).exp().round() as usize;
        let n = n.clamp(1, 1 << 20);
        let expect = phi.eval(0.5 * (n as f64).ln()).unwrap();
        let o = omega(phi, &SparseVec::f_vector(n).unwrap());
        let err = o.iter().map(|(_, v)| (v - expect).norm()).fold(0.0, f64::max);
        worst = worst.max(err / expect.norm().max(f64::MIN_POSITIVE));
        if expect.norm() == 0.0 {
            worst = worst.max(err);
        }
    }
    out.check(worst <= 1e-10, || format!("Ω(f_N) relative error {worst:e}"));

    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let phi = &maps[rng.gen_range(0..maps.len())];
        let psi = &maps[rng.gen_range(0..maps.len())];
        let l = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let s = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let n = 1u64 << rng.gen_range(1..=30);
        let r = growth_lambda_sigma_routes(phi, psi, l, s, n).unwrap();
        let h = 0.5 * (n as f64).ln();
        let scale = (l * phi.eval(h).unwrap()).norm() + (s * psi.eval(h).unwrap()).norm();
        worst = worst.max((r.vector - r.scalar).abs() / scale.max(f64::MIN_POSITIVE));
    }
    out.check(worst <= 1e-10, || format!("λσ vector/scalar relative gap {worst:e}"));

    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let phi = &maps[rng.gen_range(0..4)];
        let count = rng.gen_range(1..=8);
        let basis = BlockBasis::random(&mut rng, count, 8, 4.0, true).unwrap();
        let t = random_coefficients(&mut rng, count, 4.0, true);
        let b = block_combination_norm(phi, &basis, &t).unwrap();
        worst = worst.max((b.direct - b.formula).abs() / b.direct.max(b.formula));
    }
    out.check(worst <= 1e-10, || format!("block norm direct/formula relative gap {worst:e}"));

    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let phi = &maps[rng.gen_range(0..maps.len())];
        let n = 1usize << rng.gen_range(0..=8);
        let m = rng.gen_range(1..=128usize);
        let r = uniform_defect_routes(phi, n, m).unwrap();
        worst = worst.max((r.vector - r.closed).abs() / r.scale.max(f64::MIN_POSITIVE));
    }
    out.check(worst <= 1e-10, || format!("self-similarity vector/closed gap {worst:e}"));

    let mut worst = 0.0f64;
    for _ in 0..CASES {
        let bp = rng.gen::<f64>();
        let n = rng.gen_range(0..10_000u64);
        let c = trig_identity_check(bp, n);
        worst = worst.max(c.residual / (c.a.abs() + c.b.abs()));
    }
    out.check(worst <= 1e-10, || format!("trig identity relative residual {worst:e}"));

    out.finish(1, "exact-identity suite", Duration::from_secs(5));
}

#[test]
fn criterion_2_coordinatewise_bound() {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let maps = [
        FuncDescriptor::linear(1.0),
        FuncDescriptor::sin_log(0.1, 1.0).unwrap(),
        FuncDescriptor::power_phase(1.0).unwrap(),
    ];
    for phi in &maps {
        let l = phi.bounds().upper.unwrap();
        let mut violations = 0;
        for _ in 0..10_000 {
            let d = rng.gen_range(1..=256);
            let x = random_entries(&mut rng, d, 8.0, true);
            if omega(phi, &x).norm_inf() > (l / E) * x.norm() {
                violations += 1;
            }
        }
        out.check(violations == 0, || format!("{}: {violations} violations", phi.label()));
    }
    out.finish(2, "coordinatewise bound ‖Ω(x)‖∞ ≤ (L/e)‖x‖₂", Duration::from_secs(60));
}

#[test]
fn criterion_3_analytic_vs_empirical_constants() {
    let mut out = Outcome::new();
    let grid = LogGrid::default();
    let opts = LipschitzOptions::default();
    let est = lipschitz_bounds(&FuncDescriptor::sin_log(0.1, 1.0).unwrap(), &grid, opts);
    out.check(est.lower >= 0.8 - 1e-6 && est.upper <= 1.2 + 1e-6, || format!("SinLog(0.1, 1): {est:?}"));

    let mut specs: Vec<ConeSpec> = (1..=5).map(|n| ConeSpec::uniform(&prime_root_betas(n)).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    while specs.len() < 25 {
        let terms = (0..rng.gen_range(1..=4))
            .map(|_| ConeTerm {
                lambda: rng.gen_range(0.1..3.0),
                alpha: rng.gen_range(0.01..0.2),
                beta: rng.gen_range(0.01..0.99),
            })
            .collect();
        if let Ok(s) = ConeSpec::new(terms) {
            specs.push(s);
        }
    }
    for spec in &specs {
        let h = cone_element(spec).unwrap();
        let est = lipschitz_bounds(&h, &grid, opts);
        out.check(est.lower >= spec.lower_bound() - 1e-6, || {
            format!("{spec:?}: lower {} < {}", est.lower, spec.lower_bound())
        });
    }
    out.finish(3, "analytic vs empirical Lipschitz constants", Duration::from_secs(10));
}

#[test]
fn criterion_4_canonical_quartet() {
    let mut out = Outcome::new();
    let class_cfg = ClassConfig::default();
    let det_cfg = DetectorConfig::default();
    let grid = LogGrid::default();
    let growth = GrowthConfig::default();

    let lin = FuncDescriptor::linear(1.0);
    let r = class_report(&lin, &class_cfg).unwrap();
    out.check(r.in_l_bi.verdict && r.in_l_bis.verdict && !r.in_l_bid.verdict, || {
        format!("Linear classes {:?}", (r.in_l_bi.verdict, r.in_l_bis.verdict, r.in_l_bid.verdict))
    });
    let v = kalton_peck_detector(&lin, &det_cfg).unwrap().verdict;
    out.check(v == DetectorVerdict::KaltonPeckLike, || format!("Linear detector {v:?}"));

    let bumped = FuncDescriptor::sum(vec![lin.clone(), FuncDescriptor::sin_plain()]).unwrap();
    let v = kalton_peck_detector(&bumped, &det_cfg).unwrap().verdict;
    out.check(v == DetectorVerdict::KaltonPeckLike, || format!("Linear+SinPlain detector {v:?}"));

    let ex = common::example_sinlog();
    let r = class_report(&ex, &class_cfg).unwrap();
    let floor = fixture("bid.floor");
    out.check(r.in_l_bi.verdict && r.in_l_bis.verdict && r.in_l_bid.verdict, || {
        format!("SinLog classes {:?}", (r.in_l_bi.verdict, r.in_l_bis.verdict, r.in_l_bid.verdict))
    });
    out.check(r.in_l_bid.sweep.max > floor, || format!("max Δ {} ≤ floor {floor}", r.in_l_bid.sweep.max));
    let v = kalton_peck_detector(&ex, &det_cfg).unwrap().verdict;
    out.check(v == DetectorVerdict::NotKaltonPeck, || format!("SinLog detector {v:?}"));

    let fit = projective_equivalence_test(&FuncDescriptor::linear(2.0), &lin, &grid, None, growth).unwrap();
    out.check(fit.report.verdict == Verdict::Bounded && (fit.a_best - 2.0).norm() <= 1e-4, || {
        format!("(Linear(2), Linear(1)): {:?} at a = {}", fit.report.verdict, fit.a_best)
    });

    let fit = projective_equivalence_test(&lin, &FuncDescriptor::linear(2.0), &grid, None, growth).unwrap();
    out.check(fit.report.verdict == Verdict::Bounded && (fit.a_best.inv() - 2.0).norm() <= 1e-4, || {
        format!("(Linear(1), Linear(2)): {:?} at 1/a = {}", fit.report.verdict, fit.a_best.inv())
    });

    let betas: Vec<f64> = prime_root_betas(4).into_iter().map(beta_hat).collect();
    for i in 0..betas.len() {
        for j in 0..betas.len() {
            if i == j {
                continue;
            }
            let f = FuncDescriptor::sin_log(0.1, betas[i]).unwrap();
            let g = FuncDescriptor::sin_log(0.1, betas[j]).unwrap();
            let fit = projective_equivalence_test(&f, &g, &grid, None, growth).unwrap();
            out.check(fit.report.verdict == Verdict::Growing, || {
                format!("SinLog pair ({i}, {j}): {:?}", fit.report.verdict)
            });
        }
    }
    out.finish(4, "classification of the canonical quartet", Duration::from_secs(60));
}

#[test]
fn criterion_5_kronecker_suite() {
    let mut out = Outcome::new();
    let pair = [frac_sqrt(2), frac_sqrt(3)];
    let eps2 = fixture("kronecker.eps2");
    let r1 = covering_radius(&kronecker_orbit(&pair, 100_000).unwrap()).unwrap();
    let r2 = covering_radius(&kronecker_orbit(&pair, 200_000).unwrap()).unwrap();
    out.check(r1 < eps2, || format!("radius {r1} ≥ ε₂ {eps2}"));
    out.check(r2 <= r1, || format!("radius grew on doubling: {r1} → {r2}"));

    let betas = prime_root_betas(3);
    for bits in 0..8u8 {
        let signs: Vec<i8> = (0..3).map(|i| if bits >> i & 1 == 0 { 1 } else { -1 }).collect();
        match find_sign_pattern(&betas, &signs, 0.5, 1_000_000).unwrap() {
            SignSearch::Found { k, .. } => {
                let direct: Vec<f64> = betas
                    .iter()
                    .map(|b| (TAU * (k as f64 * b * LN_2).rem_euclid(1.0)).sin())
                    .collect();
                let ok = direct.iter().zip(&signs).all(|(v, &s)| s as f64 * v > 0.5);
                out.check(ok, || format!("{signs:?}: k = {k} fails direct evaluation {direct:?}"));
            }
            SignSearch::NotFound { k_max } => out.failures.push(format!("{signs:?}: not found up to {k_max}")),
        }
    }
    out.finish(5, "Kronecker density and sign patterns", Duration::from_secs(30));
}

#[test]
fn criterion_6_coneability() {
    let mut out = Outcome::new();
    let grid = LogGrid::default();
    let gens: Vec<_> = prime_root_betas(5)
        .into_iter()
        .map(|b| make_sinlog(0.1, beta_hat(b)).unwrap())
        .collect();
    let g = independence_gram_rank(&gens, &grid).unwrap();
    let floor = fixture("gram.min_sv_floor");
    out.check(g.rank == 5, || format!("Gram rank {}", g.rank));
    out.check(g.min_singular_value > floor, || format!("min σ {} ≤ {floor}", g.min_singular_value));

    let b = prime_root_betas(5);
    let a = ConeSpec::uniform(&b[..3]).unwrap();
    let c = ConeSpec::new(vec![
        ConeTerm { lambda: 2.5, alpha: 0.1, beta: b[2] },
        ConeTerm { lambda: 0.5, alpha: 0.1, beta: b[3] },
        ConeTerm { lambda: 1.0, alpha: 0.1, beta: b[4] },
    ])
    .unwrap();
    match a.merge(&c) {
        Ok(sum) => {
            let h = cone_element(&sum).unwrap();
            let r = class_report(&h, &ClassConfig::default()).unwrap();
            out.check(r.in_l_bis.verdict, || "sum fails the second-derivative test".into());
            out.check(r.in_l_bi.lower_est >= sum.lower_bound() - 1e-6, || {
                format!("sum lower {} < {}", r.in_l_bi.lower_est, sum.lower_bound())
            });
        }
        Err(e) => out.failures.push(format!("sum of valid specs rejected: {e}")),
    }
    out.finish(6, "coneability evidence", Duration::from_secs(30));
}

#[test]
fn criterion_7_growth_evidence() {
    let mut out = Outcome::new();
    let cfg = GrowthConfig::for_log_sweep();
    let psis = [
        FuncDescriptor::linear(1.0),
        FuncDescriptor::sin_log(0.1, 1.0).unwrap(),
        common::example_sinlog(),
    ];
    for psi in &psis {
        for m in [Matrix2::real(1.0, 0.0, 1.0, 1.0), Matrix2::real(0.0, 1.0, 0.25, 0.0)] {
            let r = dyadic_sweep(1, 30, cfg, |n| growth_eta(psi, &m, n)).unwrap();
            out.check(r.verdict == Verdict::Growing && r.slope > cfg.tau_grow, || {
                format!("η sweep for {}: {:?} slope {}", psi.label(), r.verdict, r.slope)
            });
        }
    }

    let one = Complex64::new(1.0, 0.0);
    let betas: Vec<f64> = prime_root_betas(3).into_iter().map(beta_hat).collect();
    let mut pairs = vec![(FuncDescriptor::linear(1.0), common::example_sinlog())];
    for i in 0..3 {
        for j in (i + 1)..3 {
            pairs.push((
                FuncDescriptor::sin_log(0.1, betas[i]).unwrap(),
                FuncDescriptor::sin_log(0.1, betas[j]).unwrap(),
            ));
        }
    }
    let grid = LogGrid::default();
    for (phi, psi) in &pairs {
        let a = projective_equivalence_test(phi, psi, &grid, None, GrowthConfig::default())
            .unwrap()
            .a_best;
        let r = dyadic_sweep(1, 30, cfg, |n| growth_lambda_sigma(phi, psi, one, a, n)).unwrap();
        out.check(r.verdict == Verdict::Growing && r.slope > cfg.tau_grow, || {
            format!("λσ for ({}, {}): {:?} slope {}", phi.label(), psi.label(), r.verdict, r.slope)
        });
    }

    let equivalent = [
        (FuncDescriptor::scale(2.0, common::example_sinlog()), common::example_sinlog(), 2.0),
        (
            FuncDescriptor::linear(1.0),
            FuncDescriptor::sum(vec![FuncDescriptor::linear(1.0), FuncDescriptor::sin_plain()]).unwrap(),
            1.0,
        ),
    ];
    for (phi, psi, s) in &equivalent {
        let r = dyadic_sweep(1, 30, cfg, |n| growth_lambda_sigma(phi, psi, one, one * *s, n)).unwrap();
        out.check(r.verdict == Verdict::Bounded, || {
            format!("λσ for ({}, {}): {:?}", phi.label(), psi.label(), r.verdict)
        });
    }
    out.finish(7, "growth evidence for singularity and incomparability", Duration::from_secs(30));
}

#[test]
fn criterion_8_block_orlicz_bands() {
    let mut out = Outcome::new();
    let phi = common::example_sinlog();
    let sweep = |max_width, seed| BandSweep {
        instances: 1000,
        max_blocks: 16,
        max_width,
        spread: 4.0,
        seed,
    };
    let narrow = band_sweep(&phi, sweep(8, 81)).unwrap();
    let wide = band_sweep(&phi, sweep(64, 82)).unwrap();
    let (lo8, hi8) = common::band("blocks.block_w8");
    let (lo64, hi64) = common::band("blocks.block_w64");
    let (llo, lhi) = common::band("blocks.luxemburg");
    out.check(narrow.block.within(lo8, hi8), || format!("width ≤ 8 band {:?} vs [{lo8}, {hi8}]", narrow.block));
    out.check(wide.block.within(lo64, hi64), || format!("width ≤ 64 band {:?} vs [{lo64}, {hi64}]", wide.block));
    out.check(narrow.block.overlaps(&wide.block), || "block bands do not overlap".into());
    for (name, b) in [("≤ 8", narrow.luxemburg), ("≤ 64", wide.luxemburg)] {
        out.check(b.within(llo, lhi), || format!("luxemburg band {name} {b:?} vs [{llo}, {lhi}]"));
    }
    out.check(narrow.luxemburg.overlaps(&wide.luxemburg), || "luxemburg bands do not overlap".into());
    out.finish(8, "block and Orlicz equivalence bands", Duration::from_secs(60));
}

#[test]
fn criterion_9_cli_determinism() {
    let mut out = Outcome::new();
    let bin = env!("CARGO_BIN_EXE_twistlab");
    let sinlog = r#"{"type":"sinlog","alpha":0.1,"beta":1.8039713836775109}"#;
    let other = r#"{"type":"sinlog","alpha":0.1,"beta":3.1882073119150114}"#;
    let runs: Vec<Vec<&str>> = vec![
        vec!["eval", "--func", sinlog, "--derivatives"],
        vec!["constants", "--func", sinlog, "--samples", "1000"],
        vec!["equiv", "--f", sinlog, "--g", other, "--projective"],
        vec!["cone", "--betas", "sqrt2,sqrt3,sqrt5"],
        vec!["kronecker", "--betas", "sqrt2,sqrt3", "--K", "20000", "--format", "csv"],
        vec!["blocks", "--func", sinlog, "--instances", "300", "--format", "plotdata"],
        vec!["distinguish", "--f", sinlog, "--g", other],
        vec!["selfsim", "--func", sinlog, "--Nmax", "1024", "--Mmax", "64"],
    ];
    for args in &runs {
        let first = Command::new(bin).args(args).output().unwrap();
        let second = Command::new(bin).args(args).output().unwrap();
        out.check(first.status.success() && second.status.success(), || {
            format!("{}: {}", args[0], String::from_utf8_lossy(&first.stderr))
        });
        out.check(!first.stdout.is_empty() && first.stdout == second.stdout, || {
            format!("{}: artifacts differ", args[0])
        });
    }
    out.finish(9, "byte-identical CLI artifacts", Duration::from_secs(60));
}
