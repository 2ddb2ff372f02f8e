use clap::Args;
use num_complex::Complex64;
use serde_json::{json, Value};

use super::artifact::{Artifact, Cell, RunConfig, Table};
use super::inputs::{load_descriptor, load_json, parse_betas, parse_pattern};
use super::RunArgs;
use crate::blocks::{band_sweep, BandSweep};
use crate::classify::{
    class_report, incomparability_evidence, kalton_peck_detector, uniform_block_defect, ClassConfig, DetectorConfig,
    DetectorVerdict, IncomparabilityConfig,
};
use crate::cone::{
    beta_hat, cone_element, covering_radius, discrepancy_estimate, find_sign_pattern, independence_gram_rank,
    kronecker_orbit, make_sinlog, ConeSpec, ConeTerm, SignSearch, DEFAULT_ALPHA,
};
use crate::error::{Error, Result};
use crate::funcs::{
    equivalence_test, lipschitz_bounds, projective_equivalence_test, GrowthConfig, GrowthReport,
    LipschitzOptions, LogGrid, Verdict,
};
use crate::twist::{sampled_constants, RandomVecConfig};

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports are serializable")
}

fn config(command: &str, params: Value, grid: Option<&LogGrid>, run: &RunArgs) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        params,
        grid: grid.map_or(Value::Null, to_value),
        seed: run.seed,
        format: run.format,
    }
}

fn growth_table(report: &GrowthReport) -> Table {
    let mut table = Table::new(&["window", "lo", "max"]);
    for w in &report.window_maxima {
        table.push(vec![Cell::Int(w.index as i64), w.lo.into(), w.max.into()]);
    }
    table
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Descriptor JSON, inline or a file path.
    #[arg(long)]
    pub func: String,
    /// Comma-separated arguments; log-spaced grid points when omitted.
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<f64>,
    /// Number of log-spaced points between the grid ends.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    /// Also evaluate the first and second derivatives.
    #[arg(long)]
    pub derivatives: bool,
}

pub fn cmd_eval(args: &EvalArgs, run: &RunArgs) -> Result<Artifact> {
    let f = load_descriptor(&args.func)?;
    let grid = run.grid()?;
    let ts: Vec<f64> = if args.t.is_empty() {
        if args.points < 2 {
            return Err(Error::InvalidParameter("--points must be >= 2".into()));
        }
        let ratio = (grid.t_max / grid.t_min).ln();
        (0..args.points)
            .map(|i| grid.t_min * (ratio * i as f64 / (args.points - 1) as f64).exp())
            .collect()
    } else {
        args.t.clone()
    };
    let mut columns = vec!["t", "re", "im"];
    if args.derivatives {
        f.check_derivatives(2, "$")?;
        columns.extend(["d1_re", "d1_im", "d2_re", "d2_im"]);
    }
    let mut table = Table::new(&columns);
    let mut values = Vec::with_capacity(ts.len());
    for &t in &ts {
        let v = f.eval(t)?;
        let mut row: Vec<Cell> = vec![t.into(), v.re.into(), v.im.into()];
        let mut entry = json!({ "t": t, "value": [v.re, v.im] });
        if args.derivatives {
            let (d1, d2) = (f.eval_d1(t)?, f.eval_d2(t)?);
            row.extend([d1.re.into(), d1.im.into(), d2.re.into(), d2.im.into()]);
            entry["d1"] = json!([d1.re, d1.im]);
            entry["d2"] = json!([d2.re, d2.im]);
        }
        table.push(row);
        values.push(entry);
    }
    let params = json!({
        "func": f.to_json_value(),
        "t": args.t,
        "points": args.points,
        "derivatives": args.derivatives,
    });
    Ok(Artifact {
        experiment: "map-evaluation",
        config: config("eval", params, Some(&grid), run),
        result: json!({ "map": f.label(), "bounds": to_value(&f.bounds()), "values": values }),
        table,
        inconclusive: false,
    })
}

#[derive(Debug, Clone, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub func: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long = "max-dim", default_value_t = 64)]
    pub max_dim: usize,
    #[arg(long, default_value_t = 6.0)]
    pub spread: f64,
    /// Real random vectors instead of complex ones.
    #[arg(long)]
    pub real: bool,
}

pub fn cmd_constants(args: &ConstantsArgs, run: &RunArgs) -> Result<Artifact> {
    let f = load_descriptor(&args.func)?;
    let grid = run.grid()?;
    if args.max_dim == 0 || !(args.spread >= 0.0) {
        return Err(Error::InvalidParameter("--max-dim must be >= 1 and --spread >= 0".into()));
    }
    let vec_cfg = RandomVecConfig {
        max_dim: args.max_dim,
        spread: args.spread,
        complex: !args.real,
    };
    let analytic = f.bounds();
    let estimate = lipschitz_bounds(&f, &grid, LipschitzOptions {
        seed: run.seed,
        ..LipschitzOptions::default()
    });
    let sampled = sampled_constants(&f, &vec_cfg, args.samples, run.seed);
    let lip = analytic.upper.unwrap_or(estimate.upper);
    let coord_bound = lip / std::f64::consts::E;
    let coord_holds = sampled.coordinatewise <= coord_bound * (1.0 + 1e-12);

    let mut table = Table::new(&["quantity", "value"]);
    for (name, v) in [
        ("lipschitz_lower_analytic", analytic.lower),
        ("lipschitz_upper_analytic", analytic.upper),
        ("lipschitz_lower_estimate", Some(estimate.lower)),
        ("lipschitz_upper_estimate", Some(estimate.upper)),
        ("quasilinearity", Some(sampled.quasilinearity)),
        ("triangle", Some(sampled.triangle)),
        ("duality", Some(sampled.duality)),
        ("coordinatewise", Some(sampled.coordinatewise)),
        ("coordinatewise_bound", Some(coord_bound)),
    ] {
        let value = v.map_or(Cell::Text("none".into()), Cell::Num);
        table.push(vec![name.into(), value]);
    }
    let params = json!({
        "func": f.to_json_value(),
        "samples": args.samples,
        "vectors": to_value(&vec_cfg),
    });
    Ok(Artifact {
        experiment: "quasinorm-constants",
        config: config("constants", params, Some(&grid), run),
        result: json!({
            "map": f.label(),
            "analytic": to_value(&analytic),
            "estimate": to_value(&estimate),
            "sampled": to_value(&sampled),
            "coordinatewise_bound": coord_bound,
            "coordinatewise_holds": coord_holds,
        }),
        table,
        inconclusive: false,
    })
}

#[derive(Debug, Clone, Args)]
pub struct EquivArgs {
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub g: String,
    /// Fit `a` in `f ~ a g` before testing the difference.
    #[arg(long)]
    pub projective: bool,
}

pub fn cmd_equiv(args: &EquivArgs, run: &RunArgs) -> Result<Artifact> {
    let f = load_descriptor(&args.f)?;
    let g = load_descriptor(&args.g)?;
    let grid = run.grid()?;
    let growth = GrowthConfig::default();
    let (result, report) = if args.projective {
        let fit = projective_equivalence_test(&f, &g, &grid, None, growth)?;
        (to_value(&fit), fit.report)
    } else {
        let report = equivalence_test(&f, &g, &grid, growth);
        (to_value(&report), report)
    };
    let params = json!({
        "f": f.to_json_value(),
        "g": g.to_json_value(),
        "projective": args.projective,
    });
    Ok(Artifact {
        experiment: if args.projective { "projective-equivalence" } else { "equivalence" },
        config: config("equiv", params, Some(&grid), run),
        result: json!({ "f": f.label(), "g": g.label(), "verdict": to_value(&report.verdict), "report": result }),
        table: growth_table(&report),
        inconclusive: report.verdict == Verdict::Inconclusive,
    })
}

#[derive(Debug, Clone, Args)]
pub struct ConeArgs {
    /// Generator frequencies; `sqrtP` stands for the fractional part of √P.
    #[arg(long, default_value = "sqrt2,sqrt3,sqrt5,sqrt7,sqrt11")]
    pub betas: String,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Full spec `{"terms": [{"lambda", "alpha", "beta"}, ...]}`, inline or a
    /// file path; overrides the three flags above.
    #[arg(long)]
    pub spec: Option<String>,
}

pub fn cmd_cone(args: &ConeArgs, run: &RunArgs) -> Result<Artifact> {
    let spec = match &args.spec {
        Some(s) => {
            let v = load_json(s, "cone spec")?;
            serde_json::from_value::<ConeSpec>(v).map_err(|e| Error::schema("$", e.to_string()))?
        }
        None => ConeSpec::new(
            parse_betas(&args.betas)?
                .into_iter()
                .map(|beta| ConeTerm {
                    lambda: args.lambda,
                    alpha: args.alpha,
                    beta,
                })
                .collect(),
        )?,
    };
    let grid = run.grid()?;
    let element = cone_element(&spec)?;
    let class_cfg = ClassConfig {
        grid: grid.clone(),
        lipschitz: LipschitzOptions {
            seed: run.seed,
            ..LipschitzOptions::default()
        },
        ..ClassConfig::default()
    };
    let class = class_report(&element, &class_cfg)?;
    let lower_ok = class.in_l_bi.lower_est >= spec.lower_bound() - 1e-6;
    let generators = spec
        .terms()
        .iter()
        .map(|t| make_sinlog(t.alpha, beta_hat(t.beta)))
        .collect::<Result<Vec<_>>>()?;
    let gram = if generators.len() >= 2 {
        Some(independence_gram_rank(&generators, &grid)?)
    } else {
        None
    };
    let mut table = Table::new(&["index", "singular_value"]);
    if let Some(g) = &gram {
        for (i, s) in g.singular_values.iter().enumerate() {
            table.push(vec![Cell::Int(i as i64 + 1), (*s).into()]);
        }
    }
    Ok(Artifact {
        experiment: "coneability",
        config: config("cone", json!({ "spec": to_value(&spec) }), Some(&grid), run),
        result: json!({
            "element": element.to_json_value(),
            "lower_bound": spec.lower_bound(),
            "upper_bound": spec.upper_bound(),
            "lower_bound_holds": lower_ok,
            "in_l_bids": class.in_l_bids(),
            "class": to_value(&class),
            "gram": gram.as_ref().map(to_value),
        }),
        table,
        inconclusive: false,
    })
}

#[derive(Debug, Clone, Args)]
pub struct KroneckerArgs {
    #[arg(long)]
    pub betas: String,
    /// Orbit length for the density diagnostics.
    #[arg(long = "K", default_value_t = 100_000)]
    pub k: usize,
    /// Sign pattern such as `+,-`, one sign per beta.
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long = "k-max", default_value_t = 1_000_000)]
    pub k_max: u64,
}

pub fn cmd_kronecker(args: &KroneckerArgs, run: &RunArgs) -> Result<Artifact> {
    let betas = parse_betas(&args.betas)?;
    let orbit = kronecker_orbit(&betas, args.k)?;
    let (radius, discrepancy) = if orbit.dim() <= 3 {
        (Some(covering_radius(&orbit)?), Some(discrepancy_estimate(&orbit)?))
    } else {
        (None, None)
    };
    let search = match &args.pattern {
        Some(p) => Some(find_sign_pattern(&betas, &parse_pattern(p)?, args.threshold, args.k_max)?),
        None => None,
    };
    let coords: Vec<String> = (1..=betas.len()).map(|i| format!("x{i}")).collect();
    let mut columns = vec!["k"];
    let table = match &search {
        Some(s) => {
            let names: Vec<String> = (1..=betas.len()).map(|i| format!("sin{i}")).collect();
            columns.extend(names.iter().map(String::as_str));
            let mut t = Table::new(&columns);
            if let SignSearch::Found { k, values } = s {
                let mut row = vec![Cell::Int(*k as i64)];
                row.extend(values.iter().map(|&v| Cell::Num(v)));
                t.push(row);
            }
            t
        }
        None => {
            columns.extend(coords.iter().map(String::as_str));
            let mut t = Table::new(&columns);
            for (i, p) in orbit.points().enumerate() {
                let mut row = vec![Cell::Int(i as i64 + 1)];
                row.extend(p.iter().map(|&v| Cell::Num(v)));
                t.push(row);
            }
            t
        }
    };
    let params = json!({
        "betas": betas,
        "K": args.k,
        "pattern": args.pattern.as_ref().map(|p| parse_pattern(p).unwrap_or_default()),
        "threshold": args.threshold,
        "k_max": args.k_max,
    });
    Ok(Artifact {
        experiment: "kronecker-density",
        config: config("kronecker", params, None, run),
        result: json!({
            "covering_radius": radius,
            "discrepancy": discrepancy,
            "sign_search": search.as_ref().map(to_value),
        }),
        table,
        inconclusive: matches!(search, Some(SignSearch::NotFound { .. })),
    })
}

#[derive(Debug, Clone, Args)]
pub struct BlocksArgs {
    #[arg(long)]
    pub func: String,
    #[arg(long, default_value_t = 1000)]
    pub instances: usize,
    #[arg(long = "max-blocks", default_value_t = 16)]
    pub max_blocks: usize,
    #[arg(long = "max-width", default_value_t = 8)]
    pub max_width: usize,
    #[arg(long, default_value_t = 4.0)]
    pub spread: f64,
}

pub fn cmd_blocks(args: &BlocksArgs, run: &RunArgs) -> Result<Artifact> {
    let f = load_descriptor(&args.func)?;
    let sweep = BandSweep {
        instances: args.instances,
        max_blocks: args.max_blocks,
        max_width: args.max_width,
        spread: args.spread,
        seed: run.seed,
    };
    let report = band_sweep(&f, sweep)?;
    let mut table = Table::new(&["ratio", "lo", "hi"]);
    table.push(vec!["block_over_kp".into(), report.block.lo.into(), report.block.hi.into()]);
    table.push(vec![
        "luxemburg_over_kp".into(),
        report.luxemburg.lo.into(),
        report.luxemburg.hi.into(),
    ]);
    Ok(Artifact {
        experiment: "block-orlicz",
        config: config("blocks", json!({ "func": f.to_json_value(), "sweep": to_value(&sweep) }), None, run),
        result: json!({ "map": f.label(), "report": to_value(&report) }),
        table,
        inconclusive: false,
    })
}

#[derive(Debug, Clone, Args)]
pub struct DistinguishArgs {
    /// The map expected in the difference-quotient class.
    #[arg(long)]
    pub f: String,
    /// The map expected to have vanishing second derivative at infinity.
    #[arg(long)]
    pub g: String,
    /// Largest `k` in the dyadic sweep `n = 2^k`.
    #[arg(long = "k-max", default_value_t = 30)]
    pub k_max: u32,
}

pub fn cmd_distinguish(args: &DistinguishArgs, run: &RunArgs) -> Result<Artifact> {
    let f = load_descriptor(&args.f)?;
    let g = load_descriptor(&args.g)?;
    let grid = run.grid()?;
    let cfg = IncomparabilityConfig {
        class: ClassConfig {
            grid: grid.clone(),
            lipschitz: LipschitzOptions {
                seed: run.seed,
                ..LipschitzOptions::default()
            },
            ..ClassConfig::default()
        },
        sweep_exponents: (1, args.k_max),
        ..IncomparabilityConfig::default()
    };
    let report = incomparability_evidence(&f, &g, &cfg)?;
    let mut table = Table::new(&["k", "n", "defect"]);
    for w in &report.lambda_sigma.window_maxima {
        table.push(vec![Cell::Int(w.index as i64), w.lo.into(), w.max.into()]);
    }
    let inconclusive = report.projective.report.verdict == Verdict::Inconclusive
        || report.lambda_sigma.verdict == Verdict::Inconclusive;
    let params = json!({ "f": f.to_json_value(), "g": g.to_json_value(), "k_max": args.k_max });
    Ok(Artifact {
        experiment: "incomparability",
        config: config("distinguish", params, Some(&grid), run),
        result: json!({ "supported": report.supported, "report": to_value(&report) }),
        table,
        inconclusive,
    })
}

#[derive(Debug, Clone, Args)]
pub struct SelfsimArgs {
    #[arg(long)]
    pub func: String,
    /// Block widths `N = 2^i ≤ Nmax`.
    #[arg(long = "Nmax", default_value_t = 64)]
    pub n_max: u64,
    /// Vector lengths `M = 2^j ≤ Mmax`.
    #[arg(long = "Mmax", default_value_t = 64)]
    pub m_max: u64,
}

fn dyadic_up_to(max: u64) -> Vec<u64> {
    (0..63).map(|i| 1u64 << i).take_while(|&n| n <= max).collect()
}

pub fn cmd_selfsim(args: &SelfsimArgs, run: &RunArgs) -> Result<Artifact> {
    let f = load_descriptor(&args.func)?;
    if args.n_max == 0 || args.m_max == 0 || args.n_max.max(args.m_max) > 1 << 31 {
        return Err(Error::InvalidParameter("--Nmax and --Mmax must lie in [1, 2^31]".into()));
    }
    let grid = run.grid()?;
    let (ns, ms) = (dyadic_up_to(args.n_max), dyadic_up_to(args.m_max));
    let mut table = Table::new(&["N", "M", "defect"]);
    let mut matrix = Vec::with_capacity(ns.len());
    for &n in &ns {
        let mut row = Vec::with_capacity(ms.len());
        for &m in &ms {
            let d = uniform_block_defect(&f, n, m)?;
            table.push(vec![Cell::Int(n as i64), Cell::Int(m as i64), d.into()]);
            row.push(d);
        }
        matrix.push(row);
    }
    let det_cfg = DetectorConfig {
        grid: grid.clone(),
        lipschitz: LipschitzOptions {
            seed: run.seed,
            ..LipschitzOptions::default()
        },
        defect_k_max: args.n_max.max(args.m_max).ilog2(),
        ..DetectorConfig::default()
    };
    let report = kalton_peck_detector(&f, &det_cfg)?;
    let c: Complex64 = report.hyers.c;
    let params = json!({ "func": f.to_json_value(), "Nmax": args.n_max, "Mmax": args.m_max });
    Ok(Artifact {
        experiment: "self-similarity",
        config: config("selfsim", params, Some(&grid), run),
        result: json!({
            "map": f.label(),
            "N": ns,
            "M": ms,
            "defect_matrix": matrix,
            "verdict": to_value(&report.verdict),
            "c": [c.re, c.im],
            "detector": to_value(&report),
        }),
        table,
        inconclusive: report.verdict == DetectorVerdict::Inconclusive,
    })
}

