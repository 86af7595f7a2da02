//! Command-line front end. Every subcommand prints (or writes) one JSON
//! report with sorted keys and exits 0 iff all of its checks pass.

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyheat::ainfinity::{hpl_products, tree_form_residual};
use cyheat::battery::{random_tensor, random_trivialization, run_lemmas};
use cyheat::forms::{closedness_check, gluing_check, restriction_check, subsets, Check, FormContext, Integration, Tensor};
use cyheat::linalg::{basis_vector, C64};
use cyheat::partition::{feynman_sum, wick_oracle, Series, Slice, Truncation};
use cyheat::ribbon::{enumerate_trivalent, zoo, GraphFile};
use cyheat::{builtins, AlgebraFile, CyAlgebra, Length, RibbonGraph, Spectral};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "cyheat", version, about = "Heat-kernel forms on metrised ribbon graphs")]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of a dg Frobenius algebra.
    Validate(AlgebraArg),
    /// Spectrum, Hodge decomposition and heat-kernel identities.
    Spectral {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Times at which the heat-kernel identities are checked.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0])]
        times: Vec<f64>,
    },
    /// Ribbon graph enumeration and invariants.
    #[command(subcommand)]
    Graphs(GraphsCommand),
    /// Graph forms: evaluation, integration and identity checks.
    #[command(subcommand)]
    Form(FormCommand),
    /// Transferred cyclic A-infinity products on the harmonic subspace.
    Ainf {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        /// Also compare with the tree-form products up to this arity.
        #[arg(long, default_value_t = 0)]
        tree_forms: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Perturbative partition function of the matrix-amplified theory.
    Partition {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long = "N", default_value_t = 1)]
        size: usize,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        chi_min: i32,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Args)]
struct AlgebraArg {
    /// Algebra file, or `builtin:NAME`.
    #[arg(long)]
    algebra: String,
}

#[derive(Subcommand)]
enum GraphsCommand {
    /// Isomorphism classes of connected trivalent graphs.
    Enumerate {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        n: usize,
    },
    /// Genus, boundary cycles and Euler characteristic.
    Topology(GraphArg),
    /// Automorphisms fixing the external legs.
    Aut(GraphArg),
}

#[derive(Args)]
struct GraphArg {
    /// Graph file, or `builtin:NAME`.
    #[arg(long)]
    graph: String,
}

#[derive(Subcommand)]
enum FormCommand {
    /// One coefficient `c_S` at given lengths.
    Eval {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Edges carrying `dl`.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
        /// One length per edge; `inf` allowed. Defaults to the lengths in the graph file.
        #[arg(long, value_delimiter = ',')]
        lengths: Vec<String>,
        /// Basis index fed to each incoming leg.
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<usize>,
    },
    /// Integral of the top component over `[eps, ∞)` per internal edge.
    Integrate {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<usize>,
        #[arg(long, default_value_t = 1e-5)]
        rel_tol: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Restriction, gluing or closedness residuals.
    Check {
        #[arg(value_enum)]
        identity: Identity,
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Graph to check; the standard battery when omitted.
        #[arg(long)]
        graph: Option<String>,
        /// Second graph for gluing: outputs of `--graph` feed its inputs.
        #[arg(long)]
        right: Option<String>,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    Restriction,
    Gluing,
    Closed,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Method {
    Graphs,
    Wick,
    Both,
}

type CliResult<T> = Result<T, String>;

/// Parses JSON, reporting the byte offset of a syntax error.
fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        let offset: usize = text
            .split_inclusive('\n')
            .take(e.line().saturating_sub(1))
            .map(str::len)
            .sum::<usize>()
            + e.column().saturating_sub(1);
        format!("{origin}: parse error at byte {offset}: {e}")
    })
}

fn read(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}

fn load_algebra(arg: &str) -> CliResult<CyAlgebra> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return builtins::by_name(name).map_err(|e| e.to_string());
    }
    let file: AlgebraFile = parse_json(&read(arg)?, arg)?;
    CyAlgebra::from_file(&file).map_err(|e| format!("{arg}: {e}"))
}

fn builtin_graph(name: &str) -> Option<RibbonGraph> {
    Some(match name {
        "theta" | "theta-planar" => zoo::theta_planar(),
        "theta-genus-one" => zoo::theta_genus_one(),
        "dumbbell" => zoo::dumbbell(),
        "unit" => zoo::unit(),
        "corolla" => zoo::corolla(2),
        "theta-legs" => zoo::theta_with_legs(false),
        "theta-legs-planar" => zoo::theta_with_legs(true),
        "theta-one-leg" => zoo::theta_one_leg(),
        "tree3" => zoo::tree3(true),
        _ => return None,
    })
}

fn load_graph(arg: &str) -> CliResult<(RibbonGraph, Option<Vec<Length>>)> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return builtin_graph(name).map(|g| (g, None)).ok_or_else(|| format!("unknown builtin graph `{name}`"));
    }
    let file: GraphFile = parse_json(&read(arg)?, arg)?;
    RibbonGraph::from_file(&file).map_err(|e| format!("{arg}: {e}"))
}

fn spectral_of(alg: &CyAlgebra) -> CliResult<Spectral> {
    Spectral::new(alg).map_err(|e| e.to_string())
}

fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

/// Nonzero entries of a tensor as `[[indices], [re, im]]`.
fn tensor_entries(t: &Tensor) -> Value {
    let entries: Vec<Value> = t
        .data
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 0.0)
        .map(|(mut ix, &z)| {
            let mut idx = vec![0; t.rank];
            for slot in idx.iter_mut().rev() {
                *slot = ix % t.dim;
                ix /= t.dim;
            }
            json!([idx, complex(z)])
        })
        .collect();
    Value::Array(entries)
}

fn input_tensor(n: usize, rank: usize, inputs: &[usize]) -> CliResult<Tensor> {
    if inputs.len() != rank {
        return Err(format!("the graph has {rank} incoming legs but {} inputs were given", inputs.len()));
    }
    if let Some(&bad) = inputs.iter().find(|&&i| i >= n) {
        return Err(format!("input index {bad} out of range for dimension {n}"));
    }
    let vs: Vec<_> = inputs.iter().map(|&i| basis_vector(n, i)).collect();
    Ok(Tensor::from_vectors(n, &vs))
}

fn parse_lengths(raw: &[String]) -> CliResult<Vec<Length>> {
    raw.iter()
        .map(|s| match s.as_str() {
            "inf" => Ok(Length::Infinite),
            v => v.parse::<f64>().map(Length::Finite).map_err(|e| format!("length `{v}`: {e}")),
        })
        .collect()
}

fn check_value(c: Check, tol: f64) -> Value {
    let relative = c.residual / c.scale.max(1.0);
    json!({"residual": c.residual, "scale": c.scale, "relative": relative, "pass": relative <= tol})
}

fn series_value(s: &Series) -> Value {
    Value::Array(
        s.coefficients()
            .into_iter()
            .map(|(j, m, z)| json!({"lambdaPower": j, "monomial": m, "value": complex(z)}))
            .collect(),
    )
}

struct Report {
    results: Value,
    tolerances: Value,
    pass: bool,
}

fn validate(a: &AlgebraArg) -> CliResult<Report> {
    let alg = load_algebra(&a.algebra)?;
    let r = alg.validate();
    Ok(Report {
        pass: r.pass,
        tolerances: json!(r.residuals.iter().map(|x| (x.name.clone(), x.tolerance)).collect::<std::collections::BTreeMap<_, _>>()),
        results: serde_json::to_value(&r).map_err(|e| e.to_string())?,
    })
}

fn spectral(a: &AlgebraArg, times: &[f64]) -> CliResult<Report> {
    let sp = spectral_of(&load_algebra(&a.algebra)?)?;
    let r = sp.report(times);
    let pass = r.hodge_residuals.iter().all(|x| x.pass)
        && r.identity_residuals.iter().all(|(_, v)| !v.is_empty() && v.iter().all(|x| x.pass));
    Ok(Report {
        pass,
        tolerances: json!({"identities": cyheat::spectral::IDENTITY_TOL}),
        results: serde_json::to_value(&r).map_err(|e| e.to_string())?,
    })
}

fn graphs(cmd: &GraphsCommand) -> CliResult<Report> {
    let results = match cmd {
        GraphsCommand::Enumerate { g, h, n } => {
            let classes = enumerate_trivalent(*g, *h, *n).map_err(|e| e.to_string())?;
            json!({
                "count": classes.len(),
                "classes": classes.iter().map(|c| json!({
                    "automorphisms": c.automorphisms,
                    "graph": c.graph.to_file(None),
                })).collect::<Vec<_>>(),
            })
        }
        GraphsCommand::Topology(a) => {
            let (g, _) = load_graph(&a.graph)?;
            serde_json::to_value(g.topology()).map_err(|e| e.to_string())?
        }
        GraphsCommand::Aut(a) => {
            let (g, _) = load_graph(&a.graph)?;
            let mut out = json!({"order": g.automorphism_order()});
            if g.is_connected() {
                out["dartPermutations"] = json!(g.automorphisms_connected());
            }
            out
        }
    };
    Ok(Report {
        results,
        tolerances: json!({}),
        pass: true,
    })
}

fn form(cmd: &FormCommand) -> CliResult<Report> {
    match cmd {
        FormCommand::Eval {
            graph,
            algebra,
            subset,
            lengths,
            inputs,
        } => {
            let (g, file_lengths) = load_graph(&graph.graph)?;
            let alg = load_algebra(&algebra.algebra)?;
            let sp = spectral_of(&alg)?;
            let l = if lengths.is_empty() {
                file_lengths.ok_or("no --lengths given and the graph file has none")?
            } else {
                parse_lengths(lengths)?
            };
            g.check_metric(&l).map_err(|e| e.to_string())?;
            let f = input_tensor(alg.dim(), g.incoming().len(), inputs)?;
            let ctx = FormContext::with_default(&sp, g);
            let c = ctx.coefficient(&l, subset, &f).map_err(|e| e.to_string())?;
            Ok(Report {
                results: json!({"rank": c.rank, "entries": tensor_entries(&c)}),
                tolerances: json!({}),
                pass: true,
            })
        }
        FormCommand::Integrate {
            graph,
            algebra,
            eps,
            inputs,
            rel_tol,
            tol,
        } => {
            let (g, _) = load_graph(&graph.graph)?;
            let alg = load_algebra(&algebra.algebra)?;
            let sp = spectral_of(&alg)?;
            let f = input_tensor(alg.dim(), g.incoming().len(), inputs)?;
            let l = vec![Length::Finite(0.0); g.num_edges()];
            let ctx = FormContext::with_default(&sp, g);
            let closed = ctx.integrate_top(*eps, &l, &f, Integration::Closed).map_err(|e| e.to_string())?;
            let quad = ctx
                .integrate_top(*eps, &l, &f, Integration::Quadrature { rel_tol: *rel_tol })
                .map_err(|e| e.to_string())?;
            let gap = closed.max_abs_diff(&quad) / closed.max_abs().max(quad.max_abs()).max(f64::MIN_POSITIVE);
            Ok(Report {
                pass: gap <= *tol,
                results: json!({"closed": tensor_entries(&closed), "quadrature": tensor_entries(&quad), "relativeGap": gap}),
                tolerances: json!({"agreement": tol, "quadrature": rel_tol}),
            })
        }
        FormCommand::Check {
            identity,
            algebra,
            graph,
            right,
            points,
            seed,
            tol,
        } => form_check(*identity, &algebra.algebra, graph.as_deref(), right.as_deref(), *points, *seed, *tol),
    }
}

fn form_check(
    identity: Identity,
    algebra: &str,
    graph: Option<&str>,
    right: Option<&str>,
    points: usize,
    seed: u64,
    tol: f64,
) -> CliResult<Report> {
    let sp = spectral_of(&load_algebra(algebra)?)?;
    let tolerances = json!({"relative": tol});
    let Some(graph) = graph else {
        let r = run_lemmas(&sp, points, seed).map_err(|e| e.to_string())?;
        let lemma = match identity {
            Identity::Restriction => r.restriction,
            Identity::Gluing => r.gluing,
            Identity::Closed => r.closedness,
        };
        return Ok(Report {
            pass: lemma.relative <= tol,
            results: json!({"battery": r.graphs, "gluingPairs": r.gluing_pairs, "metricPoints": points, "residual": lemma}),
            tolerances,
        });
    };
    let (g, _) = load_graph(graph)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sp.dim();
    let lengths = |r: &mut ChaCha8Rng, g: &RibbonGraph| -> Vec<Length> {
        (0..g.num_edges()).map(|_| Length::Finite(r.gen_range(0.2..1.5))).collect()
    };
    let mut worst = Check::ZERO;
    let mut worst_rel: f64 = 0.0;
    let mut count = 0usize;
    let mut absorb = |c: Check| {
        worst = worst.merge(c);
        worst_rel = worst_rel.max(c.residual / c.scale.max(1.0));
        count += 1;
    };
    for _ in 0..points {
        let f = random_tensor(&mut rng, n, g.incoming().len());
        let t = random_trivialization(&mut rng, &g);
        let l = lengths(&mut rng, &g);
        match identity {
            Identity::Restriction => {
                for e in g.internal_edges().into_iter().filter(|&e| !g.is_loop(e)) {
                    let others: Vec<usize> = (0..g.num_edges()).filter(|&x| x != e).collect();
                    for s in subsets(&others) {
                        absorb(restriction_check(&sp, &g, &t, e, &l, &s, &f).map_err(|e| e.to_string())?);
                    }
                }
            }
            Identity::Closed => {
                let ctx = FormContext::new(&sp, g.clone(), t).map_err(|e| e.to_string())?;
                for s in subsets(&(0..g.num_edges()).collect::<Vec<_>>()) {
                    absorb(closedness_check(&ctx, &l, &s, &f).map_err(|e| e.to_string())?);
                }
            }
            Identity::Gluing => {
                let (r, _) = load_graph(right.ok_or("gluing needs --right")?)?;
                let t2 = random_trivialization(&mut rng, &r);
                let l2 = lengths(&mut rng, &r);
                absorb(gluing_check(&sp, &g, &t, &r, &t2, &l, &l2, &f).map_err(|e| e.to_string())?);
            }
        }
    }
    let mut results = check_value(worst, tol);
    results["relative"] = json!(worst_rel);
    results["pass"] = json!(worst_rel <= tol);
    results["checks"] = json!(count);
    Ok(Report {
        pass: worst_rel <= tol,
        results,
        tolerances,
    })
}

fn ainf(a: &AlgebraArg, nmax: usize, tree_forms: usize, tol: f64) -> CliResult<Report> {
    let sp = spectral_of(&load_algebra(&a.algebra)?)?;
    let prod = hpl_products(&sp, nmax).map_err(|e| e.to_string())?;
    let k = prod.rank();
    let mut products = serde_json::Map::new();
    let mut relations = serde_json::Map::new();
    let mut cyclicity = serde_json::Map::new();
    let mut trees = serde_json::Map::new();
    let mut pass = true;
    for n in 2..=nmax {
        let m = prod.m(n).map_err(|e| e.to_string())?;
        let t = Tensor {
            dim: k,
            rank: n + 1,
            data: m,
        };
        products.insert(n.to_string(), tensor_entries(&t));
        let c = prod.cyclicity_residual(n).map_err(|e| e.to_string())?;
        pass &= c <= tol;
        cyclicity.insert(n.to_string(), json!(c));
    }
    for n in 3..=nmax + 1 {
        let r = prod.relation_residual(n).map_err(|e| e.to_string())?;
        pass &= r <= tol;
        relations.insert(n.to_string(), json!(r));
    }
    for n in 2..=tree_forms.min(nmax) {
        let r = tree_form_residual(&sp, &prod, n).map_err(|e| e.to_string())?;
        pass &= r <= tol;
        trees.insert(n.to_string(), json!(r));
    }
    Ok(Report {
        pass,
        tolerances: json!({"residual": tol}),
        results: json!({
            "harmonicRank": k,
            "harmonicParity": prod.parity,
            "products": products,
            "relationResiduals": relations,
            "cyclicityResiduals": cyclicity,
            "treeFormResiduals": trees,
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn partition(a: &AlgebraArg, size: usize, eps: f64, chi_min: i32, n_max: usize, method: Method, tol: f64) -> CliResult<Report> {
    let alg = load_algebra(&a.algebra)?;
    let tr = Truncation { chi_min, n_max };
    let mut results = json!({});
    let graph_side = if method != Method::Wick {
        let (s, weights) = feynman_sum(&alg, None, size, eps, tr).map_err(|e| e.to_string())?;
        results["graphs"] = json!({
            "coefficients": series_value(&s),
            "weights": weights.iter().map(|w| {
                let mut v = serde_json::to_value(w).unwrap_or_default();
                v["weight"] = Value::Array(w.weight.terms.iter().map(|(m, &z)| json!([m, complex(z)])).collect());
                v
            }).collect::<Vec<_>>(),
        });
        Some(s)
    } else {
        None
    };
    let wick_side = if method != Method::Graphs {
        let slice = Slice::new(&alg, size, None).map_err(|e| e.to_string())?;
        let s = wick_oracle(&slice, eps, tr).map_err(|e| e.to_string())?;
        results["wick"] = json!({"coefficients": series_value(&s)});
        Some(s)
    } else {
        None
    };
    let mut pass = true;
    if let (Some(g), Some(w)) = (&graph_side, &wick_side) {
        let floor = (1e-6 * g.max_abs().max(w.max_abs())).max(f64::MIN_POSITIVE);
        let mut keys: Vec<(i32, Vec<u16>)> = g
            .coefficients()
            .into_iter()
            .chain(w.coefficients())
            .map(|(j, m, _)| (j, m))
            .collect();
        keys.sort();
        keys.dedup();
        let mut table = vec![];
        let mut worst: f64 = 0.0;
        for (j, m) in keys {
            let (x, y) = (g.coefficient(j, &m), w.coefficient(j, &m));
            let gap = (x - y).norm() / x.norm().max(y.norm()).max(floor);
            worst = worst.max(gap);
            table.push(json!({"lambdaPower": j, "monomial": m, "graphs": complex(x), "wick": complex(y), "relativeGap": gap}));
        }
        pass = worst <= tol;
        results["residuals"] = json!({"table": table, "max": worst, "floor": floor});
    }
    Ok(Report {
        pass,
        tolerances: json!({"relative": tol, "floorFactor": 1e-6}),
        results,
    })
}

fn dispatch(cli: &Cli) -> CliResult<(String, Report)> {
    Ok(match &cli.command {
        Command::Validate(a) => ("validate".into(), validate(a)?),
        Command::Spectral { algebra, times } => ("spectral".into(), spectral(algebra, times)?),
        Command::Graphs(c) => ("graphs".into(), graphs(c)?),
        Command::Form(c) => ("form".into(), form(c)?),
        Command::Ainf {
            algebra,
            nmax,
            tree_forms,
            tol,
        } => ("ainf".into(), ainf(algebra, *nmax, *tree_forms, *tol)?),
        Command::Partition {
            algebra,
            size,
            eps,
            chi_min,
            n_max,
            method,
            tol,
        } => ("partition".into(), partition(algebra, *size, *eps, *chi_min, *n_max, *method, *tol)?),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let (command, report) = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let doc = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": command,
        "arguments": argv,
        "tolerances": report.tolerances,
        "results": report.results,
        "pass": report.pass,
    });
    let text = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    match &cli.output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
