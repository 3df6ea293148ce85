//! `smc`: command-line front end. Results go to stdout, diagnostics and
//! statistics to stderr.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use smc_core::audit::AuditLog;
use smc_core::counts::CountVector;
use smc_core::domset::{count_ds_with, DsOptions, LabeledGraph};
use smc_core::generators::{self, Family};
use smc_core::max2csp::{self, CspInstance, CspSolution, Policy, SolveOptions, SolveStats};
use smc_core::measure::{check_csp, check_sc, exponent_csp, exponent_sc, to_f64, CspWeights, ScWeights};
use smc_core::separator::{bisect_heuristic, separate_balanced_by_measure, separate_cubic_seeded, verify_separation};
use smc_core::setcover::{ds_to_sc, sc_count_with, ScIncidence, ScOptions};
use smc_core::{Graph, Separation};
use smc_oracles as oracles;

#[derive(Parser)]
#[command(
    name = "smc",
    version,
    about = "Separator-driven exact solvers for Max 2-CSP, #Dominating Set and #Set Cover"
)]
struct Cli {
    /// Emit one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Print search statistics to stderr.
    #[arg(long, global = true)]
    stats: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    Separator,
    Local,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Separator => Policy::Separator,
            PolicyArg::Local => Policy::Local,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Input file; stdin when absent.
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PolicyArg::Separator)]
    policy: PolicyArg,
    /// Check the measure inequalities at every step.
    #[arg(long, alias = "audit-measure")]
    audit: bool,
    /// Weight file replacing the published table.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SepMethod {
    Cubic,
    Bisect,
    Measure,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    G3,
    G4,
    G5,
    Cubic,
    Csp,
    Graph,
    Subcubic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LbFamily {
    G3,
    G4,
    G5,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SystemArg {
    Csp,
    Sc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleKind {
    Csp,
    Ds,
    Sc,
    Bisect,
    Pw,
}

#[derive(Subcommand)]
enum Cmd {
    /// Maximize a Max 2-CSP instance.
    SolveCsp(SolveArgs),
    /// Maximum cut of a graph.
    Maxcut(SolveArgs),
    /// Maximum number of satisfiable clauses of a DIMACS 2-CNF.
    Max2sat(SolveArgs),
    /// Dominating sets per size.
    CountDs {
        #[command(flatten)]
        args: SolveArgs,
        /// Read a labeled subcubic graph and use the subcubic counter.
        #[arg(long)]
        subcubic: bool,
    },
    /// Set covers per size.
    CountSc(SolveArgs),
    /// Print a separation (L, S, R) of a graph.
    Separate {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SepMethod::Cubic)]
        method: SepMethod,
        /// Imbalance bound for the measure method (unit weights).
        #[arg(long, default_value_t = 1)]
        cap: i64,
    },
    /// Generate an instance.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        n3: Option<usize>,
        #[arg(long)]
        n4: Option<usize>,
        /// Edge count for csp.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Edge probability for graph and subcubic.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
    /// Trace the local algorithm on a lower-bound family.
    TraceLb {
        #[arg(long, value_enum)]
        family: LbFamily,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        n3: Option<usize>,
        #[arg(long)]
        n4: Option<usize>,
    },
    /// Check a weight system and report its running-time base.
    AuditMeasure {
        #[arg(long, value_enum)]
        system: SystemArg,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Domain size for the CSP base.
        #[arg(long, default_value_t = 3)]
        r: u32,
    },
    /// Brute-force reference answers.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        input: Option<PathBuf>,
        /// ds: read a labeled graph.
        #[arg(long)]
        labeled: bool,
    },
}

enum CliError {
    Input(String),
    Solver(String),
}

type Res<T> = Result<T, CliError>;

fn input_err(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

fn solver_err(e: impl ToString) -> CliError {
    CliError::Solver(e.to_string())
}

fn read_input(path: &Option<PathBuf>) -> Res<String> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| input_err(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(input_err)?;
            Ok(s)
        }
    }
}

fn threads() -> usize {
    let avail = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("SMC_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        Some(0) => 1,
        Some(k) => k.min(avail),
        None => avail,
    }
}

/// Collects the result, printed as text or one JSON object at the end.
struct Out {
    json: bool,
    stats: bool,
    lines: Vec<String>,
    obj: serde_json::Map<String, Value>,
}

impl Out {
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn set(&mut self, k: &str, v: Value) {
        self.obj.insert(k.to_string(), v);
    }

    fn stat(&mut self, k: &str, v: impl ToString) {
        let v = v.to_string();
        if self.stats && !self.json {
            eprintln!("{k},{v}");
        }
        let stats = self.obj.entry("stats").or_insert_with(|| json!({}));
        stats[k] = Value::String(v);
    }

    fn audit(&mut self, log: &AuditLog) {
        eprintln!("audit steps={} violations={}", log.steps, log.violations.len());
        for v in &log.violations {
            eprintln!("{v}");
        }
        self.set("audit", json!({ "steps": log.steps, "violations": log.violations.len() }));
    }

    /// A closed stdout (e.g. `| head`) ends output quietly.
    fn finish(self) {
        let mut o = io::stdout().lock();
        if self.json {
            let _ = writeln!(o, "{}", Value::Object(self.obj));
        } else {
            for l in self.lines {
                if writeln!(o, "{l}").is_err() {
                    return;
                }
            }
        }
    }
}

fn counts_out(out: &mut Out, c: &CountVector) {
    for l in c.to_lines() {
        out.line(l);
    }
    out.set("counts", json!(c.counts.iter().map(|x| x.to_string()).collect::<Vec<_>>()));
}

fn csp_weights(path: &Option<PathBuf>) -> Res<CspWeights> {
    match path {
        Some(p) => CspWeights::from_text(&read_input(&Some(p.clone()))?).map_err(input_err),
        None => Ok(CspWeights::published()),
    }
}

fn sc_weights(path: &Option<PathBuf>) -> Res<ScWeights> {
    match path {
        Some(p) => ScWeights::from_text(&read_input(&Some(p.clone()))?).map_err(input_err),
        None => Ok(ScWeights::published()),
    }
}

fn csp_error(e: max2csp::CspError) -> CliError {
    if e.is_parse() {
        input_err(e)
    } else {
        solver_err(e)
    }
}

fn solve_csp(out: &mut Out, inst: &CspInstance, a: &SolveArgs) -> Res<CspSolution> {
    let opts = SolveOptions {
        policy: a.policy.into(),
        audit: a.audit,
        trace_measure: false,
        threads: threads(),
        weights: csp_weights(&a.weights)?,
    };
    let (sol, st) = max2csp::solve_with(inst, &opts).map_err(csp_error)?;
    csp_stats(out, &st);
    if a.audit {
        out.audit(&st.audit);
    }
    out.set("score", json!(sol.score));
    out.set(
        "assignment",
        json!(sol.assignment.iter().map(|(v, c)| (v.to_string(), json!(*c))).collect::<serde_json::Map<_, _>>()),
    );
    Ok(sol)
}

fn csp_stats(out: &mut Out, st: &SolveStats) {
    out.stat("branchings", st.branchings);
    out.stat("leaves", st.leaves);
    out.stat("max_depth", st.max_depth);
    out.stat("separator_recomputes", st.separator_recomputes);
    out.stat("separator_rejections", st.separator_rejections);
}

fn assignment_line(sol: &CspSolution) -> String {
    let parts: Vec<String> = sol.assignment.iter().map(|(v, c)| format!("{v}={c}")).collect();
    format!("assignment {}", parts.join(" "))
}

fn sep_lines(out: &mut Out, g: &Graph, s: &Separation) {
    let fmt = |xs: &std::collections::BTreeSet<usize>| xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    out.line(format!("left {}", fmt(&s.left)).trim_end().to_string());
    out.line(format!("sep {}", fmt(&s.sep)).trim_end().to_string());
    out.line(format!("right {}", fmt(&s.right)).trim_end().to_string());
    let valid = verify_separation(g, s);
    out.line(format!("valid {valid}"));
    out.set("left", json!(s.left));
    out.set("sep", json!(s.sep));
    out.set("right", json!(s.right));
    out.set("valid", json!(valid));
}

fn need(v: Option<usize>, name: &str) -> Res<usize> {
    v.ok_or_else(|| input_err(format!("--{name} is required")))
}

fn run(cli: Cli) -> Res<Out> {
    let mut out = Out { json: cli.json, stats: cli.stats, lines: Vec::new(), obj: serde_json::Map::new() };
    match cli.cmd {
        Cmd::SolveCsp(a) => {
            let inst = CspInstance::from_text(&read_input(&a.input)?).map_err(csp_error)?;
            let sol = solve_csp(&mut out, &inst, &a)?;
            out.line(format!("score {}", sol.score));
            out.line(assignment_line(&sol));
        }
        Cmd::Maxcut(a) => {
            let g = Graph::from_text(&read_input(&a.input)?).map_err(input_err)?;
            let sol = solve_csp(&mut out, &max2csp::encode_maxcut(&g), &a)?;
            out.line(format!("score {}", sol.score));
            out.line(assignment_line(&sol));
        }
        Cmd::Max2sat(a) => {
            let (n, clauses) = max2csp::parse_dimacs(&read_input(&a.input)?).map_err(csp_error)?;
            let inst = max2csp::encode_max2sat(n, &clauses).map_err(csp_error)?;
            let sol = solve_csp(&mut out, &inst, &a)?;
            out.line(format!("score {}", sol.score));
            let lits: Vec<String> = sol
                .assignment
                .iter()
                .map(|(v, c)| if *c == 1 { format!("{}", v + 1) } else { format!("-{}", v + 1) })
                .collect();
            out.line(
                std::iter::once("v".to_string()).chain(lits).chain(["0".to_string()]).collect::<Vec<_>>().join(" "),
            );
        }
        Cmd::CountDs { args, subcubic } => {
            let text = read_input(&args.input)?;
            let c = if subcubic {
                let g = LabeledGraph::from_text(&text).map_err(input_err)?;
                let opts = DsOptions { policy: args.policy.into(), audit: args.audit, ..Default::default() };
                let (c, st) = count_ds_with(&g, &opts);
                out.stat("branchings", st.branchings);
                out.stat("leaves", st.leaves());
                out.stat("max_depth", st.max_depth);
                out.stat("separator_recomputes", st.separator_recomputes);
                if args.audit {
                    out.audit(&st.audit);
                }
                c
            } else {
                let g = Graph::from_text(&text).map_err(input_err)?;
                let c = count_sc(&mut out, &ds_to_sc(&g), &args)?;
                c.padded(g.num_vertices())
            };
            counts_out(&mut out, &c);
        }
        Cmd::CountSc(a) => {
            let i = ScIncidence::from_text(&read_input(&a.input)?).map_err(input_err)?;
            let c = count_sc(&mut out, &i, &a)?;
            counts_out(&mut out, &c);
        }
        Cmd::Separate { input, method, cap } => {
            let g = Graph::from_text(&read_input(&input)?).map_err(input_err)?;
            let s = match method {
                SepMethod::Cubic => {
                    if g.max_degree() > 3 {
                        return Err(input_err("the cubic method needs maximum degree at most 3"));
                    }
                    separate_cubic_seeded(&g, cli.seed)
                }
                SepMethod::Bisect => {
                    let b = bisect_heuristic(&g, cli.seed);
                    out.stat("cut", b.cut);
                    let cut_side: std::collections::BTreeSet<usize> =
                        b.a.iter().copied().filter(|&v| g.neighbors(v).iter().any(|w| b.b.contains(w))).collect();
                    Separation::new(b.a.difference(&cut_side).copied().collect(), cut_side, b.b.clone())
                }
                SepMethod::Measure => {
                    let one = |_| BigRational::from_integer(1.into());
                    separate_balanced_by_measure(&g, &one, &BigRational::from_integer(cap.into()))
                }
            };
            sep_lines(&mut out, &g, &s);
        }
        Cmd::Gen { kind, n, n3, n4, m, r, p } => {
            let seed = cli.seed;
            let text = match kind {
                GenKind::Csp => {
                    let n = need(n, "n")?;
                    generators::gen_random_csp(n, m.unwrap_or(n), r, seed).map_err(input_err)?.to_text()
                }
                _ => {
                    let g = match kind {
                        GenKind::G3 => generators::gen_g3(need(n, "n")?).map_err(input_err)?,
                        GenKind::G4 => generators::gen_g4(need(n3, "n3")?, need(n4, "n4")?).map_err(input_err)?,
                        GenKind::G5 => generators::gen_g5(need(n, "n")?).map_err(input_err)?,
                        GenKind::Cubic => generators::gen_random_cubic(need(n, "n")?, seed).map_err(input_err)?,
                        GenKind::Graph => generators::gen_random_graph(need(n, "n")?, p, seed),
                        GenKind::Subcubic => generators::gen_random_subcubic(need(n, "n")?, p, seed),
                        GenKind::Csp => unreachable!(),
                    };
                    g.to_text().map_err(solver_err)?
                }
            };
            out.set("instance", json!(text));
            out.lines.extend(text.lines().map(str::to_string));
        }
        Cmd::TraceLb { family, n, n3, n4 } => {
            let fam = match family {
                LbFamily::G3 => Family::G3 { n: need(n, "n")? },
                LbFamily::G4 => Family::G4 { n3: need(n3.or(n), "n3")?, n4: need(n4.or(n), "n4")? },
                LbFamily::G5 => Family::G5 { n: need(n, "n")? },
            };
            let g = fam.generate().map_err(input_err)?;
            let t = generators::trace_lower_bound(&g, fam).map_err(solver_err)?;
            let expected = fam.expected_branchings();
            let got = t.reduction_iii_count as i64;
            out.line(format!("branchings={got} expected={expected} match={}", got == expected));
            if !t.guard_failures.is_empty() {
                eprintln!("pivot preference not met at steps {:?}", t.guard_failures);
            }
            out.stat("vertices", g.num_vertices());
            for s in &t.steps {
                out.stat(&format!("step_{}", s.pivot), format!("{}:{}", s.degree, s.order_after));
            }
            out.set("branchings", json!(got));
            out.set("expected", json!(expected));
            out.set("match", json!(got == expected));
            out.set("guard_failures", json!(t.guard_failures));
        }
        Cmd::AuditMeasure { system, weights, r } => {
            let (report, exp) = match system {
                SystemArg::Csp => {
                    let w = csp_weights(&weights)?;
                    (check_csp(&w), exponent_csp(&w, r).ok())
                }
                SystemArg::Sc => {
                    let w = sc_weights(&weights)?;
                    (check_sc(&w), exponent_sc(&w).ok())
                }
            };
            if cli.stats {
                eprint!("{}", report.table());
            }
            for v in report.violated() {
                eprintln!("violated {}", v.id);
            }
            let feasible = report.feasible();
            match exp {
                Some(e) => {
                    let x = to_f64(&e.exponent);
                    out.line(format!("feasible={feasible} exponent={x} base={:.4}", e.base));
                    out.set("exponent", json!(x));
                    out.set("base", json!(e.base));
                }
                None => out.line(format!("feasible={feasible}")),
            }
            out.set("feasible", json!(feasible));
            out.set("constraints", json!(report.lines()));
        }
        Cmd::Oracle { kind, input, labeled } => {
            let text = read_input(&input)?;
            match kind {
                OracleKind::Csp => {
                    let inst = CspInstance::from_text(&text).map_err(csp_error)?;
                    let sol = oracles::brute_max2csp(&inst).map_err(solver_err)?;
                    out.line(format!("score {}", sol.score));
                    out.line(assignment_line(&sol));
                    out.set("score", json!(sol.score));
                }
                OracleKind::Ds => {
                    let c = if labeled {
                        let g = LabeledGraph::from_text(&text).map_err(input_err)?;
                        oracles::brute_domset(&g)
                    } else {
                        oracles::brute_domset_graph(&Graph::from_text(&text).map_err(input_err)?)
                    }
                    .map_err(solver_err)?;
                    counts_out(&mut out, &c);
                }
                OracleKind::Sc => {
                    let i = ScIncidence::from_text(&text).map_err(input_err)?;
                    counts_out(&mut out, &oracles::brute_setcover(&i).map_err(solver_err)?);
                }
                OracleKind::Bisect => {
                    let c = oracles::brute_min_bisection(&Graph::from_text(&text).map_err(input_err)?)
                        .map_err(solver_err)?;
                    out.line(format!("cut {c}"));
                    out.set("cut", json!(c));
                }
                OracleKind::Pw => {
                    let w =
                        oracles::brute_pathwidth(&Graph::from_text(&text).map_err(input_err)?).map_err(solver_err)?;
                    out.line(format!("pathwidth {w}"));
                    out.set("pathwidth", json!(w));
                }
            }
        }
    }
    Ok(out)
}

fn count_sc(out: &mut Out, i: &ScIncidence, a: &SolveArgs) -> Res<CountVector> {
    let opts =
        ScOptions { policy: a.policy.into(), audit: a.audit, weights: sc_weights(&a.weights)?, ..Default::default() };
    let (c, st) = sc_count_with(i, &opts);
    out.stat("branchings", st.branchings);
    out.stat("leaves", st.leaves);
    out.stat("max_depth", st.max_depth);
    out.stat("annotations", st.annotations);
    out.stat("separator_recomputes", st.separator_recomputes);
    out.stat("separator_rejections", st.separator_rejections);
    if a.audit {
        out.audit(&st.audit);
        eprintln!("transitions={} mu3_above_mu4={}", st.transitions, st.transition_excess);
    }
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            out.finish();
            ExitCode::SUCCESS
        }
        Err(CliError::Solver(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
