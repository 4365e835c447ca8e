//! Batch front end: topological analysis of graph and automaton files,
//! Kleene expression synthesis, semigroup expansions, and the
//! verification suites.
//!
//! Exit codes: 0 success, 2 precondition failure, 3 certificate not
//! closed, 4 property violation.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gst::digraph::{strong_components, RootedGraph};
use gst::expansion::{self, ExpansionError, IdentityBasis};
use gst::io::{GraphDoc, SemigroupDoc};
use gst::kleene;
use gst::uspp;
use gst::verify::{run_suite, SuiteParams, SUITE_NAMES};

const EXIT_PRECONDITION: u8 = 2;
const EXIT_NOT_CLOSED: u8 = 3;
const EXIT_VIOLATION: u8 = 4;

#[derive(Parser)]
#[command(name = "gst", about = "geometric semigroup theory toolchain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Topological analysis of a graph or automaton file.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize the union-free expression of a trim acceptor.
    Kleene {
        file: PathBuf,
        #[arg(long)]
        rank_file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand a semigroup file: rkr, kr, rrh, rh, br, rb, lz, rz,
    /// zp:<p>, malcev:<basis-file>.
    Expand {
        file: PathBuf,
        name: String,
        #[arg(short = 'L', long, default_value_t = 6)]
        bound: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        sizes: Option<usize>,
        #[arg(long)]
        bound: Option<usize>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn precondition(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_PRECONDITION, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { file, format, out } => cmd_analyze(&file, format, out.as_deref()),
        Command::Kleene { file, rank_file, out } => {
            cmd_kleene(&file, rank_file.as_deref(), out.as_deref())
        }
        Command::Expand { file, name, bound, out } => {
            cmd_expand(&file, &name, bound, out.as_deref())
        }
        Command::Verify { suite, seed, count, sizes, bound } => {
            cmd_verify(&suite, seed, count, sizes, bound)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(file: &std::path::Path) -> Result<String, Failure> {
    fs::read_to_string(file)
        .map_err(|e| Failure::precondition(format!("{}: {e}", file.display())))
}

fn emit(out: Option<&std::path::Path>, text: &str) -> Result<(), Failure> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::precondition(format!("{}: {e}", path.display()))),
    }
}

fn max_states() -> usize {
    std::env::var("GST_MAX_STATES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(5000)
}

fn cmd_analyze(
    file: &std::path::Path,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let doc = GraphDoc::parse(&read(file)?)
        .map_err(|e| Failure::precondition(format!("parse: {e}")))?;
    let g = doc
        .to_graph()
        .map_err(|e| Failure::precondition(format!("parse: {e}")))?;
    let root = doc
        .root_index()
        .map_err(|e| Failure::precondition(format!("parse: {e}")))?;
    let frame = strong_components(&g);
    let rooted = RootedGraph::new(g.clone(), root)
        .map_err(|e| Failure::precondition(format!("{e}")))?;
    let verdict = uspp::has_uspp(&rooted);

    match format {
        Format::Dot => {
            let labels: Option<Vec<String>> = doc.alphabet.as_ref().map(|_| {
                doc.edges.iter().map(|e| e.label.clone().unwrap_or_default()).collect()
            });
            let dot = gst::io::to_dot(
                &g,
                &doc.vertices,
                labels.as_deref(),
                &frame,
                verdict.as_ref().ok(),
            );
            emit(out, &dot)
        }
        Format::Json => {
            let report = analyze_json(&doc, &g, &frame, root, &verdict);
            emit(out, &format!("{report:#}\n"))
        }
        Format::Text => {
            let mut text = String::new();
            text.push_str(&format!(
                "vertices: {}\nedges: {}\ncomponents: {}\ntransition_edges: {}\n",
                g.num_vertices(),
                g.num_edges(),
                frame.num_components(),
                frame.transition_edges.len()
            ));
            let quasi = frame.is_quasilinear();
            let linear = frame.is_linear(&g);
            text.push_str(&format!("quasilinear: {quasi}\nlinear: {linear}\n"));
            if linear {
                if let Ok(ee) = gst::digraph::entry_exit_points(&g, &frame) {
                    for (i, (entry, exit)) in ee.entry.iter().zip(ee.exit.iter()).enumerate() {
                        let name = |v: &Option<usize>| {
                            v.map(|x| doc.vertices[x].clone()).unwrap_or_else(|| "-".into())
                        };
                        text.push_str(&format!(
                            "component {i}: entry {} exit {}\n",
                            name(entry),
                            name(exit)
                        ));
                    }
                }
            }
            match &verdict {
                Ok(u) => {
                    text.push_str(&format!("uspp: yes\nbold_arrows: {}\n", u.bold.len()));
                    for &e in &u.bold {
                        text.push_str(&format!(
                            "  bold {} : {} -> {}\n",
                            e,
                            doc.vertices[g.init(e)],
                            doc.vertices[g.term(e)]
                        ));
                    }
                }
                Err(cx) => {
                    text.push_str(&format!(
                        "uspp: no (two simple paths from {} to {})\n",
                        doc.vertices[root], doc.vertices[cx.vertex]
                    ));
                    let show = |p: &gst::digraph::Path| -> String {
                        p.vertices(&g)
                            .iter()
                            .map(|&v| doc.vertices[v].clone())
                            .collect::<Vec<_>>()
                            .join(" ")
                    };
                    text.push_str(&format!("  first:  {}\n", show(&cx.first)));
                    text.push_str(&format!("  second: {}\n", show(&cx.second)));
                }
            }
            emit(out, &text)
        }
    }
}

fn analyze_json(
    doc: &GraphDoc,
    g: &gst::digraph::DirectedGraph,
    frame: &gst::digraph::Frame,
    root: usize,
    verdict: &Result<uspp::UsppData, uspp::UsppCounterexample>,
) -> serde_json::Value {
    serde_json::json!({
        "vertices": g.num_vertices(),
        "edges": g.num_edges(),
        "root": doc.vertices[root],
        "components": frame.components.iter().map(|c| {
            c.vertices.iter().map(|&v| doc.vertices[v].clone()).collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
        "transition_edges": frame.transition_edges,
        "quasilinear": frame.is_quasilinear(),
        "linear": frame.is_linear(g),
        "uspp": verdict.is_ok(),
        "bold_arrows": verdict.as_ref().map(|u| u.bold.clone()).unwrap_or_default(),
    })
}

fn cmd_kleene(
    file: &std::path::Path,
    rank_file: Option<&std::path::Path>,
    out: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let doc = GraphDoc::parse(&read(file)?)
        .map_err(|e| Failure::precondition(format!("parse: {e}")))?;
    let acc = doc
        .to_acceptor()
        .map_err(|e| Failure::precondition(format!("parse: {e}")))?;
    let rank = match rank_file {
        Some(path) => gst::io::parse_rank_file(&read(path)?)
            .map_err(|e| Failure::precondition(format!("rank file: {e}")))?,
        None => {
            let rg = acc.pointed.rooted_graph();
            let u = uspp::has_uspp(&rg).map_err(|cx| {
                Failure::precondition(format!(
                    "acceptor lacks the unique simple path property at state {}",
                    doc.vertices[cx.vertex]
                ))
            })?;
            uspp::default_rank(
                &acc.pointed.automaton.graph,
                &u,
                Some(&acc.pointed.automaton.labels),
            )
        }
    };
    let expr = kleene::kleene(&acc, &rank).map_err(|e| Failure::precondition(e.to_string()))?;
    let al = &acc.pointed.automaton.alphabet;
    let mut text = format!("{}\n", expr.display(al));
    let agree = expr.language_upto(12) == acc.language_upto(12, true);
    text.push_str(&format!(
        "language check (length <= 12): {}\n",
        if agree { "OK" } else { "MISMATCH" }
    ));
    emit(out, &text)?;
    if agree {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VIOLATION, message: "expression disagrees with acceptor".into() })
    }
}

fn cmd_expand(
    file: &std::path::Path,
    name: &str,
    bound: usize,
    out: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let s = SemigroupDoc::parse(&read(file)?)
        .and_then(|d| d.to_semigroup())
        .map_err(|e| Failure::precondition(format!("parse: {e}")))?;
    let map_err = |e: ExpansionError| match e {
        ExpansionError::NotClosed(b) => Failure {
            code: EXIT_NOT_CLOSED,
            message: format!("congruence not closed at bound {b}; raise -L"),
        },
        ExpansionError::NotStable(a, b) => Failure {
            code: EXIT_NOT_CLOSED,
            message: format!("expansion not stable between bounds {a} and {b}; raise -L"),
        },
        other => Failure::precondition(other.to_string()),
    };
    let (result, basis): (expansion::ExpansionResult, Option<IdentityBasis>) = match name {
        "rkr" => (expansion::rkr(&s), None),
        "kr" => (expansion::kr(&s), None),
        "rrh" => (expansion::rrh(&s), None),
        "rh" => (expansion::rh(&s), None),
        "br" => (expansion::br(&s, 8).map_err(map_err)?, None),
        "rb" => (expansion::rb(&s, bound).map_err(map_err)?, Some(IdentityBasis::rectangular_band())),
        "lz" => (expansion::lz(&s, bound).map_err(map_err)?, Some(IdentityBasis::left_zero())),
        "rz" => (expansion::rz(&s, bound).map_err(map_err)?, Some(IdentityBasis::right_zero())),
        _ => {
            if let Some(p) = name.strip_prefix("zp:") {
                let p: usize = p
                    .parse()
                    .map_err(|_| Failure::precondition(format!("bad prime in {name:?}")))?;
                (expansion::zp(&s, p, bound).map_err(map_err)?, Some(IdentityBasis::z_p(p)))
            } else if let Some(path) = name.strip_prefix("malcev:") {
                let basis = IdentityBasis::parse(&read(std::path::Path::new(path))?)
                    .map_err(|e| Failure::precondition(e.to_string()))?;
                let (r, _) = expansion::malcev_stable(&s, &basis, bound).map_err(map_err)?;
                (r, Some(basis))
            } else {
                return Err(Failure::precondition(format!("unknown expansion {name:?}")));
            }
        }
    };

    let expanded_doc = SemigroupDoc::of_semigroup(&result.expanded);
    let mut text = expanded_doc.to_json();
    let projection = serde_json::json!({
        "projection": result.projection,
        "certificate": "closed",
    });
    let mut summary = format!(
        "expanded {} -> {} elements\n",
        s.len(),
        result.expanded.len()
    );
    match name {
        "rkr" | "kr" | "lz" | "rb" => {
            let t = if name == "kr" { result.expanded.reversal() } else { result.expanded.clone() };
            let status = match gst::semigroup::str_equals_cay_everywhere(&t, max_states()) {
                Ok(None) => "str = Cay for every word".to_string(),
                Ok(Some(w)) => format!("str != Cay at a word of length {}", w.len()),
                Err(e) => format!("check skipped: {e}"),
            };
            summary.push_str(&format!("straightline/Cayley check: {status}\n"));
        }
        _ => {}
    }
    if let Some(basis) = &basis {
        let status = match expansion::verify_malcev_kernel(
            &result.expanded,
            &result.projection,
            &s,
            basis,
        ) {
            Ok(()) => "kernel satisfies the basis".to_string(),
            Err(w) => format!("kernel violation over idempotent {}", w.idempotent),
        };
        summary.push_str(&format!("kernel check: {status}\n"));
    }

    match out {
        None => {
            print!("{text}");
            print!("{projection:#}\n");
            eprint!("{summary}");
            Ok(())
        }
        Some(path) => {
            emit(Some(path), &text)?;
            let proj_path = path.with_extension("projection.json");
            text = format!("{projection:#}\n");
            emit(Some(&proj_path), &text)?;
            eprint!("{summary}");
            Ok(())
        }
    }
}

fn cmd_verify(
    suite: &str,
    seed: u64,
    count: Option<usize>,
    sizes: Option<usize>,
    bound: Option<usize>,
) -> Result<(), Failure> {
    let params = SuiteParams { seed, count, size: sizes, bound };
    let names: Vec<&str> = if suite == "all" { SUITE_NAMES.to_vec() } else { vec![suite] };
    let mut all_ok = true;
    for name in names {
        let Some(report) = run_suite(name, &params) else {
            return Err(Failure::precondition(format!(
                "unknown suite {name:?}; available: {}",
                SUITE_NAMES.join(", ")
            )));
        };
        print!("{}", report.render());
        all_ok &= report.ok();
    }
    if all_ok {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VIOLATION, message: "verification failed".into() })
    }
}
