use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kttree::complexes::TComplex;
use kttree::constructions::{canonical_witness, power_members, ConstructionId, Witness, DEFAULT_POWER_CAP};
use kttree::counting::{
    count_cliques, count_witness_copies, find_power_member, rooted_copies_by_root, DEFAULT_COUNT_CAP,
};
use kttree::density::{is_balanced, rooted_density, Balance, DEFAULT_BALANCE_CAP};
use kttree::experiment::{run_experiment, ExperimentConfig};
use kttree::planner::{plan_family_capped, plan_star_family};
use kttree::{Error, Q, RootedGraph};

#[derive(Parser)]
#[command(name = "kttree", version, about = "Rooted tree constructions for rational Turán exponents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output destination; "-" is standard output.
    #[arg(long, global = true, default_value = "-")]
    out: String,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    Dot,
    Csv,
}

#[derive(Copy, Clone, ValueEnum)]
enum Kind {
    T2,
    Star,
    T3Spike,
    T3Glued,
    Type1,
    Type2,
    RootedClique,
}

#[derive(Args)]
struct KindArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    t: Option<i64>,
    #[arg(long)]
    a: Option<i64>,
    #[arg(long)]
    b: Option<i64>,
    #[arg(long)]
    s: Option<i64>,
    #[arg(long)]
    k: Option<i64>,
}

impl KindArgs {
    fn id(&self) -> Result<ConstructionId, Error> {
        let need = |name: &str, v: Option<i64>| {
            v.ok_or_else(|| Error::Format(format!("missing --{name} for this kind")))
        };
        Ok(match self.kind {
            Kind::T2 => ConstructionId::T2 { a: need("a", self.a)?, b: need("b", self.b)? },
            Kind::Star => ConstructionId::Star {
                t: need("t", self.t)?,
                a: need("a", self.a)?,
                b: need("b", self.b)?,
            },
            Kind::T3Spike => ConstructionId::T3Spike { a: need("a", self.a)?, b: need("b", self.b)? },
            Kind::T3Glued => ConstructionId::T3Glued { a: need("a", self.a)?, b: need("b", self.b)? },
            Kind::Type1 => ConstructionId::Type1 {
                t: need("t", self.t)?,
                a: need("a", self.a)?,
                b: need("b", self.b)?,
                s: need("s", self.s)?,
            },
            Kind::Type2 => ConstructionId::Type2 {
                t: need("t", self.t)?,
                a: need("a", self.a)?,
                b: need("b", self.b)?,
            },
            Kind::RootedClique => ConstructionId::RootedClique {
                t: need("t", self.t)?,
                k: need("k", self.k)?,
            },
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a named construction and emit it.
    Construct {
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Rooted density and balance verdict of a construction or input graph.
    Density {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long = "cap-balance", default_value_t = DEFAULT_BALANCE_CAP)]
        cap_balance: usize,
    },
    /// Assemble a family plan for a target exponent.
    Plan {
        #[arg(long)]
        t: i64,
        /// Rational target, e.g. 7/3.
        #[arg(long)]
        exponent: String,
        /// Plan a star family (exponent in [t, t+1)) instead.
        #[arg(long)]
        stars: bool,
        #[arg(long = "cap-balance", default_value_t = DEFAULT_BALANCE_CAP)]
        cap_balance: usize,
    },
    /// Emit the clique-gluing witness of a construction.
    Witness {
        #[command(flatten)]
        kind: KindArgs,
    },
    /// Enumerate the members of the ell-th power of a construction.
    Power {
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long)]
        ell: usize,
        #[arg(long = "cap-power", default_value_t = DEFAULT_POWER_CAP)]
        cap_power: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Count cliques, witness copies, or rooted copies in a graph.
    Count {
        /// Input graph JSON file ({"n", "edges", "roots"}).
        #[arg(long = "in")]
        input: String,
        #[command(subcommand)]
        what: CountWhat,
    },
    /// Prune a complex to its minimum-degree core.
    Prune {
        /// Input complex JSON file ({"t", "n", "sets"}).
        #[arg(long = "in")]
        input: String,
        /// Degree thresholds for set sizes 1..=t-1, comma separated
        /// (size-t sets are the tops and are not thresholded).
        #[arg(long)]
        thresholds: String,
    },
    /// Run a sampling experiment from a JSON config, emitting CSV.
    Experiment {
        #[arg(long)]
        config: String,
    },
}

#[derive(Args)]
struct GraphInput {
    /// Rooted-graph JSON file; alternative to --kind.
    #[arg(long = "in")]
    input: Option<String>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    t: Option<i64>,
    #[arg(long)]
    a: Option<i64>,
    #[arg(long)]
    b: Option<i64>,
    #[arg(long)]
    s: Option<i64>,
    #[arg(long)]
    k: Option<i64>,
}

impl GraphInput {
    fn load(&self) -> Result<RootedGraph, Error> {
        if let Some(path) = &self.input {
            let text = fs::read_to_string(path).map_err(|e| Error::Format(e.to_string()))?;
            return RootedGraph::from_json(&text);
        }
        let kind = self
            .kind
            .ok_or_else(|| Error::Format("need --in or --kind".into()))?;
        KindArgs {
            kind,
            t: self.t,
            a: self.a,
            b: self.b,
            s: self.s,
            k: self.k,
        }
        .id()?
        .build()
    }
}

#[derive(Subcommand)]
enum CountWhat {
    /// i-cliques.
    Cliques {
        #[arg(long)]
        i: usize,
        #[arg(long = "cap-count", default_value_t = DEFAULT_COUNT_CAP)]
        cap_count: u64,
    },
    /// Copies of a witness inside the input graph's clique complex.
    Witness {
        /// Witness JSON file; alternative to a construction kind.
        #[arg(long)]
        witness: Option<String>,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[arg(long)]
        t: Option<i64>,
        #[arg(long)]
        a: Option<i64>,
        #[arg(long)]
        b: Option<i64>,
        #[arg(long)]
        s: Option<i64>,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long = "cap-count", default_value_t = DEFAULT_COUNT_CAP)]
        cap_count: u64,
    },
    /// Copies of a rooted construction, tallied per root image; with
    /// --ell, also search for a power member.
    Rooted {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        t: Option<i64>,
        #[arg(long)]
        a: Option<i64>,
        #[arg(long)]
        b: Option<i64>,
        #[arg(long)]
        s: Option<i64>,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long = "cap-count", default_value_t = DEFAULT_COUNT_CAP)]
        cap_count: u64,
    },
}

fn parse_q(s: &str) -> Result<Q, Error> {
    let parse_i = |x: &str| {
        x.trim()
            .parse::<i64>()
            .map_err(|_| Error::Format(format!("bad rational component {x:?}")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let d = parse_i(den)?;
            if d == 0 {
                return Err(Error::Format("zero denominator".into()));
            }
            Ok(Q::new(parse_i(num)?, d))
        }
        None => Ok(Q::from_integer(parse_i(s)?)),
    }
}

fn write_out(dest: &str, content: &str) -> Result<(), Error> {
    if dest == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(content.as_bytes())
            .map_err(|e| Error::Format(e.to_string()))?;
        if !content.ends_with('\n') {
            let _ = stdout.write_all(b"\n");
        }
        Ok(())
    } else {
        fs::write(dest, content).map_err(|e| Error::Format(e.to_string()))
    }
}

fn graph_json(g: &kttree::Graph) -> serde_json::Value {
    serde_json::json!({
        "n": g.n(),
        "edges": g.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    let out = cli.out.clone();
    match cli.command {
        Command::Construct { kind, format } => {
            let f = kind.id()?.build()?;
            let text = match format {
                Format::Json => f.to_json(),
                Format::Dot => f.to_dot(),
                Format::Csv => return Err(Error::Format("construct has no CSV form".into())),
            };
            write_out(&out, &text)
        }
        Command::Density { input, cap_balance } => {
            let f = input.load()?;
            let d = rooted_density(&f)?;
            let verdict = is_balanced(&f, cap_balance)?;
            let json = match verdict {
                Balance::Balanced => serde_json::json!({
                    "density": d.to_string(),
                    "balanced": true,
                }),
                Balance::Counterexample(s) => serde_json::json!({
                    "density": d.to_string(),
                    "balanced": false,
                    "counterexample": s.iter().collect::<Vec<_>>(),
                }),
            };
            write_out(&out, &serde_json::to_string_pretty(&json).unwrap())
        }
        Command::Plan { t, exponent, stars, cap_balance } => {
            let r = parse_q(&exponent)?;
            let plan = if stars {
                plan_star_family(t, r)?
            } else {
                plan_family_capped(t, r, cap_balance)?
            };
            write_out(&out, &plan.to_json())
        }
        Command::Witness { kind } => {
            let w = canonical_witness(&kind.id()?)?;
            let text = serde_json::to_string_pretty(&w).unwrap();
            write_out(&out, &text)
        }
        Command::Power { kind, ell, cap_power, format } => {
            let f = kind.id()?.build()?;
            let members = power_members(&f, ell, cap_power)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(
                    &members.iter().map(graph_json).collect::<Vec<_>>(),
                )
                .unwrap(),
                Format::Dot => members
                    .iter()
                    .map(|g| RootedGraph::new(g.clone(), f.roots.iter().copied()).unwrap().to_dot())
                    .collect::<Vec<_>>()
                    .join("\n"),
                Format::Csv => return Err(Error::Format("power has no CSV form".into())),
            };
            write_out(&out, &text)
        }
        Command::Count { input, what } => {
            let text = fs::read_to_string(&input).map_err(|e| Error::Format(e.to_string()))?;
            let host = RootedGraph::from_json(&text)?;
            let json = match what {
                CountWhat::Cliques { i, cap_count } => {
                    let c = count_cliques(&host.graph, i, cap_count)?;
                    serde_json::json!({"quantity": format!("K{i}"), "count": c})
                }
                CountWhat::Witness { witness, kind, t, a, b, s, k, cap_count } => {
                    let w: Witness = match (witness, kind) {
                        (Some(path), _) => {
                            let wt = fs::read_to_string(&path)
                                .map_err(|e| Error::Format(e.to_string()))?;
                            serde_json::from_str(&wt).map_err(|e| Error::Format(e.to_string()))?
                        }
                        (None, Some(kind)) => {
                            canonical_witness(&KindArgs { kind, t, a, b, s, k }.id()?)?
                        }
                        (None, None) => {
                            return Err(Error::Format("need --witness or --kind".into()))
                        }
                    };
                    let complex = kttree::complexes::clique_complex(&host.graph, w.t);
                    let c = count_witness_copies(&complex, &w, cap_count)?;
                    serde_json::json!({"quantity": "witness copies", "count": c})
                }
                CountWhat::Rooted { kind, t, a, b, s, k, ell, cap_count } => {
                    let f = KindArgs { kind, t, a, b, s, k }.id()?.build()?;
                    let tallies = rooted_copies_by_root(&host.graph, &f, cap_count)?;
                    let rows: Vec<serde_json::Value> = tallies
                        .iter()
                        .map(|(roots, c)| serde_json::json!({"roots": roots, "count": c}))
                        .collect();
                    match ell {
                        None => serde_json::json!({"quantity": "rooted copies", "rows": rows}),
                        Some(l) => {
                            let cert = find_power_member(&host.graph, &f, l, cap_count)?;
                            serde_json::json!({
                                "quantity": "rooted copies",
                                "rows": rows,
                                "power_member": cert,
                            })
                        }
                    }
                }
            };
            write_out(&out, &serde_json::to_string_pretty(&json).unwrap())
        }
        Command::Prune { input, thresholds } => {
            let text = fs::read_to_string(&input).map_err(|e| Error::Format(e.to_string()))?;
            let complex = TComplex::from_json(&text)?;
            let th: Vec<u64> = thresholds
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Format(format!("bad threshold {x:?}")))
                })
                .collect::<Result<_, _>>()?;
            if th.len() + 1 != complex.t {
                return Err(Error::Format(format!(
                    "need {} thresholds for a complex of dimension {}, got {}",
                    complex.t - 1,
                    complex.t,
                    th.len()
                )));
            }
            let pruned = complex.prune(|k| th[k - 1]);
            write_out(&out, &pruned.to_json())
        }
        Command::Experiment { config } => {
            let text = fs::read_to_string(&config).map_err(|e| Error::Format(e.to_string()))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let csv = run_experiment(&cfg)?;
            write_out(&out, &csv)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Format(_) => ExitCode::from(2),
                Error::CapExceeded { .. } => ExitCode::from(3),
                Error::Infeasible(_) => ExitCode::from(4),
            }
        }
    }
}
