//! Command-line front end. `run` returns the report and the exit status:
//! 0 for success or a positive verdict, 1 for a verified negative, 2 for
//! an inconclusive search, 3 for errors.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bisim::{search_bisimulation, verify_bisimulation, BisimRelation, Discipline, SearchOutcome, Verdict};
use crate::colimit::{colimit_posets, verify_theorem1, PosetDiagram};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fixtures;
use crate::homology::chain_complex_of_trace;
use crate::natural::{natural_homology, persistence_along_trace, Region};
use crate::persistence::barcode;
use crate::poset::{chain_category, ChainFlavor};
use crate::precubical::{parse_document, validate, Document, PrecubicalSet};
use crate::traceposet::{build_trace_poset, start_anchored_chain, TracePoset, DEFAULT_CAP};
use crate::tracespace::{trace_complex_capped, EdgePath};

#[derive(Parser, Debug)]
#[command(name = "nathom", version, about = "Natural homology of loop-free precubical sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Field characteristic: 0 for the rationals or a prime.
    #[arg(long, global = true, default_value_t = 0)]
    pub field: u64,
    /// Homology degree of the trace spaces plus one (1 counts components).
    #[arg(long, global = true, default_value_t = 1)]
    pub degree: usize,
    /// Bound on enumerated traces, chains or candidates.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check cell faces, cubical identities and loop-freeness.
    Validate { input: String },
    /// Size and homology of the trace space between two vertices.
    Tracespace {
        input: String,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
    },
    /// Hasse diagram of the trace poset.
    Poset {
        input: String,
        /// Keep the extensions of this trace only.
        #[arg(long)]
        upset: Option<String>,
    },
    /// Barcode of the homology along a chain below a trace.
    Persistence {
        input: String,
        #[arg(long)]
        trace: String,
        /// Traces separated by commas; defaults to the prefixes of the trace.
        #[arg(long)]
        chain: Option<String>,
    },
    /// Natural homology diagram as text.
    Natural {
        input: String,
        /// Restrict to the extensions of this trace.
        #[arg(long)]
        upset: Option<String>,
        /// With --upset, restrict further to the traces below this one.
        #[arg(long)]
        below: Option<String>,
    },
    /// Colimits over chain categories of the trace poset.
    Colimit {
        input: String,
        /// Compare the natural homology of an upset with the glued chain modules.
        #[arg(long)]
        theorem1: bool,
        /// Vertex whose constant trace generates the upset.
        #[arg(long)]
        anchor: Option<String>,
        #[arg(long, value_enum, default_value_t = FlavorArg::All)]
        flavor: FlavorArg,
    },
    /// Search for (or check) a bisimulation between two natural homology diagrams.
    Bisim {
        left: String,
        right: String,
        /// Restrict both sides to the upset of this vertex.
        #[arg(long)]
        anchor: Option<String>,
        #[arg(long, value_enum, default_value_t = DisciplineArg::SignedPerm)]
        discipline: DisciplineArg,
        /// Largest node dimension the search accepts.
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
        /// Check this relation file instead of searching.
        #[arg(long)]
        relation: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    All,
    Quasi,
    Pullback,
    Maximal,
}

impl From<FlavorArg> for ChainFlavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::All => ChainFlavor::All,
            FlavorArg::Quasi => ChainFlavor::MaxQuasi,
            FlavorArg::Pullback => ChainFlavor::MaxPullback,
            FlavorArg::Maximal => ChainFlavor::Maximal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DisciplineArg {
    SignedPerm,
    FullLinear,
}

/// A fixture name, a path, or a path whose file name is a fixture.
fn read_input(input: &str) -> Result<String> {
    if let Some(text) = fixtures::source(input) {
        return Ok(text.to_string());
    }
    match fs::read_to_string(input) {
        Ok(t) => Ok(t),
        Err(e) => {
            let name = std::path::Path::new(input).file_name().and_then(|n| n.to_str()).unwrap_or("");
            fixtures::source(name).map(str::to_string).ok_or(Error::Io(e))
        }
    }
}

fn load(input: &str) -> Result<PrecubicalSet> {
    crate::precubical::parse_precubical(&read_input(input)?)
}

/// First vertex without incoming edges and last without outgoing ones.
fn extremes(x: &PrecubicalSet) -> (usize, usize) {
    let n = x.count(0);
    let from = (0..n).find(|&v| x.in_edges(v).is_empty()).unwrap_or(0);
    let to = (0..n).rev().find(|&v| x.out_edges(v).is_empty()).unwrap_or(n.saturating_sub(1));
    (from, to)
}

struct Report {
    text: String,
    status: i32,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, status: 0 }
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    let field = Field::from_characteristic(cli.field)?;
    let cap = cli.cap;
    if cap == 0 {
        return Err(Error::Precondition("the cap must be positive".into()));
    }
    match &cli.command {
        Command::Validate { input } => {
            let doc = parse_document(&read_input(input)?)?;
            let report = match &doc {
                Document::Cells(inv) => validate(inv),
                Document::Grid(g) => {
                    g.check()?;
                    g.build()?.validate()
                }
            };
            if report.is_valid() {
                let x = doc.build()?;
                let counts: Vec<String> = (0..=x.dimension()).map(|d| x.count(d).to_string()).collect();
                Ok(Report::ok(format!("valid, cells per dimension: {}", counts.join(" "))))
            } else {
                Ok(Report { text: report.to_string().trim_end().to_string(), status: 1 })
            }
        }
        Command::Tracespace { input, from, to } => {
            let x = load(input)?;
            let (lo, hi) = extremes(&x);
            let a = from.as_deref().map(|v| x.vertex(v)).transpose()?.unwrap_or(lo);
            let b = to.as_deref().map(|v| x.vertex(v)).transpose()?.unwrap_or(hi);
            let t = trace_complex_capped(&x, a, b, cap)?;
            let components = t.components().len();
            if t.swaps.is_empty() {
                return Ok(Report::ok(format!("vertices: {}, components: {components}", t.paths.len())));
            }
            let b1 = chain_complex_of_trace(&t, field).betti(1);
            Ok(Report::ok(format!(
                "vertices: {}, swaps: {}, components: {components}, b1: {b1}",
                t.paths.len(),
                t.swaps.len()
            )))
        }
        Command::Poset { input, upset } => {
            let x = load(input)?;
            let mut p = build_trace_poset(&x, cap)?;
            if let Some(u) = upset {
                p = TracePoset::from_elements(p.upset(&EdgePath::parse(&x, u)?));
            }
            Ok(Report::ok(format!("traces: {}, covers: {}\n{}", p.len(), p.cover_count(), p.hasse_text(&x).trim_end())))
        }
        Command::Persistence { input, trace, chain } => {
            let x = load(input)?;
            let f = EdgePath::parse(&x, trace)?;
            let chain = match chain {
                Some(c) => c.split(',').map(|t| EdgePath::parse(&x, t.trim())).collect::<Result<Vec<_>>>()?,
                None => start_anchored_chain(&f),
            };
            let m = persistence_along_trace(&x, &f, &chain, cli.degree, field)?;
            Ok(Report::ok(barcode(&m)?.to_string()))
        }
        Command::Natural { input, upset, below } => {
            let x = load(input)?;
            let region = match (upset, below) {
                (None, None) => Region::Whole,
                (Some(u), None) => Region::Upset(EdgePath::parse(&x, u)?),
                (Some(u), Some(b)) => Region::Interval(EdgePath::parse(&x, u)?, EdgePath::parse(&x, b)?),
                (None, Some(_)) => return Err(Error::Precondition("--below needs --upset".into())),
            };
            let nat = natural_homology(&x, cli.degree, &region, field, cap)?;
            Ok(Report::ok(nat.diagram.to_text().trim_end().to_string()))
        }
        Command::Colimit { input, theorem1, anchor, flavor } => {
            let x = load(input)?;
            let flavor = ChainFlavor::from(*flavor);
            if *theorem1 {
                let v = match anchor {
                    Some(a) => x.vertex(a)?,
                    None => extremes(&x).0,
                };
                let r = verify_theorem1(&x, v, cli.degree, flavor, field, cap)?;
                let verdict = r.to_string();
                let last = verdict.lines().last().unwrap_or("").to_string();
                let body: Vec<&str> = verdict.lines().take_while(|l| *l != last).collect();
                let status = if r.isomorphic() { 0 } else { 1 };
                return Ok(Report { text: format!("{last}\n{}", body.join("\n")), status });
            }
            let mut tp = build_trace_poset(&x, cap)?;
            if let Some(a) = anchor {
                tp = TracePoset::from_elements(tp.upset(&EdgePath::constant(x.vertex(a)?)));
            }
            let p = tp.to_poset(&x);
            let cat = chain_category(&p, flavor, cap)?;
            let c = colimit_posets(&PosetDiagram::of_chains(&p, &cat))?;
            let same = c.poset.same_as(&p);
            let text = format!(
                "{}\nflavor: {}\nchains: {}\ncolimit elements: {}\ntraces: {}",
                if same { "reproduces the trace poset" } else { "differs from the trace poset" },
                flavor.name(),
                cat.objects.len(),
                c.poset.len(),
                p.len()
            );
            Ok(Report { text, status: if same { 0 } else { 1 } })
        }
        Command::Bisim { left, right, anchor, discipline, max_dim, relation } => {
            let diagram = |input: &str| -> Result<_> {
                let x = load(input)?;
                let region = match anchor {
                    Some(a) => Region::Upset(EdgePath::constant(x.vertex(a)?)),
                    None => Region::Whole,
                };
                Ok(natural_homology(&x, cli.degree, &region, field, cap)?.diagram)
            };
            let (f, g) = (diagram(left)?, diagram(right)?);
            if let Some(path) = relation {
                let r = BisimRelation::parse(&fs::read_to_string(path)?, &f, &g)?;
                return Ok(match verify_bisimulation(&f, &g, &r)? {
                    Verdict::Holds => Report::ok("bisimulation".into()),
                    Verdict::Fails(why) => Report { text: format!("not a bisimulation: {why}"), status: 1 },
                });
            }
            let d = match discipline {
                DisciplineArg::SignedPerm => Discipline::SignedPermutation,
                DisciplineArg::FullLinear => Discipline::FullLinear,
            };
            Ok(match search_bisimulation(&f, &g, d, *max_dim, cap)? {
                SearchOutcome::Found(r) => Report::ok(format!("bisimulation found\n{}", r.to_text(&f, &g).trim_end())),
                SearchOutcome::NotFound { exhaustive, reason } => Report {
                    text: format!(
                        "no bisimulation within discipline {d}\n{}: {reason}",
                        if exhaustive { "definitive" } else { "bounded" }
                    ),
                    status: 1,
                },
                SearchOutcome::Inconclusive(why) => Report { text: format!("inconclusive: {why}"), status: 2 },
            })
        }
    }
}

/// Parses `args` (program name first) and runs the command. The returned
/// text is what goes to standard output, or to standard error for errors.
pub fn run<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { 3 } else { 0 };
            return (e.to_string(), status);
        }
    };
    match execute(&cli) {
        Ok(r) => match &cli.out {
            Some(path) => match fs::write(path, format!("{}\n", r.text)) {
                Ok(()) => (String::new(), r.status),
                Err(e) => (format!("error: {e}"), 3),
            },
            None => (r.text, r.status),
        },
        Err(e) => (format!("error: {e}"), 3),
    }
}
