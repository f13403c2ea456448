//! `amalgam-lab`: command line front end for graphs of groups with finite
//! edge groups.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use amalgam_core::bass_serre::{tree_ball, DEFAULT_STAR_RADIUS};
use amalgam_core::boundary::{
    amalgam_check, boundary_approx, branch_density_check, cantor_check, classify_direction, limit_set_family,
    DirectionClass, Verdict,
};
use amalgam_core::fundgroup::DEFAULT_BUDGET;
use amalgam_core::gog::{elementary_collapse, is_non_elementary, spanning_tree, Elementarity};
use amalgam_core::separation::{
    ends_estimate, verify_cayley_separation, verify_k_construction, SeparationError, SeparationReport,
};
use amalgam_core::{emit_presentation, parse_gog, word_metric_ball, FundamentalGroup, GraphOfGroups, NormalForm};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "amalgam-lab", version, about = "Graphs of groups, Bass-Serre trees and boundary experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Emit::Text, global = true)]
    emit: Emit,
    /// Input format: the text DSL or JSON written by `--emit json`.
    #[arg(long, value_enum, default_value_t = From::Gog, global = true)]
    from: From,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Element cap for ball enumerations.
    #[arg(long, default_value_t = DEFAULT_BUDGET, global = true)]
    budget: usize,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Append a timing line to this file.
    #[arg(long, global = true)]
    log: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Json,
    Dot,
    Gap,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum From {
    Gog,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse and validate an input, report its spanning tree and elementarity.
    Validate { file: PathBuf },
    /// Contract one edge, or the collapse sequence found by the elementarity search.
    Collapse {
        file: PathBuf,
        /// Oriented edge label, `e` or `e'`.
        #[arg(long)]
        edge: Option<String>,
    },
    /// Print a finite presentation of the fundamental group.
    Presentation { file: PathBuf },
    /// Ball in the Bass-Serre tree about the identity vertex.
    TreeBall {
        file: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = DEFAULT_STAR_RADIUS)]
        star_radius: usize,
    },
    /// Ball in the Cayley graph about the identity.
    CayleyBall {
        file: PathBuf,
        #[arg(long)]
        radius: usize,
    },
    /// Sampled R-separation of Cayley vertex sets by edge cosets.
    Separate {
        file: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long = "R")]
        r: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Checks on the thickened edge set K and the separation radius R0.
    VerifyK {
        file: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = 20)]
        edges: usize,
        /// Tree distance beyond which probe vertices must be separated.
        #[arg(long, default_value_t = 3)]
        probe: usize,
    },
    /// Estimate the number of ends from complements of balls.
    Ends {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<usize>,
        #[arg(long)]
        noise_floor: Option<usize>,
    },
    /// Depth-d approximation of the tree boundary.
    Boundary {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_STAR_RADIUS)]
        star_radius: usize,
        /// List every branch.
        #[arg(long)]
        branches: bool,
    },
    /// Check the dense amalgam conditions on the limit-set family.
    AmalgamCheck {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_STAR_RADIUS)]
        star_radius: usize,
    },
    /// Classify the direction of a sequence of elements.
    Classify {
        file: PathBuf,
        /// Use the powers `w, w^2, ..., w^count`.
        #[arg(long, conflicts_with = "samples")]
        word: Option<String>,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Comma separated words.
        #[arg(long, value_delimiter = ',')]
        samples: Vec<String>,
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Validate { .. } => "validate",
            Cmd::Collapse { .. } => "collapse",
            Cmd::Presentation { .. } => "presentation",
            Cmd::TreeBall { .. } => "tree-ball",
            Cmd::CayleyBall { .. } => "cayley-ball",
            Cmd::Separate { .. } => "separate",
            Cmd::VerifyK { .. } => "verify-k",
            Cmd::Ends { .. } => "ends",
            Cmd::Boundary { .. } => "boundary",
            Cmd::AmalgamCheck { .. } => "amalgam-check",
            Cmd::Classify { .. } => "classify",
        }
    }

    fn file(&self) -> &PathBuf {
        match self {
            Cmd::Validate { file }
            | Cmd::Collapse { file, .. }
            | Cmd::Presentation { file }
            | Cmd::TreeBall { file, .. }
            | Cmd::CayleyBall { file, .. }
            | Cmd::Separate { file, .. }
            | Cmd::VerifyK { file, .. }
            | Cmd::Ends { file, .. }
            | Cmd::Boundary { file, .. }
            | Cmd::AmalgamCheck { file, .. }
            | Cmd::Classify { file, .. } => file,
        }
    }

    fn formats(&self) -> &'static [Emit] {
        match self {
            Cmd::Validate { .. } | Cmd::Collapse { .. } | Cmd::TreeBall { .. } | Cmd::CayleyBall { .. } => {
                &[Emit::Text, Emit::Json, Emit::Dot]
            }
            Cmd::Presentation { .. } => &[Emit::Text, Emit::Json, Emit::Gap],
            _ => &[Emit::Text, Emit::Json],
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    /// A domain error, tagged with its module and error name.
    Domain { module: &'static str, name: String, message: String },
}

impl Failure {
    fn domain<E: std::fmt::Debug + std::fmt::Display>(module: &'static str, e: E) -> Self {
        let debug = format!("{e:?}");
        let name = debug.split(|c: char| !c.is_alphanumeric() && c != '_').next().unwrap_or("").to_string();
        Failure::Domain { module, name, message: e.to_string() }
    }
}

/// A finished report and whether the property it checks held.
struct Report {
    body: String,
    holds: bool,
}

fn error_name(e: &SeparationError) -> Failure {
    Failure::domain("separation", e)
}

fn load(path: &PathBuf, from: From) -> Result<GraphOfGroups, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    match from {
        From::Gog => parse_gog(&text).map_err(|e| Failure::Domain {
            module: "gog",
            name: format!("{:?}", e.kind).split(|c: char| !c.is_alphanumeric()).next().unwrap_or("").to_string(),
            message: e.to_string(),
        }),
        From::Json => {
            let v: Value = serde_json::from_str(&text).map_err(|e| Failure::domain("gog", e))?;
            let graph = v.get("graph").cloned().unwrap_or(v);
            GraphOfGroups::from_json(&graph.to_string()).map_err(|e| Failure::Domain {
                module: "gog",
                name: "InvalidJson".into(),
                message: e.to_string(),
            })
        }
    }
}

fn envelope(command: &str, g: &GraphOfGroups, result: impl Serialize) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "graph": g,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
    s.push('\n');
    s
}

fn gog_dot(g: &GraphOfGroups) -> String {
    let mut out = String::from("graph gog {\n");
    for (i, v) in g.vertices.iter().enumerate() {
        let _ = writeln!(out, "  v{i} [label=\"{}: {}\"];", v.name, v.group.backend.describe());
    }
    for e in &g.edges {
        let _ = writeln!(out, "  v{} -- v{} [label=\"{} ({})\"];", e.tail, e.head, e.name, e.group.order());
    }
    out.push_str("}\n");
    out
}

fn fundamental_group(g: &GraphOfGroups) -> Result<FundamentalGroup, Failure> {
    FundamentalGroup::new(g.clone(), 0).map_err(|e| Failure::domain("gog", e))
}

fn separation_report(name: &str, g: &GraphOfGroups, emit: Emit, rep: &SeparationReport) -> Report {
    let body = match emit {
        Emit::Json => envelope(name, g, rep),
        _ => rep.to_text(),
    };
    Report { body, holds: rep.holds() }
}

fn run(cmd: &Cmd, c: &Common) -> Result<Report, Failure> {
    let g = load(cmd.file(), c.from)?;
    let name = cmd.name();
    let ok = |body: String| Ok(Report { body, holds: true });
    match cmd {
        Cmd::Validate { .. } => {
            let sd = spanning_tree(&g, 0).map_err(|e| Failure::domain("gog", e))?;
            let kind = is_non_elementary(&g);
            let p = emit_presentation(&fundamental_group(&g)?);
            match c.emit {
                Emit::Json => ok(envelope(
                    name,
                    &g,
                    json!({"spanning": sd, "elementarity": kind, "presentation": p.to_text()}),
                )),
                Emit::Dot => ok(gog_dot(&g)),
                _ => {
                    let mut out = format!("{} vertices, {} edges\n", g.num_vertices(), g.num_edges());
                    for v in &g.vertices {
                        let _ = writeln!(out, "vertex {}: {}", v.name, v.group.backend.describe());
                    }
                    for (i, e) in g.edges.iter().enumerate() {
                        let place = if sd.in_tree[i] { "tree" } else { "non-tree" };
                        let _ = writeln!(out, "edge {}: order {}, {place}", e.name, e.group.order());
                    }
                    let _ = writeln!(out, "elementarity: {kind:?}");
                    let _ = writeln!(out, "presentation: {}", p.to_text());
                    ok(out)
                }
            }
        }
        Cmd::Collapse { edge, .. } => {
            let (h, steps) = match edge {
                Some(label) => {
                    let y = g
                        .oriented_edges()
                        .find(|&y| g.edge_label(y) == *label)
                        .ok_or_else(|| Failure::Usage(format!("no oriented edge labelled {label}")))?;
                    (elementary_collapse(&g, y).map_err(|e| Failure::domain("gog", e))?, vec![label.clone()])
                }
                None => match is_non_elementary(&g) {
                    Elementarity::ReducesTo { collapses, .. } => {
                        let mut h = g.clone();
                        for label in &collapses {
                            let y = h.oriented_edges().find(|&y| h.edge_label(y) == *label).expect("witness labels exist");
                            h = elementary_collapse(&h, y).map_err(|e| Failure::domain("gog", e))?;
                        }
                        (h, collapses)
                    }
                    other => {
                        return Err(Failure::Domain {
                            module: "gog",
                            name: "NoCollapse".into(),
                            message: format!("no edge given and the graph does not reduce by collapses ({other:?})"),
                        })
                    }
                },
            };
            match c.emit {
                Emit::Json => ok(envelope(name, &h, json!({"collapsed": steps}))),
                Emit::Dot => ok(gog_dot(&h)),
                _ => ok(format!("# collapsed {}\n{}", steps.join(", "), h.to_dsl())),
            }
        }
        Cmd::Presentation { .. } => {
            let p = emit_presentation(&fundamental_group(&g)?);
            match c.emit {
                Emit::Json => {
                    let relators: Vec<String> = p.relators.iter().map(|r| p.word_text(r)).collect();
                    ok(envelope(name, &g, json!({"presentation": p, "text": relators, "abelianization": p.abelianization()})))
                }
                Emit::Gap => ok(p.to_gap()),
                _ => ok(format!("{}\n", p.to_text())),
            }
        }
        Cmd::TreeBall { radius, star_radius, .. } => {
            let fg = fundamental_group(&g)?;
            let b = tree_ball(&fg, *radius, *star_radius, c.budget).map_err(|e| Failure::domain("bass_serre", e))?;
            match c.emit {
                Emit::Json => ok(envelope(name, &g, &b)),
                Emit::Dot => ok(b.to_dot(&fg)),
                _ => {
                    let truncated = b.nodes.iter().filter(|n| n.truncated).count();
                    let mut levels = vec![0usize; radius + 1];
                    for i in 0..b.len() {
                        levels[b.depth(i)] += 1;
                    }
                    ok(format!(
                        "{} vertices, {} edges, truncated stars {truncated}\nvertices by depth: {levels:?}\n",
                        b.len(),
                        b.num_edges()
                    ))
                }
            }
        }
        Cmd::CayleyBall { radius, .. } => {
            let fg = fundamental_group(&g)?;
            let b = word_metric_ball(&fg, *radius, c.budget).map_err(|e| Failure::domain("fundgroup", e))?;
            let names: Vec<String> = b.elements.iter().map(|x| fg.display(x)).collect();
            match c.emit {
                Emit::Json => ok(envelope(
                    name,
                    &g,
                    json!({
                        "radius": radius,
                        "generators": b.generators.labels,
                        "elements": names,
                        "layer": b.layer,
                        "adjacency": b.adjacency,
                    }),
                )),
                Emit::Dot => {
                    let mut out = String::from("graph cayley {\n");
                    for (i, n) in names.iter().enumerate() {
                        let _ = writeln!(out, "  x{i} [label=\"{n}\"];");
                    }
                    for (i, adj) in b.adjacency.iter().enumerate() {
                        for &j in adj.iter().filter(|&&j| j as usize > i) {
                            let _ = writeln!(out, "  x{i} -- x{j};");
                        }
                    }
                    out.push_str("}\n");
                    ok(out)
                }
                _ => ok(format!("{} elements\nsphere sizes: {:?}\n", b.len(), b.sphere_sizes())),
            }
        }
        Cmd::Separate { radius, r, samples, .. } => {
            let fg = fundamental_group(&g)?;
            let rep = verify_cayley_separation(&fg, *radius, *samples, *r, c.seed, c.budget).map_err(|e| error_name(&e))?;
            Ok(separation_report(name, &g, c.emit, &rep))
        }
        Cmd::VerifyK { radius, edges, probe, .. } => {
            let fg = fundamental_group(&g)?;
            let rep = verify_k_construction(&fg, *radius, *edges, *probe, c.seed, c.budget).map_err(|e| error_name(&e))?;
            Ok(separation_report(name, &g, c.emit, &rep))
        }
        Cmd::Ends { radii, noise_floor, .. } => {
            let fg = fundamental_group(&g)?;
            if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Failure::Usage("--radii must be strictly increasing".into()));
            }
            let (result, holds) = match ends_estimate(&fg, radii, *noise_floor, c.budget) {
                Ok(rep) => (json!(rep), true),
                Err(SeparationError::Inconclusive { counts }) => {
                    (json!({"radii": radii, "counts": counts, "verdict": "inconclusive"}), false)
                }
                Err(e) => return Err(error_name(&e)),
            };
            let body = match c.emit {
                Emit::Json => envelope(name, &g, &result),
                _ => format!("counts {} at radii {:?}\nends: {}\n", result["counts"], radii, result["verdict"].as_str().map_or("?".into(), ends_word)),
            };
            Ok(Report { body, holds })
        }
        Cmd::Boundary { depth, star_radius, branches, .. } => {
            let fg = fundamental_group(&g)?;
            let b = boundary_approx(&fg, *depth, *star_radius, c.budget).map_err(|e| Failure::domain("boundary", e))?;
            let cantor = (*depth >= 3).then(|| cantor_check(&fg, &b)).transpose().map_err(|e| Failure::domain("boundary", e))?;
            let list: Option<Vec<String>> = branches.then(|| (0..b.len()).map(|i| fg.display_path(b.key(i), None)).collect());
            match c.emit {
                Emit::Json => ok(envelope(name, &g, json!({"summary": b.summary(), "cantor": cantor, "branches": list}))),
                _ => {
                    let s = b.summary();
                    let mut out = format!(
                        "depth {}: {} branches, dead ends {}, truncated stars {}\nlevel sizes: {:?}\n",
                        s.depth, s.branches, s.dead_ends, s.truncated_stars, s.level_sizes
                    );
                    if let Some(v) = cantor {
                        let _ = writeln!(out, "cantor: {}", if v.pass { "pass" } else { "fail" });
                    }
                    for l in list.unwrap_or_default() {
                        let _ = writeln!(out, "{l}");
                    }
                    ok(out)
                }
            }
        }
        Cmd::AmalgamCheck { depth, samples, star_radius, .. } => {
            let fg = fundamental_group(&g)?;
            let b = boundary_approx(&fg, *depth, *star_radius, c.budget).map_err(|e| Failure::domain("boundary", e))?;
            let family = limit_set_family(&b);
            let cert = amalgam_check(&fg, &b, &family, *samples, c.seed).map_err(|e| Failure::domain("boundary", e))?;
            let (density, witness) = branch_density_check(&fg, &b, &family).map_err(|e| Failure::domain("boundary", e))?;
            let holds = cert.pass() && density != Verdict::Fail;
            let body = match c.emit {
                Emit::Json => envelope(
                    name,
                    &g,
                    json!({"certificate": cert, "branch_density": {"verdict": density, "witness": witness}, "pass": holds}),
                ),
                _ => {
                    let mut out = format!("depth {}: {} members, {} branches\n", cert.depth, cert.members, cert.branches);
                    for cond in &cert.conditions {
                        let _ = write!(out, "{}: {} ({} checked)", cond.condition, if cond.pass { "pass" } else { "fail" }, cond.checked);
                        if let Some(w) = cond.witnesses.first() {
                            let _ = write!(out, " witness {w}");
                        }
                        out.push('\n');
                    }
                    let _ = writeln!(out, "branch density: {density:?}");
                    out
                }
            };
            Ok(Report { body, holds })
        }
        Cmd::Classify { word, count, samples, r, .. } => {
            let fg = fundamental_group(&g)?;
            let parse = |w: &str| fg.parse_element(w).map_err(|m| Failure::Domain { module: "fundgroup", name: "UnknownWord".into(), message: m });
            let xs: Vec<NormalForm> = match word {
                Some(w) => {
                    let x = parse(w)?;
                    (1..=*count as i64).map(|k| fg.pow(&x, k)).collect()
                }
                None if !samples.is_empty() => samples.iter().map(|w| parse(w)).collect::<Result<_, _>>()?,
                None => return Err(Failure::Usage("classify needs --word or --samples".into())),
            };
            let class = classify_direction(&fg, &xs, *r);
            match c.emit {
                Emit::Json => ok(envelope(name, &g, json!({"samples": xs.len(), "r": r, "class": class}))),
                _ => ok(match &class {
                    DirectionClass::BranchPoint { prefix } => {
                        format!("branch point through {}\n", fg.display_path(prefix, None))
                    }
                    DirectionClass::VertexPoint { coset } => format!(
                        "vertex point of {} {}\n",
                        g.vertices[coset.vertex_type].name,
                        fg.display(&coset.rep(&fg))
                    ),
                    DirectionClass::Inconclusive => "inconclusive\n".into(),
                }),
            }
        }
    }
}

fn ends_word(v: &str) -> String {
    match v {
        "zero" => "0",
        "one" => "1",
        "two" => "2",
        "infinite_growing" => "infinite",
        other => other,
    }
    .to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let c = &cli.common;
    if !cli.command.formats().contains(&c.emit) {
        eprintln!("error: {} does not support --emit {:?}", cli.command.name(), c.emit);
        return ExitCode::from(1);
    }
    if let Some(n) = c.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let start = Instant::now();
    let code = match run(&cli.command, c) {
        Ok(report) => {
            let written = match &c.output {
                Some(path) => std::fs::write(path, &report.body),
                None => {
                    print!("{}", report.body);
                    Ok(())
                }
            };
            match written {
                Err(e) => {
                    eprintln!("error: cannot write output: {e}");
                    1
                }
                Ok(()) if report.holds => 0,
                Ok(()) => 2,
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(Failure::Domain { module, name, message }) => {
            eprintln!("error[{module}::{name}]: {message}");
            1
        }
    };
    if let Some(path) = &c.log {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let line = format!("{stamp} {} {} {}ms exit={code}\n", cli.command.name(), cli.command.file().display(), start.elapsed().as_millis());
        let appended = std::fs::OpenOptions::new().create(true).append(true).open(path).and_then(|mut f| {
            use std::io::Write;
            f.write_all(line.as_bytes())
        });
        if let Err(e) = appended {
            eprintln!("warning: cannot write log: {e}");
        }
    }
    ExitCode::from(code)
}
