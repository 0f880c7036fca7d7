use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use clubcat::algebra::{colimit_act, i_points, is_fibration};
use clubcat::io::{self, Document};
use clubcat::operads::{club_to_operad, encode_ns, encode_sym, operad_to_club, sym_operad_to_club};
use clubcat::semidirect::{club_check, semidirect_with, ClubStructure, Guardrails};
use clubcat::simpset::{horn_lifting, product, HornClass};
use clubcat::sset_club::{
    associativity_check, compose, delta_naturality_check, unit_law_check, ClubMorphismSSet, PairFamily,
};
use clubcat::suite::{run_suite, SuiteConfig, SUITES};
use clubcat::Error;

#[derive(Parser)]
#[command(name = "clubcat", version, about = "Clubs in Cat: semi-direct products, operads and simplicial sets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write the main output (document or JSON report) to this file.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    /// Print reports as JSON instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    /// Seed for suites (default 0).
    seed: Option<u64>,
    #[arg(long, global = true)]
    /// Sample count for suites; each suite has its own default.
    samples: Option<usize>,
    /// Truncation level; Kan checks run up to one below it.
    #[arg(long, global = true)]
    trunc: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate any document.
    Validate { file: PathBuf },
    /// The semi-direct product X ⋉ Y of two diagrams.
    Semidirect { left: PathBuf, right: PathBuf },
    /// Check the club laws of a club file, or of the club of an operad file.
    ClubCheck { file: PathBuf },
    #[command(subcommand)]
    /// Simplicial sets, maps and club objects over them.
    Sset(SsetCmd),
    #[command(subcommand)]
    /// Non-symmetric and symmetric operads as clubs.
    Operad(OperadCmd),
    #[command(subcommand)]
    /// Set-valued algebras over simplicial shapes.
    Algebra(AlgebraCmd),
    /// Run a seeded law-check suite.
    Suite {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        name: String,
    },
}

#[derive(Subcommand)]
enum SsetCmd {
    /// Validate a simplicial set, map or club object.
    Validate { file: PathBuf },
    /// Product of two simplicial sets.
    Product { left: PathBuf, right: PathBuf },
    /// Diagonal of the bisimplicial set of a club object.
    Diag { file: PathBuf },
    /// The composite sset of a club object.
    Compose { file: PathBuf },
    /// Horn lifting for a simplicial map.
    KanCheck {
        file: PathBuf,
        /// Only inner horns.
        #[arg(long)]
        inner: bool,
    },
    /// Unit, associativity and naturality checks for a club object.
    LawCheck { file: PathBuf },
}

#[derive(Subcommand)]
enum OperadCmd {
    /// Check the operad axioms.
    Validate { file: PathBuf },
    /// The diagram encoding the operad's collection.
    Encode { file: PathBuf },
    /// The club of an operad.
    ToClub { file: PathBuf },
    /// operad -> club -> operad, with the club laws checked on the way.
    Roundtrip { file: PathBuf },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Colimit of an algebra object, the result of its canonical action.
    Colimit { file: PathBuf },
    /// The simplicial set of I-points.
    Ipoints {
        file: PathBuf,
        /// Size of the generating finite set.
        #[arg(long, default_value_t = 1)]
        generator: usize,
    },
    /// Horn lifting on I-points for an algebra morphism.
    FibrationCheck {
        file: PathBuf,
        /// Generator sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        generators: Vec<usize>,
        #[arg(long)]
        inner: bool,
    },
}

/// Outcome of a command: a document to emit or a report with a verdict.
enum Outcome {
    Document(Value, String),
    Report { passed: bool, report: Value, summary: String },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invalid(_) => 1,
        Error::Guardrail(_) => 3,
        _ => 2,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Schema(_) => "schema",
        Error::Invalid(_) => "invalid",
        Error::Mismatch(_) => "mismatch",
        Error::Guardrail(_) => "guardrail",
        Error::Truncation(_) => "truncation",
        Error::Json(_) => "json",
        Error::Io(_) => "io",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", error_kind(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> clubcat::Result<u8> {
    let outcome = dispatch(cli)?;
    match outcome {
        Outcome::Document(v, summary) => {
            let text = io::to_pretty(&v);
            match &cli.output {
                Some(p) => {
                    std::fs::write(p, text)?;
                    println!("{summary}");
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Outcome::Report { passed, report, summary } => {
            let text = io::to_pretty(&report);
            if let Some(p) = &cli.output {
                std::fs::write(p, &text)?;
            }
            if cli.json {
                print!("{text}");
            } else {
                print!("{summary}");
                if !summary.ends_with('\n') {
                    println!();
                }
            }
            Ok(if passed { 0 } else { 1 })
        }
    }
}

fn read(path: &Path) -> clubcat::Result<Document> {
    io::read_document(path, &Guardrails::for_law_checks())
}

fn wrong_kind(path: &Path, want: &str, got: &Document) -> Error {
    Error::Schema(format!("{}: expected a {want} file, found {}", path.display(), got.kind()))
}

fn report(command: &str, passed: bool, mut body: Value, summary: String) -> Outcome {
    let obj = body.as_object_mut().expect("report bodies are objects");
    obj.insert("version".into(), json!(io::FORMAT_VERSION));
    obj.insert("command".into(), json!(command));
    obj.insert("passed".into(), json!(passed));
    Outcome::Report { passed, report: body, summary }
}

fn dispatch(cli: &Cli) -> clubcat::Result<Outcome> {
    match &cli.cmd {
        Cmd::Validate { file } | Cmd::Sset(SsetCmd::Validate { file }) | Cmd::Operad(OperadCmd::Validate { file }) => {
            let d = read(file)?;
            let kind = d.kind();
            Ok(report("validate", true, json!({ "kind": kind }), format!("valid {kind}")))
        }
        Cmd::Semidirect { left, right } => {
            let x = diagram(left)?;
            let y = diagram(right)?;
            let p = semidirect_with(&x, &y, &Guardrails::default(), None)?;
            let d = p.diagram();
            let summary = format!(
                "X ⋉ Y: {} objects, {} morphisms in the base",
                d.base().object_count(),
                d.base().morphism_count()
            );
            Ok(Outcome::Document(io::document_to_value(&Document::Diagram((**d).clone()))?, summary))
        }
        Cmd::ClubCheck { file } => {
            let g = Guardrails::for_law_checks();
            let club = match read(file)? {
                Document::Club(c) => c,
                Document::Operad(op) => operad_to_club(&op, &g)?,
                Document::SymOperad(op) => sym_operad_to_club(&op, &g)?,
                other => return Err(wrong_kind(file, "club or operad", &other)),
            };
            Ok(club_report(&club, &g)?)
        }
        Cmd::Sset(c) => sset(cli, c),
        Cmd::Operad(c) => operad(c),
        Cmd::Algebra(c) => algebra(c),
        Cmd::Suite { name } => {
            let cfg = SuiteConfig { seed: cli.seed.unwrap_or(0), samples: cli.samples, trunc: cli.trunc, guard: None };
            let r = run_suite(name, &cfg)?;
            let v: Value = serde_json::from_str(&r.to_json())?;
            Ok(Outcome::Report { passed: r.passed, report: v, summary: r.summary() })
        }
    }
}

fn diagram(path: &Path) -> clubcat::Result<Arc<clubcat::diagram::DiagramInCat>> {
    match read(path)? {
        Document::Diagram(d) => Ok(Arc::new(d)),
        other => Err(wrong_kind(path, "diagram", &other)),
    }
}

fn club_report(club: &ClubStructure, g: &Guardrails) -> clubcat::Result<Outcome> {
    let r = club_check(club, g)?;
    let failures: Vec<Value> = r.failures.iter().map(|f| json!({ "law": f.law, "witness": f.witness })).collect();
    let mut summary = format!(
        "club laws: {} ({} objects checked)\n",
        if r.passed() { "PASS" } else { "FAIL" },
        r.checked_objects
    );
    for f in &r.failures {
        summary += &format!("  {}: {}\n", f.law, f.witness);
    }
    Ok(report("club-check", r.passed(), json!({ "checked_objects": r.checked_objects, "failures": failures }), summary))
}

fn sset(cli: &Cli, c: &SsetCmd) -> clubcat::Result<Outcome> {
    let as_sset = |p: &Path| match read(p)? {
        Document::SSet(s) => Ok(s),
        other => Err(wrong_kind(p, "sset", &other)),
    };
    let as_family = |p: &Path| match read(p)? {
        Document::ClubObject(x) => Ok(x),
        other => Err(wrong_kind(p, "club-object", &other)),
    };
    let sset_doc = |s, what: &str| -> clubcat::Result<Outcome> {
        let s: clubcat::simpset::SimplicialSet = s;
        let summary = format!("{what}: non-degenerate simplices {:?}", s.nondeg_counts());
        Ok(Outcome::Document(io::document_to_value(&Document::SSet(s))?, summary))
    };
    match c {
        SsetCmd::Validate { .. } => unreachable!("handled with validate"),
        SsetCmd::Product { left, right } => sset_doc(product(&as_sset(left)?, &as_sset(right)?), "product"),
        SsetCmd::Diag { file } => {
            let x = as_family(file)?;
            sset_doc(clubcat::simpset::diag(&clubcat::sset_club::bisimplicial_of(&x)), "diagonal")
        }
        SsetCmd::Compose { file } => sset_doc((*compose(&as_family(file)?).sset).clone(), "composite"),
        SsetCmd::KanCheck { file, inner } => {
            let f = match read(file)? {
                Document::Map(f) => f,
                other => return Err(wrong_kind(file, "map", &other)),
            };
            let n = cli.trunc.unwrap_or_else(|| f.src().trunc().min(f.tgt().trunc()));
            let max_dim = n.saturating_sub(1);
            let class = if *inner { HornClass::Inner } else { HornClass::All };
            let r = horn_lifting(&f, max_dim, class)?;
            let witness = r.witness.as_ref().map(|w| json!({ "n": w.n, "k": w.k, "faces": w.faces, "target": w.target }));
            let summary = match &r.witness {
                None => format!("fibration up to dimension {max_dim}"),
                Some(w) => format!(
                    "not a fibration: horn Λ[{},{}] with faces {:?} over {} has no filler",
                    w.n, w.k, w.faces, w.target
                ),
            };
            Ok(report("sset kan-check", r.holds(), json!({ "max_dim": max_dim, "witness": witness }), summary))
        }
        SsetCmd::LawCheck { file } => {
            let x = Arc::new(as_family(file)?);
            let mut laws = unit_law_check(x.base());
            laws.push(associativity_check(&PairFamily::from_outer(x.clone(), &x))?);
            laws.push(delta_naturality_check(&ClubMorphismSSet::identity(x))?);
            let passed = laws.iter().all(|l| l.passed());
            let mut summary = String::new();
            for l in &laws {
                summary += &format!("{}: {}\n", l.law, if l.passed() { "PASS" } else { "FAIL" });
                for f in l.failures.iter().take(3) {
                    summary += &format!("  {f}\n");
                }
            }
            let body: Vec<Value> = laws.iter().map(|l| json!({ "law": l.law, "failures": l.failures })).collect();
            Ok(report("sset law-check", passed, json!({ "laws": body }), summary))
        }
    }
}

fn operad(c: &OperadCmd) -> clubcat::Result<Outcome> {
    let g = Guardrails::for_law_checks();
    let read_operad = |p: &Path| match read(p)? {
        d @ (Document::Operad(_) | Document::SymOperad(_)) => Ok(d),
        other => Err(wrong_kind(p, "operad", &other)),
    };
    match c {
        OperadCmd::Validate { .. } => unreachable!("handled with validate"),
        OperadCmd::Encode { file } => {
            let d = match read_operad(file)? {
                Document::Operad(op) => encode_ns(op.collection(), &g)?,
                Document::SymOperad(op) => (*encode_sym(&op.sigma, &g)?.diagram).clone(),
                _ => unreachable!(),
            };
            let summary = format!("encoded: {} objects, {} morphisms", d.base().object_count(), d.base().morphism_count());
            Ok(Outcome::Document(io::document_to_value(&Document::Diagram(d))?, summary))
        }
        OperadCmd::ToClub { file } => {
            let club = match read_operad(file)? {
                Document::Operad(op) => operad_to_club(&op, &g)?,
                Document::SymOperad(op) => sym_operad_to_club(&op, &g)?,
                _ => unreachable!(),
            };
            let summary = format!("club on {} objects", club.carrier.base().object_count());
            Ok(Outcome::Document(io::document_to_value(&Document::Club(club))?, summary))
        }
        OperadCmd::Roundtrip { file } => {
            let (ns, club) = match read_operad(file)? {
                Document::Operad(op) => {
                    let club = operad_to_club(&op, &g)?;
                    (op, club)
                }
                Document::SymOperad(op) => {
                    let club = sym_operad_to_club(&op, &g)?;
                    (op.operad, club)
                }
                _ => unreachable!(),
            };
            let laws = club_check(&club, &g)?;
            // the non-symmetric part always round-trips through its own club
            let back = club_to_operad(&operad_to_club(&ns, &g)?, ns.collection(), &g)?;
            let same = back == ns;
            let passed = laws.passed() && same;
            let summary = format!(
                "club laws: {}\noperad -> club -> operad: {}",
                if laws.passed() { "PASS" } else { "FAIL" },
                if same { "identical" } else { "differs" }
            );
            let failures: Vec<Value> = laws.failures.iter().map(|f| json!({ "law": f.law, "witness": f.witness })).collect();
            Ok(report("operad roundtrip", passed, json!({ "club_failures": failures, "identical": same }), summary))
        }
    }
}

fn algebra(c: &AlgebraCmd) -> clubcat::Result<Outcome> {
    let read_object = |p: &Path| match read(p)? {
        Document::Algebra(x) => Ok(x),
        other => Err(wrong_kind(p, "algebra-object", &other)),
    };
    match c {
        AlgebraCmd::Colimit { file } => {
            let x = read_object(file)?;
            let col = colimit_act(&x);
            let reps: Vec<Value> = col
                .representatives
                .iter()
                .map(|&(o, e)| json!({ "simplex": x.shape.label(&x.cat.objects[o]), "element": e }))
                .collect();
            let summary = format!("colimit has {} elements", col.size);
            Ok(report("algebra colimit", true, json!({ "size": col.size, "representatives": reps }), summary))
        }
        AlgebraCmd::Ipoints { file, generator } => {
            let x = read_object(file)?;
            let mut counts = Vec::new();
            for n in 0..=x.shape.trunc() {
                counts.push(i_points(&x, *generator, n)?.len());
            }
            let summary = format!("I-points for a generator of size {generator} by dimension: {counts:?}");
            Ok(report("algebra ipoints", true, json!({ "generator": generator, "counts": counts }), summary))
        }
        AlgebraCmd::FibrationCheck { file, generators, inner } => {
            let m = match read(file)? {
                Document::AlgebraMorphism(m) => m,
                other => return Err(wrong_kind(file, "algebra-morphism", &other)),
            };
            let class = if *inner { HornClass::Inner } else { HornClass::All };
            let r = is_fibration(&m, generators, class)?;
            let failing = r.failing.as_ref().map(|(g, w)| {
                json!({ "generator": g, "n": w.n, "k": w.k, "faces": w.faces, "target": w.target })
            });
            let summary = if r.holds() {
                format!("fibration for generators {generators:?} up to one below the truncation")
            } else if !r.injective {
                "not a fibration: the map of shapes is not injective".to_string()
            } else {
                let (g, w) = r.failing.as_ref().expect("a failing generator");
                format!("not a fibration: generator {g}, horn Λ[{},{}] has no filler over {}", w.n, w.k, w.target)
            };
            Ok(report(
                "algebra fibration-check",
                r.holds(),
                json!({ "injective": r.injective, "failing": failing }),
                summary,
            ))
        }
    }
}
