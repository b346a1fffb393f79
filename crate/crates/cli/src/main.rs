use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cantorfam::check;
use cantorfam::construct::{build_recipe, nonsdefinable_witness, recipe_report};
use cantorfam::io::{self, FamilyFile};
use cantorfam::{calculus, rank, Error, Family, Ordinal, Scheme, Sentence, Theory};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cantorfam", version, about = "Families of theories as closed sets of Cantor space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the rank and degree of a family.
    Rank { file: PathBuf },
    /// Write the E-closure of a family.
    Closure {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the restriction of a family to a sentence.
    Restrict {
        file: PathBuf,
        #[arg(long)]
        phi: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide forcing between sentences or schemes over a family.
    Forces {
        file: PathBuf,
        #[arg(long, conflicts_with_all = ["lhs_scheme", "rhs_scheme"], requires = "psi")]
        phi: Option<String>,
        #[arg(long, requires = "phi")]
        psi: Option<String>,
        /// `{s1, s2, ...}`, `diag(t)` or `target(file)`.
        #[arg(long, requires = "rhs_scheme")]
        lhs_scheme: Option<String>,
        #[arg(long, requires = "lhs_scheme")]
        rhs_scheme: Option<String>,
    },
    /// Build a closed family of the given rank and degree.
    Construct {
        /// A natural number or an ordinal below w^w such as `w*2+1`.
        #[arg(long)]
        rank: String,
        #[arg(long)]
        degree: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Split a family into α-minimal neighbourhoods.
    Decompose { file: PathBuf },
    /// A d-definable singleton that is not s-definable.
    WitnessNonsdef { file: PathBuf },
    /// Run property suites and acceptance criteria.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Domain(Error),
    Suite,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Suite) => ExitCode::from(2),
    }
}

fn emit(family: &Family, output: Option<&Path>) -> Result<(), Error> {
    let file = FamilyFile::from_family(family);
    match output {
        Some(path) => {
            io::save(path, &file)?;
            println!("wrote {}: {family}", path.display());
        }
        None => println!("{}", file.to_json()),
    }
    Ok(())
}

fn parse_scheme(text: &str) -> Result<Scheme, Error> {
    let t = text.trim();
    let bad = |msg: &str| Error::Syntax { what: "scheme", pos: 0, msg: msg.to_string() };
    if let Some(body) = t.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        let offset = text.find('{').expect("brace") + 1;
        let mut sentences = Vec::new();
        let mut start = 0;
        for part in body.split(',') {
            if !part.trim().is_empty() || body.contains(',') {
                sentences.push(Sentence::parse(part).map_err(|e| match e {
                    Error::Syntax { what, pos, msg } => Error::Syntax { what, pos: pos + offset + start, msg },
                    other => other,
                })?);
            }
            start += part.len() + 1;
        }
        return Ok(Scheme::Finite(sentences));
    }
    if let Some(inner) = t.strip_prefix("diag(").and_then(|r| r.strip_suffix(')')) {
        return Ok(Scheme::Diagram(inner.trim().parse::<Theory>()?));
    }
    if let Some(path) = t.strip_prefix("target(").and_then(|r| r.strip_suffix(')')) {
        return Ok(Scheme::ClosedTarget(io::load_family(path.trim())?.closure().carrier()));
    }
    Err(bad("expected {s1, s2, ...}, diag(t) or target(file)"))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Rank { file } => {
            println!("{}", rank::rank(&io::load_family(file)?));
        }
        Command::Closure { file, output } => {
            emit(&io::load_family(file)?.closure(), output.as_deref())?;
        }
        Command::Restrict { file, phi, output } => {
            let phi = Sentence::parse(&phi)?;
            emit(&io::load_family(file)?.restrict(&phi), output.as_deref())?;
        }
        Command::Forces { file, phi, psi, lhs_scheme, rhs_scheme } => {
            let f = io::load_family(file)?;
            let verdict = match (phi, psi, lhs_scheme, rhs_scheme) {
                (Some(phi), Some(psi), None, None) => {
                    calculus::forces(&f, &Sentence::parse(&phi)?, &Sentence::parse(&psi)?)
                }
                (None, None, Some(l), Some(r)) => calculus::forces_scheme(&f, &parse_scheme(&l)?, &parse_scheme(&r)?),
                _ => {
                    return Err(
                        Error::Precondition("give --phi and --psi, or --lhs-scheme and --rhs-scheme".into()).into()
                    )
                }
            };
            println!("{}", if verdict { "YES" } else { "NO" });
        }
        Command::Construct { rank: alpha, degree, output } => {
            let alpha: Ordinal = alpha.parse()?;
            let report = recipe_report(&alpha, degree)?;
            println!("{}", report.summary());
            if let Some(path) = output {
                let recipe = match &report.recipe {
                    Some(r) => r.clone(),
                    None => build_recipe(&alpha, degree)?,
                };
                io::save(&path, &FamilyFile::from_expr(&recipe))?;
                println!("wrote {}", path.display());
            }
        }
        Command::Decompose { file } => {
            for (s, block) in rank::decompose(&io::load_family(file)?)? {
                println!("{s}\t{}", rank::rank(&block));
            }
        }
        Command::WitnessNonsdef { file } => {
            let (t, scheme) = nonsdefinable_witness(&io::load_family(file)?)?;
            println!("theory {t}");
            println!("scheme {scheme}");
        }
        Command::Check { suite, seed } => {
            let outcomes = check::run(&suite, seed)?;
            for o in &outcomes {
                println!("{o}");
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} passed, {failed} failed (seed {seed})", outcomes.len() - failed);
            if failed > 0 {
                return Err(Failure::Suite);
            }
        }
    }
    Ok(())
}
