use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quadlat::corollaries::{cor3_sweep, cor4_sweep, cor5_sweep, norm4_sweep};
use quadlat::discriminant::DiscriminantForm;
use quadlat::halving::{hat, unhat, vector_correspondence};
use quadlat::lattice::{classify_unimodular, parse_standard, LatticeFile};
use quadlat::report::{correspondence_suite, f2_engine, k_pair, lemma1, to_text, to_value};
use quadlat::theorem6;
use quadlat::{Lattice, LatticeError};

const SEED_VAR: &str = "QUADLAT_SEED";

#[derive(Parser)]
#[command(name = "quadlat", version, about = "Exact integral quadratic lattices")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build a standard lattice, e.g. `E8(-2)+U(2)+U` or `I(2,10)`.
    Make {
        spec: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Rank, determinant, signature, parity and unimodular class.
    Info { file: PathBuf },
    /// The dual lattice.
    Dual {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// The sublattice of vectors of even norm.
    Evensub {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// The unique odd unimodular overlattice of the rescaled dual.
    Hat {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Inverse of `hat`.
    Unhat {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Discriminant group and its forms.
    Disc { file: PathBuf },
    /// Class of a unimodular lattice.
    Classify { file: PathBuf },
    /// Match norm `k` vectors of A with norm `k̂` vectors of Â.
    Correspond {
        a: PathBuf,
        a_hat: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2, -1])]
        norms: Vec<i64>,
        #[arg(long, default_value_t = 2)]
        height: u32,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 2)]
        height: u32,
        /// Sample count (random planes, cross-checks or Witt extensions).
        #[arg(long)]
        samples: Option<usize>,
        /// Isometries of A to extend in `thm6`.
        #[arg(long, default_value_t = 50)]
        extension_samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Lemma1,
    Thm2,
    Cor3,
    Cor4,
    Cor5,
    Norm4,
    F2,
    Thm6,
    All,
}

const SUITES: [Suite; 8] = [
    Suite::Lemma1,
    Suite::Thm2,
    Suite::Cor3,
    Suite::Cor4,
    Suite::Cor5,
    Suite::Norm4,
    Suite::F2,
    Suite::Thm6,
];

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Thm2 => "thm2",
            Suite::Cor3 => "cor3",
            Suite::Cor4 => "cor4",
            Suite::Cor5 => "cor5",
            Suite::Norm4 => "norm4",
            Suite::F2 => "f2",
            Suite::Thm6 => "thm6",
            Suite::All => "all",
        }
    }
}

enum Failure {
    Math(String),
    Input(String),
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Falsified(_) => Failure::Math(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<Lattice, Failure> {
    LatticeFile::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(l: &Lattice, path: &Path) -> Result<(), Failure> {
    LatticeFile::write(l, path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(format: Format, v: &Value) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(v).expect("values serialize")
        ),
        Format::Text => print!("{}", to_text(v)),
    }
}

fn info(l: &Lattice) -> Result<Value, Failure> {
    let mut v = to_value(&l.invariants());
    let class = if l.is_unimodular() {
        Value::String(classify_unimodular(l)?.to_string())
    } else {
        Value::Null
    };
    v["class"] = class;
    v["ambient_dim"] = json!(l.ambient_dim());
    Ok(v)
}

fn run_suite(
    suite: Suite,
    height: u32,
    samples: Option<usize>,
    ext: usize,
    seed: u64,
) -> Result<(bool, Value), Failure> {
    Ok(match suite {
        Suite::Lemma1 => {
            let r = lemma1()?;
            (r.passed(), to_value(&r))
        }
        Suite::Thm2 => {
            let r = correspondence_suite(height)?;
            (r.passed(), to_value(&r))
        }
        Suite::Cor3 => {
            let r = cor3_sweep(height)?;
            (r.passed(), to_value(&r))
        }
        Suite::Cor4 => {
            let r = cor4_sweep(height, samples.unwrap_or(100), seed)?;
            (r.passed(), to_value(&r))
        }
        Suite::Cor5 => {
            let r = cor5_sweep(height)?;
            (r.passed(), to_value(&r))
        }
        Suite::Norm4 => {
            let r = norm4_sweep(&k_pair()?, height, samples.unwrap_or(200), seed)?;
            (r.passed(), to_value(&r))
        }
        Suite::F2 => {
            let r = f2_engine()?;
            (r.passed(), to_value(&r))
        }
        Suite::Thm6 => {
            let r = theorem6::verify(samples.unwrap_or(100), ext, seed)?;
            (r.passed(), to_value(&r))
        }
        Suite::All => {
            let mut all = serde_json::Map::new();
            let mut ok = true;
            for s in SUITES {
                let (p, v) = run_suite(s, height, samples, ext, seed)?;
                ok &= p;
                all.insert(s.name().to_string(), json!({ "passed": p, "report": v }));
            }
            (ok, Value::Object(all))
        }
    })
}

fn default_seed() -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{SEED_VAR} is not an unsigned integer: {s}"))),
        Err(_) => Ok(theorem6::DEFAULT_SEED),
    }
}

fn run(cli: Cli) -> Outcome {
    let format = cli.format;
    match cli.command {
        Command::Make { spec, output } => {
            let l = parse_standard(&spec)?;
            write(&l, &output)?;
        }
        Command::Info { file } => emit(format, &info(&read(&file)?)?),
        Command::Dual { file, output } => write(&read(&file)?.dual()?, &output)?,
        Command::Evensub { file, output } => write(&read(&file)?.even_sublattice()?, &output)?,
        Command::Hat { file, output } => write(&hat(&read(&file)?)?.a_hat, &output)?,
        Command::Unhat { file, output } => write(&unhat(&read(&file)?)?, &output)?,
        Command::Disc { file } => emit(
            format,
            &to_value(&DiscriminantForm::new(&read(&file)?)?.report()),
        ),
        Command::Classify { file } => {
            let l = read(&file)?;
            if !l.is_unimodular() {
                return Err(Failure::Input("lattice is not unimodular".into()));
            }
            emit(
                format,
                &json!({ "class": classify_unimodular(&l)?.to_string() }),
            );
        }
        Command::Correspond {
            a,
            a_hat,
            norms,
            height,
        } => {
            if norms.len() != 2 {
                return Err(Failure::Input("--norms takes two values k,k̂".into()));
            }
            let a = read(&a)?;
            let given = read(&a_hat)?;
            let mut p = hat(&a)?;
            if !p.a_hat.same_space(&given) || !p.a_hat.lattice_equal(&given)? {
                return Err(Failure::Input(
                    "second lattice is not hat of the first".into(),
                ));
            }
            p.a_hat = given;
            let r = vector_correspondence(&p, norms[0], norms[1], height)?;
            emit(
                format,
                &json!({ "passed": r.holds(), "report": to_value(&r) }),
            );
            return Ok(r.holds());
        }
        Command::Verify {
            suite,
            height,
            samples,
            extension_samples,
            seed,
        } => {
            let seed = match seed {
                Some(s) => s,
                None => default_seed()?,
            };
            let (passed, v) = run_suite(suite, height, samples, extension_samples, seed)?;
            emit(
                format,
                &json!({ "suite": suite.name(), "passed": passed, "report": v }),
            );
            return Ok(passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Math(e)) => {
            eprintln!("verification failed: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
