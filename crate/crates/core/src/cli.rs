//! `comer` command line.
//!
//! Exit codes: 0 for pass/found, 1 for fail/none, 2 for usage errors and
//! violated preconditions.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::AtomicBool;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::checkers::{
    self, check, check_paranoid, search_smallest_until, SearchError, SearchOutcome, Variant,
};
use crate::cosets::{CosetMode, CosetSystem, WitnessKind};
use crate::ra::{self, parse_rep_text, render_rep_file, AtomStructure, RaError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "comer",
    version,
    about = "Coset-construction algebras over prime fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Ramsey,
    Anti,
    Symmetric,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Ramsey => Variant::DirectedRamsey,
            VariantArg::Anti => Variant::DirectedAntiRamsey,
            VariantArg::Symmetric => Variant::SymmetricRamsey,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Sum,
    Antisum,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Smallest modulus for each m in a range, as CSV.
    Search {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        m_min: usize,
        #[arg(long)]
        m_max: usize,
        /// Largest modulus to try (default n^4 + 5, beyond which none exist).
        #[arg(long)]
        p_max: Option<u64>,
        /// Concurrent prime checks (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Fill the elapsed_ms column; output is then no longer reproducible.
        #[arg(long)]
        timing: bool,
    },
    /// Check one prime against one variant.
    Check {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: u64,
        /// Check all n² coset pairs by enumeration instead of per shift.
        #[arg(long)]
        paranoid: bool,
    },
    /// Dump the per-shift sum-class table.
    Cycles {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        /// Dump every (i, j, l) with X_l ⊆ X_i + X_j.
        #[arg(long)]
        full: bool,
    },
    /// Least solution of x + y = z (sum) or x + y = -z (antisum) in X_0.
    Witness {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// Verify a representation file.
    Verify {
        #[arg(long)]
        file: PathBuf,
        /// Also confirm every composition with explicit field elements.
        #[arg(long)]
        paranoid: bool,
    },
    /// Search for an assignment of a file's atoms to unions of cosets.
    Embed {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: u64,
        /// Most classes any single atom may receive (default n).
        #[arg(long)]
        max_width: Option<usize>,
    },
    /// CSV `m,p` of smallest moduli.
    Plotdata {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        m_min: usize,
        #[arg(long)]
        m_max: usize,
        #[arg(long)]
        p_max: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Output sinks and the interrupt flag for one invocation.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
    pub stop: &'a AtomicBool,
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(io.err, "{rendered}");
            } else {
                let _ = write!(io.out, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli.command, io) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_USAGE
        }
    }
}

enum CliError {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn dispatch(cmd: Command, io: &mut Io<'_>) -> Result<i32, CliError> {
    match cmd {
        Command::Search {
            variant,
            m_min,
            m_max,
            p_max,
            jobs,
            out,
            timing,
        } => {
            let sweep = Sweep {
                variant: variant.into(),
                m_min,
                m_max,
                p_max,
                jobs,
            };
            sweep.run(&out, io, Csv::Records { timing })
        }
        Command::Plotdata {
            variant,
            m_min,
            m_max,
            p_max,
            jobs,
            out,
        } => {
            let sweep = Sweep {
                variant: variant.into(),
                m_min,
                m_max,
                p_max,
                jobs,
            };
            sweep.run(&out, io, Csv::Plot)
        }
        Command::Check {
            variant,
            m,
            p,
            paranoid,
        } => {
            let v = Variant::from(variant);
            let report = if paranoid {
                check_paranoid(p, m, v)
            } else {
                check(p, m, v)
            }
            .map_err(usage)?;
            writeln!(io.out, "{report}")?;
            Ok(if report.pass() { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Cycles { p, n, full } => {
            let cs = CosetSystem::for_prime(p, n, CosetMode::Any).map_err(usage)?;
            let t = cs.sum_class_table();
            writeln!(
                io.out,
                "# p={p} n={n} k={} g={} neg_one_class={}",
                cs.k(),
                cs.ctx().g(),
                cs.neg_one_class()
            )?;
            if full {
                writeln!(io.out, "# i j l  (X_l ⊆ X_i + X_j)")?;
                for (i, j, l) in t.cycle_list() {
                    writeln!(io.out, "{i} {j} {l}")?;
                }
            } else {
                writeln!(io.out, "# shift zero mask classes")?;
                for s in 0..n {
                    let set = t.shift_classes(s);
                    let list: Vec<String> = set.iter().map(|c| c.to_string()).collect();
                    writeln!(
                        io.out,
                        "{s} {} {} {}",
                        u8::from(t.zero(s)),
                        set.to_hex(),
                        list.join(",")
                    )?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Witness { p, n, kind } => {
            let cs = CosetSystem::for_prime(p, n, CosetMode::Any).map_err(usage)?;
            let kind = match kind {
                KindArg::Sum => WitnessKind::Sum,
                KindArg::Antisum => WitnessKind::AntiSum,
            };
            match cs.find_witness(kind) {
                Some((x, y, z)) => {
                    writeln!(io.out, "{x} {y} {z}")?;
                    Ok(EXIT_OK)
                }
                None => {
                    writeln!(io.out, "none")?;
                    Ok(EXIT_FAIL)
                }
            }
        }
        Command::Verify { file, paranoid } => verify_file(&file, paranoid, io),
        Command::Embed {
            file,
            variant,
            m,
            p,
            max_width,
        } => embed_file(&file, variant.into(), m, p, max_width, io),
    }
}

fn read_structure(path: &Path) -> Result<(ra::RepFile, AtomStructure), CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let file = parse_rep_text(&text).map_err(usage)?;
    let structure = file.structure().map_err(usage)?;
    Ok((file, structure))
}

fn verify_file(path: &Path, paranoid: bool, io: &mut Io<'_>) -> Result<i32, CliError> {
    let (file, structure) = read_structure(path)?;
    let rep = file.representation().map_err(usage)?;
    let cs = CosetSystem::for_prime(rep.p, rep.n, CosetMode::Any).map_err(usage)?;
    let report = if paranoid {
        ra::verify_paranoid(&structure, &rep, &cs)
    } else {
        ra::verify(&structure, &rep, &cs.sum_class_table())
    }
    .map_err(|e: RaError| usage(e))?;
    write!(io.out, "{}", report.render(&structure))?;
    let flexible: Vec<&str> = structure
        .flexible_atoms()
        .into_iter()
        .map(|a| structure.name(a))
        .collect();
    writeln!(io.out, "# flexible atoms: {}", flexible.join(" "))?;
    Ok(if report.pass() { EXIT_OK } else { EXIT_FAIL })
}

fn embed_file(
    path: &Path,
    v: Variant,
    m: usize,
    p: u64,
    max_width: Option<usize>,
    io: &mut Io<'_>,
) -> Result<i32, CliError> {
    let (_, structure) = read_structure(path)?;
    let cs = checkers::coset_system(p, m, v).map_err(usage)?;
    let t = cs.sum_class_table();
    let report = checkers::check_table(&t, v);
    if !report.pass() {
        return Err(usage(format!(
            "p = {p} does not give a {v} algebra in {m} colors: {report}"
        )));
    }
    match ra::embed(&structure, &t, p, max_width.unwrap_or(cs.n())) {
        Some(rep) => {
            write!(io.out, "{}", render_rep_file(&structure, &rep))?;
            Ok(EXIT_OK)
        }
        None => {
            writeln!(io.out, "none")?;
            Ok(EXIT_FAIL)
        }
    }
}

enum Csv {
    Records { timing: bool },
    Plot,
}

struct Sweep {
    variant: Variant,
    m_min: usize,
    m_max: usize,
    p_max: Option<u64>,
    jobs: Option<usize>,
}

impl Sweep {
    fn run(&self, path: &Path, io: &mut Io<'_>, format: Csv) -> Result<i32, CliError> {
        if self.m_min == 0 || self.m_min > self.m_max {
            return Err(usage("need 1 <= --m-min <= --m-max"));
        }
        if let Some(p) = self.p_max {
            if p < 3 {
                return Err(usage("--p-max must be at least 3"));
            }
        }
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            if j == 0 {
                return Err(usage("--jobs must be positive"));
            }
            builder = builder.num_threads(j);
        }
        let pool = builder.build().map_err(usage)?;
        let mut w = BufWriter::new(
            File::create(path).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        );
        match format {
            Csv::Records { .. } => writeln!(w, "variant,m,n,p,k,g,elapsed_ms")?,
            Csv::Plot => writeln!(w, "m,p")?,
        }
        w.flush()?;
        let mut all_found = true;
        for m in self.m_min..=self.m_max {
            let started = Instant::now();
            let outcome =
                pool.install(|| search_smallest_until(m, self.variant, self.p_max, io.stop));
            let outcome = match outcome {
                Ok(o) => o,
                Err(SearchError::Interrupted) => {
                    writeln!(w, "# incomplete")?;
                    w.flush()?;
                    writeln!(
                        io.err,
                        "interrupted at m = {m}; partial results in {}",
                        path.display()
                    )?;
                    return Ok(EXIT_FAIL);
                }
                Err(SearchError::Check(e)) => return Err(usage(e)),
            };
            all_found &= outcome.p.is_some();
            match format {
                Csv::Records { timing } => {
                    let elapsed = timing.then(|| started.elapsed().as_millis());
                    writeln!(w, "{}", record_row(&outcome, elapsed))?
                }
                Csv::Plot => writeln!(w, "{},{}", m, opt(outcome.p))?,
            }
            w.flush()?;
            writeln!(
                io.out,
                "m={m} p={} (checked {} candidates up to {})",
                outcome.p.map_or("none".to_string(), |p| p.to_string()),
                outcome.checked,
                outcome.bound
            )?;
        }
        Ok(if all_found { EXIT_OK } else { EXIT_FAIL })
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One `variant,m,n,p,k,g,elapsed_ms` line; absent values are empty fields.
pub fn record_row(o: &SearchOutcome, elapsed_ms: Option<u128>) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        o.variant,
        o.m,
        o.n,
        opt(o.p),
        opt(o.k()),
        opt(o.g),
        opt(elapsed_ms)
    )
}
