use clap::{Args, Parser, Subcommand, ValueEnum};
use rootsqp::exact::{brute_force, branch_and_bound, BnbConfig, SolveReport};
use rootsqp::instances::{evaluate_objective, gen_grid_instance, gen_mimo_instance, gen_potts_instance};
use rootsqp::reformulate::{basic_reformulation, decode, quarter_reformulation, zonotope_reformulation};
use rootsqp::relax::{relax_and_round, rounding_correlation, RoundingScheme, SdpConfig};
use rootsqp::soscert::DEFAULT_BUDGET;
use rootsqp::ProblemInstance;
use rootsqp_cli::bench::{self, BenchOutput};
use rootsqp_cli::io::{self, Table};
use rootsqp_cli::{sos, CliError, DEFAULT_BRUTE_FORCE_BUDGET};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rootsqp", version, about = "Quadratic optimization over roots of unity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest brute-force enumeration allowed.
    #[arg(long, env = "ROOTSQP_BUDGET", default_value_t = DEFAULT_BRUTE_FORCE_BUDGET)]
    budget: u128,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Potts,
    Mimo,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Basic,
    Zonotope,
    Quarter,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[arg(long, value_enum, default_value = "potts")]
        kind: Kind,
        /// Variables (potts) or transmit antennas (mimo).
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Receive antennas (mimo) or grid dimension (grid).
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Grid side length.
        #[arg(long, default_value_t = 3)]
        side: usize,
        #[arg(long, default_value_t = 10.0)]
        snr: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Solve an instance exactly.
    Solve {
        input: PathBuf,
        /// Defaults to zonotope for even m, basic otherwise.
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long, default_value_t = 50_000_000)]
        nodes: u64,
        #[command(flatten)]
        common: Common,
    },
    /// SDP relaxation followed by randomized rounding.
    Relax {
        input: PathBuf,
        #[arg(long, default_value = "mgon")]
        scheme: String,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo correlation of two rounded rows against 1 − 2θ/π.
    RoundStats {
        #[arg(long, default_value = "quad")]
        scheme: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u32,
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.8, 1.2, 2.0, 2.8])]
        theta: Vec<f64>,
        /// Ambient dimensions of the rows.
        #[arg(long, value_delimiter = ',', default_values_t = [2, 50])]
        d: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Cover, chordality and level-k bound checks.
    VerifySos {
        /// Single n; the full 2..=5 square when both n and m are absent.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Level override; defaults to ⌊n/2⌋ + 1.
        #[arg(long)]
        level: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Basic versus zonotope timing on MIMO detection.
    BenchMimo {
        #[arg(long, default_value_t = 8)]
        d: usize,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_SNRS)]
        snr: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Basic versus zonotope timing on random Potts couplings.
    BenchPotts {
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        instances: usize,
        #[command(flatten)]
        common: Common,
    },
    /// SDP bound over exact ground energy on periodic grids.
    RatioStudy {
        #[arg(long, default_value_t = 2)]
        side: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 8])]
        m: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn load(path: &Path) -> Result<ProblemInstance, CliError> {
    io::read_instance(BufReader::new(File::open(path)?))
}

fn scheme(s: &str) -> Result<RoundingScheme, CliError> {
    Ok(s.parse::<RoundingScheme>()?)
}

fn print_report(out: &mut dyn Write, inst: &ProblemInstance, r: &SolveReport, z: &rootsqp::RootsAssignment) -> Result<(), CliError> {
    let value = evaluate_objective(inst, z)?;
    writeln!(out, "value {value:.12}")?;
    writeln!(out, "exponents {:?}", z.exponents())?;
    writeln!(out, "proven_optimal {}", r.proven_optimal)?;
    writeln!(out, "nodes {}", r.nodes_explored)?;
    writeln!(out, "seconds {:.6}", r.wall_time.as_secs_f64())?;
    Ok(())
}

fn write_bench(out: &BenchOutput, key: &str, path: &Option<PathBuf>) -> Result<(), CliError> {
    out.figure_table(key).write(output(path)?)?;
    if let Some(p) = path {
        let mut detail = p.clone().into_os_string();
        detail.push(".detail.csv");
        out.detail_table(key).write(BufWriter::new(File::create(PathBuf::from(detail))?))?;
    }
    eprintln!("all {} instances matched; basic/zonotope time ratio {:.3}", out.samples.len(), out.speedup());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { kind, n, m, d, side, snr, common } => {
            let inst = match kind {
                Kind::Potts => gen_potts_instance(n, m, -10.0, 10.0, common.seed)?,
                Kind::Mimo => gen_mimo_instance(d, n, m, snr, common.seed)?.0,
                Kind::Grid => gen_grid_instance(side, d, m, common.seed)?.instance,
            };
            let mut w = output(&common.out)?;
            io::write_instance(&inst, &mut w)?;
            writeln!(w)?;
        }
        Command::Solve { input, method, nodes, common } => {
            let inst = load(&input)?;
            let method = method.unwrap_or(if inst.m() % 2 == 0 { Method::Zonotope } else { Method::Basic });
            let mut w = output(&common.out)?;
            if let Method::Brute = method {
                let r = brute_force(&inst, common.budget)?;
                let z = r.argument.as_roots().expect("brute force returns roots").clone();
                return print_report(&mut w, &inst, &r, &z);
            }
            let bqp = match method {
                Method::Basic => basic_reformulation(&inst),
                Method::Zonotope => zonotope_reformulation(&inst)?,
                _ => quarter_reformulation(&inst)?,
            };
            let r = branch_and_bound(&bqp, &BnbConfig { node_budget: nodes, ..BnbConfig::default() })?;
            let z = decode(&bqp, r.argument.as_binary().expect("branch and bound returns a binary point"))?;
            print_report(&mut w, &inst, &r, &z)?;
        }
        Command::Relax { input, scheme: s, trials, common } => {
            let inst = load(&input)?;
            let r = relax_and_round(&inst, scheme(&s)?, trials, common.seed, &SdpConfig::default())?;
            let mut w = output(&common.out)?;
            writeln!(w, "sdp_primal {:.12}", r.sdp.primal_value)?;
            writeln!(w, "sdp_upper {:.12}", r.sdp.upper_bound())?;
            writeln!(w, "sdp_converged {}", r.sdp.converged)?;
            let z = r.report.argument.as_roots().expect("rounding returns roots").clone();
            print_report(&mut w, &inst, &r.report, &z)?;
            if r.report.value > 0.0 {
                writeln!(w, "ratio {:.9}", r.ratio)?;
            } else {
                writeln!(w, "ratio n/a (rounded value is not positive)")?;
            }
        }
        Command::RoundStats { scheme: s, trials, theta, d, common } => {
            let sc = scheme(&s)?;
            let mut t = Table::new(&["ambient", "theta", "mean", "std_error", "expected", "z_score"]);
            let mut worst: f64 = 0.0;
            for &ambient in &d {
                for &th in &theta {
                    let st = rounding_correlation(sc, th, ambient, trials, common.seed)?;
                    worst = worst.max(st.z_score());
                    t.push(vec![
                        Some(ambient as f64),
                        Some(th),
                        Some(st.mean),
                        Some(st.std_error),
                        Some(st.expected),
                        Some(st.z_score()),
                    ]);
                }
            }
            t.write(output(&common.out)?)?;
            if worst > 4.0 {
                return Err(CliError::Assertion(format!("a sample mean is {worst:.2} standard errors off")));
            }
        }
        Command::VerifySos { n, m, level, common } => {
            let cases = match (n, m) {
                (None, None) => sos::default_grid(),
                (Some(n), Some(m)) => vec![(n, m)],
                _ => return Err(CliError::Argument("give both --n and --m, or neither".into())),
            };
            let mut w = output(&common.out)?;
            let mut failed = Vec::new();
            for (n, m) in cases {
                let line = sos::verify_sos(n, m, level, common.seed, DEFAULT_BUDGET, common.budget)?;
                writeln!(w, "{line}")?;
                if !line.passed() {
                    failed.push(format!("(n={n}, m={m})"));
                }
            }
            w.flush()?;
            if !failed.is_empty() {
                return Err(CliError::Assertion(format!("checks failed for {}", failed.join(", "))));
            }
        }
        Command::BenchMimo { d, n, m, snr, instances, common } => {
            let out = bench::bench_mimo(d, n, m, &snr, instances, common.seed, &BnbConfig::default())?;
            write_bench(&out, "snr", &common.out)?;
        }
        Command::BenchPotts { m, n, instances, common } => {
            let sizes = if n.is_empty() { bench::default_potts_sizes(m) } else { n };
            let out = bench::bench_potts(m, &sizes, instances, common.seed, &BnbConfig::default())?;
            write_bench(&out, "n", &common.out)?;
        }
        Command::RatioStudy { side, d, m, instances, common } => {
            let rows = bench::ratio_study(side, d, &m, instances, common.seed, common.budget)?;
            bench::ratio_table(&rows).write(output(&common.out)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rootsqp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
