//! Command-line front end. [`dispatch`] parses arguments, runs one
//! subcommand and returns the process exit code: 0 on success, 1 when the
//! computation fails, 2 for usage errors.
//!
//! Tabular output is CSV with `#` metadata lines first (tool version, the
//! resolved flags and the seed), floats at 12 significant digits and LF
//! line endings.

use clap::{Args, Parser, Subcommand};
use misoic::channel::{self, trial_seed, Channel, ChannelError, User};
use misoic::heuristic::heuristic_choice;
use misoic::montecarlo::{self, db_to_linear, McConfig, MonteCarloError, SweepRow};
use misoic::mrt::{dd_mrt_check, nd_mrt_check, MrtVerdict};
use misoic::oracle::{oracle_max, GridSpec, OracleError};
use misoic::pareto::{linspace, power_region_boundary, region_frontier, region_sweep_detailed, GridSizes, ParetoError};
use misoic::sumrate::{max_sum_rate, SumRateError};
use misoic::DecodingStructure;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error(transparent)]
    SumRate(#[from] SumRateError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    MonteCarlo(#[from] MonteCarloError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Parser)]
#[command(name = "misoic", version, about = "Beamforming and rate-region experiments for the two-user MISO interference channel")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Args, Clone)]
struct Common {
    /// Transmit antennas per transmitter.
    #[arg(long, global = true, default_value_t = 3)]
    n: usize,
    /// Transmit power constraint in dB (noise power is one).
    #[arg(long = "snr-db", global = true, default_value_t = 10.0, allow_negative_numbers = true)]
    snr_db: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte-Carlo trials, or number of channels for `mrt`.
    #[arg(long, global = true, default_value_t = 500)]
    trials: usize,
    #[arg(long = "grid-lambda", global = true, default_value_t = 201)]
    grid_lambda: usize,
    #[arg(long = "grid-phase", global = true, default_value_t = 64)]
    grid_phase: usize,
    #[arg(long = "grid-power", global = true, default_value_t = 21)]
    grid_power: usize,
    /// Channel JSON file; without it an i.i.d. channel is drawn from `--seed`.
    #[arg(long, global = true)]
    channel: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// NN, ND, DN or DD (case-insensitive).
    #[arg(long, global = true)]
    structure: Option<DecodingStructure>,
    /// Worker thread cap; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Draw a channel and write it as JSON.
    Gen {
        /// Draw from the symmetric ensemble instead of i.i.d.
        #[arg(long)]
        symmetric: bool,
        /// SIR `||h_ii||^2 / ||h_ji||^2` in dB (symmetric only).
        #[arg(long = "sir-db", default_value_t = 0.0, allow_negative_numbers = true)]
        sir_db: f64,
        /// Angle between direct and cross channels, in units of pi.
        #[arg(long = "theta-pi", default_value_t = 0.25)]
        theta_pi: f64,
    },
    /// Rate pairs over the structure's Pareto-family grid.
    Region {
        /// Only emit the Pareto frontier of the sweep.
        #[arg(long)]
        frontier: bool,
    },
    /// Received power pairs `(g_ii, g_ji)` of one transmitter.
    Powerregion {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        user: u8,
    },
    /// Maximum sum rate of each structure and overall.
    Sumrate,
    /// MRT optimality conditions, one row per inequality chain.
    Mrt,
    /// Brute-force grid maximum of the sum rate.
    Oracle {
        /// Search all unit vectors (N = 2 only) instead of the 2-D subspaces.
        #[arg(long = "full-sphere")]
        full_sphere: bool,
    },
    /// Fixed list of matched-filter and zero-forcing pairs plus TDMA.
    Heuristic,
    /// Frequency of the ND grid argmax at each MRT pair versus SNR.
    McFreq {
        #[arg(long = "snr-list", value_delimiter = ',', default_value = "0,10,20,30,40", allow_negative_numbers = true)]
        snr_list: Vec<f64>,
    },
    /// Mean relative sum-rate loss of MRT versus SNR.
    McLoss {
        #[arg(long = "snr-list", value_delimiter = ',', default_value = "0,10,20,30,40", allow_negative_numbers = true)]
        snr_list: Vec<f64>,
    },
    /// Symmetric channels swept over SIR at fixed SNR.
    SweepSir {
        #[arg(long = "theta-pi", default_value_t = 0.05)]
        theta_pi: f64,
        /// SIR points in dB.
        #[arg(long = "sir-db-list", value_delimiter = ',', default_value = "20,15,10,5,0,-5,-10,-15,-20", allow_negative_numbers = true)]
        sir_db_list: Vec<f64>,
    },
    /// Symmetric channels swept over SNR at fixed SIR.
    SweepSnr {
        #[arg(long = "theta-pi", default_value_t = 0.05)]
        theta_pi: f64,
        #[arg(long = "sir-db", default_value_t = 0.0, allow_negative_numbers = true)]
        sir_db: f64,
        #[arg(long = "snr-list", value_delimiter = ',', default_value = "-10,0,10,20,30", allow_negative_numbers = true)]
        snr_list: Vec<f64>,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Gen { .. } => "gen",
            Cmd::Region { .. } => "region",
            Cmd::Powerregion { .. } => "powerregion",
            Cmd::Sumrate => "sumrate",
            Cmd::Mrt => "mrt",
            Cmd::Oracle { .. } => "oracle",
            Cmd::Heuristic => "heuristic",
            Cmd::McFreq { .. } => "mc-freq",
            Cmd::McLoss { .. } => "mc-loss",
            Cmd::SweepSir { .. } => "sweep-sir",
            Cmd::SweepSnr { .. } => "sweep-snr",
        }
    }
}

/// 12 significant digits.
pub fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct Ctx<'a> {
    common: &'a Common,
    cmd: &'a Cmd,
    argv: &'a [String],
}

impl Ctx<'_> {
    fn pmax(&self) -> f64 {
        db_to_linear(self.common.snr_db)
    }

    fn channel(&self) -> Result<Channel, CliError> {
        match &self.common.channel {
            Some(p) => Ok(channel::load(p)?),
            None => Ok(channel::gen_iid(self.common.n, self.common.seed)?),
        }
    }

    fn structure(&self) -> Result<DecodingStructure, CliError> {
        self.common.structure.ok_or_else(|| CliError::Invalid(format!("`{}` needs --structure", self.cmd.name())))
    }

    fn structures(&self) -> Vec<DecodingStructure> {
        self.common.structure.map_or_else(|| DecodingStructure::ALL.to_vec(), |s| vec![s])
    }

    fn mc(&self) -> McConfig {
        McConfig { trials: self.common.trials, seed: self.common.seed, n_lambda: self.common.grid_lambda }
    }

    /// The `#` lines that open every CSV output.
    fn stamp(&self) -> String {
        let c = self.common;
        let mut s = String::new();
        let _ = writeln!(s, "# misoic {VERSION} {}", self.cmd.name());
        let _ = writeln!(s, "# argv: {}", self.argv.join(" "));
        let _ = writeln!(
            s,
            "# flags: n={} snr_db={} seed={} trials={} grid_lambda={} grid_phase={} grid_power={} channel={} structure={}",
            c.n,
            c.snr_db,
            c.seed,
            c.trials,
            c.grid_lambda,
            c.grid_phase,
            c.grid_power,
            c.channel.as_ref().map_or("-".into(), |p| p.display().to_string()),
            c.structure.map_or("-", |s| s.name()),
        );
        let _ = writeln!(s, "# seed: {}", c.seed);
        s
    }

    fn emit(&self, body: &str) -> Result<(), CliError> {
        match &self.common.out {
            Some(p) => std::fs::write(p, body).map_err(|e| CliError::Io { path: p.display().to_string(), source: e }),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(body.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })
            }
        }
    }
}

fn verdict_rows(s: &mut String, seed: &str, v: &MrtVerdict) {
    for c in &v.chains {
        let _ = writeln!(
            s,
            "{seed},{},{},{},{},{},{}",
            v.structure,
            v.strategy.name(),
            v.holds,
            fmt_f(c.lhs),
            fmt_f(c.mid),
            fmt_f(c.rhs)
        );
    }
}

fn sweep_rows(s: &mut String, rows: &[SweepRow], x_of: impl Fn(f64) -> f64) {
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f(x_of(r.x)),
            r.trials,
            fmt_f(r.per_structure[0]),
            fmt_f(r.per_structure[1]),
            fmt_f(r.per_structure[2]),
            fmt_f(r.per_structure[3]),
            fmt_f(r.tdma),
            fmt_f(r.max),
            fmt_f(r.heuristic),
            r.best_label()
        );
    }
}

fn run(ctx: &Ctx) -> Result<(), CliError> {
    let c = ctx.common;
    let grids = GridSizes { n_lambda: c.grid_lambda, n_power: c.grid_power };
    let mut s = String::new();
    match ctx.cmd {
        Cmd::Gen { symmetric, sir_db, theta_pi } => {
            let ch = if *symmetric {
                channel::gen_symmetric(c.n, db_to_linear(*sir_db), theta_pi * std::f64::consts::PI, c.seed)?
            } else {
                channel::gen_iid(c.n, c.seed)?
            };
            // JSON has no comments; the stamp goes into an extra key that
            // readers ignore.
            let body = channel::to_json(&ch);
            let meta = format!(
                "{{\n  \"generator\": \"misoic {VERSION}\",\n  \"seed\": {},\n  \"ensemble\": \"{}\",",
                c.seed,
                if *symmetric { format!("symmetric sir_db={sir_db} theta_pi={theta_pi}") } else { "iid".into() }
            );
            s = body.replacen('{', &meta, 1);
        }
        Cmd::Region { frontier } => {
            let ch = ctx.channel()?;
            s.push_str(&ctx.stamp());
            s.push_str("structure,lambda1,lambda2,p1,p2,r1,r2\n");
            for st in ctx.structures() {
                let pts = if *frontier {
                    region_frontier(st, &ch, ctx.pmax(), grids)?
                } else {
                    region_sweep_detailed(st, &ch, ctx.pmax(), grids)?
                };
                for p in pts {
                    let _ = writeln!(
                        s,
                        "{st},{},{},{},{},{},{}",
                        fmt_f(p.lambda1),
                        fmt_f(p.lambda2),
                        fmt_f(p.p1),
                        fmt_f(p.p2),
                        fmt_f(p.rate.r1),
                        fmt_f(p.rate.r2)
                    );
                }
            }
        }
        Cmd::Powerregion { user } => {
            let ch = ctx.channel()?;
            let u = if *user == 1 { User::One } else { User::Two };
            let pts = power_region_boundary(&ch, u, ctx.pmax(), grids)?;
            let lambdas = linspace(0.0, 1.0, grids.n_lambda);
            let powers = linspace(0.0, ctx.pmax(), grids.n_power);
            s.push_str(&ctx.stamp());
            s.push_str("user,lambda,p,g_direct,g_cross\n");
            for (k, (d, x)) in pts.iter().enumerate() {
                let l = lambdas[k / powers.len()];
                let p = powers[k % powers.len()];
                let _ = writeln!(s, "{user},{},{},{},{}", fmt_f(l), fmt_f(p), fmt_f(*d), fmt_f(*x));
            }
        }
        Cmd::Sumrate => {
            let ch = ctx.channel()?;
            let m = max_sum_rate(&ch, ctx.pmax(), c.grid_lambda)?;
            s.push_str(&ctx.stamp());
            s.push_str("structure,rate,lambda1,lambda2\n");
            for b in m.per_structure.iter().chain(std::iter::once(&m.best)) {
                let label = if std::ptr::eq(b, &m.best) { format!("max:{}", b.structure) } else { b.structure.to_string() };
                let _ = writeln!(s, "{label},{},{},{}", fmt_f(b.rate), fmt_f(b.tuple.lambda1), fmt_f(b.tuple.lambda2));
            }
        }
        Cmd::Mrt => {
            // One channel from --channel, or --trials seeded draws.
            let chans: Vec<(String, Channel)> = match &c.channel {
                Some(_) => vec![(String::new(), ctx.channel()?)],
                None => (0..c.trials as u64)
                    .map(|k| {
                        let seed = trial_seed(c.seed, k);
                        channel::gen_iid(c.n, seed).map(|ch| (seed.to_string(), ch))
                    })
                    .collect::<Result<_, _>>()?,
            };
            s.push_str(&ctx.stamp());
            s.push_str("channel_seed,structure,strategy,holds,lhs,mid,rhs\n");
            let want = |st: DecodingStructure| c.structure.map_or(true, |x| x == st);
            for (seed, ch) in &chans {
                if want(DecodingStructure::ND) {
                    let v = nd_mrt_check(ch, ctx.pmax());
                    verdict_rows(&mut s, seed, &v.selfish);
                    verdict_rows(&mut s, seed, &v.interference);
                }
                if want(DecodingStructure::DD) {
                    let v = dd_mrt_check(ch, ctx.pmax());
                    verdict_rows(&mut s, seed, &v.selfish_pair);
                    verdict_rows(&mut s, seed, &v.interference_pair);
                    for p in &v.per_user {
                        verdict_rows(&mut s, seed, p);
                    }
                }
            }
        }
        Cmd::Oracle { full_sphere } => {
            let ch = ctx.channel()?;
            let spec = if *full_sphere {
                GridSpec::full_sphere(c.grid_lambda, c.grid_phase, c.grid_power)
            } else {
                GridSpec::subspace(c.grid_lambda, c.grid_phase, c.grid_power)
            };
            s.push_str(&ctx.stamp());
            s.push_str("structure,rate,first1,first2,phi1,phi2,p1,p2\n");
            for st in ctx.structures() {
                let m = oracle_max(st, &ch, &spec, ctx.pmax())?;
                let a = &m.arg;
                let _ = writeln!(
                    s,
                    "{st},{},{},{},{},{},{},{}",
                    fmt_f(m.rate),
                    fmt_f(a.first[0]),
                    fmt_f(a.first[1]),
                    fmt_f(a.phase[0]),
                    fmt_f(a.phase[1]),
                    fmt_f(a.p1),
                    fmt_f(a.p2)
                );
            }
        }
        Cmd::Heuristic => {
            let ch = ctx.channel()?;
            let h = heuristic_choice(&ch, ctx.pmax())?;
            s.push_str(&ctx.stamp());
            s.push_str("label,structure,rate,chosen\n");
            for (k, e) in h.table.iter().enumerate() {
                let st = e.structure.map_or("TDMA", |x| x.name());
                let _ = writeln!(s, "{},{st},{},{}", e.label, fmt_f(e.rate), k == h.best);
            }
        }
        Cmd::McFreq { snr_list } => {
            let rows = montecarlo::mrt_frequency_vs_snr(c.n, snr_list, &ctx.mc())?;
            s.push_str(&ctx.stamp());
            s.push_str("snr_db,trials,interference_pair,selfish_pair\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    fmt_f(r.snr_db),
                    r.trials,
                    fmt_f(r.interference_pair),
                    fmt_f(r.selfish_pair)
                );
            }
        }
        Cmd::McLoss { snr_list } => {
            let st = ctx.structure()?;
            if !matches!(st, DecodingStructure::ND | DecodingStructure::DD) {
                return Err(CliError::Invalid(format!("mc-loss supports ND and DD, not {st}")));
            }
            let rows = montecarlo::rate_loss_vs_snr(st, c.n, snr_list, &ctx.mc())?;
            s.push_str(&ctx.stamp());
            s.push_str("structure,snr_db,trials,mean_relative_loss\n");
            for r in rows {
                let _ = writeln!(s, "{},{},{},{}", r.structure, fmt_f(r.snr_db), r.trials, fmt_f(r.mean_relative_loss));
            }
        }
        Cmd::SweepSir { theta_pi, sir_db_list } => {
            let sirs: Vec<f64> = sir_db_list.iter().map(|&d| db_to_linear(d)).collect();
            let rows = montecarlo::sweep_sir(c.n, theta_pi * std::f64::consts::PI, &sirs, c.snr_db, &ctx.mc())?;
            s.push_str(&ctx.stamp());
            s.push_str("sir_db,trials,nn,nd,dn,dd,tdma,max,heuristic,best\n");
            sweep_rows(&mut s, &rows, |x| 10.0 * x.log10());
        }
        Cmd::SweepSnr { theta_pi, sir_db, snr_list } => {
            let rows =
                montecarlo::sweep_snr(c.n, theta_pi * std::f64::consts::PI, db_to_linear(*sir_db), snr_list, &ctx.mc())?;
            s.push_str(&ctx.stamp());
            s.push_str("snr_db,trials,nn,nd,dn,dd,tdma,max,heuristic,best\n");
            sweep_rows(&mut s, &rows, |x| x);
        }
    }
    ctx.emit(&s)
}

/// Parse `argv` (program name first) and run. Returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let ctx = Ctx { common: &cli.common, cmd: &cli.cmd, argv: &argv[1..] };
    let result = match cli.common.threads {
        Some(0) => Err(CliError::Invalid("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Pool(e.to_string()))
            .and_then(|pool| pool.install(|| run(&ctx))),
        None => run(&ctx),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
