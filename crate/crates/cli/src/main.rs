use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use oppnet::config::{load_config, parse_duration};
use oppnet::engine::Simulation;
use oppnet::matrix::{run_matrix, write_outputs, MatrixFilter};
use oppnet::metrics::{emit_svg_chart, read_csv, Metric};
use oppnet::routing::{build_router, Observed, ProtocolKind};
use oppnet::social::write_social_dump;
use oppnet::sources::{
    convert_pairwise, gen_community_schedule, gen_random_waypoint, gen_workload, parse_roster, select_pairs,
    write_roster, write_trace, write_workload, CommunityParams, WaypointParams, WorkloadParams,
};
use oppnet::types::{Roster, SimTime};
use oppnet::Error;

#[derive(Parser)]
#[command(name = "oppnet", version, about = "Opportunistic network routing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Community,
    RandomWaypoint,
}

#[derive(Subcommand)]
enum Command {
    /// Run every protocol × TTL × seed cell of a scenario and write the
    /// aggregate CSV, charts and manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the scenario's.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        protocols: Option<Vec<ProtocolKind>>,
        #[arg(long, value_delimiter = ',', value_parser = parse_duration)]
        ttl: Option<Vec<SimTime>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Generate a synthetic contact trace and its roster.
    GenContacts {
        #[arg(long, value_enum, default_value = "community")]
        generator: Generator,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        nodes: Option<u32>,
        #[arg(long, value_parser = parse_duration)]
        duration: Option<SimTime>,
        /// Community generator: number of groups.
        #[arg(long)]
        groups: Option<u32>,
        /// Community generator: chance of an evening activity per node-day.
        #[arg(long)]
        evening_probability: Option<f64>,
        /// Random waypoint: radio range in metres.
        #[arg(long)]
        radio_range: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the roster (default: next to the trace).
        #[arg(long)]
        roster_out: Option<PathBuf>,
    },
    /// Generate a message workload file.
    GenWorkload {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Roster to draw nodes from; otherwise `--nodes` unlabelled ids.
        #[arg(long)]
        roster: Option<PathBuf>,
        #[arg(long, default_value_t = 36)]
        nodes: u32,
        #[arg(long, default_value_t = 500)]
        per_day: u32,
        #[arg(long, default_value_t = 12)]
        days: u64,
        #[arg(long, default_value_t = 1_000)]
        size_min: u64,
        #[arg(long, default_value_t = 100_000)]
        size_max: u64,
        /// Number of (src, dst) pairs to draw from (default: all).
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a whitespace-separated `a b start end` contact list to the
    /// canonical trace format.
    ConvertTrace {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Replay a scenario and dump every node's social state at given times.
    DumpSocial {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "epidemic")]
        protocol: ProtocolKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Snapshot instants (default: end of the run).
        #[arg(long, value_delimiter = ',', value_parser = parse_duration)]
        at: Option<Vec<SimTime>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render charts from an aggregate CSV.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Invalid(Error),
    Partial(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Partial(n)) => {
            eprintln!("error: {n} cell(s) failed; see manifest.toml");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run {
            config,
            out,
            jobs,
            protocols,
            ttl,
            seeds,
        } => {
            let cfg = load_config(&config)?;
            let dir = out
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("out"));
            let filter = MatrixFilter {
                protocols,
                ttls: ttl,
                seeds,
            };
            let outcome = run_matrix(&cfg, &filter, jobs)?;
            for (cell, err) in &outcome.failures {
                eprintln!("cell {} ttl={} seed={} failed: {err}", cell.protocol, cell.ttl, cell.seed);
            }
            let files = write_outputs(&cfg, &outcome, &dir)?;
            for f in files {
                println!("{}", f.display());
            }
            if outcome.failures.is_empty() {
                Ok(())
            } else {
                Err(Failure::Partial(outcome.failures.len()))
            }
        }
        Command::GenContacts {
            generator,
            seed,
            nodes,
            duration,
            groups,
            evening_probability,
            radio_range,
            out,
            roster_out,
        } => {
            let seq = match generator {
                Generator::Community => {
                    let mut p = CommunityParams::default();
                    p.node_count = nodes.unwrap_or(p.node_count);
                    p.duration = duration.unwrap_or(p.duration);
                    p.group_count = groups.unwrap_or(p.group_count);
                    p.evening_probability = evening_probability.unwrap_or(p.evening_probability);
                    gen_community_schedule(&p, seed)?
                }
                Generator::RandomWaypoint => {
                    let mut p = WaypointParams::default();
                    p.node_count = nodes.unwrap_or(p.node_count);
                    p.duration = duration.unwrap_or(p.duration);
                    p.radio_range = radio_range.unwrap_or(p.radio_range);
                    gen_random_waypoint(&p, seed)?
                }
            };
            write_trace(&seq, &out)?;
            let roster_path = roster_out.unwrap_or_else(|| out.with_extension("roster.csv"));
            write_roster(seq.roster(), &roster_path)?;
            println!("{} events, {} nodes", seq.events().len(), seq.roster().len());
            Ok(())
        }
        Command::GenWorkload {
            seed,
            roster,
            nodes,
            per_day,
            days,
            size_min,
            size_max,
            pairs,
            out,
        } => {
            let roster = match roster {
                Some(p) => parse_roster(p)?,
                None => Roster::unlabeled(nodes),
            };
            let params = WorkloadParams {
                msgs_per_day: per_day,
                size_min,
                size_max,
                duration: days * 86_400,
            };
            let w = gen_workload(&params, &select_pairs(&roster, pairs, seed), seed)?;
            write_workload(&w, &out)?;
            println!("{} messages", w.len());
            Ok(())
        }
        Command::ConvertTrace { input, output } => {
            let n = convert_pairwise(&input, &output)?;
            println!("{n} events");
            Ok(())
        }
        Command::DumpSocial {
            config,
            protocol,
            seed,
            at,
            out,
        } => {
            let cfg = load_config(&config)?;
            let contacts = cfg.contacts(seed)?;
            let workload = cfg.workload(seed, &contacts)?;
            let params = cfg.protocol_params();
            let roster = contacts.roster().clone();
            let router = Observed::new(build_router(protocol, &params, &roster), &roster, params.social);
            let engine = cfg.engine_config(cfg.ttls[0], &contacts);
            let mut sim = Simulation::new(engine, &contacts, &workload, Box::new(router))?;
            let mut times = at.unwrap_or_else(|| vec![engine.end_time]);
            times.sort_unstable();
            let mut rows = Vec::new();
            for t in times {
                sim.run_until(t);
                let social = sim.router().social().expect("observed router keeps social state");
                rows.extend(social.snapshot(&roster, t));
            }
            write_social_dump(&rows, &out)?;
            println!("{} rows", rows.len());
            Ok(())
        }
        Command::Plot { input, out } => {
            let rows = read_csv(&input)?;
            if rows.is_empty() {
                return Err(Error::EmptyAggregate.into());
            }
            std::fs::create_dir_all(&out).map_err(|e| Failure::Invalid(io_error(&out, e)))?;
            for metric in Metric::ALL {
                let path = out.join(format!("{metric}.svg"));
                emit_svg_chart(&rows, metric, &path)?;
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}
