use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use attractor_class::example::{
    check_inequalities, halton_point, log_grid, verify_elliptic_saddle,
    verify_global_attraction, verify_instability, y_map, DEFAULT_BUDGET, DEFAULT_STEP,
};
use attractor_class::synthesis::{render_portrait, synthesize_configuration, PortraitOptions};
use attractor_class::{
    canonical_feasible_set, decide_equivalence, parse_configuration, Configuration, FeasibleSet,
    OrientationChoice,
};
use clap::{Parser, Subcommand};

const THREADS_VAR: &str = "ATTRACTOR_CLASS_THREADS";

#[derive(Parser)]
#[command(name = "attractor-class", version, about = "Invariants and portraits of flows with a global attractor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a file holds a valid feasible set.
    Validate {
        #[arg(long)]
        feasible: PathBuf,
    },
    /// Canonical feasible set of a configuration.
    Canonical {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "ccw")]
        orientation: OrientationChoice,
        /// Orbit id of the heteroclinic separatrix read last.
        #[arg(long)]
        sigma: String,
    },
    /// Decide equivalence of two configurations (or feasible sets).
    Equiv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Print the choices that realize the equivalence.
        #[arg(long)]
        witness: bool,
    },
    /// Configuration realizing a feasible set.
    Synth {
        #[arg(long)]
        feasible: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Phase portrait of the flow realizing a feasible set.
    Portrait {
        #[arg(long)]
        feasible: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Metadata document.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 3.0)]
        ymax: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        #[arg(long, default_value_t = 12.0)]
        arc: f64,
    },
    /// The explicit polynomial example.
    Example {
        #[command(subcommand)]
        command: ExampleCommand,
    },
}

#[derive(Subcommand)]
enum ExampleCommand {
    /// Numerical checks, reported in TAP format.
    Verify {
        #[arg(long)]
        all: bool,
    },
    /// Crossing map samples (y0, Y(y0)) on a log-spaced grid.
    YMap {
        #[arg(long, default_value_t = 1e-3)]
        from: f64,
        #[arg(long, default_value_t = 10.0)]
        to: f64,
        #[arg(long, default_value_t = 60)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        /// Output file; standard output when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_feasible(path: &Path) -> Result<FeasibleSet> {
    FeasibleSet::from_json(&read(path)?).with_context(|| format!("{}", path.display()))
}

/// A configuration file, or a feasible set file turned into its synthesized
/// configuration.
fn load_configuration(path: &Path) -> Result<Configuration> {
    let text = read(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON", path.display()))?;
    if value.get("marks").is_some() {
        parse_configuration(&text).with_context(|| format!("{}", path.display()))
    } else {
        let l = FeasibleSet::from_json(&text).with_context(|| format!("{}", path.display()))?;
        Ok(synthesize_configuration(&l))
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_VAR} must be a non-negative integer, got {raw:?}"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

struct Tap {
    lines: Vec<(bool, String)>,
}

impl Tap {
    fn check(&mut self, pass: bool, name: impl Into<String>) {
        self.lines.push((pass, name.into()));
    }

    fn print(&self) -> bool {
        println!("TAP version 13");
        println!("1..{}", self.lines.len());
        for (i, (pass, name)) in self.lines.iter().enumerate() {
            println!("{}ok {} - {}", if *pass { "" } else { "not " }, i + 1, name);
        }
        self.lines.iter().all(|l| l.0)
    }
}

fn verify_all() -> Result<bool> {
    let mut tap = Tap { lines: Vec::new() };
    let grid = log_grid(1e-3, 10.0, 60);
    let ys = y_map(&grid, DEFAULT_STEP, DEFAULT_BUDGET)?;
    let min = ys.iter().min_by(|a, b| a.y.total_cmp(&b.y)).context("empty grid")?;
    tap.check(
        ys.iter().all(|p| p.y > 0.25),
        format!("Y(y0) > 1/4 on 60 log-spaced y0 in [1e-3, 10] # min {:.6}", min.y),
    );
    tap.check(
        (0.80..=0.86).contains(&min.y),
        format!("min Y in [0.80, 0.86] # measured {:.6} at y0 = {:.3e}", min.y, min.y0),
    );

    let samples: Vec<_> = (1..=100).map(|i| halton_point(i, -5.0, 5.0)).collect();
    let att = verify_global_attraction(&samples, 0.05, DEFAULT_STEP, DEFAULT_BUDGET);
    let reached = att.entries.iter().filter(|e| e.reached).count();
    tap.check(att.pass, format!("global attraction from 100 Halton points in [-5,5]^2 # {reached}/100"));

    let ins = verify_instability([0.0, 1e-4], 0.25, 0.05, DEFAULT_STEP, DEFAULT_BUDGET)?;
    tap.check(
        ins.pass,
        format!("orbit from (0, 1e-4) leaves r = 0.25 before entering r = 0.05 # max r {:.4}", ins.max_radius),
    );

    for c in check_inequalities(200).checks {
        let pass = c.pass();
        tap.check(pass, format!("{} # {} violations in {} samples", c.name, c.violations.len(), c.samples));
    }
    for c in verify_elliptic_saddle(DEFAULT_STEP, DEFAULT_BUDGET)?.checks {
        tap.check(c.pass, format!("{} # {}", c.name, c.detail));
    }
    Ok(tap.print())
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::Validate { feasible } => {
            let l = load_feasible(&feasible)?;
            println!("{}", l.to_json());
            eprintln!("valid: {} keys, {} elements", l.base().len(), l.element_count());
            Ok(0)
        }
        Command::Canonical { config, orientation, sigma } => {
            let cfg = parse_configuration(&read(&config)?).with_context(|| format!("{}", config.display()))?;
            let l = canonical_feasible_set(&cfg, orientation, &sigma)?;
            println!("{}", l.to_json());
            Ok(0)
        }
        Command::Equiv { a, b, witness } => {
            let (ca, cb) = (load_configuration(&a)?, load_configuration(&b)?);
            let eq = decide_equivalence(&ca, &cb)?;
            if witness {
                println!("{}", serde_json::to_string_pretty(&eq)?);
            } else {
                println!("{}", if eq.equivalent { "equivalent" } else { "not equivalent" });
            }
            Ok(if eq.equivalent { 0 } else { 1 })
        }
        Command::Synth { feasible, out } => {
            let l = load_feasible(&feasible)?;
            let cfg = synthesize_configuration(&l);
            fs::write(&out, cfg.to_json()).with_context(|| format!("cannot write {}", out.display()))?;
            eprintln!("wrote {} marks to {}", cfg.len(), out.display());
            Ok(0)
        }
        Command::Portrait { feasible, svg, csv, json, ymax, step, samples, arc } => {
            let l = load_feasible(&feasible)?;
            let opts = PortraitOptions {
                samples_per_block: samples,
                step,
                max_arc_length: arc,
                ymax,
                ..Default::default()
            };
            let doc = render_portrait(&l, &opts)?;
            doc.write_svg(&svg).with_context(|| format!("cannot write {}", svg.display()))?;
            if let Some(p) = csv {
                doc.write_csv(&p).with_context(|| format!("cannot write {}", p.display()))?;
            }
            if let Some(p) = json {
                doc.write_json(&p).with_context(|| format!("cannot write {}", p.display()))?;
            }
            eprintln!("{} polylines, {} flagged", doc.polylines.len(), doc.flagged_count());
            Ok(0)
        }
        Command::Example { command } => match command {
            ExampleCommand::Verify { all } => {
                if !all {
                    bail!("example verify needs --all");
                }
                Ok(if verify_all()? { 0 } else { 1 })
            }
            ExampleCommand::YMap { from, to, points, step, csv } => {
                if !(from > 0.0 && to > from && points >= 1) {
                    bail!("y-map needs 0 < from < to and at least one point");
                }
                let pts = y_map(&log_grid(from, to, points), step, DEFAULT_BUDGET)?;
                let mut text = String::from("y0,Y\n");
                for p in &pts {
                    text.push_str(&format!("{:.16e},{:.16e}\n", p.y0, p.y));
                }
                match csv {
                    Some(path) => fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?,
                    None => std::io::stdout().write_all(text.as_bytes())?,
                }
                Ok(0)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("error: usage"));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
