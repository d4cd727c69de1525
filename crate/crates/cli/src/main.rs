//! `caplab`: capacity reports, parameter sweeps, perturbation corrections and
//! verification suites for the additive Gaussian noise channel.

mod config;
mod output;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use caplab_core::fock::{thermal_cutoff, QuadratureScheme};
use caplab_core::gaussian::coherent_info_thermal;
use caplab_core::perturbation::{
    correction_breakdown, delta_ic_limit, multimode_delta_ic, multimode_joint_norm, multimode_output_norm,
    multimode_phi_norm, oracle_delta_ic, MultiModePerturbation, Type1Perturbation,
};
use caplab_core::{conjectured_capacity, Channel};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use config::Params;
use output::Format;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or parameter values; exit 2.
    Usage(String),
    /// Exit 3.
    Io(String),
    /// A verification check or a computation failed; exit 1.
    Failed(String),
}

impl CliError {
    /// Core errors from user-chosen parameters count as usage errors;
    /// numerical failures do not.
    pub fn from_core(e: caplab_core::Error) -> Self {
        use caplab_core::Error as E;
        match e {
            E::Convergence(_) | E::Inconsistency(_) => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "caplab", version, about = "Coherent information of the additive Gaussian noise channel")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Channel noise photon number N_n.
    #[arg(long, global = true, allow_hyphen_values = true)]
    noise: Option<f64>,
    /// Input energy E = N + 1/2 (fixed parameter of x sweeps).
    #[arg(long, global = true)]
    energy: Option<f64>,
    /// Thermal photon number N.
    #[arg(long, global = true)]
    photons: Option<f64>,
    /// Fock cutoff; automatic when omitted.
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Flat key = value file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "CAPLAB_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Conjectured capacity and the large-N thermal coherent information.
    Capacity,
    /// Evaluate over a grid of one variable.
    Sweep {
        /// x, energy, N, epsilon or n_order.
        #[arg(long)]
        var: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        stop: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Shape held fixed in energy sweeps.
        #[arg(long)]
        x: Option<f64>,
        /// Perturbation order for epsilon sweeps.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Second-order corrections for a type-1 or multimode perturbation.
    Perturb {
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<f64>,
        #[arg(long)]
        kvec: Option<String>,
        #[arg(long)]
        lvec: Option<String>,
        #[arg(long = "c-re", allow_hyphen_values = true)]
        c_re: Option<f64>,
        #[arg(long = "c-im", allow_hyphen_values = true)]
        c_im: Option<f64>,
        /// Also run the Fock-space oracle (type-1 only).
        #[arg(long)]
        oracle: bool,
    },
    /// Run a verification suite and print a JSON summary.
    Verify {
        /// lemmas, oracle, perturbation or all.
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn params(cli: &Cli) -> Result<Params, CliError> {
    let c = &cli.common;
    let mut p = match &c.config {
        Some(path) => Params::load(path)?,
        None => Params::default(),
    };
    p.override_with("noise", c.noise);
    p.override_with("energy", c.energy);
    p.override_with("photons", c.photons);
    p.override_with("cutoff", c.cutoff);
    p.override_with("out", c.out.as_ref().map(|o| o.display()));
    p.override_with("format", c.format.as_ref());
    p.override_with("threads", c.threads);
    match &cli.cmd {
        Cmd::Capacity => {}
        Cmd::Sweep { var, start, stop, points, x, order } => {
            p.override_with("var", var.as_ref());
            p.override_with("start", *start);
            p.override_with("stop", *stop);
            p.override_with("points", *points);
            p.override_with("x", *x);
            p.override_with("order", *order);
        }
        Cmd::Perturb { order, epsilon, kvec, lvec, c_re, c_im, oracle } => {
            p.override_with("order", *order);
            p.override_with("epsilon", *epsilon);
            p.override_with("kvec", kvec.as_ref());
            p.override_with("lvec", lvec.as_ref());
            p.override_with("c_re", *c_re);
            p.override_with("c_im", *c_im);
            if *oracle {
                p.override_with("oracle", Some(true));
            }
        }
        Cmd::Verify { seed, .. } => p.override_with("seed", *seed),
    }
    Ok(p)
}

fn format_of(p: &Params) -> Result<Format, CliError> {
    p.raw("format").map_or(Ok(Format::Csv), |s| s.parse().map_err(CliError::Usage))
}

fn channel(p: &Params) -> Result<Channel, CliError> {
    let noise: f64 = p.require("noise")?;
    if !(noise > 0.0) {
        return Err(CliError::Usage(format!("--noise must be positive, got {noise}")));
    }
    Channel::new(noise).map_err(CliError::from_core)
}

/// Prints `key value` lines, or one JSON object.
fn report(p: &Params, fields: &[(&str, serde_json::Value)]) -> Result<(), CliError> {
    let path = p.raw("out").map(PathBuf::from);
    let json = format_of(p)? == Format::Json;
    output::emit(path.as_deref(), |w| {
        if json {
            let map: serde_json::Map<String, serde_json::Value> =
                fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            serde_json::to_writer_pretty(&mut *w, &map).map_err(std::io::Error::other)?;
            writeln!(w)
        } else {
            for (k, v) in fields {
                match v {
                    serde_json::Value::Number(n) => writeln!(w, "{k} {}", output::cell(n.as_f64().unwrap_or(f64::NAN)))?,
                    serde_json::Value::String(s) => writeln!(w, "{k} {s}")?,
                    other => writeln!(w, "{k} {other}")?,
                }
            }
            Ok(())
        }
    })
}


fn cmd_capacity(p: &Params) -> Result<(), CliError> {
    let ch = channel(p)?;
    let below = ch.below_threshold();
    let status = if below {
        "below 1/e: positive capacity"
    } else {
        "at or above 1/e: the conjectured capacity is zero"
    };
    let large_n = coherent_info_thermal(1e6, &ch).map_err(CliError::from_core)?;
    report(
        p,
        &[
            ("noise", json!(ch.noise_photons())),
            ("conjectured_capacity", json!(conjectured_capacity(&ch))),
            ("threshold", json!(status)),
            ("thermal_ic_n_1e6", json!(large_n)),
        ],
    )
}

fn cmd_perturb(p: &Params) -> Result<(), CliError> {
    let ch = channel(p)?;
    let photons: f64 = p.require("photons")?;
    if let Some(k) = p.list("kvec")? {
        let l = p.list("lvec")?.ok_or_else(|| CliError::Usage("--kvec needs --lvec".into()))?;
        let c = Complex64::new(p.get_or("c_re", 1.0)?, p.get_or("c_im", 0.0)?);
        let pert = MultiModePerturbation::new(k, l, c).map_err(CliError::from_core)?;
        let core = |r: caplab_core::Result<f64>| r.map_err(CliError::from_core);
        return report(
            p,
            &[
                ("order", json!(pert.order())),
                ("phi_norm", json!(core(multimode_phi_norm(&pert, photons))?)),
                ("output_norm", json!(core(multimode_output_norm(&pert, photons, &ch))?)),
                ("joint_norm", json!(core(multimode_joint_norm(&pert, photons, &ch))?)),
                ("delta_ic_per_eps2", json!(core(multimode_delta_ic(&pert, photons, &ch))?)),
            ],
        );
    }
    let n: usize = p.require("order")?;
    let eps: f64 = p.get_or("epsilon", 0.0)?;
    let pert = Type1Perturbation::new(n, eps).map_err(CliError::from_core)?;
    let b = correction_breakdown(&Type1Perturbation::new(n, 1.0).map_err(CliError::from_core)?, photons, &ch)
        .map_err(CliError::from_core)?;
    let mut fields = vec![
        ("order", json!(n)),
        ("epsilon", json!(eps)),
        ("input_coeff", json!(b.input_coeff)),
        ("output_coeff", json!(b.output_coeff)),
        ("joint_coeff", json!(b.joint_coeff)),
        ("delta_ic_per_eps2", json!(b.delta_ic_second_order)),
        ("delta_ic_second_order", json!(b.delta_ic_second_order * eps * eps)),
        ("delta_ic_limit_per_eps2", json!(delta_ic_limit(n, photons).map_err(CliError::from_core)?)),
    ];
    if p.flag("oracle")? {
        let k = p.get::<usize>("cutoff")?.unwrap_or_else(|| thermal_cutoff(photons));
        let q = QuadratureScheme::certified(k, &ch).map_err(CliError::from_core)?;
        let d = oracle_delta_ic(&pert, photons, &ch, k, &q).map_err(CliError::from_core)?;
        fields.push(("cutoff", json!(k)));
        fields.push(("delta_ic_oracle", json!(d)));
    }
    report(p, &fields)
}

fn cmd_verify(p: &Params, suite: &str) -> Result<(), CliError> {
    let suite: verify::Suite = suite.parse().map_err(CliError::Usage)?;
    let seed = p.get_or("seed", 0u64)?;
    let cutoff = p.get::<usize>("cutoff")?;
    let rep = verify::run(suite, cutoff, seed);
    let path = p.raw("out").map(PathBuf::from);
    output::emit(path.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &rep).map_err(std::io::Error::other)?;
        writeln!(w)
    })?;
    if rep.passed {
        return Ok(());
    }
    let failed: Vec<String> = rep
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| match &c.error {
            Some(e) => format!("{} ({e})", c.name),
            None => c.name.clone(),
        })
        .collect();
    Err(CliError::Failed(format!("failed checks: {}", failed.join("; "))))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let p = params(cli)?;
    if let Some(t) = p.get::<usize>("threads")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.cmd {
        Cmd::Capacity => cmd_capacity(&p),
        Cmd::Sweep { .. } => sweep::cmd_sweep(&p),
        Cmd::Perturb { .. } => cmd_perturb(&p),
        Cmd::Verify { suite, .. } => cmd_verify(&p, suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = match &e {
                CliError::Usage(m) => format!("usage error: {m}"),
                CliError::Io(m) => format!("i/o error: {m}"),
                CliError::Failed(m) => m.clone(),
            };
            eprintln!("caplab: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
