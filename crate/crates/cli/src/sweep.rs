//! Parameter sweeps over the closed forms and the perturbation oracle.

use std::fmt::Write as _;
use std::path::PathBuf;

use caplab_core::fock::{thermal_cutoff, QuadratureScheme};
use caplab_core::gaussian::{coherent_info_energy_shape, coherent_info_thermal};
use caplab_core::perturbation::{bracket, correction_breakdown, delta_ic_limit, oracle_delta_ic, Type1Perturbation};
use caplab_core::{conjectured_capacity, Channel};
use rayon::prelude::*;

use crate::config::Params;
use crate::output::{config_hash, emit, write_csv, write_json, Format, ResultRecord};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    X,
    Energy,
    Photons,
    Epsilon,
    Order,
}

impl Variable {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "x" => Ok(Variable::X),
            "energy" | "E" => Ok(Variable::Energy),
            "N" | "photons" => Ok(Variable::Photons),
            "epsilon" => Ok(Variable::Epsilon),
            "n_order" | "order" => Ok(Variable::Order),
            _ => Err(CliError::Usage(format!(
                "unknown sweep variable `{s}` (x, energy, N, epsilon, n_order)"
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Variable::X => "x",
            Variable::Energy => "energy",
            Variable::Photons => "N",
            Variable::Epsilon => "epsilon",
            Variable::Order => "n_order",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub noise: f64,
    pub variable: Variable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// Parameters held fixed, by name.
    pub fixed: Vec<(&'static str, f64)>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl SweepConfig {
    pub fn from_params(p: &Params) -> Result<Self, CliError> {
        let noise: f64 = p.require("noise")?;
        if !(noise > 0.0 && noise.is_finite()) {
            return Err(CliError::Usage(format!("--noise must be positive, got {noise}")));
        }
        let variable = Variable::parse(p.raw("var").unwrap_or("x"))?;
        let start: f64 = p.require("start")?;
        let stop: f64 = p.require("stop")?;
        let points: usize = p.get_or("points", 2)?;
        if points < 2 || !(start < stop) {
            return Err(CliError::Usage(format!(
                "need points >= 2 and start < stop, got {points} points over [{start}, {stop}]"
            )));
        }
        let fixed = match variable {
            Variable::X => vec![("energy", p.require("energy")?)],
            Variable::Energy => vec![("x", p.get_or("x", 1.0)?)],
            Variable::Photons => vec![],
            Variable::Epsilon => {
                let photons: f64 = p.require("photons")?;
                let cutoff = match p.get::<usize>("cutoff")? {
                    Some(k) => k,
                    None => thermal_cutoff(photons),
                };
                vec![("order", p.get_or::<usize>("order", 2)? as f64), ("photons", photons), ("cutoff", cutoff as f64)]
            }
            Variable::Order => vec![("photons", p.require("photons")?)],
        };
        let format = match p.raw("format") {
            Some(s) => s.parse().map_err(CliError::Usage)?,
            None => Format::Csv,
        };
        let out = p.raw("out").map(PathBuf::from);
        Ok(Self { noise, variable, start, stop, points, fixed, out, format })
    }

    /// Text the config hash is taken over; output path and thread count
    /// do not change results and are left out.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        writeln!(s, "noise={:e}", self.noise).unwrap();
        writeln!(s, "var={}", self.variable.name()).unwrap();
        writeln!(s, "start={:e}", self.start).unwrap();
        writeln!(s, "stop={:e}", self.stop).unwrap();
        writeln!(s, "points={}", self.points).unwrap();
        for (k, v) in &self.fixed {
            writeln!(s, "{k}={v:e}").unwrap();
        }
        s
    }

    fn fixed(&self, name: &str) -> f64 {
        self.fixed.iter().find(|(k, _)| *k == name).map(|(_, v)| *v).unwrap_or(f64::NAN)
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let n = self.points;
        let g: Vec<f64> = (0..n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
            .collect();
        if self.variable != Variable::Order {
            return Ok(g);
        }
        let orders: Vec<f64> = g.iter().map(|v| v.round()).collect();
        if orders[0] < 1.0 || orders.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::Usage("n_order grid must hit distinct integers >= 1".into()));
        }
        Ok(orders)
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<ResultRecord>, CliError> {
    let ch = Channel::new(cfg.noise).map_err(CliError::from_core)?;
    let grid = cfg.grid()?;
    let quad = match cfg.variable {
        Variable::Epsilon => Some(QuadratureScheme::certified(cfg.fixed("cutoff") as usize, &ch).map_err(CliError::from_core)?),
        _ => None,
    };
    grid.par_iter()
        .map(|&v| point(cfg, &ch, quad.as_ref(), v).map_err(CliError::from_core))
        .collect()
}

fn point(
    cfg: &SweepConfig,
    ch: &Channel,
    quad: Option<&QuadratureScheme>,
    v: f64,
) -> caplab_core::Result<ResultRecord> {
    let rec = ResultRecord::default().input(cfg.variable.name(), v);
    let rec = match cfg.variable {
        Variable::X => {
            let e = cfg.fixed("energy");
            rec.input("energy", e).output("ic", coherent_info_energy_shape(e, v, ch)?)
        }
        Variable::Energy => {
            let x = cfg.fixed("x");
            rec.input("x", x).output("ic", coherent_info_energy_shape(v, x, ch)?)
        }
        Variable::Photons => rec
            .output("ic", coherent_info_thermal(v, ch)?)
            .output("capacity", conjectured_capacity(ch)),
        Variable::Epsilon => {
            let n = cfg.fixed("order") as usize;
            let photons = cfg.fixed("photons");
            let cutoff = cfg.fixed("cutoff") as usize;
            let pert = Type1Perturbation::new(n, v)?;
            let analytic = correction_breakdown(&Type1Perturbation::new(n, 1.0)?, photons, ch)?.delta_ic_second_order;
            let quad = quad.expect("epsilon sweeps certify their quadrature up front");
            rec.input("order", n as f64)
                .input("photons", photons)
                .input("cutoff", cutoff as f64)
                .output("delta_ic_oracle", oracle_delta_ic(&pert, photons, ch, cutoff, quad)?)
                .output("delta_ic_second_order", analytic * v * v)
                .flag("certified", quad.certificate().is_some())
        }
        Variable::Order => {
            let n = v as usize;
            let photons = cfg.fixed("photons");
            let b = correction_breakdown(&Type1Perturbation::new(n, 1.0)?, photons, ch)?;
            rec.input("photons", photons)
                .output("delta_ic_per_eps2", b.delta_ic_second_order)
                .output("delta_ic_limit", delta_ic_limit(n, photons)?)
                .output("bracket", bracket(n))
        }
    };
    Ok(rec.finish())
}

pub fn cmd_sweep(p: &Params) -> Result<(), CliError> {
    let cfg = SweepConfig::from_params(p)?;
    let records = run_sweep(&cfg)?;
    let canonical = cfg.canonical();
    let hash = config_hash(&canonical);
    emit(cfg.out.as_deref(), |w| match cfg.format {
        Format::Csv => write_csv(w, &records, &hash),
        Format::Json => write_json(w, &records, &canonical, &hash),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(text: &str) -> Params {
        Params::parse(text).unwrap()
    }

    #[test]
    fn x_sweep_peaks_at_one() {
        let cfg = SweepConfig::from_params(&params("noise=0.1\nvar=x\nenergy=1e4\nstart=0.5\nstop=1\npoints=11")).unwrap();
        let recs = run_sweep(&cfg).unwrap();
        let ic: Vec<f64> = recs.iter().map(|r| r.outputs["ic"]).collect();
        assert!(ic.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(recs.last().unwrap().inputs["x"], 1.0);
    }

    #[test]
    fn photon_sweep_approaches_capacity() {
        let cfg = SweepConfig::from_params(&params("noise=0.1\nvar=N\nstart=1\nstop=1e6\npoints=5")).unwrap();
        let recs = run_sweep(&cfg).unwrap();
        let last = recs.last().unwrap();
        assert!((last.outputs["ic"] - last.outputs["capacity"]).abs() < 1e-3);
    }

    #[test]
    fn order_grid_must_be_distinct() {
        let cfg = SweepConfig::from_params(&params("noise=0.1\nvar=n_order\nphotons=5\nstart=1\nstop=2\npoints=4")).unwrap();
        assert!(matches!(cfg.grid(), Err(CliError::Usage(_))));
    }

    #[test]
    fn validation() {
        assert!(SweepConfig::from_params(&params("noise=0.1\nvar=x\nenergy=10\nstart=1\nstop=0.5")).is_err());
        assert!(SweepConfig::from_params(&params("noise=0.1\nvar=x\nstart=0.5\nstop=1")).is_err());
        assert!(SweepConfig::from_params(&params("noise=-1\nvar=N\nstart=0.5\nstop=1")).is_err());
    }
}
