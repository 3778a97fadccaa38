//! Scenario execution and trace output.

use std::io::Write;
use std::path::{Path, PathBuf};

use dirac_core::evolution::{KickSchedule, KickedPropagator, Propagator};
use dirac_core::field::{guard, make_gaussian};
use dirac_core::invariants::{
    angular_momentum_invariant, newton_wigner_invariant, newton_wigner_printed_deviation, spin_invariant,
    x0d_explicit, InvariantOp,
};
use dirac_core::ops::{project_positive, FieldOperator, ModeOp};
use dirac_core::SpinorField;
use num_complex::Complex64;

use crate::config::{Quantity, ScenarioConfig};
use crate::error::CliError;

/// Subcommands that run a scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Evolve,
    Invariants,
    Kick,
    Nw,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    /// Real and imaginary parts, interleaved, then any extra columns.
    pub values: Vec<f64>,
    pub norm: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub columns: Vec<String>,
    pub rows: Vec<TraceRow>,
}

impl Trace {
    /// Index of a named value column (excluding `t`).
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        Some(self.rows.iter().map(|r| r.values[i]).collect())
    }

    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flagged)
    }
}

/// Where to write SPNF snapshots: every `every`-th sample, as
/// `<stem>.snapNNNNN.spnf` next to `base`.
#[derive(Clone, Debug)]
pub struct Snapshots {
    pub every: usize,
    pub base: PathBuf,
}

impl Snapshots {
    pub fn path(&self, index: usize) -> PathBuf {
        let stem = self.base.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
        let dir = self.base.parent().unwrap_or(Path::new(""));
        dir.join(format!("{stem}.snap{index:05}.spnf"))
    }
}

fn default_trace(mode: Mode, ndim: usize) -> Vec<Quantity> {
    let axes = 1..=ndim;
    match mode {
        Mode::Evolve => axes.flat_map(|a| [Quantity::X(a), Quantity::P(a)]).collect(),
        Mode::Invariants => Vec::new(),
        Mode::Kick => axes.flat_map(|a| [Quantity::P(a), Quantity::P0Kicked(a)]).collect(),
        Mode::Nw => axes.flat_map(|a| [Quantity::X(a), Quantity::Q(a)]).collect(),
    }
}

/// The quantities a mode traces: the config's list, or the mode's default.
pub fn resolve_trace(cfg: &ScenarioConfig, mode: Mode) -> Result<Vec<Quantity>, CliError> {
    match mode {
        Mode::Invariants if cfg.trace.is_empty() => {
            return Err(CliError::config(None, "invariants needs a non-empty [invariants] trace list"))
        }
        Mode::Kick if cfg.kicks.is_empty() => return Err(CliError::config(None, "kick needs at least one [kick]")),
        Mode::Nw if cfg.grid.mass() <= 0.0 => return Err(CliError::config(None, "nw needs mass > 0")),
        _ => {}
    }
    Ok(if cfg.trace.is_empty() {
        default_trace(mode, cfg.grid.ndim())
    } else {
        cfg.trace.clone()
    })
}

/// Initial state, projected onto positive energies when asked (always for `nw`).
pub fn initial_state(cfg: &ScenarioConfig, mode: Mode) -> Result<SpinorField, CliError> {
    let f = make_gaussian(&cfg.grid, &cfg.packet).map_err(|e| CliError::config(None, e.to_string()))?;
    if cfg.project_positive || mode == Mode::Nw {
        Ok(project_positive(&f)?.normalized()?)
    } else {
        Ok(f)
    }
}

struct Evaluator<'a> {
    schedule: &'a KickSchedule,
    t_ref: f64,
}

impl Evaluator<'_> {
    /// `<psi|A psi> / <psi|psi>` and whether a decay guard fired.
    fn mean(&self, q: Quantity, psi: &SpinorField, t: f64) -> Result<(Complex64, bool), CliError> {
        let (a, flagged) = match q {
            Quantity::P0D(a) => (InvariantOp::p0d(a).at(t).apply(psi)?, false),
            Quantity::X0D(a) => (InvariantOp::x0d(a).at(t).apply(psi)?, false),
            Quantity::X0DExplicit(a) => {
                let g = x0d_explicit(psi, t, a)?;
                let fl = g.flagged();
                (g.value, fl)
            }
            Quantity::L(a) => (angular_momentum_invariant(psi, t, a)?, false),
            Quantity::S(a) => (spin_invariant(psi, t, a)?, false),
            Quantity::Q(a) => {
                let g = newton_wigner_invariant(psi, t, a)?;
                let fl = g.flagged();
                (g.value, fl)
            }
            Quantity::Gamma0 => (ModeOp::gamma0(t).apply(psi)?, false),
            Quantity::P0Kicked(a) => (
                InvariantOp::p0_kicked(a, self.schedule.clone(), self.t_ref).at(t).apply(psi)?,
                false,
            ),
            Quantity::P(a) => (psi.apply_momentum(a)?, false),
            Quantity::X(a) => (psi.apply_position(a)?, false),
            Quantity::H => (ModeOp::hamiltonian().apply(psi)?, false),
        };
        Ok((psi.inner(&a)? / psi.norm_sq(), flagged))
    }
}

/// Runs a scenario: the state at each sample time is the initial packet
/// carried from `t_start` through the kick schedule.
pub fn run_scenario(cfg: &ScenarioConfig, mode: Mode, snapshots: Option<&Snapshots>) -> Result<Trace, CliError> {
    let quantities = resolve_trace(cfg, mode)?;
    let schedule = cfg.schedule()?;
    let t_ref = cfg.run.t_start;
    let psi0 = initial_state(cfg, mode)?;
    let prop = KickedPropagator::new(schedule.clone(), t_ref);
    let eval = Evaluator {
        schedule: &schedule,
        t_ref,
    };

    let mut columns = Vec::new();
    for q in &quantities {
        columns.push(format!("{}_re", q.name()));
        columns.push(format!("{}_im", q.name()));
    }
    let nw_axes: Vec<usize> = if mode == Mode::Nw {
        (1..=cfg.grid.ndim()).collect()
    } else {
        Vec::new()
    };
    for a in &nw_axes {
        columns.push(format!("Q_printed_dev_{a}"));
    }

    let mut rows = Vec::with_capacity(cfg.run.samples);
    for (i, t) in cfg.run.times().into_iter().enumerate() {
        let psi = prop.propagate(&psi0, t)?;
        let mut flagged = !guard(&psi, &format!("state at t = {t}")).is_decaying();
        let mut values = Vec::with_capacity(columns.len());
        for q in &quantities {
            let (v, fl) = eval.mean(*q, &psi, t)?;
            flagged |= fl;
            values.push(v.re);
            values.push(v.im);
        }
        for a in &nw_axes {
            values.push(newton_wigner_printed_deviation(&psi, t, *a)?);
        }
        if let Some(s) = snapshots {
            if i % s.every == 0 {
                dirac_core::spnf::save(s.path(i), &psi)?;
            }
        }
        rows.push(TraceRow {
            t,
            values,
            norm: psi.norm(),
            flagged,
        });
    }
    Ok(Trace { columns, rows })
}

/// Seventeen significant digits, round-trip exact.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(w: W, trace: &Trace) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["t".to_string()];
    header.extend(trace.columns.iter().cloned());
    header.push("norm".into());
    header.push("decay_flag".into());
    out.write_record(&header)?;
    for r in &trace.rows {
        let mut rec = vec![fmt_f64(r.t)];
        rec.extend(r.values.iter().map(|v| fmt_f64(*v)));
        rec.push(fmt_f64(r.norm));
        rec.push(if r.flagged { "1" } else { "0" }.into());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}
