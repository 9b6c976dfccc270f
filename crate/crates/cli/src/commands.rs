use std::path::{Path, PathBuf};

use qtraj_core::analysis::poincare_sample;
use qtraj_core::master::{rk4_evolve, MasterEvolutionConfig};
use qtraj_core::model::{quadratures, RepresentationTransform};
use qtraj_core::statespace::{expectation, projector};
use qtraj_core::unravel::{compare_pathwise, ensemble_mean, run_ensemble, trajectory_seed, Method};

use crate::config::{model_drive_period, prepare, OutputSpec, Prepared, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{ensure_dir, push_state, state_columns, write_density_series, CsvWriter};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    EvolveMaster,
    Trajectory,
    Ensemble,
    InvarianceCheck,
    Poincare,
}

/// Files written, plus a one-line summary for commands that report one.
#[derive(Debug, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub summary: Option<String>,
}

pub fn run(cmd: Command, cfg: &RunConfig, out: &Path) -> Result<Report> {
    let prepared = prepare(cfg)?;
    ensure_dir(out)?;
    match cmd {
        Command::EvolveMaster => evolve_master(cfg, &prepared, out),
        Command::Trajectory => trajectories(cfg, &prepared, out),
        Command::Ensemble => ensemble(cfg, &prepared, out),
        Command::InvarianceCheck => invariance(cfg, &prepared, out),
        Command::Poincare => poincare(cfg, &prepared, out),
    }
}

fn evolve_master(cfg: &RunConfig, p: &Prepared, out: &Path) -> Result<Report> {
    let mcfg = MasterEvolutionConfig::new(cfg.dt, cfg.t_final, cfg.record_every)?;
    let series = rk4_evolve(&p.model, &projector(&p.psi0), &mcfg)?;
    let file = write_density_series(out.join("master.csv"), &series.times, &series.states)?;
    Ok(Report { files: vec![file], summary: None })
}

fn trajectories(cfg: &RunConfig, p: &Prepared, out: &Path) -> Result<Report> {
    let tcfg = p.trajectory_config(cfg)?;
    let records = run_ensemble(&p.model, &p.psi0, &tcfg, cfg.n_traj, cfg.master_seed)?;
    let with_states = cfg.outputs.is_empty() || cfg.outputs.iter().any(|o| matches!(o, OutputSpec::States));

    let mut header = vec!["t".to_string()];
    if with_states {
        header.extend(state_columns(p.model.dim()));
    }
    for (name, _) in &p.observables {
        header.push(format!("re_{name}"));
        header.push(format!("im_{name}"));
    }

    let mut files = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        let mut w = CsvWriter::create(out.join(format!("trajectory_{i}.csv")), &header)?;
        for (t, psi) in rec.times.iter().zip(&rec.states) {
            let mut row = vec![*t];
            if with_states {
                push_state(&mut row, psi);
            }
            for (_, op) in &p.observables {
                let v = expectation(op, psi)?;
                row.push(v.re);
                row.push(v.im);
            }
            w.row(&row)?;
        }
        files.push(w.finish()?);

        if tcfg.method == Method::Jump {
            let mut w = CsvWriter::create(out.join(format!("jumps_{i}.csv")), &["t".into(), "channel".into()])?;
            for (t, k) in &rec.jump_times {
                w.raw_row(&[crate::output::fmt_f64(*t), k.to_string()])?;
            }
            files.push(w.finish()?);
        }
    }
    Ok(Report { files, summary: None })
}

fn ensemble(cfg: &RunConfig, p: &Prepared, out: &Path) -> Result<Report> {
    let tcfg = p.trajectory_config(cfg)?;
    let mean = ensemble_mean(&p.model, &p.psi0, &tcfg, cfg.n_traj, cfg.master_seed)?;
    let file = write_density_series(out.join("ensemble_mean.csv"), &mean.times, &mean.states)?;
    Ok(Report { files: vec![file], summary: None })
}

fn invariance(cfg: &RunConfig, p: &Prepared, out: &Path) -> Result<Report> {
    let tcfg = p.trajectory_config(cfg)?;
    if tcfg.method == Method::Jump {
        return Err(CliError::Usage("invariance-check supports qsd, heterodyne and homodyne".into()));
    }
    let identity = RepresentationTransform::identity(p.base_model.channels());
    let transform = p.transform.as_ref().unwrap_or(&identity);
    let tcfg = tcfg.with_seed(trajectory_seed(cfg.master_seed, 0));
    let cmp = compare_pathwise(&p.base_model, transform, &p.psi0, &tcfg)?;

    let mut w = CsvWriter::create(out.join("invariance.csv"), &["t".into(), "trace_distance".into()])?;
    for (t, d) in cmp.times.iter().zip(&cmp.distances) {
        w.row(&[*t, *d])?;
    }
    let file = w.finish()?;

    let max = cmp.max_distance();
    let summary = match tcfg.method {
        Method::Homodyne => format!("max trace distance {max} (homodyne, report only)"),
        _ => {
            let bound = if transform.has_shifts() { cfg.shift_bound_constant * cfg.dt } else { 1e-10 };
            if max > bound {
                return Err(CliError::BoundViolated { max, bound });
            }
            format!("max trace distance {max} (bound {bound})")
        }
    };
    Ok(Report { files: vec![file], summary: Some(summary) })
}

fn poincare(cfg: &RunConfig, p: &Prepared, out: &Path) -> Result<Report> {
    let period = match p.poincare.or_else(|| model_drive_period(&cfg.model)) {
        Some(period) => period,
        None => return Err(CliError::field("outputs", "poincare needs a poincare output or a driven_duffing model")),
    };
    let tcfg = p.trajectory_config(cfg)?.with_seed(trajectory_seed(cfg.master_seed, 0));
    let rec = qtraj_core::unravel::run_trajectory(&p.model, &p.psi0, &tcfg)?;
    let (x, q) = quadratures(p.model.dim());
    let section = poincare_sample(&rec, &period, &x, &q)?;

    let mut w = CsvWriter::create(out.join("poincare.csv"), &["t".into(), "x".into(), "p".into()])?;
    for (t, (xv, pv)) in section.sample_times.iter().zip(&section.points) {
        w.row(&[*t, *xv, *pv])?;
    }
    Ok(Report { files: vec![w.finish()?], summary: None })
}
