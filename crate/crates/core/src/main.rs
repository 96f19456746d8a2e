use std::process::ExitCode;

use bec_entropy::config::{parse_config, CliArgs, FileConfig, Mode, RunConfig};
use bec_entropy::error::Error;
use bec_entropy::gpe::TrapSpec;
use bec_entropy::ingest::ingest_density_pair;
use bec_entropy::report::{emit_reports, write_atomically};
use bec_entropy::scaling::{audit_inequalities, fit_log_law, run_sweep};
use clap::error::ErrorKind;
use clap::Parser;

const EXIT_USAGE: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_INGEST: u8 = 3;

fn main() -> ExitCode {
    let args = match CliArgs::try_parse() {
        Ok(args) => args,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let config = match args
        .config
        .as_deref()
        .map(FileConfig::load)
        .transpose()
        .and_then(|file| parse_config(&args, file.as_ref()))
    {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let outcome = match &config.mode {
        Mode::GpeSweep => run_gpe_sweep(&config).map_err(|e| {
            let code = if e.is_solver_failure() { EXIT_SOLVER } else { EXIT_USAGE };
            (code, e)
        }),
        Mode::IngestDensities { position, momentum } => {
            run_ingest(&config, position, momentum).map_err(|e| {
                let code = match e {
                    Error::Io { .. } | Error::Config(_) => EXIT_USAGE,
                    _ => EXIT_INGEST,
                };
                (code, e)
            })
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, e)) => {
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}

fn run_gpe_sweep(config: &RunConfig) -> Result<(), Error> {
    let template = TrapSpec::new(1, config.scattering_length, config.trap_length)?;
    let sweep = run_sweep(&template, &config.n_values, &config.sweep_settings())?;
    let fit = if sweep.entries.len() >= 3 {
        Some(fit_log_law(&sweep.entropy_points())?)
    } else {
        eprintln!("note: fewer than 3 particle numbers, skipping the log-law fit");
        None
    };
    let audit = audit_inequalities(&sweep);

    println!(
        "{:>9} {:>8} {:>8} {:>8} {:>9} {:>9}",
        "N", "S_r", "S_k", "S", "S(max)", "Omega"
    );
    for e in &sweep.entries {
        let r = &e.report;
        println!(
            "{:>9} {:>8.4} {:>8.4} {:>8.4} {:>9.4} {:>9.5}",
            e.n_particles, r.s_r, r.s_k, r.s_total, r.s_max, r.omega
        );
        if r.moment_tail_warning {
            eprintln!("warning: N = {}: moment integrals not converged at the mesh edge", e.n_particles);
        }
    }
    if let Some(fit) = &fit {
        println!(
            "fit: S = {:.4} + {:.4} ln N  (rms residual {:.2e})",
            fit.intercept, fit.slope, fit.rms_residual
        );
    }
    println!(
        "inequality audit: {} of {} chain checks hold",
        audit.check_count() - audit.failures().count(),
        audit.check_count()
    );

    for path in emit_reports(&sweep, fit.as_ref(), config)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_ingest(
    config: &RunConfig,
    position: &std::path::Path,
    momentum: &std::path::Path,
) -> Result<(), Error> {
    let result = ingest_density_pair(position, momentum)?;
    let r = &result.report;
    println!("S_r = {:.6}  S_k = {:.6}  S = {:.6}", r.s_r, r.s_k, r.s_total);
    println!("T = {:.6}  <r^2> = {:.6}  Omega = {:.6}", r.kinetic, r.msr, r.omega);
    println!(
        "normalization defects: position {:.3e}, momentum {:.3e}",
        result.position.normalization_defect, result.momentum.normalization_defect
    );
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "report": r,
        "position_normalization_defect": result.position.normalization_defect,
        "momentum_normalization_defect": result.momentum.normalization_defect,
    }))
    .expect("report serializes");
    for path in write_atomically(&config.out_dir, &[("report.json".into(), json + "\n")])? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
