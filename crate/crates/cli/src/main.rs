mod args;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use qsdc_core::cloning::{
    analytic_hs_distance, average_hs_distance, average_hs_distance_simpson, matrix_hs_distance,
    CloneMachineSpec,
};
use qsdc_core::protocol::{
    attack_scenario, monte_carlo, physical_closed_form, run_protocol, success_probability, Method,
    Outcome, RunConfig,
};
use qsdc_core::report::selfcheck;
use qsdc_core::tradeoff::{figure_series, format_sig, write_svg, GridSpec};
use serde_json::json;

use args::{
    check_triple, w_from_squares, AttackArgs, Cli, CloneArgs, Command, FigureArgs, FigureId,
    RunArgs, SelfcheckArgs, SweepArgs,
};

enum Failure {
    Usage(String),
    CheckFailed,
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage<T>(r: Result<T, String>) -> Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_run(a: RunArgs) -> Result<(), Failure> {
    let config = RunConfig {
        secret: usage(a.state.secret())?,
        wparams: usage(a.state.wparams())?,
        convention: a.state.convention.into(),
        seed: a.state.seed,
        max_retries: a.max_retries,
    };
    let t = run_protocol(&config).map_err(anyhow::Error::from)?;
    write_file(&a.out, &t.to_json())?;
    let outcome = match t.outcome {
        Outcome::Succeeded { fidelity } => format!("succeeded fidelity={}", format_sig(fidelity)),
        Outcome::Aborted { stage } => {
            format!("aborted stage={}", json!(stage).as_str().unwrap_or("?"))
        }
    };
    println!(
        "{outcome} retries={} transcript={}",
        t.retries(),
        a.out.display()
    );
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Failure> {
    if a.points < 2 {
        return Err(Failure::Usage("--points must be at least 2".into()));
    }
    if a.shots == 0 {
        return Err(Failure::Usage("--shots must be positive".into()));
    }
    let b = a.state.beta2;
    if !(0.0..1.0).contains(&b) {
        return Err(Failure::Usage(format!("beta2 = {b} is outside [0, 1)")));
    }
    let secret = usage(a.state.secret())?;
    let convention = a.state.convention.into();
    let mut out = String::from(
        "alpha_sq,beta_sq,gamma_sq,analytic,physical_closed_form,enumerated,mc_estimate,mc_std_error\n",
    );
    for i in 0..a.points {
        let alpha_sq = (1.0 - b) * i as f64 / (a.points - 1) as f64;
        let gamma_sq = (1.0 - b - alpha_sq).max(0.0);
        let w = usage(w_from_squares(alpha_sq, b, gamma_sq))?;
        let enumerated = success_probability(&w, Method::Enumerate(convention), Some(&secret))
            .map_err(anyhow::Error::from)?;
        let mc = monte_carlo(
            &secret,
            &w,
            convention,
            a.shots,
            a.state.seed.wrapping_add(i as u64),
        )
        .map_err(anyhow::Error::from)?;
        let row = [
            alpha_sq,
            b,
            gamma_sq,
            4.0 * alpha_sq * gamma_sq,
            physical_closed_form(&w),
            enumerated,
            mc.estimate,
            mc.std_error,
        ];
        out.push_str(&row.map(format_sig).join(","));
        out.push('\n');
    }
    write_file(&a.out, &out)?;
    println!("wrote {} rows to {}", a.points, a.out.display());
    Ok(())
}

fn figure_grid(a: &FigureArgs) -> Result<GridSpec, Failure> {
    Ok(match a.figure {
        FigureId::Fig1 => {
            let (al, be, ga) = if a.alpha2.is_empty() && a.beta2.is_empty() && a.gamma2.is_empty() {
                (vec![0.1], vec![0.8], vec![0.1])
            } else {
                (a.alpha2.clone(), a.beta2.clone(), a.gamma2.clone())
            };
            if al.len() != be.len() || be.len() != ga.len() {
                return Err(Failure::Usage(
                    "fig1 needs the same number of alpha2, beta2 and gamma2 values".into(),
                ));
            }
            let tuples = al
                .iter()
                .zip(&be)
                .zip(&ga)
                .map(|((&x, &y), &z)| check_triple(x, y, z))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::Usage)?;
            GridSpec::Fig1 {
                tuples,
                points: a.points.unwrap_or(101),
            }
        }
        FigureId::Fig2 => GridSpec::Fig2 { n_max: a.n_max },
        FigureId::Fig3 => GridSpec::Fig3 {
            beta_sqs: if a.beta2.is_empty() {
                vec![0.017, 0.05, 0.1, 0.17]
            } else {
                a.beta2.clone()
            },
            points: a.points.unwrap_or(50),
        },
    })
}

fn cmd_figures(a: FigureArgs) -> Result<(), Failure> {
    let spec = figure_grid(&a)?;
    let table = figure_series(&spec).map_err(|e| match e {
        qsdc_core::Error::InvalidConfig(m) => Failure::Usage(m),
        other => Failure::Runtime(other.into()),
    })?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    let csv_path = a
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", table.figure.name())));
    write_file(&csv_path, &table.to_csv_string())?;
    println!("wrote {} rows to {}", table.rows.len(), csv_path.display());
    if a.svg {
        let svg_path = csv_path.with_extension("svg");
        write_file(&svg_path, &write_svg(&table))?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

fn cmd_attack(a: AttackArgs) -> Result<(), Failure> {
    if a.shots == 0 {
        return Err(Failure::Usage("--shots must be positive".into()));
    }
    let config = RunConfig {
        secret: usage(a.state.secret())?,
        wparams: usage(a.state.wparams())?,
        convention: a.state.convention.into(),
        seed: a.state.seed,
        max_retries: 0,
    };
    let report = attack_scenario(a.kind.into(), &config, a.shots).map_err(anyhow::Error::from)?;
    let text = serde_json::to_string_pretty(&report).context("serializing report")?;
    if let Some(out) = &a.out {
        write_file(out, &text)?;
    }
    let num = |v: Option<f64>| v.map_or_else(|| "-".to_string(), format_sig);
    println!(
        "{} shots={} mean_fidelity={} analytic_mean={}",
        json!(report.kind).as_str().unwrap_or("?"),
        report.shots,
        num(report.mean_fidelity),
        num(report.analytic_mean)
    );
    for b in &report.baselines {
        println!("  {} = {}", b.name, format_sig(b.value));
    }
    if let Some(n) = report.bob_charlie_quantum_events {
        println!("  bob<->charlie quantum transfers = {n}");
    }
    for n in &report.notes {
        println!("  note: {n}");
    }
    Ok(())
}

fn cmd_clone_analysis(a: CloneArgs) -> Result<(), Failure> {
    if a.points < 2 {
        return Err(Failure::Usage("--points must be at least 2".into()));
    }
    let w = usage(a.state.wparams())?;
    let spec = CloneMachineSpec::new(w.alpha, w.gamma, a.state.convention.into())
        .map_err(anyhow::Error::from)?;
    let mut rows = Vec::new();
    for i in 0..a.points {
        let m = i as f64 / (a.points - 1) as f64;
        let analytic = analytic_hs_distance(m, &spec).map_err(anyhow::Error::from)?;
        let matrix = matrix_hs_distance(m, &spec).map_err(anyhow::Error::from)?;
        rows.push(json!({ "m": m, "analytic": analytic, "matrix": matrix }));
    }
    let average = average_hs_distance(&spec);
    let simpson = average_hs_distance_simpson(&spec, 1000);
    let report = json!({
        "p_sq": spec.p.norm_sqr(),
        "q_sq": spec.q.norm_sqr(),
        "convention": spec.convention.name(),
        "unitarity_norm0": spec.unitarity_norm0(),
        "unitarity_norm1": spec.unitarity_norm1(),
        "average": average,
        "average_simpson": simpson,
        "distance": rows,
    });
    let text = serde_json::to_string_pretty(&report).context("serializing report")?;
    if let Some(out) = &a.out {
        write_file(out, &text)?;
    }
    println!(
        "p^2={} q^2={} average={} simpson={}",
        format_sig(spec.p.norm_sqr()),
        format_sig(spec.q.norm_sqr()),
        format_sig(average),
        format_sig(simpson)
    );
    Ok(())
}

fn cmd_selfcheck(a: SelfcheckArgs) -> Result<(), Failure> {
    let report = selfcheck().map_err(anyhow::Error::from)?;
    write_file(&a.out.join("errata.json"), &report.to_json())?;
    write_file(&a.out.join("errata.txt"), &report.to_text())?;
    print!("{}", report.to_text());
    if report.passed {
        Ok(())
    } else {
        Err(Failure::CheckFailed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Figures(a) => cmd_figures(a),
        Command::Attack(a) => cmd_attack(a),
        Command::CloneAnalysis(a) => cmd_clone_analysis(a),
        Command::Selfcheck(a) => cmd_selfcheck(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::CheckFailed) => {
            eprintln!("selfcheck failed");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
