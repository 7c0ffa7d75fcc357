//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation or derivation failure, 2 unreadable or
//! malformed input, 3 integration failure.

pub mod document;
pub mod presets;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::dynamics::{compare, default_dt, integrate, DensityMatrix, MasterEquation, Metrics, Trajectory};
use crate::effective::{
    effective_operators_basic, effective_operators_dressed, effective_operators_fields, effective_operators_general,
    effective_rate, excited_propagator_elements, lindblad_sum_identity_residual, no_jump_identity_residual,
    EffectiveModel, TimeDependentModel, Variant,
};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_distance, C64};
use crate::system::{partition, validate, Partition, SystemSpec};

use document::{matrix_to_document, SpecDocument};
use presets::{Preset, PresetParams};

/// Environment variable overriding the default integration step.
pub const DT_ENV: &str = "ADIABATIC_ELIM_DT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "adiabatic-elim", version, about = "Effective ground-state dynamics of weakly driven open quantum systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Where the system comes from: a JSON file or a built-in preset.
#[derive(Debug, Clone, Args)]
pub struct Source {
    /// System specification file (JSON)
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    pub path: Option<PathBuf>,
    /// Use a built-in scenario instead of a file
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[command(flatten)]
    pub params: PresetParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorChoice {
    Full,
    Effective(Variant),
}

fn parse_generator(s: &str) -> Result<GeneratorChoice> {
    match s {
        "full" => Ok(GeneratorChoice::Full),
        _ => match s.strip_prefix("effective:") {
            Some(v) => Ok(GeneratorChoice::Effective(v.parse()?)),
            None if s == "effective" => Ok(GeneratorChoice::Effective(Variant::Basic)),
            None => Err(Error::InvalidParameter(format!(
                "unknown generator `{s}` (expected full or effective:<variant>)"
            ))),
        },
    }
}

fn parse_variant(s: &str) -> Result<Variant> {
    s.parse()
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Final time
    #[arg(long)]
    pub t_end: f64,
    /// Step size; defaults to $ADIABATIC_ELIM_DT, then to a rate-based estimate
    #[arg(long)]
    pub dt: Option<f64>,
    /// Record every n-th step (the final step is always recorded)
    #[arg(long, default_value_t = 1)]
    pub sample_every: usize,
    /// Initial basis state; defaults to the first ground state
    #[arg(long)]
    pub initial: Option<usize>,
    /// Output file; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a system against the structural assumptions of the formalism
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// Print effective operators, rates and diagnostics
    Derive {
        #[command(flatten)]
        source: Source,
        /// basic, dressed, fields or general; repeat to compare variants
        #[arg(long, value_parser = parse_variant, default_value = "basic")]
        variant: Vec<Variant>,
        /// Evaluation time for the time-dependent variants
        #[arg(long)]
        t: Option<f64>,
        /// Also write the operators as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the full or an effective master equation and write a CSV
    Simulate {
        #[command(flatten)]
        source: Source,
        /// `full` or `effective:<variant>`
        #[arg(long, value_parser = parse_generator, default_value = "full")]
        generator: GeneratorChoice,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Integrate full and effective dynamics and report their agreement
    Compare {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = parse_variant, default_value = "basic")]
        variant: Variant,
        #[command(flatten)]
        run: RunArgs,
        /// Largest population deviation reported as agreement
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
    },
    /// Built-in scenarios
    Preset {
        #[command(subcommand)]
        action: PresetCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum PresetCommand {
    /// List preset names and default parameters
    List,
    /// Write a preset as a JSON specification
    Export {
        #[arg(value_enum)]
        name: Preset,
        #[command(flatten)]
        params: PresetParams,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs a parsed command line, writing results to `out` and diagnostics to
/// `err`. `env_dt` is the raw value of [`DT_ENV`], if set.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write, env_dt: Option<&str>) -> i32 {
    match dispatch(cli, out, err, env_dt) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) => EXIT_PARSE,
        Error::StepTooLarge { .. } | Error::GridMismatch(_) => EXIT_INTEGRATION,
        _ => EXIT_FAILURE,
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write, env_dt: Option<&str>) -> Result<i32> {
    match cli.command {
        Command::Validate { source } => cmd_validate(&source, out),
        Command::Derive { source, variant, t, out: path } => {
            let spec = load(&source, err)?;
            cmd_derive(&spec, &variant, t, path.as_deref(), out)
        }
        Command::Simulate { source, generator, run } => {
            let spec = load(&source, err)?;
            cmd_simulate(&spec, generator, &run, parse_env_dt(env_dt)?, out)
        }
        Command::Compare {
            source,
            variant,
            run,
            tolerance,
        } => {
            let spec = load(&source, err)?;
            cmd_compare(&spec, variant, &run, tolerance, parse_env_dt(env_dt)?, out)
        }
        Command::Preset { action } => match action {
            PresetCommand::List => {
                for p in [Preset::TwoLevel, Preset::FourLevel, Preset::Raman] {
                    writeln!(out, "{:<11} {}", p.name(), p.summary())?;
                }
                Ok(EXIT_OK)
            }
            PresetCommand::Export { name, params, out: path } => {
                let (spec, meta) = presets::build(name, &params)?;
                let text = SpecDocument::from_spec(&spec, meta).to_json();
                write_output(path.as_deref(), out, text.as_bytes())?;
                Ok(EXIT_OK)
            }
        },
    }
}

fn parse_env_dt(raw: Option<&str>) -> Result<Option<f64>> {
    raw.map(|s| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|dt| *dt > 0.0 && dt.is_finite())
            .ok_or_else(|| Error::Parse(format!("{DT_ENV}: expected a positive number, got `{s}`")))
    })
    .transpose()
}

fn write_output(path: Option<&Path>, out: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => out.write_all(bytes)?,
    }
    Ok(())
}

fn read_spec(source: &Source) -> Result<SystemSpec> {
    match (&source.path, source.preset) {
        (_, Some(preset)) => Ok(presets::build(preset, &source.params)?.0),
        (Some(path), None) => SpecDocument::read(path)?.to_spec(),
        (None, None) => Err(Error::Parse("no specification file or preset given".into())),
    }
}

/// Reads and validates the system, printing the report when it is invalid.
fn load(source: &Source, err: &mut dyn Write) -> Result<SystemSpec> {
    let spec = read_spec(source)?;
    let report = validate(&spec);
    if !report.is_valid() {
        return Err(Error::InvalidSpec(report));
    }
    for a in &report.advisories {
        writeln!(err, "advisory: {} (ratio {:.3})", a.message, a.ratio)?;
    }
    Ok(spec)
}

/// Prints the validation report; exit 0 iff there are no violations.
pub fn cmd_validate(source: &Source, out: &mut dyn Write) -> Result<i32> {
    let spec = match read_spec(source) {
        Err(Error::InvalidSpec(report)) => {
            write!(out, "{report}")?;
            return Ok(EXIT_FAILURE);
        }
        other => other?,
    };
    let report = validate(&spec);
    write!(out, "{report}")?;
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_FAILURE })
}

fn fmt_c(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?} {sign} {:?}i", z.re, z.im.abs())
}

enum Derived {
    Static(EffectiveModel),
    Dynamic(TimeDependentModel),
}

impl Derived {
    fn generator(&self) -> &dyn MasterEquation {
        match self {
            Derived::Static(m) => m,
            Derived::Dynamic(m) => m,
        }
    }
}

fn derive(spec: &SystemSpec, p: &Partition, variant: Variant) -> Result<Derived> {
    if !variant.is_time_dependent() && !spec.fields.is_empty() {
        return Err(Error::VariantPreconditionFailed(format!(
            "the system has drive fields; the {variant} variant ignores them (use fields or general)"
        )));
    }
    Ok(match variant {
        Variant::Basic => Derived::Static(effective_operators_basic(p, &spec.jumps)?),
        Variant::Dressed => Derived::Static(effective_operators_dressed(p, &spec.jumps)?),
        Variant::Fields => Derived::Dynamic(effective_operators_fields(p, &spec.jumps, &spec.fields)?),
        Variant::General => Derived::Dynamic(effective_operators_general(p, &spec.jumps, &spec.fields)?),
    })
}

fn print_model(spec: &SystemSpec, m: &EffectiveModel, out: &mut dyn Write) -> Result<()> {
    let label = |i: usize| spec.basis_label(i);
    writeln!(out, "h_eff:")?;
    for &i in &m.ground {
        for &j in &m.ground {
            writeln!(out, "  <{}|h_eff|{}> = {}", label(i), label(j), fmt_c(m.h_eff[(i, j)]))?;
        }
    }
    for l in &m.l_eff {
        writeln!(out, "l_eff[{}]:", l.label)?;
        for &i in &m.ground {
            for &j in &m.ground {
                writeln!(out, "  <{}|l_eff|{}> = {}", label(i), label(j), fmt_c(l.op[(i, j)]))?;
            }
        }
        for &from in &m.ground {
            for &to in &m.ground {
                let r = effective_rate(m, &l.label, from, to)?;
                writeln!(out, "  rate {} -> {} = {:?}", label(from), label(to), r)?;
            }
        }
    }
    Ok(())
}

fn model_json(m: &EffectiveModel) -> Value {
    json!({
        "variant": m.variant.to_string(),
        "h_eff": matrix_to_document(&m.h_eff),
        "l_eff": m.l_eff.iter().map(|l| json!({ "label": l.label, "matrix": matrix_to_document(&l.op) })).collect::<Vec<_>>(),
    })
}

pub fn cmd_derive(
    spec: &SystemSpec,
    variants: &[Variant],
    t: Option<f64>,
    json_out: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let p = partition(spec)?;
    let mut concrete: Vec<EffectiveModel> = Vec::new();
    for (k, &variant) in variants.iter().enumerate() {
        if k > 0 {
            writeln!(out)?;
        }
        writeln!(out, "== {variant} ==")?;
        match derive(spec, &p, variant)? {
            Derived::Static(m) => {
                print_model(spec, &m, out)?;
                if variant == Variant::Basic {
                    writeln!(out, "lindblad-sum identity residual: {:e}", lindblad_sum_identity_residual(&m, &p)?)?;
                    writeln!(out, "no-jump identity residual: {:e}", no_jump_identity_residual(&m, &p)?)?;
                } else {
                    writeln!(out, "lindblad-sum identity residual: n/a (basic variant only)")?;
                }
                concrete.push(m);
            }
            Derived::Dynamic(tdm) => {
                match t {
                    Some(t) => {
                        writeln!(out, "at t = {t:?}")?;
                        let m = tdm.at(t)?;
                        print_model(spec, &m, out)?;
                        concrete.push(m);
                    }
                    None => {
                        writeln!(out, "propagated excitations (pass --t to evaluate at a time):")?;
                        for term in &tdm.terms {
                            let e = term.ground_energy.map_or(String::new(), |e| format!(", E_l = {e:?}"));
                            writeln!(out, "  A[{}] (omega = {:?}{e}):", term.field, term.omega)?;
                            for &i in &p.excited {
                                for &j in &p.ground {
                                    let z = term.block[(i, j)];
                                    if z != C64::new(0.0, 0.0) {
                                        writeln!(out, "    <{}|A|{}> = {}", spec.basis_label(i), spec.basis_label(j), fmt_c(z))?;
                                    }
                                }
                            }
                        }
                    }
                }
                writeln!(out, "time-averaged rates:")?;
                for label in &tdm.labels {
                    for &from in &p.ground {
                        for &to in &p.ground {
                            let r = tdm.time_averaged_rate(label, from, to)?;
                            writeln!(out, "  {label}: {} -> {} = {r:?}", spec.basis_label(from), spec.basis_label(to))?;
                        }
                    }
                }
                writeln!(out, "lindblad-sum identity residual: n/a (basic variant only)")?;
            }
        }
    }

    writeln!(out)?;
    writeln!(out, "excited propagator elements (1/<i|H_NH^-1|j>):")?;
    let h_nh = crate::effective::nh_hamiltonian(&p.h_e, &spec.jumps);
    match excited_propagator_elements(&h_nh, &p.excited) {
        Ok(table) => {
            for e in table {
                let eff = e.effective.map_or("inf".to_string(), fmt_c);
                writeln!(out, "  ({}, {}): {eff}", spec.basis_label(e.row), spec.basis_label(e.col))?;
            }
        }
        Err(Error::SingularPropagator(ch)) => writeln!(out, "  unavailable: {ch}")?,
        Err(e) => return Err(e),
    }

    if concrete.len() > 1 {
        writeln!(out)?;
        for pair in concrete.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let dh = frobenius_distance(&a.h_eff, &b.h_eff)?;
            let mut dl = 0.0;
            for (la, lb) in a.l_eff.iter().zip(&b.l_eff) {
                dl += frobenius_distance(&la.op, &lb.op)?.powi(2);
            }
            writeln!(
                out,
                "difference {} vs {}: ||h_eff||_F = {dh:e}, ||l_eff||_F = {:e}",
                a.variant,
                b.variant,
                dl.sqrt()
            )?;
        }
    }

    if let Some(path) = json_out {
        let doc = Value::from(concrete.iter().map(model_json).collect::<Vec<_>>());
        let mut text = serde_json::to_string_pretty(&doc).expect("json values serialize");
        text.push('\n');
        std::fs::write(path, text)?;
    }
    Ok(EXIT_OK)
}

fn initial_state(spec: &SystemSpec, run: &RunArgs) -> Result<DensityMatrix> {
    let index = run.initial.unwrap_or(spec.ground[0]);
    if index >= spec.dim {
        return Err(Error::InvalidParameter(format!(
            "initial state {index} is outside the {}-dimensional basis",
            spec.dim
        )));
    }
    DensityMatrix::basis_state(spec.dim, index)
}

fn step_size(run: &RunArgs, env_dt: Option<f64>, spec: &SystemSpec) -> Result<f64> {
    match run.dt.or(env_dt) {
        Some(dt) => Ok(dt),
        None => default_dt(spec),
    }
}

/// Writes `t,pop_0,...,pop_{dim-1},trace` with shortest round-trip floats.
pub fn write_csv(traj: &Trajectory, w: &mut dyn Write) -> Result<()> {
    let dim = traj.dim();
    let mut header = String::from("t");
    for i in 0..dim {
        header.push_str(&format!(",pop_{i}"));
    }
    writeln!(w, "{header},trace")?;
    for ((t, pops), state) in traj.times.iter().zip(&traj.populations).zip(&traj.states) {
        let mut line = format!("{t:?}");
        for p in pops {
            line.push_str(&format!(",{p:?}"));
        }
        writeln!(w, "{line},{:?}", state.trace())?;
    }
    Ok(())
}

pub fn cmd_simulate(
    spec: &SystemSpec,
    generator: GeneratorChoice,
    run: &RunArgs,
    env_dt: Option<f64>,
    out: &mut dyn Write,
) -> Result<i32> {
    let rho0 = initial_state(spec, run)?;
    let dt = step_size(run, env_dt, spec)?;
    let traj = match generator {
        GeneratorChoice::Full => integrate(spec, &rho0, run.t_end, dt, run.sample_every),
        GeneratorChoice::Effective(v) => {
            let derived = derive(spec, &partition(spec)?, v)?;
            integrate(derived.generator(), &rho0, run.t_end, dt, run.sample_every)
        }
    }?;
    match &run.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_csv(&traj, &mut w)?;
            w.flush()?;
            writeln!(
                out,
                "wrote {} rows to {} (dt = {:?}, trace drift {:e}, min eigenvalue {:e})",
                traj.times.len(),
                path.display(),
                traj.dt,
                traj.trace_drift,
                traj.min_eigenvalue
            )?;
        }
        None => write_csv(&traj, out)?,
    }
    Ok(EXIT_OK)
}

/// Flat key/value form of the comparison.
pub fn metrics_json(spec: &SystemSpec, m: &Metrics, full: &Trajectory, eff: &Trajectory, variant: Variant) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("variant".into(), Value::from(variant.to_string()));
    map.insert("t_end".into(), Value::from(*full.times.last().unwrap_or(&0.0)));
    map.insert("dt".into(), Value::from(full.dt));
    map.insert("samples".into(), Value::from(full.times.len()));
    map.insert("max_population_deviation".into(), Value::from(m.max_population_deviation));
    map.insert("final_trace_distance".into(), Value::from(m.final_trace_distance));
    map.insert("max_excited_population".into(), Value::from(m.max_excited_population));
    for (&i, d) in m.compared.iter().zip(&m.per_state_deviation) {
        map.insert(format!("deviation_{}", spec.basis_label(i)), Value::from(*d));
    }
    map.insert("trace_drift_full".into(), Value::from(full.trace_drift));
    map.insert("trace_drift_effective".into(), Value::from(eff.trace_drift));
    map.insert("min_eigenvalue_full".into(), Value::from(full.min_eigenvalue));
    map.insert("min_eigenvalue_effective".into(), Value::from(eff.min_eigenvalue));
    map
}

pub fn cmd_compare(
    spec: &SystemSpec,
    variant: Variant,
    run: &RunArgs,
    tolerance: f64,
    env_dt: Option<f64>,
    out: &mut dyn Write,
) -> Result<i32> {
    let rho0 = initial_state(spec, run)?;
    let dt = step_size(run, env_dt, spec)?;
    let derived = derive(spec, &partition(spec)?, variant)?;
    let (full, eff) = std::thread::scope(|s| {
        let full = s.spawn(|| integrate(spec, &rho0, run.t_end, dt, run.sample_every));
        let eff = integrate(derived.generator(), &rho0, run.t_end, dt, run.sample_every);
        (full.join().expect("integration thread panicked"), eff)
    });
    let (full, eff) = (full?, eff?);
    let m = compare(&full, &eff)?;
    let mut text = serde_json::to_string_pretty(&metrics_json(spec, &m, &full, &eff, variant)).expect("json values serialize");
    text.push('\n');
    write_output(run.out.as_deref(), out, text.as_bytes())?;
    let verdict = if m.max_population_deviation <= tolerance { "agree" } else { "disagree" };
    writeln!(
        out,
        "{verdict}: max population deviation {:.3e} (tolerance {tolerance:e}), excited leakage {:.3e}, final trace distance {:.3e}",
        m.max_population_deviation, m.max_excited_population, m.final_trace_distance
    )?;
    Ok(EXIT_OK)
}
