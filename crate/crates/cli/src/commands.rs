use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use covertq::capacity::{excitation_sweep, CapacityReport, SweepRow};
use covertq::channel::{build_covert_channel, ChannelSpec, StinespringIsometry};
use covertq::eg::{eg_report, sample_eg_code, DecouplingTarget, EgOptions, EgToyCode, PovmChoice, DEFAULT_EG_MAX_DIM};
use covertq::error::Error;
use covertq::operator::Tolerances;
use covertq::sim::{
    covertness_report, dense_dim, resolvability_experiment, sample_codebook, secrecy_report,
    sqrt_measurement_decoder, SimConfig, MAX_DECODER_CODEWORDS,
};

use crate::args::{CapacityArgs, EgdemoArgs, PovmArg, SimulateArgs, SweepArgs, TargetArg, ValidateArgs};
use crate::output::{csv_table, emit, json as to_json, RunManifest};
use crate::CliError;

/// Overrides every dense budget when set.
pub const MAX_DIM_ENV: &str = "COVERTQ_MAX_DENSE_DIM";

/// Default excitation probabilities when no channel is given.
const SIMULATE_DEFAULT_GAMMA: f64 = 0.25;
const EGDEMO_DEFAULT_GAMMA: f64 = 0.1;

pub struct Context {
    pub args: Vec<String>,
    pub tol: Tolerances,
}

impl Context {
    fn manifest(&self, command: &str, spec: Option<&ChannelSpec>, parameters: Value, seed: Option<u64>) -> Result<RunManifest, CliError> {
        Ok(RunManifest {
            command: command.into(),
            channel_spec: spec.map(serde_json::to_value).transpose().map_err(|e| CliError::Io(e.to_string()))?,
            parameters,
            seed,
            args: self.args.clone(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            toolkit_version: env!("CARGO_PKG_VERSION").into(),
            output_path: None,
        })
    }
}

fn env_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(MAX_DIM_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Input(format!("{MAX_DIM_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn read_spec(path: &Path) -> Result<ChannelSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(ChannelSpec::from_json(&text)?)
}

fn load_channel(source: &crate::args::ChannelSource, default_gamma: f64) -> Result<ChannelSpec, CliError> {
    match (&source.channel, source.excitation) {
        (Some(path), _) => read_spec(path),
        (None, gamma) => Ok(ChannelSpec::Excitation {
            gamma: gamma.unwrap_or(default_gamma),
        }),
    }
}

fn params<T: serde::Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

pub fn capacity(ctx: &Context, a: &CapacityArgs) -> Result<(), CliError> {
    let spec = read_spec(&a.spec)?;
    let report = CapacityReport::from_channel(&spec.covert_channel(&ctx.tol)?, &ctx.tol)?;
    let manifest = ctx.manifest("capacity", Some(&spec), params(a), None)?;
    let out = a.output.out.as_deref();
    emit(out, &to_json(&report)?, manifest)?;
    if a.output.bits {
        // display copy; stored values stay in nats
        print!("{}", to_json(&report.in_bits())?);
    } else if out.is_some() {
        print!("{}", to_json(&report)?);
    }
    Ok(())
}

fn sweep_rows(rows: &[SweepRow], bits: bool) -> Vec<Vec<f64>> {
    let scale = if bits { std::f64::consts::LN_2 } else { 1.0 };
    rows.iter()
        .map(|r| {
            let mut v = r.values().to_vec();
            // gamma and chi2 are not rates
            for (i, x) in v.iter_mut().enumerate() {
                if i != 0 && i != 3 {
                    *x /= scale;
                }
            }
            v
        })
        .collect()
}

pub fn sweep(ctx: &Context, a: &SweepArgs) -> Result<(), CliError> {
    let rows = excitation_sweep(a.from, a.to, a.steps, &ctx.tol)?;
    let manifest = ctx.manifest("sweep", None, params(a), None)?;
    let out = a.output.out.as_deref();
    emit(out, &csv_table(&SweepRow::HEADER, &sweep_rows(&rows, false))?, manifest)?;
    if a.output.bits {
        print!("{}", csv_table(&SweepRow::HEADER, &sweep_rows(&rows, true))?);
    }
    Ok(())
}

fn sim_config(a: &SimulateArgs) -> Result<SimConfig, CliError> {
    let mut cfg = match (a.gamma, a.alpha) {
        (_, Some(alpha)) => SimConfig::with_alpha(a.n, alpha, a.m, a.l, a.seed)?,
        (gamma, None) => SimConfig::new(a.n, gamma.unwrap_or(1.0), a.m, a.l, a.seed)?,
    };
    cfg.samples = a.samples;
    if let Some(s) = &a.s_grid {
        cfg.s_grid = s.clone();
    }
    if let Some(b) = &a.beta_grid {
        cfg.beta_grid = b.clone();
    }
    cfg.a_threshold = a.threshold;
    if let Some(cap) = a.max_dense_dim.or(env_cap()?) {
        cfg.max_dense_dim = cap;
    }
    cfg.commuting_fast_path = a.commuting_fast_path;
    if let Some(d) = a.mc_draws {
        cfg.monte_carlo_draws = d;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn simulate(ctx: &Context, a: &SimulateArgs) -> Result<(), CliError> {
    let spec = load_channel(&a.channel, SIMULATE_DEFAULT_GAMMA)?;
    let ch = spec.covert_channel(&ctx.tol)?;
    let cfg = sim_config(a)?;
    let cb = sample_codebook(&cfg);
    let covertness = covertness_report(&cb, &ch, &cfg, &ctx.tol)?;
    let beyond_budget = dense_dim(ch.omega0().dim(), cfg.n, cfg.max_dense_dim).is_err();
    let (secrecy, decoder, resolvability) = if beyond_budget {
        (Value::Null, Value::Null, Value::Null)
    } else {
        let secrecy = serde_json::to_value(secrecy_report(&cb, &ch, &cfg, &ctx.tol)?);
        let decoder = if cb.len() <= MAX_DECODER_CODEWORDS {
            serde_json::to_value(sqrt_measurement_decoder(&cb, &ch, &cfg, &ctx.tol)?)
        } else {
            Ok(Value::Null)
        };
        let resolvability = serde_json::to_value(resolvability_experiment(&cfg, &ch, &ctx.tol)?);
        let io = |e: serde_json::Error| CliError::Io(e.to_string());
        (secrecy.map_err(io)?, decoder.map_err(io)?, resolvability.map_err(io)?)
    };
    let report = json!({
        "config": cfg,
        "covertness": covertness,
        "secrecy": secrecy,
        "decoder": decoder,
        "resolvability": resolvability,
    });
    let manifest = ctx.manifest("simulate", Some(&spec), params(a), Some(cfg.seed))?;
    emit(a.output.out.as_deref(), &to_json(&report)?, manifest)
}

fn eg_options(a: &EgdemoArgs, v: &StinespringIsometry, tol: &Tolerances) -> Result<EgOptions, CliError> {
    let povm = match a.povm {
        PovmArg::Srm => PovmChoice::SquareRoot { threshold: a.threshold },
        PovmArg::Projectors => PovmChoice::CodewordProjectors,
        PovmArg::Auto => match build_covert_channel(v, tol) {
            Err(Error::TrivialTest) => PovmChoice::CodewordProjectors,
            _ => PovmChoice::SquareRoot { threshold: a.threshold },
        },
    };
    Ok(EgOptions {
        alpha: a.alpha,
        target: match a.target {
            TargetArg::OmegaAlpha => DecouplingTarget::OmegaAlpha,
            TargetArg::SelfTarget => DecouplingTarget::SelfTarget,
        },
        align: !a.no_align,
        povm,
        max_dim: a.max_dim.or(env_cap()?).unwrap_or(DEFAULT_EG_MAX_DIM),
    })
}

pub fn egdemo(ctx: &Context, a: &EgdemoArgs) -> Result<(), CliError> {
    let spec = load_channel(&a.channel, EGDEMO_DEFAULT_GAMMA)?;
    let v = spec
        .isometry(&ctx.tol)?
        .ok_or_else(|| CliError::Input("egdemo needs a channel (excitation or kraus), not bare output states".into()))?;
    let code = match &a.words {
        Some(words) => {
            let refs: Vec<&str> = words.iter().map(String::as_str).collect();
            EgToyCode::from_strings(a.t, a.l, &refs)?
        }
        None => sample_eg_code(a.n, a.t, a.l, a.alpha, a.seed)?,
    };
    let opts = eg_options(a, &v, &ctx.tol)?;
    let (used, report) = eg_report(&code, &v, &opts, &ctx.tol)?;
    let out = json!({
        "config": {
            "n": used.n,
            "T": used.message_dim,
            "lSize": used.l_size,
            "alpha": a.alpha,
            "seed": a.seed,
            "options": opts,
            "code": used,
        },
        "fidelity": report.fidelity,
        "covertDivergence": report.covert_divergence,
        "traceDistanceGHZ": report.trace_distance_ghz,
        "bestJ": report.best_j,
        "perJFidelity": report.per_j_fidelity,
        "target": report.target,
        "perStepDiagnostics": report.per_step_diagnostics,
    });
    let manifest = ctx.manifest("egdemo", Some(&spec), params(a), Some(a.seed))?;
    emit(a.output.out.as_deref(), &to_json(&out)?, manifest)
}

/// Prints a summary of the spec; support-assumption failures exit with code 4.
pub fn validate(ctx: &Context, a: &ValidateArgs) -> Result<(), CliError> {
    let spec = read_spec(&a.spec)?;
    let kind = match &spec {
        ChannelSpec::Excitation { .. } => "excitation",
        ChannelSpec::Kraus { .. } => "kraus",
        ChannelSpec::CqPair { .. } => "cq-pair",
    };
    let dims = spec.isometry(&ctx.tol)?.map(|v| json!({"in": v.in_dim(), "bob": v.dim_b(), "willie": v.dim_w()}));
    let ch = spec.covert_channel(&ctx.tol)?;
    let summary = json!({
        "valid": true,
        "kind": kind,
        "dims": dims,
        "bobDim": ch.sigma0().dim(),
        "willieDim": ch.omega0().dim(),
    });
    print!("{}", to_json(&summary)?);
    Ok(())
}
