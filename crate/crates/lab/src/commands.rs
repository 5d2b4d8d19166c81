//! Subcommands. Each is a pure function of the resolved [`RunConfig`].

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use mtee_core::analysis::{min_bmd_trials, pe_asymptote, pe_mtee};
use mtee_core::dcf::{make_tangent, optimal_kappa, DecoderKind, DecoderModel, TangentDecoder};
use mtee_core::rs::{DecodeOutcome, RsCodec};
use mtee_core::sim::{validate_oracle_with, OracleReport, SimReport};
use mtee_core::thresholds::{optimal_thresholds, threshold_shape};
use serde::Serialize;

use crate::config::{DecoderChoice, Format, RunConfig};
use crate::format::{Cell, Table, SCHEMA_VERSION};
use crate::parallel::estimate_pe_parallel;
use crate::LabError;

const LN10: f64 = std::f64::consts::LN_10;

#[derive(Debug, Parser)]
#[command(name = "mtee-lab", version, about = "Multi-trial error/erasure decoding: thresholds, analysis and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Optimal threshold sets (k, T_k) for each tradeoff factor in a sweep.
    Thresholds,
    /// Optimal tangent decoders (z, kappa*, lambda, delta).
    Tangent,
    /// Analytic log10 residual error probability versus trial count.
    Analyze,
    /// Smallest BMD trial count matching each GS trial count.
    Crossover,
    /// Monte Carlo estimate of the residual codeword error rate.
    Simulate,
    /// Cross-check the RS decoder against its capability oracle.
    Validate,
}

/// Command-line overrides; every flag is optional and beats the config file.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct Overrides {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Outer code as n,k,m.
    #[arg(long, global = true, value_parser = parse_code)]
    pub code: Option<(usize, usize, u32)>,
    /// Primitive polynomial bit mask (decimal or 0x-prefixed hex).
    #[arg(long, global = true, value_parser = parse_poly)]
    pub poly: Option<u32>,
    /// BSC crossover probability.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Inner code rate in bits per channel use.
    #[arg(long, global = true)]
    pub inner_rate: Option<f64>,
    /// Inner block length per outer symbol (default m / rate).
    #[arg(long, global = true)]
    pub inner_len: Option<f64>,
    /// Tradeoff factor(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    /// Fixed tangent point.
    #[arg(long, global = true, conflicts_with = "auto")]
    pub kappa: Option<usize>,
    /// Select the optimal tangent point for each trial count.
    #[arg(long, global = true)]
    pub auto: bool,
    /// Outer decoder model.
    #[arg(long, global = true, value_enum)]
    pub decoder: Option<DecoderChoice>,
    /// Trial count(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub z: Option<Vec<usize>>,
    /// Tilt parameter override.
    #[arg(long, global = true)]
    pub s: Option<f64>,
    /// Number of simulated outer codewords.
    #[arg(long, global = true)]
    pub words: Option<u64>,
    /// RNG seed for simulation and validation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Work units the simulation is split into.
    #[arg(long, global = true)]
    pub chunks: Option<usize>,
    /// Worker threads for simulation.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Randomised trials for `validate`.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (default stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Corrupt decoder output during `validate` (harness self-test).
    #[arg(long, global = true, hide = true)]
    pub inject_fault: bool,
}

fn parse_code(s: &str) -> Result<(usize, usize, u32), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [n, k, m] => Ok((
            n.parse().map_err(|e| format!("n: {e}"))?,
            k.parse().map_err(|e| format!("k: {e}"))?,
            m.parse().map_err(|e| format!("m: {e}"))?,
        )),
        _ => Err("expected n,k,m".into()),
    }
}

fn parse_poly(s: &str) -> Result<u32, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u32::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| e.to_string())
}

impl Overrides {
    /// Defaults, then the config file, then these flags.
    pub fn resolve(&self) -> Result<RunConfig, LabError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some((n, k, m)) = self.code {
            if m != cfg.code.m && self.poly.is_none() {
                cfg.code.primitive_polynomial = None;
            }
            cfg.code.n = n;
            cfg.code.k = k;
            cfg.code.m = m;
        }
        if let Some(poly) = self.poly {
            cfg.code.primitive_polynomial = Some(poly);
        }
        if let Some(p) = self.p {
            cfg.channel.p = p;
        }
        if let Some(r) = self.inner_rate {
            cfg.channel.rate_inner = r;
        }
        if let Some(n) = self.inner_len {
            cfg.channel.n_inner = Some(n);
        }
        if let Some(l) = &self.lambda {
            cfg.decoder.lambda = Some(l.clone());
        }
        if let Some(kappa) = self.kappa {
            cfg.decoder.kappa = Some(kappa);
        }
        if self.auto {
            cfg.decoder.kappa = None;
        }
        if let Some(kind) = self.decoder {
            cfg.decoder.kind = kind;
        }
        if let Some(z) = &self.z {
            cfg.z = Some(z.clone());
        }
        if let Some(s) = self.s {
            cfg.s = Some(s);
        }
        if let Some(w) = self.words {
            cfg.sim.words = w;
        }
        if let Some(seed) = self.seed {
            cfg.sim.seed = seed;
            cfg.validate.seed = seed;
        }
        if let Some(c) = self.chunks {
            cfg.sim.chunks = c;
        }
        if let Some(t) = self.threads {
            cfg.sim.threads = Some(t);
        }
        if let Some(t) = self.trials {
            cfg.validate.trials = t;
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        if let Some(out) = &self.out {
            cfg.output.path = Some(out.display().to_string());
        }
        Ok(cfg)
    }
}

/// Rendered command output plus an optional failure to report after it is
/// written (a validation discrepancy still produces its report).
pub struct Output {
    pub bytes: Vec<u8>,
    pub status: Result<(), LabError>,
}

pub fn run(command: Command, cfg: &RunConfig, inject_fault: bool) -> Result<Output, LabError> {
    let mut bytes = Vec::new();
    let format = cfg.output.format;
    let mut status = Ok(());
    match command {
        Command::Thresholds => cmd_thresholds(cfg)?.write(format, &mut bytes)?,
        Command::Tangent => cmd_tangent(cfg)?.write(format, &mut bytes)?,
        Command::Analyze => cmd_analyze(cfg)?.write(format, &mut bytes)?,
        Command::Crossover => cmd_crossover(cfg)?.write(format, &mut bytes)?,
        Command::Simulate => {
            let (report, analytic) = cmd_simulate(cfg)?;
            write_simulation(cfg, &report, analytic, &mut bytes)?;
        }
        Command::Validate => {
            let report = cmd_validate(cfg, inject_fault)?;
            write_validation(cfg, &report, &mut bytes)?;
            if !report.is_clean() {
                status = Err(LabError::Discrepancy(report.disagreements.len()));
            }
        }
    }
    Ok(Output { bytes, status })
}

/// Writes to `--out` or stdout.
pub fn emit(cfg: &RunConfig, bytes: &[u8]) -> Result<(), LabError> {
    match &cfg.output.path {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(bytes)?;
            f.flush()?;
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn code_meta(t: &mut Table, cfg: &RunConfig) -> Result<(), LabError> {
    let code = cfg.outer_code()?;
    t.meta("code", format!("{},{},{}", code.n, code.k, code.field.m));
    t.meta("poly", format!("{:#x}", code.field.primitive_polynomial));
    Ok(())
}

fn channel_meta(t: &mut Table, cfg: &RunConfig) -> Result<(), LabError> {
    let m = cfg.channel_model()?;
    t.meta("p", m.p);
    t.meta("rate_inner", m.rate_inner);
    t.meta("n_inner", m.n_inner);
    t.meta("e0", crate::format::format_float(m.e0));
    t.meta("s", crate::format::format_float(m.s));
    Ok(())
}

pub fn default_lambda_sweep() -> Vec<f64> {
    (11..=20).map(|i| i as f64 / 10.0).collect()
}

/// Columns `lambda,k,threshold,shape`; `shape = T_k s / E0`.
pub fn cmd_thresholds(cfg: &RunConfig) -> Result<Table, LabError> {
    let model = cfg.channel_model()?;
    let lambdas = cfg.decoder.lambda.clone().unwrap_or_else(default_lambda_sweep);
    let zs = cfg.z_list(&[20])?;
    let mut t = Table::new("thresholds", &["lambda", "z", "k", "threshold", "shape"]);
    channel_meta(&mut t, cfg)?;
    for &lambda in &lambdas {
        if !(lambda > 1.0 && lambda <= 2.0) {
            return Err(LabError::Usage(format!("lambda = {lambda} outside (1, 2]")));
        }
        for &z in &zs {
            let ts = optimal_thresholds(lambda, z, model.e0, model.s)?;
            let shape = threshold_shape(lambda, z)?;
            for k in 1..=z {
                t.push(vec![lambda.into(), z.into(), k.into(), ts.t(k).into(), shape[k - 1].into()]);
            }
        }
    }
    Ok(t)
}

/// Columns `z,kappa,lambda,delta`. Independent of the inner channel, so
/// no channel metadata is written.
pub fn cmd_tangent(cfg: &RunConfig) -> Result<Table, LabError> {
    let code = cfg.outer_code()?;
    let mut t = Table::new("tangent", &["z", "kappa", "lambda", "delta"]);
    code_meta(&mut t, cfg)?;
    for z in cfg.z_list(&[1, 5, 10])? {
        let dec = match cfg.decoder.kappa {
            Some(kappa) => make_tangent(&code, kappa)?,
            None => optimal_kappa(&code, z)?,
        };
        t.push(vec![z.into(), dec.kappa.into(), dec.lambda.into(), dec.delta.into()]);
    }
    Ok(t)
}

fn tangent_for(cfg: &RunConfig, z: usize) -> Result<TangentDecoder, LabError> {
    let code = cfg.outer_code()?;
    Ok(match cfg.decoder.kappa {
        Some(kappa) => make_tangent(&code, kappa)?,
        None => optimal_kappa(&code, z)?,
    })
}

/// Tangent decoder with the largest `delta`, the one that governs the
/// `z -> inf` limit (smallest `kappa` on ties).
fn widest_tangent(cfg: &RunConfig) -> Result<TangentDecoder, LabError> {
    let code = cfg.outer_code()?;
    if let Some(kappa) = cfg.decoder.kappa {
        return Ok(make_tangent(&code, kappa)?);
    }
    let mut best = make_tangent(&code, 0)?;
    for kappa in 1..code.d {
        let t = make_tangent(&code, kappa)?;
        if t.delta > best.delta {
            best = t;
        }
    }
    Ok(best)
}

/// Columns `z,log10_pe_bmd,log10_pe_tangent,kappa,lambda,delta`, with a
/// final `z = inf` asymptote row.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<Table, LabError> {
    let code = cfg.outer_code()?;
    let model = cfg.channel_model()?;
    let zs = cfg.z_list(&(1..=20).collect::<Vec<_>>())?;
    let mut t = Table::new(
        "analyze",
        &["z", "log10_pe_bmd", "log10_pe_tangent", "kappa", "lambda", "delta"],
    );
    code_meta(&mut t, cfg)?;
    channel_meta(&mut t, cfg)?;
    for z in zs {
        let bmd = pe_mtee(model.e0, model.n_inner, 2.0, code.d - 1, z)?;
        let tan = tangent_for(cfg, z)?;
        let gs = pe_mtee(model.e0, model.n_inner, tan.lambda, tan.delta, z)?;
        t.push(vec![
            z.into(),
            bmd.log10_pe().into(),
            gs.log10_pe().into(),
            tan.kappa.into(),
            tan.lambda.into(),
            tan.delta.into(),
        ]);
    }
    let wide = widest_tangent(cfg)?;
    t.push(vec![
        "inf".into(),
        (pe_asymptote(model.e0, model.n_inner, code.d - 1) / LN10).into(),
        (pe_asymptote(model.e0, model.n_inner, wide.delta) / LN10).into(),
        wide.kappa.into(),
        wide.lambda.into(),
        wide.delta.into(),
    ]);
    Ok(t)
}

/// Columns `z_gs,kappa,lambda,delta,gs_exponent,z_bmd`; `z_bmd` is empty
/// when no finite BMD trial count suffices.
pub fn cmd_crossover(cfg: &RunConfig) -> Result<Table, LabError> {
    let code = cfg.outer_code()?;
    let mut t = Table::new(
        "crossover",
        &["z_gs", "kappa", "lambda", "delta", "gs_exponent", "z_bmd"],
    );
    code_meta(&mut t, cfg)?;
    for z in cfg.z_list(&[1, 5, 10])? {
        let c = min_bmd_trials(&code, z)?;
        t.push(vec![
            z.into(),
            c.tangent.kappa.into(),
            c.tangent.lambda.into(),
            c.tangent.delta.into(),
            c.gs_exponent.into(),
            c.z_bmd.into(),
        ]);
    }
    Ok(t)
}

/// Decoder model and the tradeoff factor its thresholds are optimised for.
pub fn decoder_for(cfg: &RunConfig, z: usize) -> Result<(DecoderModel, f64), LabError> {
    let code = cfg.outer_code()?;
    let (decoder, lambda) = match cfg.decoder.kind {
        DecoderChoice::Bmd => (DecoderModel::bmd(code), 2.0),
        DecoderChoice::Tangent => {
            let t = tangent_for(cfg, z)?;
            (DecoderModel { kind: DecoderKind::Tangent(t), code }, t.lambda)
        }
        DecoderChoice::Gs => (DecoderModel::gs(code), tangent_for(cfg, z)?.lambda),
    };
    let lambda = match cfg.decoder.lambda.as_deref() {
        None => lambda,
        Some([l]) => *l,
        Some(_) => return Err(LabError::Usage("simulate takes a single lambda".into())),
    };
    Ok((decoder, lambda))
}

/// Runs the simulation; also returns the analytic `log10 P_e` where one
/// exists (BMD and tangent decoders with thresholds at their own factor).
pub fn cmd_simulate(cfg: &RunConfig) -> Result<(SimReport, Option<f64>), LabError> {
    if cfg.sim.words == 0 {
        return Err(LabError::Usage("--words must be >= 1".into()));
    }
    let z = match cfg.z_list(&[1])?.as_slice() {
        [z] => *z,
        _ => return Err(LabError::Usage("simulate takes a single trial count".into())),
    };
    let model = cfg.channel_model()?;
    let (decoder, lambda) = decoder_for(cfg, z)?;
    let ts = optimal_thresholds(lambda, z, model.e0, model.s)?;
    let report = estimate_pe_parallel(
        &model,
        &decoder,
        &ts,
        cfg.sim.words,
        cfg.sim.seed,
        cfg.sim.chunks,
        cfg.sim.threads,
    )?;
    let analytic = match (decoder.lambda(), decoder.kind) {
        (Some(l), DecoderKind::Bmd | DecoderKind::Tangent(_)) if l == lambda => {
            Some(pe_mtee(model.e0, model.n_inner, l, decoder.delta(), z)?.log10_pe())
        }
        _ => None,
    };
    Ok((report, analytic))
}

#[derive(Serialize)]
struct SimulationJson<'a> {
    schema: &'static str,
    version: u32,
    report: &'a SimReport,
    log10_pe_analytic: Option<f64>,
}

fn write_simulation(
    cfg: &RunConfig,
    report: &SimReport,
    analytic: Option<f64>,
    out: &mut Vec<u8>,
) -> Result<(), LabError> {
    match cfg.output.format {
        Format::Json => {
            serde_json::to_writer_pretty(
                &mut *out,
                &SimulationJson {
                    schema: "simulate",
                    version: SCHEMA_VERSION,
                    report,
                    log10_pe_analytic: analytic,
                },
            )?;
            out.push(b'\n');
        }
        Format::Csv => {
            let mut t = Table::new(
                "simulate",
                &[
                    "decoder",
                    "z",
                    "lambda",
                    "delta",
                    "words",
                    "failures",
                    "pe_hat",
                    "ci95_low",
                    "ci95_high",
                    "log10_pe_hat",
                    "log10_pe_analytic",
                    "trial_successes",
                ],
            );
            code_meta(&mut t, cfg)?;
            channel_meta(&mut t, cfg)?;
            t.meta("seed", report.seed);
            let kind = match report.decoder.kind {
                DecoderKind::Bmd => "bmd",
                DecoderKind::GsInfinite => "gs",
                DecoderKind::Tangent(_) => "tangent",
            };
            let successes: Vec<String> = report.trial_successes.iter().map(u64::to_string).collect();
            t.push(vec![
                kind.into(),
                report.thresholds.z().into(),
                report.thresholds.lambda.into(),
                report.decoder.delta().into(),
                report.num_words.into(),
                report.num_failures.into(),
                report.pe_hat.into(),
                report.ci95.0.into(),
                report.ci95.1.into(),
                report.pe_hat.log10().into(),
                analytic.into(),
                Cell::Text(successes.join(";")),
            ]);
            t.write_csv(out)?;
        }
    }
    Ok(())
}

/// Randomised RS decoder versus capability-oracle check. With
/// `inject_fault` the decoder's output is corrupted in one symbol.
pub fn cmd_validate(cfg: &RunConfig, inject_fault: bool) -> Result<OracleReport, LabError> {
    if cfg.validate.trials == 0 {
        return Err(LabError::Usage("--trials must be >= 1".into()));
    }
    let codec = RsCodec::new(cfg.outer_code()?)?;
    let report = validate_oracle_with(&codec, cfg.validate.trials, cfg.validate.seed, |c, w| {
        let mut out = c.decode(w)?;
        if inject_fault {
            if let DecodeOutcome::Decoded { codeword, .. } = &mut out {
                codeword[0] ^= 1;
            }
        }
        Ok(out)
    })?;
    Ok(report)
}

fn write_validation(cfg: &RunConfig, report: &OracleReport, out: &mut Vec<u8>) -> Result<(), LabError> {
    match cfg.output.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            out.push(b'\n');
        }
        Format::Csv => {
            let mut t = Table::new(
                "validate",
                &["trial", "errors", "erasures", "discrepancy"],
            );
            code_meta(&mut t, cfg)?;
            t.meta("seed", cfg.validate.seed);
            t.meta("trials", report.trials);
            t.meta("guaranteed", report.guaranteed);
            t.meta("decoded_outside", report.decoded_outside);
            t.meta("disagreements", report.disagreements.len());
            for d in &report.disagreements {
                t.push(vec![
                    d.trial.into(),
                    d.errors.into(),
                    d.erasures.into(),
                    Cell::Text(format!("{:?}", d.kind)),
                ]);
            }
            t.write_csv(out)?;
        }
    }
    Ok(())
}
