use std::path::Path;

use serde_json::json;

use fluxonium::benchmarking::{
    fit_pb, fit_rb, interleaved_gate_error, run_pb, run_rb, NoiseChannel, PhysicalGate, RbConfig,
};
use fluxonium::circuit::{all_transitions, spectrum_vs_flux, transition_label, CircuitParams, EigenSystem, OperatorKind};
use fluxonium::config::DeviceConfig;
use fluxonium::dissipation::{transition_budget, ChannelName, NoiseEnvironment, RateBudget};
use fluxonium::fitting::{
    fit_spectroscopy, parse_spectroscopy_csv, parse_transition, spectroscopy_to_csv, synthesize_spectroscopy,
};
use fluxonium::protocols::{
    calibrate_pulse_train, fit_decay, linear_grid, run_t102_protocol, simulate_ramsey, simulate_t1, DecayModel,
    T102Context, T102Outcome, TraceData, TraceMeta,
};
use fluxonium::pumping::{cooling_analysis, simulate_qutrit};
use fluxonium::readout::{
    deconvolve_readout_decay, dispersive_shift_from_angle, fit_double_gaussian, parse_shots_csv,
    synthesize_shots, temperature_from_populations, IQHistogram, ShotModel,
};

use crate::cli::*;
use crate::output::{csv, lifetime, num, OutDir};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input data.
    Usage(String),
    Config(String),
    Numeric(fluxonium::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Config(m) => write!(f, "config: {m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<fluxonium::Error> for CliError {
    fn from(e: fluxonium::Error) -> Self {
        match e {
            fluxonium::Error::Config(m) => CliError::Config(m),
            other => CliError::Numeric(other),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Context {
    cfg: DeviceConfig,
    out: OutDir,
    seed: u64,
    flux: Vec<f64>,
}

impl Context {
    fn params(&self, flux: f64) -> CircuitParams {
        self.cfg.circuit.with_flux(flux)
    }

    fn first_flux(&self) -> f64 {
        self.flux[0]
    }
}

fn parse_flux_range(s: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Usage(format!("--flux-range expects A:B:N, got `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok(linear_grid(a, b, n))
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read `{}`: {e}", path.display())))
}

/// Input-file parse failures are argument errors, not numeric ones.
fn input_error(path: &Path) -> impl FnOnce(fluxonium::Error) -> CliError + '_ {
    move |e| CliError::Usage(format!("{}: {e}", path.display()))
}

pub fn dispatch(cli: Cli) -> Result<String> {
    let g = cli.global;
    let cfg = DeviceConfig::resolve(g.config.as_deref())?;
    let flux = match (&g.flux, &g.flux_range) {
        (Some(x), _) => vec![*x],
        (None, Some(r)) => parse_flux_range(r)?,
        (None, None) => vec![cfg.circuit.flux],
    };
    let ctx = Context {
        seed: g.seed.unwrap_or(cfg.seed),
        out: OutDir::create(&g.out)?,
        cfg,
        flux,
    };
    match cli.command {
        Command::Spectrum(a) => spectrum(&ctx, &a),
        Command::Melem(a) => melem(&ctx, &a),
        Command::Budget(a) => budget(&ctx, &a),
        Command::Pump(a) => pump(&ctx, &a),
        Command::ReadoutCal(a) => readout_cal(&ctx, &a),
        Command::Rb(a) => rb(&ctx, &a),
        Command::Pb(a) => pb(&ctx, &a),
        Command::FitSpectro(a) => fit_spectro(&ctx, &a),
        Command::FitTrace(a) => fit_trace(&ctx, &a),
        Command::Calibrate(a) => calibrate(&ctx, &a),
    }
}

fn spectrum(ctx: &Context, a: &SpectrumArgs) -> Result<String> {
    if a.levels < 2 {
        return Err(CliError::Usage("--levels must be at least 2".into()));
    }
    let transitions = all_transitions(a.levels);
    let table = spectrum_vs_flux(&ctx.cfg.circuit, &ctx.flux, &transitions)?;
    ctx.out.write("spectrum.csv", &table.to_csv())?;
    let first: Vec<String> = transitions
        .iter()
        .zip(&table.rows[0])
        .map(|(&(i, j), f)| format!("{}={:.4}", transition_label(i, j), f))
        .collect();
    Ok(format!(
        "spectrum: {} flux points; at flux {}: {} GHz",
        ctx.flux.len(),
        ctx.first_flux(),
        first.join(" ")
    ))
}

fn melem(ctx: &Context, a: &MelemArgs) -> Result<String> {
    if a.levels < 2 {
        return Err(CliError::Usage("--levels must be at least 2".into()));
    }
    let ops: Vec<OperatorKind> = match a.operator {
        OperatorArg::All => OperatorKind::ALL.to_vec(),
        OperatorArg::Charge => vec![OperatorKind::Charge],
        OperatorArg::Phase => vec![OperatorKind::Phase],
        OperatorArg::Halfsin => vec![OperatorKind::HalfSin],
        OperatorArg::Halfcos => vec![OperatorKind::HalfCos],
    };
    let mut rows = Vec::new();
    let mut headline = None;
    for &flux in &ctx.flux {
        let eig = EigenSystem::solve(&ctx.params(flux), a.levels)
            .map_err(|e| fluxonium::Error::AtFlux { flux, source: Box::new(e) })?;
        for &op in &ops {
            for (i, j) in all_transitions(a.levels) {
                let m = eig.matrix_element(op, i, j)?;
                if headline.is_none() && (i, j) == (0, 1) {
                    headline = Some((op, m.magnitude));
                }
                rows.push(vec![num(flux), op.name().into(), i.to_string(), j.to_string(), num(m.value), num(m.magnitude)]);
            }
        }
    }
    let n = rows.len();
    ctx.out
        .write("melem.csv", &csv(&["flux", "operator", "i", "j", "value", "magnitude"], rows))?;
    let (op, m01) = headline.expect("at least one operator and transition");
    Ok(format!(
        "melem: {n} elements; at flux {}: |<0|{}|1>| = {m01:.5}",
        ctx.first_flux(),
        op.name()
    ))
}

fn channel_t1(b: &RateBudget, name: ChannelName) -> String {
    b.channel(name)
        .map_or_else(|| "inf".into(), |c| lifetime((c.rate_per_ms > 0.0).then(|| 1.0 / c.rate_per_ms)))
}

/// Smallest x_qp bound over the quasiparticle channels, with its channel.
fn tightest_xqp(b: &RateBudget) -> Option<(f64, ChannelName)> {
    b.xqp_bounds
        .iter()
        .map(|x| (x.x_qp_max, x.channel))
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

fn budget(ctx: &Context, a: &BudgetArgs) -> Result<String> {
    let p = &ctx.cfg.protocols;
    let t1_01 = a.t1_01.unwrap_or(p.t1_01_ms);
    let t1_02 = a.t1_02.unwrap_or(p.t1_02_ms);
    if !(a.tan_delta_factor > 0.0) {
        return Err(CliError::Usage("--tan-delta-factor must be positive".into()));
    }
    let env = ctx.cfg.noise;
    let env_hi = NoiseEnvironment {
        tan_delta_c: env.tan_delta_c * a.tan_delta_factor,
        ..env
    };
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &flux in &ctx.flux {
        let at = |e: fluxonium::Error| fluxonium::Error::AtFlux { flux, source: Box::new(e) };
        let eig = EigenSystem::solve(&ctx.params(flux), 3).map_err(at)?;
        let b01 = transition_budget(&eig, &env, 0, 1, Some(t1_01)).map_err(at)?;
        let b02 = transition_budget(&eig, &env, 0, 2, Some(t1_02)).map_err(at)?;
        let b02_hi = transition_budget(&eig, &env_hi, 0, 2, None).map_err(at)?;
        let f01 = eig.transition_frequency(0, 1)?;
        let xqp = |b: &RateBudget| tightest_xqp(b).map_or_else(|| "inf".into(), |x| num(x.0));
        rows.push(vec![
            num(flux),
            num(f01),
            lifetime(b01.t1_ms),
            lifetime(b01.t2_ms),
            channel_t1(&b01, ChannelName::Dielectric),
            channel_t1(&b01, ChannelName::QpJunction),
            channel_t1(&b01, ChannelName::QpArray),
            lifetime(b02.t1_ms),
            channel_t1(&b02, ChannelName::Dielectric),
            channel_t1(&b02_hi, ChannelName::Dielectric),
            channel_t1(&b02, ChannelName::QpJunction),
            channel_t1(&b02, ChannelName::QpArray),
            xqp(&b01),
            xqp(&b02),
        ]);
        records.push(json!({ "flux": flux, "f01_ghz": f01, "budget_01": b01, "budget_02": b02 }));
    }
    let header = [
        "flux",
        "f01_ghz",
        "t1_01_ms",
        "t2_01_ms",
        "t1_01_dielectric_ms",
        "t1_01_qp_junction_ms",
        "t1_01_qp_array_ms",
        "t1_02_ms",
        "t1_02_dielectric_ms",
        "t1_02_dielectric_hi_ms",
        "t1_02_qp_junction_ms",
        "t1_02_qp_array_ms",
        "xqp_max_from_t1_01",
        "xqp_max_from_t1_02",
    ];
    ctx.out.write("budget.csv", &csv(&header, rows))?;
    ctx.out.write_json(
        "budget.json",
        &json!({
            "t1_01_measured_ms": t1_01,
            "t1_02_measured_ms": t1_02,
            "tan_delta_hi": env_hi.tan_delta_c,
            "points": records,
        }),
    )?;

    let flux = ctx.first_flux();
    let eig = EigenSystem::solve(&ctx.params(flux), 3)?;
    let b01 = transition_budget(&eig, &env, 0, 1, Some(t1_01))?;
    let b02 = transition_budget(&eig, &env, 0, 2, Some(t1_02))?;
    let bound = |b: &RateBudget, t1: f64, label: &str| match tightest_xqp(b) {
        Some((x, ch)) => format!("T1^{label} >= {t1} ms implies x_qp <= {x:.2e} ({})", ch.as_str()),
        None => format!("T1^{label}: no quasiparticle bound"),
    };
    Ok(format!(
        "budget: flux {flux}: model T1^01 = {} ms, T1^02 = {} ms; {}; {}",
        b01.t1_ms.map_or("inf".into(), |t| format!("{t:.3}")),
        b02.t1_ms.map_or("inf".into(), |t| format!("{t:.3}")),
        bound(&b01, t1_01, "01"),
        bound(&b02, t1_02, "02"),
    ))
}

fn pump(ctx: &Context, a: &PumpArgs) -> Result<String> {
    let p = &ctx.cfg.protocols;
    let flux = ctx.first_flux();
    let params = ctx.params(flux);
    let mut t_ctx = if a.device {
        let env = NoiseEnvironment {
            x_qp: a.x_qp.unwrap_or(ctx.cfg.noise.x_qp),
            ..ctx.cfg.noise
        };
        T102Context::from_device(&params, &env, Some(p.t1_01_ms), p.pumping.tan_delta_23)?
    } else {
        let t1_02 = a.t1_02.unwrap_or(p.t1_02_ms);
        if !(t1_02 > 0.0) {
            return Err(CliError::Usage("--t1-02 must be positive".into()));
        }
        let eig = EigenSystem::solve(&params, 2)?;
        let (p0_th, _) =
            fluxonium::readout::populations_from_temperature(ctx.cfg.noise.temperature, eig.transition_frequency(0, 1)?)?;
        T102Context::new(p.t1_01_ms, p0_th, 1.0 / t1_02)
    };
    t_ctx.omega_12 = p.pumping.omega_12;
    t_ctx.precision = p.pumping.precision;
    t_ctx.noise_sigma = a.noise;
    let grid = t_ctx.default_drive_grid(a.points.unwrap_or(p.pumping.drive_points))?;
    let result = run_t102_protocol(&t_ctx, &grid, ctx.seed)?;
    let rates = t_ctx.rates()?;
    let traj = simulate_qutrit(&rates, [rates.p0_th, rates.p1_th, 0.0], &grid)?;
    let cooling = cooling_analysis(t_ctx.t1_01_ms, t_ctx.p0_th, t_ctx.precision)?;

    let rows = (0..traj.len()).map(|k| {
        vec![
            num(traj.times[k]),
            num(traj.p0[k]),
            num(traj.p1[k]),
            num(traj.p2[k]),
            num(result.trace.signal[k]),
        ]
    });
    ctx.out.write("pump_trace.csv", &csv(&["t_us", "p0", "p1", "p2", "signal"], rows))?;
    let rows = cooling.curve.iter().map(|c| vec![num(c.t1_02_ms), num(c.p0_saturation)]);
    ctx.out.write("cooling.csv", &csv(&["t1_02_ms", "p0_saturation"], rows))?;
    ctx.out.write_json(
        "pump.json",
        &json!({
            "flux": flux,
            "seed": ctx.seed,
            "context": t_ctx,
            "injected_t1_02_ms": if rates.gamma_02 > 0.0 { Some(1.0 / rates.gamma_02) } else { None },
            "outcome": result.outcome,
            "t_eff_ms": result.t_eff_ms,
            "t_eff_err_ms": result.t_eff_err_ms,
            "p0_saturation": result.p0_saturation,
            "blind_window_ms": cooling.blind_window_ms,
            "blind_ratio_center": cooling.blind_ratio_center,
        }),
    )?;
    let injected = if rates.gamma_02 > 0.0 { format!("{:.4} ms", 1.0 / rates.gamma_02) } else { "inf".into() };
    let found = match result.outcome {
        T102Outcome::Estimate { t1_02_ms, stderr_ms } => format!("T1^02 = {t1_02_ms:.4} ± {stderr_ms:.4} ms"),
        T102Outcome::LowerBound { t1_02_ms } => format!("T1^02 > {t1_02_ms:.4} ms (lower bound)"),
    };
    Ok(format!(
        "pump: flux {flux}, p0_th = {:.4}, injected T1^02 = {injected}; T_eff = {:.4} ms; {found}",
        t_ctx.p0_th, result.t_eff_ms
    ))
}

fn readout_cal(ctx: &Context, a: &ReadoutArgs) -> Result<String> {
    let r = &ctx.cfg.protocols.readout;
    let flux = ctx.first_flux();
    let eig = EigenSystem::solve(&ctx.params(flux), 2)?;
    let f01 = eig.transition_frequency(0, 1)?;
    let p0_zero = deconvolve_readout_decay(r.p0_measured, r.p0_infinity, r.t1_ro_us, r.t_ro_us)?;
    let temperature = temperature_from_populations(p0_zero, f01)?;
    let chi = dispersive_shift_from_angle(r.blob_angle_rad, ctx.cfg.noise.kappa)?;

    let (shots, init) = match &a.shots_file {
        Some(path) => (parse_shots_csv(&read_input(path)?).map_err(input_error(path))?, None),
        None => {
            let model = ShotModel::with_angle(r.p0_measured, r.blob_angle_rad, a.separation, 1.0);
            (synthesize_shots(&model, a.shots.unwrap_or(r.shots), ctx.seed)?, Some(model.init()))
        }
    };
    let hist = IQHistogram::from_shots(&shots, a.bins)?;
    let fit = fit_double_gaussian(&hist, init.as_ref())?;
    let nq = hist.q_edges.len() - 1;
    let rows = hist.counts.iter().enumerate().map(|(k, c)| {
        let (ia, qb) = (k / nq, k % nq);
        vec![
            num(0.5 * (hist.i_edges[ia] + hist.i_edges[ia + 1])),
            num(0.5 * (hist.q_edges[qb] + hist.q_edges[qb + 1])),
            c.to_string(),
        ]
    });
    ctx.out.write("histogram.csv", &csv(&["i", "q", "count"], rows))?;
    ctx.out.write_json(
        "readout.json",
        &json!({
            "flux": flux,
            "f01_ghz": f01,
            "p0_measured": r.p0_measured,
            "p0_before_readout": p0_zero,
            "temperature_k": temperature,
            "chi01_mhz": chi,
            "shots": shots.len(),
            "fit": fit,
        }),
    )?;
    Ok(format!(
        "readout-cal: p0(0) = {p0_zero:.4}, T = {:.2} mK, chi01 = {chi:.3} MHz; histogram fit p0 = {:.4} ± {:.4} over {} shots",
        temperature * 1e3,
        fit.p0,
        fit.p0_stderr,
        shots.len()
    ))
}

fn rb_config(ctx: &Context, a: &NoiseArgs) -> Result<RbConfig> {
    let d = &ctx.cfg.protocols.rb;
    let mut noise: NoiseChannel = d.noise;
    if let Some(x) = a.depolarizing {
        noise.depolarizing = x;
    }
    if let Some(x) = a.overrotation {
        noise.overrotation = x;
    }
    if let Some(x) = a.amplitude_damping {
        noise.amplitude_damping = x;
    }
    if let Some(x) = a.dephasing {
        noise.dephasing = x;
    }
    noise.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(RbConfig {
        lengths: a.lengths.clone().unwrap_or_else(|| d.lengths.clone()),
        n_random: a.n_random.unwrap_or(d.n_random),
        noise,
        interleaved: None,
        spam: d.spam,
        shots: a.shots,
        seed: ctx.seed,
    })
}

fn rb(ctx: &Context, a: &RbArgs) -> Result<String> {
    let cfg = rb_config(ctx, &a.noise)?;
    let gate: Option<PhysicalGate> = a
        .interleave
        .as_deref()
        .map(str::parse)
        .transpose()
        .map_err(|e: fluxonium::Error| CliError::Usage(e.to_string()))?;
    let reference = run_rb(&cfg)?;
    let rates = fit_rb(&reference)?;
    ctx.out.write("rb.csv", &reference.to_csv())?;
    let mut summary = format!(
        "rb: p = {:.6}, r_cliff = {:.3e} ± {:.1e}, F_g_avg = {:.6}",
        rates.fit.decay, rates.r_cliff, rates.r_cliff_err, rates.f_gate_avg
    );
    let mut interleaved = serde_json::Value::Null;
    if let Some(g) = gate {
        let inter_cfg = RbConfig {
            interleaved: Some(g),
            ..cfg.clone()
        };
        let inter = run_rb(&inter_cfg)?;
        let inter_rates = fit_rb(&inter)?;
        let r_gate = interleaved_gate_error(inter_rates.fit.decay, rates.fit.decay)?;
        ctx.out.write("rb_interleaved.csv", &inter.to_csv())?;
        interleaved = json!({ "gate": g, "outcome": inter, "rates": inter_rates, "r_gate": r_gate });
        summary.push_str(&format!("; interleaved {}: r_gate = {r_gate:.3e}", g.name()));
    }
    ctx.out.write_json(
        "rb.json",
        &json!({ "config": cfg, "outcome": reference, "rates": rates, "interleaved": interleaved }),
    )?;
    Ok(summary)
}

fn pb(ctx: &Context, a: &PbArgs) -> Result<String> {
    let cfg = rb_config(ctx, &a.noise)?;
    let outcome = run_pb(&cfg)?;
    let rates = fit_pb(&outcome)?;
    ctx.out.write("pb.csv", &outcome.to_csv())?;
    ctx.out
        .write_json("pb.json", &json!({ "config": cfg, "outcome": outcome, "rates": rates }))?;
    Ok(format!(
        "pb: u = {:.6}, r_dec_cliff = {:.3e}, r_dec_gate = {:.3e}, F_g bound = {:.6}",
        rates.fit.decay, rates.r_dec_cliff, rates.r_dec_gate, rates.f_gate_bound
    ))
}

fn fit_spectro(ctx: &Context, a: &FitSpectroArgs) -> Result<String> {
    let circuit = ctx.cfg.circuit;
    let data = match &a.data {
        Some(path) => parse_spectroscopy_csv(&read_input(path)?).map_err(input_error(path))?,
        None => {
            let transitions = a
                .transitions
                .iter()
                .map(|t| parse_transition(t))
                .collect::<fluxonium::Result<Vec<_>>>()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let grid = if ctx.flux.len() > 1 { ctx.flux.clone() } else { linear_grid(0.4, 0.6, 11) };
            let data = synthesize_spectroscopy(&circuit, &grid, &transitions, a.noise_ghz, ctx.seed)?;
            ctx.out.write("spectro_data.csv", &spectroscopy_to_csv(&data))?;
            data
        }
    };
    let init = match &a.init {
        Some(v) => CircuitParams { e_c: v[0], e_l: v[1], e_j: v[2], ..circuit },
        None => circuit,
    };
    let fit = fit_spectroscopy(&data, &init)?;
    ctx.out.write_json(
        "fit_spectro.json",
        &json!({
            "points": data.len(),
            "e_c": fit.e_c,
            "e_l": fit.e_l,
            "e_j": fit.e_j,
            "stderr": fit.stderr,
            "rms_residual_ghz": fit.fit.rms(),
            "iterations": fit.fit.iterations,
        }),
    )?;
    Ok(format!(
        "fit-spectro: {} points; E_C = {:.4} ± {:.4}, E_L = {:.4} ± {:.4}, E_J = {:.4} ± {:.4} GHz",
        data.len(),
        fit.e_c,
        fit.stderr[0],
        fit.e_l,
        fit.stderr[1],
        fit.e_j,
        fit.stderr[2]
    ))
}

fn fit_trace(ctx: &Context, a: &FitTraceArgs) -> Result<String> {
    let p = &ctx.cfg.protocols;
    let (trace, model) = match (&a.data, a.synthetic) {
        (Some(path), _) => {
            let model: DecayModel = a.model.parse().map_err(|e: fluxonium::Error| CliError::Usage(e.to_string()))?;
            let meta = TraceMeta {
                protocol: format!("{model:?}").to_lowercase(),
                flux: None,
                seed: None,
            };
            (TraceData::from_csv(&read_input(path)?, meta).map_err(input_error(path))?, model)
        }
        (None, Some(SyntheticTrace::T1)) => {
            let grid = linear_grid(0.0, 4e3 * p.t1_01_ms, a.points);
            let tr = simulate_t1(p.t1_01_ms, p.spam, &grid, a.noise, ctx.seed)?;
            ctx.out.write("trace.csv", &tr.to_csv())?;
            (tr, DecayModel::Exponential)
        }
        (None, Some(SyntheticTrace::Ramsey)) => {
            let grid = linear_grid(0.0, 2e3 * p.t2_star_ms, a.points);
            let tr = simulate_ramsey(p.t2_star_ms, p.ramsey_detuning_khz, 0.0, p.spam, &grid, a.noise, ctx.seed)?;
            ctx.out.write("trace.csv", &tr.to_csv())?;
            (tr, DecayModel::DampedCosine)
        }
        (None, None) => return Err(CliError::Usage("give --data or --synthetic".into())),
    };
    let fit = fit_decay(&trace, model)?;
    ctx.out.write_json("fit_trace.json", &fit)?;
    let freq = fit
        .frequency_hz
        .map(|f| format!(", Δν = {:.1} ± {:.1} Hz", f, fit.frequency_err_hz.unwrap_or(f64::NAN)))
        .unwrap_or_default();
    Ok(format!(
        "fit-trace: {} points; τ = {:.4} ± {:.4} ms{freq}",
        trace.len(),
        fit.tau_ms(),
        fit.tau_err_us * 1e-3
    ))
}

fn calibrate(ctx: &Context, a: &CalibrateArgs) -> Result<String> {
    if !(a.max > a.min) || a.points < 3 {
        return Err(CliError::Usage("need --max > --min and --points >= 3".into()));
    }
    let grid = linear_grid(a.min, a.max, a.points);
    let cal = calibrate_pulse_train(&grid, a.true_amplitude, ctx.cfg.protocols.spam, a.noise, ctx.seed)?;
    let rows = cal.amplitude_grid.iter().zip(&cal.spread).map(|(x, s)| vec![num(*x), num(*s)]);
    ctx.out.write("calibrate.csv", &csv(&["amplitude", "spread"], rows))?;
    ctx.out.write_json("calibrate.json", &cal)?;
    Ok(format!(
        "calibrate: optimum amplitude {:.4} (true {}), spread {:.4}",
        cal.optimum, a.true_amplitude, cal.spread[cal.optimum_index]
    ))
}
