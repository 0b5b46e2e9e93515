use std::f64::consts::PI;
use std::fs::File;

use rayon::prelude::*;
use serde_json::{json, Value};
use weylsys::classify::{class_angles, classify_alpha_system, classify_lsystem_alpha, classify_system, AngleSet};
use weylsys::funclass::{extract_measure, SampledFunction};
use weylsys::lsystem::{realize, RealizationTarget};
use weylsys::malpha::{m_alpha, neg_m_alpha, AlphaParam};
use weylsys::potentials::{bessel_potential, free_potential, read_table_csv, table_potential, Potential};
use weylsys::verify::{run_verification, VerifyConfig};
use weylsys::weyl::{EvalMode, MFunction};
use weylsys::{Complex64, ExtendedReal, ToleranceConfig};

use crate::args::{AlphaSel, Command, GlobalOpts, Mode, Target};
use crate::format::{complex, complex_text, ext, ext_text, opt, opt_text, real, real_text};
use crate::CliError;

/// A command result in both output encodings. CSV rows follow `header`.
pub struct Output {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Printed to stderr after the output is written.
    pub notes: Vec<String>,
    pub failed_verification: bool,
}

impl Output {
    fn new(json: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Output {
            json,
            header,
            rows,
            notes: Vec::new(),
            failed_verification: false,
        }
    }
}

pub fn build_tol(spec: Option<&str>) -> Result<ToleranceConfig, CliError> {
    let mut t = ToleranceConfig::default();
    if let Some(spec) = spec {
        if let Ok(v) = spec.parse::<f64>() {
            t.abs_tol = v;
            t.rel_tol = v;
        } else {
            for part in spec.split(',') {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("bad --tol entry '{part}', expected key=value")))?;
                let v: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad --tol value '{value}'")))?;
                match key.trim() {
                    "abs" | "abs_tol" => t.abs_tol = v,
                    "rel" | "rel_tol" => t.rel_tol = v,
                    "psd_slack" => t.psd_slack = v,
                    "divergence_bound" => t.divergence_bound = v,
                    "boundary_tol" => t.boundary_tol = v,
                    other => return Err(CliError::Usage(format!("unknown --tol key '{other}'"))),
                }
            }
        }
    }
    t.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(t)
}

pub fn parse_potential(spec: &str) -> Result<Potential, CliError> {
    let usage = |msg: String| CliError::Usage(format!("--potential {spec}: {msg}"));
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| usage("expected bessel:NU, free:ELL or table:PATH".into()))?;
    let number = |s: &str| s.parse::<f64>().map_err(|_| usage(format!("'{s}' is not a number")));
    let p = match kind {
        "bessel" => bessel_potential(number(arg)?),
        "free" => free_potential(number(arg)?),
        "table" => {
            let file = File::open(arg).map_err(|e| usage(e.to_string()))?;
            let rows = read_table_csv(file).map_err(|e| usage(e.to_string()))?;
            let ell = rows.first().map(|r| r.0).unwrap_or(0.0);
            table_potential(ell, &rows)
        }
        other => return Err(usage(format!("unknown potential kind '{other}'"))),
    };
    p.map_err(|e| usage(e.to_string()))
}

fn build_mf(g: &GlobalOpts, tol: &ToleranceConfig) -> Result<MFunction, CliError> {
    let p = parse_potential(&g.potential)?;
    let mf = match g.mode {
        Mode::Auto => {
            let mf = MFunction::auto(p, tol.clone())?;
            match g.xmax {
                Some(x) => mf.with_x_max(x)?,
                None => mf,
            }
        }
        Mode::Closed => MFunction::new(p, EvalMode::ClosedForm, g.xmax, tol.clone())?,
        Mode::Engine => MFunction::new(p, EvalMode::RiccatiEngine, g.xmax, tol.clone())?,
    };
    Ok(mf)
}

fn alpha_param(sel: &AlphaSel) -> Result<Option<AlphaParam>, CliError> {
    Ok(match (sel.alpha, sel.tan_alpha) {
        (Some(a), _) => Some(AlphaParam::new(a)?),
        (None, Some(t)) => Some(AlphaParam::from_tan(t)?),
        (None, None) => None,
    })
}

fn require_alpha(sel: &AlphaSel) -> Result<AlphaParam, CliError> {
    alpha_param(sel)?.ok_or_else(|| CliError::Usage("one of --alpha or --tan-alpha is required".into()))
}

fn mode_name(mf: &MFunction) -> &'static str {
    match mf.mode {
        EvalMode::ClosedForm => "closed_form",
        EvalMode::RiccatiEngine => "riccati_engine",
    }
}

/// Evaluates `f` over `items` in parallel; results stay in input order and
/// the first failure in that order is reported.
fn par_map<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> weylsys::Result<R> + Sync + Send,
) -> Result<Vec<R>, CliError> {
    let out: Vec<weylsys::Result<R>> = items.par_iter().map(f).collect();
    out.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

fn header(g: &GlobalOpts, command: &str, mf: &MFunction) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("potential".into(), json!(g.potential));
    m.insert("mode".into(), json!(mode_name(mf)));
    m.insert(
        "x_max".into(),
        match mf.mode {
            EvalMode::RiccatiEngine => real(mf.x_max),
            EvalMode::ClosedForm => Value::Null,
        },
    );
    m
}

fn alpha_json(a: AlphaParam) -> Value {
    json!({ "alpha": real(a.alpha), "tan_alpha": ext(a.tan_alpha) })
}

pub fn run(g: &GlobalOpts, cmd: &Command) -> Result<Output, CliError> {
    let tol = build_tol(g.tol.as_deref())?;
    if let Command::Verify = cmd {
        // the suite fixes its own potentials; still reject a malformed spec
        parse_potential(&g.potential)?;
        return verify(g, tol);
    }
    let mf = build_mf(g, &tol)?;
    match cmd {
        Command::EvalM { z } => eval_m(g, &mf, z),
        Command::EvalMalpha { alpha, z } => eval_malpha(g, &mf, require_alpha(alpha)?, z),
        Command::Realize { target, alpha, z } => realize_cmd(g, mf, *target, alpha, z),
        Command::Classify { alpha, mu, h } => classify(g, &mf, alpha, *mu, *h),
        Command::RegionScan { n, alphas } => region_scan(g, &mf, *n, alphas.as_deref()),
        Command::Measure { alpha, t_min, t_max, n_t } => measure(g, mf, alpha, *t_min, *t_max, *n_t),
        Command::Verify => unreachable!(),
    }
}

fn eval_m(g: &GlobalOpts, mf: &MFunction, zs: &[Complex64]) -> Result<Output, CliError> {
    let values = par_map(zs, |&z| mf.eval(z))?;
    let mut j = header(g, "eval-m", mf);
    let rows: Vec<Value> = zs
        .iter()
        .zip(&values)
        .map(|(&z, v)| json!({ "z": complex(z), "m": complex(v.value), "err_estimate": real(v.err_estimate) }))
        .collect();
    j.insert("rows".into(), Value::Array(rows));
    let csv = zs
        .iter()
        .zip(&values)
        .map(|(z, v)| {
            vec![
                real_text(z.re),
                real_text(z.im),
                real_text(v.value.re),
                real_text(v.value.im),
                real_text(v.err_estimate),
            ]
        })
        .collect();
    Ok(Output::new(Value::Object(j), vec!["z_re", "z_im", "m_re", "m_im", "err_estimate"], csv))
}

fn eval_malpha(g: &GlobalOpts, mf: &MFunction, a: AlphaParam, zs: &[Complex64]) -> Result<Output, CliError> {
    let tol = &mf.tol;
    let values = par_map(zs, |&z| {
        let m = mf.value(z)?;
        Ok((m_alpha(m, a, tol)?, neg_m_alpha(m, a, tol)?))
    })?;
    let mut j = header(g, "eval-malpha", mf);
    j.insert("alpha".into(), alpha_json(a));
    let rows = zs
        .iter()
        .zip(&values)
        .map(|(&z, &(ma, nma))| json!({ "z": complex(z), "m_alpha": complex(ma), "neg_m_alpha": complex(nma) }))
        .collect();
    j.insert("rows".into(), Value::Array(rows));
    let csv = zs
        .iter()
        .zip(&values)
        .map(|(z, (ma, _))| vec![real_text(z.re), real_text(z.im), real_text(ma.re), real_text(ma.im)])
        .collect();
    Ok(Output::new(Value::Object(j), vec!["z_re", "z_im", "m_alpha_re", "m_alpha_im"], csv))
}

fn realize_cmd(g: &GlobalOpts, mf: MFunction, target: Target, sel: &AlphaSel, zs: &[Complex64]) -> Result<Output, CliError> {
    let (rt, name) = match target {
        Target::NegMInf => (RealizationTarget::NegMInfinity, "neg_m_inf"),
        Target::RecipMInf => (RealizationTarget::RecipMInfinity, "recip_m_inf"),
        Target::NegMAlpha => (RealizationTarget::NegMAlpha(require_alpha(sel)?), "neg_m_alpha"),
    };
    if target != Target::NegMAlpha && (sel.alpha.is_some() || sel.tan_alpha.is_some()) {
        return Err(CliError::Usage("--alpha/--tan-alpha only apply to --target neg-m-alpha".into()));
    }
    let mut j = header(g, "realize", &mf);
    let sys = realize(rt, mf);
    let tol = sys.mf.tol.clone();
    let values = par_map(zs, |&z| {
        let m = sys.mf.value(z)?;
        let target_value = match rt {
            RealizationTarget::NegMInfinity => -m,
            RealizationTarget::RecipMInfinity => 1.0 / m,
            RealizationTarget::NegMAlpha(a) => neg_m_alpha(m, a, &tol)?,
        };
        Ok((sys.impedance(z)?, sys.transfer(z)?, sys.vw_consistency(z)?, target_value))
    })?;
    let xi = sys.quasi_kernel_xi().xi;
    j.insert("target".into(), json!(name));
    j.insert("mu".into(), ext(sys.mu));
    j.insert("h".into(), complex(sys.h));
    j.insert("xi".into(), ext(xi));
    let rows = zs
        .iter()
        .zip(&values)
        .map(|(&z, &(v, w, r, t))| {
            json!({
                "z": complex(z),
                "impedance": complex(v),
                "transfer": complex(w),
                "vw_residual": real(r),
                "target_value": complex(t),
            })
        })
        .collect();
    j.insert("rows".into(), Value::Array(rows));
    let csv = zs
        .iter()
        .zip(&values)
        .map(|(z, (v, w, r, _))| {
            vec![
                ext_text(sys.mu),
                ext_text(xi),
                real_text(z.re),
                real_text(z.im),
                real_text(v.re),
                real_text(v.im),
                real_text(w.re),
                real_text(w.im),
                real_text(*r),
            ]
        })
        .collect();
    Ok(Output::new(
        Value::Object(j),
        vec!["mu", "xi", "z_re", "z_im", "v_re", "v_im", "w_re", "w_im", "vw_residual"],
        csv,
    ))
}

fn angles_json(s: &AngleSet) -> Value {
    json!({
        "tan_beta1": real(s.tan_beta1),
        "beta1": real(s.beta1),
        "tan_beta2": ext(s.tan_beta2),
        "beta2": real(s.beta2),
        "tan_beta_class": opt(s.tan_beta_class),
        "beta_class": opt(s.beta_class),
        "tan_beta_universal": opt(s.tan_beta_universal),
        "beta_universal": opt(s.beta_universal),
        "main_operator_angle": real(s.main_operator_angle),
    })
}

/// Angles exist for accumulative `Θ_{tan α, i}` with finite `m0`.
fn angles_for(a: AlphaParam, m0: ExtendedReal, accumulative: bool, tol: &ToleranceConfig) -> Option<AngleSet> {
    match m0 {
        ExtendedReal::Finite(m0) if accumulative => class_angles(a, m0, tol).ok(),
        _ => None,
    }
}

fn classify(
    g: &GlobalOpts,
    mf: &MFunction,
    sel: &AlphaSel,
    mu: Option<ExtendedReal>,
    h: Option<Complex64>,
) -> Result<Output, CliError> {
    let tol = &mf.tol;
    let m0 = mf.m_minus_zero()?;
    let (mu, h, verdict, angles) = match (alpha_param(sel)?, mu) {
        (Some(a), _) => {
            let v = classify_alpha_system(a, m0, tol);
            let angles = angles_for(a, m0, v.lsystem_class.is_accumulative(), tol);
            (a.tan_alpha, Complex64::i(), v, angles)
        }
        (None, Some(mu)) => {
            let h = h.unwrap_or(Complex64::i());
            if h.im <= 0.0 {
                return Err(CliError::Usage(format!("--h must have positive imaginary part, got {}", complex_text(h))));
            }
            let v = classify_system(mu, h, m0, tol);
            let angles = if h == Complex64::i() {
                angles_for(AlphaParam::from_tan(mu)?, m0, v.lsystem_class.is_accumulative(), tol)
            } else {
                None
            };
            (mu, h, v, angles)
        }
        (None, None) => {
            return Err(CliError::Usage("classify needs --alpha, --tan-alpha or --mu".into()));
        }
    };
    let mut j = header(g, "classify", mf);
    j.insert("m0".into(), ext(m0));
    j.insert("mu".into(), ext(mu));
    j.insert("h".into(), complex(h));
    j.insert("class".into(), json!(verdict.lsystem_class.as_str()));
    j.insert(
        "verdict".into(),
        serde_json::to_value(verdict).map_err(|e| CliError::Usage(e.to_string()))?,
    );
    j.insert("angles".into(), angles.as_ref().map(angles_json).unwrap_or(Value::Null));
    let star = verdict
        .star_ext_class
        .map(|s| serde_json::to_value(s).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
        .unwrap_or_default();
    let row = vec![
        ext_text(m0),
        ext_text(mu),
        real_text(h.re),
        real_text(h.im),
        verdict.lsystem_class.as_str().to_string(),
        star,
        verdict.operator_accretive.to_string(),
        verdict.operator_sectorial.to_string(),
        opt_text(verdict.operator_exact_angle),
        opt_text(angles.map(|s| s.beta1)),
        opt_text(angles.map(|s| s.beta2)),
        opt_text(angles.and_then(|s| s.beta_class)),
        opt_text(angles.and_then(|s| s.beta_universal)),
    ];
    Ok(Output::new(
        Value::Object(j),
        vec![
            "m0",
            "mu",
            "h_re",
            "h_im",
            "class",
            "star_ext_class",
            "operator_accretive",
            "operator_sectorial",
            "operator_exact_angle",
            "beta1",
            "beta2",
            "beta_class",
            "beta_universal",
        ],
        vec![row],
    ))
}

fn region_scan(g: &GlobalOpts, mf: &MFunction, n: usize, alphas: Option<&[f64]>) -> Result<Output, CliError> {
    let tol = &mf.tol;
    let grid: Vec<f64> = match alphas {
        Some(list) => list.to_vec(),
        None => (0..n).map(|k| -PI / 2.0 + PI * (k + 1) as f64 / n as f64).collect(),
    };
    let m0 = mf.m_minus_zero()?;
    let scanned = par_map(&grid, |&alpha| {
        let a = AlphaParam::new(alpha)?;
        let class = classify_lsystem_alpha(a, m0, tol);
        Ok((a, class, angles_for(a, m0, class.is_accumulative(), tol)))
    })?;
    let mut j = header(g, "region-scan", mf);
    j.insert("m0".into(), ext(m0));
    let rows = grid
        .iter()
        .zip(&scanned)
        .map(|(&alpha, (a, class, s))| {
            json!({
                "alpha": real(alpha),
                "tan_alpha": ext(a.tan_alpha),
                "class": class.as_str(),
                "tan_beta1": opt(s.map(|s| s.tan_beta1)),
                "beta1": opt(s.map(|s| s.beta1)),
                "tan_beta2": s.map(|s| ext(s.tan_beta2)).unwrap_or(Value::Null),
                "beta2": opt(s.map(|s| s.beta2)),
                "tan_beta_class": opt(s.and_then(|s| s.tan_beta_class)),
                "beta_class": opt(s.and_then(|s| s.beta_class)),
                "tan_beta_universal": opt(s.and_then(|s| s.tan_beta_universal)),
                "beta_universal": opt(s.and_then(|s| s.beta_universal)),
            })
        })
        .collect();
    j.insert("rows".into(), Value::Array(rows));
    let csv = grid
        .iter()
        .zip(&scanned)
        .map(|(&alpha, (a, class, s))| {
            vec![
                real_text(alpha),
                ext_text(a.tan_alpha),
                class.as_str().to_string(),
                opt_text(s.map(|s| s.beta1)),
                opt_text(s.map(|s| s.beta2)),
                opt_text(s.and_then(|s| s.beta_class)),
                opt_text(s.and_then(|s| s.beta_universal)),
            ]
        })
        .collect();
    Ok(Output::new(
        Value::Object(j),
        vec!["alpha", "tan_alpha", "class", "beta1", "beta2", "beta_class", "beta_universal"],
        csv,
    ))
}

fn measure(g: &GlobalOpts, mf: MFunction, sel: &AlphaSel, t_min: f64, t_max: f64, n_t: usize) -> Result<Output, CliError> {
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) || n_t < 2 {
        return Err(CliError::Usage(format!(
            "empty t range: need 0 < t_min < t_max and n_t >= 2, got [{t_min}, {t_max}] with {n_t} points"
        )));
    }
    let a = alpha_param(sel)?.unwrap_or(AlphaParam::new(0.0)?);
    let tol = mf.tol.clone();
    let mut j = header(g, "measure", &mf);
    let grid: Vec<f64> = (0..n_t)
        .map(|k| t_min * (t_max / t_min).powf(k as f64 / (n_t - 1) as f64))
        .collect();
    let f = SampledFunction::neg_m_alpha(mf, a);
    let mt = extract_measure(&f, &grid, &tol.limit_eps_schedule, &tol)?;
    j.insert("alpha".into(), alpha_json(a));
    j.insert("gamma".into(), real(mt.gamma));
    j.insert("gamma_err".into(), real(mt.gamma_err));
    let rows = (0..mt.t_grid.len())
        .map(|k| json!({ "t": real(mt.t_grid[k]), "density": real(mt.density[k]), "cumulative": real(mt.cumulative[k]) }))
        .collect();
    j.insert("rows".into(), Value::Array(rows));
    let csv = (0..mt.t_grid.len())
        .map(|k| vec![real_text(mt.t_grid[k]), real_text(mt.density[k]), real_text(mt.cumulative[k])])
        .collect();
    let mut out = Output::new(Value::Object(j), vec!["t", "density", "cumulative"], csv);
    out.notes.push(format!("gamma = {} (err {})", real_text(mt.gamma), real_text(mt.gamma_err)));
    Ok(out)
}

fn verify(g: &GlobalOpts, tol: ToleranceConfig) -> Result<Output, CliError> {
    let cfg = VerifyConfig {
        x_max: g.xmax,
        tol,
        seed: g.seed,
    };
    let report = run_verification(&cfg)?;
    let criteria: Vec<Value> = report
        .criteria
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "name": c.name,
                "pass": c.pass,
                "metric": real(c.metric),
                "threshold": real(c.threshold),
                "detail": c.detail,
            })
        })
        .collect();
    let j = json!({
        "command": "verify",
        "seed": g.seed,
        "x_max": cfg.x_max.map(real).unwrap_or(Value::Null),
        "all_pass": report.all_pass,
        "criteria": criteria,
        "notes": report.notes,
    });
    let csv = report
        .criteria
        .iter()
        .map(|c| {
            vec![
                c.id.to_string(),
                c.name.clone(),
                c.pass.to_string(),
                real_text(c.metric),
                real_text(c.threshold),
                c.detail.clone(),
            ]
        })
        .collect();
    let mut out = Output::new(j, vec!["id", "name", "pass", "metric", "threshold", "detail"], csv);
    for c in &report.criteria {
        out.notes
            .push(format!("{} {:>2} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.name, c.detail));
    }
    out.notes.extend(report.notes.iter().map(|n| format!("note: {n}")));
    out.failed_verification = !report.all_pass;
    Ok(out)
}
