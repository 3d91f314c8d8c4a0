//! Subcommand bodies. Each returns the rendered output and an exit status.

use std::fmt::Write as _;

use rayon::prelude::*;

use fermi_chart::geodesic::{null_check_m0, trace_radial};
use fermi_chart::oracle::{dg_drho_closed, dg_dtau_closed, g_tautau_closed, rho_closed};
use fermi_chart::scalefactor::{check_regularity, ExtensionVerdict, Family};
use fermi_chart::{Chart, FermiError, MetricSample};

use crate::config::{RhoEnd, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERDICT: u8 = 1;
pub const EXIT_FAILURE: u8 = 2;

pub struct Report {
    pub body: String,
    /// Diagnostics for stderr.
    pub notes: Vec<String>,
    pub exit: u8,
}

/// 17 significant digits; non-finite values as nan / inf / -inf.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn value_or_nan<T>(r: &Result<T, FermiError>, f: impl Fn(&T) -> f64) -> f64 {
    r.as_ref().map(f).unwrap_or(f64::NAN)
}

fn chart_of(cfg: &RunConfig) -> Result<Chart, FermiError> {
    Chart::new(cfg.model.clone(), cfg.tolerances)
}

pub fn validate(cfg: &RunConfig) -> Result<Report, FermiError> {
    let r = check_regularity(&cfg.model, &cfg.regularity)?;
    let mut out = String::new();
    let yes = |b: bool| if b { "yes" } else { "no" };
    writeln!(out, "model: {}", cfg.model.describe()).unwrap();
    writeln!(out, "regular: {}", yes(r.is_regular)).unwrap();
    writeln!(out, "strongly regular: {}", yes(r.is_strongly_regular)).unwrap();
    writeln!(out, "K estimate (-inf a*a''/a'^2): {}", num(r.k_estimate)).unwrap();
    writeln!(out, "C estimate (sup |a'''a^2/a'^3|): {}", num(r.c_estimate)).unwrap();
    writeln!(out, "adot(0+): {}", r.adot0_class.label()).unwrap();
    writeln!(out, "accelerating near t=0: {}", yes(r.inflationary_near_zero)).unwrap();
    writeln!(out, "event horizon integral: {}", r.horizons.event.label()).unwrap();
    writeln!(out, "particle horizon integral: {}", r.horizons.particle.label()).unwrap();
    if let Some(t) = r.witness_t {
        writeln!(out, "witness t: {}", num(t)).unwrap();
    }
    for v in &r.violations {
        writeln!(out, "violation: {v}").unwrap();
    }
    for n in &r.notes {
        writeln!(out, "note: {n}").unwrap();
    }
    let verdict = match (r.is_regular, r.extension_verdict()) {
        (false, _) => "not regular; no extension applies".to_string(),
        (true, ExtensionVerdict::None) => {
            "regular, not strongly regular; extension hypotheses: NOT satisfied".to_string()
        }
        (true, ExtensionVerdict::ContinuouslyDifferentiable) => {
            "strongly regular; C¹ extension hypotheses: satisfied".to_string()
        }
        (true, ExtensionVerdict::ContinuousOnly(why)) => format!(
            "strongly regular; C¹ hypotheses: NOT satisfied ({why}); continuous extension only"
        ),
    };
    writeln!(out, "verdict: {verdict}").unwrap();
    Ok(Report {
        body: out,
        notes: Vec::new(),
        exit: if r.is_regular { EXIT_OK } else { EXIT_VERDICT },
    })
}

fn sample_status(s: &MetricSample) -> (String, bool) {
    let mut kinds: Vec<&str> = Vec::new();
    let mut numerical = false;
    for e in [s.dg_drho.as_ref().err(), s.dg_dtau.as_ref().err(), s.angular.as_ref().err()]
        .into_iter()
        .flatten()
    {
        numerical |= e.is_numerical();
        if !kinds.contains(&e.kind()) {
            kinds.push(e.kind());
        }
    }
    if kinds.is_empty() {
        ("ok".into(), false)
    } else {
        (kinds.join("|"), numerical)
    }
}

pub fn chart(cfg: &RunConfig) -> Result<Report, FermiError> {
    let chart = chart_of(cfg)?;
    let rows = chart.grid(&cfg.grid, cfg.curvature)?;
    let mut out = String::from(
        "tau,rho,t0,region,g_tautau,dg_drho,dg_dtau,g_thetatheta,lambda,err_max,status\n",
    );
    let mut notes = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        match &row.sample {
            Ok(s) => {
                let (status, numerical) = sample_status(s);
                if numerical {
                    notes.push(format!("row {}: tau={} rho={}: {}", i + 1, row.tau, row.rho, status));
                }
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    num(row.tau),
                    num(row.rho),
                    num(s.point.t0),
                    s.point.region.label(),
                    num(s.g_tautau.value),
                    num(value_or_nan(&s.dg_drho, |e| e.value)),
                    num(value_or_nan(&s.dg_dtau, |e| e.value)),
                    num(value_or_nan(&s.angular, |a| a.g_thetatheta.value)),
                    num(value_or_nan(&s.angular, |a| a.lambda.value)),
                    num(s.err_max()),
                    status
                )
                .unwrap();
            }
            Err(e) => {
                notes.push(format!("row {}: tau={} rho={}: {e}", i + 1, row.tau, row.rho));
                let nan = num(f64::NAN);
                writeln!(
                    out,
                    "{},{},{nan},,{nan},{nan},{nan},{nan},{nan},{nan},{}",
                    num(row.tau),
                    num(row.rho),
                    e.kind()
                )
                .unwrap();
            }
        }
    }
    let exit = if notes.is_empty() { EXIT_OK } else { EXIT_FAILURE };
    Ok(Report { body: out, notes, exit })
}

pub fn boundary(cfg: &RunConfig) -> Result<Report, FermiError> {
    let chart = chart_of(cfg)?;
    let taus = cfg.grid.taus();
    let rows: Vec<Result<[f64; 5], FermiError>> = taus
        .par_iter()
        .map(|&tau| {
            let rm = chart.fermi_radius(tau)?.value;
            let rate = chart.fermi_radius_rate(tau)?.value;
            let rho_max = chart.rho_max(tau)?;
            let g = chart.g_tautau(tau, rm)?.value;
            let null = null_check_m0(&chart, tau)?;
            Ok([rm, rate, rho_max, g, null])
        })
        .collect();
    let mut out = String::from("tau,rho_m,rho_m_rate,rho_max,g_tautau_m0,null_check,status\n");
    let mut notes = Vec::new();
    for (tau, row) in taus.iter().zip(&rows) {
        match row {
            Ok(v) => {
                let cols: Vec<String> = v.iter().map(|x| num(*x)).collect();
                writeln!(out, "{},{},ok", num(*tau), cols.join(",")).unwrap();
            }
            Err(e) => {
                notes.push(format!("tau={tau}: {e}"));
                writeln!(out, "{},nan,nan,nan,nan,nan,{}", num(*tau), e.kind()).unwrap();
            }
        }
    }
    let exit = if notes.is_empty() { EXIT_OK } else { EXIT_FAILURE };
    Ok(Report { body: out, notes, exit })
}

pub fn oracle(cfg: &RunConfig) -> Result<Report, FermiError> {
    let alpha = match cfg.model.family() {
        Family::Power { alpha } => *alpha,
        _ => {
            return Err(FermiError::InvalidArgument(format!(
                "oracle comparison needs family=power, got {}",
                cfg.model.describe()
            )))
        }
    };
    let chart = chart_of(cfg)?;
    let n = cfg.grid.n_rho - 1;
    let cells: Vec<(f64, f64)> = cfg
        .grid
        .taus()
        .into_iter()
        .flat_map(|tau| (0..=n).map(move |j| (tau, tau * j as f64 / n as f64)))
        .collect();
    type Row = Result<[(f64, f64); 4], FermiError>;
    let rows: Vec<Row> = cells
        .par_iter()
        .map(|&(tau, t0)| {
            let p = chart.point_at_t0(tau, t0)?;
            let quad = |r: Result<fermi_chart::Estimate, FermiError>| r.map(|e| e.value).unwrap_or(f64::NAN);
            Ok([
                (p.rho, rho_closed(alpha, tau, t0)?),
                (chart.g_tautau_at(&p)?.value, g_tautau_closed(alpha, tau, t0)?),
                (quad(chart.dg_drho_at(&p)), dg_drho_closed(alpha, tau, t0)?.as_f64()),
                (quad(chart.dg_dtau_at(&p)), dg_dtau_closed(alpha, tau, t0)?.as_f64()),
            ])
        })
        .collect();
    let mut out = String::from(
        "tau,t0,rho,rho_closed,g_tautau,g_tautau_closed,dg_drho,dg_drho_closed,dg_dtau,dg_dtau_closed,max_abs_dev\n",
    );
    let mut notes = Vec::new();
    let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
    let mut compared = 0usize;
    for (&(tau, t0), row) in cells.iter().zip(&rows) {
        match row {
            Ok(pairs) => {
                let mut row_abs = 0.0f64;
                let mut cols = Vec::with_capacity(8);
                for &(q, c) in pairs {
                    cols.push(num(q));
                    cols.push(num(c));
                    // Divergent closed forms and undefined boundary derivatives are not compared.
                    if q.is_finite() && c.is_finite() {
                        let d = (q - c).abs();
                        row_abs = row_abs.max(d);
                        if c != 0.0 {
                            max_rel = max_rel.max(d / c.abs());
                        }
                        compared += 1;
                    }
                }
                max_abs = max_abs.max(row_abs);
                writeln!(out, "{},{},{},{}", num(tau), num(t0), cols.join(","), num(row_abs)).unwrap();
            }
            Err(e) => {
                notes.push(format!("tau={tau} t0={t0}: {e}"));
                writeln!(out, "{},{}{},nan", num(tau), num(t0), ",nan".repeat(8)).unwrap();
            }
        }
    }
    notes.insert(
        0,
        format!(
            "oracle {}: {compared} comparisons, max abs deviation {max_abs:.3e}, max rel deviation {max_rel:.3e}",
            cfg.model.describe()
        ),
    );
    let exit = if notes.len() == 1 { EXIT_OK } else { EXIT_FAILURE };
    Ok(Report { body: out, notes, exit })
}

pub fn geodesic(cfg: &RunConfig) -> Result<Report, FermiError> {
    let chart = chart_of(cfg)?;
    let g = &cfg.geodesic;
    let rho_end = match g.rho_end {
        RhoEnd::Absolute(r) => r,
        RhoEnd::FractionOfMax(f) => f * chart.rho_max(g.tau0)?,
    };
    let trace = trace_radial(&chart, g.tau0, rho_end, &g.options)?;
    let mut out = String::from("rho,tau,dtau_drho,region,residual\n");
    for p in &trace.points {
        writeln!(
            out,
            "{},{},{},{},{}",
            num(p.rho),
            num(p.tau),
            num(p.dtau_drho),
            p.region.label(),
            num(p.residual)
        )
        .unwrap();
    }
    let mut notes = vec![format!(
        "geodesic tau0={} rho_end={}: {} steps, max|tau-tau0| {:.3e}, residual_norm {:.3e}",
        g.tau0, rho_end, trace.steps_used, trace.max_tau_deviation, trace.residual_norm
    )];
    let exit = if trace.under_resolved {
        notes.push("trace under-resolved after 4x refinement".into());
        EXIT_FAILURE
    } else {
        EXIT_OK
    };
    Ok(Report { body: out, notes, exit })
}
