use circuitlab_core::analysis::{gaussian_kernel_fit, linear_least_squares, powerlaw_fit, SampleStats, Series, SeriesMeta};
use circuitlab_core::circuit::Boundary;
use circuitlab_core::classical::{
    dprm_sample, extrapolate_tension, fluctuation_exponents, front_endpoints, point_cut_sample, u1_amplitude_diffusion,
    u1_conserved_weight, Disorder, LineTension, MembraneGrid, MembraneModel, TensionFit,
};
use circuitlab_core::rng::{Purpose, RngStream};
use serde_json::{json, Value};

use super::{curves, points_json, Ctx, Output};
use crate::error::CliError;
use crate::svg::{Curve, Plot};
use crate::table::{ResultTable, Row};

/// Values of `rows` grouped by `x`, in first-seen order.
fn by_x(rows: &[Row], value: impl Fn(&Row) -> f64) -> Vec<(f64, Vec<f64>)> {
    let mut out: Vec<(f64, Vec<f64>)> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|(x, _)| *x == r.x) {
            Some((_, v)) => v.push(value(r)),
            None => out.push((r.x, vec![value(r)])),
        }
    }
    out
}

/// `(std, error of std)` for the entries of each group.
fn spreads(groups: &[(f64, Vec<f64>)]) -> Vec<(f64, f64, f64)> {
    groups
        .iter()
        .map(|(x, v)| {
            let s = SampleStats::from_samples(v);
            (*x, s.std, s.std / (2.0 * (v.len() as f64 - 1.0)).sqrt())
        })
        .collect()
}

pub fn otoc_front(ctx: &Ctx) -> Result<Output, CliError> {
    let times = ctx.cfg.sampling.checkpoints(&[16, 32, 64, 128, 256])?;
    let tmax = *times.last().expect("nonempty");
    let sizes = ctx.cfg.engine.sizes(&[2 * tmax + 4])?;
    let reps = ctx.cfg.sampling.realizations(2)?;
    let rows = ctx.sweep(&sizes, reps, |&l, seed| {
        let ends = front_endpoints(l, l / 2, &times, &mut RngStream::new(seed, 0).rng(Purpose::Sampling))?;
        Ok(times.iter().zip(ends).map(|(&t, x)| Row::sample(t as f64, x as f64, l, 0.0, seed)).collect())
    })?;
    let table = ResultTable::new(&[], rows)?;
    let points = table.aggregate();
    let per_size: Vec<Value> = sizes
        .iter()
        .map(|&l| {
            let rows: Vec<Row> = table.rows.iter().filter(|r| r.l == l).cloned().collect();
            let width = spreads(&by_x(&rows, |r| r.y));
            let mean: Vec<_> = points.iter().filter(|pt| pt.l == l).collect();
            let vb = linear_least_squares(
                &mean.iter().map(|pt| vec![1.0, pt.x]).collect::<Vec<_>>(),
                &mean.iter().map(|pt| pt.y).collect::<Vec<_>>(),
                mean.iter().all(|pt| pt.yerr > 0.0).then(|| mean.iter().map(|pt| pt.yerr).collect::<Vec<_>>()).as_deref(),
            );
            let exponent = Series::new(
                width.iter().map(|w| w.0).collect(),
                width.iter().map(|w| w.1).collect(),
                width.iter().map(|w| w.2).collect(),
                vec![reps; width.len()],
                SeriesMeta { l: Some(l), ..Default::default() },
            )
            .and_then(|s| powerlaw_fit(&s, (times[0] as f64, tmax as f64)));
            json!({
                "L": l,
                "v_b": vb.as_ref().map(|f| f.coef[1]).ok(),
                "v_b_err": vb.as_ref().map(|f| f.err(1)).ok(),
                "width": width.iter().map(|w| json!({ "t": w.0, "std": w.1, "err": w.2 })).collect::<Vec<_>>(),
                "width_exponent": exponent.as_ref().map(|f| f.exponent).ok(),
                "width_exponent_err": exponent.as_ref().map(|f| f.exponent_err).ok(),
                "fit_error": exponent.err().map(|e| e.to_string()),
            })
        })
        .collect();
    let summary = json!({ "sizes": per_size, "mean": points_json(&points) });
    let plot = Plot {
        title: "Operator front".into(),
        x_label: "t (layers)".into(),
        y_label: "mean right endpoint".into(),
        curves: curves(&points),
        ..Default::default()
    };
    Ok(Output { table, summary, plot })
}

/// Chain size, start site and profiles `a_x(t)` for `t = 0..=t_max`.
fn u1_profiles(ctx: &Ctx, t_max: usize) -> Result<(usize, usize, Vec<Vec<f64>>), CliError> {
    let e = &ctx.cfg.engine;
    let sizes = e.sizes(&[2 * t_max + 2])?;
    let [l] = sizes[..] else {
        return Err(CliError::Config("give a single chain size".into()));
    };
    let bc = e.boundary(Boundary::Periodic);
    let x0 = l / 2;
    Ok((l, x0, u1_amplitude_diffusion(l, t_max, x0, bc)?))
}

pub fn charge_diffusion(ctx: &Ctx) -> Result<Output, CliError> {
    let times = ctx.cfg.sampling.checkpoints(&[100, 200, 400])?;
    let t_max = *times.last().expect("nonempty");
    let (l, x0, profiles) = u1_profiles(ctx, t_max)?;
    let seed = ctx.realization_seed(0, 0);
    let xs: Vec<f64> = (0..l).map(|x| x as f64 - x0 as f64).collect();
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &t in &times {
        let a = &profiles[t];
        rows.extend(xs.iter().zip(a).map(|(&x, &y)| Row::sample(x, y, l, 0.0, seed).with([t as f64])));
        let f = gaussian_kernel_fit(&xs, a, t as f64)?;
        fits.push(json!({
            "t": t,
            "D": f.d,
            "D_err": f.d_err,
            "center": f.center,
            "variance": f.variance,
            "moment_variance": f.moment_variance,
        }));
    }
    let table = ResultTable::new(&["t"], rows)?;
    let plot = Plot {
        title: "U(1) charge profile".into(),
        x_label: "x".into(),
        y_label: "a_x(t)".into(),
        curves: times
            .iter()
            .map(|&t| Curve {
                label: format!("t={t}"),
                points: table.rows.iter().filter(|r| r.extra[0] == t as f64).map(|r| (r.x, r.y, 0.0)).collect(),
            })
            .collect(),
        ..Default::default()
    };
    Ok(Output { table, summary: json!({ "L": l, "kernel_fits": fits }), plot })
}

pub fn conserved_weight(ctx: &Ctx) -> Result<Output, CliError> {
    let times = ctx.cfg.sampling.checkpoints(&[400])?;
    let t_max = *times.last().expect("nonempty");
    let (l, _, profiles) = u1_profiles(ctx, t_max)?;
    let seed = ctx.realization_seed(0, 0);
    let w = u1_conserved_weight(&profiles);
    let scaled = |t: usize| w[t] * 2.0 * (std::f64::consts::PI * t as f64).sqrt();
    let rows = (1..=t_max).map(|t| Row::sample(t as f64, w[t], l, 0.0, seed).with([scaled(t)])).collect();
    let table = ResultTable::new(&["w_scaled"], rows)?;
    let late: Vec<f64> = (100..=t_max).map(scaled).collect();
    let summary = json!({
        "L": l,
        "scaled_weight_t_ge_100": if late.is_empty() { Value::Null } else { json!({
            "min": late.iter().copied().fold(f64::INFINITY, f64::min),
            "max": late.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }) },
    });
    let plot = Plot {
        title: "Conserved weight".into(),
        x_label: "t".into(),
        y_label: "w_c(t)".into(),
        log_x: true,
        log_y: true,
        curves: vec![
            Curve { label: "circuit".into(), points: (1..=t_max).map(|t| (t as f64, w[t], 0.0)).collect() },
            Curve {
                label: "1/(2 sqrt(pi t))".into(),
                points: (1..=t_max).map(|t| (t as f64, 0.5 / (std::f64::consts::PI * t as f64).sqrt(), 0.0)).collect(),
            },
        ],
    };
    Ok(Output { table, summary, plot })
}

pub fn min_cut_tension(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let durations = e.int_times(&[64, 128, 256])?;
    let vs = e.velocities(&[0.0, 0.2, 0.4, 0.6, 0.8])?;
    let reps = ctx.cfg.sampling.realizations(2)?;
    let rows = ctx.sweep(&durations, reps, |&t, seed| {
        let c = point_cut_sample(t, &vs, &mut RngStream::new(seed, 0).rng(Purpose::Sampling))?;
        Ok(vs.iter().zip(c).map(|(&v, y)| Row::sample(v, y, 2 * t + 16, 0.0, seed).with([t as f64])).collect())
    })?;
    let table = ResultTable::new(&["T"], rows)?;
    let estimates: Vec<LineTension> = vs
        .iter()
        .map(|&v| {
            let stats: Vec<SampleStats> = durations
                .iter()
                .map(|&t| {
                    let ys: Vec<f64> = table.rows.iter().filter(|r| r.x == v && r.extra[0] == t as f64).map(|r| r.y).collect();
                    SampleStats::from_samples(&ys)
                })
                .collect();
            extrapolate_tension(v, &durations, &stats)
        })
        .collect::<Result<_, _>>()?;
    let v_max = vs.iter().fold(0f64, |m, v| m.max(v.abs()));
    let fit = TensionFit::from_estimates(&estimates, v_max);
    let summary = json!({
        "durations": durations,
        "tension": estimates,
        "quadratic_fit": match &fit {
            Ok(f) => json!(f),
            Err(err) => json!({ "error": err.to_string() }),
        },
    });
    let mut plot_curves = curves(&table.aggregate());
    for (c, t) in plot_curves.iter_mut().zip(&durations) {
        c.label = format!("T={t}");
    }
    plot_curves.push(Curve { label: "extrapolated".into(), points: estimates.iter().map(|p| (p.v, p.e, p.err)).collect() });
    plot_curves.push(Curve { label: "(1+v^2)/2".into(), points: vs.iter().map(|&v| (v, 0.5 * (1.0 + v * v), 0.0)).collect() });
    let plot = Plot {
        title: "Minimal-cut line tension".into(),
        x_label: "v".into(),
        y_label: "E(v)".into(),
        curves: plot_curves,
        ..Default::default()
    };
    Ok(Output { table, summary, plot })
}

pub fn dprm_exponents(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let sizes = match e.width {
        Some(w) => vec![w],
        None => e.sizes(&[1024])?,
    };
    let heights = e.int_times(&[16, 32, 64, 128, 256])?;
    let reps = ctx.cfg.sampling.realizations(10)?;
    let rows = ctx.sweep(&sizes, reps, |&w, seed| {
        let s = dprm_sample(w, &heights, Disorder::Uniform, &mut RngStream::new(seed, 0).rng(Purpose::Sampling))?;
        Ok(heights.iter().zip(s).map(|(&h, (en, x))| Row::sample(h as f64, en, w, 0.0, seed).with([x as f64])).collect())
    })?;
    let table = ResultTable::new(&["wander"], rows)?;
    let times: Vec<f64> = heights.iter().map(|&h| h as f64).collect();
    let mut per_size = Vec::new();
    let mut plot_curves = Vec::new();
    for &w in &sizes {
        let rows: Vec<Row> = table.rows.iter().filter(|r| r.l == w).cloned().collect();
        let energy: Vec<Vec<f64>> = by_x(&rows, |r| r.y).into_iter().map(|g| g.1).collect();
        let wander: Vec<Vec<f64>> = by_x(&rows, |r| r.extra[0]).into_iter().map(|g| g.1).collect();
        let fit = fluctuation_exponents(&times, &energy, &wander)?;
        plot_curves.push(Curve {
            label: format!("std E, W={w}"),
            points: times.iter().zip(&fit.cost_std).map(|(&t, &s)| (t, s, 0.0)).collect(),
        });
        plot_curves.push(Curve {
            label: format!("std x, W={w}"),
            points: times.iter().zip(&fit.wander_std).map(|(&t, &s)| (t, s, 0.0)).collect(),
        });
        per_size.push(json!({ "width": w, "disorder": "uniform", "fit": fit }));
    }
    let plot = Plot {
        title: "Directed polymer fluctuations".into(),
        x_label: "height".into(),
        y_label: "standard deviation".into(),
        log_x: true,
        log_y: true,
        curves: plot_curves,
    };
    Ok(Output { table, summary: json!({ "sizes": per_size }), plot })
}

pub fn membrane_solve(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let times: Vec<f64> = e.times(&[1.0, 2.0, 4.0, 8.0, 16.0, 32.0])?;
    let ell = e.region.unwrap_or(16);
    if ell == 0 {
        return Err(CliError::Config("region must be positive".into()));
    }
    let seed = ctx.realization_seed(0, 0);
    let model = MembraneModel::random_circuit(1.0);
    let grid = MembraneGrid::default();
    let flat = |_: f64| 0.0;
    let rows = times
        .iter()
        .map(|&t| {
            let s = model.entropy(&flat, 0.0, t, &grid)?;
            let r = model.region_entropy(0.0, ell as f64, t, &grid)?;
            Ok(Row::sample(t, s, ell, 0.0, seed).with([r]))
        })
        .collect::<circuitlab_core::Result<Vec<_>>>()?;
    let table = ResultTable::new(&["region_entropy"], rows)?;
    let summary = json!({
        "tension": "(1+v^2)/2",
        "s_eq": model.s_eq(),
        "v_e": model.v_e(),
        "v_b": model.v_b(),
        "region": ell,
        "grid": grid,
    });
    let plot = Plot {
        title: "Membrane entanglement from a product state".into(),
        x_label: "t".into(),
        y_label: "S / s_eq".into(),
        curves: vec![
            Curve { label: "half chain".into(), points: table.rows.iter().map(|r| (r.x, r.y, 0.0)).collect() },
            Curve { label: format!("interval of {ell}"), points: table.rows.iter().map(|r| (r.x, r.extra[0], 0.0)).collect() },
        ],
        ..Default::default()
    };
    Ok(Output { table, summary, plot })
}
