use circuitlab_core::analysis::{collapse_grid_search, powerlaw_fit, Series, SeriesMeta};
use circuitlab_core::circuit::Boundary;
use circuitlab_core::rng::{Purpose, RngStream};
use circuitlab_core::stabilizer::{
    delta_s_profile, measurement_only_ising as ising_run, reference_qubit_run, run_hybrid, HybridParams, InitialState,
    IsingParams, Tableau,
};
use serde_json::{json, Value};

use super::{crossing_json, curves, points_json, series_by_size, Ctx, Output};
use crate::error::CliError;
use crate::svg::Plot;
use crate::table::{Point, ResultTable, Row};

fn grid(sizes: &[usize], ps: &[f64]) -> Vec<(usize, f64)> {
    sizes.iter().flat_map(|&l| ps.iter().map(move |&p| (l, p))).collect()
}

fn even_sizes(sizes: &[usize], boundary: Boundary, multiple: usize) -> Result<(), CliError> {
    let need = if boundary == Boundary::Periodic { multiple.max(2) } else { multiple };
    match sizes.iter().find(|&&l| l % need != 0) {
        Some(l) => Err(CliError::Config(format!("L = {l} must be a multiple of {need} here"))),
        None => Ok(()),
    }
}

pub fn mipt_scan(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let sizes = e.sizes(&[32, 64])?;
    let ps = e.rates(&[0.10, 0.12, 0.14, 0.16, 0.18, 0.20, 0.22, 0.24])?;
    let bc = e.boundary(Boundary::Periodic);
    let reps = ctx.cfg.sampling.realizations(1)?;
    even_sizes(&sizes, bc, 4)?;
    let checkpoints: Vec<Vec<usize>> =
        sizes.iter().map(|&l| ctx.cfg.sampling.checkpoints_scaled(l, &[1.5, 1.75, 2.0])).collect::<Result<_, _>>()?;
    let cells: Vec<(usize, f64, &[usize])> = sizes
        .iter()
        .zip(&checkpoints)
        .flat_map(|(&l, c)| ps.iter().map(move |&p| (l, p, c.as_slice())))
        .collect();
    let rows = ctx.sweep(&cells, reps, |&(l, p, cps), seed| {
        let mut tab = Tableau::new(l, &InitialState::AllUp)?;
        let depth = *cps.last().expect("nonempty");
        let params = HybridParams { checkpoints: cps.to_vec(), record_tmi: true, ..HybridParams::new(depth, p, bc) };
        let res = run_hybrid(&mut tab, &params, &mut RngStream::new(seed, 0).rng(Purpose::Circuit))?;
        let tmi = res.tmi.iter().sum::<f64>() / res.tmi.len() as f64;
        Ok(vec![Row::sample(p, tmi, l, p, seed).with([*res.half_entropy.last().expect("recorded")])])
    })?;
    let table = ResultTable::new(&["half_entropy"], rows)?;
    let points = table.aggregate();
    let series = series_by_size(&points)?;
    let collapse = if series.len() >= 3 {
        match collapse_grid_search(&series, (ps[0], *ps.last().expect("nonempty")), (0.5, 3.0), 41) {
            Ok(c) => json!({ "p_c": c.p_c, "nu": c.nu, "objective": c.objective, "z": 1.0 }),
            Err(err) => json!({ "error": err.to_string() }),
        }
    } else {
        json!({ "error": "need at least three sizes" })
    };
    let summary = json!({
        "units": "bits",
        "tmi_crossing": crossing_json(&series),
        "collapse": collapse,
        "mean": points_json(&points),
    });
    let plot = Plot {
        title: "Tripartite mutual information".into(),
        x_label: "p".into(),
        y_label: "I3 (bits)".into(),
        curves: curves(&points),
        ..Default::default()
    };
    Ok(Output { table, summary, plot })
}

/// Fractions of the per-seed values at the last time of each `(L, p)` that
/// fall below `lo` and above `hi`.
fn final_fractions(table: &ResultTable, cells: &[(usize, f64)], lo: f64, hi: f64) -> Vec<Value> {
    cells
        .iter()
        .map(|&(l, p)| {
            let rows: Vec<&Row> = table.rows.iter().filter(|r| r.l == l && r.p == p).collect();
            let t_end = rows.iter().map(|r| r.x).fold(f64::NEG_INFINITY, f64::max);
            let last: Vec<f64> = rows.iter().filter(|r| r.x == t_end).map(|r| r.y).collect();
            let n = last.len() as f64;
            json!({
                "L": l,
                "p": p,
                "t": t_end,
                "mean": last.iter().sum::<f64>() / n,
                "fraction_below": last.iter().filter(|&&y| y < lo).count() as f64 / n,
                "fraction_above": last.iter().filter(|&&y| y > hi).count() as f64 / n,
                "thresholds": [lo, hi],
                "realizations": last.len(),
            })
        })
        .collect()
}

pub fn purification(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let sizes = e.sizes(&[64])?;
    let ps = e.rates(&[0.05, 0.40])?;
    let bc = e.boundary(Boundary::Periodic);
    let reps = ctx.cfg.sampling.realizations(1)?;
    even_sizes(&sizes, bc, 1)?;
    let checkpoints: Vec<Vec<usize>> = sizes
        .iter()
        .map(|&l| ctx.cfg.sampling.checkpoints_scaled(l, &[0.25, 0.5, 1.0, 2.0, 4.0]))
        .collect::<Result<_, _>>()?;
    let cells: Vec<(usize, f64, &[usize])> = sizes
        .iter()
        .zip(&checkpoints)
        .flat_map(|(&l, c)| ps.iter().map(move |&p| (l, p, c.as_slice())))
        .collect();
    let rows = ctx.sweep(&cells, reps, |&(l, p, cps), seed| {
        let mut tab = Tableau::new(l, &InitialState::MaximallyMixed)?;
        let depth = *cps.last().expect("nonempty");
        let params = HybridParams { checkpoints: cps.to_vec(), ..HybridParams::new(depth, p, bc) };
        let res = run_hybrid(&mut tab, &params, &mut RngStream::new(seed, 0).rng(Purpose::Circuit))?;
        Ok(res.checkpoints.iter().zip(&res.purification).map(|(&t, &s)| Row::sample(t as f64, s / l as f64, l, p, seed)).collect())
    })?;
    let table = ResultTable::new(&[], rows)?;
    let points = table.aggregate();
    let summary = json!({
        "units": "bits per site",
        "final": final_fractions(&table, &grid(&sizes, &ps), 0.01, 0.10),
        "mean": points_json(&points),
    });
    let plot = Plot {
        title: "Purification".into(),
        x_label: "t (layers)".into(),
        y_label: "S / L (bits)".into(),
        log_x: true,
        curves: curves(&points),
        ..Default::default()
    };
    Ok(Output { table, summary, plot })
}

pub fn reference_qubit(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let sizes = e.sizes(&[64])?;
    let ps = e.rates(&[0.10, 0.30])?;
    let bc = e.boundary(Boundary::Periodic);
    let reps = ctx.cfg.sampling.realizations(1)?;
    even_sizes(&sizes, bc, 1)?;
    let checkpoints: Vec<Vec<usize>> = sizes
        .iter()
        .map(|&l| ctx.cfg.sampling.checkpoints_scaled(l, &[0.5, 1.0, 1.5, 2.0]))
        .collect::<Result<_, _>>()?;
    let cells: Vec<(usize, f64, &[usize])> = sizes
        .iter()
        .zip(&checkpoints)
        .flat_map(|(&l, c)| ps.iter().map(move |&p| (l, p, c.as_slice())))
        .collect();
    let rows = ctx.sweep(&cells, reps, |&(l, p, cps), seed| {
        let layers = *cps.last().expect("nonempty");
        let s = reference_qubit_run(l, p, layers, bc, &mut RngStream::new(seed, 0).rng(Purpose::Circuit))?;
        Ok(cps.iter().map(|&t| Row::sample(t as f64, s[t], l, p, seed)).collect())
    })?;
    let table = ResultTable::new(&[], rows)?;
    let points = table.aggregate();
    let summary = json!({
        "units": "bits",
        "final": final_fractions(&table, &grid(&sizes, &ps), 0.05, 0.5),
        "mean": points_json(&points),
    });
    let plot = Plot {
        title: "Reference qubit entropy".into(),
        x_label: "t (layers)".into(),
        y_label: "S_ref (bits)".into(),
        curves: curves(&points),
        ..Default::default()
    };
    Ok(Output { table, summary, plot })
}

pub fn measurement_only_ising(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let sizes = e.sizes(&[32, 64])?;
    let ps = e.rates(&[0.40, 0.44, 0.47, 0.50, 0.53, 0.56, 0.60])?;
    let bc = e.boundary(Boundary::Periodic);
    let reps = ctx.cfg.sampling.realizations(1)?;
    let times: Vec<usize> = sizes
        .iter()
        .map(|&l| ctx.cfg.sampling.checkpoints_scaled(l, &[2.0]).map(|c| *c.last().expect("nonempty")))
        .collect::<Result<_, _>>()?;
    let cells: Vec<(usize, f64, usize)> =
        sizes.iter().zip(&times).flat_map(|(&l, &t)| ps.iter().map(move |&p| (l, p, t))).collect();
    let rows = ctx.sweep(&cells, reps, |&(l, p, time), seed| {
        let params = IsingParams { n: l, p_z: p, time, boundary: bc, checkpoints: vec![time] };
        let res = ising_run(&params, &mut RngStream::new(seed, 0).rng(Purpose::Circuit))?;
        let chi = res.chi[0];
        let lf = l as f64;
        Ok(vec![Row::sample(p, chi, l, p, seed).with([chi * lf, chi * lf.powf(2.0 / 3.0)])])
    })?;
    let table = ResultTable::new(&["chi_L", "chi_L23"], rows)?;
    let scaled = table.aggregate_by(|r| r.extra[0]);
    let scaled23 = table.aggregate_by(|r| r.extra[1]);
    let summary = json!({
        "chi_L_crossing": crossing_json(&series_by_size(&scaled)?),
        "chi_L23_crossing": crossing_json(&series_by_size(&scaled23)?),
        "chi": points_json(&table.aggregate()),
        "chi_L": points_json(&scaled),
    });
    let plot = Plot {
        title: "Spin-glass order".into(),
        x_label: "p_Z".into(),
        y_label: "chi_SG * L".into(),
        curves: curves(&scaled),
        ..Default::default()
    };
    Ok(Output { table, summary, plot })
}

pub fn delta_s_scan(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let sizes = e.sizes(&[128])?;
    let ps = e.rates(&[0.10])?;
    let bc = e.boundary(Boundary::Periodic);
    let reps = ctx.cfg.sampling.realizations(1)?;
    even_sizes(&sizes, bc, 2)?;
    let mut cells = Vec::new();
    for &l in &sizes {
        let d = e.depth_for(l, 2.0)?;
        cells.extend(ps.iter().map(|&p| (l, p, d)));
    }
    let rows = ctx.sweep(&cells, reps, |&(l, p, depth), seed| {
        let rs = RngStream::new(seed, 0);
        let mut tab = Tableau::new(l, &InitialState::AllUp)?;
        run_hybrid(&mut tab, &HybridParams::new(depth, p, bc), &mut rs.rng(Purpose::Circuit))?;
        let xs: Vec<usize> = (0..l / 2).collect();
        let ds = delta_s_profile(&tab, &xs, &mut rs.rng(Purpose::Outcomes))?;
        Ok(xs.iter().zip(ds).map(|(&x, d)| Row::sample(x as f64, d as f64, l, p, seed)).collect())
    })?;
    let table = ResultTable::new(&[], rows)?;
    let points = table.aggregate();
    let fits: Vec<Value> = grid(&sizes, &ps)
        .iter()
        .map(|&(l, p)| {
            let pts: Vec<&Point> = points.iter().filter(|pt| pt.l == l && pt.p == p && pt.y > 0.0).collect();
            let window = (2.0, (l / 8).max(3) as f64);
            let fit = Series::new(
                pts.iter().map(|pt| pt.x).collect(),
                pts.iter().map(|pt| pt.y).collect(),
                pts.iter().map(|pt| pt.yerr).collect(),
                pts.iter().map(|pt| pt.n).collect(),
                SeriesMeta { l: Some(l), p: Some(p), seeds: None },
            )
            .and_then(|s| powerlaw_fit(&s, window));
            match fit {
                Ok(f) => json!({ "L": l, "p": p, "delta": -f.exponent, "delta_err": f.exponent_err, "window": window }),
                Err(err) => json!({ "L": l, "p": p, "error": err.to_string() }),
            }
        })
        .collect();
    let summary = json!({ "units": "bits", "power_law": fits, "mean": points_json(&points) });
    let plot = Plot {
        title: "Measurement response".into(),
        x_label: "x".into(),
        y_label: "mean dS(x) (bits)".into(),
        log_x: true,
        log_y: true,
        curves: curves(&points),
    };
    Ok(Output { table, summary, plot })
}
