use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use circuitlab_core::analysis::linear_least_squares;
use circuitlab_core::circuit::{build_brickwork, place_measurements, Boundary, Event};
use circuitlab_core::pauli::Pauli;
use circuitlab_core::rng::{Purpose, RngStream};
use circuitlab_core::statevector::{entropy, haar_mean_purity, purity, sff, HeisenbergOperator, PureState, Renyi, SffSource};
use serde_json::{json, Value};

use super::{curves, points_json, Ctx, Output};
use crate::config::EnsembleName;
use crate::error::CliError;
use crate::svg::{Curve, Plot};
use crate::table::{ResultTable, Row};

/// Largest statevector the CLI will allocate.
const STATE_DIM_CAP: usize = 1 << 24;

fn check_dim(q: usize, l: usize) -> Result<(), CliError> {
    match q.checked_pow(l as u32) {
        Some(d) if d <= STATE_DIM_CAP => Ok(()),
        _ => Err(CliError::Config(format!("q^L = {q}^{l} exceeds the statevector cap of {STATE_DIM_CAP}"))),
    }
}

pub fn entanglement_growth(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let sizes = e.sizes(&[12])?;
    let ps = e.rates(&[0.0])?;
    let ens = e.ensemble(EnsembleName::Haar)?;
    let bc = e.boundary(Boundary::Open);
    let reps = ctx.cfg.sampling.realizations(1)?;
    let q = ens.q();
    let mut cells = Vec::new();
    for &l in &sizes {
        check_dim(q, l)?;
        let d = e.depth_for(l, 1.0)?;
        cells.extend(ps.iter().map(|&p| (l, d, p)));
    }
    let rows = ctx.sweep(&cells, reps, |&(l, depth, p), seed| {
        let rs = RngStream::new(seed, 0);
        let c = build_brickwork(l, depth, bc, &ens, &mut rs.rng(Purpose::Circuit))?;
        let c = place_measurements(&c, p, &mut rs.rng(Purpose::Measurements))?;
        let mut outcomes = rs.rng(Purpose::Outcomes);
        let mut st = PureState::basis(l, q, &vec![0; l])?;
        let half: Vec<usize> = (0..l / 2).collect();
        let mut rows = vec![Row::sample(0.0, 0.0, l, p, seed)];
        let mut t = 0;
        for (i, layer) in c.layers.iter().enumerate() {
            for ev in &layer.events {
                match ev {
                    Event::Gate { sites, gate } => st.apply(gate, sites)?,
                    Event::Measure { site, basis } => {
                        st.measure(*site, *basis, &mut outcomes)?;
                    }
                }
            }
            t += usize::from(layer.has_gates());
            if c.layers.get(i + 1).is_none_or(|next| next.has_gates()) {
                let s = entropy(&st, &half, Renyi::VonNeumann)?.value / LN_2;
                rows.push(Row::sample(t as f64, s, l, p, seed));
            }
        }
        Ok(rows)
    })?;
    let table = ResultTable::new(&[], rows)?;
    let points = table.aggregate();
    let mut slopes = Vec::new();
    for &l in &sizes {
        for &p in &ps {
            let early: Vec<_> = points
                .iter()
                .filter(|pt| pt.l == l && pt.p == p && pt.x >= 1.0 && pt.x <= (l as f64 / 4.0).max(2.0))
                .collect();
            let fit = linear_least_squares(
                &early.iter().map(|pt| vec![1.0, pt.x]).collect::<Vec<_>>(),
                &early.iter().map(|pt| pt.y).collect::<Vec<_>>(),
                None,
            );
            slopes.push(match fit {
                Ok(f) => json!({ "L": l, "p": p, "slope": f.coef[1], "slope_err": f.err(1), "window": [1.0, early.last().map(|pt| pt.x)] }),
                Err(err) => json!({ "L": l, "p": p, "error": err.to_string() }),
            });
        }
    }
    let summary = json!({ "units": "bits", "early_slope": slopes, "mean": points_json(&points) });
    let plot = Plot {
        title: "Half-chain entanglement".into(),
        x_label: "t (layers)".into(),
        y_label: "S_{L/2} (bits)".into(),
        curves: curves(&points),
        ..Default::default()
    };
    Ok(Output { table, summary, plot })
}

pub fn page_check(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let sizes = e.sizes(&[10])?;
    let ens = e.ensemble(EnsembleName::Haar)?;
    let bc = e.boundary(Boundary::Open);
    let reps = ctx.cfg.sampling.realizations(2)?;
    let q = ens.q();
    let mut cells = Vec::new();
    for &l in &sizes {
        check_dim(q, l)?;
        cells.push((l, e.depth_for(l, 3.0)?));
    }
    let rows = ctx.sweep(&cells, reps, |&(l, depth), seed| {
        let rs = RngStream::new(seed, 0);
        let c = build_brickwork(l, depth, bc, &ens, &mut rs.rng(Purpose::Circuit))?;
        let mut st = PureState::basis(l, q, &vec![0; l])?;
        st.run_circuit(&c, &mut rs.rng(Purpose::Outcomes))?;
        let half: Vec<usize> = (0..l / 2).collect();
        let pur = purity(&st, &half)?;
        Ok(vec![Row::sample(depth as f64, pur, l, 0.0, seed).with([-pur.ln()])])
    })?;
    let table = ResultTable::new(&["renyi2"], rows)?;
    let points = table.aggregate();
    let per_size: Vec<Value> = points
        .iter()
        .map(|pt| {
            let (da, db) = ((q as f64).powi((pt.l / 2) as i32), (q as f64).powi((pt.l - pt.l / 2) as i32));
            let annealed = -pt.y.ln();
            let page = -haar_mean_purity(da, db).ln();
            let catalan = da.min(db).ln() - 2f64.ln();
            json!({
                "L": pt.l,
                "depth": pt.x,
                "mean_purity": pt.y,
                "mean_purity_err": pt.yerr,
                "annealed_renyi2": annealed,
                "annealed_renyi2_err": pt.yerr / pt.y,
                "page_value": page,
                "catalan_value": catalan,
                "relative_deviation": (annealed - catalan).abs() / catalan,
                "realizations": pt.n,
            })
        })
        .collect();
    let curve = |label: &str, f: &dyn Fn(usize) -> f64| Curve {
        label: label.into(),
        points: points.iter().map(|pt| (pt.l as f64, f(pt.l), 0.0)).collect(),
    };
    let plot = Plot {
        title: "Annealed second Renyi entropy at late times".into(),
        x_label: "L".into(),
        y_label: "-ln mean purity (nats)".into(),
        curves: vec![
            Curve { label: "circuit".into(), points: points.iter().map(|pt| (pt.l as f64, -pt.y.ln(), pt.yerr / pt.y)).collect() },
            curve("(L/2) ln q - ln 2", &|l| (l / 2) as f64 * (q as f64).ln() - 2f64.ln()),
        ],
        ..Default::default()
    };
    Ok(Output { table, summary: json!({ "units": "nats", "sizes": per_size }), plot })
}

pub fn sff_ramp(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let sizes = e.sizes(&[5])?;
    let q = e.q()?;
    let bc = e.boundary(Boundary::Periodic);
    let reps = ctx.cfg.sampling.realizations(1)?;
    let mut cells = Vec::new();
    for &l in &sizes {
        let dim = q.checked_pow(l as u32).filter(|&d| d <= circuitlab_core::statevector::SFF_DIM_CAP).ok_or_else(|| {
            CliError::Config(format!("q^L = {q}^{l} exceeds the diagonalization cap"))
        })?;
        let source = match e.ensemble {
            None => SffSource::Cue { dim },
            Some(_) => SffSource::Floquet { n: l, boundary: bc, ensemble: e.ensemble(EnsembleName::Haar)? },
        };
        cells.push((l, e.depth_or(l, dim)?, source));
    }
    let rows = ctx.sweep(&cells, reps, |(l, t_max, source), seed| {
        let k = sff(source, *t_max, 1, &mut RngStream::new(seed, 0).rng(Purpose::Sampling))?;
        Ok((1..=*t_max).map(|t| Row::sample(t as f64, k.mean[t], *l, 0.0, seed).with([k.mean[t] / t as f64])).collect())
    })?;
    let table = ResultTable::new(&["k_over_t"], rows)?;
    let points = table.aggregate();
    let ratio = table.aggregate_by(|r| r.extra[0]);
    let per_size: Vec<Value> = sizes
        .iter()
        .map(|&l| {
            let r: Vec<f64> = ratio.iter().filter(|pt| pt.l == l).map(|pt| pt.y).collect();
            json!({
                "L": l,
                "min_k_over_t": r.iter().copied().fold(f64::INFINITY, f64::min),
                "max_k_over_t": r.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect();
    let summary = json!({
        "source": if e.ensemble.is_none() { "cue" } else { "floquet" },
        "sizes": per_size,
        "mean": points_json(&points),
    });
    let plot = Plot {
        title: "Spectral form factor".into(),
        x_label: "t".into(),
        y_label: "mean K(t)".into(),
        log_x: true,
        log_y: true,
        curves: curves(&points),
    };
    Ok(Output { table, summary, plot })
}

pub fn dual_unitary_correlations(ctx: &Ctx) -> Result<Output, CliError> {
    let e = &ctx.cfg.engine;
    let sizes = e.sizes(&[10])?;
    let ens = e.ensemble(EnsembleName::DualUnitary)?;
    let bc = e.boundary(Boundary::Open);
    let reps = ctx.cfg.sampling.realizations(1)?;
    let mut cells = Vec::new();
    for &l in &sizes {
        if l > circuitlab_core::statevector::DENSE_OPERATOR_CAP {
            return Err(CliError::Config(format!("L = {l} exceeds the dense operator cap")));
        }
        cells.push((l, e.depth_or(l, 4)?));
    }
    let rows = ctx.sweep(&cells, reps, |&(l, depth), seed| {
        let c = build_brickwork(l, depth, bc, &ens, &mut RngStream::new(seed, 0).rng(Purpose::Circuit))?;
        let r0 = l / 2;
        let mut op = HeisenbergOperator::single(l, r0, Pauli::Z)?;
        let mut rows = Vec::with_capacity(l * depth);
        for (t, layer) in c.layers.iter().enumerate() {
            op.evolve_layer(layer)?;
            for probe in 0..l {
                let g = op.overlap_single(probe, Pauli::Z).norm();
                rows.push(Row::sample(probe as f64 - r0 as f64, g, l, 0.0, seed).with([(t + 1) as f64]));
            }
        }
        Ok(rows)
    })?;
    let table = ResultTable::new(&["t"], rows)?;
    // Mean |G| per (L, t, x).
    let mut acc: BTreeMap<(usize, usize, i64), (f64, usize)> = BTreeMap::new();
    for r in &table.rows {
        let a = acc.entry((r.l, r.extra[0] as usize, r.x as i64)).or_default();
        a.0 += r.y;
        a.1 += 1;
    }
    let mut max_off = 0f64;
    let mut max_on: BTreeMap<usize, f64> = BTreeMap::new();
    for r in &table.rows {
        let t = r.extra[0] as usize;
        if r.x.abs() as usize == t {
            let m = max_on.entry(t).or_default();
            *m = m.max(r.y);
        } else {
            max_off = max_off.max(r.y);
        }
    }
    let mut plot_curves: Vec<Curve> = Vec::new();
    for (&(l, t, x), &(s, n)) in &acc {
        let label = if sizes.len() > 1 { format!("L={l}, t={t}") } else { format!("t={t}") };
        match plot_curves.iter_mut().find(|c| c.label == label) {
            Some(c) => c.points.push((x as f64, s / n as f64, 0.0)),
            None => plot_curves.push(Curve { label, points: vec![(x as f64, s / n as f64, 0.0)] }),
        }
    }
    let summary = json!({
        "max_off_ray": max_off,
        "max_on_ray": max_on.iter().map(|(t, g)| json!({ "t": t, "max_abs_g": g })).collect::<Vec<_>>(),
    });
    let plot = Plot {
        title: "Dual-unitary two-point function".into(),
        x_label: "x".into(),
        y_label: "mean |G(x,t)|".into(),
        curves: plot_curves,
        ..Default::default()
    };
    Ok(Output { table, summary, plot })
}
