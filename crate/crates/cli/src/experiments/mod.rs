//! The experiment registry. Each entry validates its slice of the config,
//! sweeps an engine over grid cells and realizations, and summarizes.

mod classical;
mod monitored;
mod unitary;

use circuitlab_core::analysis::{crossing_finder, Series, SeriesMeta};
use circuitlab_core::rng::derive_seed;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::svg::{Curve, Plot};
use crate::table::{Point, ResultTable, Row};

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    pub run: fn(&Ctx) -> Result<Output, CliError>,
}

pub const REGISTRY: &[Experiment] = &[
    Experiment { name: "entanglement-growth", about: "Half-chain entropy vs time in Haar brickwork circuits (statevector)", run: unitary::entanglement_growth },
    Experiment { name: "page-check", about: "Annealed second Renyi entropy of deep Haar circuits vs the Page value", run: unitary::page_check },
    Experiment { name: "mipt-scan", about: "Tripartite mutual information of monitored Clifford circuits across p", run: monitored::mipt_scan },
    Experiment { name: "purification", about: "Entropy density of an initially mixed state under monitored Clifford dynamics", run: monitored::purification },
    Experiment { name: "reference-qubit", about: "Entropy of a reference qubit entangled with a monitored Clifford chain", run: monitored::reference_qubit },
    Experiment { name: "measurement-only-ising", about: "Spin-glass order of the measurement-only ZZ/X circuit across p_Z", run: monitored::measurement_only_ising },
    Experiment { name: "delta-s-scan", about: "Entropy drop from one measurement at distance x from the cut", run: monitored::delta_s_scan },
    Experiment { name: "otoc-front", about: "Operator front position and width from the Pauli-string Markov chain", run: classical::otoc_front },
    Experiment { name: "charge-diffusion", about: "Haar-averaged U(1) charge profile and its diffusion constant", run: classical::charge_diffusion },
    Experiment { name: "conserved-weight", about: "Weight of a conserved operator on the conserved density vs time", run: classical::conserved_weight },
    Experiment { name: "sff-ramp", about: "Spectral form factor of CUE matrices or Floquet brickwork circuits", run: unitary::sff_ramp },
    Experiment { name: "dual-unitary-correlations", about: "Two-point correlations of dual-unitary brickwork circuits", run: unitary::dual_unitary_correlations },
    Experiment { name: "min-cut-tension", about: "Line tension of minimal cuts through Poisson circuits", run: classical::min_cut_tension },
    Experiment { name: "dprm-exponents", about: "Energy and wandering exponents of a directed polymer", run: classical::dprm_exponents },
    Experiment { name: "membrane-solve", about: "Entanglement from the coarse-grained membrane minimization", run: classical::membrane_solve },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name)
}

pub struct Output {
    pub table: ResultTable,
    pub summary: Value,
    pub plot: Plot,
}

/// Everything an experiment may use while running.
pub struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub seed: u64,
    pub pool: &'a rayon::ThreadPool,
}

impl Ctx<'_> {
    /// Seed of realization `r` in grid cell `cell`.
    pub fn realization_seed(&self, cell: usize, r: usize) -> u64 {
        derive_seed(self.seed, &[cell as u64, r as u64])
    }

    /// Runs `f` on every cell × realization in parallel and concatenates the
    /// rows in grid order. The first failure in grid order is reported.
    pub fn sweep<C, F>(&self, cells: &[C], realizations: usize, f: F) -> Result<Vec<Row>, CliError>
    where
        C: Sync,
        F: Fn(&C, u64) -> circuitlab_core::Result<Vec<Row>> + Sync,
    {
        let jobs = cells.len() * realizations;
        let results: Vec<circuitlab_core::Result<Vec<Row>>> = self.pool.install(|| {
            (0..jobs)
                .into_par_iter()
                .map(|j| {
                    let (cell, r) = (j / realizations, j % realizations);
                    f(&cells[cell], self.realization_seed(cell, r))
                })
                .collect()
        });
        let mut rows = Vec::new();
        for (j, res) in results.into_iter().enumerate() {
            match res {
                Ok(r) => rows.extend(r),
                Err(source) => return Err(CliError::Cell { cell: j / realizations, realization: j % realizations, source }),
            }
        }
        Ok(rows)
    }
}

/// One curve per `(L, p)` pair present in `points`, labelled by whichever
/// of the two varies.
pub fn curves(points: &[Point]) -> Vec<Curve> {
    let mut keys: Vec<(usize, f64)> = Vec::new();
    for pt in points {
        if !keys.iter().any(|&(l, p)| l == pt.l && p == pt.p) {
            keys.push((pt.l, pt.p));
        }
    }
    let many_l = keys.iter().any(|k| k.0 != keys[0].0);
    let many_p = keys.iter().any(|k| k.1 != keys[0].1);
    keys.iter()
        .map(|&(l, p)| {
            let label = match (many_l, many_p) {
                (true, true) => format!("L={l}, p={p}"),
                (false, true) => format!("p={p}"),
                _ => format!("L={l}"),
            };
            let points = points.iter().filter(|pt| pt.l == l && pt.p == p).map(|pt| (pt.x, pt.y, pt.yerr)).collect();
            Curve { label, points }
        })
        .collect()
}

/// Curves of `y` vs `x` (x = p) grouped by `L`, as analysis series.
pub fn series_by_size(points: &[Point]) -> Result<Vec<Series>, CliError> {
    let mut sizes: Vec<usize> = points.iter().map(|p| p.l).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .iter()
        .map(|&l| {
            let pts: Vec<&Point> = points.iter().filter(|p| p.l == l).collect();
            Ok(Series::new(
                pts.iter().map(|p| p.x).collect(),
                pts.iter().map(|p| p.y).collect(),
                pts.iter().map(|p| p.yerr).collect(),
                pts.iter().map(|p| p.n).collect(),
                SeriesMeta { l: Some(l), ..Default::default() },
            )?)
        })
        .collect()
}

/// Crossing of size-resolved curves, or the reason there is none.
pub fn crossing_json(series: &[Series]) -> Value {
    if series.len() < 2 {
        return json!({ "error": "need at least two sizes" });
    }
    match crossing_finder(series) {
        Ok(c) => json!({
            "estimate": c.estimate,
            "error": c.error,
            "pairs": c.pairs.iter().map(|&(a, b, x)| json!({ "L1": a, "L2": b, "crossing": x })).collect::<Vec<_>>(),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn points_json(points: &[Point]) -> Value {
    serde_json::to_value(points).expect("plain data")
}
