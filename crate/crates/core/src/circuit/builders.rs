use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::{Boundary, Circuit, Event, GateEnsemble, Geometry, Layer};
use crate::error::{param, Error, Result};
use crate::pauli::Pauli;

/// Site pairs gated in brickwork layer `tau` (1-based): odd layers pair
/// `(0,1),(2,3),…`, even layers `(1,2),(3,4),…` plus `(L−1,0)` on a ring.
pub fn brickwork_pairs(n: usize, tau: usize, boundary: Boundary) -> Result<Vec<(usize, usize)>> {
    if n < 2 {
        return Err(Error::InvalidGeometry("brickwork needs at least two sites".into()));
    }
    if boundary == Boundary::Periodic && n % 2 == 1 {
        return Err(Error::InvalidGeometry("periodic brickwork needs an even number of sites".into()));
    }
    let start = if tau % 2 == 1 { 0 } else { 1 };
    let mut pairs: Vec<(usize, usize)> = (start..n.saturating_sub(1)).step_by(2).map(|a| (a, a + 1)).collect();
    if boundary == Boundary::Periodic && start == 1 && n > 2 {
        pairs.push((n - 1, 0));
    }
    Ok(pairs)
}

/// Brickwork circuit of `depth` layers with gates drawn from `ensemble`.
pub fn build_brickwork<R: Rng + ?Sized>(
    n: usize,
    depth: usize,
    boundary: Boundary,
    ensemble: &GateEnsemble,
    rng: &mut R,
) -> Result<Circuit> {
    ensemble.validate()?;
    let mut c = Circuit::new(n, ensemble.q(), boundary, Geometry::Brickwork);
    for tau in 1..=depth {
        let events = brickwork_pairs(n, tau, boundary)?
            .into_iter()
            .map(|(a, b)| Event::Gate { sites: vec![a, b], gate: ensemble.sample(rng) })
            .collect();
        c.layers.push(Layer::new(events));
    }
    Ok(c)
}

/// A gate of a continuous-time circuit on bond `bond = (b, b+1 mod L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonEvent {
    pub time: f64,
    pub bond: usize,
}

/// Independent rate-`rate` Poisson processes on every bond, sorted by time
/// with ties broken by bond index.
pub fn poisson_events<R: Rng + ?Sized>(
    n: usize,
    duration: f64,
    rate: f64,
    boundary: Boundary,
    rng: &mut R,
) -> Result<Vec<PoissonEvent>> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(param(format!("Poisson rate must be positive, got {rate}")));
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(param(format!("duration must be nonnegative, got {duration}")));
    }
    let bonds = match boundary {
        Boundary::Open if n >= 2 => n - 1,
        Boundary::Periodic if n >= 3 => n,
        _ => return Err(Error::InvalidGeometry(format!("too few sites ({n}) for a {boundary:?} chain"))),
    };
    let exp = Exp::new(rate).map_err(|e| param(e.to_string()))?;
    let mut events = Vec::with_capacity((bonds as f64 * duration * rate * 1.1) as usize + 8);
    for bond in 0..bonds {
        let mut t = exp.sample(rng);
        while t < duration {
            events.push(PoissonEvent { time: t, bond });
            t += exp.sample(rng);
        }
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.bond.cmp(&b.bond)));
    Ok(events)
}

/// Continuous-time random circuit, packed into micro-layers in time order:
/// a new layer starts whenever the next event touches a busy site.
pub fn build_poisson_circuit<R: Rng + ?Sized>(
    n: usize,
    duration: f64,
    rate: f64,
    boundary: Boundary,
    ensemble: &GateEnsemble,
    rng: &mut R,
) -> Result<Circuit> {
    ensemble.validate()?;
    let events = poisson_events(n, duration, rate, boundary, rng)?;
    let mut c = Circuit::new(n, ensemble.q(), boundary, Geometry::Poisson);
    let mut busy = vec![false; n];
    let mut layer = Layer::default();
    for e in events {
        let (a, b) = (e.bond, (e.bond + 1) % n);
        if busy[a] || busy[b] {
            for ev in &layer.events {
                ev.sites().iter().for_each(|&s| busy[s] = false);
            }
            c.layers.push(std::mem::take(&mut layer));
        }
        busy[a] = true;
        busy[b] = true;
        layer.time = Some(e.time);
        layer.events.push(Event::Gate { sites: vec![a, b], gate: ensemble.sample(rng) });
    }
    if !layer.events.is_empty() {
        c.layers.push(layer);
    }
    Ok(c)
}

/// Inserts, after every layer containing gates, a layer of Z measurements on
/// each site independently with probability `p`. Empty layers are skipped.
pub fn place_measurements<R: Rng + ?Sized>(circuit: &Circuit, p: f64, rng: &mut R) -> Result<Circuit> {
    if !(0.0..=1.0).contains(&p) {
        return Err(param(format!("measurement probability must lie in [0, 1], got {p}")));
    }
    let mut out = Circuit { layers: Vec::with_capacity(2 * circuit.layers.len()), ..circuit.clone() };
    for layer in &circuit.layers {
        out.layers.push(layer.clone());
        if !layer.has_gates() || p == 0.0 {
            continue;
        }
        let events: Vec<Event> = (0..circuit.n_sites)
            .filter(|_| p >= 1.0 || rng.random::<f64>() < p)
            .map(|site| Event::Measure { site, basis: Pauli::Z })
            .collect();
        if !events.is_empty() {
            out.layers.push(Layer { time: layer.time, events });
        }
    }
    Ok(out)
}

/// All-to-all monitored circuit: each of `steps` micro-steps measures a random
/// qubit in Z with probability `p`, otherwise gates a random pair.
pub fn build_all_to_all<R: Rng + ?Sized>(
    n: usize,
    steps: usize,
    p: f64,
    ensemble: &GateEnsemble,
    rng: &mut R,
) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidGeometry("all-to-all circuits need at least two sites".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(param(format!("measurement probability must lie in [0, 1], got {p}")));
    }
    ensemble.validate()?;
    let mut c = Circuit::new(n, ensemble.q(), Boundary::Periodic, Geometry::AllToAll);
    for _ in 0..steps {
        let ev = if rng.random::<f64>() < p {
            Event::Measure { site: rng.random_range(0..n), basis: Pauli::Z }
        } else {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            Event::Gate { sites: vec![a, b], gate: ensemble.sample(rng) }
        };
        c.layers.push(Layer::new(vec![ev]));
    }
    Ok(c)
}
