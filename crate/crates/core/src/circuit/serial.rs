//! Canonical JSON form of a circuit.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::clifford::{CliffordGate, LocalPauli};
use super::gates::{Gate, GateKind, UnitaryGate};
use super::{Boundary, Circuit, Event, Geometry, Layer};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::pauli::{Pauli, PauliString};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct CircuitRepr {
    n_sites: usize,
    q: usize,
    boundary: Boundary,
    geometry: Geometry,
    layers: Vec<LayerRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time: Option<f64>,
    events: Vec<EventRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
enum EventRepr {
    #[serde(rename_all = "kebab-case")]
    Gate {
        sites: Vec<usize>,
        gate_kind: GateKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<[f64; 2]>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tableau: Option<Vec<String>>,
    },
    Measure {
        site: usize,
        basis: Pauli,
    },
}

fn event_repr(e: &Event) -> EventRepr {
    match e {
        Event::Measure { site, basis } => EventRepr::Measure { site: *site, basis: *basis },
        Event::Gate { sites, gate: Gate::Unitary(g) } => EventRepr::Gate {
            sites: sites.clone(),
            gate_kind: g.kind,
            matrix: Some(g.matrix().rows().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()),
            tableau: None,
        },
        Event::Gate { sites, gate: Gate::Clifford(c) } => EventRepr::Gate {
            sites: sites.clone(),
            gate_kind: GateKind::Clifford,
            matrix: None,
            tableau: Some(
                c.images()
                    .iter()
                    .map(|p| {
                        let ops = (0..c.arity()).map(|j| p.on(j)).collect();
                        PauliString { negative: p.negative, ops }.to_string()
                    })
                    .collect(),
            ),
        },
    }
}

fn event_from(r: EventRepr, q: usize) -> Result<Event> {
    match r {
        EventRepr::Measure { site, basis } => Ok(Event::Measure { site, basis }),
        EventRepr::Gate { sites, gate_kind, matrix: Some(rows), tableau: None } => {
            let rows: Vec<Vec<C64>> =
                rows.into_iter().map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect()).collect();
            let m = CMatrix::from_rows(&rows)?;
            let gate = UnitaryGate::from_matrix(gate_kind, q, m)?;
            Ok(Event::Gate { sites, gate: Gate::Unitary(Arc::new(gate)) })
        }
        EventRepr::Gate { sites, gate_kind: GateKind::Clifford, matrix: None, tableau: Some(images) } => {
            let images = images
                .iter()
                .map(|s| {
                    let p: PauliString = s.parse()?;
                    let pattern = p.ops.iter().enumerate().fold(0u8, |acc, (j, op)| {
                        let (x, z) = op.bits();
                        acc | (x as u8) << (2 * j) | (z as u8) << (2 * j + 1)
                    });
                    Ok(LocalPauli::new(pattern, p.negative))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Event::Gate { sites, gate: Gate::Clifford(Arc::new(CliffordGate::from_images(images)?)) })
        }
        EventRepr::Gate { .. } => Err(Error::Parse("gate needs exactly one of `matrix` or a Clifford `tableau`".into())),
    }
}

pub(super) fn to_json(c: &Circuit) -> String {
    let repr = CircuitRepr {
        n_sites: c.n_sites,
        q: c.q,
        boundary: c.boundary,
        geometry: c.geometry,
        layers: c
            .layers
            .iter()
            .map(|l| LayerRepr { time: l.time, events: l.events.iter().map(event_repr).collect() })
            .collect(),
    };
    serde_json::to_string(&repr).expect("circuit serialization is infallible")
}

pub(super) fn from_json(s: &str) -> Result<Circuit> {
    let repr: CircuitRepr = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let mut c = Circuit::new(repr.n_sites, repr.q, repr.boundary, repr.geometry);
    for l in repr.layers {
        let events = l.events.into_iter().map(|e| event_from(e, repr.q)).collect::<Result<Vec<_>>>()?;
        c.push_layer(Layer { time: l.time, events })?;
    }
    Ok(c)
}
