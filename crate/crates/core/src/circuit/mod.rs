//! Circuit intermediate representation shared by every engine.

mod builders;
pub mod clifford;
pub mod gates;
mod serial;

use serde::{Deserialize, Serialize};

pub use builders::{
    brickwork_pairs, build_all_to_all, build_brickwork, build_poisson_circuit, place_measurements, poisson_events,
    PoissonEvent,
};
pub use clifford::{CliffordGate, CliffordTable2, LocalPauli};
pub use gates::{
    haar_unitary, is_dual_unitary, make_dual_unitary, named, sample_dual_unitary, sample_haar_gate, sample_u1_gate,
    spacetime_flip, Gate, GateEnsemble, GateKind, UnitaryGate, UNITARY_TOL,
};

use crate::error::{Error, Result};
use crate::pauli::Pauli;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Brickwork,
    Poisson,
    AllToAll,
    Custom,
}

/// One spacetime event.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Gate { sites: Vec<usize>, gate: Gate },
    Measure { site: usize, basis: Pauli },
}

impl Event {
    pub fn sites(&self) -> &[usize] {
        match self {
            Event::Gate { sites, .. } => sites,
            Event::Measure { site, .. } => std::slice::from_ref(site),
        }
    }

    pub fn is_gate(&self) -> bool {
        matches!(self, Event::Gate { .. })
    }
}

/// Events with pairwise disjoint supports.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layer {
    /// Physical time of the layer, for continuous-time geometries.
    pub time: Option<f64>,
    pub events: Vec<Event>,
}

impl Layer {
    pub fn new(events: Vec<Event>) -> Self {
        Self { time: None, events }
    }

    pub fn has_gates(&self) -> bool {
        self.events.iter().any(Event::is_gate)
    }
}

/// An ordered list of layers on a chain of `n_sites` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_sites: usize,
    pub q: usize,
    pub boundary: Boundary,
    pub geometry: Geometry,
    pub layers: Vec<Layer>,
}

impl Circuit {
    pub fn new(n_sites: usize, q: usize, boundary: Boundary, geometry: Geometry) -> Self {
        Self { n_sites, q, boundary, geometry, layers: Vec::new() }
    }

    /// Appends a layer after checking it against the circuit.
    pub fn push_layer(&mut self, layer: Layer) -> Result<()> {
        self.check_layer(&layer)?;
        self.layers.push(layer);
        Ok(())
    }

    fn check_layer(&self, layer: &Layer) -> Result<()> {
        let mut used = vec![false; self.n_sites];
        for e in &layer.events {
            if let Event::Gate { sites, gate } = e {
                if gate.arity() != sites.len() {
                    return Err(Error::DimensionMismatch { expected: gate.arity(), got: sites.len() });
                }
                if gate.q() != self.q {
                    return Err(Error::DimensionMismatch { expected: self.q, got: gate.q() });
                }
            }
            for &s in e.sites() {
                if s >= self.n_sites {
                    return Err(Error::InvalidGeometry(format!("site {s} out of range for L = {}", self.n_sites)));
                }
                if std::mem::replace(&mut used[s], true) {
                    return Err(Error::InvalidGeometry(format!("site {s} appears twice in one layer")));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.layers.iter().try_for_each(|l| self.check_layer(l))
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.layers.iter().flat_map(|l| l.events.iter())
    }

    pub fn gate_count(&self) -> usize {
        self.events().filter(|e| e.is_gate()).count()
    }

    pub fn measurement_count(&self) -> usize {
        self.events().filter(|e| !e.is_gate()).count()
    }

    pub fn is_unitary(&self) -> bool {
        self.events().all(Event::is_gate)
    }

    /// The first `n` layers.
    pub fn truncated(&self, n: usize) -> Circuit {
        Circuit { layers: self.layers[..n.min(self.layers.len())].to_vec(), ..self.clone() }
    }

    /// Canonical JSON form.
    pub fn to_json(&self) -> String {
        serial::to_json(self)
    }

    pub fn from_json(s: &str) -> Result<Circuit> {
        serial::from_json(s)
    }
}
