//! Classical descriptions of random-circuit dynamics: minimal cuts, directed
//! polymers, the membrane variational problem, the operator-string Markov
//! chain and U(1) amplitude diffusion.

mod dprm;
mod markov;
mod membrane;
mod mincut;
mod poisson_cut;
mod u1;

pub use dprm::{dprm_ground_state, dprm_sample, dprm_scaling, DprmPath, DprmScaling, Disorder};
pub use markov::{front_endpoints, otoc_front, string_distribution_exact, string_markov_run, FrontProfile, MarkovTrajectory, EXACT_MARKOV_CAP};
pub use membrane::{MembraneGrid, MembraneModel};
pub use mincut::{CutConvention, CutGraph, CutResult};
pub use poisson_cut::{
    extrapolate_tension, fluctuation_exponents, kpz_exponents, line_tension_estimate, point_cut_sample, CutProfile,
    FluctuationFit, KpzExponents, LineTension, TensionFit,
};
pub use u1::{u1_amplitude_diffusion, u1_conserved_weight, U1Diffusion};
