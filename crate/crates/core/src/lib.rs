//! Uniform sampling of Eulerian tours in directed multigraphs.
//!
//! The pipeline suppresses forced vertices, replaces each high-degree
//! vertex by a switching network of 2-in/2-out switches, runs the
//! flip-repair walk on the chord diagram of the resulting degree-two
//! graph and maps the final tour back.

pub mod chord;
pub mod gen;
pub mod graph;
pub mod lab;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod store;
pub mod timing;
pub mod switchnet;
pub mod verify;
pub mod walk;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use graph::{hierholzer_tour, validate_eulerian, DirectedMultigraph, Tour, TransitionSystem};
pub use rng::WalkRng;
