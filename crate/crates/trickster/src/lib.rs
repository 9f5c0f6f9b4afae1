//! Game-tree search for trick-taking card games.
pub mod cli;
pub mod dd;
pub mod demo;
pub mod game;
pub mod lattice;
pub mod mc;
pub mod model;
pub mod partition;
pub mod sd;

/// Default scalar type for real-valued games.
pub type Scalar = f64;
/// Max/min algebra over [`Scalar`].
pub type ScalarValues = game::ScalarAlgebra<Scalar>;
/// Double-dummy play scored in [`Scalar`] tricks.
pub type DdPlay = dd::DdGame<Scalar>;
