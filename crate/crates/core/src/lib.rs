//! Hybrid genetic search for the traveling salesman problem with a drone.

pub mod evaluation;
pub mod genetic;
pub mod io;
pub mod local_search;
pub mod model;
pub mod oracle;
pub mod restore;
pub mod split;
