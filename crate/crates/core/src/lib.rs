//! Minimum-cost many-to-one matchings under convex platform and group costs
//! with a total-utility floor.

pub mod baselines;
pub mod cost;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod io;
pub mod mcmf;
pub mod movielens;
pub mod network;
pub mod oracle;
pub mod solver;
pub mod uniform;
