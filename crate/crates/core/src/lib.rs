pub mod ensembles;
pub mod error;
pub mod harness;
pub mod inequalities;
pub mod linalg;
pub mod numrange;
pub mod oracles;
pub mod semihilbert;
pub mod tol;
