//! Instance generators: the two reference examples, random grids, the
//! acceptance corpus, and the 3-SAT hardness reduction.

mod cnf;
mod corpus;
mod fig;
mod grid;
mod hardness;

pub use cnf::{parse_dimacs, write_dimacs, CnfError, CnfFormula, Lit};
pub use corpus::{acceptance_corpus, CorpusEntry};
pub use fig::{gen_fig1, gen_fig2};
pub use grid::gen_grid;
pub use hardness::{
    build_hardness_instance, check_hardness_structure, repair_from_assignment, HardnessLayout,
};

use thiserror::Error;

use crate::solver::SolveError;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("{cells} cells cannot host {agents} agents with distinct sources and targets")]
    TooManyAgents { cells: usize, agents: usize },
    #[error("no solvable instance found within {attempts} attempts (cap {cap})")]
    NoSolvableInstance { attempts: u32, cap: u32 },
    #[error("formula has {0} variables; exhaustive assignment search is capped at 20")]
    FormulaTooLarge(u32),
    #[error(transparent)]
    Solve(#[from] SolveError),
}
