//! Two-stage "build versus rent" optimization under uncertainty.

pub mod graph;
pub mod hybrid;
pub mod kcenter;
pub mod kmedian;
pub mod lp;
pub mod mincut;
pub mod mst;
pub mod objective;
pub mod oracle;
pub mod steiner;
pub mod ufl;

mod error;

pub use error::{Error, Result};
pub use graph::Graph;
pub use hybrid::{CoveringBase, HybridInstance, ReducedInstance};
pub use kcenter::{KCenterInstance, KCenterSolution};
pub use lp::{LinExpr, LinearProgram, LpSolution, LpStatus, Row, SeparationOracle};
pub use mincut::MinCutInstance;
pub use mst::MstInstance;
pub use objective::{ScenarioDistribution, TruncationResult, ONE_MINUS_INV_E};
pub use steiner::SteinerInstance;
pub use ufl::{Metric, UflInstance, UflSolution};

/// Edge sets bought in each stage of a two-stage network solution.
///
/// `second_stage[s]` lists the edges rented when scenario `s` realizes;
/// it is index-aligned with the instance's scenario list. Edge ids refer
/// to the instance graph and each set is kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoStageEdgeSolution {
    pub first_stage: Vec<usize>,
    pub second_stage: Vec<Vec<usize>>,
}

impl TwoStageEdgeSolution {
    pub fn new(mut first_stage: Vec<usize>, mut second_stage: Vec<Vec<usize>>) -> Self {
        first_stage.sort_unstable();
        first_stage.dedup();
        for set in &mut second_stage {
            set.sort_unstable();
            set.dedup();
        }
        Self { first_stage, second_stage }
    }
}
