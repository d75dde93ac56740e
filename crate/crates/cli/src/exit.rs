//! Exit codes: 0 success, 2 budget exceeded, 3 input/invariant violation,
//! 4 missing hypothesis (convergence not indicated, heuristic mode
//! required, fixed point not fixed).

use kleinlab_core::{AnalysisError, EndsError, GeomError, GroupError, MeasureError};

pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<GroupError>() {
            return group_code(e);
        }
        if let Some(e) = cause.downcast_ref::<EndsError>() {
            return ends_code(e);
        }
        if let Some(e) = cause.downcast_ref::<MeasureError>() {
            return measure_code(e);
        }
        if let Some(e) = cause.downcast_ref::<AnalysisError>() {
            return analysis_code(e);
        }
        if cause.downcast_ref::<GeomError>().is_some() {
            return 3;
        }
    }
    3
}

fn group_code(e: &GroupError) -> i32 {
    match e {
        GroupError::BudgetExceeded { .. } => 2,
        GroupError::HeuristicRequired | GroupError::HeuristicCosetsRejected(_) => 4,
        GroupError::InvalidSpec(_) | GroupError::Geometry(_) => 3,
    }
}

fn ends_code(e: &EndsError) -> i32 {
    match e {
        EndsError::Group(g) => group_code(g),
        EndsError::Measure(m) => measure_code(m),
        EndsError::Analysis(a) => analysis_code(a),
        _ => 3,
    }
}

fn measure_code(e: &MeasureError) -> i32 {
    match e {
        MeasureError::Group(g) => group_code(g),
        MeasureError::NotFixed { .. } => 4,
        _ => 3,
    }
}

fn analysis_code(e: &AnalysisError) -> i32 {
    match e {
        AnalysisError::HypothesisMissing(_) => 4,
        AnalysisError::InsufficientDepth { .. } => 3,
    }
}
