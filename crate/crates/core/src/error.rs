use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry: {0}")]
    Geometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configuration value failed validation; `field` is the dotted path.
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("infeasible plan: {0}")]
    InfeasiblePlan(String),

    /// The search stopped early; `incumbent` is feasible and the optimum
    /// lies in `[incumbent.objective_value, upper_bound]`.
    #[error("solver node budget exceeded (incumbent {:.6}, bound {upper_bound:.6})", incumbent.objective_value)]
    BudgetExceeded {
        incumbent: Box<crate::planner::PlanSolution>,
        upper_bound: f64,
    },

    #[error("matrix cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Self::Geometry(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Self::InvalidArgument(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
