//! Commutators of the model operators, the dense-matrix oracle, and the
//! ratio suites measuring the implicit constants of the commutator
//! estimates.

mod commutators;
pub mod dense;
pub mod suite;

pub use commutators::{
    commutator_l_f, commutator_l_f_split, commutator_pl_dx, commutator_pl_f, pl_dx_base_case, pl_f_base_case, LSplit,
    LSplitNorms,
};
pub use dense::{apply_expr, dense_operator, dense_rhs, DenseOperator, FunctionEnv, OperatorExpr, CHI, DENSE_MAX_K};
pub use suite::{
    bernstein_ratio, bernstein_suite, bounded_growth, check_admissible, GROWTH_TOLERANCE, ratio_suite, standard_suites, CommutatorReport,
    LemmaId, SuiteParams, SuiteSpec,
};
