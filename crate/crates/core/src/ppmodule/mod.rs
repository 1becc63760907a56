//! First-order theory of function spaces viewed as Q[X]-modules, where X acts
//! by indefinite integration from the left endpoint.

pub mod classify;
pub mod decide;
pub mod parser;
pub mod poly;

pub use classify::{
    classify_basic, classify_kernel, invariant_index, reduce_pp, subgroup_of_basic, subgroup_of_pp, BasicForm,
    IndexValue, SubgroupClass,
};
pub use decide::{decide, decide_in, decide_str, ModuleKind, DEFAULT_BUDGET};
pub use parser::{parse, parse_formula, parse_poly, parse_pp, Cmp, Formula, LinTerm, PPFormula, Parsed};
pub use poly::PolyQ;
