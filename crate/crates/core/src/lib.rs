//! Transfinite-rank Denjoy-integrable constructions with certified enclosures,
//! Cantor–Bendixson-style derivative operators, verified integral identities and
//! a decision procedure for the first-order theory of the associated modules.

pub mod closedset;
pub mod denfun;
pub mod derivative;
pub mod enclosure;
pub mod error;
pub mod ordinal;
pub mod ppmodule;
pub mod quadcheck;
pub mod rational;

pub use denfun::{build_rank, ChildKey, ConstructedFunction, FunctionDescriptor, NodeKind, WeightProfile};
pub use closedset::{IntervalQ, PrePartition, SkeletonSet};
pub use enclosure::{Enclosure, Justification};
pub use error::{DecideError, DenjoyError, ParseError};
pub use ordinal::{Ordinal, OrdinalKind};
pub use rational::Q;
pub use derivative::{acstar_falsifier, derivative_step, local_l1_certificate, rank_certify, ACStarWitness, L1Certificate, RankCertificate};
pub use ppmodule::{PolyQ, SubgroupClass};
