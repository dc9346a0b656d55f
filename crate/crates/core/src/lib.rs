//! Finitary coalgebraic logic with the cover modality `∇`.

pub mod coalgebra;
pub mod derivation;
pub mod elem;
pub mod enumerate;
pub mod error;
pub mod finalseq;
pub mod flow;
pub mod formula;
pub mod functor;
pub mod lexer;
pub mod lifting;
pub mod literal;
pub mod onestep;
pub mod props;
pub mod redistrib;

pub use coalgebra::{
    load_coalgebra, meaning_set, model_check, parse_coalgebra_file, Coalgebra, CoalgebraFile, ModelChecker,
};
pub use derivation::{check_derivation, check_step, parse_proof, CheckError, Derivation, ProofFile, Reason, RULES};
pub use elem::{base, canonical_compare, check_over, fmap, ConstTag, FinSet, FiniteCarrier, TElem};
pub use enumerate::{count, enumerate};
pub use error::{Error, Result};
pub use finalseq::{
    behavior_map, decide_inequality, decide_valid, final_level, mng_n, n_final_coalgebra, n_final_transitions,
    FinalLevel, FinalSequence, PointedCountermodel, Stratifier, Validity,
};
pub use formula::{boxed, diamond, parse_formula, parse_inequality, Formula, Inequality};
pub use functor::{parse_functor, Functor, FunctorExpr, Shape, DEFAULT_MAX_ENUM};
pub use lifting::{
    compose_relations, in_lifting, lifted_members, lifting_witness, parse_relation, FlowWitness, Relation,
};
pub use literal::{parse_elem, parse_elem_of_sets, parse_elem_set};
pub use onestep::{
    lifted_atoms, one_step_equiv, one_step_eval0, one_step_eval1, one_step_includes, LiftedAtom, OneStepContext,
    OneStepModel,
};
pub use props::{valuation_name, PropFrame};
pub use redistrib::{neg_dual, negation_normal_form, slim_redistributions};
