//! Scissors congruence at desk scale.
//!
//! A polytope complex packages "shapes that can be cut and moved": a finite
//! poset with meets and a bottom (the vertical, cutting direction), a
//! groupoid of motions (the horizontal direction), a restriction action
//! letting motions act on sub-shapes, and a saturated system of covering
//! families describing legal tilings. On top of that sit indexed families
//! and their span category, whose cofibrations and weak equivalences give a
//! Waldhausen structure, and whose class group is computed exactly by integer
//! Smith normal form: two families are scissors congruent precisely when
//! their classes agree.

pub mod builders;
pub mod complex;
pub mod k0;
pub mod sc;
pub mod snf;
pub mod twist;
pub mod waldhausen;

pub use complex::{
    load_complex, load_complex_str, load_functor, save_complex, validate, validate_functor,
    ComplexError, HMorId, ObjectId, PolytopeComplex, PolytopeFunctor, ValidationReport,
};
