//! Requirements for control systems as contracted imperative routines.
//!
//! A plant is modelled as a finite-state [`ir::Model`] whose step routine
//! runs forever. Requirements are routines that wrap the step in `assume`
//! statements (environment) and check `assert` statements (machine
//! obligations); timing is tracked by a ghost `duration` counter. The
//! [`verifier`] inlines calls, unrolls loops and checks every assertion
//! from every initial state the assumptions allow.

pub mod ir;
pub mod asm;
pub mod patterns;
pub mod verifier;
pub mod frontend;
pub mod lgs;
