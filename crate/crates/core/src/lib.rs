#![no_std]
extern crate alloc;

pub mod error;
pub mod expr;
pub mod print;
pub mod simplify;
pub mod subst;
pub mod diff;
pub mod collect;
pub mod gamma;
pub mod assume;
pub mod frac;
pub mod oracle;
pub mod model;
pub mod prolong;
pub mod determining;
pub mod linalg;
pub mod solver;
pub mod reduce;

pub use error::{Error, Result};
pub use expr::{q, qr, Arg, ExponentForm, Expr, FnApp, IndepVar, JetVar, Symbol, Q};
