//! Model checking for a dynamic logic of belief and atomic observation.
//!
//! The crate covers the whole pipeline: observational epistemic models
//! ([`kripke`]), action models with pre- and postconditions ([`action`]),
//! product update ([`update`]), compilation of dynamic formulas to the static
//! fragment ([`reduce`]), builders for misdirection notions such as
//! simulation and dissimulation ([`derived`]) and bounded validity checking
//! by exhaustive model enumeration ([`explorer`]).
//!
//! ```
//! use dlm::scenario;
//!
//! let example = scenario::showing_example();
//! let formula = example.registry.parse(scenario::SHOWING_FORMULA).unwrap();
//! assert!(dlm::kripke::satisfies(&example.initial, &formula));
//! ```

pub mod action;
pub mod cli;
pub mod derived;
pub mod dot;
mod error;
mod eval;
pub mod explorer;
pub mod formula;
pub mod io;
pub mod kripke;
pub mod parser;
pub mod reduce;
pub mod scenario;
pub mod update;

pub use action::{ActionModel, ActionType, EventId, LiteralConj, PointedAction, PostMap};
pub use error::{Error, Result};
pub use formula::{Action, ActionLabel, AgentId, Atom, Formula, Literal, ObsAtom, PropId};
pub use kripke::{FrameFlags, FrameReport, Model, ModelBuilder, PointedModel, Strictness, WorldId};
pub use parser::{ParseError, Registry};
