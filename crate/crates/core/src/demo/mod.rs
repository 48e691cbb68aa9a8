//! Demonstration traces, operator learning, embodiment mapping, domain
//! merging and the simulated demonstrator.
//!
//! Traces arrive pre-segmented: activity recognition is the module boundary
//! with the teaching front-end. Learning is a pure function of the trace;
//! traces are immutable after ingestion.

mod embodiment;
mod learn;
mod merge;
mod simulate;
mod trace_io;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::pddl::{Atom, Ident, ObjectName};

pub use embodiment::{map_embodiment, EmbodimentError, EmbodimentMapping, MappingEntry};
pub use learn::{learn_operators, learn_step, LearnError, LearnedOperator};
pub use merge::{merge_domains, MergeOutcome};
pub use simulate::{simulate_demonstrator, DemoTarget, SimulateError};
pub use trace_io::{read_trace, write_trace, TraceIoError};

/// One segmented demonstration step: the recognized action label, the objects
/// the demonstrator interacted with, and the world state on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub label: Ident,
    pub touched: Vec<ObjectName>,
    pub pre: BTreeSet<Atom>,
    pub post: BTreeSet<Atom>,
}

impl TraceStep {
    /// Idle and other no-effect segments carry no learnable content.
    pub fn is_effective(&self) -> bool {
        self.pre != self.post
    }

    pub fn adds(&self) -> BTreeSet<Atom> {
        self.post.difference(&self.pre).cloned().collect()
    }

    pub fn dels(&self) -> BTreeSet<Atom> {
        self.pre.difference(&self.post).cloned().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Interactive,
    ReplayFile,
    Simulated,
}

/// A segmented demonstration: initial state plus chained steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemonstrationTrace {
    pub initial: BTreeSet<Atom>,
    pub steps: Vec<TraceStep>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("step {index} breaks the state chain: its pre-state is not the previous post-state")]
    BrokenChain { index: usize },
    #[error("step {index} is labeled idle but changes the state")]
    EffectfulIdle { index: usize },
}

impl DemonstrationTrace {
    pub fn new(initial: BTreeSet<Atom>, steps: Vec<TraceStep>, provenance: Provenance) -> Self {
        DemonstrationTrace { initial, steps, provenance }
    }

    /// Number of effective (non-idle) steps; the demonstration size unit.
    pub fn len_effective(&self) -> usize {
        self.steps.iter().filter(|s| s.is_effective()).count()
    }

    pub fn final_state(&self) -> BTreeSet<Atom> {
        self.steps.last().map(|s| s.post.clone()).unwrap_or_else(|| self.initial.clone())
    }

    /// Checks the chain invariant: steps[0].pre equals the initial state and
    /// each post-state feeds the next pre-state.
    pub fn validate_chain(&self) -> Result<(), TraceError> {
        let mut current = &self.initial;
        for (index, step) in self.steps.iter().enumerate() {
            if step.pre != *current {
                return Err(TraceError::BrokenChain { index });
            }
            if step.label.as_str() == "idle" && step.is_effective() {
                return Err(TraceError::EffectfulIdle { index });
            }
            current = &step.post;
        }
        Ok(())
    }
}
