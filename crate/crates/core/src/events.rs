//! Finite sample spaces, events and betting contexts.
//!
//! Every [`Event`] is tied to the [`SampleSpace`] that created it. Two spaces
//! built from identical labels are still different spaces, and events from
//! different spaces never combine: there is no common algebra across betting
//! contexts.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use bitvec::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EventError {
    #[error("sample space must have at least one atom")]
    EmptySpace,
    #[error("duplicate atom label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown atom label {0:?}")]
    UnknownLabel(String),
    #[error("atom index {index} out of range for space of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("events belong to different sample spaces")]
    MixedSpaces,
    #[error("{0} takes {1} argument(s)")]
    Arity(BoolOp, usize),
}

#[derive(Debug)]
struct SpaceInner {
    labels: Vec<String>,
}

/// Ordered set of distinct atom labels.
#[derive(Clone)]
pub struct SampleSpace(Arc<SpaceInner>);

impl SampleSpace {
    pub fn new<I, S>(labels: I) -> Result<Self, EventError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(EventError::EmptySpace);
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(EventError::DuplicateLabel(l.clone()));
            }
        }
        Ok(SampleSpace(Arc::new(SpaceInner { labels })))
    }

    pub fn size(&self) -> usize {
        self.0.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.labels.iter().position(|l| l == label)
    }

    /// Same space, not merely same labels.
    pub fn same_as(&self, other: &SampleSpace) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn empty_event(&self) -> Event {
        Event {
            space: self.clone(),
            members: bitvec![0; self.size()],
        }
    }

    pub fn full_event(&self) -> Event {
        Event {
            space: self.clone(),
            members: bitvec![1; self.size()],
        }
    }

    pub fn atom(&self, index: usize) -> Result<Event, EventError> {
        self.event_from_indices([index])
    }

    pub fn event_from_indices<I>(&self, indices: I) -> Result<Event, EventError>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut ev = self.empty_event();
        for i in indices {
            if i >= self.size() {
                return Err(EventError::IndexOutOfRange {
                    index: i,
                    size: self.size(),
                });
            }
            ev.members.set(i, true);
        }
        Ok(ev)
    }

    pub fn event_from_labels<I, S>(&self, labels: I) -> Result<Event, EventError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut ev = self.empty_event();
        for l in labels {
            let i = self
                .index_of(l.as_ref())
                .ok_or_else(|| EventError::UnknownLabel(l.as_ref().to_string()))?;
            ev.members.set(i, true);
        }
        Ok(ev)
    }

    /// Event from a bitmask over the first 64 atoms (bit i = atom i).
    pub fn event_from_mask(&self, mask: u64) -> Event {
        let mut ev = self.empty_event();
        for i in 0..self.size().min(64) {
            if mask >> i & 1 == 1 {
                ev.members.set(i, true);
            }
        }
        ev
    }

    /// All `2^n` events, in mask order. Intended for small spaces.
    pub fn all_events(&self) -> impl Iterator<Item = Event> + '_ {
        assert!(self.size() < 32, "event enumeration only for small spaces");
        (0..1u64 << self.size()).map(move |m| self.event_from_mask(m))
    }
}

impl fmt::Debug for SampleSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SampleSpace").field(&self.0.labels).finish()
    }
}

/// Subset of the atoms of one sample space.
#[derive(Clone)]
pub struct Event {
    space: SampleSpace,
    members: BitVec,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_as(&other.space) && self.members == other.members
    }
}

impl Eq for Event {}

impl std::hash::Hash for Event {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        Arc::as_ptr(&self.space.0).hash(state);
        self.members.hash(state);
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.atoms_of().join(","))
    }
}

impl Event {
    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.get(index).map(|b| *b).unwrap_or(false)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter_ones()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.not_any()
    }

    pub fn is_full(&self) -> bool {
        self.members.all()
    }

    /// Labels of member atoms, in space order.
    pub fn atoms_of(&self) -> Vec<String> {
        self.indices()
            .map(|i| self.space.labels()[i].clone())
            .collect()
    }

    pub fn is_disjoint(&self, other: &Event) -> Result<bool, EventError> {
        Ok(self.and(other)?.is_empty())
    }

    pub fn and(&self, other: &Event) -> Result<Event, EventError> {
        boolean_combine(BoolOp::And, self, Some(other))
    }

    pub fn or(&self, other: &Event) -> Result<Event, EventError> {
        boolean_combine(BoolOp::Or, self, Some(other))
    }

    pub fn not(&self) -> Event {
        Event {
            space: self.space.clone(),
            members: !self.members.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Not,
}

impl fmt::Display for BoolOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoolOp::And => "AND",
            BoolOp::Or => "OR",
            BoolOp::Not => "NOT",
        })
    }
}

pub fn boolean_combine(op: BoolOp, e1: &Event, e2: Option<&Event>) -> Result<Event, EventError> {
    match (op, e2) {
        (BoolOp::Not, None) => Ok(e1.not()),
        (BoolOp::Not, Some(_)) => Err(EventError::Arity(op, 1)),
        (_, None) => Err(EventError::Arity(op, 2)),
        (_, Some(e2)) => {
            if !e1.space.same_as(&e2.space) {
                return Err(EventError::MixedSpaces);
            }
            let mut members = e1.members.clone();
            if op == BoolOp::And {
                members &= e2.members.as_bitslice();
            } else {
                members |= e2.members.as_bitslice();
            }
            Ok(Event {
                space: e1.space.clone(),
                members,
            })
        }
    }
}

/// A maximal set of jointly resolvable bets: an id plus its own sample space.
#[derive(Clone, Debug)]
pub struct BettingContext {
    pub id: String,
    pub space: SampleSpace,
}

impl BettingContext {
    pub fn new(id: impl Into<String>, space: SampleSpace) -> Self {
        BettingContext {
            id: id.into(),
            space,
        }
    }
}
