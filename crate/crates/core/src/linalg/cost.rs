//! Instrumentation of dense factorizations.
//!
//! Every dense LU or Cholesky performed by the assimilation routines is
//! reported here. [`track`] collects the reports emitted by a closure on the
//! current thread, which is how online-cost contracts are checked.

use std::cell::RefCell;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorKind {
    Lu,
    Cholesky,
}

impl FactorKind {
    pub fn name(self) -> &'static str {
        match self {
            FactorKind::Lu => "lu",
            FactorKind::Cholesky => "cholesky",
        }
    }
}

/// One dense factorization of a square matrix of the given order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factorization {
    pub kind: FactorKind,
    pub order: usize,
}

thread_local! {
    static LOG: RefCell<Vec<Vec<Factorization>>> = const { RefCell::new(Vec::new()) };
}

pub(crate) fn record(kind: FactorKind, order: usize) {
    LOG.with(|log| {
        if let Some(frame) = log.borrow_mut().last_mut() {
            frame.push(Factorization { kind, order });
        }
    });
}

/// Runs `f` and returns the factorizations it performed, in order.
pub fn track<R>(f: impl FnOnce() -> R) -> (R, Vec<Factorization>) {
    LOG.with(|log| log.borrow_mut().push(Vec::new()));
    let out = f();
    let frame = LOG.with(|log| log.borrow_mut().pop().unwrap_or_default());
    // nested frames also see the inner factorizations
    LOG.with(|log| {
        if let Some(parent) = log.borrow_mut().last_mut() {
            parent.extend(frame.iter().copied());
        }
    });
    (out, frame)
}
