//! Key ordering and comparison counting.
//!
//! Every key comparison the queue makes goes through a [`CountingComparator`],
//! so comparison totals are exact in the comparison model.

use std::cell::Cell;
use std::cmp::Ordering;

/// A total order over keys.
///
/// `PartialEq` is required so two queues can check that they order keys the
/// same way before melding.
pub trait KeyOrder<K: ?Sized>: Clone + PartialEq {
    fn compare(&self, a: &K, b: &K) -> Ordering;
}

/// The key type's own `Ord`; yields a min-queue.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Natural;

impl<K: Ord + ?Sized> KeyOrder<K> for Natural {
    #[inline]
    fn compare(&self, a: &K, b: &K) -> Ordering {
        a.cmp(b)
    }
}

/// Reverse of the key type's `Ord`; yields a max-queue.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Reversed;

impl<K: Ord + ?Sized> KeyOrder<K> for Reversed {
    #[inline]
    fn compare(&self, a: &K, b: &K) -> Ordering {
        b.cmp(a)
    }
}

/// Wraps a [`KeyOrder`] and counts every call.
#[derive(Debug, Clone)]
pub struct CountingComparator<C> {
    inner: C,
    count: Cell<u64>,
}

impl<C> CountingComparator<C> {
    pub fn new(inner: C) -> Self {
        Self {
            inner,
            count: Cell::new(0),
        }
    }

    /// Comparisons made so far.
    pub fn count(&self) -> u64 {
        self.count.get()
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }

    /// Adds another comparator's total to this one (used when melding).
    pub(crate) fn absorb_count(&self, other: &CountingComparator<C>) {
        self.count.set(self.count.get() + other.count.get());
    }

    #[inline]
    pub fn compare<K: ?Sized>(&self, a: &K, b: &K) -> Ordering
    where
        C: KeyOrder<K>,
    {
        self.count.set(self.count.get() + 1);
        self.inner.compare(a, b)
    }

    /// `a < b` under the wrapped order.
    #[inline]
    pub fn less<K: ?Sized>(&self, a: &K, b: &K) -> bool
    where
        C: KeyOrder<K>,
    {
        self.compare(a, b) == Ordering::Less
    }
}
