use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::evaluator::GridPoint;

#[derive(Debug, Clone)]
struct Entry {
    priority: f64,
    order: u64,
    point: GridPoint,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // max-heap: higher priority first, then earlier insertion
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.order.cmp(&self.order))
    }
}

/// Max-priority queue of grid points with FIFO order among equal priorities.
///
/// The same point may sit in the queue several times (once per parent that
/// discovered it); callers skip entries already claimed by a worker.
#[derive(Debug, Clone, Default)]
pub struct PointQueue {
    heap: BinaryHeap<Entry>,
    pushed: u64,
}

impl PointQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, point: GridPoint, priority: f64) {
        self.heap.push(Entry {
            priority,
            order: self.pushed,
            point,
        });
        self.pushed += 1;
    }

    /// Drops claimed entries from the head; afterwards the head, if any, is
    /// unclaimed.
    pub fn prune(&mut self, claimed: &HashSet<GridPoint>) {
        while self.heap.peek().is_some_and(|e| claimed.contains(&e.point)) {
            self.heap.pop();
        }
    }

    /// Highest-priority unclaimed point.
    pub fn pop_unclaimed(&mut self, claimed: &HashSet<GridPoint>) -> Option<(GridPoint, f64)> {
        self.prune(claimed);
        self.heap.pop().map(|e| (e.point, e.priority))
    }

    pub fn peek_priority(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.priority)
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64) -> GridPoint {
        GridPoint::new(vec![x])
    }

    #[test]
    fn priority_then_fifo() {
        let mut q = PointQueue::new();
        q.push(p(1), 0.5);
        q.push(p(2), 0.9);
        q.push(p(3), 0.5);
        q.push(p(4), 0.9);
        let none = HashSet::new();
        let order: Vec<i64> = std::iter::from_fn(|| q.pop_unclaimed(&none)).map(|(g, _)| g.coords()[0]).collect();
        assert_eq!(order, vec![2, 4, 1, 3]);
    }

    #[test]
    fn skips_claimed() {
        let mut q = PointQueue::new();
        q.push(p(1), 1.0);
        q.push(p(2), 0.5);
        let claimed: HashSet<GridPoint> = [p(1)].into_iter().collect();
        assert_eq!(q.pop_unclaimed(&claimed).unwrap().0, p(2));
        assert!(q.pop_unclaimed(&claimed).is_none());
    }
}
