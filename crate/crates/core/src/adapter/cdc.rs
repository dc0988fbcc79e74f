//! Timestamped FIFOs used for every inter-component channel.
//!
//! An item pushed at producer time `tw` becomes poppable at the first
//! consumer edge strictly after `tw`; a slot freed by a pop at `tp` becomes
//! available to the producer strictly after `tp`. Because both directions
//! only observe strictly earlier events, the result of a simulated edge does
//! not depend on the order in which same-time components are ticked.

use std::collections::VecDeque;

use crate::engine::Ps;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushError {
    Full,
}

#[derive(Debug, Clone)]
pub struct AsyncFifo<T> {
    items: VecDeque<(Ps, T)>,
    freed: VecDeque<Ps>,
    capacity: usize,
}

impl<T> AsyncFifo<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "fifo depth must be >= 1");
        AsyncFifo { items: VecDeque::with_capacity(capacity), freed: VecDeque::new(), capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// All stored items, visible or not.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn occupancy_at(&mut self, now: Ps) -> usize {
        while matches!(self.freed.front(), Some(&t) if t < now) {
            self.freed.pop_front();
        }
        self.items.len() + self.freed.len()
    }

    /// Free slots as seen by the producer at `now`.
    pub fn free_slots(&mut self, now: Ps) -> usize {
        self.capacity.saturating_sub(self.occupancy_at(now))
    }

    pub fn can_push(&mut self, now: Ps) -> bool {
        self.free_slots(now) > 0
    }

    pub fn push(&mut self, now: Ps, item: T) -> Result<(), (PushError, T)> {
        if !self.can_push(now) {
            return Err((PushError::Full, item));
        }
        self.items.push_back((now, item));
        Ok(())
    }

    pub fn peek(&self, now: Ps) -> Option<&T> {
        match self.items.front() {
            Some((tw, item)) if *tw < now => Some(item),
            _ => None,
        }
    }

    /// Write time of the front item, if visible.
    pub fn peek_time(&self, now: Ps) -> Option<Ps> {
        match self.items.front() {
            Some((tw, _)) if *tw < now => Some(*tw),
            _ => None,
        }
    }

    pub fn pop(&mut self, now: Ps) -> Option<T> {
        match self.items.front() {
            Some((tw, _)) if *tw < now => {
                self.freed.push_back(now);
                self.items.pop_front().map(|(_, v)| v)
            }
            _ => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.items.iter().map(|(_, v)| v)
    }
}

pub fn cdc_push<T>(fifo: &mut AsyncFifo<T>, now: Ps, item: T) -> Result<(), (PushError, T)> {
    fifo.push(now, item)
}

pub fn cdc_pop<T>(fifo: &mut AsyncFifo<T>, now: Ps) -> Option<T> {
    fifo.pop(now)
}
