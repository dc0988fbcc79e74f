//! Input-queued virtual-channel router state.

use super::topology::{Port, NUM_PORTS};
use super::NocError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct InputVc {
    /// Output port chosen by route computation for the packet at the front.
    pub route: Option<Port>,
    /// Downstream VC claimed by that packet.
    pub out_vc: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RouterState {
    pub id: usize,
    vcs: usize,
    buffer_size: usize,
    pub(crate) inputs: Vec<InputVc>,
    credits: Vec<usize>,
    /// Which input (port * vcs + vc) holds each downstream VC.
    pub(crate) claims: Vec<Option<usize>>,
    pub(crate) va_next: Vec<usize>,
    pub(crate) sa_next: [usize; NUM_PORTS],
}

impl RouterState {
    pub fn new(id: usize, vcs: usize, buffer_size: usize) -> Self {
        let n = NUM_PORTS * vcs;
        RouterState {
            id,
            vcs,
            buffer_size,
            inputs: vec![InputVc::default(); n],
            credits: vec![buffer_size; n],
            claims: vec![None; n],
            va_next: vec![0; n],
            sa_next: [0; NUM_PORTS],
        }
    }

    pub fn vcs(&self) -> usize {
        self.vcs
    }

    pub fn buffer_size(&self) -> usize {
        self.buffer_size
    }

    #[inline]
    pub(crate) fn slot(&self, port: Port, vc: usize) -> usize {
        port.index() * self.vcs + vc
    }

    pub fn credits(&self, port: Port, vc: usize) -> usize {
        self.credits[self.slot(port, vc)]
    }

    pub(crate) fn consume_credit(&mut self, port: Port, vc: usize) {
        let s = self.slot(port, vc);
        debug_assert!(self.credits[s] > 0, "sent without credit");
        self.credits[s] -= 1;
    }

    /// Returns one credit for `(port, vc)`. Exceeding the buffer depth means
    /// the simulator lost track of a flit.
    pub fn credit_return(&mut self, port: Port, vc: usize) -> Result<(), NocError> {
        let s = self.slot(port, vc);
        if self.credits[s] >= self.buffer_size {
            return Err(NocError::CreditOverflow { router: self.id, port, vc });
        }
        self.credits[s] += 1;
        Ok(())
    }

    pub fn is_claimed(&self, port: Port, vc: usize) -> bool {
        self.claims[self.slot(port, vc)].is_some()
    }
}

/// Round-robin pick among `candidates` (sorted ascending) starting at `next`.
pub(crate) fn round_robin_pick(candidates: &[usize], next: usize) -> Option<usize> {
    candidates.iter().copied().find(|&c| c >= next).or_else(|| candidates.first().copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn credit_return_from_zero() {
        let mut r = RouterState::new(0, 3, 4);
        for _ in 0..4 {
            r.consume_credit(Port::East, 1);
        }
        assert_eq!(r.credits(Port::East, 1), 0);
        r.credit_return(Port::East, 1).unwrap();
        assert_eq!(r.credits(Port::East, 1), 1);
    }

    #[test]
    fn credit_overflow_is_an_error() {
        let mut r = RouterState::new(0, 1, 2);
        assert!(matches!(r.credit_return(Port::North, 0), Err(NocError::CreditOverflow { .. })));
    }

    #[test]
    fn burst_of_drains_restores_credits() {
        let mut r = RouterState::new(0, 2, 8);
        for _ in 0..5 {
            r.consume_credit(Port::West, 0);
        }
        for k in 1..=5 {
            r.credit_return(Port::West, 0).unwrap();
            assert_eq!(r.credits(Port::West, 0), 3 + k);
        }
    }

    #[test]
    fn rr_wraps() {
        assert_eq!(round_robin_pick(&[1, 3, 5], 4), Some(5));
        assert_eq!(round_robin_pick(&[1, 3, 5], 6), Some(1));
        assert_eq!(round_robin_pick(&[], 0), None);
    }
}
