use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArbiterKind {
    #[default]
    RoundRobin,
    FixedPriority,
}

impl ArbiterKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArbiterKind::RoundRobin => "round_robin",
            ArbiterKind::FixedPriority => "fixed_priority",
        }
    }
}

impl fmt::Display for ArbiterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArbiterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "round_robin" | "rr" => Ok(ArbiterKind::RoundRobin),
            "fixed_priority" | "priority" => Ok(ArbiterKind::FixedPriority),
            _ => Err(format!("unknown arbiter `{s}` (expected round_robin or fixed_priority)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Arbiter {
    kind: ArbiterKind,
    n: usize,
    last: Option<usize>,
}

impl Arbiter {
    pub fn new(kind: ArbiterKind, n: usize) -> Self {
        Arbiter { kind, n, last: None }
    }

    pub fn last_grant(&self) -> Option<usize> {
        self.last
    }

    /// Round-robin starts searching just after the previous grant; fixed
    /// priority always favours the lowest index.
    pub fn grant(&mut self, mut ready: impl FnMut(usize) -> bool) -> Option<usize> {
        let start = match (self.kind, self.last) {
            (ArbiterKind::RoundRobin, Some(l)) => l + 1,
            _ => 0,
        };
        let pick = (0..self.n).map(|k| (start + k) % self.n.max(1)).find(|&i| ready(i))?;
        self.last = Some(pick);
        Some(pick)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sole_candidate_wins() {
        let mut a = Arbiter::new(ArbiterKind::RoundRobin, 3);
        a.grant(|i| i == 0);
        assert_eq!(a.grant(|i| i == 2), Some(2));
        assert_eq!(a.grant(|_| false), None);
    }

    #[test]
    fn round_robin_after_last() {
        let mut a = Arbiter::new(ArbiterKind::RoundRobin, 2);
        assert_eq!(a.grant(|i| i == 0), Some(0));
        assert_eq!(a.grant(|_| true), Some(1));
        assert_eq!(a.grant(|_| true), Some(0));
    }

    #[test]
    fn fixed_priority_prefers_low_index() {
        let mut a = Arbiter::new(ArbiterKind::FixedPriority, 3);
        assert_eq!(a.grant(|_| true), Some(0));
        assert_eq!(a.grant(|_| true), Some(0));
        assert_eq!(a.grant(|i| i > 0), Some(1));
    }
}
