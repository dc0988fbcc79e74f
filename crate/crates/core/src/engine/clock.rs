use super::EngineError;

/// Simulation time in integer picoseconds.
pub type Ps = u64;

pub type DomainId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockDomain {
    pub id: DomainId,
    pub freq_mhz: u32,
    pub period_ps: Ps,
    pub phase_ps: Ps,
}

/// `round(10^6 / f_MHz)` picoseconds.
pub fn period_from_mhz(freq_mhz: u32) -> Result<Ps, EngineError> {
    if freq_mhz == 0 {
        return Err(EngineError::DomainMismatch("frequency must be positive".into()));
    }
    let f = freq_mhz as u64;
    Ok((1_000_000 + f / 2) / f)
}

impl ClockDomain {
    pub fn new(id: DomainId, freq_mhz: u32) -> Result<Self, EngineError> {
        Ok(ClockDomain { id, freq_mhz, period_ps: period_from_mhz(freq_mhz)?, phase_ps: 0 })
    }

    pub fn with_phase(mut self, phase_ps: Ps) -> Self {
        self.phase_ps = phase_ps;
        self
    }

    /// Number of edges in `[0, horizon]`.
    pub fn edges_until(&self, horizon: Ps) -> u64 {
        if horizon < self.phase_ps {
            0
        } else {
            (horizon - self.phase_ps) / self.period_ps + 1
        }
    }
}

#[derive(Debug, Clone)]
struct DomainState {
    domain: ClockDomain,
    next_edge: Ps,
    fired: u64,
}

/// Merges the edge streams of several clock domains.
#[derive(Debug, Clone)]
pub struct EdgeScheduler {
    domains: Vec<DomainState>,
    now: Ps,
    started: bool,
}

impl EdgeScheduler {
    pub fn new(domains: &[ClockDomain]) -> Self {
        let mut domains: Vec<DomainState> = domains
            .iter()
            .map(|d| DomainState { domain: *d, next_edge: d.phase_ps, fired: 0 })
            .collect();
        domains.sort_by_key(|d| d.domain.id);
        EdgeScheduler { domains, now: 0, started: false }
    }

    pub fn now(&self) -> Ps {
        self.now
    }

    pub fn next_time(&self) -> Option<Ps> {
        self.domains.iter().map(|d| d.next_edge).min()
    }

    /// Advances to the next edge time; fills `fired` with the domain ids that
    /// have an edge there, in ascending id order.
    pub fn advance(&mut self, fired: &mut Vec<DomainId>) -> Option<Ps> {
        fired.clear();
        let t = self.next_time()?;
        for d in &mut self.domains {
            if d.next_edge == t {
                fired.push(d.domain.id);
                d.fired += 1;
                d.next_edge += d.domain.period_ps;
            }
        }
        debug_assert!(!self.started || t >= self.now);
        self.now = t;
        self.started = true;
        Some(t)
    }

    pub fn cycles(&self, id: DomainId) -> u64 {
        self.domains.iter().find(|d| d.domain.id == id).map_or(0, |d| d.fired)
    }

    pub fn domains(&self) -> impl Iterator<Item = &ClockDomain> {
        self.domains.iter().map(|d| &d.domain)
    }
}
