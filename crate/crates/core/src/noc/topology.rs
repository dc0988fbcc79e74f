//! Topologies and routing functions.
//!
//! Router ids are row-major: `id = y * X + x`. Port naming uses
//! `East = +x`, `West = -x`, `North = +y`, `South = -y`.

use std::fmt;

use super::NocError;

pub type RouterId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    Mesh,
    Torus,
}

impl TopologyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TopologyKind::Mesh => "mesh",
            TopologyKind::Torus => "torus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoutingFunc {
    DimensionOrder,
    MinimalAdaptive,
}

impl RoutingFunc {
    pub fn as_str(self) -> &'static str {
        match self {
            RoutingFunc::DimensionOrder => "dimension_order",
            RoutingFunc::MinimalAdaptive => "minimal_adaptive",
        }
    }
}

/// Router ports. `Local` connects the router to its adapter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    Local,
    East,
    West,
    North,
    South,
}

pub const NUM_PORTS: usize = 5;

impl Port {
    pub const ALL: [Port; NUM_PORTS] = [Port::Local, Port::East, Port::West, Port::North, Port::South];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Port {
        Port::ALL[i]
    }

    /// The port a flit sent out of `self` arrives on at the neighbour.
    pub fn opposite(self) -> Port {
        match self {
            Port::Local => Port::Local,
            Port::East => Port::West,
            Port::West => Port::East,
            Port::North => Port::South,
            Port::South => Port::North,
        }
    }

    pub fn is_x(self) -> bool {
        matches!(self, Port::East | Port::West)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Port::Local => "local",
            Port::East => "east",
            Port::West => "west",
            Port::North => "north",
            Port::South => "south",
        }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NocTopology {
    pub kind: TopologyKind,
    pub dim_x: usize,
    pub dim_y: usize,
    pub routing: RoutingFunc,
}

impl NocTopology {
    pub fn mesh(dim_x: usize, dim_y: usize) -> Self {
        NocTopology { kind: TopologyKind::Mesh, dim_x, dim_y, routing: RoutingFunc::DimensionOrder }
    }

    pub fn torus(dim_x: usize, dim_y: usize) -> Self {
        NocTopology { kind: TopologyKind::Torus, dim_x, dim_y, routing: RoutingFunc::DimensionOrder }
    }

    pub fn with_routing(mut self, routing: RoutingFunc) -> Self {
        self.routing = routing;
        self
    }

    pub fn num_routers(&self) -> usize {
        self.dim_x * self.dim_y
    }

    pub fn check(&self, r: RouterId) -> Result<(), NocError> {
        if r < self.num_routers() {
            Ok(())
        } else {
            Err(NocError::InvalidRouter { router: r, count: self.num_routers() })
        }
    }

    pub fn coords(&self, r: RouterId) -> (usize, usize) {
        (r % self.dim_x, r / self.dim_x)
    }

    pub fn router_at(&self, x: usize, y: usize) -> RouterId {
        y * self.dim_x + x
    }

    /// Neighbour reached through `port`, if the link exists.
    pub fn neighbor(&self, r: RouterId, port: Port) -> Option<RouterId> {
        let (x, y) = self.coords(r);
        let (dx, dy) = (self.dim_x, self.dim_y);
        let wrap = self.kind == TopologyKind::Torus;
        let (nx, ny) = match port {
            Port::Local => return None,
            Port::East if x + 1 < dx => (x + 1, y),
            Port::East if wrap && dx > 1 => (0, y),
            Port::West if x > 0 => (x - 1, y),
            Port::West if wrap && dx > 1 => (dx - 1, y),
            Port::North if y + 1 < dy => (x, y + 1),
            Port::North if wrap && dy > 1 => (x, 0),
            Port::South if y > 0 => (x, y - 1),
            Port::South if wrap && dy > 1 => (x, dy - 1),
            _ => return None,
        };
        Some(self.router_at(nx, ny))
    }

    /// Signed per-dimension offset along the minimal direction. On a torus
    /// a tie between the two wrap directions resolves to the positive one.
    fn offset(&self, from: usize, to: usize, size: usize) -> isize {
        let fwd = (to + size - from) % size;
        match self.kind {
            TopologyKind::Mesh => to as isize - from as isize,
            TopologyKind::Torus => {
                let back = (size - fwd) % size;
                if fwd <= back {
                    fwd as isize
                } else {
                    -(back as isize)
                }
            }
        }
    }

    fn offsets(&self, current: RouterId, dest: RouterId) -> (isize, isize) {
        let (cx, cy) = self.coords(current);
        let (tx, ty) = self.coords(dest);
        (self.offset(cx, tx, self.dim_x), self.offset(cy, ty, self.dim_y))
    }

    /// Productive output ports (those that reduce the distance to `dest`), X first.
    pub fn productive_ports(&self, current: RouterId, dest: RouterId) -> Vec<Port> {
        let (ox, oy) = self.offsets(current, dest);
        let mut ports = Vec::with_capacity(2);
        if ox > 0 {
            ports.push(Port::East);
        } else if ox < 0 {
            ports.push(Port::West);
        }
        if oy > 0 {
            ports.push(Port::North);
        } else if oy < 0 {
            ports.push(Port::South);
        }
        ports
    }
}

pub fn min_hops(src: RouterId, dst: RouterId, topo: &NocTopology) -> Result<usize, NocError> {
    topo.check(src)?;
    topo.check(dst)?;
    let (ox, oy) = topo.offsets(src, dst);
    Ok(ox.unsigned_abs() + oy.unsigned_abs())
}

/// X offset is corrected fully before Y.
pub fn next_hop_dimension_order(current: RouterId, dest: RouterId, topo: &NocTopology) -> Result<Port, NocError> {
    topo.check(current)?;
    topo.check(dest)?;
    Ok(topo.productive_ports(current, dest).first().copied().unwrap_or(Port::Local))
}

/// Picks the productive port with the most free credits; ties go to the X
/// dimension. `free_credits` is indexed by [`Port::index`].
pub fn minimal_adaptive_next_hop(
    current: RouterId,
    dest: RouterId,
    topo: &NocTopology,
    free_credits: &[usize; NUM_PORTS],
) -> Result<Port, NocError> {
    topo.check(current)?;
    topo.check(dest)?;
    let ports = topo.productive_ports(current, dest);
    let mut best: Option<Port> = None;
    for p in ports {
        match best {
            Some(b) if free_credits[p.index()] <= free_credits[b.index()] => {}
            _ => best = Some(p),
        }
    }
    Ok(best.unwrap_or(Port::Local))
}
