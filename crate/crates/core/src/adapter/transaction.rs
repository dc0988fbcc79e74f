use std::fmt;
use std::str::FromStr;

/// A module port: `(module index, port index)` in the simulation's name tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PortRef {
    pub module: u32,
    pub port: u32,
}

impl PortRef {
    pub fn new(module: usize, port: usize) -> Self {
        PortRef { module: module as u32, port: port as u32 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransactionKind {
    Stream,
    MmReadReq,
    MmWriteReq,
    MmReadResp,
    MmWriteResp,
}

impl TransactionKind {
    pub const ALL: [TransactionKind; 5] = [
        TransactionKind::Stream,
        TransactionKind::MmReadReq,
        TransactionKind::MmWriteReq,
        TransactionKind::MmReadResp,
        TransactionKind::MmWriteResp,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TransactionKind::Stream => "stream",
            TransactionKind::MmReadReq => "mm_read_req",
            TransactionKind::MmWriteReq => "mm_write_req",
            TransactionKind::MmReadResp => "mm_read_resp",
            TransactionKind::MmWriteResp => "mm_write_resp",
        }
    }
}

impl fmt::Display for TransactionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TransactionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TransactionKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown transaction kind `{s}`"))
    }
}

/// Side-band fields: `last`/`user` for streams, `address` for memory-mapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct TxMeta {
    pub last: bool,
    pub user: u64,
    pub address: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub id: u64,
    pub kind: TransactionKind,
    pub src: PortRef,
    pub dest: PortRef,
    pub data: Vec<u8>,
    pub meta: TxMeta,
}

/// Transaction kind -> VC index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VcMapping(pub [usize; 5]);

impl Default for VcMapping {
    /// Streams on VC 0, memory-mapped requests on VC 1, responses on VC 2.
    fn default() -> Self {
        VcMapping([0, 1, 1, 2, 2])
    }
}

impl VcMapping {
    pub fn vc(&self, kind: TransactionKind) -> usize {
        self.0[kind.index()]
    }

    pub fn set(&mut self, kind: TransactionKind, vc: usize) {
        self.0[kind.index()] = vc;
    }

    pub fn uniform(vc: usize) -> Self {
        VcMapping([vc; 5])
    }

    pub fn max_vc(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for VcMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = TransactionKind::ALL.iter().map(|k| format!("{}:{}", k, self.vc(*k))).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for VcMapping {
    type Err = String;

    /// `kind:vc` pairs separated by commas; unlisted kinds keep their default.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut map = VcMapping::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once(':').ok_or_else(|| format!("expected kind:vc, got `{part}`"))?;
            let kind: TransactionKind = k.trim().parse()?;
            let vc: usize = v.trim().parse().map_err(|_| format!("bad vc index `{}`", v.trim()))?;
            map.set(kind, vc);
        }
        Ok(map)
    }
}
