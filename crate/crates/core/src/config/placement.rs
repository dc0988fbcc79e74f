use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::noc::RouterId;

use super::{strip_comment, ConfigError, RadArchitecture};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModuleKind {
    /// Implemented in the programmable fabric.
    #[default]
    Soft,
    /// A hard accelerator block in an ASIC sector.
    Hard,
}

impl ModuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModuleKind::Soft => "soft",
            ModuleKind::Hard => "hard",
        }
    }
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModuleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "soft" => Ok(ModuleKind::Soft),
            "hard" => Ok(ModuleKind::Hard),
            _ => Err(format!("module kind must be `soft` or `hard`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementEntry {
    pub module: String,
    pub port: String,
    pub noc: usize,
    pub router: RouterId,
    pub line: usize,
}

/// Module ports bound to routers, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlacementMap {
    entries: Vec<PlacementEntry>,
    index: BTreeMap<(String, String), usize>,
    kinds: BTreeMap<String, ModuleKind>,
}

impl PlacementMap {
    pub fn parse(text: &str, arch: &RadArchitecture) -> Result<Self, ConfigError> {
        let mut map = PlacementMap::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = strip_comment(raw);
            if content.is_empty() {
                continue;
            }
            let malformed = |reason: &str| ConfigError::MalformedValue {
                line,
                key: content.to_string(),
                reason: reason.to_string(),
            };
            let fields: Vec<&str> = content.split_whitespace().collect();
            if !(3..=4).contains(&fields.len()) {
                return Err(malformed("expected `module.port noc router [soft|hard]`"));
            }
            let (module, port) = fields[0].split_once('.').ok_or_else(|| malformed("port must be written module.port"))?;
            if module.is_empty() || port.is_empty() {
                return Err(malformed("empty module or port name"));
            }
            let noc: usize = fields[1].parse().map_err(|_| malformed("noc id must be an integer"))?;
            let router: usize = fields[2].parse().map_err(|_| malformed("router id must be an integer"))?;
            let kind: ModuleKind = match fields.get(3) {
                Some(k) => k.parse().map_err(|e: String| malformed(&e))?,
                None => ModuleKind::Soft,
            };
            map.insert(PlacementEntry { module: module.into(), port: port.into(), noc, router, line }, kind, arch)?;
        }
        Ok(map)
    }

    pub fn insert(&mut self, entry: PlacementEntry, kind: ModuleKind, arch: &RadArchitecture) -> Result<(), ConfigError> {
        let line = entry.line;
        let key = (entry.module.clone(), entry.port.clone());
        if self.index.contains_key(&key) {
            return Err(ConfigError::DuplicatePort { line, port: format!("{}.{}", entry.module, entry.port) });
        }
        let noc = arch
            .nocs
            .get(entry.noc)
            .ok_or(ConfigError::UnknownNoc { line, noc: entry.noc, count: arch.nocs.len() })?;
        if entry.router >= noc.num_routers() {
            return Err(ConfigError::RouterOutOfRange {
                line,
                noc: entry.noc,
                router: entry.router,
                count: noc.num_routers(),
            });
        }
        let limit = arch.adapter.interfaces;
        if self.ports_at(entry.noc, entry.router).count() >= limit {
            return Err(ConfigError::OversubscribedRouter { line, noc: entry.noc, router: entry.router, limit });
        }
        match self.kinds.get(&entry.module) {
            Some(k) if *k != kind => {
                return Err(ConfigError::MalformedValue {
                    line,
                    key: entry.module.clone(),
                    reason: format!("module already declared {k}"),
                })
            }
            _ => {
                self.kinds.insert(entry.module.clone(), kind);
            }
        }
        self.index.insert(key, self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    pub fn entries(&self) -> &[PlacementEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, module: &str, port: &str) -> Option<&PlacementEntry> {
        self.index.get(&(module.to_string(), port.to_string())).map(|&i| &self.entries[i])
    }

    pub fn kind(&self, module: &str) -> Option<ModuleKind> {
        self.kinds.get(module).copied()
    }

    /// Placed module names in ascending order.
    pub fn modules(&self) -> impl Iterator<Item = &str> {
        self.kinds.keys().map(String::as_str)
    }

    /// Ports attached to one router, in file order; the position is the
    /// adapter interface id.
    pub fn ports_at(&self, noc: usize, router: RouterId) -> impl Iterator<Item = &PlacementEntry> {
        self.entries.iter().filter(move |e| e.noc == noc && e.router == router)
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{}.{} {} {} {}\n", e.module, e.port, e.noc, e.router, self.kinds[&e.module]))
            .collect()
    }
}
