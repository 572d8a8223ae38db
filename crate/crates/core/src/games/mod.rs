//! The four deceptive games, their catalog, and scripted reference policies.

mod nav;
mod oracle;
mod scripted;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::engine::CompiledGame;
use crate::gdl::{parse_game, parse_level, ParseError};

pub use nav::{first_step_toward, Navigator};
pub use oracle::{
    exhaustive_plan, oracle_policy, DeceptiCoinsOracle, FlowerOracle, InvestOracle, MintsOracle,
    MINTS_EAT_WINDOW,
};
pub use scripted::{always_collect_policy, AlwaysCollect};

/// Catalog ids, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameId {
    DC1,
    DC2,
    DC3,
    Invest,
    Flower,
    Mints,
}

impl GameId {
    pub const ALL: [GameId; 6] = [
        GameId::DC1,
        GameId::DC2,
        GameId::DC3,
        GameId::Invest,
        GameId::Flower,
        GameId::Mints,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GameId::DC1 => "DC1",
            GameId::DC2 => "DC2",
            GameId::DC3 => "DC3",
            GameId::Invest => "Invest",
            GameId::Flower => "Flower",
            GameId::Mints => "Mints",
        }
    }

    /// Short column header used in score tables.
    pub fn column(self) -> &'static str {
        match self {
            GameId::DC1 => "DC 1",
            GameId::DC2 => "DC 2",
            GameId::DC3 => "DC 3",
            GameId::Invest => "Inv",
            GameId::Flower => "Flow",
            GameId::Mints => "Mints",
        }
    }

    pub fn is_decepticoins(self) -> bool {
        matches!(self, GameId::DC1 | GameId::DC2 | GameId::DC3)
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown game `{0}` (expected one of DC1, DC2, DC3, Invest, Flower, Mints)")]
pub struct UnknownGame(pub String);

impl FromStr for GameId {
    type Err = UnknownGame;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dc1" | "dc 1" => Ok(GameId::DC1),
            "dc2" | "dc 2" => Ok(GameId::DC2),
            "dc3" | "dc 3" => Ok(GameId::DC3),
            "invest" | "inv" => Ok(GameId::Invest),
            "flower" | "flow" => Ok(GameId::Flower),
            "mints" | "waferthinmints" => Ok(GameId::Mints),
            _ => Err(UnknownGame(s.to_string())),
        }
    }
}

/// Failure categories the games are built to exploit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
pub enum DeceptionTag {
    LackOfHierarchicalUnderstanding,
    SubvertedGeneralization,
    DelayedReward,
    DelayedGratification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimalScore {
    Exact(i64),
    /// Best achievable score when luck cooperates.
    StochasticBound(i64),
}

impl OptimalScore {
    pub fn value(self) -> i64 {
        match self {
            OptimalScore::Exact(v) | OptimalScore::StochasticBound(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameCatalogEntry {
    pub id: GameId,
    pub spec_path: String,
    pub level_path: String,
    pub tags: Vec<DeceptionTag>,
    pub optimal_score: OptimalScore,
    pub trap_score: i64,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("catalog manifest: {0}")]
    Manifest(String),
    #[error("asset `{0}` is not bundled")]
    MissingAsset(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestEntry {
    spec: String,
    level: String,
    tags: Vec<DeceptionTag>,
    optimal: i64,
    #[serde(default)]
    stochastic: bool,
    trap: i64,
}

const BUNDLED: &[(&str, &str)] = &[
    ("catalog.toml", include_str!("../../assets/catalog.toml")),
    (
        "decepticoins/game.dgdl",
        include_str!("../../assets/decepticoins/game.dgdl"),
    ),
    (
        "decepticoins/level1.lvl",
        include_str!("../../assets/decepticoins/level1.lvl"),
    ),
    (
        "decepticoins/level2.lvl",
        include_str!("../../assets/decepticoins/level2.lvl"),
    ),
    (
        "decepticoins/level3.lvl",
        include_str!("../../assets/decepticoins/level3.lvl"),
    ),
    (
        "invest/game.dgdl",
        include_str!("../../assets/invest/game.dgdl"),
    ),
    (
        "invest/level1.lvl",
        include_str!("../../assets/invest/level1.lvl"),
    ),
    (
        "flower/game.dgdl",
        include_str!("../../assets/flower/game.dgdl"),
    ),
    (
        "flower/level1.lvl",
        include_str!("../../assets/flower/level1.lvl"),
    ),
    (
        "mints/game.dgdl",
        include_str!("../../assets/mints/game.dgdl"),
    ),
    (
        "mints/level1.lvl",
        include_str!("../../assets/mints/level1.lvl"),
    ),
];

/// Where asset text comes from: compiled into the binary or a directory.
#[derive(Debug, Clone)]
pub enum AssetSource {
    Bundled,
    Dir(PathBuf),
}

impl AssetSource {
    pub fn read(&self, rel: &str) -> Result<String, CatalogError> {
        match self {
            AssetSource::Bundled => BUNDLED
                .iter()
                .find(|(p, _)| *p == rel)
                .map(|(_, text)| (*text).to_string())
                .ok_or_else(|| CatalogError::MissingAsset(rel.to_string())),
            AssetSource::Dir(dir) => {
                let path = dir.join(rel);
                std::fs::read_to_string(&path).map_err(|source| CatalogError::Io {
                    path: path.display().to_string(),
                    source,
                })
            }
        }
    }
}

/// A catalog entry with its compiled game and the asset text it came from.
#[derive(Debug, Clone)]
pub struct LoadedGame {
    pub entry: GameCatalogEntry,
    pub game: Arc<CompiledGame>,
}

fn read_manifest(source: &AssetSource) -> Result<Vec<GameCatalogEntry>, CatalogError> {
    let text = source.read("catalog.toml")?;
    let raw: BTreeMap<String, ManifestEntry> =
        toml::from_str(&text).map_err(|e| CatalogError::Manifest(e.to_string()))?;
    let mut entries = Vec::with_capacity(raw.len());
    for (key, m) in raw {
        let id: GameId = key
            .parse()
            .map_err(|e: UnknownGame| CatalogError::Manifest(e.to_string()))?;
        entries.push(GameCatalogEntry {
            id,
            spec_path: m.spec,
            level_path: m.level,
            tags: m.tags,
            optimal_score: if m.stochastic {
                OptimalScore::StochasticBound(m.optimal)
            } else {
                OptimalScore::Exact(m.optimal)
            },
            trap_score: m.trap,
        });
    }
    entries.sort_by_key(|e| e.id);
    for id in GameId::ALL {
        if !entries.iter().any(|e| e.id == id) {
            return Err(CatalogError::Manifest(format!("missing entry for {id}")));
        }
    }
    Ok(entries)
}

fn compile(source: &AssetSource, entry: GameCatalogEntry) -> Result<LoadedGame, CatalogError> {
    let spec = parse_game(&source.read(&entry.spec_path)?).map_err(|e| CatalogError::Parse {
        path: entry.spec_path.clone(),
        source: e,
    })?;
    let level =
        parse_level(&source.read(&entry.level_path)?, &spec).map_err(|e| CatalogError::Parse {
            path: entry.level_path.clone(),
            source: e,
        })?;
    Ok(LoadedGame {
        game: CompiledGame::new(spec, level),
        entry,
    })
}

/// All six bundled entries, each parsed and validated.
pub fn load_catalog() -> Result<Vec<GameCatalogEntry>, CatalogError> {
    load_catalog_from(&AssetSource::Bundled)
}

pub fn load_catalog_from(source: &AssetSource) -> Result<Vec<GameCatalogEntry>, CatalogError> {
    let entries = read_manifest(source)?;
    for entry in &entries {
        compile(source, entry.clone())?;
    }
    Ok(entries)
}

/// Loads and compiles one bundled game.
pub fn load_game(id: GameId) -> Result<LoadedGame, CatalogError> {
    load_game_from(&AssetSource::Bundled, id)
}

pub fn load_game_from(source: &AssetSource, id: GameId) -> Result<LoadedGame, CatalogError> {
    let entry = read_manifest(source)?
        .into_iter()
        .find(|e| e.id == id)
        .expect("manifest checked for all ids");
    compile(source, entry)
}

/// Root of the on-disk asset tree shipped with this crate.
pub fn asset_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/assets"))
}
