use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EpisodeResult, HarnessError};
use crate::games::GameId;

/// Summary of all episodes of one agent on one game. `std` is the
/// population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub agent: String,
    #[serde(with = "super::game_id_serde")]
    pub game: GameId,
    pub mean: f64,
    pub std: f64,
    pub min: i64,
    pub max: i64,
    pub n: usize,
}

/// Rows sorted by agent name, then game column order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreTable {
    pub rows: Vec<ScoreRow>,
}

impl ScoreTable {
    pub fn get(&self, agent: &str, game: GameId) -> Option<&ScoreRow> {
        self.rows
            .iter()
            .find(|r| r.agent == agent && r.game == game)
    }

    pub fn agents(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.rows.iter().map(|r| r.agent.as_str()).collect();
        out.dedup();
        out
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| HarnessError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<ScoreTable, HarnessError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<Result<Vec<ScoreRow>, _>>()?;
        Ok(ScoreTable { rows })
    }

    /// Agents down, games across, in catalog column order.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Agent |");
        for g in GameId::ALL {
            let _ = write!(out, " {} |", g.column());
        }
        out.push_str("\n|---|");
        for _ in GameId::ALL {
            out.push_str("---:|");
        }
        out.push('\n');
        for agent in self.agents() {
            let _ = write!(out, "| {agent} |");
            for g in GameId::ALL {
                match self.get(agent, g) {
                    Some(r) => {
                        let _ = write!(out, " {:.2} ± {:.2} |", r.mean, r.std);
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Groups results by (agent, game) and summarises each group.
pub fn aggregate(results: &[EpisodeResult]) -> Result<ScoreTable, HarnessError> {
    if results.is_empty() {
        return Err(HarnessError::EmptyResults);
    }
    let mut groups: BTreeMap<(&str, GameId), Vec<i64>> = BTreeMap::new();
    for r in results {
        groups.entry((&r.agent, r.game)).or_default().push(r.score);
    }
    let rows = groups
        .into_iter()
        .map(|((agent, game), scores)| {
            let n = scores.len();
            let sum: i128 = scores.iter().map(|&s| i128::from(s)).sum();
            let mean = sum as f64 / n as f64;
            let var = scores
                .iter()
                .map(|&s| (s as f64 - mean).powi(2))
                .sum::<f64>()
                / n as f64;
            ScoreRow {
                agent: agent.to_string(),
                game,
                mean,
                std: var.sqrt(),
                min: *scores.iter().min().expect("non-empty"),
                max: *scores.iter().max().expect("non-empty"),
                n,
            }
        })
        .collect();
    Ok(ScoreTable { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(HarnessError::Usage(format!(
                "unknown format `{s}` (expected csv or markdown)"
            ))),
        }
    }
}

pub fn report(table: &ScoreTable, format: ReportFormat) -> Result<String, HarnessError> {
    match format {
        ReportFormat::Csv => table.to_csv(),
        ReportFormat::Markdown => Ok(table.to_markdown()),
    }
}
