use std::fmt::{self, Write as _};

use super::{GameSpec, TerminationRule};

/// Canonical text form; `parse_game` of the output yields an equal spec.
impl fmt::Display for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "game {}", self.name)?;
        writeln!(f, "time_limit {}", self.time_limit)?;
        writeln!(f)?;
        writeln!(f, "Sprites")?;
        for class in &self.sprite_classes {
            let mut line = format!("  {} : {}", class.name, class.role);
            if let Some(p) = &class.produces {
                let _ = write!(line, "({p})");
            }
            for (k, v) in &class.params {
                let _ = write!(line, " {k}={v}");
            }
            writeln!(f, "{line}")?;
        }
        if !self.interactions.is_empty() {
            writeln!(f)?;
            writeln!(f, "Interactions")?;
            for rule in &self.interactions {
                write!(f, "  {} {} > {}", rule.actor, rule.reactor, rule.effect)?;
                if rule.score_delta != 0 {
                    write!(f, " score={}", rule.score_delta)?;
                }
                if let Some(g) = &rule.guard {
                    write!(f, " if {} {} {}", g.resource, g.op.as_str(), g.value)?;
                }
                writeln!(f)?;
            }
        }
        if !self.terminations.is_empty() {
            writeln!(f)?;
            writeln!(f, "Termination")?;
            for term in &self.terminations {
                match term {
                    TerminationRule::Timeout { outcome } => {
                        writeln!(f, "  timeout > {}", outcome.as_str())?
                    }
                    TerminationRule::Touch { class, outcome } => {
                        writeln!(f, "  touch {class} > {}", outcome.as_str())?
                    }
                    TerminationRule::Count {
                        class,
                        count,
                        outcome,
                    } => writeln!(f, "  count {class} {count} > {}", outcome.as_str())?,
                }
            }
        }
        writeln!(f)?;
        writeln!(f, "LevelMapping")?;
        for (ch, names) in &self.level_mapping {
            writeln!(f, "  {ch} > {}", names.join(" "))?;
        }
        Ok(())
    }
}
