use super::{GameSpec, ParseError};

/// Rectangular ASCII level; space is the blank cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMap {
    pub width: usize,
    pub height: usize,
    pub rows: Vec<String>,
}

impl LevelMap {
    pub fn char_at(&self, x: usize, y: usize) -> char {
        self.rows[y].chars().nth(x).unwrap_or(' ')
    }

    /// Cells in row-major order as `(x, y, char)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, char)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(y, row)| row.chars().enumerate().map(move |(x, c)| (x, y, c)))
    }
}

/// Parses a `.lvl` map against `spec`'s character mapping.
///
/// A single trailing newline is tolerated; any other blank line counts as a
/// zero-width row and is rejected as ragged.
pub fn parse_level(text: &str, spec: &GameSpec) -> Result<LevelMap, ParseError> {
    let mut rows: Vec<String> = text
        .split('\n')
        .map(|r| r.strip_suffix('\r').unwrap_or(r).to_string())
        .collect();
    if rows.last().is_some_and(|r| r.is_empty()) {
        rows.pop();
    }
    if rows.is_empty() {
        return Err(ParseError::EmptyLevel);
    }
    let width = rows[0].chars().count();
    if width == 0 {
        return Err(ParseError::EmptyLevel);
    }
    for (y, row) in rows.iter().enumerate() {
        let found = row.chars().count();
        if found != width {
            return Err(ParseError::RaggedRows {
                row: y,
                expected: width,
                found,
            });
        }
    }
    let avatar_chars: Vec<char> = spec.avatar_chars().collect();
    let mut avatars = 0;
    for (y, row) in rows.iter().enumerate() {
        for (x, ch) in row.chars().enumerate() {
            if ch == ' ' {
                continue;
            }
            if !spec.level_mapping.contains_key(&ch) {
                return Err(ParseError::UnmappedChar { ch, row: y, col: x });
            }
            if avatar_chars.contains(&ch) {
                avatars += 1;
            }
        }
    }
    if avatars != 1 {
        return Err(ParseError::AvatarCountNotOne(avatars));
    }
    Ok(LevelMap {
        width,
        height: rows.len(),
        rows,
    })
}
