use std::collections::{BTreeMap, HashMap};

use super::{
    CmpOp, Effect, GameSpec, Guard, InteractionRule, Outcome, ParseError, Role, SpriteClass,
    TerminationRule, MAX_CLASSES,
};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Colon,
    Arrow,
    Assign,
    LParen,
    RParen,
    Cmp(CmpOp),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError::SyntaxError {
        line,
        col,
        message: message.into(),
    }
}

/// Splits one line into tokens. `>` is always lexed as `Arrow`; the guard
/// parser reinterprets it as a comparison after `if`.
fn lex(line_no: usize, text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two = chars.get(i + 1).copied();
        let (tok, len) = match c {
            ':' => (Tok::Colon, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '=' if two == Some('=') => (Tok::Cmp(CmpOp::Eq), 2),
            '=' => (Tok::Assign, 1),
            '!' if two == Some('=') => (Tok::Cmp(CmpOp::Ne), 2),
            '<' if two == Some('=') => (Tok::Cmp(CmpOp::Le), 2),
            '<' => (Tok::Cmp(CmpOp::Lt), 1),
            '>' if two == Some('=') => (Tok::Cmp(CmpOp::Ge), 2),
            '>' => (Tok::Arrow, 1),
            c if c.is_ascii_digit() || (c == '-' && two.is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s
                    .parse::<i64>()
                    .map_err(|_| syntax(line_no, col, format!("integer `{s}` out of range")))?;
                out.push(Token {
                    tok: Tok::Int(v),
                    col,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Ident(s),
                    col,
                });
                continue;
            }
            other => {
                return Err(syntax(
                    line_no,
                    col,
                    format!("unexpected character {other:?}"),
                ))
            }
        };
        out.push(Token { tok, col });
        i += len;
    }
    Ok(out)
}

struct Cursor<'a> {
    line: usize,
    end_col: usize,
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &str, toks: &'a [Token]) -> Self {
        Cursor {
            line,
            end_col: text.chars().count() + 1,
            toks,
            pos: 0,
        }
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.tok);
        self.pos += 1;
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        syntax(self.line, self.col(), message)
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn int(&mut self, what: &str) -> Result<i64, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Sprites,
    Interactions,
    Termination,
    LevelMapping,
}

/// Raw, not-yet-validated document with source lines for error sites.
#[derive(Default)]
struct Draft {
    name: Option<String>,
    time_limit: Option<i64>,
    sprites: Vec<(usize, SpriteClass)>,
    rules: Vec<(usize, InteractionRule)>,
    terms: Vec<(usize, TerminationRule)>,
    mapping: Vec<(usize, char, Vec<String>)>,
}

/// Parses a `.dgdl` document into a validated [`GameSpec`].
pub fn parse_game(text: &str) -> Result<GameSpec, ParseError> {
    let mut draft = Draft::default();
    let mut section = Section::Preamble;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let header = match trimmed {
            "Sprites" => Some(Section::Sprites),
            "Interactions" => Some(Section::Interactions),
            "Termination" => Some(Section::Termination),
            "LevelMapping" => Some(Section::LevelMapping),
            _ => None,
        };
        if let Some(next) = header {
            section = next;
            continue;
        }
        match section {
            Section::LevelMapping => parse_mapping_line(line_no, raw, &mut draft)?,
            _ => {
                let toks = lex(line_no, raw)?;
                let mut cur = Cursor::new(line_no, raw, &toks);
                match section {
                    Section::Preamble => parse_preamble_line(&mut cur, &mut draft)?,
                    Section::Sprites => {
                        let class = parse_sprite_line(&mut cur)?;
                        draft.sprites.push((line_no, class));
                    }
                    Section::Interactions => {
                        let rule = parse_rule_line(&mut cur)?;
                        draft.rules.push((line_no, rule));
                    }
                    Section::Termination => {
                        let term = parse_termination_line(&mut cur)?;
                        draft.terms.push((line_no, term));
                    }
                    Section::LevelMapping => unreachable!(),
                }
            }
        }
    }
    validate(draft)
}

fn parse_preamble_line(cur: &mut Cursor<'_>, draft: &mut Draft) -> Result<(), ParseError> {
    let kw = cur.ident("`game` or `time_limit`")?;
    match kw.as_str() {
        "game" => {
            draft.name = Some(cur.ident("game name")?);
        }
        "time_limit" => {
            draft.time_limit = Some(cur.int("time limit")?);
        }
        other => {
            cur.pos -= 1;
            return Err(cur.err(format!("unknown header `{other}`")));
        }
    }
    cur.finish()
}

fn parse_sprite_line(cur: &mut Cursor<'_>) -> Result<SpriteClass, ParseError> {
    let name = cur.ident("sprite name")?;
    cur.expect(Tok::Colon, "`:`")?;
    let role_name = cur.ident("role")?;
    let role = Role::from_name(&role_name).ok_or_else(|| ParseError::UnknownRole {
        line: cur.line,
        role: role_name.clone(),
    })?;
    let mut produces = None;
    if cur.peek() == Some(&Tok::LParen) {
        cur.next();
        produces = Some(cur.ident("produced sprite name")?);
        cur.expect(Tok::RParen, "`)`")?;
    }
    let mut params = BTreeMap::new();
    while !cur.at_end() {
        let key = cur.ident("parameter name")?;
        cur.expect(Tok::Assign, "`=`")?;
        let value = cur.int("integer value")?;
        if params.insert(key.clone(), value).is_some() {
            return Err(cur.err(format!("parameter `{key}` given twice")));
        }
    }
    Ok(SpriteClass {
        name,
        role,
        params,
        produces,
    })
}

fn parse_rule_line(cur: &mut Cursor<'_>) -> Result<InteractionRule, ParseError> {
    let actor = cur.ident("actor sprite")?;
    let reactor = cur.ident("reactor sprite")?;
    cur.expect(Tok::Arrow, "`>`")?;
    let effect_name = cur.ident("effect")?;
    let effect = Effect::from_name(&effect_name).ok_or_else(|| ParseError::UnknownEffect {
        line: cur.line,
        effect: effect_name.clone(),
    })?;
    let mut score_delta = 0;
    let mut guard = None;
    while !cur.at_end() {
        let kw = cur.ident("`score=` or `if`")?;
        match kw.as_str() {
            "score" => {
                cur.expect(Tok::Assign, "`=`")?;
                score_delta = cur.int("score delta")?;
            }
            "if" => {
                if guard.is_some() {
                    cur.pos -= 1;
                    return Err(cur.err("at most one guard per rule"));
                }
                let resource = cur.ident("resource name")?;
                let op = match cur.next() {
                    Some(Tok::Cmp(op)) => *op,
                    Some(Tok::Arrow) => CmpOp::Gt,
                    _ => {
                        cur.pos -= 1;
                        return Err(cur.err("expected comparison operator"));
                    }
                };
                let value = cur.int("guard value")?;
                guard = Some(Guard {
                    resource,
                    op,
                    value,
                });
            }
            other => {
                cur.pos -= 1;
                return Err(cur.err(format!("unexpected `{other}`")));
            }
        }
    }
    Ok(InteractionRule {
        actor,
        reactor,
        effect,
        score_delta,
        guard,
    })
}

fn parse_outcome(cur: &mut Cursor<'_>) -> Result<Outcome, ParseError> {
    cur.expect(Tok::Arrow, "`>`")?;
    let word = cur.ident("`win` or `lose`")?;
    let outcome = match word.as_str() {
        "win" => Outcome::Win,
        "lose" => Outcome::Loss,
        _ => {
            cur.pos -= 1;
            return Err(cur.err("expected `win` or `lose`"));
        }
    };
    cur.finish()?;
    Ok(outcome)
}

fn parse_termination_line(cur: &mut Cursor<'_>) -> Result<TerminationRule, ParseError> {
    let kind = cur.ident("termination kind")?;
    match kind.as_str() {
        "timeout" => Ok(TerminationRule::Timeout {
            outcome: parse_outcome(cur)?,
        }),
        "touch" => {
            let class = cur.ident("sprite name")?;
            Ok(TerminationRule::Touch {
                class,
                outcome: parse_outcome(cur)?,
            })
        }
        "count" => {
            let class = cur.ident("sprite name")?;
            let count = cur.int("count")?;
            let count = u32::try_from(count).map_err(|_| cur.err("count must be non-negative"))?;
            Ok(TerminationRule::Count {
                class,
                count,
                outcome: parse_outcome(cur)?,
            })
        }
        other => {
            cur.pos -= 1;
            Err(cur.err(format!("unknown termination kind `{other}`")))
        }
    }
}

/// `<char> > name name ...`; the mapped character is taken literally, so it
/// may be punctuation that the regular lexer rejects.
fn parse_mapping_line(line_no: usize, raw: &str, draft: &mut Draft) -> Result<(), ParseError> {
    let lead = raw.chars().take_while(|c| c.is_whitespace()).count();
    let mut chars = raw.chars().skip(lead);
    let ch = chars.next().expect("line is not blank");
    let rest: String = chars.collect();
    if !rest.starts_with(char::is_whitespace) {
        return Err(syntax(
            line_no,
            lead + 2,
            "level character must be a single character",
        ));
    }
    let offset = lead + 1;
    let toks = lex(line_no, &rest)?
        .into_iter()
        .map(|t| Token {
            tok: t.tok,
            col: t.col + offset,
        })
        .collect::<Vec<_>>();
    let mut cur = Cursor::new(line_no, raw, &toks);
    cur.expect(Tok::Arrow, "`>`")?;
    let mut names = Vec::new();
    while !cur.at_end() {
        names.push(cur.ident("sprite name")?);
    }
    if names.is_empty() {
        return Err(cur.err("expected at least one sprite name"));
    }
    draft.mapping.push((line_no, ch, names));
    Ok(())
}

fn validate(draft: Draft) -> Result<GameSpec, ParseError> {
    let name = draft.name.ok_or(ParseError::MissingHeader("game"))?;
    let time_limit = draft
        .time_limit
        .ok_or(ParseError::MissingHeader("time_limit"))?;
    let time_limit = u32::try_from(time_limit)
        .ok()
        .filter(|t| *t >= 1)
        .ok_or_else(|| ParseError::SyntaxError {
            line: 0,
            col: 0,
            message: format!("time_limit must be a positive integer, got {time_limit}"),
        })?;

    let mut roles: HashMap<&str, Role> = HashMap::new();
    for (_, class) in &draft.sprites {
        if roles.insert(class.name.as_str(), class.role).is_some() {
            return Err(ParseError::DuplicateSprite(class.name.clone()));
        }
    }
    if draft.sprites.len() > MAX_CLASSES {
        return Err(ParseError::TooManyClasses {
            count: draft.sprites.len(),
            max: MAX_CLASSES,
        });
    }
    let avatars = draft
        .sprites
        .iter()
        .filter(|(_, c)| c.role == Role::Avatar)
        .count();
    match avatars {
        0 => return Err(ParseError::NoAvatar),
        1 => {}
        n => return Err(ParseError::MultipleAvatars(n)),
    }
    let avatar = draft
        .sprites
        .iter()
        .find(|(_, c)| c.role == Role::Avatar)
        .map(|(_, c)| c.name.clone())
        .expect("one avatar");

    for (line, class) in &draft.sprites {
        let required = class.role.required_params();
        for key in required {
            if !class.params.contains_key(*key) {
                return Err(ParseError::MissingParam {
                    class: class.name.clone(),
                    role: class.role.to_string(),
                    key: (*key).to_string(),
                });
            }
        }
        for key in class.params.keys() {
            if !required.contains(&key.as_str()) {
                return Err(ParseError::UnexpectedParam {
                    class: class.name.clone(),
                    role: class.role.to_string(),
                    key: key.clone(),
                });
            }
        }
        for key in class.role.positive_params() {
            let value = class.params[*key];
            if value <= 0 {
                return Err(ParseError::InvalidParam {
                    class: class.name.clone(),
                    key: (*key).to_string(),
                    value,
                });
            }
        }
        let site = format!("Sprites line {line}");
        match (&class.produces, class.role) {
            (Some(p), Role::Spawner) => match roles.get(p.as_str()) {
                None => {
                    return Err(ParseError::UnboundName {
                        name: p.clone(),
                        site,
                    })
                }
                Some(Role::Avatar) | Some(Role::Wall) => {
                    return Err(ParseError::InvalidRule {
                        site,
                        reason: format!("spawner cannot produce `{p}`"),
                    })
                }
                Some(_) => {}
            },
            (None, Role::Spawner) => {
                return Err(ParseError::InvalidRule {
                    site,
                    reason: "Spawner requires a produced class, e.g. `Spawner(mint)`".into(),
                })
            }
            (Some(_), _) => {
                return Err(ParseError::InvalidRule {
                    site,
                    reason: format!("role {} does not produce sprites", class.role),
                })
            }
            (None, _) => {}
        }
    }

    let bound = |name: &str, site: &str| -> Result<Role, ParseError> {
        roles
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::UnboundName {
                name: name.to_string(),
                site: site.to_string(),
            })
    };

    for (line, rule) in &draft.rules {
        let site = format!("Interactions line {line}");
        let actor_role = bound(&rule.actor, &site)?;
        let reactor_role = bound(&rule.reactor, &site)?;
        if let Some(guard) = &rule.guard {
            if bound(&guard.resource, &site)? != Role::Resource {
                return Err(ParseError::InvalidRule {
                    site,
                    reason: format!(
                        "guard references `{}`, which is not a Resource",
                        guard.resource
                    ),
                });
            }
        }
        let invalid = |reason: String| ParseError::InvalidRule {
            site: site.clone(),
            reason,
        };
        if rule.effect == Effect::ForcedConsume {
            if reactor_role != Role::Avatar {
                return Err(invalid(
                    "ForcedConsume must name the avatar as reactor".into(),
                ));
            }
            continue;
        }
        if actor_role != Role::Avatar {
            return Err(invalid(format!(
                "{} rules must name the avatar as actor",
                rule.effect
            )));
        }
        match rule.effect {
            Effect::FillResource if reactor_role != Role::Resource => {
                return Err(invalid("FillResource reactor must be a Resource".into()))
            }
            Effect::InvestTrigger if reactor_role != Role::TimedTrader => {
                return Err(invalid(
                    "InvestTrigger reactor must be a TimedTrader".into(),
                ))
            }
            _ => {}
        }
        if reactor_role == Role::Avatar {
            return Err(invalid("avatar cannot collide with itself".into()));
        }
    }

    for (line, term) in &draft.terms {
        let site = format!("Termination line {line}");
        match term {
            TerminationRule::Timeout { .. } => {}
            TerminationRule::Touch { class, .. } | TerminationRule::Count { class, .. } => {
                bound(class, &site)?;
            }
        }
    }

    let mut level_mapping = BTreeMap::new();
    for (line, ch, names) in draft.mapping {
        let site = format!("LevelMapping line {line}");
        if ch == ' ' {
            return Err(ParseError::InvalidRule {
                site,
                reason: "space is the blank character and cannot be mapped".into(),
            });
        }
        for (i, n) in names.iter().enumerate() {
            bound(n, &site)?;
            if names[..i].contains(n) {
                return Err(ParseError::InvalidRule {
                    site,
                    reason: format!("`{n}` listed twice for {ch:?}"),
                });
            }
        }
        if level_mapping.insert(ch, names).is_some() {
            return Err(ParseError::InvalidRule {
                site,
                reason: format!("character {ch:?} mapped twice"),
            });
        }
    }
    if !level_mapping
        .values()
        .any(|names: &Vec<String>| names.contains(&avatar))
    {
        return Err(ParseError::InvalidRule {
            site: "LevelMapping".into(),
            reason: "no character places the avatar".into(),
        });
    }

    Ok(GameSpec {
        name,
        sprite_classes: draft.sprites.into_iter().map(|(_, c)| c).collect(),
        interactions: draft.rules.into_iter().map(|(_, r)| r).collect(),
        terminations: draft.terms.into_iter().map(|(_, t)| t).collect(),
        level_mapping,
        time_limit,
    })
}
