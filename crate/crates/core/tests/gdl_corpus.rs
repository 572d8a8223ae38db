#![allow(clippy::needless_range_loop, clippy::type_complexity)]

use std::fs;
use std::path::{Path, PathBuf};

use deceptive_games::gdl::{parse_game, parse_level, ParseError, Role};
use proptest::prelude::*;

fn corpus(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(sub)
}

fn files(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    out.sort();
    out
}

fn variant(e: &ParseError) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_ascii_alphanumeric())
        .next()
        .unwrap()
        .to_string()
}

fn snake_case(name: &str) -> String {
    let mut out = String::new();
    for (i, c) in name.chars().enumerate() {
        if c.is_ascii_uppercase() {
            if i > 0 {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

#[test]
fn valid_corpus_parses_with_levels() {
    let dir = corpus("valid");
    let games = files(&dir, "dgdl");
    assert!(games.len() >= 6);
    for path in games {
        let text = fs::read_to_string(&path).unwrap();
        let spec = parse_game(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let lvl = path.with_extension("lvl");
        if lvl.exists() {
            let level = fs::read_to_string(&lvl).unwrap();
            parse_level(&level, &spec).unwrap_or_else(|e| panic!("{}: {e}", lvl.display()));
        }
    }
}

#[test]
fn invalid_corpus_fails_with_expected_variant() {
    let dir = corpus("invalid");
    let docs = files(&dir, "dgdl");
    assert!(docs.len() >= 30);
    for path in docs {
        let text = fs::read_to_string(&path).unwrap();
        let expect = text
            .lines()
            .find_map(|l| l.trim().strip_prefix("# expect:"))
            .unwrap_or_else(|| panic!("{} lacks an expect line", path.display()))
            .trim()
            .to_string();
        match parse_game(&text) {
            Ok(_) => panic!("{} parsed", path.display()),
            Err(e) => assert_eq!(variant(&e), expect, "{}: {e}", path.display()),
        }
    }
}

#[test]
fn invalid_levels_fail_with_named_variant() {
    let spec = parse_game(&fs::read_to_string(corpus("valid/minimal.dgdl")).unwrap()).unwrap();
    let levels = files(&corpus("invalid"), "lvl");
    assert!(levels.len() >= 4);
    for path in levels {
        let text = fs::read_to_string(&path).unwrap();
        let stem = path.file_stem().unwrap().to_str().unwrap().to_string();
        let e = parse_level(&text, &spec).expect_err(&stem);
        assert!(
            stem.starts_with(&snake_case(&variant(&e))),
            "{stem}: got {e:?}"
        );
    }
}

#[test]
fn minimal_document() {
    let spec = parse_game(
        "game Tiny\ntime_limit 100\nSprites\n  avatar : Avatar\n  wall : Wall\nLevelMapping\n  A > avatar\n  w > wall\n",
    )
    .unwrap();
    assert_eq!(spec.sprite_classes.len(), 2);
    assert!(spec.interactions.is_empty());
    assert_eq!(spec.time_limit, 100);
}

#[test]
fn invest_traders_carry_their_terms() {
    let text = fs::read_to_string(corpus("valid/invest.dgdl")).unwrap();
    let spec = parse_game(&text).unwrap();
    let traders: Vec<(i64, i64, i64)> = spec
        .sprite_classes
        .iter()
        .filter(|c| c.role == Role::TimedTrader)
        .map(|c| (c.param("cost"), c.param("payout"), c.param("delay_ticks")))
        .collect();
    assert_eq!(traders, vec![(3, 5, 30), (7, 15, 60), (5, 10, 90)]);
}

#[test]
fn unbound_reactor_is_named() {
    let text = "game G\ntime_limit 10\nSprites\n avatar : Avatar\nInteractions\n avatar coinz > KillReactor\nLevelMapping\n A > avatar\n";
    match parse_game(text) {
        Err(ParseError::UnboundName { name, site }) => {
            assert_eq!(name, "coinz");
            assert!(site.contains("line 6"), "{site}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn two_avatars_in_level() {
    let spec = parse_game(&fs::read_to_string(corpus("valid/minimal.dgdl")).unwrap()).unwrap();
    let avatar = spec.avatar_chars().next().unwrap();
    let wall = spec
        .level_mapping
        .iter()
        .find(|(_, n)| n.iter().any(|x| x == "wall"))
        .map(|(c, _)| *c)
        .unwrap();
    let text = format!("{wall}{wall}{wall}\n{avatar} {avatar}\n{wall}{wall}{wall}\n");
    assert_eq!(
        parse_level(&text, &spec),
        Err(ParseError::AvatarCountNotOne(2))
    );
    let ok = format!("{wall}{wall}{wall}\n{wall}{avatar}{wall}\n{wall}{wall}{wall}\n");
    let level = parse_level(&ok, &spec).unwrap();
    assert_eq!((level.width, level.height), (3, 3));
}

#[test]
fn decepticoins_level_one_layout() {
    let spec = parse_game(&fs::read_to_string(corpus("valid/decepticoins.dgdl")).unwrap()).unwrap();
    let level = parse_level(
        &fs::read_to_string(corpus("valid/decepticoins.lvl")).unwrap(),
        &spec,
    )
    .unwrap();
    let coins: Vec<(usize, usize)> = level
        .cells()
        .filter(|&(_, _, c)| c == 'c')
        .map(|(x, y, _)| (x, y))
        .collect();
    let exit_row = level.cells().find(|&(_, _, c)| c == 'E').unwrap().1;
    assert_eq!(exit_row, level.height - 2);
    // coins on the two paths sit on opposite sides of the central walls
    let (mid_l, mid_r): (Vec<(usize, usize)>, Vec<(usize, usize)>) =
        coins.into_iter().partition(|&(x, _)| x < level.width / 2);
    assert!(!mid_l.is_empty() && !mid_r.is_empty());
}

fn all_corpus_texts() -> Vec<String> {
    let mut out = Vec::new();
    for sub in ["valid", "invalid"] {
        for ext in ["dgdl", "lvl"] {
            for p in files(&corpus(sub), ext) {
                out.push(fs::read_to_string(p).unwrap());
            }
        }
    }
    out
}

#[test]
fn parsing_is_deterministic() {
    for text in all_corpus_texts() {
        assert_eq!(parse_game(&text), parse_game(&text));
    }
}

const ROLES: &[&str] = &[
    "Wall : Wall",
    "Immovable : Immovable",
    "Exit : Exit",
    "Resource : Resource limit=3 value=1",
    "Growable : Growable cap=5 period=2 step=1",
    "TimedTrader : TimedTrader cost=2 delay_ticks=4 payout=3",
];

fn effect_for(role: usize, pick: u8) -> &'static str {
    match (role, pick % 4) {
        (3, 0) => "FillResource",
        (5, 0) => "InvestTrigger",
        (_, 1) => "BlockMove",
        (_, 2) => "KillReactor",
        (_, 3) => "LoseGame",
        _ => "CollectScore",
    }
}

prop_compose! {
    fn document()(
        roles in prop::collection::vec(0usize..ROLES.len(), 1..8),
        rules in prop::collection::vec((any::<u8>(), any::<u8>(), -5i64..6, any::<bool>(), 0usize..6), 0..10),
        terms in prop::collection::vec((any::<u8>(), 0u8..3, 0u32..4, any::<bool>()), 0..4),
        time in 1u32..5000,
    ) -> String {
        let mut text = format!("game Gen\ntime_limit {time}\nSprites\n  avatar : Avatar\n");
        let names: Vec<String> = roles.iter().enumerate().map(|(i, &r)| {
            let (_, decl) = ROLES[r].split_once(" : ").unwrap();
            text.push_str(&format!("  c{i} : {decl}\n"));
            format!("c{i}")
        }).collect();
        let resource = roles.iter().position(|&r| r == 3);
        text.push_str("Interactions\n");
        for (target, eff, score, guarded, op) in rules {
            let idx = target as usize % names.len();
            let mut line = format!("  avatar {} > {}", names[idx], effect_for(roles[idx], eff));
            if score != 0 {
                line.push_str(&format!(" score={score}"));
            }
            if let (true, Some(res)) = (guarded, resource) {
                let ops = ["<", "<=", ">", ">=", "==", "!="];
                line.push_str(&format!(" if {} {} {}", names[res], ops[op], score.abs()));
            }
            text.push_str(&line);
            text.push('\n');
        }
        text.push_str("Termination\n");
        for (target, kind, n, win) in terms {
            let outcome = if win { "win" } else { "lose" };
            let name = &names[target as usize % names.len()];
            text.push_str(&match kind {
                0 => format!("  timeout > {outcome}\n"),
                1 => format!("  touch {name} > {outcome}\n"),
                _ => format!("  count {name} {n} > {outcome}\n"),
            });
        }
        text.push_str("LevelMapping\n  A > avatar\n");
        for (i, n) in names.iter().enumerate() {
            let ch = (b'a' + i as u8) as char;
            text.push_str(&format!("  {ch} > {n}\n"));
        }
        text
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pretty_print_round_trips(text in document()) {
        let spec = parse_game(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        let printed = spec.to_string();
        let again = parse_game(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
        prop_assert_eq!(&spec, &again);
        prop_assert_eq!(printed, again.to_string());
    }

    #[test]
    fn mutated_documents_never_panic(
        idx in 0usize..64,
        edits in prop::collection::vec((any::<prop::sample::Index>(), 0u8..3, any::<char>()), 1..6),
    ) {
        let texts = all_corpus_texts();
        let mut chars: Vec<char> = texts[idx % texts.len()].chars().collect();
        for (at, kind, c) in edits {
            if chars.is_empty() {
                chars.push(c);
                continue;
            }
            let i = at.index(chars.len());
            match kind {
                0 => chars[i] = c,
                1 => { chars.remove(i); }
                _ => chars.insert(i, c),
            }
        }
        let text: String = chars.into_iter().collect();
        if let Ok(spec) = parse_game(&text) {
            let _ = parse_level(&text, &spec);
            prop_assert_eq!(parse_game(&spec.to_string()), Ok(spec));
        }
    }

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,200}") {
        let _ = parse_game(&text);
    }
}
