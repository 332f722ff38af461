mod support;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use corrida_core::chesscore::{initial_position, Color, Position, Status, Variant};
use corrida_core::engines::*;
use corrida_core::notation::{load_corpus, replay, GameId, GameRecord, GameResult, Termination};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use support::oracle::OracleBoard;

fn uci_binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_corrida-uci"))
}

fn corpus_positions() -> Vec<Position> {
    load_corpus()
        .unwrap()
        .games
        .iter()
        .flat_map(|g| replay(g).unwrap())
        .collect()
}

fn random_position(seed: u64, variant: Variant, max_plies: usize) -> Position {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut pos = initial_position(variant);
    for _ in 0..rng.random_range(0..=max_plies) {
        let moves = pos.legal_moves();
        if moves.is_empty() {
            break;
        }
        pos = pos.play_unchecked(moves[rng.random_range(0..moves.len())]);
    }
    pos
}

#[test]
fn evaluation_matches_oracle_formula() {
    let all = corpus_positions();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let p = &all[rng.random_range(0..all.len())];
        assert_eq!(evaluate(p), OracleBoard::from_fen(&p.to_fen()).static_eval(), "{}", p.to_fen());
    }
    for seed in 0..20 {
        let p = random_position(seed, Variant::Corrida10x10, 60);
        assert_eq!(evaluate(&p), OracleBoard::from_fen(&p.to_fen()).static_eval(), "{}", p.to_fen());
    }
}

#[test]
fn initial_positions_evaluate_to_zero() {
    for v in Variant::ALL {
        assert_eq!(evaluate(&initial_position(v)), 0);
    }
}

#[test]
fn clean_extra_queen() {
    // Black's queen removed; everything else mirrored.
    let fen = "rnb1kbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
    let p = Position::from_fen(fen, Variant::Standard8x8).unwrap();
    let e = evaluate(&p);
    assert_eq!(e, OracleBoard::from_fen(fen).static_eval());
    assert!((e - 900).abs() <= 80, "{e}");
}

#[test]
fn depth_one_from_initial_picks_best_static_child() {
    let p = initial_position(Variant::Standard8x8);
    let oracle = OracleBoard::from_fen(&p.to_fen());
    let children = oracle.moves_with_children();
    assert_eq!(children.len(), 20);
    let best = children.iter().map(|(_, b)| -b.static_eval()).max().unwrap();
    for seed in 0..8 {
        let r = search(&p, 1, seed).unwrap();
        assert!(!r.best.is_capture());
        assert_eq!(r.eval, best);
        let (_, child) = children.iter().find(|(c, _)| *c == r.best.to_coordinate()).unwrap();
        assert_eq!(-child.static_eval(), best);
    }
}

#[test]
fn finds_mate_in_one_when_oracle_sees_one() {
    let fens = [
        "6k1/5ppp/8/8/8/8/5PPP/R5K1 w - - 0 1",
        "rnbqkbnr/pppp1ppp/8/4p3/6P1/5P2/PPPPP2P/RNBQKBNR b KQkq g3 0 2",
        "r1bqkbnr/pppp1ppp/2n5/4p3/2B1P3/5Q2/PPPP1PPP/RNB1K1NR w KQkq - 4 4",
        "k7/8/1K6/8/8/8/7Q/8 w - - 0 1",
    ];
    for fen in fens {
        let p = Position::from_fen(fen, Variant::Standard8x8).unwrap();
        let oracle = OracleBoard::from_fen(fen);
        assert!(oracle.has_mate_in_one(), "{fen}");
        for depth in 2..=3 {
            let r = search(&p, depth, 5).unwrap();
            let after = p.apply_move(r.best).unwrap();
            assert!(OracleBoard::from_fen(&after.to_fen()).is_checkmate(), "{fen} depth {depth}: {}", r.best);
            assert_eq!(r.eval, MATE - 1);
        }
    }
}

#[test]
fn search_is_deterministic() {
    let all = corpus_positions();
    for p in all.iter().step_by(97).filter(|p| p.status() == Status::Ongoing) {
        for seed in [0, 7] {
            assert_eq!(search(p, 2, seed), search(p, 2, seed));
        }
    }
}

#[test]
fn terminal_position_is_an_error() {
    let mate = Position::from_fen("7k/6Q1/6K1/8/8/8/8/8 b - - 0 1", Variant::Standard8x8).unwrap();
    assert_eq!(search(&mate, 3, 0), None);
    let mut engine = BuiltinEngine::new(2, 0);
    assert_eq!(engine.search(&mate, &[]), Err(EngineError::TerminalPosition));
}

/// Score of `m` at depth `d` seen from the root mover.
fn root_score(pos: &Position, m: corrida_core::chesscore::Move, d: u32) -> i32 {
    let child = pos.play_unchecked(m);
    match search(&child, d - 1, 0) {
        Some(r) => -r.eval,
        None if child.in_check() => MATE - 1,
        None => 0,
    }
}

#[test]
fn deeper_search_avoids_mates_seen_shallower() {
    let mut positions: Vec<Position> = corpus_positions().into_iter().step_by(53).collect();
    positions.extend((0..10).map(|s| random_position(100 + s, Variant::Standard8x8, 40)));
    positions.push(Position::from_fen("3r2k1/8/8/8/8/8/5PPP/6K1 w - - 0 1", Variant::Standard8x8).unwrap());
    for pos in positions.iter().filter(|p| p.status() == Status::Ongoing) {
        let d = 2;
        let deep = search(pos, d + 1, 3).unwrap();
        if root_score(pos, deep.best, d) <= -MATE_BOUND {
            assert!(deep.eval <= -MATE_BOUND, "{}: {} judged mated at depth {d}", pos.to_fen(), deep.best);
            for m in pos.legal_moves() {
                assert!(root_score(pos, m, d + 1) <= -MATE_BOUND);
            }
        }
    }
}

#[test]
fn engine_refs_serialize() {
    let b = EngineRef::Builtin { depth: 3, seed: 9 };
    let j = serde_json::to_string(&b).unwrap();
    assert_eq!(j, r#"{"kind":"builtin","depth":3,"seed":9}"#);
    let e = EngineRef::External {
        path: "/usr/bin/stockfish".into(),
        limit: UciLimit::Movetime(200),
    };
    let j = serde_json::to_string(&e).unwrap();
    assert_eq!(serde_json::from_str::<EngineRef>(&j).unwrap(), e);
    let d: EngineRef = serde_json::from_str(r#"{"kind":"external","path":"x","depth":4}"#).unwrap();
    assert_eq!(d, EngineRef::External { path: "x".into(), limit: UciLimit::Depth(4) });
    assert!(EngineRef::Builtin { depth: 0, seed: 0 }.validate(Variant::Standard8x8).is_err());
}

#[test]
fn autoplay_zero_plies_is_empty() {
    let p = initial_position(Variant::Corrida10x10);
    let r = autoplay_game(&p, &EngineRef::Builtin { depth: 1, seed: 0 }, 0).unwrap();
    assert!(r.plies.is_empty());
    assert_eq!(r.result, GameResult::Unfinished);
}

#[test]
fn autoplay_from_terminal_position_keeps_status() {
    let mate = Position::from_fen("7k/6Q1/6K1/8/8/8/8/8 b - - 0 1", Variant::Standard8x8).unwrap();
    let r = autoplay_game(&mate, &EngineRef::Builtin { depth: 2, seed: 0 }, 10).unwrap();
    assert!(r.plies.is_empty());
    assert_eq!(r.result, GameResult::WhiteWins);
    assert_eq!(r.termination, Some(Termination::Checkmate));
    let stale = Position::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1", Variant::Standard8x8).unwrap();
    let r = autoplay_game(&stale, &EngineRef::Builtin { depth: 2, seed: 0 }, 10).unwrap();
    assert!(r.plies.is_empty());
    assert_eq!(r.result, GameResult::Draw);
}

#[test]
fn autoplay_hands_off_after_scripted_start() {
    // Game 12 switched to autoplay at move 7, after six scripted moves.
    let corpus = load_corpus().unwrap();
    let g12 = corpus.game(12);
    assert_eq!(g12.notes_at(13).next(), Some("autoplay"));
    let positions = replay(g12).unwrap();
    let handoff = &positions[12];
    assert_eq!(handoff.side_to_move(), Color::White);
    assert_eq!(handoff.fullmove_number(), 7);
    let mut record = GameRecord::new(GameId::Tag("handoff".into()), handoff.clone());
    let mut engine = BuiltinEngine::new(2, 12);
    let last = autoplay(&mut record, handoff, &positions[..12], &mut engine, 16).unwrap();
    assert_eq!(record.plies.len(), 16);
    let replayed = replay(&record).unwrap();
    assert_eq!(replayed.last().unwrap(), &last);
    let again = autoplay_game(handoff, &EngineRef::Builtin { depth: 2, seed: 12 }, 16).unwrap();
    assert_eq!(again.moves(), record.moves());
}

#[test]
fn uci_handshake_and_search() {
    let t = Instant::now();
    let mut e = UciEngine::start(&uci_binary(), UciLimit::Depth(1)).unwrap();
    assert!(t.elapsed() < Duration::from_secs(5));
    assert_eq!(e.engine_name(), Some("corrida-uci"));
    e.new_game().unwrap();
    e.set_position(&UciPosition::StartPos(vec!["g1f3".into()])).unwrap();
    let (best, score) = e.go().unwrap();
    let after = initial_position(Variant::Standard8x8)
        .legal_moves()
        .into_iter()
        .find(|m| m.to_coordinate() == "g1f3")
        .map(|m| initial_position(Variant::Standard8x8).play_unchecked(m))
        .unwrap();
    assert!(after.legal_moves().iter().any(|m| m.to_coordinate() == best), "{best}");
    assert!(score.is_some());
}

#[test]
fn uci_engine_matches_builtin() {
    let p = random_position(3, Variant::Standard8x8, 20);
    let mut e = UciEngine::start(&uci_binary(), UciLimit::Depth(2)).unwrap();
    let ext = e.search(&p, &[]).unwrap();
    let builtin = search(&p, 2, 0).unwrap();
    assert_eq!(ext.best, builtin.best);
    assert_eq!(ext.eval, builtin.eval);
}

#[test]
fn uci_autoplay_through_engine_ref() {
    let p = initial_position(Variant::Standard8x8);
    let e = EngineRef::External {
        path: uci_binary(),
        limit: UciLimit::Depth(1),
    };
    let r = autoplay_game(&p, &e, 6).unwrap();
    assert_eq!(r.plies.len(), 6);
    assert_eq!(
        autoplay_game(&initial_position(Variant::Corrida10x10), &e, 2).unwrap_err(),
        EngineError::UnsupportedVariant(Variant::Corrida10x10)
    );
}

fn faulty(fault: &str) -> UciEngine {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("engine.sh");
    std::fs::write(
        &path,
        format!("#!/bin/sh\nexec '{}' --fault {fault}\n", uci_binary().display()),
    )
    .unwrap();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    }
    UciEngine::start(&path, UciLimit::Depth(1)).unwrap()
}

#[test]
fn uci_garbage_is_a_protocol_error() {
    let mut e = faulty("garbage");
    e.set_position(&UciPosition::StartPos(vec![])).unwrap();
    match e.go() {
        Err(EngineError::ProtocolError(line)) => assert_eq!(line, "!!garbage go depth 1"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn uci_silent_engine_times_out() {
    let mut e = faulty("silent");
    e.set_search_timeout(Duration::from_millis(300));
    let t = Instant::now();
    e.set_position(&UciPosition::StartPos(vec![])).unwrap();
    assert_eq!(e.go(), Err(EngineError::EngineUnresponsive(Duration::from_millis(300))));
    assert!(t.elapsed() < Duration::from_secs(3));
}

#[test]
fn uci_missing_binary_fails_to_spawn() {
    let err = UciEngine::start(std::path::Path::new("/nonexistent/engine"), UciLimit::Depth(1)).err();
    assert!(matches!(err, Some(EngineError::Spawn { .. })), "{err:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluation_is_antisymmetric(seed in any::<u64>(), v in 0usize..3) {
        let p = random_position(seed, Variant::ALL[v], 80);
        let f = p.color_flipped();
        prop_assert_eq!(evaluate_white(&f), -evaluate_white(&p));
        prop_assert_eq!(evaluate(&f), evaluate(&p));
    }

    #[test]
    fn best_move_is_legal(seed in any::<u64>(), v in 0usize..3, depth in 1u32..=2) {
        let p = random_position(seed, Variant::ALL[v], 60);
        if let Some(r) = search(&p, depth, seed) {
            prop_assert!(p.legal_moves().contains(&r.best));
            prop_assert_eq!(r.pv.first(), Some(&r.best));
        } else {
            prop_assert!(p.status() != Status::Ongoing);
        }
    }
}
