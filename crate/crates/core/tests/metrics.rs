mod support;

use corrida_core::chesscore::{initial_position, sq, Color, PieceKind, Position, Status, Variant};
use corrida_core::engines::{EngineRef, MATE};
use corrida_core::metrics::*;
use corrida_core::notation::{load_corpus, parse_game, replay, Corpus, GameRecord, GameResult};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use support::oracle::OracleBoard;

fn corpus() -> Corpus {
    load_corpus().unwrap()
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

/// FEN with the piece on (file, rank) removed.
fn without_piece(fen: &str, file: usize, rank: usize) -> String {
    edit_board(fen, |f, r, c| if (f, r) == (file, rank) { None } else { Some(c) })
}

/// FEN with every piece passed through `keep`.
fn edit_board(fen: &str, keep: impl Fn(usize, usize, char) -> Option<char>) -> String {
    let mut fields: Vec<String> = fen.split_whitespace().map(str::to_string).collect();
    let board_idx = usize::from(fields[0].contains('x') && !fields[0].contains('/'));
    let rows: Vec<&str> = fields[board_idx].split('/').collect();
    let height = rows.len();
    let mut grid: Vec<Vec<Option<char>>> = rows
        .iter()
        .map(|row| {
            let mut cells = Vec::new();
            let mut run = 0;
            for c in row.chars() {
                if let Some(d) = c.to_digit(10) {
                    run = run * 10 + d as usize;
                } else {
                    cells.extend(std::iter::repeat_n(None, run));
                    run = 0;
                    cells.push(Some(c));
                }
            }
            cells.extend(std::iter::repeat_n(None, run));
            cells
        })
        .collect();
    for (i, row) in grid.iter_mut().enumerate() {
        for (f, cell) in row.iter_mut().enumerate() {
            *cell = cell.and_then(|c| keep(f, height - 1 - i, c));
        }
    }
    let rows: Vec<String> = grid
        .iter()
        .map(|cells| {
            let mut out = String::new();
            let mut run = 0;
            for c in cells {
                match c {
                    None => run += 1,
                    Some(p) => {
                        if run > 0 {
                            out.push_str(&run.to_string());
                            run = 0;
                        }
                        out.push(*p);
                    }
                }
            }
            if run > 0 {
                out.push_str(&run.to_string());
            }
            out
        })
        .collect();
    fields[board_idx] = rows.join("/");
    fields.join(" ")
}

#[test]
fn game_seven_development_after_white_move_eight() {
    let c = corpus();
    let positions = replay(c.game(7)).unwrap();
    // Position after 8. Nf3-g1, White's setup restored.
    let p = &positions[15];
    assert!(p.same_placement_for(&initial_position(Variant::Standard8x8), Color::White));
    assert_eq!(development_count(p, Color::White), 0);
    assert_eq!(development_count(p, Color::Black), 4);
    // After 8...Nc6-b4 as well.
    let q = &positions[16];
    assert_eq!(development_count(q, Color::Black), 4);
    for s in ["f6", "b4", "f5", "d5"] {
        assert!(q.piece_at(sq(s)).is_some_and(|x| x.color == Color::Black), "{s}");
    }
}

#[test]
fn queen_sorties_in_the_corpus() {
    let c = corpus();
    assert_eq!(queen_sortie(c.game(1), Color::Black).unwrap(), Some(8));
    assert_eq!(queen_sortie(c.game(4), Color::Black).unwrap(), Some(7));
    assert_eq!(queen_sortie(c.game(5), Color::Black).unwrap(), Some(7));
    assert_eq!(queen_sortie(c.game(6), Color::Black).unwrap(), None);
    // Game 6's queen first moves at move 11: a wider window sees it.
    assert!(early_queen_sortie(c.game(6), Color::Black, 20, 0).unwrap().is_some_and(|m| m > 10));
}

#[test]
fn sortie_ignores_annotations_and_result() {
    let c = corpus();
    for g in &c.games {
        let mut bare = g.clone();
        bare.annotations.clear();
        bare.result = GameResult::Unfinished;
        bare.termination = None;
        for color in Color::ALL {
            assert_eq!(queen_sortie(g, color).unwrap(), queen_sortie(&bare, color).unwrap());
        }
    }
}

#[test]
fn center_examples() {
    for v in Variant::ALL {
        let p = initial_position(v);
        assert_eq!(center_occupation(&p, Color::White), 0);
        assert_eq!(center_occupation(&p, Color::Black), 0);
    }
    let g = parse_game("1. e2-e4", Variant::Standard8x8).unwrap();
    let p = replay(&g).unwrap().pop().unwrap();
    assert_eq!(center_occupation(&p, Color::White), 1);
    let c = corpus();
    let g1 = replay(c.game(1)).unwrap();
    // After 4...e7-e5, pawns on d5 and e5.
    assert_eq!(center_occupation(&g1[8], Color::Black), 2);
    let g = parse_game("1. f2-f4 e9-e7 2. f4-f5 e7-e6", Variant::Corrida10x10).unwrap();
    let p = replay(&g).unwrap().pop().unwrap();
    assert_eq!(center_occupation(&p, Color::White), 1);
    assert_eq!(center_occupation(&p, Color::Black), 1);
}

#[test]
fn coordination_matches_oracle() {
    let lone = Position::from_fen("4k3/8/8/8/8/8/8/4K3 w - - 0 1", Variant::Standard8x8).unwrap();
    assert_eq!(coordination_score(&lone, Color::White), 0);
    for v in Variant::ALL {
        let p = initial_position(v);
        let o = OracleBoard::from_fen(&p.to_fen());
        assert_eq!(coordination_score(&p, Color::White), o.coordination(true));
        assert_eq!(coordination_score(&p, Color::Black), o.coordination(false));
    }
    let c = corpus();
    for g in &c.games {
        for p in replay(g).unwrap().iter().step_by(7) {
            let o = OracleBoard::from_fen(&p.to_fen());
            assert_eq!(coordination_score(p, Color::White), o.coordination(true));
            assert_eq!(coordination_score(p, Color::Black), o.coordination(false));
        }
    }
}

#[test]
fn development_never_exceeds_officer_count() {
    let c = corpus();
    for g in &c.games {
        for p in replay(g).unwrap() {
            for color in Color::ALL {
                let officers = p
                    .pieces_of(color)
                    .filter(|(_, x)| !matches!(x.kind, PieceKind::Pawn | PieceKind::King))
                    .count();
                assert!(development_count(&p, color) <= officers);
            }
        }
    }
}

#[test]
fn replayed_and_round_tripped_positions_agree() {
    let c = corpus();
    for g in &c.games {
        for p in replay(g).unwrap() {
            let q = Position::from_fen(&p.to_fen(), p.variant()).unwrap();
            for color in Color::ALL {
                assert_eq!(development_count(&p, color), development_count(&q, color));
                assert_eq!(coordination_score(&p, color), coordination_score(&q, color));
            }
        }
    }
}

#[test]
fn eval_trace_properties() {
    let c = corpus();
    let engine = EngineRef::Builtin { depth: 1, seed: 0 };
    let g2 = c.game(2);
    let trace = eval_trace(g2, &engine, 1).unwrap();
    assert_eq!(trace.len(), g2.plies.len());
    assert_eq!(trace.first().unwrap().0, 1);
    let last = replay(g2).unwrap().pop().unwrap();
    assert_eq!(last.status(), Status::Checkmate);
    let mated_white = last.side_to_move() == Color::White;
    assert_eq!(trace.last().unwrap().1, if mated_white { -MATE } else { MATE });
    assert_eq!(eval_trace(g2, &engine, 1).unwrap(), trace);
}

#[test]
fn metrics_rows_carry_flags_and_csv() {
    let c = corpus();
    let g1 = c.game(1);
    let rows = metrics_trace(g1, None).unwrap();
    assert_eq!(rows.len(), g1.plies.len());
    // Black's eighth move is ply 16; White's fourth move restores the setup at ply 7.
    assert!(rows[15].flags.contains(RowFlags::QUEEN_SORTIE));
    assert!(rows[6].flags.contains(RowFlags::RECONSTRUCTION));
    assert_eq!(rows.iter().filter(|r| !r.flags.is_empty()).count(), 2);
    let csv = to_csv(&rows);
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(csv.lines().count(), rows.len() + 1);
    assert_eq!(from_csv(&csv).unwrap(), rows);
    assert_eq!(to_csv(&[]).trim_end(), CSV_HEADER.join(","));
}

#[test]
fn metrics_rows_with_evaluations() {
    let c = corpus();
    let g = c.game(12);
    let short = GameRecord {
        plies: g.plies[..20].to_vec(),
        ..g.clone()
    };
    let trace = eval_trace(&short, &EngineRef::Builtin { depth: 1, seed: 0 }, 1).unwrap();
    let rows = metrics_trace(&short, Some(&trace)).unwrap();
    assert!(rows.iter().zip(&trace).all(|(r, t)| r.eval_cp == Some(t.1) && r.ply == t.0));
}

#[test]
fn depression_examples() {
    let rising: Vec<(usize, i32)> = (1..=12).map(|i| (i, -20 * i as i32)).collect();
    assert!(depression_spans(&rising, Color::Black, 100, 4).is_empty());
    let drop: Vec<(usize, i32)> = (1..=6).map(|i| (i, 100 - 30 * (i as i32 - 1))).collect();
    let spans = depression_spans(&drop, Color::White, 100, 4);
    assert_eq!(spans.len(), 1);
    assert_eq!((spans[0].start_ply, spans[0].end_ply, spans[0].drop_cp), (1, 6, 150));
    let mut two = drop.clone();
    two.push((7, 200));
    two.extend((8..=13).map(|i| (i, 200 - 30 * (i as i32 - 8))));
    let spans = depression_spans(&two, Color::White, 100, 4);
    assert_eq!(spans.len(), 2);
    assert!(spans[0].end_ply < spans[1].start_ply);
    assert!(spans.iter().all(|s| s.drop_cp >= 100 && s.end_ply >= s.start_ply));
    assert!(depression_spans(&drop, Color::White, 200, 4).is_empty());
    assert!(depression_spans(&drop, Color::White, 100, 7).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counters_are_color_symmetric(seed in any::<u64>(), v in 0usize..3) {
        let p = random_position(seed, Variant::ALL[v], 80);
        let f = p.color_flipped();
        for (a, b) in [(Color::White, Color::Black), (Color::Black, Color::White)] {
            prop_assert_eq!(development_count(&p, a), development_count(&f, b));
            prop_assert_eq!(coordination_score(&p, a), coordination_score(&f, b));
            prop_assert_eq!(center_occupation(&p, a), center_occupation(&f, b));
        }
    }

    #[test]
    fn removing_a_piece_never_adds_pairs_without_sliders(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        // Without sliders no piece shields another's attack.
        let p = random_position(seed, Variant::Standard8x8, 60);
        let fen = edit_board(&p.to_fen(), |_, _, c| (!"bBrRqQ".contains(c)).then_some(c));
        let o = OracleBoard::from_fen(&fen);
        let q = match Position::from_fen(&fen, Variant::Standard8x8) {
            Ok(q) => q,
            Err(_) => return Ok(()),
        };
        let victims: Vec<_> = q.pieces().filter(|(_, x)| x.kind != PieceKind::King).collect();
        if victims.is_empty() {
            return Ok(());
        }
        let (sq, piece) = victims[pick.index(victims.len())];
        let involving = q.attacks_from(sq).iter()
            .filter(|t| q.piece_at(**t).is_some_and(|x| x.color == piece.color))
            .count()
            + q.pieces_of(piece.color).filter(|(s, _)| q.attacks_from(*s).contains(&sq)).count();
        let r = Position::from_fen(&without_piece(&q.to_fen(), sq.file as usize, sq.rank as usize), Variant::Standard8x8);
        if let Ok(r) = r {
            prop_assert!(coordination_score(&r, piece.color) + involving <= coordination_score(&q, piece.color));
            prop_assert_eq!(coordination_score(&q, Color::White), o.coordination(true));
        }
    }
}
