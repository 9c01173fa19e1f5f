//! Seeded random words and composites for property tests and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{canonical_with, subword, Builder, FormalComposite, Move, MoveKind, Path, Step, UnitorSide};
use crate::words::{Sign, TensorWord};

/// Limits for random walks over words.
#[derive(Debug, Clone, Copy)]
pub struct WalkConfig {
    pub n: usize,
    pub max_letters: usize,
    /// Admit twists whose operands share a generator.
    pub self_twists: bool,
    /// Admit unit insertions (inverted unitors).
    pub unit_insertions: bool,
}

/// A random inverse-restricted word with between `min` and `max` letters
/// and no unit subwords (except the empty word itself).
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, n: usize, min: usize, max: usize) -> TensorWord {
    let k = rng.gen_range(min..=max);
    random_tree(rng, n, k)
}

fn random_tree<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> TensorWord {
    match k {
        0 => TensorWord::Unit,
        1 => {
            let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            TensorWord::letter(rng.gen_range(0..n), sign)
        }
        _ => {
            let left = rng.gen_range(1..k);
            TensorWord::tensor(random_tree(rng, n, left), random_tree(rng, n, k - left))
        }
    }
}

fn support(w: &TensorWord) -> u64 {
    match w {
        TensorWord::Unit => 0,
        TensorWord::Gen(i) | TensorWord::DualGen(i) => 1 << i,
        TensorWord::Dual(x) => support(x),
        TensorWord::Tensor(a, b) => support(a) | support(b),
    }
}

fn collect_positions(w: &TensorWord, path: &mut Vec<Step>, out: &mut Vec<Path>) {
    out.push(Path(path.clone()));
    if let TensorWord::Tensor(a, b) = w {
        path.push(Step::L);
        collect_positions(a, path, out);
        path.pop();
        path.push(Step::R);
        collect_positions(b, path, out);
        path.pop();
    }
}

/// Every move applicable to `w` under the walk limits.
pub fn applicable_moves(w: &TensorWord, cfg: &WalkConfig) -> Vec<Move> {
    use TensorWord::{DualGen, Gen, Tensor, Unit};
    let mut positions = Vec::new();
    collect_positions(w, &mut Vec::new(), &mut positions);
    let room = w.letter_count() + 2 <= cfg.max_letters;
    let nodes_ok = w.node_count() < 4 * cfg.max_letters.max(1);
    let mut out = Vec::new();
    for p in positions {
        let s = subword(w, &p).expect("collected position");
        let mut add = |kind: MoveKind, inverted: bool| {
            out.push(Move {
                kind,
                position: p.clone(),
                inverted,
            })
        };
        if let Tensor(a, b) = s {
            if matches!(**a, Tensor(..)) {
                add(MoveKind::Assoc, false);
            }
            if matches!(**b, Tensor(..)) {
                add(MoveKind::Assoc, true);
            }
            if a.is_unit() {
                add(MoveKind::Unitor(UnitorSide::Left), false);
            }
            if b.is_unit() {
                add(MoveKind::Unitor(UnitorSide::Right), false);
            }
            if cfg.self_twists || support(a) & support(b) == 0 {
                add(MoveKind::Twist((**a).clone(), (**b).clone()), false);
                add(MoveKind::Twist((**b).clone(), (**a).clone()), true);
            }
            match (&**a, &**b) {
                (Gen(i), DualGen(j)) if i == j => add(MoveKind::AlphaHat(*i), false),
                (DualGen(i), Gen(j)) if i == j => add(MoveKind::Alpha(*i), true),
                _ => {}
            }
        }
        if cfg.unit_insertions && nodes_ok {
            add(MoveKind::Unitor(UnitorSide::Left), true);
            add(MoveKind::Unitor(UnitorSide::Right), true);
        }
        if matches!(s, Unit) && room {
            for i in 0..cfg.n {
                add(MoveKind::Alpha(i), false);
                add(MoveKind::AlphaHat(i), true);
            }
        }
    }
    out
}

/// Random walk of `steps` moves from `start`.
pub fn random_walk<R: Rng + ?Sized>(
    rng: &mut R,
    start: TensorWord,
    steps: usize,
    cfg: &WalkConfig,
) -> FormalComposite {
    let mut b = Builder::new(start);
    for _ in 0..steps {
        let moves = applicable_moves(b.current(), cfg);
        match moves.choose(rng) {
            Some(m) => b.try_push(m.clone()).expect("applicable move"),
            None => break,
        }
    }
    b.finish()
}

/// A random closed composite `S -> S`: a random walk from `S` (all move
/// kinds, self-twists included), closed off by the canonical isomorphism
/// of the word reached.
pub fn random_closed_composite<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_letters: usize,
    steps: usize,
) -> FormalComposite {
    let cfg = WalkConfig {
        n,
        max_letters,
        self_twists: true,
        unit_insertions: true,
    };
    let walk = random_walk(rng, TensorWord::Unit, steps, &cfg);
    let reached = walk.target().expect("walk replays");
    let close = canonical_with(&reached, n, &mut |_| 0);
    walk.then(&close).expect("endpoints agree")
}

/// A random path `w -> X^a` built only from canonical moves (no
/// self-twists): a few random canonical moves, then a canonical
/// reduction with randomly resolved choices.
pub fn random_canonical_path<R: Rng + ?Sized>(
    rng: &mut R,
    w: &TensorWord,
    n: usize,
    max_letters: usize,
    prefix_steps: usize,
) -> FormalComposite {
    let cfg = WalkConfig {
        n,
        max_letters,
        self_twists: false,
        unit_insertions: true,
    };
    let steps = rng.gen_range(0..=prefix_steps);
    let walk = random_walk(rng, w.clone(), steps, &cfg);
    let reached = walk.target().expect("walk replays");
    let tail = canonical_with(&reached, n, &mut |k| rng.gen_range(0..k));
    walk.then(&tail).expect("endpoints agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composites::{compile_to_kl, evaluate};
    use crate::words::{multidegree, power_word};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_composites_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let c = random_closed_composite(&mut rng, 3, 8, 12);
            assert_eq!(c.target().unwrap(), TensorWord::Unit);
            let e = evaluate(&c, 3).unwrap();
            let (k, s) = compile_to_kl(&c, 3).unwrap();
            assert!(k.is_closed());
            for (i, si) in s.iter().enumerate() {
                assert_eq!(e.get(i) as u64, (k.loops.count(i) + si) % 2);
            }
        }
    }

    #[test]
    fn canonical_paths_reach_power_word() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let w = random_word(&mut rng, 2, 0, 6);
            let p = random_canonical_path(&mut rng, &w, 2, 8, 4);
            assert_eq!(p.target().unwrap(), power_word(&multidegree(&w, 2)));
            assert!(evaluate(&p, 2).unwrap().is_zero());
            assert!(p.moves.iter().all(|m| !m.is_self_twist()));
        }
    }

    #[test]
    fn seeded_walks_are_reproducible() {
        let a = random_closed_composite(&mut ChaCha8Rng::seed_from_u64(3), 2, 6, 10);
        let b = random_closed_composite(&mut ChaCha8Rng::seed_from_u64(3), 2, 6, 10);
        assert_eq!(a, b);
    }
}
