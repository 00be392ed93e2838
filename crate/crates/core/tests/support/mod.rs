//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use qbets::coherence::PriceBook;
use qbets::events::{BettingContext, SampleSpace};
use qbets::hilbert::StateVector;
use qbets::kochen_specker::{build_exact_instance, cabello18, KsInstance};
use qbets::twenty_questions::{Answer, BetStatus, GameState, Lexicon, Mode, Proposition, DEFAULT_BUDGET};
use qbets::{Complex, Rational};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Solve `A x = b` exactly. `None` unless the system is consistent and `A`
/// has independent columns.
fn solve_exact(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| r.iter().cloned().chain([v.clone()]).collect())
        .collect();
    let mut r = 0;
    for c in 0..cols {
        let p = (r..rows).find(|&i| !m[i][c].is_zero())?;
        m.swap(r, p);
        let inv = Rational::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let t = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - t;
                }
            }
        }
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| m[c][cols].clone()).collect())
}

/// Coherent iff the price vector is a convex combination of the atoms'
/// valuation vectors. Checked over every basic support: a feasible point
/// exists iff one exists on a set of atoms with independent columns.
pub fn coherence_oracle(book: &PriceBook<Rational>) -> bool {
    let n = book.context.space.size();
    for support in 1u32..(1 << n) {
        let atoms: Vec<usize> = (0..n).filter(|i| support >> i & 1 == 1).collect();
        let mut a = vec![vec![Rational::one(); atoms.len()]];
        let mut b = vec![Rational::one()];
        for (e, p) in &book.prices {
            a.push(
                atoms
                    .iter()
                    .map(|&i| if e.contains(i) { Rational::one() } else { Rational::zero() })
                    .collect(),
            );
            b.push(p.clone());
        }
        if let Some(x) = solve_exact(&a, &b) {
            if x.iter().all(|v| !v.is_negative()) {
                return true;
            }
        }
    }
    false
}

/// Random book over at most four atoms. Half of the books take their prices
/// from a random measure, so both verdicts are well represented.
pub fn random_book<R: Rng>(rng: &mut R) -> PriceBook<Rational> {
    let n = rng.random_range(1..=4usize);
    let labels: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let space = SampleSpace::new(labels).unwrap();
    let mut book = PriceBook::new(BettingContext::new("random", space.clone()));
    let from_measure = rng.random_bool(0.5);
    let weights: Vec<i64> = (0..n).map(|_| rng.random_range(0..=6)).collect();
    let total: i64 = weights.iter().sum::<i64>().max(1);
    let n_prices = rng.random_range(1..=5usize);
    for _ in 0..n_prices {
        let mask = rng.random_range(0..(1u64 << n));
        let e = space.event_from_mask(mask);
        let price = if from_measure && weights.iter().sum::<i64>() > 0 {
            let mass: i64 = e.indices().map(|i| weights[i]).sum();
            q(mass, total)
        } else {
            q(rng.random_range(-2..=12), 10)
        };
        book = book.with_price(e, price);
    }
    book
}

/// Brute force over all 2^R assignments using basis bitmasks.
pub fn ks_brute_force(inst: &KsInstance<f64>) -> bool {
    let r = inst.rays().len();
    assert!(r <= 20, "brute force limited to 20 rays");
    let masks: Vec<u32> = inst
        .bases()
        .iter()
        .map(|b| b.iter().fold(0u32, |m, &i| m | 1 << i))
        .collect();
    (0u32..1 << r).any(|a| masks.iter().all(|&m| (a & m).count_ones() == 1))
}

/// Sub-instances of the 18-ray set: one per nonempty subset of its bases,
/// keeping only the rays those bases use.
pub fn cabello_sub_instances() -> Vec<KsInstance<f64>> {
    let (rays, bases) = cabello18();
    let mut out = Vec::new();
    for subset in 1u32..(1 << bases.len()) {
        let chosen: Vec<&Vec<usize>> = (0..bases.len())
            .filter(|b| subset >> b & 1 == 1)
            .map(|b| &bases[b])
            .collect();
        let mut used: Vec<usize> = chosen.iter().flat_map(|b| b.iter().copied()).collect();
        used.sort_unstable();
        used.dedup();
        let sub_rays = used.iter().map(|&i| rays[i].clone()).collect();
        let sub_bases = chosen
            .iter()
            .map(|b| b.iter().map(|r| used.binary_search(r).unwrap()).collect())
            .collect();
        out.push(build_exact_instance(4, sub_rays, sub_bases).unwrap());
    }
    out
}

/// Family of orthonormal bases where later bases keep a random subset of an
/// earlier basis and re-rotate the rest, so many cross-context projectors
/// coincide.
pub fn overlapping_bases<R: Rng>(d: usize, count: usize, rng: &mut R) -> Vec<Vec<StateVector<f64>>> {
    let mut out: Vec<Vec<StateVector<f64>>> = vec![qbets::random::haar_basis(d, rng)];
    while out.len() < count {
        let parent = out[rng.random_range(0..out.len())].clone();
        let mut idx: Vec<usize> = (0..d).collect();
        idx.shuffle(rng);
        let keep = rng.random_range(1..d);
        let (kept, rotated) = idx.split_at(keep);
        let mut basis: Vec<StateVector<f64>> = kept.iter().map(|&i| parent[i].clone()).collect();
        // Random unitary on the span of the remaining vectors.
        let k = rotated.len();
        let u: Vec<StateVector<f64>> = qbets::random::haar_basis(k, rng);
        for col in &u {
            let mut amps = vec![Complex::new(0.0, 0.0); d];
            for (c, &i) in col.amplitudes().iter().zip(rotated) {
                for (a, p) in amps.iter_mut().zip(parent[i].amplitudes()) {
                    *a += c * p;
                }
            }
            basis.push(StateVector::normalized(amps).unwrap());
        }
        out.push(basis);
    }
    out
}

/// Random lexicon with distinct rows, at most `max_words` words.
pub fn random_lexicon<R: Rng>(rng: &mut R, max_words: usize) -> Lexicon {
    let n_attr = rng.random_range(2..=6usize);
    let max = (1usize << n_attr).min(max_words);
    let n_words = rng.random_range(1..=max);
    let mut rows: Vec<u32> = (0..1u32 << n_attr).collect();
    rows.shuffle(rng);
    rows.truncate(n_words);
    Lexicon::new(
        (0..n_words).map(|i| format!("word{i}")).collect(),
        (0..n_attr).map(|i| format!("attr{i}")).collect(),
        rows.iter()
            .map(|r| (0..n_attr).map(|a| r >> a & 1 == 1).collect())
            .collect(),
    )
    .unwrap()
}

/// Settle a bet by enumerating every word of the lexicon against the
/// transcript up to the respondent's last reply.
pub fn settle_oracle(lex: &Lexicon, transcript: &[Answer], respondent: usize, p: &Proposition) -> BetStatus {
    let upto = transcript
        .iter()
        .rposition(|a| a.respondent == respondent)
        .map_or(0, |i| i + 1);
    let words: Vec<usize> = (0..lex.words().len())
        .filter(|&w| transcript[..upto].iter().all(|a| lex.has(w, a.attribute) == a.answer))
        .collect();
    let truth: Vec<bool> = words
        .iter()
        .map(|&w| match *p {
            Proposition::Word(x) => x == w,
            Proposition::Attribute(a, v) => lex.has(w, a) == v,
        })
        .collect();
    if truth.iter().all(|&t| t) && !truth.is_empty() {
        BetStatus::Won
    } else if truth.iter().all(|&t| !t) && !truth.is_empty() {
        BetStatus::Lost
    } else {
        BetStatus::Void
    }
}

/// Play a game with random questions and bets, checking after every reply
/// that some word is still consistent. Returns the resolved game.
pub fn random_game<R: Rng>(rng: &mut R, max_words: usize) -> GameState {
    let lex = random_lexicon(rng, max_words);
    let n_attr = lex.attributes().len();
    let n_words = lex.words().len();
    let respondents = rng.random_range(1..=8usize);
    let mode = if rng.random_bool(0.5) { Mode::Surprise } else { Mode::Classic };
    let budget = rng.random_range(1..=DEFAULT_BUDGET);
    let mut game = GameState::with_options(lex, respondents, rng.random(), mode, budget).unwrap();
    while !game.is_over() {
        let live: Vec<usize> = (0..respondents).filter(|&r| !game.has_departed(r)).collect();
        let r = live[rng.random_range(0..live.len())];
        game.ask(r, rng.random_range(0..n_attr)).unwrap();
        assert!(!game.consistent_words().is_empty(), "consistent set emptied");
        for _ in 0..rng.random_range(0..3) {
            let who = rng.random_range(0..respondents);
            let prop = if rng.random_bool(0.5) {
                Proposition::Word(rng.random_range(0..n_words))
            } else {
                Proposition::Attribute(rng.random_range(0..n_attr), rng.random_bool(0.5))
            };
            game.place_bet(who, prop, q(rng.random_range(0..=10), 10)).unwrap();
        }
    }
    game.resolve_bets();
    game
}
