//! Random words for property checks and randomized defect search.

use alloc::vec::Vec;

use rand::Rng;

use crate::words::Word;

/// Uniform random reduced word of exactly `len` letters.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, rank: u32, len: usize) -> Word {
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let idx = rng.gen_range(1..=rank as i32);
        let l = if rng.gen_bool(0.5) { idx } else { -idx };
        if letters.last() != Some(&-l) {
            letters.push(l);
        }
    }
    Word::from_letters(rank, &letters).expect("letters drawn within rank")
}

/// Random reduced word of length at most `max_len`.
pub fn random_word_upto<R: Rng + ?Sized>(rng: &mut R, rank: u32, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    random_word(rng, rank, len)
}

/// Random element of `[F, F]`: a product of one to three conjugated
/// commutators of short random words.
pub fn random_in_commutator_subgroup<R: Rng + ?Sized>(
    rng: &mut R,
    rank: u32,
    scale: usize,
) -> Word {
    let mut acc = Word::identity(rank);
    for _ in 0..rng.gen_range(1..=3) {
        let u = random_word_upto(rng, rank, scale.max(1));
        let v = random_word_upto(rng, rank, scale.max(1));
        let f = random_word_upto(rng, rank, scale);
        let c = u.commutator(&v).and_then(|c| c.conjugate_by(&f)).expect("same rank");
        acc = acc.multiply(&c).expect("same rank");
    }
    acc
}

/// Random element of `[F, F]` with at most `max_len` letters, drawn by
/// rejection from random reduced words of even length.
pub fn random_in_commutator_subgroup_upto<R: Rng + ?Sized>(
    rng: &mut R,
    rank: u32,
    max_len: usize,
) -> Word {
    loop {
        let len = 2 * rng.gen_range(0..=max_len / 2);
        let w = random_word(rng, rank, len);
        if w.is_in_commutator_subgroup() {
            return w;
        }
    }
}
