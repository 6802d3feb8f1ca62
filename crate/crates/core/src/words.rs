//! Freely reduced words in the free group `F_m`.
//!
//! A word is stored as a flat vector of signed generator indices: `+i` is the
//! generator `x_i` and `-i` its inverse, `1 <= i <= m`. Every constructor and
//! every group operation keeps the word freely reduced, so equality of words is
//! equality of group elements.
//!
//! The abelianization `F_m -> Z^m` sends a word to its signed letter counts;
//! its kernel is the commutator subgroup `[F_m, F_m]`. The prefix path of a
//! word is the lattice walk in `Z^m` traced by its prefixes, which is what the
//! area-type core homomorphisms in [`crate::qm`] integrate over.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Neg, Sub};

/// Hard upper bound on the number of letters a parsed word may expand to.
pub const DEFAULT_PARSE_LETTER_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: &'static str },
    #[error("generator index {index} at byte {offset} exceeds rank {rank}")]
    GeneratorOutOfRange { offset: usize, index: u64, rank: u32 },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: u32, right: u32 },
    #[error("word would exceed {limit} letters")]
    TooLong { limit: usize },
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Generator {
    index: u32,
    inverse: bool,
}

impl Generator {
    /// `index` is 1-based; `sign` is `+1` or `-1`.
    pub fn new(index: u32, sign: i8) -> Option<Self> {
        if index == 0 || (sign != 1 && sign != -1) || index > i32::MAX as u32 {
            return None;
        }
        Some(Generator { index, inverse: sign < 0 })
    }

    pub fn index(self) -> u32 {
        self.index
    }

    pub fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Generator { index: self.index, inverse: !self.inverse }
    }

    fn from_letter(letter: i32) -> Self {
        Generator { index: letter.unsigned_abs(), inverse: letter < 0 }
    }

    fn letter(self) -> i32 {
        let i = self.index as i32;
        if self.inverse {
            -i
        } else {
            i
        }
    }
}

/// Vector in `Z^m`, the abelianization of `F_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntVector(Vec<i64>);

impl IntVector {
    pub fn zero(rank: u32) -> Self {
        IntVector(vec![0; rank as usize])
    }

    /// Standard basis vector `e_i` (0-based `i`).
    pub fn basis(rank: u32, i: usize) -> Self {
        let mut v = Self::zero(rank);
        v.0[i] = 1;
        v
    }

    pub fn from_entries(entries: Vec<i64>) -> Self {
        IntVector(entries)
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        IntVector(self.0.iter().map(|x| x * k).collect())
    }
}

impl Add for &IntVector {
    type Output = IntVector;
    fn add(self, rhs: &IntVector) -> IntVector {
        assert_eq!(self.0.len(), rhs.0.len(), "IntVector rank mismatch");
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntVector {
    type Output = IntVector;
    fn sub(self, rhs: &IntVector) -> IntVector {
        assert_eq!(self.0.len(), rhs.0.len(), "IntVector rank mismatch");
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }
}

/// The lattice walk traced by the prefixes of a word, starting at the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePath {
    points: Vec<IntVector>,
}

impl LatticePath {
    pub fn points(&self) -> &[IntVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.points.last().is_none_or(IntVector::is_zero)
    }
}

/// A freely reduced word over `m` generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    rank: u32,
    letters: Vec<i32>,
}

impl Word {
    pub fn identity(rank: u32) -> Self {
        Word { rank, letters: Vec::new() }
    }

    /// The single-letter word `x_i` (1-based).
    pub fn generator(rank: u32, index: u32) -> Result<Self, WordError> {
        if index == 0 || index > rank {
            return Err(WordError::GeneratorOutOfRange { offset: 0, index: index as u64, rank });
        }
        Ok(Word { rank, letters: vec![index as i32] })
    }

    /// Builds a word from signed indices, reducing freely.
    pub fn from_letters(rank: u32, letters: &[i32]) -> Result<Self, WordError> {
        let mut out = Word::identity(rank);
        for &l in letters {
            if l == 0 || l.unsigned_abs() > rank {
                return Err(WordError::GeneratorOutOfRange {
                    offset: 0,
                    index: l.unsigned_abs() as u64,
                    rank,
                });
            }
            out.push_letter(l);
        }
        Ok(out)
    }

    pub fn from_generators<I: IntoIterator<Item = Generator>>(
        rank: u32,
        gens: I,
    ) -> Result<Self, WordError> {
        let letters: Vec<i32> = gens.into_iter().map(Generator::letter).collect();
        Self::from_letters(rank, &letters)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Signed indices, `+i` for `x_i` and `-i` for its inverse.
    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.letters.iter().map(|&l| Generator::from_letter(l))
    }

    #[inline]
    fn push_letter(&mut self, l: i32) {
        if self.letters.last() == Some(&-l) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    fn check_rank(&self, other: &Word) -> Result<(), WordError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch { left: self.rank, right: other.rank });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        self.check_rank(other)?;
        let mut out = Word {
            rank: self.rank,
            letters: Vec::with_capacity(self.letters.len() + other.letters.len()),
        };
        out.letters.extend_from_slice(&self.letters);
        for &l in &other.letters {
            out.push_letter(l);
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Word {
        Word { rank: self.rank, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    /// Splits `w = c r c^-1` with `r` cyclically reduced. Returns `(|c|, r)` as
    /// slice bounds into `self.letters`.
    fn cyclic_split(&self) -> (usize, usize) {
        let n = self.letters.len();
        if n == 0 {
            return (0, 0);
        }
        let (mut i, mut j) = (0usize, n - 1);
        while i < j && self.letters[i] == -self.letters[j] {
            i += 1;
            j -= 1;
        }
        (i, j + 1)
    }

    /// The cyclically reduced core `r` of `w = c r c^-1`.
    pub fn cyclic_core(&self) -> Word {
        let (s, e) = self.cyclic_split();
        Word { rank: self.rank, letters: self.letters[s..e].to_vec() }
    }

    /// Length of `power(k)` without building it.
    pub fn power_len(&self, k: i64) -> usize {
        if k == 0 {
            return 0;
        }
        let (s, e) = self.cyclic_split();
        2 * s + (e - s) * k.unsigned_abs() as usize
    }

    /// `w^k`, using `w = c r c^-1`, `w^k = c r^k c^-1`. No reduction happens
    /// between the copies of `r`, so the cost is linear in the output.
    pub fn power(&self, k: i64) -> Word {
        if k == 0 || self.letters.is_empty() {
            return Word::identity(self.rank);
        }
        let (s, e) = self.cyclic_split();
        let c = &self.letters[..s];
        let reps = k.unsigned_abs() as usize;
        let mut letters = Vec::with_capacity(self.power_len(k));
        letters.extend_from_slice(c);
        if k > 0 {
            let r = &self.letters[s..e];
            for _ in 0..reps {
                letters.extend_from_slice(r);
            }
        } else {
            let r_inv: Vec<i32> = self.letters[s..e].iter().rev().map(|l| -l).collect();
            for _ in 0..reps {
                letters.extend_from_slice(&r_inv);
            }
        }
        letters.extend(c.iter().rev().map(|l| -l));
        Word { rank: self.rank, letters }
    }

    /// `[self, other] = self * other * self^-1 * other^-1`.
    pub fn commutator(&self, other: &Word) -> Result<Word, WordError> {
        self.check_rank(other)?;
        let mut out = Word {
            rank: self.rank,
            letters: Vec::with_capacity(2 * (self.letters.len() + other.letters.len())),
        };
        for &l in self.letters.iter().chain(&other.letters) {
            out.push_letter(l);
        }
        for &l in self.letters.iter().rev() {
            out.push_letter(-l);
        }
        for &l in other.letters.iter().rev() {
            out.push_letter(-l);
        }
        Ok(out)
    }

    /// `f * self * f^-1`.
    pub fn conjugate_by(&self, f: &Word) -> Result<Word, WordError> {
        f.multiply(self)?.multiply(&f.inverse())
    }

    pub fn abelianize(&self) -> IntVector {
        let mut v = vec![0i64; self.rank as usize];
        for &l in &self.letters {
            v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        IntVector(v)
    }

    /// Exponent sum of generator `index` (1-based).
    pub fn exponent_sum(&self, index: u32) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.unsigned_abs() == index)
            .map(|&l| l.signum() as i64)
            .sum()
    }

    pub fn is_in_commutator_subgroup(&self) -> bool {
        self.letters.is_empty() || self.abelianize().is_zero()
    }

    pub fn prefix_path(&self) -> LatticePath {
        let mut points = Vec::with_capacity(self.letters.len() + 1);
        let mut p = vec![0i64; self.rank as usize];
        points.push(IntVector(p.clone()));
        for &l in &self.letters {
            p[l.unsigned_abs() as usize - 1] += l.signum() as i64;
            points.push(IntVector(p.clone()));
        }
        LatticePath { points }
    }

    /// Applies the endomorphism of `F_m` sending `x_i` to `images[i-1]`.
    pub fn substitute(&self, images: &[Word]) -> Result<Word, WordError> {
        if images.len() != self.rank as usize {
            return Err(WordError::RankMismatch { left: self.rank, right: images.len() as u32 });
        }
        let target = images.first().map_or(self.rank, Word::rank);
        let inverses: Vec<Word> = images.iter().map(Word::inverse).collect();
        let mut out = Word::identity(target);
        for &l in &self.letters {
            let i = l.unsigned_abs() as usize - 1;
            let img = if l > 0 { &images[i] } else { &inverses[i] };
            if img.rank != target {
                return Err(WordError::RankMismatch { left: target, right: img.rank });
            }
            for &x in &img.letters {
                out.push_letter(x);
            }
        }
        Ok(out)
    }
}

fn write_letter(f: &mut fmt::Formatter<'_>, rank: u32, l: i32) -> fmt::Result {
    let idx = l.unsigned_abs();
    if rank <= 26 {
        let base = if l > 0 { b'a' } else { b'A' };
        write!(f, "{}", (base + (idx - 1) as u8) as char)
    } else if l > 0 {
        write!(f, "x{idx}")
    } else {
        write!(f, "X{idx}")
    }
}

/// Canonical form: space-separated letters, `a`..`z` / `A`..`Z` for rank at
/// most 26, `x<n>` / `X<n>` otherwise. The identity prints as the empty string.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, &l) in self.letters.iter().enumerate() {
            if t > 0 {
                f.write_str(" ")?;
            }
            write_letter(f, self.rank, l)?;
        }
        Ok(())
    }
}

/// Parses a word in the text grammar and reduces it freely.
///
/// Tokens: `a`-`z` are generators 1-26 and `A`-`Z` their inverses; `x<n>` and
/// `X<n>` name generator `n` and its inverse. Any token or parenthesized group
/// may carry an exponent `^<integer>`. Whitespace between tokens is optional.
pub fn parse_word(text: &str, rank: u32) -> Result<Word, WordError> {
    parse_word_capped(text, rank, DEFAULT_PARSE_LETTER_CAP)
}

pub fn parse_word_capped(text: &str, rank: u32, letter_cap: usize) -> Result<Word, WordError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, rank, cap: letter_cap };
    let w = p.sequence(0)?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(WordError::Syntax { offset: p.pos, message: "unmatched ')'" });
    }
    Ok(w)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    rank: u32,
    cap: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn sequence(&mut self, depth: usize) -> Result<Word, WordError> {
        let mut acc = Word::identity(self.rank);
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(b')') => return Ok(acc),
                Some(_) => {
                    let item = self.item(depth)?;
                    if acc.len() + item.len() > self.cap {
                        return Err(WordError::TooLong { limit: self.cap });
                    }
                    for &l in &item.letters {
                        acc.push_letter(l);
                    }
                }
            }
        }
    }

    fn item(&mut self, depth: usize) -> Result<Word, WordError> {
        let atom = self.atom(depth)?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(atom);
        }
        self.pos += 1;
        self.skip_ws();
        let exp = self.integer()?;
        if atom.power_len(exp) > self.cap {
            return Err(WordError::TooLong { limit: self.cap });
        }
        Ok(atom.power(exp))
    }

    fn atom(&mut self, depth: usize) -> Result<Word, WordError> {
        let start = self.pos;
        let c = self.peek().ok_or(WordError::Syntax { offset: start, message: "expected token" })?;
        match c {
            b'(' => {
                if depth >= 256 {
                    return Err(WordError::Syntax { offset: start, message: "nesting too deep" });
                }
                self.pos += 1;
                let inner = self.sequence(depth + 1)?;
                if self.peek() != Some(b')') {
                    return Err(WordError::Syntax { offset: self.pos, message: "expected ')'" });
                }
                self.pos += 1;
                Ok(inner)
            }
            b'x' | b'X' if self.src.get(start + 1).is_some_and(u8::is_ascii_digit) => {
                self.pos += 1;
                let digits_at = self.pos;
                let index = self.unsigned()?;
                if index == 0 {
                    return Err(WordError::Syntax {
                        offset: digits_at,
                        message: "generator index must be at least 1",
                    });
                }
                self.letter(start, index, c == b'X')
            }
            b'a'..=b'z' => {
                self.pos += 1;
                self.letter(start, (c - b'a' + 1) as u64, false)
            }
            b'A'..=b'Z' => {
                self.pos += 1;
                self.letter(start, (c - b'A' + 1) as u64, true)
            }
            _ => Err(WordError::Syntax { offset: start, message: "unexpected character" }),
        }
    }

    fn letter(&self, offset: usize, index: u64, inverse: bool) -> Result<Word, WordError> {
        if index > self.rank as u64 {
            return Err(WordError::GeneratorOutOfRange { offset, index, rank: self.rank });
        }
        let l = index as i32;
        Ok(Word { rank: self.rank, letters: vec![if inverse { -l } else { l }] })
    }

    fn unsigned(&mut self) -> Result<u64, WordError> {
        let start = self.pos;
        let mut v: u64 = 0;
        while let Some(d) = self.peek().filter(u8::is_ascii_digit) {
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((d - b'0') as u64))
                .ok_or(WordError::Syntax { offset: start, message: "integer overflow" })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(WordError::Syntax { offset: start, message: "expected digits" });
        }
        Ok(v)
    }

    fn integer(&mut self) -> Result<i64, WordError> {
        let start = self.pos;
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let v = self.unsigned()?;
        let v = i64::try_from(v)
            .map_err(|_| WordError::Syntax { offset: start, message: "integer overflow" })?;
        Ok(if neg { -v } else { v })
    }
}

/// Formats a list of words separated by `;`, the CLI representative syntax.
pub fn format_word_list(words: &[Word]) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            s.push(';');
        }
        let _ = write!(s, "{w}");
    }
    s
}
