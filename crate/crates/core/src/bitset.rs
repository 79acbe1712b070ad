//! Word-level helpers for fixed-width row bitsets stored in `u64` slices.

pub type Word = u64;
pub const WORD_BITS: usize = Word::BITS as usize;

#[inline]
pub const fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn split(bit: usize) -> (usize, Word) {
    (bit / WORD_BITS, 1 << (bit % WORD_BITS))
}

#[inline]
pub fn set(words: &mut [Word], bit: usize) {
    let (w, mask) = split(bit);
    words[w] |= mask;
}

#[inline]
pub fn clear(words: &mut [Word], bit: usize) {
    let (w, mask) = split(bit);
    words[w] &= !mask;
}

#[inline]
pub fn test(words: &[Word], bit: usize) -> bool {
    let (w, mask) = split(bit);
    words[w] & mask != 0
}

#[inline]
pub fn count(words: &[Word]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}

/// Indices of the set bits, ascending.
pub fn ones(words: &[Word]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut rest = w;
        core::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i * WORD_BITS + b)
        })
    })
}
