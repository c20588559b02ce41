//! Extended binary Golay code [24, 12, 8].
//!
//! Built from the cyclic length-23 quadratic-residue code with generator
//! polynomial x^11 + x^10 + x^6 + x^5 + x^4 + x^2 + 1, extended by an overall
//! parity bit in coordinate 23. Codewords are `u32` masks, bit i = coordinate i.

use std::sync::OnceLock;

const GENERATOR_POLY: u32 = (1 << 11) | (1 << 10) | (1 << 6) | (1 << 5) | (1 << 4) | (1 << 2) | 1;

/// The 12 generator rows x^i g(x) (extended); every row is an octad.
pub fn generators() -> [u32; 12] {
    let mut g = [0u32; 12];
    for (i, row) in g.iter_mut().enumerate() {
        let cyc = GENERATOR_POLY << i;
        let parity = cyc.count_ones() & 1;
        *row = cyc | (parity << 23);
    }
    g
}

/// All 4096 codewords in Gray-code order together with the generator index
/// toggled to reach each one from its predecessor (entry 0 is the zero word).
pub struct GrayWalk {
    pub words: Vec<u32>,
    pub toggled: Vec<u8>,
}

pub fn gray_walk() -> &'static GrayWalk {
    static WALK: OnceLock<GrayWalk> = OnceLock::new();
    WALK.get_or_init(|| {
        let g = generators();
        let mut words = Vec::with_capacity(4096);
        let mut toggled = Vec::with_capacity(4096);
        let mut w = 0u32;
        words.push(0);
        toggled.push(0);
        for s in 1u32..4096 {
            let t = s.trailing_zeros() as usize;
            w ^= g[t];
            words.push(w);
            toggled.push(t as u8);
        }
        GrayWalk { words, toggled }
    })
}

/// Whether `word` (low 24 bits) is a Golay codeword.
pub fn contains(word: u32) -> bool {
    gray_walk().words.iter().any(|&c| c == word)
}
