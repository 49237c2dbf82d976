use crate::error::{Error, Result};

/// A bit-packed ±1 configuration. Bit `i` is `(s_i + 1) / 2`, stored in
/// 64-bit words with site 0 in the least significant bit of word 0. Padding
/// bits past `n_bits` are always zero, so word-wise equality, hashing and
/// XOR-popcount distances are exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Snapshot {
    n_bits: usize,
    words: Box<[u64]>,
}

pub fn words_for(n_bits: usize) -> usize {
    n_bits.div_ceil(64)
}

fn last_word_mask(n_bits: usize) -> u64 {
    match n_bits % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl Snapshot {
    /// All spins down.
    pub fn zeros(n_bits: usize) -> Self {
        Self {
            n_bits,
            words: vec![0; words_for(n_bits)].into_boxed_slice(),
        }
    }

    /// All spins up.
    pub fn ones(n_bits: usize) -> Self {
        let mut s = Self {
            n_bits,
            words: vec![u64::MAX; words_for(n_bits)].into_boxed_slice(),
        };
        s.clear_padding();
        s
    }

    /// Rejects words whose padding bits are set.
    pub fn from_words(n_bits: usize, words: Vec<u64>) -> Result<Self> {
        if words.len() != words_for(n_bits) {
            return Err(Error::Format(format!(
                "{} words cannot hold exactly {n_bits} bits",
                words.len()
            )));
        }
        if let Some(&last) = words.last() {
            if last & !last_word_mask(n_bits) != 0 {
                return Err(Error::Format("nonzero padding bits".into()));
            }
        }
        Ok(Self {
            n_bits,
            words: words.into_boxed_slice(),
        })
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut n_bits = 0usize;
        for bit in bits {
            if n_bits % 64 == 0 {
                words.push(0u64);
            }
            if bit {
                *words.last_mut().expect("pushed above") |= 1 << (n_bits % 64);
            }
            n_bits += 1;
        }
        Self {
            n_bits,
            words: words.into_boxed_slice(),
        }
    }

    /// Spins must be ±1; anything positive counts as up.
    pub fn from_spins(spins: &[i8]) -> Self {
        Self::from_bits(spins.iter().map(|&s| s > 0))
    }

    fn clear_padding(&mut self) {
        let mask = last_word_mask(self.n_bits);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.n_bits);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    /// `+1` or `-1`.
    #[inline]
    pub fn spin(&self, i: usize) -> i8 {
        if self.bit(i) {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, up: bool) {
        debug_assert!(i < self.n_bits);
        let w = &mut self.words[i >> 6];
        let m = 1u64 << (i & 63);
        if up {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.n_bits);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    /// Number of up spins.
    pub fn count_up(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Sum of spins, `N_up - N_down`.
    pub fn magnetization(&self) -> i64 {
        2 * self.count_up() as i64 - self.n_bits as i64
    }

    pub fn complement(&self) -> Self {
        let mut s = Self {
            n_bits: self.n_bits,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.clear_padding();
        s
    }

    pub fn to_spins(&self) -> Vec<i8> {
        (0..self.n_bits).map(|i| self.spin(i)).collect()
    }

    /// Restriction to the given bit positions, in that order.
    pub fn project(&self, positions: &[usize]) -> Self {
        let mut out = Self::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            if self.bit(p) {
                out.words[k >> 6] |= 1u64 << (k & 63);
            }
        }
        out
    }
}
