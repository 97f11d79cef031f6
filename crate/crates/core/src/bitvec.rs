//! Fixed-length packed bit vectors used as the columns of the vertical
//! database and as the running support mask of a sampled path.

const WORD_BITS: usize = 64;

/// A fixed-length bit vector packed into `u64` words.
///
/// Bits at positions `>= len` are always zero, so word-level popcounts are
/// exact counts of the logical vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    n_bits: usize,
}

impl BitVector {
    pub fn zeros(n_bits: usize) -> Self {
        Self {
            words: vec![0; words_for(n_bits)],
            n_bits,
        }
    }

    pub fn ones(n_bits: usize) -> Self {
        let mut v = Self {
            words: vec![u64::MAX; words_for(n_bits)],
            n_bits,
        };
        v.clear_padding();
        v
    }

    /// Builds a vector of length `n_bits` with the given positions set.
    ///
    /// Panics if a position is out of range.
    pub fn from_positions<I: IntoIterator<Item = usize>>(n_bits: usize, positions: I) -> Self {
        let mut v = Self::zeros(n_bits);
        for p in positions {
            v.set(p, true);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_bits
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n_bits == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.n_bits, "bit {pos} out of range {}", self.n_bits);
        self.words[pos / WORD_BITS] >> (pos % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pos: usize, value: bool) {
        assert!(pos < self.n_bits, "bit {pos} out of range {}", self.n_bits);
        let mask = 1u64 << (pos % WORD_BITS);
        if value {
            self.words[pos / WORD_BITS] |= mask;
        } else {
            self.words[pos / WORD_BITS] &= !mask;
        }
    }

    /// Number of set bits.
    #[inline]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `popcount(self AND other)` without materializing the intersection.
    #[inline]
    pub fn and_count(&self, other: &BitVector) -> usize {
        debug_assert_eq!(self.n_bits, other.n_bits);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// In-place intersection.
    #[inline]
    pub fn and_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.n_bits, other.n_bits);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    /// Intersection into a fresh vector.
    pub fn and(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.and_assign(other);
        out
    }

    /// Overwrites `self` with `a AND b`, reusing the allocation.
    #[inline]
    pub fn assign_and(&mut self, a: &BitVector, b: &BitVector) {
        debug_assert_eq!(a.n_bits, b.n_bits);
        self.n_bits = a.n_bits;
        self.words.clear();
        self.words
            .extend(a.words.iter().zip(&b.words).map(|(x, y)| x & y));
    }

    /// Iterator over the positions of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    fn clear_padding(&mut self) {
        let rem = self.n_bits % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector[{}](", self.n_bits)?;
        for i in 0..self.n_bits {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

#[inline]
fn words_for(n_bits: usize) -> usize {
    n_bits.div_ceil(WORD_BITS)
}
