//! Fixed-length bitsets over word positions.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PosSet {
    len: usize,
    words: Vec<u64>,
}

impl PosSet {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        Self::range(len, 0, len)
    }

    /// Positions `lo..hi`, clipped to the length.
    pub fn range(len: usize, lo: usize, hi: usize) -> Self {
        let mut s = Self::empty(len);
        for p in lo..hi.min(len) {
            s.insert(p);
        }
        s
    }

    pub fn from_fn(len: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        let mut s = Self::empty(len);
        for p in 0..len {
            if pred(p) {
                s.insert(p);
            }
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn contains(&self, p: usize) -> bool {
        p < self.len && self.words[p / 64] >> (p % 64) & 1 == 1
    }

    pub fn insert(&mut self, p: usize) {
        assert!(p < self.len, "position {p} out of range");
        self.words[p / 64] |= 1 << (p % 64);
    }

    pub fn remove(&mut self, p: usize) {
        if p < self.len {
            self.words[p / 64] &= !(1 << (p % 64));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |p| self.contains(*p))
    }

    pub fn and(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn and_not(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        Self::full(self.len).and_not(self)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    fn zip(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.len, other.len, "position sets over different words");
        Self {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = PosSet::from_fn(70, |p| p % 2 == 0);
        let b = PosSet::range(70, 60, 70);
        assert_eq!(a.count(), 35);
        assert_eq!(a.and(&b).iter().collect::<Vec<_>>(), [60, 62, 64, 66, 68]);
        assert_eq!(a.or(&b).count(), 40);
        assert_eq!(a.complement().count(), 35);
        assert!(!a.contains(69) && a.complement().contains(69));
        assert!(!a.contains(1000));
    }
}
