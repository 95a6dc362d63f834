//! Dense bit vectors and Gaussian elimination over GF(2).

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bits::new(len);
        for i in idx {
            b.flip(i);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_with(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND.
    pub fn dot(&self, other: &Bits) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }
}

struct Pivot {
    col: usize,
    row: Bits,
    combo: Bits,
}

/// Row-echelon form of a list of vectors, remembering which input rows
/// combine into each pivot. Pivots are chosen in input order.
pub struct Eliminator {
    n_rows: usize,
    pivots: Vec<Pivot>,
    null: Vec<Bits>,
}

impl Eliminator {
    pub fn new(rows: &[Bits]) -> Self {
        let n_rows = rows.len();
        let mut pivots: Vec<Pivot> = Vec::new();
        let mut null = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            let mut row = r.clone();
            let mut combo = Bits::new(n_rows);
            combo.flip(i);
            for p in &pivots {
                if row.get(p.col) {
                    row.xor_with(&p.row);
                    combo.xor_with(&p.combo);
                }
            }
            match row.first_one() {
                Some(col) => pivots.push(Pivot { col, row, combo }),
                None => null.push(combo),
            }
        }
        Eliminator {
            n_rows,
            pivots,
            null,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// A combination of input rows summing to `target`, if one exists.
    pub fn solve(&self, target: &Bits) -> Option<Bits> {
        let mut t = target.clone();
        let mut combo = Bits::new(self.n_rows);
        for p in &self.pivots {
            if t.get(p.col) {
                t.xor_with(&p.row);
                combo.xor_with(&p.combo);
            }
        }
        t.is_zero().then_some(combo)
    }

    pub fn in_span(&self, target: &Bits) -> bool {
        self.solve(target).is_some()
    }

    /// Basis of the dependencies among the input rows.
    pub fn nullspace(&self) -> &[Bits] {
        &self.null
    }
}

/// Incrementally grown basis that tracks a payload bit per vector, used to
/// infer values of vectors in the span.
#[derive(Clone, Default)]
pub struct ValuedBasis {
    pivots: Vec<(usize, Bits, bool)>,
}

impl ValuedBasis {
    pub fn new() -> Self {
        Self::default()
    }

    fn reduce(&self, v: &Bits) -> (Bits, bool) {
        let mut r = v.clone();
        let mut val = false;
        for (col, row, b) in &self.pivots {
            if r.get(*col) {
                r.xor_with(row);
                val ^= b;
            }
        }
        (r, val)
    }

    /// Value of `v` if it lies in the span.
    pub fn value(&self, v: &Bits) -> Option<bool> {
        let (r, val) = self.reduce(v);
        r.is_zero().then_some(val)
    }

    /// Adds `v` with value `b`. Returns false when `v` was already spanned.
    pub fn insert(&mut self, v: &Bits, b: bool) -> bool {
        let (r, val) = self.reduce(v);
        match r.first_one() {
            Some(col) => {
                self.pivots.push((col, r, b ^ val));
                true
            }
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }
}
