//! Dense linear algebra over the two-element field.
//!
//! Vectors and matrix rows are packed into 64-bit words. Every routine is a
//! pure function with a fixed pivot rule (lowest column first), so results do
//! not depend on thread scheduling or on the machine.

use std::fmt;

use rayon::prelude::*;

const WORD: usize = 64;
/// Matrices with at least this many live words per elimination step are
/// reduced with the rows split across threads.
const PARALLEL_WORDS: usize = 1 << 16;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A vector over F2 of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    /// The standard basis vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        BitVec { len, words }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "BitVec length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        first_one_in(&self.words, 0)
    }

    /// Inner product.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "BitVec length mismatch");
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones % 2 == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + b)
                }
            })
        })
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + other.len);
        v.words[..self.words.len()].copy_from_slice(&self.words);
        v.xor_shifted(other, self.len);
        v
    }

    /// `self[offset..offset+other.len()] ^= other`.
    pub fn xor_shifted(&mut self, other: &BitVec, offset: usize) {
        assert!(offset + other.len <= self.len, "shifted xor out of range");
        let (q, r) = (offset / WORD, offset % WORD);
        for (i, &x) in other.words.iter().enumerate() {
            if x == 0 {
                continue;
            }
            self.words[q + i] ^= x << r;
            if r > 0 && q + i + 1 < self.words.len() {
                self.words[q + i + 1] ^= x >> (WORD - r);
            }
        }
    }

    /// The entries in `start..end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        assert!(start <= end && end <= self.len, "slice out of range");
        let mut v = BitVec::zeros(end - start);
        let (q, r) = (start / WORD, start % WORD);
        for i in 0..v.words.len() {
            let lo = self.words.get(q + i).copied().unwrap_or(0) >> r;
            let hi = if r > 0 { self.words.get(q + i + 1).copied().unwrap_or(0) << (WORD - r) } else { 0 };
            v.words[i] = lo | hi;
        }
        if let Some(last) = v.words.last_mut() {
            let tail = v.len % WORD;
            if tail > 0 {
                *last &= (1u64 << tail) - 1;
            }
        }
        v
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "[{s}]")
    }
}

fn first_one_in(words: &[u64], from_word: usize) -> Option<usize> {
    words[from_word..]
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| (from_word + i) * WORD + w.trailing_zeros() as usize)
}

/// Dense row-major matrix over F2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrixF2 {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrixF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrixF2 { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix whose rows are the given vectors.
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, v) in rows.iter().enumerate() {
            assert_eq!(v.len(), cols, "row length mismatch");
            m.row_words_mut(r).copy_from_slice(v.words());
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (c, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), rows, "column length mismatch");
            for r in v.iter_ones() {
                m.set(r, c, true);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of packed words per row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn data(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn to_rows(&self) -> Vec<BitVec> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// `self · v` for a column vector `v` of length `cols`.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let ones: u32 = self.row_words(r).iter().zip(v.words()).map(|(a, b)| (a & b).count_ones()).sum();
            if ones % 2 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    pub fn mul(&self, other: &BitMatrixF2) -> BitMatrixF2 {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = BitMatrixF2::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let s = other.stride;
                    for w in 0..s {
                        out.data[r * s + w] ^= other.data[k * s + w];
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> BitMatrixF2 {
        let mut t = BitMatrixF2::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in BitVec::from_words(self.cols, self.row_words(r).to_vec()).iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * s);
        head[lo * s..(lo + 1) * s].swap_with_slice(&mut tail[..s]);
    }

    /// `row[dst] ^= row[src]`, touching words from `from_word` on.
    fn xor_row(&mut self, src: usize, dst: usize, from_word: usize) {
        let s = self.stride;
        let (src_off, dst_off) = (src * s, dst * s);
        for w in from_word..s {
            let x = self.data[src_off + w];
            self.data[dst_off + w] ^= x;
        }
    }
}

impl fmt::Debug for BitMatrixF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrixF2 {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Output of [`row_reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RrefResult {
    /// Reduced row echelon form; rows past `rank` are zero.
    pub matrix: BitMatrixF2,
    /// Pivot column of each nonzero row, strictly increasing.
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Gauss-Jordan elimination in place. Returns the pivot columns.
fn rref_in_place(m: &mut BitMatrixF2) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..m.cols {
        if rank == m.rows {
            break;
        }
        let w = c / WORD;
        let mask = 1u64 << (c % WORD);
        let Some(p) = (rank..m.rows).find(|&r| m.data[r * m.stride + w] & mask != 0) else {
            continue;
        };
        m.swap_rows(p, rank);
        if m.rows * (m.stride - w) >= PARALLEL_WORDS {
            let s = m.stride;
            let pivot_row: Vec<u64> = m.data[rank * s + w..(rank + 1) * s].to_vec();
            m.data.par_chunks_mut(s).enumerate().for_each(|(r, row)| {
                if r != rank && row[w] & mask != 0 {
                    for (x, y) in row[w..].iter_mut().zip(&pivot_row) {
                        *x ^= y;
                    }
                }
            });
        } else {
            for r in 0..m.rows {
                if r != rank && m.data[r * m.stride + w] & mask != 0 {
                    m.xor_row(rank, r, w);
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    pivots
}

pub fn row_reduce(m: &BitMatrixF2) -> RrefResult {
    let mut matrix = m.clone();
    let pivots = rref_in_place(&mut matrix);
    RrefResult { rank: pivots.len(), matrix, pivots }
}

pub fn rank(m: &BitMatrixF2) -> usize {
    row_reduce(m).rank
}

/// Basis of `{v : m·v = 0}`: one vector per free column, with a 1 in that
/// column and the pivot entries it forces.
pub fn kernel_basis(m: &BitMatrixF2) -> Vec<BitVec> {
    let rr = row_reduce(m);
    let mut is_pivot = vec![false; m.cols()];
    for &p in &rr.pivots {
        is_pivot[p] = true;
    }
    (0..m.cols())
        .filter(|&j| !is_pivot[j])
        .map(|j| {
            let mut v = BitVec::unit(m.cols(), j);
            for (i, &p) in rr.pivots.iter().enumerate() {
                if rr.matrix.get(i, j) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// Some `x` with `m·x = b`, free variables set to zero; `None` if the system
/// is inconsistent.
pub fn solve(m: &BitMatrixF2, b: &BitVec) -> Option<BitVec> {
    assert_eq!(b.len(), m.rows(), "right-hand side length mismatch");
    let n = m.cols();
    let mut aug = BitMatrixF2::zeros(m.rows(), n + 1);
    for r in 0..m.rows() {
        for c in m.row(r).iter_ones() {
            aug.set(r, c, true);
        }
        if b.get(r) {
            aug.set(r, n, true);
        }
    }
    let pivots = rref_in_place(&mut aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = BitVec::zeros(n);
    for (i, &p) in pivots.iter().enumerate() {
        if aug.get(i, n) {
            x.set(p, true);
        }
    }
    Some(x)
}

/// Coset representatives for `ambient / span(rows of subspace_gens)`: the
/// standard basis vectors at the non-pivot columns of the row space's RREF.
pub fn quotient_basis(subspace_gens: &BitMatrixF2, ambient_dim: usize) -> Vec<BitVec> {
    assert_eq!(subspace_gens.cols(), ambient_dim, "subspace vectors have the wrong length");
    let rr = row_reduce(subspace_gens);
    let mut is_pivot = vec![false; ambient_dim];
    for &p in &rr.pivots {
        is_pivot[p] = true;
    }
    (0..ambient_dim).filter(|&j| !is_pivot[j]).map(|j| BitVec::unit(ambient_dim, j)).collect()
}

/// Image and kernel of the linear map sending the `i`-th domain basis vector
/// to `images[i]`, from a single elimination.
///
/// The image comes back as a [`Subspace`] whose tags express each reduced row
/// in domain coordinates, so it can also solve `map(x) = b`.
pub fn image_and_kernel(codomain: usize, images: &[BitVec]) -> (Subspace, Vec<BitVec>) {
    let n = images.len();
    let mut aug = BitMatrixF2::zeros(n, codomain + n);
    for (i, v) in images.iter().enumerate() {
        assert_eq!(v.len(), codomain, "image vector length mismatch");
        let row = aug.row_words_mut(i);
        row[..v.words().len()].copy_from_slice(v.words());
        row[(codomain + i) / WORD] |= 1u64 << ((codomain + i) % WORD);
    }
    let pivots = rref_in_place(&mut aug);
    let mut image = Subspace::with_tags(codomain, n);
    let mut kernel = Vec::new();
    for (r, &p) in pivots.iter().enumerate() {
        let row = aug.row(r);
        if p < codomain {
            image.rows.push((p, row.slice(0, codomain), row.slice(codomain, codomain + n)));
        } else {
            kernel.push(row.slice(codomain, codomain + n));
        }
    }
    (image, kernel)
}

/// A subspace kept in reduced echelon form, grown one vector at a time. Each
/// stored row may carry a tag vector recording how it was built from the
/// inserted vectors, which turns the subspace into a solver.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    tag_len: usize,
    /// (pivot, row, tag), sorted by pivot.
    rows: Vec<(usize, BitVec, BitVec)>,
}

impl Subspace {
    pub fn new(ambient: usize) -> Self {
        Self::with_tags(ambient, 0)
    }

    /// A subspace whose inserted vectors are tagged by vectors of `tag_len`.
    pub fn with_tags(ambient: usize, tag_len: usize) -> Self {
        Subspace { ambient, tag_len, rows: Vec::new() }
    }

    pub fn from_vectors<'a>(ambient: usize, vs: impl IntoIterator<Item = &'a BitVec>) -> Self {
        let mut s = Self::new(ambient);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.0)
    }

    /// The reduced basis rows in pivot order.
    pub fn basis(&self) -> impl Iterator<Item = &BitVec> + '_ {
        self.rows.iter().map(|r| &r.1)
    }

    /// Reduces `v` in place; returns the tag of the combination removed.
    pub fn reduce(&self, v: &mut BitVec) -> BitVec {
        let mut tag = BitVec::zeros(self.tag_len);
        for (p, row, t) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
                if self.tag_len > 0 {
                    tag.xor_assign(t);
                }
            }
        }
        tag
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Inserts `v`; returns false if it already lay in the subspace.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        self.insert_tagged(v, BitVec::zeros(self.tag_len))
    }

    /// Inserts `v` with tag `tag`. Tags of existing rows are updated so that
    /// every stored row equals the sum of the inserted vectors named by its tag.
    pub fn insert_tagged(&mut self, v: &BitVec, tag: BitVec) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let mut v = v.clone();
        let mut tag = tag;
        let removed = self.reduce(&mut v);
        if self.tag_len > 0 {
            tag.xor_assign(&removed);
        }
        let Some(p) = v.first_one() else {
            return false;
        };
        for (_, row, t) in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&v);
                if self.tag_len > 0 {
                    t.xor_assign(&tag);
                }
            }
        }
        let pos = self.rows.partition_point(|r| r.0 < p);
        self.rows.insert(pos, (p, v, tag));
        true
    }

    /// Writes `v` as a sum of inserted vectors, returning the tag combination.
    pub fn express(&self, v: &BitVec) -> Option<BitVec> {
        let mut w = v.clone();
        let tag = self.reduce(&mut w);
        w.is_zero().then_some(tag)
    }
}

/// A subquotient `Z / B` of F2^n with chosen representatives, able to
/// express any cycle in the representative basis.
#[derive(Clone, Debug)]
pub struct Subquotient {
    ambient: usize,
    boundaries: Subspace,
    reps: Vec<BitVec>,
    coords: Subspace,
}

impl Subquotient {
    /// `cycles` must span a space containing `boundaries`. Representatives are
    /// chosen greedily from `cycles` in order, after reduction modulo the
    /// boundaries and the earlier representatives.
    pub fn new(ambient: usize, cycles: &[BitVec], boundaries: &[BitVec]) -> Self {
        let b = Subspace::from_vectors(ambient, boundaries);
        let mut span = b.clone();
        let mut reps = Vec::new();
        for z in cycles {
            let mut r = z.clone();
            span.reduce(&mut r);
            if !r.is_zero() {
                span.insert(&r);
                let mut rep = z.clone();
                b.reduce(&mut rep);
                reps.push(rep);
            }
        }
        Self::from_reps(ambient, b, reps)
    }

    /// Uses the given representatives, which must be independent modulo `b`.
    pub fn from_reps(ambient: usize, b: Subspace, reps: Vec<BitVec>) -> Self {
        let mut coords = Subspace::with_tags(ambient, reps.len());
        for v in b.basis() {
            coords.insert(v);
        }
        for (i, r) in reps.iter().enumerate() {
            let fresh = coords.insert_tagged(r, BitVec::unit(reps.len(), i));
            assert!(fresh, "representatives are dependent modulo the boundaries");
        }
        Subquotient { ambient, boundaries: b, reps, coords }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[BitVec] {
        &self.reps
    }

    pub fn boundaries(&self) -> &Subspace {
        &self.boundaries
    }

    /// Coordinates of the class of `v`, or `None` if `v` is not in `Z`.
    pub fn coordinates(&self, v: &BitVec) -> Option<BitVec> {
        self.coords.express(v)
    }

    /// Lifts coordinates back to a representative vector.
    pub fn lift(&self, coords: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.ambient);
        for i in coords.iter_ones() {
            v.xor_assign(&self.reps[i]);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Rank by naive elimination on `Vec<Vec<u8>>`, independent of the packed code.
    fn naive_rank(rows: &[Vec<u8>]) -> usize {
        let mut a: Vec<Vec<u8>> = rows.to_vec();
        let ncols = a.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..a.len()).find(|&r| a[r][c] % 2 == 1) else { continue };
            a.swap(p, rank);
            for r in 0..a.len() {
                if r != rank && a[r][c] % 2 == 1 {
                    for k in 0..ncols {
                        a[r][k] = (a[r][k] + a[rank][k]) % 2;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> (BitMatrixF2, Vec<Vec<u8>>) {
        let raw: Vec<Vec<u8>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..2)).collect()).collect();
        let mut m = BitMatrixF2::zeros(rows, cols);
        for (r, row) in raw.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b == 1);
            }
        }
        (m, raw)
    }

    fn matrix(rows: &[&[u8]]) -> BitMatrixF2 {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = BitMatrixF2::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b == 1);
            }
        }
        m
    }

    proptest! {
        #[test]
        fn slice_concat_roundtrip(a in proptest::collection::vec(any::<bool>(), 0..150), b in proptest::collection::vec(any::<bool>(), 0..150)) {
            let (va, vb) = (BitVec::from_bools(&a), BitVec::from_bools(&b));
            let c = va.concat(&vb);
            prop_assert_eq!(c.len(), a.len() + b.len());
            for (i, x) in a.iter().chain(&b).enumerate() {
                prop_assert_eq!(c.get(i), *x);
            }
            prop_assert_eq!(c.slice(0, a.len()), va);
            prop_assert_eq!(c.slice(a.len(), a.len() + b.len()), vb);
        }
    }

    #[test]
    fn image_and_kernel_agree_with_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let images: Vec<BitVec> =
                (0..7).map(|_| BitVec::from_bools(&(0..9).map(|_| rng.gen_bool(0.4)).collect::<Vec<_>>())).collect();
            let (image, kernel) = image_and_kernel(9, &images);
            assert_eq!(image.dim() + kernel.len(), 7);
            assert_eq!(image.dim(), rank(&BitMatrixF2::from_rows(9, &images)));
            for k in &kernel {
                let mut sum = BitVec::zeros(9);
                for i in k.iter_ones() {
                    sum.xor_assign(&images[i]);
                }
                assert!(sum.is_zero());
            }
            for v in image.basis() {
                let tag = image.express(v).unwrap();
                let mut sum = BitVec::zeros(9);
                for i in tag.iter_ones() {
                    sum.xor_assign(&images[i]);
                }
                assert_eq!(&sum, v);
            }
        }
    }

    #[test]
    fn identity_and_zero() {
        let rr = row_reduce(&BitMatrixF2::identity(2));
        assert_eq!((rr.rank, rr.pivots.clone()), (2, vec![0, 1]));
        let rr = row_reduce(&BitMatrixF2::zeros(3, 4));
        assert_eq!((rr.rank, rr.pivots.len()), (0, 0));
        assert!(kernel_basis(&BitMatrixF2::identity(5)).is_empty());
        let k = kernel_basis(&BitMatrixF2::zeros(3, 3));
        assert_eq!(k, (0..3).map(|i| BitVec::unit(3, i)).collect::<Vec<_>>());
    }

    #[test]
    fn rank_matches_naive_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..200 {
            let (m, raw) = random_matrix(&mut rng, 6, 9);
            assert_eq!(row_reduce(&m).rank, naive_rank(&raw));
        }
        // Wider matrices exercise multi-word rows.
        for _ in 0..40 {
            let r = rng.gen_range(1..90);
            let c = rng.gen_range(1..200);
            let (m, raw) = random_matrix(&mut rng, r, c);
            assert_eq!(row_reduce(&m).rank, naive_rank(&raw));
        }
    }

    #[test]
    fn kernel_of_single_row() {
        let k = kernel_basis(&matrix(&[&[1, 1, 0]]));
        assert_eq!(k, vec![BitVec::from_bools(&[true, true, false]), BitVec::from_bools(&[false, false, true])]);
        // Exhaustive oracle: the annihilated vectors are exactly the span.
        let m = matrix(&[&[1, 1, 0]]);
        let span = Subspace::from_vectors(3, &k);
        for x in 0u8..8 {
            let v = BitVec::from_ones(3, (0..3).filter(|i| x >> i & 1 == 1));
            assert_eq!(m.mul_vec(&v).is_zero(), span.contains(&v));
        }
    }

    #[test]
    fn solve_cases() {
        let b = BitVec::from_bools(&[true, false, true]);
        assert_eq!(solve(&BitMatrixF2::identity(3), &b), Some(b.clone()));
        assert_eq!(solve(&BitMatrixF2::zeros(3, 3), &b), None);
        assert_eq!(solve(&BitMatrixF2::zeros(3, 3), &BitVec::zeros(3)), Some(BitVec::zeros(3)));

        let m = matrix(&[&[1, 1, 0, 1, 0, 0], &[0, 1, 1, 0, 1, 0], &[0, 0, 0, 1, 1, 1], &[0, 0, 0, 0, 0, 1]]);
        for rhs in 0u8..16 {
            let b = BitVec::from_ones(4, (0..4).filter(|i| rhs >> i & 1 == 1));
            let exhaustive = (0u8..64)
                .map(|x| BitVec::from_ones(6, (0..6).filter(|i| x >> i & 1 == 1)))
                .find(|x| m.mul_vec(x) == b);
            let got = solve(&m, &b);
            assert_eq!(got.is_some(), exhaustive.is_some());
            if let Some(x) = got {
                assert_eq!(m.mul_vec(&x), b);
            }
        }
    }

    #[test]
    fn quotient_cases() {
        assert!(quotient_basis(&BitMatrixF2::identity(4), 4).is_empty());
        assert_eq!(quotient_basis(&BitMatrixF2::zeros(0, 3), 3).len(), 3);
        let sub = matrix(&[&[1, 1, 0], &[0, 1, 1]]);
        let q = quotient_basis(&sub, 3);
        assert_eq!(q.len(), 1);
        // Exhaustive coset enumeration: subspace + reps reaches every vector.
        let mut all = Subspace::from_vectors(3, &sub.to_rows());
        for r in &q {
            all.insert(r);
        }
        assert_eq!(all.dim(), 3);
    }

    #[test]
    fn subquotient_coordinates() {
        let z: Vec<BitVec> = (0..3).map(|i| BitVec::unit(4, i)).collect();
        let b = vec![BitVec::from_bools(&[true, true, false, false])];
        let sq = Subquotient::new(4, &z, &b);
        assert_eq!(sq.dim(), 2);
        assert_eq!(sq.coordinates(&b[0]).unwrap(), BitVec::zeros(2));
        assert!(sq.coordinates(&BitVec::unit(4, 3)).is_none());
        let c = sq.coordinates(&BitVec::unit(4, 1)).unwrap();
        let back = sq.lift(&c);
        let mut diff = back.clone();
        diff.xor_assign(&BitVec::unit(4, 1));
        assert!(sq.boundaries().contains(&diff));
    }

    proptest! {
        #[test]
        fn rank_nullity(seed in any::<u64>(), r in 0usize..40, c in 0usize..90) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (m, _) = random_matrix(&mut rng, r, c);
            let k = kernel_basis(&m);
            prop_assert_eq!(rank(&m) + k.len(), c);
            for v in &k {
                prop_assert!(m.mul_vec(v).is_zero());
            }
            prop_assert_eq!(Subspace::from_vectors(c, &k).dim(), k.len());
        }

        #[test]
        fn rref_idempotent(seed in any::<u64>(), r in 0usize..30, c in 0usize..70) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (m, _) = random_matrix(&mut rng, r, c);
            let once = row_reduce(&m);
            let twice = row_reduce(&once.matrix);
            prop_assert_eq!(&once, &twice);
            for (i, &p) in once.pivots.iter().enumerate() {
                prop_assert_eq!(once.matrix.column(p), BitVec::unit(r, i));
            }
            prop_assert!(once.pivots.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn solve_roundtrip(seed in any::<u64>(), r in 1usize..30, c in 1usize..70) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (m, _) = random_matrix(&mut rng, r, c);
            let x0 = BitVec::from_ones(c, (0..c).filter(|_| rng.gen_bool(0.5)));
            let b = m.mul_vec(&x0);
            let x = solve(&m, &b).expect("consistent system");
            prop_assert_eq!(m.mul_vec(&x), b);
        }

        #[test]
        fn transpose_and_product(seed in any::<u64>(), r in 1usize..20, k in 1usize..20, c in 1usize..20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, _) = random_matrix(&mut rng, r, k);
            let (b, _) = random_matrix(&mut rng, k, c);
            let v = BitVec::from_ones(c, (0..c).filter(|_| rng.gen_bool(0.5)));
            prop_assert_eq!(a.mul(&b).mul_vec(&v), a.mul_vec(&b.mul_vec(&v)));
            prop_assert_eq!(a.transpose().transpose(), a);
        }
    }
}
