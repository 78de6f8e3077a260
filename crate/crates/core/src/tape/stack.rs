//! Chunked stacks backing the tapes.
//!
//! Data is appended in blocks. A block never straddles two chunks, so the
//! reverse sweep can hand out contiguous slices without copying.

use std::mem::size_of;

/// Default chunk size in bytes.
pub const DEFAULT_CHUNK_BYTES: usize = 2 << 20;

#[derive(Debug, Clone)]
pub struct ChunkedStack<T: Copy> {
    chunks: Vec<Vec<T>>,
    chunk_len: usize,
    len: usize,
}

/// Position inside a [`ChunkedStack`], used to walk it block by block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cursor {
    chunk: usize,
    pos: usize,
}

impl<T: Copy> ChunkedStack<T> {
    pub fn new(chunk_bytes: usize) -> Self {
        ChunkedStack {
            chunks: Vec::new(),
            chunk_len: (chunk_bytes / size_of::<T>().max(1)).max(1),
            len: 0,
        }
    }

    /// Number of stored elements.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bytes actually allocated, including unused chunk capacity.
    pub fn reserved_bytes(&self) -> usize {
        self.chunks
            .iter()
            .map(|c| c.capacity() * size_of::<T>())
            .sum()
    }

    /// Append `block` contiguously. Blocks longer than a chunk get a chunk of
    /// their own.
    pub fn push_block(&mut self, block: &[T]) {
        if block.is_empty() {
            return;
        }
        let fits = self
            .chunks
            .last()
            .is_some_and(|c| c.len() + block.len() <= c.capacity());
        if !fits {
            let mut chunk = Vec::with_capacity(self.chunk_len.max(block.len()));
            chunk.extend_from_slice(block);
            self.chunks.push(chunk);
        } else {
            self.chunks.last_mut().unwrap().extend_from_slice(block);
        }
        self.len += block.len();
    }

    /// Drop all elements. The first chunk stays allocated for reuse.
    pub fn clear(&mut self) {
        self.chunks.truncate(1);
        if let Some(c) = self.chunks.first_mut() {
            c.clear();
        }
        self.len = 0;
    }

    pub fn start(&self) -> Cursor {
        Cursor { chunk: 0, pos: 0 }
    }

    pub fn end(&self) -> Cursor {
        match self.chunks.len() {
            0 => Cursor { chunk: 0, pos: 0 },
            n => Cursor {
                chunk: n - 1,
                pos: self.chunks[n - 1].len(),
            },
        }
    }

    /// The block of `n` elements that ends at `cursor`; moves the cursor to its
    /// start.
    pub fn take_back(&self, cursor: &mut Cursor, n: usize) -> &[T] {
        if n == 0 {
            return &[];
        }
        if cursor.pos == 0 {
            cursor.chunk -= 1;
            cursor.pos = self.chunks[cursor.chunk].len();
        }
        assert!(
            cursor.pos >= n,
            "block of {n} elements straddles a chunk boundary"
        );
        let end = cursor.pos;
        cursor.pos -= n;
        &self.chunks[cursor.chunk][cursor.pos..end]
    }

    /// The block of `n` elements that starts at `cursor`; moves the cursor to
    /// its end.
    pub fn take_front(&self, cursor: &mut Cursor, n: usize) -> &[T] {
        if n == 0 {
            return &[];
        }
        if cursor.pos + n > self.chunks[cursor.chunk].len() {
            cursor.chunk += 1;
            cursor.pos = 0;
        }
        let start = cursor.pos;
        cursor.pos += n;
        &self.chunks[cursor.chunk][start..cursor.pos]
    }
}

impl<T: Copy> Default for ChunkedStack<T> {
    fn default() -> Self {
        Self::new(DEFAULT_CHUNK_BYTES)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn blocks_stay_contiguous() {
        let mut s = ChunkedStack::<u8>::new(8);
        s.push_block(&[1, 2, 3, 4, 5]);
        s.push_block(&[6, 7, 8, 9]);
        s.push_block(&[]);
        s.push_block(&[10; 12]);
        assert_eq!(s.len(), 21);
        let mut c = s.end();
        assert_eq!(s.take_back(&mut c, 12), &[10; 12]);
        assert_eq!(s.take_back(&mut c, 4), &[6, 7, 8, 9]);
        assert_eq!(s.take_back(&mut c, 0), &[] as &[u8]);
        assert_eq!(s.take_back(&mut c, 5), &[1, 2, 3, 4, 5]);
        let mut c = s.start();
        assert_eq!(s.take_front(&mut c, 5), &[1, 2, 3, 4, 5]);
        assert_eq!(s.take_front(&mut c, 4), &[6, 7, 8, 9]);
        assert_eq!(s.take_front(&mut c, 12), &[10; 12]);
    }

    #[test]
    fn clear_keeps_first_chunk() {
        let mut s = ChunkedStack::<f64>::new(64);
        s.push_block(&[1.0; 5]);
        s.push_block(&[2.0; 5]);
        s.clear();
        assert!(s.is_empty());
        assert_eq!(s.reserved_bytes(), 64);
        s.push_block(&[3.0]);
        let mut c = s.end();
        assert_eq!(s.take_back(&mut c, 1), &[3.0]);
    }

    proptest! {
        #[test]
        fn walks_recover_every_block(sizes in prop::collection::vec(0usize..20, 0..60), chunk in 1usize..32) {
            let mut s = ChunkedStack::<u32>::new(chunk * 4);
            let mut next = 0u32;
            let mut blocks = Vec::new();
            for n in sizes {
                let b: Vec<u32> = (0..n).map(|_| { next += 1; next }).collect();
                s.push_block(&b);
                blocks.push(b);
            }
            let mut c = s.start();
            for b in &blocks {
                prop_assert_eq!(s.take_front(&mut c, b.len()), b.as_slice());
            }
            let mut c = s.end();
            for b in blocks.iter().rev() {
                prop_assert_eq!(s.take_back(&mut c, b.len()), b.as_slice());
            }
        }
    }
}
