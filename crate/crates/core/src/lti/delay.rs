use std::collections::VecDeque;

/// Fixed-length FIFO delaying a signal by a whole number of samples.
///
/// Each [`push`](DelayLine::push) inserts the newest sample and returns the
/// one that entered `len` samples earlier. Before the line has filled, the
/// fill value comes out. With length zero the line is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayLine<T> {
    buffer: VecDeque<T>,
    len: usize,
}

impl<T: Clone> DelayLine<T> {
    pub fn new(len: usize, fill: T) -> Self {
        let buffer = std::iter::repeat_n(fill, len).collect();
        Self { buffer, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, sample: T) -> T {
        if self.len == 0 {
            return sample;
        }
        self.buffer.push_back(sample);
        self.buffer.pop_front().expect("delay line holds len samples")
    }

    /// The sample the next `push` will return, if the line is non-empty.
    pub fn front(&self) -> Option<&T> {
        self.buffer.front()
    }

    /// The most recently pushed sample, if the line is non-empty.
    pub fn back(&self) -> Option<&T> {
        self.buffer.back()
    }

    /// Stored samples, oldest first.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &T> + ExactSizeIterator {
        self.buffer.iter()
    }

    pub fn reset(&mut self, fill: T) {
        for v in self.buffer.iter_mut() {
            *v = fill.clone();
        }
    }
}
