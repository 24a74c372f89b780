//! Logical memory accounting for solver data structures.

/// Tracks bytes handed out to solver data structures and their high-water mark.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MemoryMeter {
    current: usize,
    peak: usize,
}

impl MemoryMeter {
    pub fn new() -> MemoryMeter {
        MemoryMeter::default()
    }

    pub fn alloc(&mut self, bytes: usize) {
        self.current += bytes;
        self.peak = self.peak.max(self.current);
    }

    pub fn free(&mut self, bytes: usize) {
        debug_assert!(bytes <= self.current, "freeing more than was allocated");
        self.current = self.current.saturating_sub(bytes);
    }

    pub fn current_bytes(&self) -> usize {
        self.current
    }

    pub fn peak_bytes(&self) -> usize {
        self.peak
    }
}
