use std::time::Duration;

/// Resource limits and tuning knobs shared by the sieve, the coprime
/// counters and the scan harness.
///
/// All computations that can grow with the input honor these budgets and
/// fail with [`crate::Error::ResourceLimit`] instead of thrashing.
#[derive(Debug, Clone)]
pub struct ComputeConfig {
    /// Entries per sieve segment. Cache-friendliness knob; the default was
    /// chosen by measurement on commodity hardware, not assumed.
    pub segment_size: usize,
    /// Worker threads for segmented sieving. `None` uses the rayon default.
    /// Results are identical for every thread count.
    pub threads: Option<usize>,
    /// Upper bound on bytes allocated for full in-memory tables.
    pub memory_budget_bytes: u64,
    /// Upper bound on search-tree nodes visited by brute-force enumerations.
    pub enumeration_budget: u64,
    /// Optional wall-clock budget for a single operation.
    pub time_budget: Option<Duration>,
}

impl Default for ComputeConfig {
    fn default() -> Self {
        ComputeConfig {
            segment_size: 1 << 20,
            threads: None,
            memory_budget_bytes: 512 * 1024 * 1024,
            enumeration_budget: 1_000_000_000,
            time_budget: None,
        }
    }
}

impl ComputeConfig {
    pub fn with_segment_size(mut self, segment_size: usize) -> Self {
        assert!(segment_size > 0, "segment size must be positive");
        self.segment_size = segment_size;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        assert!(threads > 0, "thread count must be positive");
        self.threads = Some(threads);
        self
    }
}
