//! Index-range sharding with a small worker pool. Shards are merged
//! associatively so the shard count never changes a result.

/// Split [0, n) into `shards` contiguous ranges, run `work` on each with a
/// pool of `workers` threads, and fold the partial results in shard order.
pub fn run_sharded<T, F>(n: u64, shards: u64, workers: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, std::ops::Range<u64>) -> T + Sync,
{
    let shards = shards.max(1).min(n.max(1));
    let ranges: Vec<(u64, std::ops::Range<u64>)> = (0..shards)
        .map(|s| {
            let lo = n * s / shards;
            let hi = n * (s + 1) / shards;
            (s, lo..hi)
        })
        .collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<T>> = (0..ranges.len()).map(|_| None).collect();
    let slots_ref = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        let workers = workers.max(1).min(ranges.len());
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if idx >= ranges.len() {
                    break;
                }
                let (s, range) = &ranges[idx];
                let out = work(*s, range.clone());
                let mut guard = slots_ref.lock().unwrap();
                guard[idx] = Some(out);
            });
        }
    });
    slots.into_iter().map(|s| s.expect("shard ran")).collect()
}
