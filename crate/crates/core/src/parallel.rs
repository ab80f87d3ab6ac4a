//! Deterministic data-parallel map.
//!
//! Work items are pure functions of their index, so splitting them across
//! threads and collecting by position gives byte-identical results for any
//! worker count. `SHIELD_THREADS` caps the pool; results never depend on it.

/// Worker cap from `SHIELD_THREADS`, falling back to the machine parallelism.
pub fn max_workers() -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("SHIELD_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n.min(available),
            _ => available,
        },
        Err(_) => available,
    }
}

/// Maps `f` over `0..n`, in parallel when the pool allows it. The output is
/// ordered by index and identical to the sequential evaluation.
pub fn par_map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync,
{
    let workers = max_workers().min(n.max(1));
    if workers <= 1 || n < 2 {
        return (0..n).map(f).collect();
    }

    let chunk = n.div_ceil(workers);
    let mut out: Vec<Option<U>> = Vec::with_capacity(n);
    out.resize_with(n, || None);

    std::thread::scope(|scope| {
        let f = &f;
        let mut rest = out.as_mut_slice();
        let mut start = 0;
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            let base = start;
            scope.spawn(move || {
                for (off, slot) in head.iter_mut().enumerate() {
                    *slot = Some(f(base + off));
                }
            });
            rest = tail;
            start += take;
        }
    });

    out.into_iter().map(|slot| slot.expect("worker filled every slot")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sequential_order() {
        let par = par_map_indices(1000, |i| i * i);
        let seq: Vec<usize> = (0..1000).map(|i| i * i).collect();
        assert_eq!(par, seq);
    }

    #[test]
    fn handles_empty_and_single() {
        assert_eq!(par_map_indices(0, |i| i), Vec::<usize>::new());
        assert_eq!(par_map_indices(1, |i| i + 5), vec![5]);
    }
}
