//! Data-parallel map over an index range, with a sequential path that is
//! always available and is the only one without the `parallel` feature.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Parallel,
}

impl Default for Mode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

/// `f(0), f(1), ..., f(n - 1)` in order.
pub fn map_range<R, F>(n: u64, mode: Mode, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = map_range(1000, Mode::Sequential, |i| i * i);
        let b = map_range(1000, Mode::Parallel, |i| i * i);
        assert_eq!(a, b);
    }
}
