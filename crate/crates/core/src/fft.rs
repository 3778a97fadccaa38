//! Multi-dimensional FFT on interleaved multi-component grid data.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::GridSpec;
use crate::par;

type Plan = Arc<dyn Fft<f64>>;

fn plan(n: usize, direction: FftDirection) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, matches!(direction, FftDirection::Forward));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(n, direction))
        .clone()
}

/// Unnormalized in-place DFT over every active axis of `data`, which holds
/// `ncomp` interleaved components per grid point.
pub fn transform(grid: &GridSpec, ncomp: usize, data: &mut [Complex64], direction: FftDirection) {
    debug_assert_eq!(data.len(), grid.len() * ncomp);
    for axis in 0..grid.ndim() {
        transform_axis(grid, ncomp, data, axis, direction);
    }
}

fn transform_axis(
    grid: &GridSpec,
    ncomp: usize,
    data: &mut [Complex64],
    axis: usize,
    direction: FftDirection,
) {
    let n = grid.n(axis);
    // elements between consecutive points along `axis`
    let inner: usize = (axis + 1..grid.ndim()).map(|a| grid.n(a)).product::<usize>() * ncomp;
    let block = n * inner;
    let fft = plan(n, direction);
    if inner == 1 {
        par::for_each_chunk(data, n, |_, line| fft.process(line));
        return;
    }
    // gather strided lines into contiguous rows, transform, scatter back
    let outer = data.len() / block;
    let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
    for o in 0..outer {
        for offset in 0..inner {
            let row = (o * inner + offset) * n;
            for j in 0..n {
                lines[row + j] = data[o * block + j * inner + offset];
            }
        }
    }
    par::for_each_chunk(&mut lines, n, |_, line| fft.process(line));
    for o in 0..outer {
        for offset in 0..inner {
            let row = (o * inner + offset) * n;
            for j in 0..n {
                data[o * block + j * inner + offset] = lines[row + j];
            }
        }
    }
}

/// `(-1)^(sum of storage indices)`: the phase `exp(-i p_k x_0)` picked up
/// because the first grid point sits at `-L/2`.
pub fn alternating_sign(grid: &GridSpec, flat: usize) -> f64 {
    let ix = grid.unflatten(flat);
    if ix[..grid.ndim()].iter().sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub use rustfft::FftDirection as Direction;
