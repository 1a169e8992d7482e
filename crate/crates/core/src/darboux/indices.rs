//! Index sets of the closed-form transform entries.

/// All weakly decreasing tuples `hi >= t[0] >= t[1] >= ... >= lo` of the
/// given length, in lexicographic order.
fn weakly_decreasing(len: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, len: usize, lo: usize, cap: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for v in lo..=cap {
            prefix.push(v);
            extend(prefix, len, lo, v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 || lo > hi {
        return out;
    }
    extend(&mut Vec::with_capacity(len), len, lo, hi, &mut out);
    out
}

/// The set `E_k^(j)`: tuples `(i_1, ..., i_{k+1})` with
/// `j + k + 1 <= i_{k+1} <= ... <= i_1 <= j + p + 1`.
pub fn enumerate_indices(j: usize, k: usize, p: usize) -> Vec<Vec<usize>> {
    weakly_decreasing(k + 1, j + k + 1, j + p + 1)
}

/// The set used by the table recurrence: tuples `(i_1, ..., i_{k+3})` with
/// `k + 3 <= i_{k+3} <= ... <= i_1 <= p + 1` and `i_{k+3} < p + 1`.
///
/// This is `E_{k+2}^(0)` without the constant tuple `(p + 1, ..., p + 1)`.
pub fn enumerate_indices_tilde(k: isize, p: usize) -> Vec<Vec<usize>> {
    if k < -1 {
        return Vec::new();
    }
    let len = (k + 3) as usize;
    weakly_decreasing(len, len, p + 1)
        .into_iter()
        .filter(|t| t[len - 1] < p + 1)
        .collect()
}
